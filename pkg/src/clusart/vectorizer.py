"""Top-n frequency vocabulary and TF-IDF document vectors scaled into [0, 1]."""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import EmptyVocabularyError, ParameterError


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    collection_freq: tuple[int, ...]
    doc_freq: tuple[int, ...]
    corpus_size: int

    def __len__(self):
        return len(self.terms)

    @property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    @property
    def idf(self) -> np.ndarray:
        df = np.asarray(self.doc_freq, dtype=np.float64)
        return np.log(self.corpus_size / df)


def _tokens(doc):
    return doc.tokens if hasattr(doc, "tokens") else doc


def build_vocabulary(docs: Iterable, n: int) -> Vocabulary:
    """Keep the ``n`` stems with the highest collection frequency.

    Ties are broken by ascending term. If fewer than ``n`` distinct stems
    exist, all of them are kept.
    """
    if n < 1:
        raise ParameterError(f"vocabulary size must be >= 1, got {n}")
    cf, df = Counter(), Counter()
    size = 0
    for doc in docs:
        toks = _tokens(doc)
        size += 1
        cf.update(toks)
        df.update(set(toks))
    if not cf:
        raise EmptyVocabularyError("every document is empty after preprocessing")
    terms = sorted(cf, key=lambda t: (-cf[t], t))[:n]
    return Vocabulary(tuple(terms), tuple(cf[t] for t in terms),
                      tuple(df[t] for t in terms), size)


def tfidf_vector(doc, vocab: Vocabulary, *, _index=None, _idf=None) -> np.ndarray:
    """Raw weights ``count(term_k, doc) * ln(|D| / DF_k)`` over the vocabulary."""
    index = vocab.index if _index is None else _index
    idf = vocab.idf if _idf is None else _idf
    tf = np.zeros(len(vocab))
    for tok in _tokens(doc):
        k = index.get(tok)
        if k is not None:
            tf[k] += 1.0
    return tf * idf


def tfidf_matrix(docs: Sequence, vocab: Vocabulary) -> np.ndarray:
    index, idf = vocab.index, vocab.idf
    rows = [tfidf_vector(d, vocab, _index=index, _idf=idf) for d in docs]
    return np.vstack(rows) if rows else np.zeros((0, len(vocab)))


def scale_to_unit_interval(raw, maxima=None) -> tuple[np.ndarray, np.ndarray]:
    """Divide each feature by its training maximum and clamp to [0, 1].

    With ``maxima=None`` the maxima are taken from ``raw`` itself (the
    training split). Features whose maximum is zero stay zero.
    """
    raw = np.atleast_2d(np.asarray(raw, dtype=np.float64))
    if maxima is None:
        if raw.shape[0] == 0:
            raise ParameterError("cannot derive scaling from zero vectors")
        maxima = raw.max(axis=0)
    maxima = np.asarray(maxima, dtype=np.float64)
    safe = np.where(maxima > 0, maxima, 1.0)
    scaled = np.where(maxima > 0, raw / safe, 0.0)
    return np.clip(scaled, 0.0, 1.0), maxima


class TopNTfidfVectorizer(TransformerMixin, BaseEstimator):
    """TF-IDF over the ``n_features`` most frequent training stems.

    Input is a sequence of token sequences. The vocabulary, document
    frequencies and per-feature scaling maxima all come from ``fit``; the
    output of ``transform`` lies in [0, 1].
    """

    def __init__(self, n_features=1000):
        self.n_features = n_features

    def fit(self, X, y=None):
        self.vocabulary_ = build_vocabulary(X, self.n_features)
        raw = tfidf_matrix(list(X), self.vocabulary_)
        _, self.scaling_maxima_ = scale_to_unit_interval(raw)
        self.n_features_out_ = len(self.vocabulary_)
        return self

    def transform(self, X):
        check_is_fitted(self, "vocabulary_")
        raw = tfidf_matrix(list(X), self.vocabulary_)
        return scale_to_unit_interval(raw, self.scaling_maxima_)[0]

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "vocabulary_")
        return np.asarray(self.vocabulary_.terms, dtype=object)


def save_vocabulary(vocab: Vocabulary, maxima, path) -> None:
    payload = {
        "terms": list(vocab.terms),
        "collection_freq": list(vocab.collection_freq),
        "doc_freq": list(vocab.doc_freq),
        "corpus_size": vocab.corpus_size,
        "scaling_maxima": [float(m) for m in maxima],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_vocabulary(path) -> tuple[Vocabulary, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        p = json.load(fh)
    vocab = Vocabulary(tuple(p["terms"]), tuple(p.get("collection_freq", [0] * len(p["terms"]))),
                       tuple(p["doc_freq"]), p["corpus_size"])
    return vocab, np.asarray(p["scaling_maxima"], dtype=np.float64)


def save_vectors(doc_ids: Sequence[str], X, path) -> None:
    X = np.asarray(X, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["doc_id"] + [f"f{k}" for k in range(X.shape[1])])
        for doc_id, row in zip(doc_ids, X):
            w.writerow([doc_id] + [repr(float(v)) for v in row])


def load_vectors(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        ids, rows = [], []
        for rec in r:
            ids.append(rec[0])
            rows.append([float(v) for v in rec[1:]])
    return ids, np.asarray(rows, dtype=np.float64).reshape(len(ids), len(header) - 1)


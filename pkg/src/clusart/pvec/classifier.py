"""Rank Fuzzy ART categories for unseen documents by paragraph-vector cosine."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import InferenceError, ParameterError
from .model import ParagraphVector, PvModel, infer_vector


@dataclass(frozen=True)
class ClusterSummary:
    category: int
    centroid: np.ndarray
    member_count: int


def cosine(u, v) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def build_summaries(model: PvModel, categories: Mapping[str, int]) -> list[ClusterSummary]:
    """Centroid of the trained paragraph vectors of each category's members.

    ``categories`` maps training doc id to category. Members the embedding
    skipped (no in-vocabulary tokens) do not contribute; a category left with
    no contributing member gets no summary.
    """
    rows: dict[int, list[int]] = {}
    for i, doc_id in enumerate(model.doc_ids):
        if doc_id in categories and model.trained[i]:
            rows.setdefault(categories[doc_id], []).append(i)
    return [ClusterSummary(c, model.D[r].mean(axis=0), len(r)) for c, r in sorted(rows.items())]


def rank_categories(vector, summaries: Sequence[ClusterSummary]) -> list[tuple[int, float]]:
    scored = [(s.category, cosine(vector, s.centroid)) for s in summaries]
    return sorted(scored, key=lambda cs: (-cs[1], cs[0]))


def classify(model: PvModel, summaries: Sequence[ClusterSummary], tokens,
             infer_epochs: int = 20, seed: int = 0) -> list[tuple[int, float]]:
    """Categories ranked by cosine between the inferred vector and each centroid.

    Raises InferenceError when the document has no in-vocabulary token.
    """
    if not summaries:
        raise ParameterError("no cluster summaries to classify against")
    return rank_categories(infer_vector(model, tokens, infer_epochs, seed), summaries)


@dataclass(frozen=True)
class TopicPrediction:
    doc_id: str
    ranking: tuple[tuple[int, float], ...]
    fallback: bool = False

    @property
    def category(self) -> int:
        return self.ranking[0][0]


class ParagraphVectorClassifier(ClassifierMixin, BaseEstimator):
    """Assign unseen documents to the categories found on the training set.

    ``fit(X, y)`` trains a :class:`ParagraphVector` on the training token
    sequences ``X`` and summarises each category of ``y`` by the centroid of
    its members' paragraph vectors. ``predict`` returns the category whose
    centroid is closest in cosine. Documents without any in-vocabulary token
    fall back to the largest training category.
    """

    def __init__(self, para_dim=50, word_dim=50, window=4, mode="pv_dm", combine="average",
                 epochs=20, learning_rate=0.025, min_learning_rate=1e-4, min_count=2,
                 infer_epochs=20, seed=0):
        self.para_dim = para_dim
        self.word_dim = word_dim
        self.window = window
        self.mode = mode
        self.combine = combine
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.min_learning_rate = min_learning_rate
        self.min_count = min_count
        self.infer_epochs = infer_epochs
        self.seed = seed

    def fit(self, X, y, doc_ids: Sequence[str] | None = None):
        X = list(X)
        y = [int(c) for c in y]
        if len(X) != len(y):
            raise ParameterError("X and y have different lengths")
        ids = list(doc_ids) if doc_ids is not None else [str(i) for i in range(len(X))]
        self.embedding_ = ParagraphVector(**self.get_params()).fit(X, doc_ids=ids)
        self.summaries_ = build_summaries(self.embedding_.model_, dict(zip(ids, y)))
        if not self.summaries_:
            raise ParameterError("no category has an embeddable member")
        self.classes_ = np.asarray([s.category for s in self.summaries_])
        sizes = np.bincount(y)
        self.fallback_category_ = int(np.argmax(sizes))
        return self

    @classmethod
    def from_parts(cls, model: PvModel, summaries, fallback_category: int):
        clf = cls(**{k: v for k, v in model.params.items() if k in cls._get_param_names()})
        clf.embedding_ = ParagraphVector(**model.params)
        clf.embedding_.model_ = model
        clf.summaries_ = list(summaries)
        clf.classes_ = np.asarray([s.category for s in clf.summaries_])
        clf.fallback_category_ = fallback_category
        return clf

    def rank(self, X, doc_ids: Sequence[str] | None = None) -> list[TopicPrediction]:
        check_is_fitted(self, "summaries_")
        X = list(X)
        ids = list(doc_ids) if doc_ids is not None else [str(i) for i in range(len(X))]
        out = []
        for doc_id, tokens in zip(ids, X):
            try:
                ranking = classify(self.embedding_.model_, self.summaries_, tokens,
                                   self.infer_epochs, self.seed)
                out.append(TopicPrediction(doc_id, tuple(ranking)))
            except InferenceError:
                out.append(TopicPrediction(doc_id, ((self.fallback_category_, 0.0),), True))
        return out

    def predict(self, X):
        return np.asarray([p.category for p in self.rank(X)], dtype=np.intp)


def save_topics(predictions: Sequence[TopicPrediction], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["doc_id", "predicted_category", "similarity", "rank2_category",
                    "rank2_similarity", "fallback"])
        for p in predictions:
            second = p.ranking[1] if len(p.ranking) > 1 else ("", "")
            w.writerow([p.doc_id, p.ranking[0][0], repr(p.ranking[0][1]),
                        second[0], repr(second[1]) if second[1] != "" else "",
                        int(p.fallback)])


def load_topics(path) -> list[TopicPrediction]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for r in csv.DictReader(fh):
            ranking = [(int(r["predicted_category"]), float(r["similarity"]))]
            if r["rank2_category"] != "":
                ranking.append((int(r["rank2_category"]), float(r["rank2_similarity"])))
            out.append(TopicPrediction(r["doc_id"], tuple(ranking), r.get("fallback") == "1"))
    return out

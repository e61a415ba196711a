"""Tokenization, stopword filtering and stemming."""

from __future__ import annotations

import json
import re
import string
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import Document
from .porter import porter_stem

# whitespace, ASCII punctuation and the Unicode general-punctuation block
_DELIMITERS = re.compile(r"[\s" + re.escape(string.punctuation) + "\u00a0-\u00bf\u2000-\u206f]+")


@dataclass(frozen=True)
class TokenizedDoc:
    id: str
    tokens: tuple[str, ...]


def default_stoplist() -> frozenset[str]:
    text = resources.files("clusart").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def load_stoplist(path=None) -> frozenset[str]:
    """Read one stopword per line; ``None`` gives the bundled English list."""
    if path is None:
        return default_stoplist()
    with open(path, encoding="utf-8") as fh:
        return frozenset(w.strip().lower() for w in fh if w.strip())


def tokenize(text: str) -> list[str]:
    """Split on whitespace and punctuation, lowercase, drop empty fragments.

    Tokens mixing letters and digits are kept as they are.
    """
    return [t for t in _DELIMITERS.split(text.lower()) if t]


def filter_stopwords(tokens: Iterable[str], stoplist) -> list[str]:
    return [t for t in tokens if t not in stoplist]


def stem_token(token: str) -> str:
    # the stemmer is only defined for alphabetic input
    return porter_stem(token) if token.isalpha() else token


def preprocess_text(text: str, stoplist) -> tuple[str, ...]:
    return tuple(stem_token(t) for t in filter_stopwords(tokenize(text), stoplist))


def preprocess_document(doc: Document, stoplist) -> TokenizedDoc:
    return TokenizedDoc(doc.id, preprocess_text(doc.text, stoplist))


class TextPreprocessor(TransformerMixin, BaseEstimator):
    """Turn raw strings into stemmed token tuples.

    Parameters
    ----------
    stoplist : iterable of str or None
        Words removed before stemming. ``None`` uses the bundled list.
    """

    def __init__(self, stoplist=None):
        self.stoplist = stoplist

    def fit(self, X=None, y=None):
        self.stoplist_ = (default_stoplist() if self.stoplist is None
                          else frozenset(w.lower() for w in self.stoplist))
        return self

    def transform(self, X: Sequence[str]) -> list[tuple[str, ...]]:
        stoplist = getattr(self, "stoplist_", None)
        if stoplist is None:
            self.fit()
            stoplist = self.stoplist_
        return [preprocess_text(text, stoplist) for text in X]


def save_tokens(docs: Iterable[TokenizedDoc], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for d in docs:
            fh.write(json.dumps({"id": d.id, "tokens": list(d.tokens)}, ensure_ascii=False) + "\n")


def load_tokens(path) -> list[TokenizedDoc]:
    with open(path, encoding="utf-8") as fh:
        return [TokenizedDoc(r["id"], tuple(r["tokens"]))
                for r in map(json.loads, filter(str.strip, fh))]

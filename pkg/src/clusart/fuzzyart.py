"""Fuzzy ART clustering: complement coding, choice/vigilance search, learning."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DomainError, ParameterError

COMPLEMENT_CODING = "complement_coding"
L1_NORMALIZATION = "l1_normalization"
INPUT_MODES = (COMPLEMENT_CODING, L1_NORMALIZATION)


def _check_unit(a):
    a = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(a)) or np.any(a < 0.0) or np.any(a > 1.0):
        raise DomainError("Fuzzy ART inputs must lie in [0, 1]")
    return a


def complement_code(a) -> np.ndarray:
    """Return ``(a, 1 - a)``; the L1 norm of the result equals ``a.shape[-1]``.

    Works on a single vector or on the rows of a matrix.
    """
    a = _check_unit(a)
    return np.concatenate([a, 1.0 - a], axis=-1)


def l1_normalize(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    norm = np.abs(a).sum(axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise DomainError("cannot L1-normalize a zero vector")
    return a / norm


def fuzzy_min(x, y) -> np.ndarray:
    """Fuzzy AND: componentwise minimum."""
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DomainError(f"length mismatch: {x.shape} vs {y.shape}")
    return np.minimum(x, y)


def choice(I, w, alpha: float) -> float:
    """Choice function ``|I ^ w| / (alpha + |w|)``."""
    w = np.asarray(w, dtype=np.float64)
    return float(fuzzy_min(I, w).sum() / (alpha + w.sum()))


def match(I, w) -> float:
    """Match ratio ``|I ^ w| / |I|``, compared against the vigilance."""
    I = np.asarray(I, dtype=np.float64)
    return float(fuzzy_min(I, w).sum() / I.sum())


@dataclass(frozen=True)
class Assignment:
    doc_id: str
    category: int
    choice: float
    match: float


def validate_params(alpha, beta, rho, max_epochs=1, input_mode=COMPLEMENT_CODING):
    if not alpha > 0:
        raise ParameterError(f"alpha must be > 0, got {alpha}")
    if not 0.0 <= beta <= 1.0:
        raise ParameterError(f"beta must lie in [0, 1], got {beta}")
    if not 0.0 <= rho <= 1.0:
        raise ParameterError(f"rho must lie in [0, 1], got {rho}")
    if int(max_epochs) != max_epochs or max_epochs < 1:
        raise ParameterError(f"max_epochs must be a positive integer, got {max_epochs}")
    if input_mode not in INPUT_MODES:
        raise ParameterError(f"input_mode must be one of {INPUT_MODES}, got {input_mode!r}")


class FuzzyART(ClusterMixin, BaseEstimator):
    """Fuzzy ART clustering network.

    Categories are created on demand: each search ranks the committed
    categories together with one uncommitted node (all weights 1), so the
    search always terminates. Presentation order is the row order of ``X``;
    Fuzzy ART is order-sensitive.

    Parameters
    ----------
    alpha : float
        Choice parameter, > 0.
    beta : float
        Learning rate in [0, 1]; 1 is fast learning.
    rho : float
        Vigilance in [0, 1]. Higher values give finer categories.
    fast_commit : bool
        Use ``beta = 1`` when a category is first committed.
    max_epochs : int
        Upper bound on presentation epochs. Training stops earlier when an
        epoch leaves every assignment unchanged.
    input_mode : {"complement_coding", "l1_normalization"}
        Preprocessing applied to each input before presentation.

    Attributes
    ----------
    weights_ : ndarray of shape (n_categories, coded_dim)
    labels_ : ndarray of shape (n_samples,)
        Category of each training row in the last epoch.
    assignments_ : list of Assignment
    n_epochs_ : int
    converged_ : bool
    """

    def __init__(self, alpha=0.2, beta=0.4, rho=0.8, fast_commit=True, max_epochs=50,
                 input_mode=COMPLEMENT_CODING):
        self.alpha = alpha
        self.beta = beta
        self.rho = rho
        self.fast_commit = fast_commit
        self.max_epochs = max_epochs
        self.input_mode = input_mode

    # -- state -----------------------------------------------------------

    def _init_state(self, input_dim):
        self.input_dim_ = input_dim
        coded = 2 * input_dim if self.input_mode == COMPLEMENT_CODING else input_dim
        self._w = np.ones((8, coded))
        self._n = 0

    @property
    def n_categories_(self):
        return self._n

    @property
    def weights_(self):
        return self._w[:self._n].copy()

    def _code(self, X):
        X = _check_unit(X)
        if self.input_mode == COMPLEMENT_CODING:
            return complement_code(X)
        return l1_normalize(X)

    # -- dynamics --------------------------------------------------------

    def _search(self, I, allow_new=True):
        """Return ``(index, choice, match)``; ``index == n_categories_`` means
        the uncommitted node won."""
        n = self._n
        W = self._w[:n]
        norm_I = I.sum()
        inter = np.minimum(W, I).sum(axis=1)
        scores = np.empty(n + 1)
        scores[:n] = inter / (self.alpha + W.sum(axis=1))
        scores[n] = norm_I / (self.alpha + I.size)
        # stable sort: equal choice values resolve to the smallest index
        for j in np.argsort(-scores, kind="stable"):
            if j == n:
                if allow_new:
                    return n, float(scores[n]), 1.0
                continue
            m = inter[j] / norm_I
            if m >= self.rho:
                return int(j), float(scores[j]), float(m)
        return -1, float("nan"), float("nan")

    def _commit(self, I):
        if self._n == self._w.shape[0]:
            self._w = np.vstack([self._w, np.ones_like(self._w)])
        self._n += 1
        beta = 1.0 if self.fast_commit else self.beta
        self._learn(self._n - 1, I, beta)

    def _learn(self, j, I, beta):
        w = self._w[j]
        if beta == 1.0:
            self._w[j] = np.minimum(I, w)
        else:
            # same as beta*(I^w) + (1-beta)*w, arranged so no component can round upward
            self._w[j] = w - beta * (w - np.minimum(I, w))

    def present(self, I, learn=True):
        """Present one already-coded input.

        Returns ``(category, choice, match)``. With ``learn=False`` no weight
        changes and no category is created; ``category`` is -1 when no
        committed category passes the vigilance test.
        """
        j, t, m = self._search(I, allow_new=learn)
        if learn:
            if j == self._n:
                self._commit(I)
            else:
                self._learn(j, I, self.beta)
        return j, t, m

    # -- estimator API ---------------------------------------------------

    def fit(self, X, y=None, doc_ids: Sequence[str] | None = None):
        validate_params(self.alpha, self.beta, self.rho, self.max_epochs, self.input_mode)
        if len(X) == 0:
            raise ParameterError("cannot train on an empty collection")
        X = check_array(X, dtype=np.float64)
        coded = self._code(X)
        self._init_state(X.shape[1])
        prev = None
        self.converged_ = False
        for epoch in range(int(self.max_epochs)):
            results = [self.present(I, learn=True) for I in coded]
            labels = [r[0] for r in results]
            self.n_epochs_ = epoch + 1
            if labels == prev:
                self.converged_ = True
                break
            prev = labels
        self.labels_ = np.asarray(labels, dtype=np.intp)
        ids = list(doc_ids) if doc_ids is not None else [str(i) for i in range(len(coded))]
        self.assignments_ = [Assignment(i, j, t, m) for i, (j, t, m) in zip(ids, results)]
        return self

    def predict(self, X):
        """Resonating category for each row without learning (-1 if none)."""
        check_is_fitted(self, "labels_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.input_dim_:
            raise DomainError(f"expected {self.input_dim_} features, got {X.shape[1]}")
        return np.asarray([self.present(I, learn=False)[0] for I in self._code(X)], dtype=np.intp)

    def clusters(self) -> dict[int, list[str]]:
        """Documents of the last training epoch grouped by category."""
        check_is_fitted(self, "labels_")
        groups: dict[int, list[str]] = {}
        for a in self.assignments_:
            groups.setdefault(a.category, []).append(a.doc_id)
        return dict(sorted(groups.items()))

    # -- persistence -----------------------------------------------------

    def to_dict(self):
        check_is_fitted(self, "labels_")
        return {
            "alpha": self.alpha, "beta": self.beta, "rho": self.rho,
            "fast_commit": bool(self.fast_commit), "max_epochs": int(self.max_epochs),
            "input_dim": int(self.input_dim_), "input_mode": self.input_mode,
            "categories": [[float(v) for v in row] for row in self.weights_],
        }

    @classmethod
    def from_dict(cls, d):
        model = cls(alpha=d["alpha"], beta=d["beta"], rho=d["rho"],
                    fast_commit=d.get("fast_commit", True), max_epochs=d.get("max_epochs", 50),
                    input_mode=d["input_mode"])
        model._init_state(d["input_dim"])
        W = np.asarray(d["categories"], dtype=np.float64).reshape(-1, model._w.shape[1])
        model._w = np.vstack([W, np.ones((1, W.shape[1]))])
        model._n = W.shape[0]
        model.labels_ = np.zeros(0, dtype=np.intp)
        model.assignments_ = []
        return model


def train(vectors, doc_ids=None, **params) -> tuple[FuzzyART, list[Assignment]]:
    model = FuzzyART(**params).fit(vectors, doc_ids=doc_ids)
    return model, model.assignments_


def save_model(model: FuzzyART, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(model.to_dict(), fh)
        fh.write("\n")


def load_model(path) -> FuzzyART:
    with open(path, encoding="utf-8") as fh:
        return FuzzyART.from_dict(json.load(fh))


def save_assignments(assignments: Sequence[Assignment], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["doc_id", "category", "choice", "match"])
        for a in assignments:
            w.writerow([a.doc_id, a.category, repr(a.choice), repr(a.match)])


def load_assignments(path) -> list[Assignment]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [Assignment(r["doc_id"], int(r["category"]), float(r["choice"]), float(r["match"]))
                for r in csv.DictReader(fh)]

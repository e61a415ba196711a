"""Precision/recall/F-measure, cluster labelling, vigilance sweep and a kNN baseline."""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DomainError, ParameterError
from .fuzzyart import FuzzyART


def f_measure(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class ClusterLabelMap:
    mapping: dict[int, str]
    coverage: float

    def __getitem__(self, category):
        return self.mapping[category]

    def get(self, category, default=None):
        return self.mapping.get(category, default)


def map_clusters_majority(assignments: Mapping[str, int] | Iterable,
                          gold_labels: Mapping[str, str]) -> ClusterLabelMap:
    """Label each cluster with the majority gold label of its members.

    ``assignments`` is either a ``doc_id -> category`` mapping or an iterable
    of objects with ``doc_id`` and ``category``. Ties go to the
    lexicographically smaller label. Several clusters may share a label.
    """
    if not isinstance(assignments, Mapping):
        assignments = {a.doc_id: a.category for a in assignments}
    members: dict[int, Counter] = {}
    for doc_id, cat in assignments.items():
        if cat is None or cat < 0:
            continue
        if doc_id not in gold_labels or gold_labels[doc_id] is None:
            raise ParameterError(f"document {doc_id!r} has no gold label")
        members.setdefault(cat, Counter())[gold_labels[doc_id]] += 1
    mapping = {}
    for cat in sorted(members):
        counts = members[cat]
        mapping[cat] = min(counts, key=lambda lab: (-counts[lab], lab))
    covered = sum(sum(c.values()) for c in members.values())
    coverage = covered / len(assignments) if assignments else 0.0
    return ClusterLabelMap(mapping, coverage)


@dataclass
class EvalReport:
    labels: list[str]
    per_label: dict[str, dict[str, float]]
    macro: dict[str, float]
    micro: dict[str, float]
    confusion: list[list[int]]
    predicted_labels: list[str]
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {"labels": self.labels, "per_label": self.per_label, "macro": self.macro,
                "micro": self.micro, "confusion_labels": self.predicted_labels,
                "confusion": self.confusion, **self.extra}

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=False)
            fh.write("\n")


def prf(predicted: Sequence, gold: Sequence) -> EvalReport:
    """Per-label and averaged precision, recall and F-measure.

    Macro averages run over the labels present in ``gold``. Micro averages
    pool true positives over those labels. A label never predicted has
    precision 0.
    """
    predicted, gold = list(predicted), list(gold)
    if len(predicted) != len(gold):
        raise DomainError(f"length mismatch: {len(predicted)} predictions, {len(gold)} gold")
    labels = sorted(set(gold), key=str)
    pred_labels = sorted(set(predicted) | set(gold), key=str)
    col = {lab: j for j, lab in enumerate(pred_labels)}
    row = {lab: i for i, lab in enumerate(labels)}
    confusion = np.zeros((len(labels), len(pred_labels)), dtype=int)
    for p, g in zip(predicted, gold):
        confusion[row[g], col[p]] += 1
    per_label = {}
    tp_sum = 0
    n_pred_sum = 0
    for lab in labels:
        tp = int(confusion[row[lab], col[lab]])
        n_pred = int(confusion[:, col[lab]].sum())
        n_gold = int(confusion[row[lab]].sum())
        p = tp / n_pred if n_pred else 0.0
        r = tp / n_gold if n_gold else 0.0
        per_label[str(lab)] = {"precision": p, "recall": r, "f_measure": f_measure(p, r),
                               "support": n_gold}
        tp_sum += tp
        n_pred_sum += n_pred
    macro = {k: float(np.mean([v[k] for v in per_label.values()])) if per_label else 0.0
             for k in ("precision", "recall", "f_measure")}
    micro_p = tp_sum / n_pred_sum if n_pred_sum else 0.0
    micro_r = tp_sum / len(gold) if gold else 0.0
    micro = {"precision": micro_p, "recall": micro_r, "f_measure": f_measure(micro_p, micro_r)}
    return EvalReport([str(x) for x in labels], per_label, macro, micro, confusion.tolist(),
                      [str(x) for x in pred_labels])


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included when within 1e-9 of a step."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ParameterError(f"grid must look like start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise ParameterError(f"invalid grid {text!r}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def vigilance_sweep(vectors, rho_grid: Sequence[float], **params) -> list[tuple[float, int]]:
    """Train a fresh Fuzzy ART per vigilance value and report category counts."""
    grid = list(rho_grid)
    if not grid:
        raise ParameterError("empty vigilance grid")
    if any(not 0.0 <= r <= 1.0 for r in grid) or grid != sorted(grid):
        raise ParameterError("grid values must lie in [0, 1] in ascending order")
    params.pop("rho", None)
    return [(rho, FuzzyART(rho=rho, **params).fit(vectors).n_categories_) for rho in grid]


def save_sweep(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rho", "categories"])
        for rho, n in rows:
            w.writerow([repr(float(rho)), n])


def _cosine_rows(A, v):
    norms = np.linalg.norm(A, axis=1) * np.linalg.norm(v)
    dots = A @ v
    return np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)


def knn_predict(train_vectors, train_labels: Sequence[str], test_vector, k: int) -> str:
    """Majority label among the ``k`` training vectors closest in cosine.

    Ties in the vote go to the label with the smaller summed cosine distance,
    then to the lexicographically smaller label. Equal similarities are
    ranked by training order.
    """
    A = np.asarray(train_vectors, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] == 0:
        raise ParameterError("kNN needs a non-empty training set")
    if not 1 <= k <= A.shape[0]:
        raise ParameterError(f"k must lie in [1, {A.shape[0]}], got {k}")
    sims = _cosine_rows(A, np.asarray(test_vector, dtype=np.float64))
    nearest = np.argsort(-sims, kind="stable")[:k]
    votes: dict[str, list[float]] = {}
    for i in nearest:
        votes.setdefault(train_labels[i], []).append(1.0 - sims[i])
    return min(votes, key=lambda lab: (-len(votes[lab]), sum(votes[lab]), lab))


class KNNTopicClassifier(ClassifierMixin, BaseEstimator):
    """Cosine k-nearest-neighbour classifier used as a supervised baseline."""

    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        X = check_array(X, dtype=np.float64)
        if len(y) != X.shape[0]:
            raise ParameterError("X and y have different lengths")
        self.X_ = X
        self.y_ = [str(v) for v in y]
        self.classes_ = np.asarray(sorted(set(self.y_)))
        return self

    def predict(self, X):
        check_is_fitted(self, "X_")
        X = check_array(X, dtype=np.float64)
        return np.asarray([knn_predict(self.X_, self.y_, x, self.n_neighbors) for x in X],
                          dtype=object)

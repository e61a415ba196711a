"""Paragraph Vector (PV-DM and PV-DBOW) trained with a Huffman hierarchical softmax."""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import EmptyVocabularyError, InferenceError, ParameterError
from .huffman import HuffmanTree, build_huffman

logger = logging.getLogger(__name__)

PV_DM = "pv_dm"
PV_DBOW = "pv_dbow"
AVERAGE = "average"
CONCATENATE = "concatenate"


def log_sigmoid(z):
    return -np.logaddexp(0.0, -z)


def sigmoid(z):
    return np.exp(log_sigmoid(z))


def hs_loss_grad(h, U, b, points, signs):
    """Negative log-probability of one word under the hierarchical softmax.

    ``points`` are the inner nodes on the word's path and ``signs`` are +1
    for a 0 bit and -1 for a 1 bit, so the word probability is
    ``prod(sigmoid(signs * (U[points] @ h + b[points])))``.

    Returns ``(loss, grad_h, grad_U_rows, grad_b_rows)``; the last two are
    aligned with ``points``.
    """
    Up = U[points]
    z = signs * (Up @ h + b[points])
    loss = -float(log_sigmoid(z).sum())
    # d(loss)/d(x) per node, where x = U[n] @ h + b[n]
    g = -signs * sigmoid(-z)
    return loss, g @ Up, np.outer(g, h), g


def hs_word_probabilities(h, U, b, tree: HuffmanTree) -> np.ndarray:
    """Probability of every vocabulary word given ``h``; sums to one."""
    x = U @ h + b
    return np.asarray([
        float(np.exp(log_sigmoid(tree.signs(i) * x[list(tree.points[i])]).sum()))
        for i in range(len(tree.words))
    ])


def softmax_word_probabilities(h, U_flat, b_flat) -> np.ndarray:
    """Plain softmax over ``y = b + U h`` (reference backend for tests)."""
    y = U_flat @ h + b_flat
    y = y - y.max()
    e = np.exp(y)
    return e / e.sum()


@dataclass
class PvModel:
    """Trained parameters.

    ``D`` has one row per training document, ``W`` one row per vocabulary
    word plus a trailing padding row used by the concatenating combiner,
    ``U``/``b`` one row/entry per inner Huffman node.
    """

    params: dict
    doc_ids: list[str]
    D: np.ndarray
    W: np.ndarray
    U: np.ndarray
    b: np.ndarray
    tree: HuffmanTree
    trained: np.ndarray
    loss_history: list[float] = field(default_factory=list)

    @property
    def word_index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.tree.words)}

    @property
    def null_index(self) -> int:
        return len(self.tree.words)

    def n_parameters(self) -> int:
        return int(self.D.size + (self.W.shape[0] - 1) * self.W.shape[1] + self.U.size + self.b.size)

    def to_dict(self):
        def mat(a):
            return {"shape": list(a.shape), "data": [float(v) for v in a.ravel()]}
        return {"params": self.params, "doc_ids": self.doc_ids, "tree": self.tree.to_dict(),
                "trained": [bool(t) for t in self.trained], "loss_history": self.loss_history,
                "D": mat(self.D), "W": mat(self.W), "U": mat(self.U), "b": mat(self.b)}

    @classmethod
    def from_dict(cls, d):
        def mat(m):
            return np.asarray(m["data"], dtype=np.float64).reshape(m["shape"])
        return cls(d["params"], list(d["doc_ids"]), mat(d["D"]), mat(d["W"]), mat(d["U"]),
                   mat(d["b"]), HuffmanTree.from_dict(d["tree"]),
                   np.asarray(d["trained"], dtype=bool), list(d["loss_history"]))

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# -- forward/backward for a single training example --------------------------


def context_indices(ids, t, window, null_index=None):
    """Word rows around position ``t``.

    With ``null_index`` the result always has ``2 * window`` slots and
    positions outside the document are filled with it; otherwise only the
    positions inside the document are returned.
    """
    out = []
    for off in list(range(-window, 0)) + list(range(1, window + 1)):
        j = t + off
        if 0 <= j < len(ids):
            out.append(ids[j])
        elif null_index is not None:
            out.append(null_index)
    return out


def dm_example(d, W, U, b, ctx, points, signs, combine):
    """Loss and gradients for predicting one word from a paragraph vector and
    its context words.

    Returns ``(loss, grad_d, grad_ctx_rows, grad_U_rows, grad_b_rows)``;
    ``grad_ctx_rows[i]`` belongs to ``W[ctx[i]]``.
    """
    if combine == AVERAGE:
        n = 1 + len(ctx)
        h = (d + W[ctx].sum(axis=0)) / n
        loss, gh, gU, gb = hs_loss_grad(h, U, b, points, signs)
        gh = gh / n
        return loss, gh, np.tile(gh, (len(ctx), 1)), gU, gb
    p = d.shape[0]
    h = np.concatenate([d, W[ctx].ravel()])
    loss, gh, gU, gb = hs_loss_grad(h, U, b, points, signs)
    return loss, gh[:p], gh[p:].reshape(len(ctx), -1), gU, gb


def dbow_example(d, U, b, points, signs):
    loss, gh, gU, gb = hs_loss_grad(d, U, b, points, signs)
    return loss, gh, gU, gb


# -- estimator ---------------------------------------------------------------


def validate_pv_params(p):
    if p["mode"] not in (PV_DM, PV_DBOW):
        raise ParameterError(f"mode must be {PV_DM!r} or {PV_DBOW!r}, got {p['mode']!r}")
    if p["combine"] not in (AVERAGE, CONCATENATE):
        raise ParameterError(f"combine must be {AVERAGE!r} or {CONCATENATE!r}")
    for name in ("para_dim", "word_dim", "window", "epochs", "min_count", "infer_epochs"):
        if int(p[name]) != p[name] or p[name] < 1:
            raise ParameterError(f"{name} must be a positive integer, got {p[name]}")
    if p["mode"] == PV_DM and p["combine"] == AVERAGE and p["para_dim"] != p["word_dim"]:
        raise ParameterError("averaging requires para_dim == word_dim")
    if not p["learning_rate"] > 0 or not 0 <= p["min_learning_rate"] <= p["learning_rate"]:
        raise ParameterError("learning rates must satisfy 0 <= min_learning_rate <= learning_rate, "
                             "learning_rate > 0")


class ParagraphVector(TransformerMixin, BaseEstimator):
    """Paragraph Vector document embeddings.

    ``fit`` takes a sequence of token sequences and learns one paragraph
    vector per document; ``transform`` infers vectors for new documents with
    the word vectors and softmax weights frozen.

    Training is sequential SGD, deterministic for a given ``seed``. The
    learning rate decays linearly from ``learning_rate`` to
    ``min_learning_rate`` over all training examples.
    """

    def __init__(self, para_dim=50, word_dim=50, window=4, mode=PV_DM, combine=AVERAGE,
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

    def fit(self, X, y=None, doc_ids: Sequence[str] | None = None):
        params = self.get_params()
        validate_pv_params(params)
        docs = [tuple(getattr(d, "tokens", d)) for d in X]
        counts = Counter(t for d in docs for t in d)
        vocab = {w: c for w, c in counts.items() if c >= self.min_count}
        if len(vocab) < 2:
            raise EmptyVocabularyError(
                f"embedding vocabulary has {len(vocab)} word(s) with count >= {self.min_count}")
        tree = build_huffman(vocab)
        index = {w: i for i, w in enumerate(tree.words)}
        encoded = [np.asarray([index[t] for t in d if t in index], dtype=np.intp) for d in docs]
        trained = np.asarray([len(e) > 0 for e in encoded])
        self.n_skipped_ = int((~trained).sum())
        if self.n_skipped_:
            logger.warning("%d document(s) have no in-vocabulary tokens and were skipped",
                           self.n_skipped_)

        rng = np.random.default_rng(self.seed)
        p, q, V = self.para_dim, self.word_dim, len(tree.words)
        D = (rng.random((len(docs), p)) - 0.5) / p
        W = (rng.random((V + 1, q)) - 0.5) / q
        W[V] = 0.0
        h_dim = self._h_dim()
        U = np.zeros((V - 1, h_dim))
        b = np.zeros(V - 1)
        signs = [tree.signs(i) for i in range(V)]
        points = [np.asarray(pt, dtype=np.intp) for pt in tree.points]

        contexts = [self._contexts(e, V) for e in encoded]
        total = self.epochs * sum(len(e) for e in encoded)
        step = 0
        history = []
        for _ in range(self.epochs):
            loss_sum, n_ex = 0.0, 0
            for di in rng.permutation(len(docs)):
                ids = encoded[di]
                lrs = self._lr(np.arange(step, step + len(ids)), total)
                step += len(ids)
                loss_sum += self._train_document(D[di], W, U, b, ids, contexts[di], points,
                                                 signs, lrs, rng, V, learn_words=True)
                n_ex += len(ids)
            history.append(loss_sum / max(n_ex, 1))

        self.model_ = PvModel(params, list(doc_ids) if doc_ids is not None
                              else [str(i) for i in range(len(docs))],
                              D, W, U, b, tree, trained, history)
        return self

    def _h_dim(self):
        if self.mode == PV_DBOW or self.combine == AVERAGE:
            return self.para_dim
        return self.para_dim + 2 * self.window * self.word_dim

    def _lr(self, step, total):
        frac = step / total if total else 0.0
        return self.learning_rate - (self.learning_rate - self.min_learning_rate) * frac

    def _contexts(self, ids, V):
        if self.mode == PV_DBOW:
            return None
        null = V if self.combine == CONCATENATE else None
        return [np.asarray(context_indices(ids, t, self.window, null), dtype=np.intp)
                for t in range(len(ids))]

    def _train_document(self, d, W, U, b, ids, contexts, points, signs, lrs, rng, V,
                        learn_words):
        """One pass of SGD over a document; ``d`` is updated in place.

        Same updates as :func:`dm_example` / :func:`dbow_example`, inlined
        because this loop dominates training time.
        """
        n = len(ids)
        if self.mode == PV_DBOW:
            lo = np.maximum(0, np.arange(n) - self.window)
            hi = np.minimum(n, np.arange(n) + self.window + 1)
            targets = ids[lo + rng.integers(0, hi - lo)]
        else:
            targets = ids
        concat = self.mode == PV_DM and self.combine == CONCATENATE
        p = d.shape[0]
        loss = 0.0
        for t in range(n):
            target = targets[t]
            pts, sg, lr = points[target], signs[target], lrs[t]
            if self.mode == PV_DBOW:
                h = d
            else:
                ctx = contexts[t]
                if concat:
                    h = np.concatenate([d, W[ctx].ravel()])
                else:
                    k = 1 + len(ctx)
                    h = (d + W[ctx].sum(axis=0)) / k
            Up = U[pts]
            z = sg * (Up @ h + b[pts])
            loss += float(np.logaddexp(0.0, -z).sum())
            g = -sg * np.exp(-np.logaddexp(0.0, z))
            gh = g @ Up
            if self.mode == PV_DBOW:
                gd = gh
            elif concat:
                gd = gh[:p]
                if learn_words:
                    np.subtract.at(W, ctx, lr * gh[p:].reshape(len(ctx), -1))
                    W[V] = 0.0
            else:
                gd = gh / k
                if learn_words and len(ctx):
                    np.subtract.at(W, ctx, lr * gd)
            if learn_words:
                U[pts] -= lr * np.outer(g, h)
                b[pts] -= lr * g
            d -= lr * gd
        return loss

    def infer_vector(self, tokens, epochs=None, seed=None) -> np.ndarray:
        """Fit a fresh paragraph vector with every other parameter frozen."""
        check_is_fitted(self, "model_")
        return infer_vector(self.model_, tokens, epochs if epochs is not None else self.infer_epochs,
                            self.seed if seed is None else seed)

    def transform(self, X):
        check_is_fitted(self, "model_")
        return np.vstack([self.infer_vector(getattr(d, "tokens", d)) for d in X])

    @property
    def dv_(self):
        check_is_fitted(self, "model_")
        return self.model_.D


def infer_vector(model: PvModel, tokens, epochs: int, seed: int) -> np.ndarray:
    est = ParagraphVector(**model.params)
    index = model.word_index
    ids = np.asarray([index[t] for t in getattr(tokens, "tokens", tokens) if t in index],
                     dtype=np.intp)
    if len(ids) == 0:
        raise InferenceError("document has no in-vocabulary tokens")
    if int(epochs) != epochs or epochs < 1:
        raise ParameterError(f"infer epochs must be a positive integer, got {epochs}")
    rng = np.random.default_rng(seed)
    p = model.D.shape[1]
    D = (rng.random((1, p)) - 0.5) / p
    tree = model.tree
    V = len(tree.words)
    signs = [tree.signs(i) for i in range(V)]
    points = [np.asarray(pt, dtype=np.intp) for pt in tree.points]
    contexts = est._contexts(ids, V)
    total = epochs * len(ids)
    for epoch in range(epochs):
        lrs = est._lr(np.arange(epoch * len(ids), (epoch + 1) * len(ids)), total)
        est._train_document(D[0], model.W, model.U, model.b, ids, contexts, points, signs, lrs,
                            rng, V, learn_words=False)
    return D[0]


def train_pv(docs, doc_ids=None, **params) -> PvModel:
    return ParagraphVector(**params).fit(docs, doc_ids=doc_ids).model_

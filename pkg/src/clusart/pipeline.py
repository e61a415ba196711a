"""End-to-end topic detection: preprocessing, TF-IDF, Fuzzy ART, Paragraph Vector."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import TEST, TRAIN, Corpus
from .evaluation import EvalReport, KNNTopicClassifier, map_clusters_majority, prf
from .fuzzyart import FuzzyART
from .pvec import ParagraphVectorClassifier
from .textprep import TextPreprocessor
from .vectorizer import TopNTfidfVectorizer


class ClusART(ClusterMixin, BaseEstimator):
    """Unsupervised topic detector.

    ``fit`` clusters the training texts with Fuzzy ART over TF-IDF vectors
    of the ``n_features`` most frequent stems, then trains a Paragraph Vector
    model on the same texts. ``predict`` assigns each new text to the Fuzzy
    ART category whose paragraph-vector centroid is closest in cosine.

    Parameters prefixed with ``pv_`` configure the Paragraph Vector stage;
    ``seed`` drives every random choice.
    """

    def __init__(self, stoplist=None, n_features=1000, alpha=0.2, beta=0.4, rho=0.8,
                 fast_commit=True, max_epochs=50, input_mode="complement_coding",
                 pv_para_dim=50, pv_word_dim=50, pv_window=4, pv_mode="pv_dm",
                 pv_combine="average", pv_epochs=20, pv_learning_rate=0.025,
                 pv_min_learning_rate=1e-4, pv_min_count=2, pv_infer_epochs=20, seed=0):
        self.stoplist = stoplist
        self.n_features = n_features
        self.alpha = alpha
        self.beta = beta
        self.rho = rho
        self.fast_commit = fast_commit
        self.max_epochs = max_epochs
        self.input_mode = input_mode
        self.pv_para_dim = pv_para_dim
        self.pv_word_dim = pv_word_dim
        self.pv_window = pv_window
        self.pv_mode = pv_mode
        self.pv_combine = pv_combine
        self.pv_epochs = pv_epochs
        self.pv_learning_rate = pv_learning_rate
        self.pv_min_learning_rate = pv_min_learning_rate
        self.pv_min_count = pv_min_count
        self.pv_infer_epochs = pv_infer_epochs
        self.seed = seed

    def _pv_params(self):
        return {k[3:]: v for k, v in self.get_params().items() if k.startswith("pv_")} | {
            "seed": self.seed}

    def fit(self, X, y=None, doc_ids: Sequence[str] | None = None):
        X = list(X)
        self.doc_ids_ = list(doc_ids) if doc_ids is not None else [str(i) for i in range(len(X))]
        self.preprocessor_ = TextPreprocessor(self.stoplist).fit()
        tokens = self.preprocessor_.transform(X)
        self.vectorizer_ = TopNTfidfVectorizer(self.n_features)
        vectors = self.vectorizer_.fit_transform(tokens)
        self.art_ = FuzzyART(self.alpha, self.beta, self.rho, self.fast_commit,
                             self.max_epochs, self.input_mode).fit(vectors, doc_ids=self.doc_ids_)
        self.labels_ = self.art_.labels_
        self.classifier_ = ParagraphVectorClassifier(**self._pv_params()).fit(
            tokens, self.labels_, doc_ids=self.doc_ids_)
        return self

    def rank(self, X, doc_ids=None):
        check_is_fitted(self, "classifier_")
        return self.classifier_.rank(self.preprocessor_.transform(list(X)), doc_ids=doc_ids)

    def predict(self, X):
        return np.asarray([p.category for p in self.rank(X)], dtype=np.intp)


@dataclass
class ExperimentResult:
    clusart: EvalReport
    knn: EvalReport
    n_categories: int
    cluster_labels: dict[int, str]
    train_report: EvalReport
    model: ClusART


def run_experiment(corpus: Corpus, knn_neighbors: int = 5, **params) -> ExperimentResult:
    """Fit ClusART on the train split and score both it and the kNN baseline on test.

    Fuzzy ART categories are named by majority vote of their training
    members' gold labels; test predictions are scored through that map.
    """
    train, test = corpus.subset(TRAIN), corpus.subset(TEST)
    model = ClusART(**params).fit([d.text for d in train],
                                  doc_ids=[d.id for d in train])
    gold_train = {d.id: d.gold_label for d in train}
    label_map = map_clusters_majority(dict(zip(model.doc_ids_, model.labels_.tolist())),
                                      gold_train)
    train_report = prf([label_map[c] for c in model.labels_], [d.gold_label for d in train])
    predicted = [label_map.get(c, "") for c in model.predict([d.text for d in test])]
    gold = [d.gold_label for d in test]
    clusart_report = prf(predicted, gold)

    test_vectors = model.vectorizer_.transform(model.preprocessor_.transform([d.text for d in test]))
    train_vectors = model.vectorizer_.transform(
        model.preprocessor_.transform([d.text for d in train]))
    knn = KNNTopicClassifier(knn_neighbors).fit(train_vectors, [d.gold_label for d in train])
    knn_report = prf(knn.predict(test_vectors).tolist(), gold)
    return ExperimentResult(clusart_report, knn_report, model.art_.n_categories_,
                            label_map.mapping, train_report, model)

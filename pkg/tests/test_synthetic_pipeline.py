import numpy as np
import pytest
from sklearn.base import clone

from clusart.pipeline import ClusART
from clusart.synthetic import SHARED_WORDS, TOPIC_WORDS, generate_topic_corpus
from clusart.textprep import TextPreprocessor
from clusart.vectorizer import TopNTfidfVectorizer


def test_generator_shape_and_order(synthetic_corpus):
    assert len(synthetic_corpus) == 200
    assert synthetic_corpus.labels == set(TOPIC_WORDS)
    ids = [d.id for d in synthetic_corpus]
    assert ids == sorted(ids, key=str.encode)


def test_generator_deterministic():
    assert generate_topic_corpus(docs_per_topic=5, seed=3) == generate_topic_corpus(
        docs_per_topic=5, seed=3)
    assert generate_topic_corpus(docs_per_topic=5, seed=3) != generate_topic_corpus(
        docs_per_topic=5, seed=4)


@pytest.mark.parametrize("kw", [dict(jitter=6), dict(jitter=-1), dict(shared_uses=2)])
def test_generator_arguments(kw):
    with pytest.raises(ValueError):
        generate_topic_corpus(**kw)


def test_shared_words_do_not_reach_vectors(synthetic_corpus):
    tokens = TextPreprocessor().transform([d.text for d in synthetic_corpus])
    vec = TopNTfidfVectorizer().fit(tokens)
    X = vec.transform(tokens)
    shared = TextPreprocessor().transform([" ".join(SHARED_WORDS)])[0]
    cols = [i for i, t in enumerate(vec.get_feature_names_out()) if t in shared]
    assert len(cols) == len(SHARED_WORDS)
    assert not X[:, cols].any()


def test_experiment_result(synthetic_experiment):
    result, _ = synthetic_experiment
    assert result.n_categories == 4
    assert sorted(result.cluster_labels.values()) == sorted(TOPIC_WORDS)
    assert result.train_report.macro["f_measure"] == 1.0


def test_estimator_small_run():
    corpus = generate_topic_corpus(docs_per_topic=6, seed=1)
    texts = [d.text for d in corpus]
    model = ClusART(pv_epochs=3, pv_infer_epochs=3, pv_para_dim=10, pv_word_dim=10).fit(texts)
    assert model.labels_.shape == (24,)
    pred = model.predict(texts[:4] + ["nothing here is known"])
    assert pred.shape == (5,) and np.isin(pred, model.labels_).all()
    assert clone(model).get_params() == model.get_params()

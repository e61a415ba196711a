import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusart.exceptions import (DegenerateVocabularyError, EmptyVocabularyError, InferenceError,
                                ParameterError)
from clusart.pvec import (ClusterSummary, ParagraphVector, ParagraphVectorClassifier, PvModel,
                          TopicPrediction, build_huffman, classify, cosine, infer_vector,
                          load_topics, save_topics)
from clusart.pvec.classifier import rank_categories
from clusart.pvec.model import (context_indices, dbow_example, dm_example, hs_word_probabilities,
                                softmax_word_probabilities)
from oracles import (central_difference, is_prefix_free, optimal_prefix_code_cost,
                     path_probability, relative_error)


class TestHuffman:
    def test_two_words(self):
        t = build_huffman({"x": 3, "y": 7})
        assert t.code_lengths().tolist() == [1, 1]
        assert set(t.codes) == {(0,), (1,)}

    def test_frequent_word_gets_shorter_code(self):
        t = build_huffman({"a": 4, "b": 1, "c": 1})
        lengths = dict(zip(t.words, t.code_lengths()))
        assert lengths == {"a": 1, "b": 2, "c": 2}

    @pytest.mark.parametrize("freqs", [{}, {"only": 5}])
    def test_degenerate(self, freqs):
        with pytest.raises(DegenerateVocabularyError):
            build_huffman(freqs)

    def test_ties_resolved_by_term(self):
        a = build_huffman({"b": 2, "a": 2, "c": 2, "d": 2})
        b = build_huffman({"d": 2, "c": 2, "a": 2, "b": 2})
        assert a == b and a.words == ("a", "b", "c", "d")

    def test_points_are_inner_nodes_from_root(self):
        t = build_huffman({"a": 5, "b": 3, "c": 2, "d": 1})
        for code, pts in zip(t.codes, t.points):
            assert len(code) == len(pts) and pts[0] == t.n_inner - 1
            assert all(0 <= p < t.n_inner for p in pts)

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.integers(1, 40), min_size=2, max_size=8))
    def test_optimal_and_prefix_free(self, counts):
        freqs = {f"w{i}": c for i, c in enumerate(counts)}
        t = build_huffman(freqs)
        assert is_prefix_free(t.codes)
        cost = sum(c * len(code) for c, code in zip(t.counts, t.codes))
        assert cost == optimal_prefix_code_cost(counts)
        # a more frequent word never has a strictly longer code
        for ci, li in zip(t.counts, t.code_lengths()):
            for cj, lj in zip(t.counts, t.code_lengths()):
                if ci > cj:
                    assert li <= lj

    def test_dict_round_trip(self):
        t = build_huffman({"a": 5, "b": 3, "c": 2})
        assert type(t).from_dict(t.to_dict()) == t


def _mini(seed=0, p=4, q=4, n_words=3, h_dim=None):
    rng = np.random.default_rng(seed)
    tree = build_huffman({f"w{i}": n_words + 1 - i for i in range(n_words)})
    h_dim = h_dim or p
    W = rng.normal(size=(n_words + 1, q))
    W[n_words] = 0.0
    return (rng.normal(size=p), W, rng.normal(size=(n_words - 1, h_dim)),
            rng.normal(size=n_words - 1), tree)


def _nll(h, U, b, tree, target):
    return -math.log(path_probability(h, U, b, tree.codes[target], tree.points[target]))


class TestGradients:
    """Analytic gradients against central differences of an independent loss."""

    @pytest.mark.parametrize("target", [0, 1, 2])
    def test_dm_average(self, target):
        d, W, U, b, tree = _mini(target)
        ctx = [1, 2, 0, 2]
        pts, sg = list(tree.points[target]), tree.signs(target)

        def loss():
            h = (d + W[ctx].sum(axis=0)) / (1 + len(ctx))
            return _nll(h, U, b, tree, target)

        val, gd, gctx, gU, gb = dm_example(d, W, U, b, ctx, pts, sg, "average")
        assert val == pytest.approx(loss(), rel=1e-12)
        gW = np.zeros_like(W)
        np.add.at(gW, ctx, gctx)
        gU_full = np.zeros_like(U)
        gU_full[pts] = gU
        gb_full = np.zeros_like(b)
        gb_full[pts] = gb
        for analytic, x in [(gd, d), (gW, W), (gU_full, U), (gb_full, b)]:
            assert relative_error(analytic, central_difference(loss, x)) < 1e-4

    @pytest.mark.parametrize("target", [0, 2])
    def test_dm_concatenate(self, target):
        window = 1
        d, W, U, b, tree = _mini(10 + target, h_dim=4 + 2 * window * 4)
        ctx = [3, 1]  # row 3 is the padding row
        pts, sg = list(tree.points[target]), tree.signs(target)

        def loss():
            return _nll(np.concatenate([d, W[ctx].ravel()]), U, b, tree, target)

        val, gd, gctx, gU, gb = dm_example(d, W, U, b, ctx, pts, sg, "concatenate")
        assert val == pytest.approx(loss(), rel=1e-12)
        gW = np.zeros_like(W)
        np.add.at(gW, ctx, gctx)
        gU_full = np.zeros_like(U)
        gU_full[pts] = gU
        gb_full = np.zeros_like(b)
        gb_full[pts] = gb
        for analytic, x in [(gd, d), (gW, W), (gU_full, U), (gb_full, b)]:
            assert relative_error(analytic, central_difference(loss, x)) < 1e-4

    @pytest.mark.parametrize("target", [0, 1, 2])
    def test_dbow(self, target):
        d, _, U, b, tree = _mini(20 + target)
        pts, sg = list(tree.points[target]), tree.signs(target)

        def loss():
            return _nll(d, U, b, tree, target)

        val, gd, gU, gb = dbow_example(d, U, b, pts, sg)
        assert val == pytest.approx(loss(), rel=1e-12)
        gU_full = np.zeros_like(U)
        gU_full[pts] = gU
        gb_full = np.zeros_like(b)
        gb_full[pts] = gb
        for analytic, x in [(gd, d), (gU_full, U), (gb_full, b)]:
            assert relative_error(analytic, central_difference(loss, x)) < 1e-4


class TestSoftmax:
    @pytest.mark.parametrize("seed", range(5))
    def test_hierarchical_sums_to_one(self, seed):
        rng = np.random.default_rng(seed)
        tree = build_huffman({f"w{i:02d}": int(c) for i, c in enumerate(rng.integers(1, 50, 16))})
        h, U, b = rng.normal(size=6), rng.normal(size=(15, 6)) * 2, rng.normal(size=15)
        probs = hs_word_probabilities(h, U, b, tree)
        assert abs(probs.sum() - 1.0) <= 1e-9
        oracle = [path_probability(h, U, b, c, p) for c, p in zip(tree.codes, tree.points)]
        np.testing.assert_allclose(probs, oracle, rtol=1e-12)

    def test_plain_softmax_backend(self):
        rng = np.random.default_rng(0)
        p = softmax_word_probabilities(rng.normal(size=4), rng.normal(size=(16, 4)),
                                       rng.normal(size=16))
        assert abs(p.sum() - 1.0) <= 1e-12 and (p > 0).all()


def _reference_pass(est, d, W, U, b, ids, tree, lrs):
    """Per-example SGD with the reference forward/backward functions."""
    V = len(tree.words)
    null = V if est.combine == "concatenate" else None
    for t, target in enumerate(ids):
        pts, sg = list(tree.points[target]), tree.signs(target)
        ctx = context_indices(ids, t, est.window, null)
        _, gd, gctx, gU, gb = dm_example(d, W, U, b, ctx, pts, sg, est.combine)
        h = (np.concatenate([d, W[ctx].ravel()]) if est.combine == "concatenate"
             else (d + W[ctx].sum(axis=0)) / (1 + len(ctx)))
        np.testing.assert_allclose(np.outer(gb, h), gU)
        np.subtract.at(W, ctx, lrs[t] * gctx)
        W[V] = 0.0
        U[pts] -= lrs[t] * gU
        b[pts] -= lrs[t] * gb
        d -= lrs[t] * gd


class TestTrainingLoop:
    @pytest.mark.parametrize("combine", ["average", "concatenate"])
    def test_inlined_pass_matches_reference(self, combine):
        est = ParagraphVector(para_dim=4, word_dim=4, window=2, combine=combine)
        tree = build_huffman({"a": 5, "b": 4, "c": 2, "d": 1})
        V = len(tree.words)
        rng = np.random.default_rng(0)
        d = rng.normal(size=4)
        W = rng.normal(size=(V + 1, 4))
        W[V] = 0.0
        U = rng.normal(size=(V - 1, est._h_dim()))
        b = rng.normal(size=V - 1)
        ids = np.array([0, 1, 2, 0, 3, 1, 0], dtype=np.intp)
        lrs = np.linspace(0.1, 0.05, len(ids))
        ref = [x.copy() for x in (d, W, U, b)]
        _reference_pass(est, *ref, ids, tree, lrs)
        est._train_document(d, W, U, b, ids, est._contexts(ids, V),
                            [np.asarray(p, dtype=np.intp) for p in tree.points],
                            [tree.signs(i) for i in range(V)], lrs, rng, V, learn_words=True)
        for got, want in zip((d, W, U, b), ref):
            np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("mode", ["pv_dm", "pv_dbow"])
    def test_separation(self, mode):
        docs = [["a", "b"] * 20, ["c", "d"] * 20, ["a", "b"] * 20]
        D = ParagraphVector(para_dim=8, word_dim=8, epochs=50, mode=mode).fit(docs).dv_
        assert cosine(D[0], D[1]) < cosine(D[0], D[2])

    @pytest.mark.parametrize("mode,combine", [("pv_dm", "average"), ("pv_dm", "concatenate"),
                                              ("pv_dbow", "average")])
    def test_deterministic(self, mode, combine):
        docs = [["a", "b", "c", "a"], ["b", "c", "d", "d"], ["a", "d", "c"]]
        kw = dict(para_dim=5, word_dim=5, epochs=5, mode=mode, combine=combine, seed=3)
        m1 = ParagraphVector(**kw).fit(docs).model_
        m2 = ParagraphVector(**kw).fit(docs).model_
        for x, y in [(m1.D, m2.D), (m1.W, m2.W), (m1.U, m2.U), (m1.b, m2.b)]:
            assert x.tobytes() == y.tobytes()
        assert np.isfinite(m1.D).all() and np.isfinite(m1.U).all()

    @pytest.mark.parametrize("kw", [dict(epochs=0), dict(window=0), dict(para_dim=4, word_dim=5),
                                    dict(mode="skipgram"), dict(combine="sum"),
                                    dict(learning_rate=0), dict(min_learning_rate=1.0)])
    def test_parameter_errors(self, kw):
        with pytest.raises(ParameterError):
            ParagraphVector(**kw).fit([["a", "b", "a", "b"]])

    def test_unequal_dims_allowed_when_concatenating(self):
        m = ParagraphVector(para_dim=3, word_dim=5, window=1, combine="concatenate",
                            epochs=1).fit([["a", "b", "a", "b"]]).model_
        assert m.D.shape == (1, 3) and m.U.shape == (1, 3 + 2 * 5)

    def test_empty_vocabulary(self):
        with pytest.raises(EmptyVocabularyError):
            ParagraphVector().fit([["a", "b"], ["c"]])

    def test_skipped_documents(self, caplog):
        est = ParagraphVector(para_dim=4, word_dim=4, epochs=2).fit(
            [["a", "b", "a", "b"], ["zzz"], []])
        assert est.n_skipped_ == 2
        assert est.model_.trained.tolist() == [True, False, False]
        assert "2 document(s)" in caplog.text

    def test_parameter_count(self):
        docs = [["a", "b", "c", "a"], ["b", "c", "a"]]
        m = ParagraphVector(para_dim=6, word_dim=6, epochs=1).fit(docs).model_
        n_docs, n_words = 2, 3
        assert m.n_parameters() == n_docs * 6 + n_words * 6 + (n_words - 1) * (6 + 1)

    def test_save_load(self, tmp_path):
        m = ParagraphVector(para_dim=4, word_dim=4, epochs=3).fit(
            [["a", "b", "c", "a"], ["b", "c", "c"]], doc_ids=["x", "y"]).model_
        m.save(tmp_path / "pv.json")
        got = PvModel.load(tmp_path / "pv.json")
        assert got.doc_ids == ["x", "y"] and got.tree == m.tree
        for x, y in [(got.D, m.D), (got.W, m.W), (got.U, m.U), (got.b, m.b)]:
            assert x.tobytes() == y.tobytes()
        assert got.loss_history == m.loss_history


@pytest.fixture(scope="module")
def trained_embedding(synthetic_experiment):
    result, _ = synthetic_experiment
    return result.model


class TestOnSyntheticFixture:
    def test_loss_non_increasing_over_last_epochs(self, trained_embedding):
        history = trained_embedding.classifier_.embedding_.model_.loss_history
        assert len(history) == 20
        last = history[-3:]
        assert last[0] >= last[1] >= last[2]

    def test_inference_recovers_training_vectors(self, trained_embedding):
        # read as a mean over documents; see the notes on per-document spread
        model = trained_embedding.classifier_.embedding_.model_
        tokens = trained_embedding.preprocessor_.transform(_train_texts(trained_embedding))
        sims = [cosine(infer_vector(model, tokens[i], 20, 0), model.D[i])
                for i in range(0, len(tokens), 4)]
        assert np.mean(sims) >= 0.9

    def test_ranks_source_topic_first(self, synthetic_split):
        from clusart.corpus import TEST, TRAIN
        from clusart.textprep import TextPreprocessor

        prep = TextPreprocessor().fit()
        topics = ("astronomy", "hockey")
        train = [d for d in synthetic_split.subset(TRAIN) if d.gold_label in topics][::4]
        test = [d for d in synthetic_split.subset(TEST) if d.gold_label in topics]
        y = [topics.index(d.gold_label) for d in train]
        assert sorted(set(y)) == [0, 1]
        clf = ParagraphVectorClassifier(seed=0).fit(prep.transform([d.text for d in train]), y)
        pred = clf.predict(prep.transform([d.text for d in test]))
        assert pred.tolist() == [topics.index(d.gold_label) for d in test]


def _train_texts(model):
    from clusart.corpus import TRAIN, split_corpus
    from clusart.synthetic import generate_topic_corpus

    by_id = {d.id: d.text for d in split_corpus(generate_topic_corpus()).subset(TRAIN)}
    return [by_id[i] for i in model.doc_ids_]


@pytest.fixture(scope="module")
def small():
    docs = [["a", "b", "c", "d"] * 5, ["c", "d", "e", "f"] * 5, ["a", "e", "f", "b"] * 5]
    return ParagraphVector(para_dim=6, word_dim=6, epochs=10).fit(docs)


class TestInference:
    def test_same_seed_same_vector(self, small):
        v1 = small.infer_vector(["a", "b", "c"], seed=7)
        v2 = small.infer_vector(["a", "b", "c"], seed=7)
        assert v1.tobytes() == v2.tobytes() and v1.shape == (6,)

    def test_frozen_parameters(self, small):
        m = small.model_
        before = [x.copy() for x in (m.D, m.W, m.U, m.b)]
        small.infer_vector(["a", "f", "unknown"])
        for x, y in zip((m.D, m.W, m.U, m.b), before):
            np.testing.assert_array_equal(x, y)

    def test_out_of_vocabulary(self, small):
        with pytest.raises(InferenceError):
            small.infer_vector(["zz", "qq"])

    def test_transform_shape(self, small):
        assert small.transform([["a", "b"], ["e", "f", "f"]]).shape == (2, 6)


class TestClassify:
    def test_centroid_ranked_first(self):
        s = [ClusterSummary(0, np.array([1.0, 0.0]), 2), ClusterSummary(1, np.array([0.3, 0.9]), 1)]
        ranking = rank_categories(np.array([0.3, 0.9]), s)
        assert ranking[0][0] == 1 and ranking[0][1] == pytest.approx(1.0)

    def test_orthogonal_centroids(self):
        s = [ClusterSummary(0, np.array([0.0, 0.0, 2.0]), 1),
             ClusterSummary(1, np.array([0.0, 3.0, 0.0]), 1),
             ClusterSummary(2, np.array([1.0, 1.0, 0.0]), 1)]
        ranking = dict(rank_categories(np.array([1.0, -1.0, 0.0]), s))
        assert ranking[0] == 0.0 and ranking[2] == 0.0

    def test_ties_by_category_index(self):
        s = [ClusterSummary(3, np.array([1.0, 0.0]), 1), ClusterSummary(1, np.array([2.0, 0.0]), 1)]
        assert [c for c, _ in rank_categories(np.array([1.0, 0.0]), s)] == [1, 3]

    def test_cosine_zero_vector(self):
        assert cosine([0, 0], [1, 2]) == 0.0

    def test_classify_needs_summaries(self):
        m = ParagraphVector(para_dim=2, word_dim=2, epochs=1).fit([["a", "b", "a", "b"]]).model_
        with pytest.raises(ParameterError):
            classify(m, [], ["a"])

    def test_fallback_to_largest_category(self):
        docs = [["a", "b", "a"], ["a", "b", "b"], ["c", "d", "c", "d"]]
        clf = ParagraphVectorClassifier(para_dim=4, word_dim=4, epochs=2).fit(docs, [1, 1, 0])
        preds = clf.rank([["zzz"], ["a", "b"]], doc_ids=["u", "v"])
        assert preds[0].fallback and preds[0].category == 1
        assert not preds[1].fallback and len(preds[1].ranking) == 2

    def test_topics_round_trip(self, tmp_path):
        preds = [TopicPrediction("d1", ((2, 0.75), (0, 0.1234567890123))),
                 TopicPrediction("d2", ((1, 0.0),), True)]
        save_topics(preds, tmp_path / "t.csv")
        text = (tmp_path / "t.csv").read_text()
        assert text.splitlines()[0] == ("doc_id,predicted_category,similarity,rank2_category,"
                                        "rank2_similarity,fallback")
        assert load_topics(tmp_path / "t.csv") == preds

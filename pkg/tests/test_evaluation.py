from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexigraph.evaluation import (
    BaselineConfig,
    TuneSpace,
    baseline_from_counts,
    corpus_baseline,
    count_tagged_corpus,
    exclude_seen,
    micro_f1,
    seed_curve,
    top_weights,
    tune,
    tune_baseline,
)
from lexigraph.lexicon import AttributeInventory, Lexicon, LexiconFormatError, WeightMatrix
from lexigraph.pipeline import PipelineConfig, load_inputs, seed_pipeline, tuning_pipeline
from lexigraph.synthetic import cluster_language

from oracles import confusion_counts

INV = AttributeInventory(("A:a", "B:b", "C:c"))


def sets_lexicon(sets):
    return Lexicon.from_sets(sets, INV)


class TestMicroF1:
    def test_exact_match(self):
        gold = sets_lexicon({"x": {"A:a"}, "y": {"B:b", "C:c"}})
        assert micro_f1(gold, gold).micro_f1 == 1.0

    def test_empty_prediction(self):
        gold = sets_lexicon({"x": {"A:a"}})
        report = micro_f1(Lexicon({}, INV), gold)
        assert report.micro_f1 == 0.0
        assert report.false_negatives == 1

    def test_partial_overlap(self):
        report = micro_f1(sets_lexicon({"w": {"A:a", "B:b"}}), sets_lexicon({"w": {"A:a", "C:c"}}))
        assert (report.true_positives, report.false_positives, report.false_negatives) == (1, 1, 1)
        assert report.micro_f1 == 0.5

    def test_nothing_to_score(self):
        assert micro_f1(Lexicon({}, INV), Lexicon({}, INV)).micro_f1 == 0.0

    def test_words_outside_gold_ignored(self):
        gold = sets_lexicon({"x": {"A:a"}})
        pred = sets_lexicon({"x": {"A:a"}, "extra": {"B:b"}})
        assert micro_f1(pred, gold).false_positives == 0

    def test_real_valued_prediction_thresholded(self):
        gold = sets_lexicon({"x": {"A:a"}})
        pred = Lexicon({"x": [0.01, 0.0, -0.3]}, INV)
        assert micro_f1(pred, gold).micro_f1 == 1.0

    def test_inventory_mismatch(self):
        other = Lexicon.from_sets({"x": {"Z:z"}})
        with pytest.raises(ValueError):
            micro_f1(other, sets_lexicon({"x": {"A:a"}}))

    def test_report_format_last_line(self):
        report = micro_f1(sets_lexicon({"w": {"A:a", "B:b"}}), sets_lexicon({"w": {"A:a", "C:c"}}))
        assert report.format().splitlines()[-1] == "micro-F1\t0.5000"

    @settings(max_examples=100)
    @given(st.integers(0, 2**32 - 1))
    def test_agrees_with_oracle(self, seed):
        rng = np.random.default_rng(seed)
        words = [f"w{i}" for i in range(int(rng.integers(0, 12)))]
        names = INV.attributes

        def random_sets():
            return {w: {a for a in names if rng.random() < 0.4} for w in words if rng.random() < 0.8}

        gold, pred = random_sets(), random_sets()
        tp, fp, fn = confusion_counts(pred, gold, names)
        report = micro_f1(sets_lexicon(pred), sets_lexicon(gold))
        assert (report.true_positives, report.false_positives, report.false_negatives) == (tp, fp, fn)


def test_exclude_seen_warns_and_drops():
    gold = sets_lexicon({"x": {"A:a"}, "y": {"B:b"}})
    seed = sets_lexicon({"x": {"A:a"}})
    with pytest.warns(UserWarning, match="1 test words"):
        out = exclude_seen(gold, seed, "test")
    assert out.words == ["y"]


class TestBaseline:
    def test_threshold_and_boundary(self):
        counts = Counter({("dog", "POS:Noun"): 3, ("dog", "POS:Verb"): 1, ("ran", "Tense:Past"): 2})
        two = baseline_from_counts(counts, BaselineConfig(2))
        assert two.attribute_set("dog") == {"POS:Noun"}
        assert two.attribute_set("ran") == {"Tense:Past"}
        three = baseline_from_counts(counts, BaselineConfig(3))
        assert "ran" not in three
        assert three.attribute_set("dog") == {"POS:Noun"}

    @pytest.mark.parametrize("k", [1, 21])
    def test_k_range(self, k):
        with pytest.raises(ValueError):
            BaselineConfig(k)

    def test_reads_corpus(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("dog\tPOS:Noun\ndog\tPOS:Noun Num:Sing\n\n# note\ncat\tPOS:Noun\n", encoding="utf-8")
        lex = corpus_baseline(path, BaselineConfig(2))
        assert lex.words == ["dog"]
        assert lex.attribute_set("dog") == {"POS:Noun"}

    def test_malformed_line_number(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("dog\tPOS:Noun\nbroken line\n", encoding="utf-8")
        with pytest.raises(LexiconFormatError) as err:
            count_tagged_corpus(path)
        assert err.value.lineno == 2

    @settings(max_examples=50)
    @given(st.dictionaries(st.tuples(st.sampled_from("abcde"), st.sampled_from(INV.attributes)), st.integers(1, 25)))
    def test_predictions_shrink_as_k_grows(self, raw):
        counts = Counter(raw)
        previous = None
        for k in range(2, 21):
            lex = baseline_from_counts(counts, BaselineConfig(k), INV)
            pairs = {(w, a) for w in lex for a in lex.attribute_set(w)}
            if previous is not None:
                assert pairs <= previous
            previous = pairs

    def test_tune_baseline_picks_best_k(self):
        counts = Counter({("a", "A:a"): 5, ("a", "B:b"): 3, ("b", "C:c"): 2})
        dev = sets_lexicon({"a": {"A:a"}, "b": set()})
        k, f1 = tune_baseline(counts, dev)
        assert k == 4 and f1 == 1.0


class TestTune:
    gold = sets_lexicon({"x": {"A:a"}, "y": {"B:b"}})

    def test_single_configuration(self):
        space = TuneSpace((("cluster",),), (True,))
        result = tune(space, self.gold, lambda s, p: self.gold)
        assert (result.feature_subset, result.projection, result.dev_f1) == (("cluster",), True, 1.0)

    def test_all_zero_ties_go_to_fewest_features_then_projection_off(self):
        space = TuneSpace((("cluster", "suffix"), ("suffix",)), (True, False))
        result = tune(space, self.gold, lambda s, p: Lexicon({}, INV))
        assert (result.feature_subset, result.projection) == (("suffix",), False)

    def test_winner_dominates_and_threads_agree(self):
        rng = np.random.default_rng(0)
        table = {}

        def pipeline(subset, proj):
            key = (subset, proj)
            if key not in table:
                table[key] = sets_lexicon({w: {a for a in INV.attributes if rng.random() < 0.5} for w in "xy"})
            return table[key]

        space = TuneSpace((("cluster",), ("suffix",), ("cluster", "prefix")))
        result = tune(space, self.gold, pipeline)
        assert all(result.dev_f1 >= f for _, _, f in result.scores)
        again = tune(space, self.gold, pipeline, threads=3)
        assert again.scores == result.scores

    def test_empty_space(self):
        with pytest.raises(ValueError):
            TuneSpace((), (True,))

    def test_empty_dev(self):
        with pytest.raises(ValueError):
            tune(TuneSpace((("cluster",),)), Lexicon({}, INV), lambda s, p: self.gold)

    def test_cluster_features_win_on_cluster_language(self, tmp_path):
        lang = cluster_language()
        paths = lang.write(tmp_path, seed_size=80, rng_seed=1)
        cfg = PipelineConfig(
            seed_lexicon=paths["seed_lexicon"],
            unlabeled_vocab=paths["unlabeled_vocab"],
            dev_lexicon=paths["test_lexicon"],
            clusters=paths["clusters"],
            rules=paths["rules"],
        )
        inputs = load_inputs(cfg)
        space = TuneSpace((("suffix",), ("cluster",), ("prefix",)), (False,))
        result = tune(space, inputs.dev, tuning_pipeline(cfg, inputs))
        assert result.feature_subset == ("cluster",)
        others = [f for s, _, f in result.scores if s != ("cluster",)]
        assert result.dev_f1 > max(others)


class TestTopWeights:
    inv = AttributeInventory(("T:past",))

    def test_single_feature(self):
        model = WeightMatrix([[0.7]], ("suffix:ed",), self.inv)
        assert top_weights(model, "T:past", 3) == ([("suffix:ed", 0.7)], [("suffix:ed", 0.7)])

    def test_zero_n(self):
        model = WeightMatrix([[0.7]], ("suffix:ed",), self.inv)
        assert top_weights(model, "T:past", 0) == ([], [])

    def test_truncation_and_order(self):
        model = WeightMatrix([[0.1, -2.0, 3.0, 0.1]], ("d", "c", "b", "a"), self.inv)
        hi, lo = top_weights(model, "T:past", 2)
        assert hi == [("b", 3.0), ("a", 0.1)]
        assert lo == [("c", -2.0), ("a", 0.1)]

    @given(st.permutations(range(5)))
    def test_feature_order_does_not_matter(self, perm):
        feats = ("f0", "f1", "f2", "f3", "f4")
        weights = [0.5, -1.0, 0.5, 2.0, 0.0]
        a = WeightMatrix([weights], feats, self.inv)
        b = WeightMatrix([[weights[i] for i in perm]], tuple(feats[i] for i in perm), self.inv)
        assert top_weights(a, "T:past", 3) == top_weights(b, "T:past", 3)

    def test_unknown_attribute(self):
        model = WeightMatrix([[0.7]], ("suffix:ed",), self.inv)
        with pytest.raises(Exception):
            top_weights(model, "Nope:x", 1)


class TestSeedCurve:
    gold = sets_lexicon({"x": {"A:a"}, "y": {"B:b"}, "z": {"C:c"}})

    def test_full_size_uses_the_whole_seed(self):
        seen = []
        curve = seed_curve(self.gold, [3], 0, lambda s: seen.append(s) or s, self.gold)
        assert seen[0] == self.gold
        assert curve == [(3, 1.0)]

    def test_deterministic(self):
        picks = []
        for _ in range(2):
            seed_curve(self.gold, [1, 2], 5, lambda s: picks.append(s.words) or s, self.gold)
        assert picks[:2] == picks[2:]
        assert [len(p) for p in picks[:2]] == [1, 2]

    def test_size_too_large(self):
        with pytest.raises(ValueError):
            seed_curve(self.gold, [4], 0, lambda s: s, self.gold)

    def test_with_real_pipeline(self, synthetic_files):
        cfg = PipelineConfig(
            seed_lexicon=synthetic_files["seed_lexicon"],
            unlabeled_vocab=synthetic_files["unlabeled_vocab"],
            test_lexicon=synthetic_files["test_lexicon"],
            rules=synthetic_files["rules"],
            features=("morphtrans",),
        )
        inputs = load_inputs(cfg)
        pipeline = seed_pipeline(cfg, inputs)
        curve = seed_curve(inputs.seed, [50, 200], 0, pipeline, inputs.test)
        assert [s for s, _ in curve] == [50, 200]
        assert curve[1][1] == micro_f1(pipeline(inputs.seed), inputs.test).micro_f1
        assert curve[1][1] > curve[0][1]

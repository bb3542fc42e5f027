import numpy as np
import pytest

from gmmdiar import metrics
from oracles import naive_edit_distance


class TestWer:
    def test_identical(self):
        r = metrics.wer("a b c".split(), "a b c".split())
        assert (r.rate, r.substitutions, r.insertions, r.deletions) == (0.0, 0, 0, 0)

    def test_empty_hypothesis(self):
        r = metrics.wer("a b c".split(), [])
        assert r.rate == 1.0
        assert (r.substitutions, r.insertions, r.deletions) == (0, 0, 3)

    def test_mixed_errors(self):
        r = metrics.wer("a b c".split(), "a x c d".split())
        assert r.rate == pytest.approx(2 / 3)
        assert (r.substitutions, r.insertions, r.deletions) == (1, 1, 0)

    def test_rate_above_one(self):
        r = metrics.wer(["a"], "b c d".split())
        assert r.rate == 3.0

    def test_empty_reference(self):
        with pytest.raises(ValueError):
            metrics.wer([], ["a"])

    def test_matches_edit_distance_oracle(self):
        rng = np.random.default_rng(0)
        vocab = [f"w{i}" for i in range(6)]
        for _ in range(200):
            ref = [vocab[i] for i in rng.integers(0, 6, rng.integers(1, 12))]
            hyp = [vocab[i] for i in rng.integers(0, 6, rng.integers(0, 12))]
            r = metrics.wer(ref, hyp)
            assert r.substitutions + r.insertions + r.deletions == \
                naive_edit_distance(ref, hyp)

    def test_token_renaming_invariance(self):
        ref = "a b a c".split()
        hyp = "a b c c".split()
        renamed = {"a": "x", "b": "y", "c": "z"}
        r1 = metrics.wer(ref, hyp)
        r2 = metrics.wer([renamed[t] for t in ref], [renamed[t] for t in hyp])
        assert r1 == r2

    def test_tokenize_case_folds(self):
        assert metrics.tokenize("Hello  World\n") == ["hello", "world"]


class TestDer:
    REF = [(0.0, 10.0, "S0"), (10.0, 20.0, "S1")]

    def test_identical(self):
        assert metrics.der(self.REF, self.REF).rate == 0.0

    def test_global_rename(self):
        hyp = [(s, e, "X" + lab) for s, e, lab in self.REF]
        assert metrics.der(self.REF, hyp).rate == 0.0

    def test_half_overlap(self):
        hyp = [(0.0, 20.0, "A")]
        r = metrics.der(self.REF, hyp, collar_s=0.0)
        assert r.rate == pytest.approx(0.5)
        assert r.confusion_s == pytest.approx(10.0)
        assert r.missed_s == 0.0
        assert r.false_alarm_s == 0.0

    def test_permutation_invariance(self):
        rng = np.random.default_rng(1)
        hyp = []
        t = 0.0
        for _ in range(8):
            dur = float(rng.uniform(0.5, 3.0))
            hyp.append((t, t + dur, f"H{rng.integers(0, 3)}"))
            t += dur + float(rng.uniform(0.0, 1.0))
        base = metrics.der(self.REF, hyp)
        for perm in ({"H0": "b", "H1": "c", "H2": "a"},
                     {"H0": "z", "H1": "x", "H2": "y"}):
            renamed = [(s, e, perm[lab]) for s, e, lab in hyp]
            r = metrics.der(self.REF, renamed)
            assert r.rate == base.rate
            assert r.confusion_s == base.confusion_s

    def test_components_sum_to_numerator(self):
        hyp = [(0.0, 12.0, "A"), (13.0, 22.0, "B")]
        r = metrics.der(self.REF, hyp, collar_s=0.1)
        total = r.missed_s + r.false_alarm_s + r.confusion_s
        assert r.rate == pytest.approx(total / r.scored_speech_s)

    def test_missed_and_false_alarm(self):
        ref = [(0.0, 10.0, "S0")]
        hyp = [(5.0, 15.0, "A")]
        r = metrics.der(ref, hyp, collar_s=0.0)
        assert r.missed_s == pytest.approx(5.0, abs=0.02)
        assert r.false_alarm_s == pytest.approx(5.0, abs=0.02)
        assert r.confusion_s == 0.0

    def test_collar_excludes_boundaries(self):
        # hypothesis boundary jitter inside the collar costs nothing
        hyp = [(0.0, 10.2, "A"), (10.2, 20.0, "B")]
        assert metrics.der(self.REF, hyp, collar_s=0.25).rate == 0.0

    def test_too_many_ref_speakers(self):
        ref = [(float(i), float(i) + 0.9, f"S{i}") for i in range(9)]
        with pytest.raises(ValueError):
            metrics.der(ref, ref)

    def test_empty_hypothesis_all_missed(self):
        r = metrics.der(self.REF, [], collar_s=0.0)
        assert r.rate == pytest.approx(1.0)
        assert r.missed_s == pytest.approx(20.0, abs=0.02)

    def test_bad_entry(self):
        with pytest.raises(ValueError):
            metrics.der([(1.0, 1.0, "S0")], [])

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import fblbounds as fb
from fblbounds import codesim as cs

import oracles


def t(*c):
    return fb.InputType(tuple(c))


class TestCodebook:
    def test_whole_class_n2(self):
        cb = fb.generate_codebook(2, t(1, 1), 50, seed=3)
        assert {tuple(wd) for wd in cb.words.tolist()} <= {(0, 1), (1, 0)}
        assert cb.M == 50 and cb.n == 2

    def test_uniform_over_class(self):
        cb = fb.generate_codebook(4, t(2, 2), 1000, seed=11)
        words, counts = np.unique(cb.words, axis=0, return_counts=True)
        assert len(words) == 6
        sigma = math.sqrt(1000 * (1 / 6) * (5 / 6))
        assert np.all(np.abs(counts - 1000 / 6) <= 4 * sigma)

    def test_deterministic(self):
        a = fb.generate_codebook(10, t(6, 4), 20, seed=5)
        b = fb.generate_codebook(10, t(6, 4), 20, seed=5)
        np.testing.assert_array_equal(a.words, b.words)

    def test_composition_checked(self):
        with pytest.raises(ValueError):
            fb.Codebook([[0, 0, 1]], t(1, 2))
        with pytest.raises(ValueError):
            fb.generate_codebook(3, t(2, 2), 4, seed=0)


class TestThresholdDecoder:
    w = fb.bsc(0.0)

    def test_unique_hit(self):
        cb = fb.Codebook([[0, 1], [1, 0]], t(1, 1))
        assert fb.threshold_decode(cb, [0, 1], 0.01, self.w) == 0
        assert fb.threshold_decode(cb, [1, 0], 0.01, self.w) == 1

    def test_no_hit(self):
        cb = fb.Codebook([[0, 1], [1, 0]], t(1, 1))
        assert fb.threshold_decode(cb, [0, 1], 5.0, self.w) is None

    def test_two_hits(self):
        cb = fb.Codebook([[0, 1], [0, 1]], t(1, 1))
        assert fb.threshold_decode(cb, [0, 1], 0.01, fb.bsc(0.1)) is None

    def test_exhaustive_against_oracle(self):
        # J at the joint type equals I of the empirical joint type here
        cb = fb.Codebook([[0, 1], [1, 0]], t(1, 1))
        w = self.w.matrix.tolist()
        for y in oracles.strings(2, 2):
            js = [oracles.functionals_from_table(oracles.joint_counts(x, y, 2, 2), w)[1]
                  for x in cb.words.tolist()]
            hits = [k for k, j in enumerate(js) if j >= 0.5 + 0.01]
            expect = hits[0] if len(hits) == 1 else None
            assert fb.threshold_decode(cb, list(y), 0.01, self.w) == expect


class TestMMIDecoder:
    def test_single_message(self):
        cb = fb.Codebook([[0, 1, 1]], t(1, 2))
        for y in oracles.strings(3, 2):
            assert fb.mmi_decode(cb, list(y)) == 0

    def test_identical_words(self):
        cb = fb.Codebook([[0, 1], [0, 1]], t(1, 1))
        assert fb.exact_error(cb, fb.bsc(0.1), fb.Decoder("mmi")) == 1.0

    def test_n1_degenerate(self):
        words = np.array([[0], [1]])
        assert fb.exact_error(words, fb.bsc(0.1), fb.Decoder("mmi")) == 1.0

    def test_noiseless_pair(self):
        words = np.array([[0, 1], [1, 0]])
        assert fb.exact_error(words, fb.bsc(0.0), fb.Decoder("threshold_J", 0.01)) == 0.0
        # Both words share one type, so every output gives both the same
        # empirical mutual information: a permanent MMI tie.
        assert fb.exact_error(words, fb.bsc(0.0), fb.Decoder("mmi")) == 1.0

    def test_constant_words_tie(self):
        # constant codewords carry zero empirical information about any y
        words = np.array([[0, 0], [1, 1]])
        assert fb.exact_error(words, fb.bsc(0.2), fb.Decoder("mmi")) == 1.0

    def test_against_oracle(self):
        words = [[0, 0, 1, 1], [0, 1, 0, 1], [1, 0, 0, 1]]
        w = fb.bsc(0.2)
        wl = w.matrix.tolist()

        def decide(y):
            mi = [oracles.functionals_from_table(oracles.joint_counts(x, y, 2, 2), wl)[2] for x in words]
            top = max(mi)
            best = [k for k, v in enumerate(mi) if v >= top - 1e-12]
            return best[0] if len(best) == 1 else None

        ys = cs.all_outputs(4, 2)
        dec = cs.decode_many(np.array(words), ys, w, fb.Decoder("mmi"))
        assert [None if d < 0 else int(d) for d in dec] == [decide(tuple(y)) for y in ys.tolist()]
        brute = oracles.brute_error(words, wl, decide)
        assert fb.exact_error(np.array(words), w, fb.Decoder("mmi")) == pytest.approx(brute, abs=1e-14)
        assert 0 < brute < 1


class TestExactAndMonteCarlo:
    def test_exact_ml_matches_oracle(self):
        rng = np.random.default_rng(2)
        w = fb.Channel([[0.8, 0.2], [0.3, 0.7]])
        for _ in range(10):
            words = rng.integers(2, size=(int(rng.integers(1, 5)), int(rng.integers(1, 6))))
            ours = fb.exact_error(words, w, cs.ml_decisions(words, w))
            ref = oracles.brute_error(words.tolist(), w.matrix.tolist(),
                                      oracles.ml_decider(words.tolist(), w.matrix.tolist()))
            assert ours == pytest.approx(ref, abs=1e-12)

    def test_noiseless_zero_errors(self):
        cb = fb.Codebook([[0, 1], [1, 0]], t(1, 1))
        r = fb.estimate_error(cb, fb.bsc(0.0), fb.Decoder("threshold_J", 0.01), 2000, seed=1)
        assert r.errors == 0 and r.estimate == 0.0

    @pytest.mark.parametrize("kind", ["threshold_J", "mmi"])
    def test_mc_within_wilson_of_exact(self, kind):
        w = fb.bsc(0.1)
        cb = fb.generate_codebook(6, t(3, 3), 4, seed=9)
        dec = fb.Decoder(kind, 0.05 if kind == "threshold_J" else None)
        exact = fb.exact_error(cb, w, dec)
        r = fb.estimate_error(cb, w, dec, 20_000, seed=4)
        lo, hi = fb.wilson_interval(r.errors, r.trials)
        assert lo <= exact <= hi
        assert r.wilson_upper_95 == hi

    def test_deterministic_and_worker_independent(self):
        w = fb.bsc(0.1)
        cb = fb.generate_codebook(8, t(4, 4), 4, seed=1)
        dec = fb.Decoder("threshold_J", 0.1)
        a = fb.estimate_error(cb, w, dec, 10_000, seed=7)
        b = fb.estimate_error(cb, w, dec, 10_000, seed=7)
        c = fb.estimate_error(cb, w, dec, 10_000, seed=7, workers=3)
        assert a == b == c

    def test_too_large(self):
        with pytest.raises(ValueError, match="too large"):
            cs.all_outputs(23, 2)

    def test_wilson(self):
        lo, hi = fb.wilson_interval(0, 100)
        assert lo == 0.0 and 0.03 < hi < 0.04
        lo, hi = fb.wilson_interval(50, 100)
        assert lo == pytest.approx(1 - hi)


class TestRandomCodingCheck:
    @pytest.mark.parametrize("variant", ["J", "I"])
    def test_no_violation(self, variant):
        rep = fb.check_random_coding(16, t(8, 8), 0.2, 0.15, fb.bsc(0.1), variant,
                                     attempts=4, trials=2000, seed=1)
        assert not rep.violation and rep.M == 8

    def test_vacuous(self):
        rep = fb.check_random_coding(8, t(4, 4), 1.0, 0.5, fb.bsc(0.1), "J",
                                     attempts=2, exact=True)
        assert rep.bound >= 1.0 and not rep.violation


class TestMetaConverse:
    def test_true_output_law(self):
        w = fb.bsc(0.1)
        words = np.array([[0, 1], [1, 1]])
        dec = cs.ml_decisions(words, w)
        q = cs.code_output_distribution(words, w)[None, :]
        rep = fb.check_meta_converse(words, dec, w, 0.2, q)
        assert rep.holds and rep.L == 1
        assert rep.slack == pytest.approx(rep.error - rep.rhs)

    def test_large_gamma_trivial(self):
        w = fb.bsc(0.1)
        words = np.array([[0, 1, 0], [1, 1, 0]])
        rep = fb.check_meta_converse(words, cs.ml_decisions(words, w), w, 10.0)
        assert rep.rhs <= 0 <= rep.error and rep.holds

    def test_type_class_family(self):
        w = fb.bsc(0.25)
        q = cs.type_class_q_family(3, 2)
        assert q.shape == (4, 8)
        np.testing.assert_allclose(q.sum(axis=1), 1.0)
        rng = np.random.default_rng(0)
        for _ in range(10):
            words = rng.integers(2, size=(int(rng.integers(2, 5)), 3))
            for g in (0.1, 0.3, 0.6):
                rep = fb.check_meta_converse(words, cs.ml_decisions(words, w), w, g)
                assert rep.holds and rep.L == 4
                assert np.all(rep.deltas[1:] <= 2.0 ** (-3 * g) + 1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.floats(0.02, 0.45), st.floats(0.01, 1.0), st.integers(0, 2**31))
def test_converse_rhs_below_error(n, m, eps, gamma, seed):
    w = fb.bsc(eps)
    words = np.random.default_rng(seed).integers(2, size=(m, n))
    dec = cs.ml_decisions(words, w)
    pe = fb.exact_error(words, w, dec)
    assert fb.code_converse_rhs(words, w, gamma) <= pe + 1e-12
    assert fb.check_meta_converse(words, dec, w, gamma).holds


def test_random_coding_non_vacuous_regime():
    # n = 40, M = 16: the J guarantee is about 0.11, well below 1
    rep = fb.check_random_coding(40, t(20, 20), 0.1, 0.27, fb.bsc(0.1), "J",
                                 attempts=8, trials=4000, seed=2)
    assert rep.bound < 0.2
    assert not rep.violation

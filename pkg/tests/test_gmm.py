import io

import numpy as np
import pytest

from gmmdiar import gmm
from oracles import naive_gmm_log_likelihood


def single_gaussian_1d():
    return gmm.GaussianMixture([1.0], [[0.0]], [[1.0]])


def random_model(rng, m, d):
    w = rng.random(m) + 0.1
    return gmm.GaussianMixture(w / w.sum(), rng.standard_normal((m, d)),
                               rng.random((m, d)) + 0.5)


class TestLogLikelihood:
    def test_standard_normal_at_zero(self):
        ll = gmm.log_likelihood(single_gaussian_1d(), [[0.0]])
        assert ll == pytest.approx(-0.5 * np.log(2 * np.pi))

    def test_duplicated_data_doubles(self):
        rng = np.random.default_rng(0)
        model = random_model(rng, 2, 3)
        X = rng.standard_normal((20, 3))
        ll = gmm.log_likelihood(model, X)
        assert gmm.log_likelihood(model, np.vstack([X, X])) == pytest.approx(
            2 * ll, rel=1e-12)

    def test_mixture_collapse_identity(self):
        two = gmm.GaussianMixture([0.5, 0.5], [[1.0], [1.0]], [[2.0], [2.0]])
        one = gmm.GaussianMixture([1.0], [[1.0]], [[2.0]])
        X = np.linspace(-3, 3, 11)[:, None]
        assert gmm.log_likelihood(two, X) == pytest.approx(
            gmm.log_likelihood(one, X), rel=1e-12)

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            m = int(rng.integers(1, 4))
            d = int(rng.integers(1, 5))
            n = int(rng.integers(1, 51))
            model = random_model(rng, m, d)
            X = rng.standard_normal((n, d))
            expected = naive_gmm_log_likelihood(model.weights, model.means,
                                                model.variances, X)
            assert gmm.log_likelihood(model, X) == pytest.approx(
                expected, rel=1e-9)

    def test_component_permutation_invariant(self):
        rng = np.random.default_rng(2)
        model = random_model(rng, 3, 2)
        perm = gmm.GaussianMixture(model.weights[[2, 0, 1]],
                                   model.means[[2, 0, 1]],
                                   model.variances[[2, 0, 1]])
        X = rng.standard_normal((30, 2))
        assert gmm.log_likelihood(model, X) == gmm.log_likelihood(perm, X)
        assert gmm.aic(model, X) == gmm.aic(perm, X)
        assert gmm.bic(model, X) == gmm.bic(perm, X)

    def test_dim_mismatch_and_empty(self):
        model = single_gaussian_1d()
        with pytest.raises(ValueError):
            gmm.log_likelihood(model, np.zeros((3, 2)))
        with pytest.raises(ValueError):
            gmm.log_likelihood(model, np.zeros((0, 1)))


class TestFitEm:
    def test_single_component_closed_form(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((100, 2)) * 2.0 + 5.0
        model, report = gmm.fit_em(X, 1, seed=0)
        np.testing.assert_allclose(model.means[0], X.mean(axis=0), atol=1e-10)
        np.testing.assert_allclose(model.variances[0], X.var(axis=0),
                                   atol=1e-10)
        assert model.weights[0] == 1.0

    def test_two_cluster_recovery(self):
        hits = 0
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            X = np.vstack([rng.normal((0, 0), 1, (200, 2)),
                           rng.normal((10, 10), 1, (200, 2))])
            model, _ = gmm.fit_em(X, 2, seed=seed)
            means = model.means[np.argsort(model.means[:, 0])]
            if np.all(np.abs(means - [[0, 0], [10, 10]]) < 0.5):
                hits += 1
        assert hits >= 19

    def test_monotone_trace(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((150, 3))
        for seed in range(10):
            _, report = gmm.fit_em(X, 3, seed=seed)
            trace = report.log_likelihood_trace
            assert all(b >= a - 1e-8 for a, b in zip(trace, trace[1:]))

    def test_too_many_components(self):
        with pytest.raises(ValueError):
            gmm.fit_em(np.zeros((3, 2)), 4)

    def test_zero_variance_dimension_floored(self):
        X = np.column_stack([np.random.default_rng(5).standard_normal(50),
                             np.zeros(50)])
        with pytest.warns(UserWarning):
            model, _ = gmm.fit_em(X, 1, seed=0)
        assert np.all(model.variances >= gmm.VARIANCE_FLOOR)

    def test_responsibilities_sum_to_one(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((40, 2))
        model, _ = gmm.fit_em(X, 3, seed=1)
        resp = gmm.responsibilities(model, X)
        np.testing.assert_allclose(resp.sum(axis=1), 1.0, atol=1e-12)

    def test_simplex_and_floor_after_fit(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((100, 4))
        for m in (1, 2, 4):
            model, _ = gmm.fit_em(X, m, seed=2)
            assert abs(model.weights.sum() - 1.0) <= 1e-9
            assert np.all(model.weights >= 0)
            assert np.all(model.variances >= gmm.VARIANCE_FLOOR)


class TestCriteria:
    def test_n_params(self):
        assert gmm.n_params(single_gaussian_1d()) == 2
        rng = np.random.default_rng(8)
        assert gmm.n_params(random_model(rng, 2, 13)) == 53
        assert gmm.n_params(random_model(rng, 3, 39)) == 236

    def test_bic_minus_aic_identity(self):
        rng = np.random.default_rng(9)
        model = random_model(rng, 2, 3)
        for n in (5, 20, 100):
            X = rng.standard_normal((n, 3))
            k = gmm.n_params(model)
            assert gmm.bic(model, X) - gmm.aic(model, X) == pytest.approx(
                k * (np.log(n) - 2), rel=1e-12)

    def test_bic_aic_sign_straddles_e_squared(self):
        rng = np.random.default_rng(10)
        model = random_model(rng, 1, 2)
        x7 = rng.standard_normal((7, 2))
        x8 = rng.standard_normal((8, 2))
        assert gmm.bic(model, x7) - gmm.aic(model, x7) < 0
        assert gmm.bic(model, x8) - gmm.aic(model, x8) > 0

    def test_nested_aic_difference(self):
        rng = np.random.default_rng(11)
        X = rng.standard_normal((60, 2))
        m1, _ = gmm.fit_em(X, 1, seed=0)
        m2, _ = gmm.fit_em(X, 2, seed=0)
        dk = gmm.n_params(m2) - gmm.n_params(m1)
        dll = gmm.log_likelihood(m2, X) - gmm.log_likelihood(m1, X)
        assert gmm.aic(m2, X) - gmm.aic(m1, X) == pytest.approx(
            2 * dk - 2 * dll, rel=1e-9)


class TestSelection:
    def test_single_tight_gaussian(self):
        rng = np.random.default_rng(12)
        X = rng.normal(0, 0.1, (300, 2))
        best, _ = gmm.select_n_components(X, 1, 4, "bic", seed=0)
        assert best == 1

    def test_three_separated_components(self):
        hits = 0
        for seed in range(20):
            rng = np.random.default_rng(3000 + seed)
            mus = np.array([[0, 0, 0, 0], [12, 0, 0, 0], [0, 12, 0, 0]], float)
            X = np.vstack([rng.normal(mu, 1, (200, 4)) for mu in mus])
            best, _ = gmm.select_n_components(X, 1, 6, "bic", seed=seed)
            hits += best == 3
        assert hits >= 16

    def test_singleton_range(self):
        rng = np.random.default_rng(13)
        X = rng.standard_normal((50, 2))
        best, curve = gmm.select_n_components(X, 2, 2, "bic", seed=0)
        assert best == 2
        assert len(curve) == 1

    def test_curve_contains_both_criteria(self):
        rng = np.random.default_rng(14)
        X = rng.standard_normal((100, 2))
        _, curve = gmm.select_n_components(X, 1, 3, "aic", seed=0)
        assert [row[0] for row in curve] == [1, 2, 3]
        for _, a, b in curve:
            assert np.isfinite(a) and np.isfinite(b)


def test_serialization_round_trip():
    rng = np.random.default_rng(15)
    model = random_model(rng, 3, 5)
    sink = io.StringIO()
    gmm.write_gmm(model, sink)
    text = sink.getvalue()
    assert text.startswith("gmm v1 3 5\n")
    loaded = gmm.read_gmm(io.StringIO(text))
    np.testing.assert_array_equal(loaded.weights, model.weights)
    np.testing.assert_array_equal(loaded.means, model.means)
    np.testing.assert_array_equal(loaded.variances, model.variances)

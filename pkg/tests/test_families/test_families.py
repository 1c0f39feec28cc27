"""Tests for qvfdag.families: QVF constants, moments, sampling, config parsing."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from qvfdag.common.errors import DegenerateWeightError, FamilyConfigError, GlmInputError
from qvfdag.families import (
    ETA_CLAMP,
    LinearPredictor,
    QvfFamily,
    mean_from_eta,
    model_variance,
    omega,
    parse_families,
    resolve_families,
)


class TestConstants:
    @pytest.mark.parametrize(
        ("family", "betas"),
        [
            (QvfFamily.poisson(), (1.0, 0.0)),
            (QvfFamily.binomial(4), (1.0, -0.25)),
            (QvfFamily.exponential(), (0.0, 1.0)),
        ],
    )
    def test_betas(self, family, betas):
        """Each family carries its published (beta1, beta2) pair."""
        assert (family.beta1, family.beta2) == pytest.approx(betas)

    def test_mixture_has_no_betas(self):
        """A mixture has no QVF constants of its own."""
        mix = QvfFamily.mixture(QvfFamily.poisson(), QvfFamily.binomial(4))
        with pytest.raises(FamilyConfigError):
            _ = mix.beta1

    def test_unresolved_binomial(self):
        """Binomial without a trial count cannot report beta2."""
        with pytest.raises(FamilyConfigError, match="trials"):
            _ = QvfFamily.binomial().beta2

    def test_binomial_needs_two_trials(self):
        with pytest.raises(ValidationError):
            QvfFamily.binomial(1)

    def test_trials_only_for_binomial(self):
        with pytest.raises(ValidationError):
            QvfFamily(kind="poisson", trials=3)

    def test_nested_mixture_rejected(self):
        """Mixture components must themselves be plain families."""
        inner = QvfFamily.mixture(QvfFamily.poisson(), QvfFamily.exponential())
        with pytest.raises(ValidationError):
            QvfFamily.mixture(inner, QvfFamily.poisson())


class TestResolve:
    def test_trials_from_column_max(self):
        """Missing trials are inferred from the column maximum."""
        assert QvfFamily.binomial().resolve([0, 3, 2]).trials == 3

    def test_trials_floored_at_two(self):
        """Inferred trials never drop below 2."""
        assert QvfFamily.binomial().resolve([0, 1, 1]).trials == 2

    def test_explicit_trials_kept(self):
        assert QvfFamily.binomial(6).resolve([0, 1]).trials == 6

    def test_mixture_components_resolved(self):
        mix = QvfFamily.mixture(QvfFamily.poisson(), QvfFamily.binomial())
        assert mix.resolve([0, 5]).is_resolved

    def test_resolve_families_length_mismatch(self):
        with pytest.raises(FamilyConfigError):
            resolve_families([QvfFamily.poisson()], np.zeros((3, 2)))


class TestMoments:
    def test_mean_from_eta(self):
        """Inverse links: exp for Poisson and Exponential, N * logistic for Binomial."""
        assert mean_from_eta(QvfFamily.poisson(), 0.0) == pytest.approx(1.0)
        assert mean_from_eta(QvfFamily.binomial(4), 0.0) == pytest.approx(2.0)
        assert mean_from_eta(QvfFamily.exponential(), math.log(3.0)) == pytest.approx(3.0)

    def test_eta_is_clamped(self):
        """Linear predictors beyond the clamp saturate instead of overflowing."""
        assert mean_from_eta(QvfFamily.poisson(), 100.0) == pytest.approx(math.exp(ETA_CLAMP))

    def test_mixture_mean_averages_components(self):
        mix = QvfFamily.mixture(QvfFamily.poisson(), QvfFamily.binomial(4))
        assert mean_from_eta(mix, (0.0, 0.0)) == pytest.approx(1.5)

    def test_model_variance(self):
        assert model_variance(QvfFamily.binomial(4), 2.0) == pytest.approx(1.0)
        assert model_variance(QvfFamily.exponential(), 3.0) == pytest.approx(9.0)

    def test_omega(self):
        assert omega(QvfFamily.poisson(), 5.0) == pytest.approx(1.0)
        assert omega(QvfFamily.exponential(), 4.0) == pytest.approx(0.25)
        np.testing.assert_allclose(omega(QvfFamily.binomial(4), [1.0, 2.0]), [4 / 3, 2.0])

    @pytest.mark.parametrize("family", [QvfFamily.poisson(), QvfFamily.binomial(5), QvfFamily.exponential()])
    def test_omega_times_variance_is_mean(self, family):
        """omega(mu) * model_variance(mu) == mu wherever omega is defined."""
        mu = np.array([0.5, 1.0, 2.0, 3.5])
        np.testing.assert_allclose(omega(family, mu) * model_variance(family, mu), mu, rtol=1e-12)

    def test_omega_degenerate(self):
        """A zero denominator reports the node and the offending mean."""
        with pytest.raises(DegenerateWeightError) as exc:
            omega(QvfFamily.binomial(4), [1.0, 4.0], node=2)
        assert exc.value.node == 2
        assert exc.value.mu == 4.0


class TestSampling:
    def test_poisson_mean(self, rng):
        draws = QvfFamily.poisson().sample(np.full(20000, math.log(3.0)), rng)
        assert draws.mean() == pytest.approx(3.0, abs=0.1)

    def test_binomial_support(self, rng):
        draws = QvfFamily.binomial(4).sample(np.zeros(1000), rng)
        assert draws.min() >= 0
        assert draws.max() <= 4

    def test_exponential_positive(self, rng):
        draws = QvfFamily.exponential().sample(np.zeros(500), rng)
        assert np.all(draws > 0)

    @pytest.mark.parametrize(
        ("family", "eta"),
        [
            (QvfFamily.poisson(), math.log(4.0)),
            (QvfFamily.binomial(6), 0.4),
            (QvfFamily.exponential(), math.log(2.0)),
        ],
    )
    def test_sample_variance_matches_model_variance(self, family, eta, rng):
        """Empirical variance of 200k draws is within 3% of beta1 * mu + beta2 * mu**2."""
        draws = family.sample(np.full(200_000, eta), rng)
        mu = mean_from_eta(family, eta)
        assert draws.mean() == pytest.approx(mu, rel=0.02)
        assert draws.var() == pytest.approx(model_variance(family, mu), rel=0.03)

    def test_mixture_uses_both_components(self, rng):
        """Each observation flips a fair coin between the two components."""
        mix = QvfFamily.mixture(QvfFamily.poisson(), QvfFamily.binomial(4))
        draws = mix.sample((np.full(5000, math.log(50.0)), np.zeros(5000)), rng)
        assert draws.shape == (5000,)
        # Binomial(4) never exceeds 4; Poisson(50) almost never falls that low.
        share_small = float(np.mean(draws <= 4))
        assert 0.4 < share_small < 0.6


class TestGlmHooks:
    def test_negative_response_rejected(self):
        with pytest.raises(GlmInputError, match="nonnegative"):
            QvfFamily.poisson().check_response(np.array([1.0, -1.0]))

    def test_binomial_above_trials_rejected(self):
        with pytest.raises(GlmInputError, match="exceeds"):
            QvfFamily.binomial(2).check_response(np.array([0.0, 3.0]))

    def test_mixture_cannot_be_fit(self):
        """Mixtures are simulation-only."""
        mix = QvfFamily.mixture(QvfFamily.poisson(), QvfFamily.poisson())
        with pytest.raises(FamilyConfigError):
            mix.check_response(np.array([1.0]))

    @pytest.mark.parametrize("family", [QvfFamily.poisson(), QvfFamily.binomial(5), QvfFamily.exponential()])
    def test_derivative_matches_finite_difference(self, family):
        """nll_derivative agrees with a central difference of nll."""
        y = np.array([0.0, 1.0, 3.0])
        eta = np.array([-0.3, 0.2, 0.9])
        h = 1e-6
        numeric = (family.nll(y, eta + h) - family.nll(y, eta - h)) / (2 * h)
        np.testing.assert_allclose(family.nll_derivative(y, eta), numeric, rtol=1e-5, atol=1e-7)

    @pytest.mark.parametrize("family", [QvfFamily.poisson(), QvfFamily.binomial(5), QvfFamily.exponential()])
    def test_unit_deviance_is_shifted_nll(self, family):
        """Deviance is 2 * nll minus a term that depends on y only, and never negative."""
        y = np.array([0.0, 1.0, 3.0, 5.0])
        eta_a = np.array([-0.3, 0.2, 0.9, 1.1])
        eta_b = np.array([0.4, -0.5, 1.5, 0.2])
        shift_a = family.unit_deviance(y, eta_a) - 2.0 * family.nll(y, eta_a)
        shift_b = family.unit_deviance(y, eta_b) - 2.0 * family.nll(y, eta_b)
        np.testing.assert_allclose(shift_a, shift_b, rtol=1e-10, atol=1e-10)
        assert np.all(family.unit_deviance(y, eta_a) >= 0.0)

    @pytest.mark.parametrize(
        ("family", "y"),
        [
            (QvfFamily.poisson(), np.array([0.5, 2.0, 7.0])),
            (QvfFamily.binomial(4), np.array([1.0, 2.0, 3.0])),
            (QvfFamily.exponential(), np.array([0.5, 2.0, 7.0])),
        ],
    )
    def test_unit_deviance_zero_at_saturated_fit(self, family, y):
        """A predictor that reproduces every response has zero deviance."""
        np.testing.assert_allclose(family.unit_deviance(y, family.link(y)), 0.0, atol=1e-9)

    def test_labels(self):
        assert QvfFamily.binomial(3).label() == "binomial(3)"
        assert QvfFamily.mixture(QvfFamily.poisson(), QvfFamily.exponential()).label() == (
            "mixture(poisson, exponential)"
        )


class TestParseFamilies:
    def test_single_object_broadcast(self):
        """One object applies to every column."""
        fams = parse_families({"kind": "binomial", "trials": 4}, 3)
        assert fams == [QvfFamily.binomial(4)] * 3

    def test_list_per_column(self):
        fams = parse_families([{"kind": "poisson"}, {"kind": "exponential"}], 2)
        assert [f.kind for f in fams] == ["poisson", "exponential"]

    def test_length_mismatch(self):
        with pytest.raises(FamilyConfigError, match="2 columns"):
            parse_families([{"kind": "poisson"}], 2)

    def test_unknown_kind(self):
        with pytest.raises(FamilyConfigError):
            parse_families({"kind": "gamma"}, 2)

    def test_not_an_object(self):
        with pytest.raises(FamilyConfigError):
            parse_families("poisson", 2)


class TestLinearPredictor:
    def test_eta(self):
        lp = LinearPredictor(intercept=1.0, coefficients=np.array([2.0, -1.0]))
        np.testing.assert_allclose(lp.eta(np.array([[1.0, 1.0], [0.0, 2.0]])), [2.0, -1.0])
        assert lp.q == 2

    def test_non_finite_rejected(self):
        with pytest.raises(GlmInputError):
            LinearPredictor(intercept=math.nan)

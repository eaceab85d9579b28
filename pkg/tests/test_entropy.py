"""Entropy minimization: Gibbs laws, plateau and alternating witnesses."""

import math

import numpy as np
import pytest

from gibbs_series import (
    FitStatus,
    InfeasibleError,
    WitnessBudgetError,
    alternating_attainment,
    alternating_witness,
    box,
    box_conjugate,
    conjugate,
    domain_info,
    fit_gibbs,
    gibbs_ratio,
    linear,
    logfam,
    min_entropy_moment,
    parse_varsigma,
    plateau_witness,
    power,
    quadratic,
    sigma_values,
)


def entropy_of(weights):
    w = np.asarray(weights)
    w = w[w > 0]
    return float(np.sum(w * (np.log(w) - 1.0)))


class TestGibbsRatio:
    def test_half_at_two(self):
        assert gibbs_ratio(2.0) == pytest.approx(0.5, abs=1e-15)

    def test_solves_moment_equation(self):
        for u in (0.3, 1.0, 7.5):
            z = gibbs_ratio(u)
            assert 0.0 < z < 1.0
            assert z / (1.0 - z) ** 2 == pytest.approx(u, rel=1e-12)


class TestSingleMoment:
    def test_unit_gap_closed_form(self):
        fit = min_entropy_moment(linear(), 2.0, tol=1e-12)
        assert fit.status is FitStatus.INTERIOR_UNIQUE
        assert fit.dual_y == pytest.approx(-math.log(2.0), abs=1e-12)
        assert fit.entropy_value == pytest.approx(-1.0 - 2.0 * math.log(2.0), abs=1e-11)
        for n in range(1, 20):
            assert fit.weights[n - 1] == pytest.approx(0.5 ** n, abs=1e-12)

    def test_zero_moment(self):
        fit = min_entropy_moment(quadratic(), 0.0)
        assert fit.status is FitStatus.INTERIOR_UNIQUE
        assert fit.entropy_value == 0.0
        assert fit.weights is None

    def test_negative_infeasible(self):
        fit = min_entropy_moment(linear(), -1.0)
        assert fit.status is FitStatus.INFEASIBLE

    def test_plateau_not_attained(self):
        seq = logfam(3.0)
        di = domain_info(seq)
        u = di.gamma + 0.5
        fit = min_entropy_moment(seq, u)
        assert fit.status is FitStatus.PLATEAU_NON_ATTAINED
        assert fit.weights is None
        assert fit.entropy_value == pytest.approx(-u - di.f_at_boundary, abs=1e-12)

    def test_boundary_moment_attained(self):
        seq = logfam(3.0)
        di = domain_info(seq)
        fit = min_entropy_moment(seq, di.gamma, tol=1e-6)
        assert fit.status is FitStatus.INTERIOR_UNIQUE
        assert fit.dual_y == -1.0
        ws = np.asarray(fit.weights[:50])
        ss = sigma_values(seq, np.asarray(fit.indices[:50]))
        assert ws == pytest.approx(np.exp(-ss), rel=1e-13)

    def test_duality_consistency(self):
        for seq, u in [(linear(), 2.0), (quadratic(), 1.5), (box(1.0), 0.8), (power(1.5), 2.4)]:
            fit = min_entropy_moment(seq, u, tol=1e-10)
            cv = conjugate(seq, u, tol=1e-10)
            assert fit.entropy_value == pytest.approx(cv.value, abs=1e-9)

    def test_materialized_entropy_matches_value(self):
        fit = min_entropy_moment(linear(), 2.0, tol=1e-12)
        # prefix entropy plus a crumb for the tail reproduces the value
        assert entropy_of(fit.weights) == pytest.approx(fit.entropy_value, abs=1e-10)


class TestTwoMoments:
    def test_unit_gap_mass_energy(self):
        fit = fit_gibbs(linear(), 1.0, 2.0, tol=1e-12)
        assert fit.status is FitStatus.INTERIOR_UNIQUE
        assert fit.dual_x == pytest.approx(0.0, abs=1e-12)
        assert fit.dual_y == pytest.approx(-math.log(2.0), abs=1e-12)
        assert fit.entropy_value == pytest.approx(-1.0 - 2.0 * math.log(2.0), abs=1e-11)
        for n in range(1, 31):
            assert fit.weights[n - 1] == pytest.approx(0.5 ** n, abs=1e-10)

    def test_gibbs_form_exact_by_construction(self):
        fit = fit_gibbs(quadratic(), 1.3, 3.1, tol=1e-10)
        ss = sigma_values(quadratic(), np.asarray(fit.indices))
        assert np.allclose(
            np.log(np.asarray(fit.weights)), fit.dual_x + ss * fit.dual_y,
            rtol=0.0, atol=1e-12,
        )

    def test_moment_residuals(self):
        fit = fit_gibbs(quadratic(), 1.3, 3.1, tol=1e-10)
        assert fit.achieved[0] == pytest.approx(1.3, abs=1e-10)
        assert fit.achieved[1] == pytest.approx(3.1, abs=1e-9)

    def test_box_ground_state(self):
        fit = fit_gibbs(box(1.0), 1.0, 3.0)
        assert fit.status is FitStatus.BOUNDARY_SINGLETON
        assert fit.indices == ((1, 1, 1),)
        assert fit.entropy_value == pytest.approx(-1.0, abs=1e-14)

    def test_box_interior_duality(self):
        fit = fit_gibbs(box(1.0), 1.0, 4.0, tol=1e-10)
        assert fit.status is FitStatus.INTERIOR_UNIQUE
        assert fit.entropy_value == pytest.approx(
            box_conjugate(1.0, 4.0, tol=1e-12), abs=1e-9
        )

    def test_ratio_below_minimum_infeasible(self):
        fit = fit_gibbs(box(1.0), 1.0, 2.0)
        assert fit.status is FitStatus.INFEASIBLE
        assert "ratio" in fit.reason

    def test_zero_mass_cases(self):
        fit = fit_gibbs(linear(), 0.0, 0.0)
        assert fit.status is FitStatus.INTERIOR_UNIQUE
        assert fit.entropy_value == 0.0
        fit = fit_gibbs(linear(), 0.0, 2.0)
        assert fit.status is FitStatus.INFEASIBLE
        assert "conjugate" in fit.reason  # the value-0-without-weights anomaly

    def test_negative_infeasible(self):
        assert fit_gibbs(linear(), -1.0, 1.0).status is FitStatus.INFEASIBLE
        assert fit_gibbs(linear(), 1.0, -1.0).status is FitStatus.INFEASIBLE

    def test_ratio_beyond_closed_edge_is_plateau(self):
        seq = logfam(3.0)
        di = domain_info(seq)
        ratio_sup = di.gamma / di.f_at_boundary
        u = 1.0
        v = u * (ratio_sup + 0.5)
        fit = fit_gibbs(seq, u, v)
        assert fit.status is FitStatus.PLATEAU_NON_ATTAINED
        expect = u * (math.log(u) - 1.0) - v - u * math.log(di.f_at_boundary)
        assert fit.entropy_value == pytest.approx(expect, abs=1e-10)

    def test_ratio_at_closed_edge_is_attained(self):
        # the supremum ratio itself is carried by the boundary law
        seq = logfam(3.0)
        di = domain_info(seq)
        ratio_sup = di.gamma / di.f_at_boundary
        fit = fit_gibbs(seq, 2.0, 2.0 * ratio_sup)
        assert fit.status is FitStatus.INTERIOR_UNIQUE
        assert fit.dual_y == -1.0
        assert fit.dual_x == pytest.approx(
            math.log(2.0) - math.log(di.f_at_boundary), abs=1e-12
        )
        ws = np.asarray(fit.weights[:20])
        ss = sigma_values(seq, np.asarray(fit.indices[:20]))
        assert ws == pytest.approx(np.exp(fit.dual_x - ss), rel=1e-13)

    def test_uniqueness_perturbation(self):
        # moving mass along the two-constraint null space raises entropy
        fit = fit_gibbs(linear(), 1.0, 2.0, tol=1e-12)
        w = np.asarray(fit.weights[:3])
        direction = np.array([1.0, -2.0, 1.0])  # kills mass and energy moments
        base = entropy_of(w)
        for eps in (1e-3, -1e-3):
            assert entropy_of(w + eps * direction) > base


class TestPlateauWitness:
    def test_requires_finite_slope(self):
        with pytest.raises(ValueError):
            plateau_witness(linear(), 5.0, 1e-2)

    def test_requires_plateau_moment(self):
        seq = logfam(3.0)
        with pytest.raises(ValueError):
            plateau_witness(seq, 0.5, 1e-2)

    def test_achievable_eps(self):
        seq = logfam(3.0)
        g = domain_info(seq).gamma
        wit = plateau_witness(seq, g + 1.0, eps=0.2, max_terms=100_000)
        assert 0.0 <= wit.gap <= 0.2
        # the moment constraint holds exactly (last window weight adjusted)
        ss = sigma_values(seq, wit.indices)
        moment = float(ss @ wit.weights)
        assert moment == pytest.approx(g + 1.0, rel=1e-13)
        assert np.all(wit.weights >= 0.0)
        assert 0.0 < wit.lam < 1.0

    def test_entropy_measures_gap(self):
        seq = logfam(3.0)
        g = domain_info(seq).gamma
        wit = plateau_witness(seq, g + 1.0, eps=0.2, max_terms=100_000)
        assert entropy_of(wit.weights) == pytest.approx(wit.entropy, abs=1e-9)
        assert wit.target == pytest.approx(conjugate(seq, g + 1.0).value, abs=1e-12)

    def test_budget_error_carries_monotone_history(self):
        seq = logfam(3.0)
        g = domain_info(seq).gamma
        with pytest.raises(WitnessBudgetError) as exc:
            plateau_witness(seq, g + 1.0, eps=1e-4, max_terms=300_000)
        best = exc.value.best
        lams = best.lam_history
        gaps = best.gap_history
        assert all(a < b for a, b in zip(lams, lams[1:]))
        assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
        assert all(l < 1.0 for l in lams)
        assert best.gap == min(gaps)

    def test_gap_shrinks_with_budget(self):
        seq = logfam(3.0)
        g = domain_info(seq).gamma
        gaps = []
        for budget in (50_000, 800_000):
            with pytest.raises(WitnessBudgetError) as exc:
                plateau_witness(seq, g + 1.0, eps=1e-6, max_terms=budget)
            gaps.append(exc.value.best.gap)
        assert gaps[1] < gaps[0]

    def test_witness_at_the_boundary_moment(self):
        # at u = gamma the minimum is attained only by the infinite law;
        # a finite list still gets within a measurable, honest gap
        seq = logfam(3.0)
        g = domain_info(seq).gamma
        wit = plateau_witness(seq, g, eps=0.5, max_terms=100_000)
        assert 0.0 <= wit.gap <= 0.5
        ss = sigma_values(seq, wit.indices)
        assert float(ss @ wit.weights) == pytest.approx(g, rel=1e-13)

    def test_prefix_override(self):
        seq = logfam(3.0)
        g = domain_info(seq).gamma
        wit = plateau_witness(seq, g + 1.0, eps=0.5, max_terms=50_000, n_prefix=50)
        assert wit.n_prefix == 50
        assert wit.gap >= 0.0


class TestAlternatingAttainment:
    def test_square_coefficients_value(self):
        att = alternating_attainment(2.0, parse_varsigma("power:2"), tol=1e-13)
        assert att.convergent
        assert att.value == pytest.approx(-2.0 / 27.0, abs=1e-12)
        assert att.ratio == pytest.approx(0.5, abs=1e-15)

    def test_closed_form_cross_check(self):
        # sum (-1)^n n^2 z^n = -z(1-z)/(1+z)^3 evaluated by substitution
        z = 0.5
        closed = (-z) * (1.0 + (-z)) / (1.0 - (-z)) ** 3
        att = alternating_attainment(2.0, parse_varsigma("power:2"), tol=1e-14)
        assert att.value == pytest.approx(closed, abs=1e-13)

    def test_exp_threshold(self):
        att = alternating_attainment(2.0, parse_varsigma("exp:0.5"))
        assert att.convergent
        assert att.alpha_threshold == pytest.approx(math.log(2.0), abs=1e-15)
        w = -math.exp(0.5) * 0.5
        assert att.value == pytest.approx(w / (1.0 - w), rel=1e-14)
        assert not alternating_attainment(2.0, parse_varsigma("exp:0.7")).convergent

    def test_expsq_divergent(self):
        att = alternating_attainment(2.0, parse_varsigma("expsq"))
        assert not att.convergent
        assert att.value is None


class TestAlternatingWitness:
    @pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
    def test_gap_ladder(self, eps):
        wit = alternating_witness(2.0, 0.0, eps)
        assert -1e-12 <= wit.gap <= eps
        assert abs(wit.moment_residuals[0]) <= 1e-12
        assert abs(wit.moment_residuals[1]) <= 1e-10 * wit.signed_scale + 1e-12

    def test_target_is_dual_value(self):
        wit = alternating_witness(2.0, 0.0, 1e-2)
        assert wit.target == pytest.approx(conjugate(linear(), 2.0).value, abs=1e-12)

    def test_attained_case_recovers_gibbs_prefix(self):
        v_bar = -2.0 / 27.0
        gaps = []
        for eps in (1e-2, 1e-4, 1e-6):
            wit = alternating_witness(2.0, v_bar, eps)
            gaps.append(wit.gap)
            # prefix is the Gibbs law; the correction weights vanish
            assert wit.weights[: wit.n_prefix] == pytest.approx(
                [0.5 ** k for k in range(1, wit.n_prefix + 1)], rel=1e-14
            )
            assert max(wit.weights[-2:]) <= 10.0 * eps
        assert gaps[0] > gaps[1] > gaps[2] >= 0.0

    def test_zero_mass_cases(self):
        wit = alternating_witness(0.0, 0.0, 1e-3)
        assert wit.entropy == 0.0 and len(wit.weights) == 0
        with pytest.raises(InfeasibleError):
            alternating_witness(0.0, 1.0, 1e-3)

    def test_other_coefficient_families(self):
        wit = alternating_witness(1.5, 0.3, 1e-3, parse_varsigma("power:3"))
        assert 0.0 <= wit.gap <= 1e-3
        assert abs(wit.moment_residuals[0]) <= 1e-12
        wit = alternating_witness(2.0, 0.5, 1e-2, parse_varsigma("expsq"))
        assert 0.0 <= wit.gap <= 1e-2
        # signed check is ill-conditioned at this coefficient scale;
        # meaningful only relative to the largest term
        assert abs(wit.moment_residuals[1]) <= 1e-12 * wit.signed_scale

    def test_negative_u_rejected(self):
        with pytest.raises(InfeasibleError):
            alternating_witness(-1.0, 0.0, 1e-2)

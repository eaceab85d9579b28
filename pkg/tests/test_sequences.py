"""Exponent-sequence definitions, increment gaps, and box enumeration."""

import math

import numpy as np
import pytest

from gibbs_series import (
    SequenceIndexError,
    box,
    custom,
    enumerate_box,
    increment_gap,
    linear,
    logfam,
    loglog,
    parse_sequence,
    parse_varsigma,
    power,
    quadratic,
    sigma,
    sigma_values,
)


class TestSigma:
    def test_linear(self):
        assert sigma(linear(), 3) == 3.0

    def test_power(self):
        assert sigma(power(2.0), 4) == 16.0

    def test_logfam_start_value(self):
        # ln(n (ln n)^theta) at the start index n = 3, theta = 1
        expected = math.log(3.0 * math.log(3.0))
        assert sigma(logfam(1.0), 3) == pytest.approx(expected, rel=1e-15)
        assert expected == pytest.approx(1.1927, abs=5e-4)

    def test_below_start_raises(self):
        with pytest.raises(SequenceIndexError):
            sigma(logfam(1.0), 2)
        with pytest.raises(SequenceIndexError):
            sigma(linear(), 0)
        with pytest.raises(SequenceIndexError):
            sigma_values(loglog(), np.array([2, 3]))

    def test_vectorized_matches_scalar(self):
        for seq in (linear(), power(1.7), quadratic(), logfam(2.5), loglog(), box(1.5)):
            ns = np.arange(seq.start_index, seq.start_index + 40)
            vec = sigma_values(seq, ns)
            assert vec == pytest.approx([sigma(seq, int(n)) for n in ns], rel=1e-15)

    def test_monotone_nondecreasing(self):
        for seq in (linear(), power(0.5), power(3.0), quadratic(), logfam(-1.0),
                    logfam(3.0), loglog(), box(0.7)):
            ns = np.arange(seq.start_index, seq.start_index + 500)
            vals = sigma_values(seq, ns)
            assert np.all(np.diff(vals) >= 0.0)

    def test_positive_from_start(self):
        for seq in (linear(), power(0.5), quadratic(), logfam(-1.0), logfam(3.0), box(1.0)):
            ns = np.arange(seq.start_index, seq.start_index + 100)
            assert np.all(sigma_values(seq, ns) > 0.0)

    def test_logfam_theta_range(self):
        with pytest.raises(ValueError):
            logfam(-1.5)


class TestIncrementGap:
    def test_linear(self):
        assert increment_gap(linear(), 5) == 1.0

    def test_quadratic(self):
        # min over n >= 3 of (n+1)^2 - n^2 = 2n + 1
        assert increment_gap(quadratic(), 3) == 7.0

    def test_logfam_forces_integral_path(self):
        assert increment_gap(logfam(0.0), 10) == 0.0

    def test_sublinear_power_is_zero(self):
        assert increment_gap(power(0.5), 10) == 0.0

    def test_box_has_ties(self):
        assert increment_gap(box(1.0), 1) == 0.0

    def test_gap_is_valid_lower_bound(self):
        for seq in (linear(), power(1.0), power(2.5), quadratic()):
            for N in (seq.start_index, 7, 40):
                delta = increment_gap(seq, N)
                assert delta > 0.0
                for n in range(N, N + 200):
                    assert sigma(seq, n + 1) >= sigma(seq, n) + delta - 1e-12

    def test_custom_declares_gap(self):
        seq = custom(lambda n: 2.0 * n, declared_alpha=0.0, declared_gap=2.0)
        assert increment_gap(seq, 4) == 2.0
        with pytest.raises(ValueError):
            custom(lambda n: n, declared_alpha=0.0, declared_gap=0.0)


class TestEnumerateBox:
    def test_ground_state(self):
        assert enumerate_box(1.0, 1) == [((1, 1, 1), 3.0)]

    def test_first_shell_ties_lexicographic(self):
        got = enumerate_box(1.0, 4)
        assert got == [
            ((1, 1, 1), 3.0),
            ((1, 1, 2), 6.0),
            ((1, 2, 1), 6.0),
            ((2, 1, 1), 6.0),
        ]

    def test_kappa_scaling(self):
        assert enumerate_box(2.0, 2) == [((1, 1, 1), 6.0), ((1, 1, 2), 12.0)]

    def test_levels_nondecreasing(self):
        vals = [s for _, s in enumerate_box(1.0, 2000)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_complete_up_to_level_100(self):
        # exhaustive reference enumeration of every triple with level <= 100
        reference = set()
        for k in range(1, 11):
            for l in range(1, 11):
                for m in range(1, 11):
                    if k * k + l * l + m * m <= 100:
                        reference.add((k, l, m))
        listed = enumerate_box(1.0, 5000)
        got = {t for t, s in listed if s <= 100.0}
        assert got == reference

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            enumerate_box(1.0, 0)
        with pytest.raises(ValueError):
            enumerate_box(-1.0, 5)


class TestParsing:
    def test_round_trip(self):
        for spec in ("linear", "power:2", "logfam:3", "loglog", "quadratic", "box:0.5"):
            assert parse_sequence(spec).spec_string() == spec

    def test_box_default_kappa(self):
        assert parse_sequence("box").kappa == 1.0

    def test_bad_specs(self):
        for bad in ("cubic", "power", "power:-1", "logfam:-2", "box:0"):
            with pytest.raises(ValueError):
                parse_sequence(bad)


class TestVarsigma:
    def test_parse(self):
        assert parse_varsigma("power:2").value(3) == 9.0
        assert parse_varsigma("exp:0.5").value(2) == pytest.approx(math.e)
        assert parse_varsigma("expsq").log_value(7) == 49.0

    def test_superlinear_growth(self):
        for spec in ("power:1.5", "exp:0.1", "expsq"):
            vs = parse_varsigma(spec)
            # varsigma_n / n grows without bound
            assert vs.log_value(4000) - math.log(4000) > math.log(50.0)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            parse_varsigma("power:1")
        with pytest.raises(ValueError):
            parse_varsigma("exp:0")
        with pytest.raises(ValueError):
            parse_varsigma("weird")

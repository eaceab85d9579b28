"""Tail certificates are true upper bounds: direct long-sum comparisons."""

import math

import numpy as np
import pytest

from gibbs_series import (
    box,
    custom,
    linear,
    logfam,
    power,
    quadratic,
    sigma_values,
    tail_bound_after,
)
from gibbs_series.series import _box_level_tail


def brute_tail(seq, y, p, N, extent=2_000_000):
    """Partial tail sum over (N, N+extent]; a lower bound on the true tail."""
    ns = np.arange(N + 1, N + extent + 1, dtype=np.int64)
    s = sigma_values(seq, ns)
    return float(np.sum(s ** p * np.exp(s * y)))


CASES = [
    (linear(), -0.05, 0, 40),
    (linear(), -0.4, 3, 60),
    (power(1.5), -0.2, 1, 50),
    (power(0.7), -0.6, 0, 64),
    (power(0.7), -1.1, 2, 128),
    (quadratic(), -0.01, 1, 64),
    (logfam(3.0), -1.5, 0, 1000),
    (logfam(3.0), -1.2, 1, 5000),
    (logfam(0.5), -2.0, 0, 1000),
    (logfam(3.0), -1.0, 0, 1000),
    (logfam(3.0), -1.0, 1, 1000),
]


@pytest.mark.parametrize("seq,y,p,N", CASES)
def test_tail_bound_dominates_brute_tail(seq, y, p, N):
    bound = tail_bound_after(seq, y, p, N)
    assert bound is not None
    assert bound >= brute_tail(seq, y, p, N)


def test_tail_bound_none_before_decay(seq=quadratic()):
    # at y = -1e-6 the terms still grow at small indexes for p = 1
    assert tail_bound_after(quadratic(), -1e-6, 1, 5) is None


def test_box_level_tail_dominates_brute():
    # flattened tail over levels s > S versus a long explicit enumeration
    from gibbs_series import enumerate_box

    kappa, y, S = 1.0, -0.3, 20
    for p in (0, 1):
        bound = _box_level_tail(kappa, y, p, S)
        brute = math.fsum(
            s ** p * math.exp(s * y) for _, s in enumerate_box(kappa, 300_000) if s > S
        )
        assert bound is not None and bound >= brute


def test_custom_gap_certificate():
    seq = custom(lambda n: 3.0 * n + 1.0, declared_alpha=0.0, declared_gap=3.0)
    bound = tail_bound_after(seq, -0.5, 1, 30)
    assert bound is not None
    assert bound >= brute_tail(seq, -0.5, 1, 30, extent=10_000)


def test_logfam_boundary_integral_brackets_true_tail():
    # exact integrals from N and N+1 sandwich the boundary tail; a brute
    # window sum plus an upper bound on its own far tail closes the check
    from gibbs_series.series import _logfam_boundary_integral

    seq, p, N, extent = logfam(3.0), 1, 500, 4_000_000
    lower = _logfam_boundary_integral(3.0, p, N + 1.0)
    upper = _logfam_boundary_integral(3.0, p, float(N))
    brute = brute_tail(seq, -1.0, p, N, extent=extent)
    far_upper = _logfam_boundary_integral(3.0, p, float(N + extent))
    from gibbs_series import sigma

    assert brute <= upper
    assert lower <= brute + far_upper
    # sandwich width is at most a single term's size
    s_n = sigma(seq, N)
    assert upper - lower <= s_n ** p * math.exp(-s_n)

"""Convex conjugates of exponential sums and of the box free energy.

The conjugate f*(u) = sup_y [y u - f(y)] of f(y) = sum_n exp(sigma_n y)
is finite exactly on u >= 0.  Regimes:

* u < 0: +inf;
* u = 0: 0 (the infimum of f is 0, approached as y -> -inf, not attained);
* 0 < u < gamma: the sup is attained at the unique interior y with
  f'(y) = u, found by bracketed monotone root finding;
* u = gamma < inf: attained at the domain edge -alpha;
* u > gamma (finite gamma): f* is affine with slope -alpha,
  f*(u) = -alpha u - f(-alpha), the sup being attained at the edge.

All infinite values are genuine IEEE infinities paired with an explicit
regime tag; no finite sentinels are used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from scipy.optimize import brentq

from .sequences import Family, SigmaSequence, quadratic, sigma
from .series import (
    BoundaryClass,
    BudgetExceededError,
    DomainError,
    DomainInfo,
    domain_info,
    eval_series,
    log_f,
    phi,
)

__all__ = [
    "Regime",
    "ConjugateValue",
    "NumericError",
    "exp_conjugate",
    "conjugate",
    "log_f_conjugate",
    "box_conjugate",
    "solve_fprime",
    "solve_phi",
    "BOUNDARY_CAP",
]

# closest approach to an open domain edge when bracketing toward it
BOUNDARY_CAP = 1e-12


class NumericError(RuntimeError):
    """Root finding or bracketing failed; the message carries diagnostics."""


class Regime(str, Enum):
    NEGATIVE_U = "NegativeU"
    ZERO = "Zero"
    INTERIOR = "Interior"
    BOUNDARY_GAMMA = "BoundaryGamma"
    PLATEAU = "Plateau"
    INFINITE = "Infinite"


@dataclass(frozen=True)
class ConjugateValue:
    """f*(u) with its regime tag and, when the sup is attained, the argmax.

    ``residual`` is the achieved |f'(attaining_y) - u| for interior
    solutions (nonzero when the optimizer was capped at an open edge).
    """

    value: float
    regime: Regime
    attaining_y: Optional[float] = None
    residual: Optional[float] = None


def exp_conjugate(u: float) -> float:
    """Conjugate of exp: +inf for u < 0, u*(ln u - 1) for u >= 0 (0 ln 0 = 0)."""
    if u < 0:
        return math.inf
    if u == 0:
        return 0.0
    return u * (math.log(u) - 1.0)


# ---------------------------------------------------------------------------
# Bracketed monotone inversion
# ---------------------------------------------------------------------------

def _expand_bracket(
    fn: Callable[[float], float],
    target: float,
    alpha: float,
    open_edge: bool,
) -> tuple[float, float, Optional[float]]:
    """Bracket the root of fn(y) = target on (-inf, -alpha).

    ``fn`` must be increasing with limit below target at -inf.  Returns
    (a, b) with fn(a) <= target <= fn(b), or (a, b, capped_value) when an
    open edge stops the rightward search at -alpha - BOUNDARY_CAP.
    """
    dist = 1.0
    a = -alpha - dist
    for _ in range(80):
        if fn(a) <= target:
            break
        dist *= 2.0
        a = -alpha - dist
    else:
        raise NumericError(
            f"left bracket expansion failed: fn({a!r}) still above {target!r}"
        )
    h = dist / 2.0
    b = -alpha - h
    for _ in range(200):
        fb = fn(b)
        if fb >= target:
            return a, b, None
        if open_edge and h <= BOUNDARY_CAP:
            return a, b, fb
        h = max(h / 2.0, BOUNDARY_CAP if open_edge else h / 2.0)
        b = -alpha - h
    raise NumericError(
        f"right bracket expansion failed near the edge -{alpha:g} "
        f"(target {target!r}, last fn={fb!r})"
    )


def _mid_or_best(seq: SigmaSequence, y: float, p: int, tol: float, max_terms) -> float:
    """Best-effort midpoint: on budget exhaustion, the widest bracket's.

    Used only while bracketing and iterating; the solvers re-certify the
    final answer strictly.
    """
    try:
        return eval_series(seq, y, p, tol=tol, max_terms=max_terms).midpoint
    except BudgetExceededError as exc:
        return exc.best.midpoint


def solve_fprime(
    seq: SigmaSequence,
    u: float,
    tol: float = 1e-12,
    max_terms: Optional[int] = None,
) -> tuple[float, float]:
    """Solve f'(y) = u on the domain interior; returns (y, residual).

    f' is strictly increasing from 0 to gamma, so geometric bracket
    expansion followed by Brent iteration is sound.  Probes closer to a
    slow boundary than the budget allows degrade to their best bracket
    midpoint; the returned root is re-certified strictly, so the final
    residual satisfies |f'(y) - u| <= tol*max(1, u) or an error is
    raised.
    """
    di = domain_info(seq)
    eta = 0.25 * tol * max(1.0, u)

    def fp(y: float) -> float:
        return _mid_or_best(seq, y, 1, eta, max_terms)

    open_edge = di.boundary_class is BoundaryClass.OPEN_BOUNDARY
    a, b, capped = _expand_bracket(fp, u, di.alpha, open_edge)
    if capped is not None:
        return b, abs(capped - u)
    y = float(brentq(lambda yy: fp(yy) - u, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=300))
    final = eval_series(seq, y, 1, tol=eta, max_terms=max_terms)
    residual = abs(final.midpoint - u) + 0.5 * final.tail_bound
    if residual > tol * max(1.0, u):
        raise NumericError(
            f"root residual {residual:g} exceeds {tol * max(1.0, u):g} "
            f"for f'(y)={u!r} on {seq.spec_string()} (y={y!r}, bracket=({a!r},{b!r}))"
        )
    return y, residual


def solve_phi(
    seq: SigmaSequence,
    v: float,
    tol: float = 1e-12,
    max_terms: Optional[int] = None,
) -> tuple[float, float]:
    """Solve f'(y)/f(y) = v on the domain interior; returns (y, residual)."""
    di = domain_info(seq)
    rel = max(1e-15, 0.125 * tol * max(1.0, v) / max(v, 1e-300))

    def ph_best(y: float) -> float:
        f0 = _mid_or_best(seq, y, 0, 1.0, max_terms)
        g0 = _mid_or_best(seq, y, 1, 1.0, max_terms)
        if f0 <= 0.0 or g0 <= 0.0:
            raise NumericError(f"series underflows at y={y!r} while bracketing")
        num = _mid_or_best(seq, y, 1, 0.25 * rel * g0, max_terms)
        den = _mid_or_best(seq, y, 0, 0.25 * rel * f0, max_terms)
        return num / den

    open_edge = di.boundary_class is not BoundaryClass.CLOSED_FINITE_SLOPE
    a, b, capped = _expand_bracket(ph_best, v, di.alpha, open_edge)
    if capped is not None:
        return b, abs(capped - v)
    y = float(
        brentq(lambda yy: ph_best(yy) - v, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=300)
    )
    residual = abs(phi(seq, y, tol=rel, max_terms=max_terms) - v) + 0.5 * rel * v
    if residual > tol * max(1.0, v):
        raise NumericError(
            f"ratio residual {residual:g} exceeds {tol * max(1.0, v):g} "
            f"for phi(y)={v!r} on {seq.spec_string()} (y={y!r})"
        )
    return y, residual


# ---------------------------------------------------------------------------
# Conjugates
# ---------------------------------------------------------------------------

def conjugate(
    seq: SigmaSequence,
    u: float,
    tol: float = 1e-9,
    max_terms: Optional[int] = None,
) -> ConjugateValue:
    """f*(u) with regime dispatch; see the module docstring for the cases."""
    di = domain_info(seq)
    if di.empty:
        raise DomainError("conjugate undefined for an empty domain", di)
    if u < 0:
        return ConjugateValue(math.inf, Regime.NEGATIVE_U)
    if u == 0:
        return ConjugateValue(0.0, Regime.ZERO)
    if math.isfinite(di.gamma):
        edge_value = -di.alpha * u - di.f_at_boundary
        if u > di.gamma + di.gamma_err:
            return ConjugateValue(edge_value, Regime.PLATEAU, attaining_y=-di.alpha)
        if u >= di.gamma - di.gamma_err:
            return ConjugateValue(edge_value, Regime.BOUNDARY_GAMMA, attaining_y=-di.alpha)
    y, residual = solve_fprime(seq, u, tol=tol, max_terms=max_terms)
    f_here = eval_series(
        seq, y, 0, tol=0.25 * tol * max(1.0, u), max_terms=max_terms
    ).midpoint
    return ConjugateValue(y * u - f_here, Regime.INTERIOR, attaining_y=y, residual=residual)


def log_f_conjugate(
    seq: SigmaSequence,
    v: float,
    tol: float = 1e-9,
    max_terms: Optional[int] = None,
) -> float:
    """Conjugate of ln f: sup_y [v y - ln f(y)].

    +inf below the smallest exponent, 0 at it (lower-semicontinuous
    limit for a simple minimal level), v*y - ln f(y) at the interior
    solution of f'/f = v above it.  When the ratio range is bounded
    (finite-slope closed edge), values beyond the range lie on the
    affine piece attained at the edge.
    """
    di = domain_info(seq)
    if di.empty:
        raise DomainError("conjugate undefined for an empty domain", di)
    s_min = sigma(seq, seq.start_index)
    if v < s_min:
        return math.inf
    if v <= s_min + 1e-13 * max(1.0, s_min):
        return 0.0
    if di.boundary_class is BoundaryClass.CLOSED_FINITE_SLOPE:
        ratio_sup = di.gamma / di.f_at_boundary
        if v >= ratio_sup:
            return -di.alpha * v - math.log(di.f_at_boundary)
    y, _ = solve_phi(seq, v, tol=tol, max_terms=max_terms)
    return v * y - log_f(seq, y, tol=0.25 * tol * max(1.0, v), max_terms=max_terms)


def box_conjugate(u: float, v: float, tol: float = 1e-9) -> float:
    """Conjugate of the box free energy h(x, y) = e^x (sum_k e^{y k^2})^3.

    Case table over (u, v): +inf when u < 0, v < 0, or 0 <= v < 3u;
    0 when u = 0 <= v; and u(ln u - 1) + 3u (ln f)*(v/(3u)) on the cone
    v >= 3u > 0, with f the unit quadratic series.
    """
    if u < 0 or v < 0:
        return math.inf
    if u == 0:
        return 0.0
    if v < 3.0 * u:
        return math.inf
    lf = log_f_conjugate(quadratic(), v / (3.0 * u), tol=tol)
    return u * (math.log(u) - 1.0) + 3.0 * u * lf

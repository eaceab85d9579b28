"""Countable maximum-entropy problems with Gibbs-form solutions.

Minimizes sum_n w_n (ln w_n - 1) over nonnegative weights under one
moment constraint (sum sigma_n w_n = u) or two (additionally
sum w_n = u with energy v).  Attained minimizers are exponential-family
laws w_n = exp(x + sigma_n y); when the infimum is not attained (the
affine plateau of the conjugate, or sign-alternating constraints away
from the attainment point) finite-support eps-optimal witnesses are
constructed explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .conjugate import conjugate, solve_fprime, solve_phi
from .sequences import (
    Family,
    SigmaSequence,
    VarsigmaSequence,
    box_levels,
    linear,
    sigma,
    sigma_values,
    varsigma_power,
)
from .series import (
    BoundaryClass,
    DomainError,
    domain_info,
    eval_series,
    log_f,
    max_terms_budget,
    tail_bound_after,
)

__all__ = [
    "FitStatus",
    "GibbsFit",
    "PlateauWitness",
    "AlternatingAttainment",
    "AlternatingWitness",
    "InfeasibleError",
    "WitnessBudgetError",
    "min_entropy_moment",
    "fit_gibbs",
    "plateau_witness",
    "alternating_attainment",
    "alternating_witness",
    "gibbs_ratio",
]

_PREFIX_CAP = 65536  # largest materialized weight prefix


class InfeasibleError(ValueError):
    """No nonnegative weights can satisfy the requested constraints."""


class WitnessBudgetError(RuntimeError):
    """Witness search hit its budget; ``best`` holds the closest result (may be None)."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class FitStatus(str, Enum):
    INTERIOR_UNIQUE = "InteriorUnique"
    BOUNDARY_SINGLETON = "BoundarySingleton"
    PLATEAU_NON_ATTAINED = "PlateauNonAttained"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class GibbsFit:
    """Result of an entropy minimization.

    For attained fits the law is w_n = exp(dual_x + sigma_n dual_y)
    (dual_x absent for the single-constraint problem); ``indices`` and
    ``weights`` materialize a prefix, with certified bounds on the mass
    and energy carried by the un-materialized tail.  ``achieved`` holds
    the full-law moments (mass, energy).
    """

    status: FitStatus
    dual_x: Optional[float] = None
    dual_y: Optional[float] = None
    indices: tuple = ()
    weights: Optional[np.ndarray] = field(default=None, compare=False)
    tail_mass: float = 0.0
    tail_energy: float = 0.0
    achieved: tuple[Optional[float], Optional[float]] = (None, None)
    entropy_value: float = math.nan
    reason: str = ""


def _materialize(
    seq: SigmaSequence,
    x: float,
    y: float,
    tail_target: float,
) -> tuple[tuple, np.ndarray, float, float]:
    """Weight prefix exp(x + sigma_n y) with certified tail mass/energy."""
    scale = math.exp(x)
    if seq.family is Family.BOX:
        return _materialize_box(seq, scale, y, tail_target)
    start = seq.start_index
    n = start + 31
    mass_t = energy_t = math.inf
    while True:
        m = tail_bound_after(seq, y, 0, n)
        e = tail_bound_after(seq, y, 1, n)
        if m is not None and e is not None:
            mass_t, energy_t = scale * m, scale * e
            if max(mass_t, energy_t) <= tail_target:
                break
        if n - start + 1 >= _PREFIX_CAP:
            break
        n = min(2 * n, start + _PREFIX_CAP - 1)
    ns = np.arange(start, n + 1, dtype=np.int64)
    w = scale * np.exp(sigma_values(seq, ns) * y)
    keep = max(int(np.searchsorted(w == 0.0, True)), 1)  # drop underflowed tail
    return tuple(int(i) for i in ns[:keep]), w[:keep], mass_t, energy_t


def _materialize_box(
    seq: SigmaSequence,
    scale: float,
    y: float,
    tail_target: float,
) -> tuple[tuple, np.ndarray, float, float]:
    from .series import _box_level_tail  # complete-level tail certificate

    kappa = seq.kappa
    s_max = 8
    mass_t = energy_t = math.inf
    while True:
        m = _box_level_tail(kappa, y, 0, s_max)
        e = _box_level_tail(kappa, y, 1, s_max)
        if m is not None and e is not None:
            mass_t, energy_t = scale * m, scale * e
            if max(mass_t, energy_t) <= tail_target:
                break
        if s_max >= 4096:
            break
        s_max *= 2
    triples, levels = box_levels(s_max)
    w = scale * np.exp(kappa * levels.astype(np.float64) * y)
    return tuple(triples), w, mass_t, energy_t


# ---------------------------------------------------------------------------
# Moment-constrained minimization
# ---------------------------------------------------------------------------

def min_entropy_moment(
    seq: SigmaSequence,
    u: float,
    tol: float = 1e-9,
    max_terms: Optional[int] = None,
) -> GibbsFit:
    """Minimize sum w_n (ln w_n - 1) subject to sum sigma_n w_n = u.

    The optimal value equals the conjugate of the exponential sum at u
    for every u >= 0; the minimum is attained exactly for u up to the
    boundary slope gamma (weights exp(sigma_n y) with f'(y) = u, all
    zero at u = 0), and for u beyond a finite gamma the infimum is an
    affine plateau that no summable law attains.
    """
    di = domain_info(seq)
    if di.empty:
        raise DomainError("entropy problem undefined for an empty domain", di)
    if u < 0:
        return GibbsFit(
            status=FitStatus.INFEASIBLE,
            reason=f"target moment {u!r} is negative; weights are nonnegative",
        )
    if u == 0:
        return GibbsFit(
            status=FitStatus.INTERIOR_UNIQUE,
            achieved=(0.0, 0.0),
            entropy_value=0.0,
            reason="zero moment forces the all-zero law",
        )
    if math.isfinite(di.gamma):
        if u > di.gamma + di.gamma_err:
            value = -di.alpha * u - di.f_at_boundary
            return GibbsFit(
                status=FitStatus.PLATEAU_NON_ATTAINED,
                entropy_value=value,
                achieved=(None, u),
                reason="moment exceeds the boundary slope; infimum not attained",
            )
        if u >= di.gamma - di.gamma_err:
            y = -di.alpha
            idx, w, t0, t1 = _materialize(seq, 0.0, y, tol * max(1.0, u))
            return GibbsFit(
                status=FitStatus.INTERIOR_UNIQUE,
                dual_y=y,
                indices=idx,
                weights=w,
                tail_mass=t0,
                tail_energy=t1,
                achieved=(di.f_at_boundary, di.gamma),
                entropy_value=-di.alpha * di.gamma - di.f_at_boundary,
            )
    y, _ = solve_fprime(seq, u, tol=tol, max_terms=max_terms)
    f_mid = eval_series(seq, y, 0, tol=0.25 * tol * max(1.0, u), max_terms=max_terms).midpoint
    g_mid = eval_series(seq, y, 1, tol=0.25 * tol * max(1.0, u), max_terms=max_terms).midpoint
    idx, w, t0, t1 = _materialize(seq, 0.0, y, tol * max(1.0, u))
    return GibbsFit(
        status=FitStatus.INTERIOR_UNIQUE,
        dual_y=y,
        indices=idx,
        weights=w,
        tail_mass=t0,
        tail_energy=t1,
        achieved=(f_mid, g_mid),
        entropy_value=y * g_mid - f_mid,
    )


def fit_gibbs(
    seq: SigmaSequence,
    u: float,
    v: float,
    tol: float = 1e-9,
    max_terms: Optional[int] = None,
) -> GibbsFit:
    """Minimize entropy subject to sum w_n = u and sum sigma_n w_n = v.

    Dispatch on the energy-per-mass ratio rho = v/u: interior ratios give
    the unique law exp(x + sigma_n y) with f'(y)/f(y) = rho and
    x = ln u - ln f(y); the minimal ratio puts all mass on the lowest
    level (a solution no multiplier pair produces); ratios below it are
    infeasible.  For a finite-slope closed edge, ratios beyond the
    attainable range leave a finite but non-attained infimum.
    """
    di = domain_info(seq)
    if di.empty:
        raise DomainError("entropy problem undefined for an empty domain", di)
    if u < 0 or v < 0:
        return GibbsFit(
            status=FitStatus.INFEASIBLE,
            reason=f"moments ({u!r}, {v!r}) outside the nonnegative cone",
        )
    if u == 0:
        if v == 0:
            return GibbsFit(
                status=FitStatus.INTERIOR_UNIQUE,
                achieved=(0.0, 0.0),
                entropy_value=0.0,
                reason="zero mass and energy force the all-zero law",
            )
        return GibbsFit(
            status=FitStatus.INFEASIBLE,
            achieved=(0.0, None),
            reason=(
                "zero mass forces all weights to zero, so no positive energy is "
                "representable (the conjugate still evaluates to 0 there)"
            ),
        )
    s_min = sigma(seq, seq.start_index)
    rho = v / u
    sing_tol = 1e-12 * max(1.0, s_min)
    if rho < s_min - sing_tol:
        return GibbsFit(
            status=FitStatus.INFEASIBLE,
            reason=(
                f"energy/mass ratio {rho:g} below the minimal exponent {s_min:g}; "
                f"feasible ratios lie in [{s_min:g}, sup f'/f)"
            ),
        )
    if rho <= s_min + sing_tol:
        # unique minimal level carries everything; not a Gibbs law
        idx = (seq.start_index,) if seq.family is not Family.BOX else ((1, 1, 1),)
        return GibbsFit(
            status=FitStatus.BOUNDARY_SINGLETON,
            indices=idx,
            weights=np.array([u]),
            achieved=(u, u * s_min),
            entropy_value=u * (math.log(u) - 1.0),
            reason="ratio at the minimal exponent: all mass on the ground level",
        )
    if di.boundary_class is BoundaryClass.CLOSED_FINITE_SLOPE:
        ratio_sup = di.gamma / di.f_at_boundary
        ratio_err = (
            di.gamma_err / di.f_at_boundary
            + di.gamma * di.f_boundary_err / di.f_at_boundary ** 2
        )
        if rho > ratio_sup + ratio_err:
            value = u * (math.log(u) - 1.0) - di.alpha * v - u * math.log(di.f_at_boundary)
            return GibbsFit(
                status=FitStatus.PLATEAU_NON_ATTAINED,
                entropy_value=value,
                achieved=(u, v),
                reason="ratio beyond the attainable range; infimum not attained",
            )
        if rho >= ratio_sup - ratio_err:
            y = -di.alpha
            x = math.log(u) - math.log(di.f_at_boundary)
            idx, w, t0, t1 = _materialize(seq, x, y, tol * max(1.0, u))
            return GibbsFit(
                status=FitStatus.INTERIOR_UNIQUE,
                dual_x=x,
                dual_y=y,
                indices=idx,
                weights=w,
                tail_mass=t0,
                tail_energy=t1,
                achieved=(u, u * ratio_sup),
                entropy_value=u * (x - 1.0) + y * u * ratio_sup,
            )
    y, _ = solve_phi(seq, rho, tol=tol, max_terms=max_terms)
    lf = log_f(seq, y, tol=min(0.25 * tol, 1e-13), max_terms=max_terms)
    x = math.log(u) - lf
    g_mid = eval_series(seq, y, 1, tol=0.25 * tol * max(1.0, v), max_terms=max_terms).midpoint
    v_ach = math.exp(x) * g_mid
    idx, w, t0, t1 = _materialize(seq, x, y, tol * max(1.0, u))
    return GibbsFit(
        status=FitStatus.INTERIOR_UNIQUE,
        dual_x=x,
        dual_y=y,
        indices=idx,
        weights=w,
        tail_mass=t0,
        tail_energy=t1,
        achieved=(u, v_ach),
        entropy_value=u * (x - 1.0) + y * v_ach,
    )


# ---------------------------------------------------------------------------
# Plateau witnesses (finite support, moment exact, entropy near-optimal)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlateauWitness:
    """Finite-support weights for a non-attained plateau infimum.

    Prefix indices carry the boundary law exp(-sigma_k alpha); window
    indices carry exp(-sigma_k lam) with lam in (0, alpha) chosen so the
    moment matches exactly (the last window weight absorbs the float
    residual).  ``gap`` = entropy - target where target is the conjugate
    value at u.
    """

    indices: np.ndarray = field(compare=False)
    weights: np.ndarray = field(compare=False)
    entropy: float = math.nan
    target: float = math.nan
    gap: float = math.nan
    lam: float = math.nan
    n_prefix: int = 0
    window_len: int = 0
    lam_history: tuple[float, ...] = ()
    gap_history: tuple[float, ...] = ()


def plateau_witness(
    seq: SigmaSequence,
    u: float,
    eps: float,
    max_terms: Optional[int] = None,
    n_prefix: Optional[int] = None,
) -> PlateauWitness:
    """eps-optimal finite weights for the plateau regime u >= gamma.

    Requires a finite boundary slope (gamma < inf).  The prefix sits at
    the boundary multiplier alpha; a window of q further terms runs at a
    smaller multiplier lam_q solving sum_window sigma_k exp(-sigma_k lam)
    = u - prefix moment, and q grows until the measured entropy gap
    drops below eps.  The gap of this construction (indeed of any
    finite-support witness for these slowly decaying exponents) shrinks
    only like 1/log(support), so small eps values exhaust any realistic
    budget: the search then raises WitnessBudgetError carrying the best
    witness found.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    di = domain_info(seq)
    if not math.isfinite(di.gamma):
        raise ValueError(
            f"{seq.spec_string()} has an infinite boundary slope: every moment "
            "is attained and no plateau exists"
        )
    if u < di.gamma - di.gamma_err:
        raise ValueError(
            f"moment {u!r} is below the boundary slope {di.gamma:g}; "
            "the minimum is attained, use min_entropy_moment"
        )
    budget = max_terms_budget(max_terms)
    alpha = di.alpha
    start = seq.start_index
    target = conjugate(seq, u).value

    # smallest admissible prefix end: first index whose exponent reaches u
    n_bar = start
    while sigma(seq, n_bar) < u:
        n_bar += 1
    n_end = max(n_prefix if n_prefix is not None else n_bar, n_bar)

    ks_prefix = np.arange(start, n_end + 1, dtype=np.int64)
    s_prefix = sigma_values(seq, ks_prefix)
    w_prefix = np.exp(-s_prefix * alpha)
    prefix_moment = float(np.sum(s_prefix * w_prefix))
    prefix_entropy = float(np.sum(w_prefix * (np.log(w_prefix) - 1.0)))
    v_window = u - prefix_moment
    if v_window <= 0:
        raise ValueError(
            f"prefix through n={n_end} already carries moment {prefix_moment:g} "
            f">= u={u!r}; decrease n_prefix"
        )

    lam_hist: list[float] = []
    gap_hist: list[float] = []
    best: Optional[PlateauWitness] = None
    q = 1024
    while True:
        q = min(q, budget - (n_end - start + 1))
        if q < 1:
            break
        ks = np.arange(n_end + 1, n_end + q + 1, dtype=np.int64)
        s = sigma_values(seq, ks)

        def window_moment(lam: float) -> float:
            return float(np.sum(s * np.exp(-s * lam)))

        hi = alpha  # window at alpha carries less than v_window (u > gamma)
        lo = alpha / 2.0
        while window_moment(lo) < v_window:
            lo /= 2.0
            if lo < 1e-14:
                raise WitnessBudgetError("window equation has no root above 1e-14", best)
        lam = float(
            brentq(lambda l: window_moment(l) - v_window, lo, hi, xtol=1e-14, rtol=8.9e-16)
        )
        w = np.exp(-s * lam)
        moment = prefix_moment + float(np.sum(s * w))
        w[-1] += (u - moment) / s[-1]  # exact moment, float-level
        entropy = prefix_entropy + float(np.sum(w * (np.log(w) - 1.0)))
        gap = entropy - target
        lam_hist.append(lam)
        gap_hist.append(gap)
        wit = PlateauWitness(
            indices=np.concatenate([ks_prefix, ks]),
            weights=np.concatenate([w_prefix, w]),
            entropy=entropy,
            target=target,
            gap=gap,
            lam=lam,
            n_prefix=n_end,
            window_len=q,
            lam_history=tuple(lam_hist),
            gap_history=tuple(gap_hist),
        )
        if best is None or wit.gap < best.gap:
            best = wit
        if gap <= eps:
            return wit
        if (n_end - start + 1) + q >= budget:
            break
        q *= 2
    achieved = f"{best.gap:g}" if best is not None else "none"
    raise WitnessBudgetError(
        f"witness gap {achieved} did not reach eps={eps:g} within {budget} terms "
        f"(the gap of this construction decays like 1/log(terms))",
        best,
    )


# ---------------------------------------------------------------------------
# Sign-alternating second constraint
# ---------------------------------------------------------------------------

def gibbs_ratio(u: float) -> float:
    """Weight ratio of the unit-gap Gibbs law with energy u.

    The law (ratio)^n solves the single-moment problem for sigma_n = n;
    the ratio is the root in (0,1) of u z^2 - (2u+1) z + u = 0.
    """
    if not u > 0:
        raise ValueError("ratio defined for u > 0")
    return (1.0 + 2.0 * u - math.sqrt(4.0 * u + 1.0)) / (2.0 * u)


@dataclass(frozen=True)
class AlternatingAttainment:
    """Attainment classification for the alternating second moment.

    The infimum with constraints (sum n w_n = u, sum (-1)^n vs_n w_n = v)
    is attained iff the alternating series over the Gibbs law converges
    and v equals its sum ``value``.
    """

    convergent: bool
    value: Optional[float]
    ratio: float
    alpha_threshold: Optional[float] = None  # exp family: convergent iff alpha < this


def alternating_attainment(
    u: float,
    varsigma: VarsigmaSequence,
    tol: float = 1e-12,
) -> AlternatingAttainment:
    """Classify convergence of sum (-1)^n varsigma_n ratio^n and sum it."""
    q = gibbs_ratio(u)
    fam = varsigma.family.value
    if fam == "expsq":
        return AlternatingAttainment(False, None, q)
    if fam == "exp":
        threshold = -math.log(q)
        if varsigma.param >= threshold:
            return AlternatingAttainment(False, None, q, alpha_threshold=threshold)
        w = -math.exp(varsigma.param) * q
        return AlternatingAttainment(True, w / (1.0 - w), q, alpha_threshold=threshold)
    # power coefficients: geometric decay of |terms| makes the sum certifiable
    k = varsigma.param
    total = 0.0
    N = 0
    block = 64
    while True:
        ns = np.arange(N + 1, N + block + 1, dtype=np.float64)
        total += float(np.sum(np.where(ns % 2 == 0, 1.0, -1.0) * ns ** k * q ** ns))
        N += block
        r = q * ((N + 2.0) / (N + 1.0)) ** k
        if r < 1.0:
            tail = (N + 1.0) ** k * q ** (N + 1) / (1.0 - r)
            if tail <= tol:
                return AlternatingAttainment(True, total, q)
        if N > 10_000_000:
            raise WitnessBudgetError("alternating sum did not certify")
        block *= 2


@dataclass(frozen=True)
class AlternatingWitness:
    """Finite weights meeting the alternating two-moment constraints.

    Prefix 1..n_prefix carries the Gibbs law ratio^n; indices (m, m+1)
    carry the exact two-term correction absorbing the residual moments.
    Entropy is within ``gap`` <= eps of the conjugate value at u.

    The constraints hold exactly in real arithmetic; the measured float
    residuals are only meaningful relative to ``signed_scale``, the
    largest |vs_i * w_i| term (enormous for the doubly-exponential
    coefficients, where the signed check is ill-conditioned by nature).
    """

    indices: np.ndarray = field(compare=False)
    weights: np.ndarray = field(compare=False)
    entropy: float = math.nan
    target: float = math.nan
    gap: float = math.nan
    n_prefix: int = 0
    window_start: int = 0
    moment_residuals: tuple[float, float] = (0.0, 0.0)
    signed_scale: float = 1.0


def alternating_witness(
    u: float,
    v: float,
    eps: float,
    varsigma: Optional[VarsigmaSequence] = None,
    max_index: int = 10_000_000_000,
) -> AlternatingWitness:
    """eps-optimal weights with sum n w_n = u, sum (-1)^n vs_n w_n = v.

    Every real v is reachable at entropy cost approaching the
    single-constraint optimum: a long-enough Gibbs prefix brings the
    entropy within eps/2, and a two-term far-tail correction with
    vanishing weights fixes both moments at nonpositive entropy cost.
    """
    if varsigma is None:
        varsigma = varsigma_power(2.0)
    if not eps > 0:
        raise ValueError("eps must be positive")
    if u < 0:
        raise InfeasibleError("mass-moment u must be nonnegative")
    if u == 0:
        if v == 0:
            return AlternatingWitness(
                indices=np.empty(0, dtype=np.int64),
                weights=np.empty(0),
                entropy=0.0,
                target=0.0,
                gap=0.0,
            )
        raise InfeasibleError(
            "u = 0 forces all weights to zero, so v must be 0 "
            "(no finite witness exists although the conjugate value is 0)"
        )

    q = gibbs_ratio(u)
    target = conjugate(linear(), u).value

    # prefix long enough that the omitted entropy tail is below eps/2
    n_pref = max(4, math.ceil(2.0 * q / (1.0 - q)))
    while True:
        t_next = q ** (n_pref + 1) * ((n_pref + 1) * (-math.log(q)) + 1.0)
        r = q * (1.0 + 1.0 / (n_pref + 1))
        if r < 1.0 and t_next / (1.0 - r) <= eps / 2.0:
            break
        n_pref += max(1, n_pref // 4)
    ks = np.arange(1, n_pref + 1, dtype=np.float64)
    w_pref = q ** ks
    # residual moments of the omitted tail: closed form for the mass
    # moment, direct alternating sum for the signed one
    u_resid = q ** (n_pref + 1) * ((n_pref + 1) - n_pref * q) / (1.0 - q) ** 2
    v_resid = v - float(
        np.sum(np.where(ks % 2 == 0, 1.0, -1.0) * varsigma.values(ks) * w_pref)
    )

    # two-term correction at (m, m+1): admissible once u' vs_k >= k |v'|
    def admissible(m: int) -> bool:
        if v_resid == 0.0:
            return True
        bound = math.log(abs(v_resid) / u_resid)
        return all(
            varsigma.log_value(k) >= math.log(k) + bound for k in (m, m + 1)
        )

    m = n_pref + 1
    while not admissible(m):
        m = max(m + 1, int(m * 1.5))
        if m > max_index:
            raise WitnessBudgetError(
                f"no admissible correction index below {max_index}"
            )
    # normalized by vs_{m+1} to stay finite for the exponential families
    s_m = -1.0 if m % 2 else 1.0  # (-1)^m
    rho = math.exp(varsigma.log_value(m) - varsigma.log_value(m + 1))
    v_over = v_resid * math.exp(-varsigma.log_value(m + 1))
    den = m + (m + 1.0) * rho
    g_m = (u_resid + s_m * (m + 1.0) * v_over) / den
    g_m1 = (u_resid * rho - s_m * m * v_over) / den
    if g_m < -1e-18 or g_m1 < -1e-18:
        raise WitnessBudgetError(
            f"correction weights negative at m={m}: ({g_m:g}, {g_m1:g})"
        )
    g_m, g_m1 = max(g_m, 0.0), max(g_m1, 0.0)

    idx = np.concatenate([ks.astype(np.int64), np.array([m, m + 1], dtype=np.int64)])
    wts = np.concatenate([w_pref, np.array([g_m, g_m1])])
    nz = wts > 0.0
    entropy = float(np.sum(wts[nz] * (np.log(wts[nz]) - 1.0)))
    mass_mom = math.fsum(float(i) * float(w) for i, w in zip(idx, wts))
    terms = []
    for i, w in zip(idx, wts):
        if w > 0.0:
            t = math.exp(math.log(w) + varsigma.log_value(int(i)))
            terms.append(t if i % 2 == 0 else -t)
    signed = math.fsum(terms)
    scale = max([1.0] + [abs(t) for t in terms])
    return AlternatingWitness(
        indices=idx,
        weights=wts,
        entropy=entropy,
        target=target,
        gap=entropy - target,
        n_prefix=n_pref,
        window_start=m,
        moment_residuals=(mass_mom - u, signed - v),
        signed_scale=scale,
    )

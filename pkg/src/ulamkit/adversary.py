"""Worst-case perturbations that attain the sharp stability constant.

The extremal forcing points each f_n along a fixed unit vector u with the
phase of the series term E_n flipped away:

    f_n = (|E_n| / E_n) * u * eps   when E_n != 0, else 0.

The bounded response to that forcing satisfies

    ||x_1|| = eps * (1/|V|) * sum_{s=1}^{S} |E_s|,

so with enough terms the attained ratio ||x_1|| / eps approaches the sharp
constant from below while the trajectory stays bounded and its nearest exact
solution is the zero solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import ConstantResult, tail_bound
from .errors import DegenerateRoots, MissingForcing, NotApplicable, NotUlamStable
from .recurrence import (
    Field,
    Forcing,
    Norm,
    RecurrenceSpec,
    RootSet,
    SpectralClass,
    Trajectory,
    sequence_norms,
    vector_norm,
)
from .shadowing import shadow_coefficients
from .vandermonde import VandermondeData, alternating_terms, series_response

__all__ = [
    "SharpnessReport",
    "worst_forcing",
    "worst_trajectory",
    "sharpness_experiment",
]

# Series terms below this fraction of their summand scale are cancellation
# residue; they take the zero branch instead of a meaningless phase.
_ZERO_TERM = 1e-14

# Ceiling on the window used to certify that the worst trajectory shadows to
# zero coefficients.
_MAX_WINDOW = 5000


@dataclass(frozen=True)
class SharpnessReport:
    """Outcome of one attainment experiment."""

    achieved_ratio: float
    kr_value: float
    gap: float
    horizon: int
    tail_budget: float
    sup_window: float
    shadow_coefficient_norm: float


def worst_forcing(
    data: VandermondeData,
    eps: float,
    u: np.ndarray,
    horizon: int,
    norm: Norm = Norm.SUP,
    zero_tol: float = _ZERO_TERM,
) -> Forcing:
    """Extremal forcing f_0..f_{horizon}, phase-aligned against the series.

    u must have unit norm. Indices where |E_n| falls at or below zero_tol
    times sum_k |reduced_k| |r_k|^(-n) carry cancellation residue, not a
    phase; they get the zero vector, so every entry has norm 0 or eps. The
    alternating sum at index 0 cancels identically for order >= 2, which
    keeps the leading entry zero there without a special case.
    """
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    if abs(vector_norm(u, norm) - 1.0) > 1e-9:
        raise ValueError("u must have unit norm")
    terms = alternating_terms(data, 0, horizon + 1)
    weights = np.abs(data.reduced)
    moduli = np.abs(data.roots)
    values = np.zeros((horizon + 1, len(u)), dtype=complex)
    for n, term in enumerate(terms):
        mag = abs(term)
        floor = zero_tol * float(weights @ moduli ** (-float(n)))
        if mag > floor:
            values[n] = (np.conj(term) / mag) * u * eps
    return Forcing.from_values(values, norm=norm)


def worst_trajectory(
    spec: RecurrenceSpec,
    roots: RootSet,
    data: VandermondeData,
    forcing: Forcing,
    n_steps: int,
) -> Trajectory:
    """Bounded response x_n = ((-1)^p / V) sum_s E_s f_{n+s-1}.

    The forcing must cover at least n_steps indices; later indices use the
    shorter remaining series, which is exactly the response to the
    zero-extended forcing, so residuals reproduce the forcing on the overlap
    window.
    """
    _require_all_outside(roots)
    if forcing.length < n_steps:
        raise MissingForcing(
            f"forcing covers {forcing.length} indices, need >= {n_steps}"
        )
    values = series_response(data, forcing.values, n_steps)
    return Trajectory(values=values)


def _require_all_outside(roots: RootSet) -> None:
    if roots.on_unit_circle:
        raise NotUlamStable("a characteristic root lies on the unit circle")
    if roots.classification is SpectralClass.NEAR_DEGENERATE:
        raise DegenerateRoots("near-degenerate roots")
    if roots.classification is not SpectralClass.ALL_OUTSIDE_UNIT_DISC:
        raise NotApplicable(
            "worst-case construction requires every root outside the unit disc"
        )


def _zero_shadow_window(roots: RootSet, data: VandermondeData) -> int:
    """Window length that pushes coefficient truncation error below 1e-9*eps."""
    moduli = roots.moduli
    weights = (np.abs(data.reduced) / abs(data.det)) / (moduli - 1.0)
    needed = 0
    for w, rho in zip(weights, moduli):
        if w <= 0:
            continue
        steps = math.log(max(w, 1e-300) * 1e9) / math.log(rho)
        needed = max(needed, int(math.ceil(steps)))
    return min(_MAX_WINDOW, max(needed, 0) + 2 * roots.order + 4)


def sharpness_experiment(
    spec: RecurrenceSpec,
    roots: RootSet,
    data: VandermondeData,
    best: ConstantResult,
    eps: float,
    tol: float,
    u: np.ndarray | None = None,
) -> SharpnessReport:
    """Drive the worst forcing and measure the attained ratio ||x_1|| / eps.

    The series horizon S is the shortest one whose tail bound fits within
    tol * best.value, which pins the ratio inside
    [(1 - tol) * best.value, best.value + best.tail_bound]. The experiment
    also shadows the generated trajectory and reports the largest corrected
    coefficient norm: near zero confirms the nearest exact solution is the
    zero solution, so the deviation really is the trajectory itself.
    """
    _require_all_outside(roots)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if u is None:
        u = np.zeros(spec.dim, dtype=complex)
        u[0] = 1.0

    budget = tol * best.value
    if tail_bound(roots, data, 0) <= budget:
        horizon = 0
    else:
        lo, hi = 0, 1
        while tail_bound(roots, data, hi) > budget:
            hi *= 2
            if hi > 10_000_000:
                raise NotApplicable("tail budget unreachable for this spectrum")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if tail_bound(roots, data, mid) <= budget:
                hi = mid
            else:
                lo = mid
        horizon = hi

    window = _zero_shadow_window(roots, data)
    n_forcing = window + horizon  # forcing indices 0..n_forcing
    forcing = worst_forcing(data, eps, u, n_forcing, norm=spec.norm)

    # The phase factors are complex in general, so run the experiment in the
    # complexified space; norms are unchanged by the global unit phase.
    work_spec = (
        replace(spec, field=Field.COMPLEX) if spec.field is Field.REAL else spec
    )
    traj = worst_trajectory(work_spec, roots, data, forcing, window)

    norms = sequence_norms(traj.values, spec.norm)
    ratio = float(norms[1]) / eps if len(norms) > 1 else 0.0
    sup_window = float(np.max(norms)) if len(norms) else 0.0

    coeffs = shadow_coefficients(work_spec, roots, data, traj)
    coeff_norm = max(vector_norm(coeffs[k], spec.norm) for k in range(spec.order))

    return SharpnessReport(
        achieved_ratio=ratio,
        kr_value=best.value,
        gap=best.value - ratio,
        horizon=horizon,
        tail_budget=tail_bound(roots, data, horizon),
        sup_window=sup_window,
        shadow_coefficient_norm=float(coeff_norm),
    )

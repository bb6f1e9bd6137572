"""Exact shadow solutions for approximate trajectories.

When every characteristic root is outside the unit disc, any sequence whose
residuals stay within eps sits within K_best * eps of exactly one solution of
the unforced recurrence. The shadow at index n is

    y_n = x_n - ((-1)^p / V) * sum_{s>=1} E_s f_{n+s-1},

where f is the residual sequence of x. A finite trajectory only exposes
finitely many residuals, so the series at index n is truncated after
S_n = N - p - n terms and each index carries a certified truncation error
eps * T(S_n). Real-field inputs are computed in the complexified space and
projected back; the imaginary residue that gets discarded is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import ConstantResult, tail_bound
from .errors import DegenerateRoots, NotApplicable, NotUlamStable
from .recurrence import (
    Field,
    RecurrenceSpec,
    RootSet,
    SpectralClass,
    Trajectory,
    residuals,
    sequence_norms,
)
from .vandermonde import (
    VandermondeData,
    particular_solution,
    series_response,
    solve_vandermonde,
)

__all__ = [
    "ShadowResult",
    "VerificationReport",
    "shadow_direct",
    "shadow_coefficients",
    "verify_shadow",
    "homogeneous_trajectory",
]


@dataclass(frozen=True)
class ShadowResult:
    """Shadow trajectory with its per-index truncation certificate.

    bound is the certified deviation bound (upper end of the constant's
    interval times eps). cert_error[n] bounds how far this shadow can sit
    from the shadow of any infinite eps-bounded extension of the data.
    """

    shadow: Trajectory
    coefficients: np.ndarray
    eps: float
    bound: float
    cert_error: np.ndarray
    max_deviation: float
    max_imag_discarded: float = 0.0

    def __post_init__(self):
        self.coefficients.setflags(write=False)
        self.cert_error.setflags(write=False)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of re-checking a shadow against its trajectory."""

    residual: float
    residual_limit: float
    max_deviation: float
    deviation_limit: float
    passed: bool


def _require_all_outside(roots: RootSet) -> None:
    if roots.on_unit_circle:
        raise NotUlamStable("a characteristic root lies on the unit circle")
    if roots.classification is SpectralClass.NEAR_DEGENERATE:
        raise DegenerateRoots("near-degenerate roots")
    if roots.classification is not SpectralClass.ALL_OUTSIDE_UNIT_DISC:
        raise NotApplicable("shadowing requires every root outside the unit disc")


def _project_real(values: np.ndarray) -> tuple[np.ndarray, float]:
    max_imag = float(np.max(np.abs(values.imag))) if values.size else 0.0
    return values.real.astype(complex), max_imag


def homogeneous_trajectory(roots: RootSet, coefficients, n_steps: int) -> np.ndarray:
    """Evaluate sum_k C_k r_k^n for n = 0..n_steps-1 as an (N, d) array."""
    coeffs = np.asarray(coefficients, dtype=complex)
    if coeffs.ndim == 1:
        coeffs = coeffs[:, None]
    powers = np.vander(roots.roots, n_steps, increasing=True).T
    return powers @ coeffs


def shadow_direct(
    spec: RecurrenceSpec,
    roots: RootSet,
    data: VandermondeData,
    traj: Trajectory,
    best: ConstantResult,
) -> ShadowResult:
    """Reconstruct the unique nearby exact solution, index by index.

    This is the authoritative path: the correction series is applied to each
    state directly. Coefficients are recovered afterwards from the leading p
    shadow values so callers can extend the shadow beyond the data window.
    """
    _require_all_outside(roots)
    p = spec.order
    f = residuals(spec, traj)
    n_steps = traj.length
    m = f.length

    corrections = series_response(data, f.values, n_steps)
    y = traj.values - corrections
    max_imag = 0.0
    if spec.field is Field.REAL:
        y, max_imag = _project_real(y)

    horizons = np.clip(m - np.arange(n_steps), 0, None)
    tails = np.array([tail_bound(roots, data, int(s)) for s in horizons])
    cert = f.eps * tails

    deviation = sequence_norms(traj.values - y, spec.norm)
    max_dev = float(np.max(deviation)) if n_steps else 0.0
    solve = solve_vandermonde(roots, y[:p])
    coeffs = solve.coefficients
    if coeffs.ndim == 1:
        coeffs = coeffs[:, None]

    upper = best.value + best.tail_bound
    return ShadowResult(
        shadow=Trajectory(values=y),
        coefficients=coeffs,
        eps=f.eps,
        bound=upper * f.eps,
        cert_error=cert,
        max_deviation=max_dev,
        max_imag_discarded=max_imag,
    )


def shadow_coefficients(
    spec: RecurrenceSpec,
    roots: RootSet,
    data: VandermondeData,
    traj: Trajectory,
) -> np.ndarray:
    """Shadow coefficients via the homogeneous/particular split.

    Validation path, independent of shadow_direct: strip the forced part from
    the leading p states, solve the Vandermonde system for the homogeneous
    coefficients, then add the truncated per-root correction sums

        (-1)^(p+k) * (reduced_k / V) * sum_{s=1}^{M} f_{s-1} / r_k^s.

    Returns a (p, d) array of corrected coefficients.
    """
    _require_all_outside(roots)
    p = spec.order
    f = residuals(spec, traj)

    forced_head = np.stack([particular_solution(data, f, n) for n in range(p)])
    homogeneous_head = traj.values[:p] - forced_head
    base = solve_vandermonde(roots, homogeneous_head).coefficients
    if base.ndim == 1:
        base = base[:, None]

    # Backward evaluation of sum_{s=1}^{M} f_{s-1} r_k^{-s} per root.
    inv = 1.0 / data.roots
    tails = np.zeros((p, traj.dim), dtype=complex)
    for idx in range(f.length - 1, -1, -1):
        tails = (f.values[idx][None, :] + tails) * inv[:, None]

    k_index = np.arange(1, p + 1)
    sign = (-1.0) ** (p + k_index)
    weights = sign * data.reduced / data.det
    return base + weights[:, None] * tails


def verify_shadow(
    spec: RecurrenceSpec,
    traj: Trajectory,
    result: ShadowResult,
    res_tol: float = 1e-9,
    dev_tol: float = 1e-9,
) -> VerificationReport:
    """Re-check a shadow: homogeneity of y and the certified deviation bound.

    The residual limit is relative, res_tol * (1 + max||y_n||), because shadow
    values grow geometrically. The deviation limit allows the per-index
    truncation certificate on top of the constant bound.
    """
    y = result.shadow
    res = residuals(spec, y)
    y_scale = float(np.max(sequence_norms(y.values, spec.norm)))
    residual_limit = res_tol * (1.0 + y_scale)

    deviation = sequence_norms(traj.values - y.values, spec.norm)
    cert_max = float(np.max(result.cert_error)) if result.cert_error.size else 0.0
    deviation_limit = result.bound + cert_max + dev_tol
    max_dev = float(np.max(deviation)) if deviation.size else 0.0

    passed = res.eps <= residual_limit and max_dev <= deviation_limit
    return VerificationReport(
        residual=res.eps,
        residual_limit=residual_limit,
        max_deviation=max_dev,
        deviation_limit=deviation_limit,
        passed=passed,
    )

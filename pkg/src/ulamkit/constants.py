"""Ulam stability constants with certified truncation.

Two constants are computed. The classical one,

    K = 1 / |prod_k (|r_k| - 1)|,

is valid whenever no root sits on the unit circle. When every root lies
strictly outside the unit disc the sharp constant is the series

    K_best = (1/|V|) * sum_{s>=1} |E_s|,

truncated at the first index S whose geometric tail bound

    T(S) = (1/|V|) * sum_k |reduced_k| * |r_k|^(-S) / (|r_k| - 1)

drops below the requested tolerance. Partial sums underestimate, so the pair
(value, value + T(S)) encloses the true constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateRoots, NotApplicable, NotUlamStable, TolUnreachable
from .recurrence import RootSet, SpectralClass
from .vandermonde import VandermondeData, alternating_terms

__all__ = [
    "ConstantKind",
    "ConstantResult",
    "classical_constant",
    "best_constant",
    "tail_bound",
    "closed_form_small_order",
    "TERM_CAP",
]

# Hard ceiling on series length before the truncation target is declared
# unreachable.
TERM_CAP = 100_000

_BLOCK = 512


class ConstantKind(Enum):
    CLASSICAL = "classical"
    BEST_OUTSIDE = "best_outside"


@dataclass(frozen=True)
class ConstantResult:
    """A stability constant with its truncation certificate.

    For the classical constant the formula is closed, so terms_used and
    tail_bound are zero and the interval collapses to a point.
    """

    value: float
    terms_used: int
    tail_bound: float
    kind: ConstantKind

    @property
    def interval(self) -> tuple[float, float]:
        return (self.value, self.value + self.tail_bound)


def _require_stable(roots: RootSet) -> None:
    if roots.on_unit_circle:
        raise NotUlamStable(
            "a characteristic root lies on the unit circle; no finite "
            "stability constant exists"
        )


def classical_constant(roots: RootSet) -> ConstantResult:
    """Product-formula constant, valid for any spectrum off the unit circle."""
    _require_stable(roots)
    value = 1.0 / float(np.prod(np.abs(roots.moduli - 1.0)))
    return ConstantResult(
        value=value, terms_used=0, tail_bound=0.0, kind=ConstantKind.CLASSICAL
    )


def tail_bound(roots: RootSet, data: VandermondeData, terms: int) -> float:
    """Certified bound on the series remainder past the first `terms` terms.

    Requires every |r_k| > 1; raises NotApplicable otherwise.
    """
    if terms < 0:
        raise ValueError(f"terms must be >= 0, got {terms}")
    moduli = roots.moduli
    if np.any(moduli <= 1.0):
        raise NotApplicable("tail bound requires every root outside the unit disc")
    weights = np.abs(data.reduced) / (moduli - 1.0)
    return float(np.sum(weights * moduli ** (-float(terms)))) / abs(data.det)


def _smallest_certified_horizon(
    roots: RootSet, data: VandermondeData, tol: float, cap: int
) -> int:
    """Least S with tail_bound(S) <= tol; the bound is monotone in S."""
    if tail_bound(roots, data, 0) <= tol:
        return 0
    if tail_bound(roots, data, cap) > tol:
        raise TolUnreachable(
            f"tail bound still {tail_bound(roots, data, cap):.3e} after {cap} terms "
            f"(target {tol:.3e})"
        )
    lo, hi = 0, cap  # tail(lo) > tol >= tail(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_bound(roots, data, mid) <= tol:
            hi = mid
        else:
            lo = mid
    return hi


def best_constant(
    roots: RootSet,
    data: VandermondeData,
    tol: float = 1e-10,
) -> ConstantResult:
    """Sharp constant for an all-outside spectrum, certified to `tol`.

    The series is summed index-ascending in blocks; magnitudes accumulate
    through exact (error-free transformation) summation, so partial sums are
    monotone in the horizon. Raises NotUlamStable / DegenerateRoots /
    NotApplicable for the other spectral classes, and TolUnreachable when the
    horizon cap cannot certify the requested tolerance.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    _require_stable(roots)
    if roots.classification is SpectralClass.NEAR_DEGENERATE:
        raise DegenerateRoots("near-degenerate roots: series weights diverge")
    if roots.classification is not SpectralClass.ALL_OUTSIDE_UNIT_DISC:
        raise NotApplicable(
            "sharp constant requires every root outside the unit disc; "
            "the classical constant still applies"
        )
    horizon = _smallest_certified_horizon(roots, data, tol, TERM_CAP)
    magnitudes: list[float] = []
    s = 1
    while s <= horizon:
        count = min(_BLOCK, horizon - s + 1)
        magnitudes.extend(np.abs(alternating_terms(data, s, count)).tolist())
        s += count
    value = math.fsum(magnitudes) / abs(data.det)
    return ConstantResult(
        value=value,
        terms_used=horizon,
        tail_bound=tail_bound(roots, data, horizon),
        kind=ConstantKind.BEST_OUTSIDE,
    )


def closed_form_small_order(roots: RootSet, tol: float = 1e-10) -> float | None:
    """Specialized sharp-constant series for orders 2 and 3.

    Written directly from the root values, without the shared determinant
    machinery, so it can cross-check the general path. Returns None for any
    other order. Requires every |r_k| > 1.
    """
    p = roots.order
    if p not in (2, 3):
        return None
    r = roots.roots
    moduli = roots.moduli
    if np.any(moduli <= 1.0):
        raise NotApplicable("closed form requires every root outside the unit disc")

    if p == 2:
        weights = np.array([1.0, 1.0])
        den = abs(r[0] - r[1])

        def term(s: int) -> float:
            return abs(r[0] ** (-s) - r[1] ** (-s))

    else:
        weights = np.abs(np.array([r[2] - r[1], r[0] - r[2], r[1] - r[0]]))
        den = abs((r[2] - r[0]) * (r[2] - r[1]) * (r[1] - r[0]))

        def term(s: int) -> float:
            return abs(
                (r[2] - r[1]) * r[0] ** (-s)
                + (r[0] - r[2]) * r[1] ** (-s)
                + (r[1] - r[0]) * r[2] ** (-s)
            )

    geo = weights / (moduli - 1.0)

    def tail(s: int) -> float:
        return float(np.sum(geo * moduli ** (-float(s)))) / den

    if tail(TERM_CAP) > tol:
        raise TolUnreachable(
            f"closed-form tail still {tail(TERM_CAP):.3e} after {TERM_CAP} terms"
        )
    values: list[float] = []
    s = 0
    while tail(s) > tol:
        s += 1
        values.append(term(s))
    return math.fsum(values) / den

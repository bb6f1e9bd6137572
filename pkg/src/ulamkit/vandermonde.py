"""Vandermonde determinants and the series terms built from them.

For distinct roots r_1..r_p let V be the full pairwise-difference product
prod_{i<j} (r_j - r_i) and let the k-th reduced determinant be the same
product with r_k left out. The alternating combination

    E_s = sum_k (-1)^(k+1) * reduced_k / r_k^s

drives everything downstream: stability constants sum |E_s|, shadow
corrections and worst-case trajectories convolve E with a forcing sequence.
Sums over s run index-ascending with compensated accumulation so results are
reproducible across runs and thread counts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRoots, IllConditionedWarning, MissingForcing
from .recurrence import Forcing, RootSet
from .summation import CompensatedSum

__all__ = [
    "VandermondeData",
    "AlternatingTerm",
    "SolveResult",
    "build",
    "alternating_term",
    "alternating_terms",
    "solve_vandermonde",
    "particular_solution",
    "series_response",
]

# Solve residuals above this multiple of the right-hand side trigger
# IllConditionedWarning.
_SOLVE_RESIDUAL_LIMIT = 1e-8


@dataclass(frozen=True)
class VandermondeData:
    """Determinant data for one distinct-root configuration.

    reduced[k] is the determinant of the root list with root k removed, in
    the original order. For p = 1 both det and reduced[0] are empty products,
    so both equal 1.
    """

    det: complex
    reduced: np.ndarray
    roots: np.ndarray

    def __post_init__(self):
        self.reduced.setflags(write=False)
        self.roots.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.roots)


@dataclass(frozen=True)
class AlternatingTerm:
    """One series term E_s with its index and magnitude."""

    index: int
    value: complex

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class SolveResult:
    """Coefficients from a Vandermonde solve plus the achieved residual."""

    coefficients: np.ndarray
    residual: float


def _pairwise_product(roots: np.ndarray) -> complex:
    acc = 1.0 + 0j
    p = len(roots)
    for i in range(p):
        for j in range(i + 1, p):
            acc *= roots[j] - roots[i]
    return complex(acc)


def build(roots: RootSet) -> VandermondeData:
    """Compute V and every leave-one-out determinant by direct products.

    Raises DegenerateRoots for coincident or near-coincident roots, where the
    products lose all significance.
    """
    if roots.near_degenerate:
        raise DegenerateRoots(
            f"minimum root separation {roots.min_separation:.3e} is degenerate"
        )
    values = roots.roots
    det = _pairwise_product(values)
    reduced = np.array(
        [_pairwise_product(np.delete(values, k)) for k in range(len(values))],
        dtype=complex,
    )
    return VandermondeData(det=det, reduced=reduced, roots=values.copy())


def _signs(p: int) -> np.ndarray:
    # (-1)^(k+1) for 1-based k, i.e. +, -, +, ... over 0-based indices.
    signs = np.ones(p)
    signs[1::2] = -1.0
    return signs


def alternating_term(data: VandermondeData, s: int) -> AlternatingTerm:
    """E_s evaluated term by term, left to right, with compensation."""
    acc = CompensatedSum(0.0 + 0j)
    signs = _signs(data.order)
    for k in range(data.order):
        acc.add(signs[k] * data.reduced[k] * data.roots[k] ** (-s))
    return AlternatingTerm(index=s, value=complex(acc.value))


def alternating_terms(data: VandermondeData, start: int, count: int) -> np.ndarray:
    """E_s for s = start..start+count-1 as a complex array.

    Reciprocal powers advance by cumulative products and the k-sum is a
    compensated left-to-right pass, so a block evaluation reproduces the
    scalar loop.
    """
    p = data.order
    if count <= 0:
        return np.zeros(0, dtype=complex)
    inv = 1.0 / data.roots
    steps = np.ones((count, p), dtype=complex)
    steps[1:, :] = inv
    powers = np.cumprod(steps, axis=0) * (inv ** start)[None, :]
    coef = _signs(p) * data.reduced
    acc = CompensatedSum(np.zeros(count, dtype=complex))
    for k in range(p):
        acc.add(coef[k] * powers[:, k])
    return acc.value


def solve_vandermonde(roots: RootSet, rhs) -> SolveResult:
    """Solve sum_k C_k r_k^n = rhs_n for n = 0..p-1, coordinatewise.

    Uses the O(p^2) divided-difference elimination specialized to Vandermonde
    systems instead of a generic dense solve. The residual of the solve is
    reported, and residuals above 1e-8 * max|rhs| raise IllConditionedWarning.
    """
    if roots.order > 1 and roots.min_separation == 0.0:
        raise DegenerateRoots("coincident roots admit no unique coefficients")
    nodes = roots.roots
    p = len(nodes)
    b = np.array(np.asarray(rhs, dtype=complex), copy=True)
    squeeze = b.ndim == 1
    if squeeze:
        b = b[:, None]
    if b.shape[0] != p:
        raise ValueError(f"expected {p} right-hand values, got {b.shape[0]}")

    for k in range(p - 1):
        for i in range(p - 1, k, -1):
            b[i] = b[i] - nodes[k] * b[i - 1]
    for k in range(p - 2, -1, -1):
        for i in range(k + 1, p):
            b[i] = b[i] / (nodes[i] - nodes[i - k - 1])
        for i in range(k, p - 1):
            b[i] = b[i] - b[i + 1]

    powers = np.vander(nodes, p, increasing=True).T  # powers[n, k] = r_k^n
    rhs_arr = np.asarray(rhs, dtype=complex)
    if rhs_arr.ndim == 1:
        rhs_arr = rhs_arr[:, None]
    residual = float(np.max(np.abs(powers @ b - rhs_arr)))
    rhs_scale = float(np.max(np.abs(rhs_arr))) if rhs_arr.size else 0.0
    if residual > _SOLVE_RESIDUAL_LIMIT * max(rhs_scale, 1e-300):
        warnings.warn(
            f"Vandermonde solve residual {residual:.3e} exceeds "
            f"{_SOLVE_RESIDUAL_LIMIT:.0e} * |rhs|",
            IllConditionedWarning,
            stacklevel=2,
        )
    coeffs = b[:, 0] if squeeze else b
    return SolveResult(coefficients=coeffs, residual=residual)


def particular_solution(data: VandermondeData, forcing: Forcing, n: int) -> np.ndarray:
    """Value at index n of the zero-initialized forced solution.

    Evaluates (1/V) sum_{s=1}^{n} sum_k (-1)^(p+k) reduced_k r_k^{n-s} f_{s-1}
    with the s-sum ascending and compensated. n = 0 returns the zero vector.
    Raises MissingForcing when fewer than n forcing values are available.
    """
    if n < 0:
        raise ValueError(f"index must be >= 0, got {n}")
    f = forcing.values
    d = f.shape[1] if f.ndim == 2 else 1
    if n == 0:
        return np.zeros(d, dtype=complex)
    if len(f) < n:
        raise MissingForcing(f"need {n} forcing values, got {len(f)}")
    p = data.order
    # (-1)^(p+k) over 1-based k equals (-1)^(p+1) * (-1)^(k+1).
    coef = (-1.0) ** (p + 1) * _signs(p) * data.reduced / data.det
    acc = CompensatedSum(np.zeros(d, dtype=complex))
    for s in range(1, n + 1):
        kernel = CompensatedSum(0.0 + 0j)
        for k in range(p):
            kernel.add(coef[k] * data.roots[k] ** (n - s))
        acc.add(kernel.value * f[s - 1])
    return acc.value


def series_response(data: VandermondeData, f_values: np.ndarray, n_steps: int) -> np.ndarray:
    """Truncated convolution g_n = ((-1)^p / V) sum_{s>=1} E_s f_{n+s-1}.

    Only the supplied forcing enters: index n uses the terms with
    n + s - 1 < len(f_values), which equals evaluating the infinite series
    for the zero-extended forcing. Computed by backward per-root tail
    recurrences T_k(n) = (f_n + T_k(n+1)) / r_k, combined with a compensated
    k-sum at each index.
    """
    f = np.asarray(f_values, dtype=complex)
    if f.ndim != 2:
        raise ValueError(f"forcing values must be 2-d, got shape {f.shape}")
    p = data.order
    d = f.shape[1]
    m = f.shape[0]
    inv = 1.0 / data.roots
    coef = _signs(p) * data.reduced
    scale = (-1.0) ** p / data.det
    out = np.zeros((n_steps, d), dtype=complex)
    tails = np.zeros((p, d), dtype=complex)
    for n in range(max(n_steps, m) - 1, -1, -1):
        if n <= m - 1:
            tails = (f[n][None, :] + tails) * inv[:, None]
        if n < n_steps:
            acc = CompensatedSum(np.zeros(d, dtype=complex))
            for k in range(p):
                acc.add(coef[k] * tails[k])
            out[n] = scale * acc.value
    return out

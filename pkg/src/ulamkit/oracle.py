"""Slow, transparent reference implementations.

These ship with the library (not only the test suite) so the CLI can
cross-check the fast paths on demand. The determinant is the literal
permutation expansion; the series reference is a naive per-term sum with no
blocking. Both are meant to disagree loudly when the fast code is wrong, so
they deliberately share no evaluation machinery with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import TooLarge
from .vandermonde import VandermondeData

__all__ = [
    "OracleConfig",
    "det_bruteforce",
    "reference_sum",
    "vandermonde_matrix",
]

# Permutation expansion is n!; never allow more than this order.
_HARD_CAP = 8


@dataclass(frozen=True)
class OracleConfig:
    """Limits for the reference computations.

    ref_terms of None means callers pick the horizon (the convention used by
    the verification paths is four times the fast computation's horizon).
    """

    max_order: int = 6
    ref_terms: int | None = None

    def __post_init__(self):
        if not (1 <= self.max_order <= _HARD_CAP):
            raise ValueError(
                f"max_order must be in 1..{_HARD_CAP}, got {self.max_order}"
            )


def _parity(perm: tuple[int, ...]) -> int:
    inversions = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inversions += 1
    return -1 if inversions % 2 else 1


def det_bruteforce(matrix, cfg: OracleConfig | None = None) -> complex:
    """Determinant by the n! permutation expansion.

    Raises TooLarge above cfg.max_order. Real and imaginary parts accumulate
    through exact summation so the only rounding left is in the products.
    """
    cfg = cfg or OracleConfig()
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    if n > cfg.max_order:
        raise TooLarge(f"order {n} exceeds the brute-force cap {cfg.max_order}")
    if n == 0:
        return 1.0 + 0j
    re_parts: list[float] = []
    im_parts: list[float] = []
    for perm in permutations(range(n)):
        product = complex(_parity(perm))
        for row, col in enumerate(perm):
            product *= a[row, col]
        re_parts.append(product.real)
        im_parts.append(product.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def vandermonde_matrix(nodes) -> np.ndarray:
    """Square matrix with entry [i, j] = nodes[j] ** i."""
    nodes = np.atleast_1d(np.asarray(nodes, dtype=complex))
    return np.vander(nodes, len(nodes), increasing=True).T


def reference_sum(data: VandermondeData, terms: int) -> float:
    """(1/|V|) * sum_{s=1}^{terms} |E_s| by plain per-term evaluation.

    Each term is built from scratch with running reciprocal powers, and the
    magnitudes are totaled by exact summation, so this is a genuinely
    independent slow path for the fast blocked series.
    """
    if terms < 0:
        raise ValueError(f"terms must be >= 0, got {terms}")
    p = data.order
    inv = [1.0 / complex(r) for r in data.roots]
    weights = [
        (-1.0) ** (k + 2) * complex(data.reduced[k]) for k in range(p)
    ]  # (-1)^(k+1) for 1-based k
    powers = [1.0 + 0j] * p
    magnitudes: list[float] = []
    for _ in range(terms):
        term = 0.0 + 0j
        for k in range(p):
            powers[k] *= inv[k]
            term += weights[k] * powers[k]
        magnitudes.append(abs(term))
    return math.fsum(magnitudes) / abs(complex(data.det))

"""Order-p linear recurrences with constant coefficients.

A system is written as

    x_{n+p} = a_1 x_{n+p-1} + ... + a_p x_n + f_n,

with state values in R^d or C^d. Everything downstream (stability constants,
shadow solutions, worst-case forcing) is driven by the characteristic roots
of r^p = a_1 r^{p-1} + ... + a_p, so this module owns root extraction,
spectral classification, forward simulation and residual measurement.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import Enum

import numpy as np

from .errors import InvalidLength, NonConvergence

__all__ = [
    "Field",
    "Norm",
    "SpectralClass",
    "ToleranceConfig",
    "RootConfig",
    "RecurrenceSpec",
    "RootSet",
    "Trajectory",
    "Forcing",
    "characteristic_roots",
    "classify_roots",
    "simulate",
    "residuals",
    "sequence_norms",
    "vector_norm",
    "as_state_array",
]


class Field(Enum):
    REAL = "real"
    COMPLEX = "complex"


class Norm(Enum):
    SUP = "sup"
    EUCLID = "euclid"


class SpectralClass(Enum):
    """Coarse location of the characteristic roots relative to the unit circle."""

    ALL_OUTSIDE_UNIT_DISC = "all-outside-unit-disc"
    HYPERBOLIC_MIXED = "hyperbolic-mixed"
    ON_UNIT_CIRCLE = "on-unit-circle"
    NEAR_DEGENERATE = "near-degenerate"


@dataclass(frozen=True)
class ToleranceConfig:
    """Classification bands.

    unit_circle: a root with ||r| - 1| <= unit_circle counts as on the circle.
    separation: roots closer than separation * max|r| count as degenerate.
    """

    unit_circle: float = 1e-9
    separation: float = 1e-8


@dataclass(frozen=True)
class RootConfig:
    """Controls for root extraction and refinement."""

    residual_tol: float = 1e-10
    max_iter: int = 100
    tolerances: ToleranceConfig = dc_field(default_factory=ToleranceConfig)


@dataclass(frozen=True)
class RecurrenceSpec:
    """Immutable description of one recurrence.

    coefficients[i] is a_{i+1}; the trailing coefficient must be nonzero so
    the equation genuinely has order p. For Field.REAL every coefficient must
    have zero imaginary part (values still stored complex for uniformity).
    """

    order: int
    coefficients: np.ndarray
    field: Field = Field.REAL
    dim: int = 1
    norm: Norm = Norm.SUP

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        coeffs = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if coeffs.shape != (self.order,):
            raise ValueError(
                f"expected {self.order} coefficients, got shape {coeffs.shape}"
            )
        if coeffs[-1] == 0:
            raise ValueError("trailing coefficient a_p must be nonzero")
        if self.field is Field.REAL:
            if np.any(coeffs.imag != 0.0):
                raise ValueError("field=real requires real coefficients")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_roots(
        cls,
        roots,
        field: Field = Field.COMPLEX,
        dim: int = 1,
        norm: Norm = Norm.SUP,
    ) -> "RecurrenceSpec":
        """Build the spec whose characteristic polynomial has the given roots.

        Expands prod_k (r - r_k) = r^p - a_1 r^{p-1} - ... - a_p. For
        Field.REAL the root multiset must be closed under conjugation; tiny
        imaginary residue from the expansion is dropped.
        """
        roots = np.atleast_1d(np.asarray(roots, dtype=complex))
        monic = np.atleast_1d(np.poly(roots))
        coeffs = -monic[1:]
        if field is Field.REAL:
            scale = max(1.0, float(np.max(np.abs(coeffs))))
            if np.max(np.abs(coeffs.imag)) > 1e-9 * scale:
                raise ValueError(
                    "roots are not closed under conjugation, cannot build a real spec"
                )
            coeffs = coeffs.real.astype(complex)
        return cls(order=len(roots), coefficients=coeffs, field=field, dim=dim, norm=norm)

    def characteristic_coefficients(self) -> np.ndarray:
        """Monic characteristic polynomial [1, -a_1, ..., -a_p]."""
        return np.concatenate(([1.0 + 0j], -self.coefficients))


@dataclass(frozen=True)
class RootSet:
    """Characteristic roots plus the derived classification data.

    Both spectral flags are kept even though reporting gives the unit-circle
    condition precedence over near-degeneracy.
    """

    roots: np.ndarray
    moduli: np.ndarray
    min_separation: float
    classification: SpectralClass
    residual_bound: float
    on_unit_circle: bool
    near_degenerate: bool

    def __post_init__(self):
        self.roots.setflags(write=False)
        self.moduli.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.roots)

    @classmethod
    def from_roots(cls, roots, tol: ToleranceConfig | None = None) -> "RootSet":
        """Classify an explicitly given root list (taken as exact)."""
        roots = np.atleast_1d(np.asarray(roots, dtype=complex))
        return _assemble(roots, tol or ToleranceConfig(), residual_bound=0.0)


@dataclass(frozen=True)
class Trajectory:
    """Finite state sequence x_0..x_{N-1}, stored as an (N, d) complex array.

    n_padded counts forcing entries that were zero-filled during simulation;
    zero means the forcing covered every step.
    """

    values: np.ndarray
    n_padded: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2:
            raise ValueError(f"trajectory values must be 2-d, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Forcing:
    """Perturbation sequence f_0..f_{M-1} with its sup over per-index norms."""

    values: np.ndarray
    eps: float
    norm: Norm = Norm.SUP

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2:
            raise ValueError(f"forcing values must be 2-d, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_values(cls, values, norm: Norm = Norm.SUP, dim: int | None = None) -> "Forcing":
        values = as_state_array(values, dim)
        eps = float(np.max(sequence_norms(values, norm))) if len(values) else 0.0
        return cls(values=values, eps=eps, norm=norm)


def as_state_array(values, dim: int | None = None) -> np.ndarray:
    """Canonicalize scalars / nested sequences to an (N, d) complex array."""
    arr = np.asarray(values, dtype=complex)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"expected a 1-d or 2-d value sequence, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"expected dimension {dim}, got {arr.shape[1]}")
    return arr


def vector_norm(value: np.ndarray, norm: Norm) -> float:
    value = np.atleast_1d(np.asarray(value))
    if norm is Norm.SUP:
        return float(np.max(np.abs(value)))
    return float(np.linalg.norm(value))


def sequence_norms(values: np.ndarray, norm: Norm) -> np.ndarray:
    """Per-index norms of an (N, d) array."""
    if norm is Norm.SUP:
        return np.max(np.abs(values), axis=1)
    return np.linalg.norm(values, axis=1)


def _horner(coeffs: np.ndarray, z: complex) -> complex:
    acc = coeffs[0]
    for c in coeffs[1:]:
        acc = acc * z + c
    return acc


def _classify(roots: np.ndarray, tol: ToleranceConfig):
    moduli = np.abs(roots)
    p = len(roots)
    if p > 1:
        diffs = np.abs(roots[:, None] - roots[None, :])
        min_sep = float(np.min(diffs[np.triu_indices(p, k=1)]))
    else:
        min_sep = float("inf")
    on_circle = bool(np.any(np.abs(moduli - 1.0) <= tol.unit_circle))
    near_degenerate = bool(min_sep <= tol.separation * float(np.max(moduli)))
    if on_circle:
        cls = SpectralClass.ON_UNIT_CIRCLE
    elif near_degenerate:
        cls = SpectralClass.NEAR_DEGENERATE
    elif np.all(moduli > 1.0 + tol.unit_circle):
        cls = SpectralClass.ALL_OUTSIDE_UNIT_DISC
    else:
        cls = SpectralClass.HYPERBOLIC_MIXED
    return moduli, min_sep, cls, on_circle, near_degenerate


def _assemble(roots: np.ndarray, tol: ToleranceConfig, residual_bound: float) -> RootSet:
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order].copy()
    moduli, min_sep, cls, on_circle, near_deg = _classify(roots, tol)
    return RootSet(
        roots=roots,
        moduli=moduli,
        min_separation=min_sep,
        classification=cls,
        residual_bound=residual_bound,
        on_unit_circle=on_circle,
        near_degenerate=near_deg,
    )


def characteristic_roots(spec: RecurrenceSpec, cfg: RootConfig | None = None) -> RootSet:
    """Extract and classify the characteristic roots of a spec.

    Companion-matrix eigenvalues seed an Aberth-style simultaneous Newton
    refinement against the monic polynomial. Each root keeps its best iterate
    by residual, and refinement stops once every |q(r_k)| is below
    residual_tol * max|coefficient|. Raises NonConvergence if the target is
    still unmet after max_iter sweeps.
    """
    cfg = cfg or RootConfig()
    monic = spec.characteristic_coefficients()
    scale = float(np.max(np.abs(monic)))
    target = cfg.residual_tol * scale

    if spec.order == 1:
        root = complex(spec.coefficients[0])
        return _assemble(np.array([root]), cfg.tolerances, residual_bound=0.0)

    deriv = np.polyder(monic)
    z = np.roots(monic).astype(complex)
    best = z.copy()
    best_res = np.array([abs(_horner(monic, zk)) for zk in z])

    polished = False
    for _ in range(cfg.max_iter):
        if polished and np.all(best_res <= target):
            break
        # Aberth sweep: Newton step with pairwise repulsion, applied jointly.
        # Runs at least once even when the eigenvalues already meet the
        # target, which polishes them to the attainable floor.
        values = np.array([_horner(monic, zk) for zk in z])
        slopes = np.array([_horner(deriv, zk) for zk in z])
        new_z = z.copy()
        for k in range(len(z)):
            if values[k] == 0 or slopes[k] == 0:
                continue
            newton = values[k] / slopes[k]
            others = np.delete(z, k)
            repulse = np.sum(1.0 / (z[k] - others)) if len(others) else 0.0
            denom = 1.0 - newton * repulse
            step = newton if denom == 0 else newton / denom
            if np.isfinite(step):
                new_z[k] = z[k] - step
        z = new_z
        polished = True
        res = np.array([abs(_horner(monic, zk)) for zk in z])
        improved = res < best_res
        best[improved] = z[improved]
        best_res[improved] = res[improved]

    if np.any(best_res > target):
        raise NonConvergence(
            f"root refinement stalled at residual {float(np.max(best_res)):.3e} "
            f"(target {target:.3e})"
        )
    return _assemble(best, cfg.tolerances, residual_bound=float(np.max(best_res)))


def classify_roots(roots: RootSet, tol: ToleranceConfig | None = None) -> SpectralClass:
    """Reclassify an existing root set, possibly under different bands."""
    tol = tol or ToleranceConfig()
    _, min_sep, cls, on_circle, near_deg = _classify(roots.roots, tol)
    return cls


def simulate(
    spec: RecurrenceSpec,
    initial,
    forcing: Forcing | None,
    n_steps: int,
) -> Trajectory:
    """Run the forced recurrence forward for n_steps total states.

    initial supplies x_0..x_{p-1}. Forcing entries beyond the supplied length
    are treated as zero; the number of zero-filled steps is recorded on the
    returned trajectory. Raises InvalidLength when n_steps < p.
    """
    p = spec.order
    if n_steps < p:
        raise InvalidLength(f"n_steps must be >= order {p}, got {n_steps}")
    init = as_state_array(initial, spec.dim)
    if init.shape[0] != p:
        raise InvalidLength(f"expected {p} initial values, got {init.shape[0]}")

    d = spec.dim
    values = np.zeros((n_steps, d), dtype=complex)
    values[:p] = init
    f_values = forcing.values if forcing is not None else np.zeros((0, d), dtype=complex)
    if forcing is not None and f_values.shape[1] != d:
        raise ValueError(f"forcing dimension {f_values.shape[1]} != spec dimension {d}")

    needed = n_steps - p
    available = min(len(f_values), needed)
    n_padded = needed - available

    a = spec.coefficients
    for n in range(p, n_steps):
        acc = np.zeros(d, dtype=complex)
        for i in range(1, p + 1):
            acc = acc + a[i - 1] * values[n - i]
        if n - p < available:
            acc = acc + f_values[n - p]
        values[n] = acc
    return Trajectory(values=values, n_padded=n_padded)


def residuals(spec: RecurrenceSpec, traj: Trajectory) -> Forcing:
    """Forcing implied by a trajectory: f_n = x_{n+p} - sum_i a_i x_{n+p-i}.

    Raises InvalidLength unless the trajectory has at least p + 1 states.
    """
    p = spec.order
    x = traj.values
    if traj.length <= p:
        raise InvalidLength(
            f"need at least {p + 1} states to measure residuals, got {traj.length}"
        )
    if traj.dim != spec.dim:
        raise ValueError(f"trajectory dimension {traj.dim} != spec dimension {spec.dim}")
    a = spec.coefficients
    m = traj.length - p
    f = x[p:].copy()
    for i in range(1, p + 1):
        f -= a[i - 1] * x[p - i : p - i + m]
    eps = float(np.max(sequence_norms(f, spec.norm))) if m else 0.0
    return Forcing(values=f, eps=eps, norm=spec.norm)

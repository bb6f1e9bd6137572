"""Shared generators for the randomized suites.

All randomness is seeded through numpy Generators created per test, so every
run sees identical draws.
"""

from __future__ import annotations

import numpy as np
import pytest

from ulamkit import (
    Field,
    Forcing,
    Norm,
    RecurrenceSpec,
    RootSet,
    Trajectory,
    build,
    characteristic_roots,
    homogeneous_trajectory,
    worst_trajectory,
)


def draw_outside_roots(
    rng: np.random.Generator,
    p: int,
    lo: float = 1.1,
    hi: float = 5.0,
    min_sep: float = 0.1,
    real_only: bool = False,
) -> np.ndarray:
    """Rejection-sample p distinct roots with moduli in [lo, hi]."""
    while True:
        moduli = rng.uniform(lo, hi, p)
        if real_only:
            signs = rng.choice([-1.0, 1.0], p)
            roots = (moduli * signs).astype(complex)
        else:
            angles = rng.uniform(0.0, 2.0 * np.pi, p)
            roots = moduli * np.exp(1j * angles)
        ok = True
        for i in range(p):
            for j in range(i + 1, p):
                if abs(roots[i] - roots[j]) < min_sep:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return roots


def draw_conjugate_closed_roots(
    rng: np.random.Generator,
    p: int,
    lo: float = 1.2,
    hi: float = 4.0,
    min_sep: float = 0.2,
) -> np.ndarray:
    """Roots closed under conjugation: real entries plus conjugate pairs."""
    while True:
        roots = []
        remaining = p
        while remaining > 0:
            if remaining >= 2 and rng.random() < 0.5:
                rho = rng.uniform(lo, hi)
                theta = rng.uniform(0.05, np.pi - 0.05)
                z = rho * np.exp(1j * theta)
                roots.extend([z, np.conj(z)])
                remaining -= 2
            else:
                rho = rng.uniform(lo, hi)
                roots.append(complex(rho * rng.choice([-1.0, 1.0])))
                remaining -= 1
        roots = np.array(roots, dtype=complex)
        ok = True
        for i in range(p):
            for j in range(i + 1, p):
                if abs(roots[i] - roots[j]) < min_sep:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return roots


def random_forcing(
    rng: np.random.Generator,
    length: int,
    dim: int,
    eps: float,
    norm: Norm = Norm.SUP,
    complex_values: bool = True,
) -> Forcing:
    """Forcing whose largest per-index norm is exactly eps (nonzero length)."""
    values = rng.normal(size=(length, dim))
    if complex_values:
        values = values + 1j * rng.normal(size=(length, dim))
    values = values.astype(complex)
    if norm is Norm.SUP:
        scale = np.max(np.abs(values))
    else:
        scale = np.max(np.linalg.norm(values, axis=1))
    values *= eps / scale
    return Forcing.from_values(values, norm=norm)


def bounded_noisy_trajectory(
    rng: np.random.Generator,
    spec: RecurrenceSpec,
    roots: RootSet,
    data,
    n_steps: int,
    eps: float,
):
    """An eps-approximate trajectory that stays O(1) over the window.

    Bounded forced response to a random forcing plus a homogeneous component
    whose coefficients are scaled down by rho^-N so it surfaces to O(1) at
    the end of the window instead of exploding.
    """
    forcing = random_forcing(
        rng, n_steps, spec.dim, eps,
        norm=spec.norm, complex_values=spec.field is Field.COMPLEX,
    )
    base = worst_trajectory(spec, roots, data, forcing, n_steps)
    coeffs = rng.normal(size=(spec.order, spec.dim)) + (
        1j * rng.normal(size=(spec.order, spec.dim))
        if spec.field is Field.COMPLEX
        else 0.0
    )
    damp = roots.moduli ** (-float(n_steps - 1))
    coeffs = coeffs * damp[:, None]
    values = base.values + homogeneous_trajectory(roots, coeffs, n_steps)
    if spec.field is Field.REAL:
        values = values.real.astype(complex)
    return Trajectory(values=values)


def analyzed(roots_array, field=Field.COMPLEX, dim=1, norm=Norm.SUP):
    """Spec, recovered root set and determinant data for given roots."""
    spec = RecurrenceSpec.from_roots(roots_array, field=field, dim=dim, norm=norm)
    roots = characteristic_roots(spec)
    data = build(roots)
    return spec, roots, data


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)

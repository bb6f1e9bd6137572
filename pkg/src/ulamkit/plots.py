"""Figure rendering for the report paths.

matplotlib is imported lazily with the Agg backend so library users never
pay for it and headless runs never touch a display. Figures are a visual
companion to the CSV/JSON outputs; their bytes are not part of the
determinism contract.
"""

from __future__ import annotations

import numpy as np

from .constants import tail_bound
from .recurrence import RecurrenceSpec, RootSet, Trajectory
from .vandermonde import alternating_terms

__all__ = [
    "render_spectrum",
    "render_shadow",
    "render_adversary",
    "render_sweep",
]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _draw_roots(ax, roots: RootSet) -> None:
    angles = np.linspace(0.0, 2.0 * np.pi, 256)
    ax.plot(np.cos(angles), np.sin(angles), linestyle="--", linewidth=0.8)
    ax.scatter(roots.roots.real, roots.roots.imag, marker="x")
    limit = max(1.5, 1.2 * float(np.max(roots.moduli)))
    ax.set_xlim(-limit, limit)
    ax.set_ylim(-limit, limit)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title("characteristic roots")


def render_spectrum(path: str, roots: RootSet, data, best) -> None:
    """Root scatter plus, when available, the constant series convergence."""
    plt = _pyplot()
    if best is None or best.terms_used < 1:
        fig, ax = plt.subplots(figsize=(5, 5))
        _draw_roots(ax, roots)
    else:
        fig, (ax, ax_sum) = plt.subplots(1, 2, figsize=(10, 5))
        _draw_roots(ax, roots)
        terms = best.terms_used
        magnitudes = np.abs(alternating_terms(data, 1, terms)) / abs(data.det)
        partial = np.cumsum(magnitudes)
        s = np.arange(1, terms + 1)
        ax_sum.plot(s, partial, label="partial sum")
        ax_sum.fill_between(
            s,
            partial,
            partial + np.array([tail_bound(roots, data, int(k)) for k in s]),
            alpha=0.3,
            label="certified interval",
        )
        ax_sum.set_xlabel("terms")
        ax_sum.set_ylabel("constant")
        ax_sum.set_title("sharp constant convergence")
        ax_sum.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render_shadow(
    path: str,
    spec: RecurrenceSpec,
    traj: Trajectory,
    result,
    deviation: np.ndarray,
) -> None:
    """Trajectory vs shadow (first component) and the deviation budget."""
    plt = _pyplot()
    fig, (ax_seq, ax_dev) = plt.subplots(1, 2, figsize=(10, 4))
    n = np.arange(traj.length)
    ax_seq.plot(n, traj.values[:, 0].real, label="trajectory", linewidth=1.0)
    ax_seq.plot(
        n, result.shadow.values[:, 0].real, label="shadow", linestyle="--"
    )
    ax_seq.set_xlabel("n")
    ax_seq.set_ylabel("component 0 (real part)")
    ax_seq.set_title("trajectory and shadow")
    ax_seq.legend()

    ax_dev.semilogy(n, np.maximum(deviation, 1e-300), label="deviation")
    budget = result.bound + result.cert_error
    ax_dev.semilogy(n, np.maximum(budget, 1e-300), label="bound + certificate")
    ax_dev.set_xlabel("n")
    ax_dev.set_ylabel(f"{spec.norm.value} norm")
    ax_dev.set_title("deviation vs certified budget")
    ax_dev.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render_adversary(path: str, data, report) -> None:
    """Partial attained ratio against the sharp constant."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    terms = max(report.horizon, 1)
    magnitudes = np.abs(alternating_terms(data, 1, terms)) / abs(data.det)
    partial = np.cumsum(magnitudes)
    s = np.arange(1, terms + 1)
    ax.plot(s, partial, label="attainable ratio")
    ax.axhline(report.kr_value, linestyle="--", label="sharp constant")
    ax.scatter([report.horizon], [report.achieved_ratio], marker="o", zorder=3,
               label="achieved")
    ax.set_xlabel("forcing horizon")
    ax.set_ylabel("deviation / eps")
    ax.set_title("sharpness attainment")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render_sweep(path: str, csv_lines: list[str]) -> None:
    """Constants per grid row, parsed back from the emitted CSV lines."""
    plt = _pyplot()
    rows = [line.split(",") for line in csv_lines[1:]]
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows:
        index = [int(r[0]) for r in rows]
        classical = [float(r[-3]) for r in rows]
        best = [float(r[-2]) for r in rows]
        ratio = [float(r[-1]) for r in rows]
        ax.plot(index, classical, marker="o", label="classical")
        ax.plot(index, best, marker="s", label="sharp")
        ax.plot(index, ratio, marker=".", label="sharp / classical")
        ax.legend()
    ax.set_xlabel("grid index")
    ax.set_ylabel("constant")
    ax.set_title("constants across the sweep")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)

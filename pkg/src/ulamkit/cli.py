"""Command-line front end: parse problem files, run analyses, write results.

Commands
    analyze    roots, classification, and constants for a problem file
    constant   stability constants with truncation certificates
    shadow     reconstruct the exact solution near a trajectory CSV
    adversary  drive the worst-case forcing and measure the attained ratio
    sweep      tabulate constants over a grid of root configurations

Problem files and grids are JSON; sequences travel as CSV with one indexed
row per step; machine summaries are JSON. --out is treated as a stem: the
run writes <stem>.json, usually <stem>.csv, and <stem>.png unless --no-plot.
JSON and CSV bytes are deterministic for a fixed manifest and seed; figures
are rendered for humans and carry no determinism promise.

Exit codes: 0 success, 1 input error, 2 not Ulam stable, 3 degenerate
roots, 4 certified bound violated, 5 tolerance unreachable.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .adversary import sharpness_experiment
from .constants import (
    TERM_CAP,
    best_constant,
    classical_constant,
    tail_bound,
)
from .errors import (
    DegenerateRoots,
    InvalidLength,
    MissingForcing,
    NotApplicable,
    NotUlamStable,
    TolUnreachable,
    TooLarge,
)
from .oracle import det_bruteforce, reference_sum, vandermonde_matrix
from .recurrence import (
    Field,
    Norm,
    RecurrenceSpec,
    RootSet,
    SpectralClass,
    Trajectory,
    characteristic_roots,
    sequence_norms,
)
from .shadowing import shadow_coefficients, shadow_direct, verify_shadow
from .vandermonde import alternating_terms, build

__all__ = [
    "RunManifest",
    "read_spec",
    "read_trajectory_csv",
    "write_trajectory_csv",
    "read_grid",
    "main",
    "entrypoint",
]

_OUT_SUFFIXES = (".json", ".csv", ".png")

# Oracle determinants use the permutation expansion, so cap the order.
_VERIFY_ORDER_CAP = 6


class _UsageError(ValueError):
    """Raised for malformed command lines instead of argparse's exit(2)."""


class _VerifyFailure(Exception):
    """A --verify cross-check failed somewhere exceptions can't carry it."""


@dataclass(frozen=True)
class RunManifest:
    """Everything that determines a run's output bytes."""

    command: str
    spec: str | None = None
    traj: str | None = None
    eps: float | None = None
    tol: float | None = None
    out: str | None = None
    seed: int | None = None
    verify: bool = False
    no_plot: bool = False

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "spec": self.spec,
            "traj": self.traj,
            "eps": self.eps,
            "tol": self.tol,
            "out": self.out,
            "seed": self.seed,
            "verify": self.verify,
            "no_plot": self.no_plot,
            "version": __version__,
        }


def _fmt(value: float) -> str:
    """Shortest round-trip decimal form, identical across runs."""
    return repr(float(value))


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _parse_entry(obj, where: str) -> complex:
    if isinstance(obj, bool):
        raise ValueError(f"{where} must be a number or [re, im] pair, got {obj!r}")
    if isinstance(obj, (int, float)):
        return complex(obj)
    if (
        isinstance(obj, list)
        and len(obj) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj)
    ):
        return complex(obj[0], obj[1])
    raise ValueError(f"{where} must be a number or [re, im] pair, got {obj!r}")


def read_spec(path: str) -> RecurrenceSpec:
    """Load a problem file: {"p", "a", "field"?, "dim"?, "norm"?}.

    Coefficient entries are numbers or [re, im] pairs. field defaults to
    "real", dim to 1, norm to "sup". Diagnostics name the offending field.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"spec {path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"spec {path}: top level must be an object")
    unknown = set(raw) - {"p", "a", "field", "dim", "norm"}
    if unknown:
        raise ValueError(f"spec {path}: unknown field(s) {sorted(unknown)}")

    p = raw.get("p")
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise ValueError(f'spec {path}: field "p" must be a positive integer')
    a = raw.get("a")
    if not isinstance(a, list) or len(a) != p:
        raise ValueError(f'spec {path}: field "a" must list exactly {p} coefficients')
    coefficients = [
        _parse_entry(v, f'spec {path}: field "a" entry {i}') for i, v in enumerate(a)
    ]

    field_raw = raw.get("field", "real")
    try:
        field = Field(field_raw)
    except ValueError:
        raise ValueError(
            f'spec {path}: field "field" must be "real" or "complex", got {field_raw!r}'
        ) from None
    dim = raw.get("dim", 1)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ValueError(f'spec {path}: field "dim" must be a positive integer')
    norm_raw = raw.get("norm", "sup")
    try:
        norm = Norm(norm_raw)
    except ValueError:
        raise ValueError(
            f'spec {path}: field "norm" must be "sup" or "euclid", got {norm_raw!r}'
        ) from None

    try:
        return RecurrenceSpec(
            order=p, coefficients=coefficients, field=field, dim=dim, norm=norm
        )
    except ValueError as exc:
        raise ValueError(f"spec {path}: {exc}") from exc


def _trajectory_header(dim: int) -> list[str]:
    columns = ["n"]
    for k in range(dim):
        columns.extend([f"comp_{k}_re", f"comp_{k}_im"])
    return columns


def read_trajectory_csv(path: str, spec: RecurrenceSpec) -> Trajectory:
    """Load a trajectory CSV matching the spec's dimension.

    Header must be n,comp_0_re,comp_0_im,... and the n column must count
    from 0. Real-field specs reject nonzero imaginary entries.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    expected = _trajectory_header(spec.dim)
    if not rows:
        raise ValueError(f"trajectory {path}: empty file")
    if rows[0] != expected:
        raise ValueError(
            f"trajectory {path}: header must be {','.join(expected)}, "
            f"got {','.join(rows[0])}"
        )
    values = np.zeros((len(rows) - 1, spec.dim), dtype=complex)
    for i, row in enumerate(rows[1:]):
        where = f"trajectory {path}: row {i + 1}"
        if len(row) != len(expected):
            raise ValueError(f"{where}: expected {len(expected)} columns, got {len(row)}")
        try:
            cells = [float(cell) for cell in row]
        except ValueError:
            raise ValueError(f"{where}: non-numeric cell") from None
        if cells[0] != i:
            raise ValueError(f"{where}: n column must equal {i}, got {row[0]}")
        for k in range(spec.dim):
            re, im = cells[1 + 2 * k], cells[2 + 2 * k]
            if spec.field is Field.REAL and im != 0.0:
                raise ValueError(
                    f"{where}: comp_{k}_im must be 0 for a real-field spec"
                )
            values[i, k] = complex(re, im)
    return Trajectory(values=values)


def write_trajectory_csv(path: str, traj: Trajectory) -> None:
    lines = [",".join(_trajectory_header(traj.dim))]
    for i in range(traj.length):
        cells = [str(i)]
        for k in range(traj.dim):
            z = traj.values[i, k]
            cells.extend([_fmt(z.real), _fmt(z.imag)])
        lines.append(",".join(cells))
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_json(path: str, obj: dict) -> None:
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _stem(out: str) -> str:
    for suffix in _OUT_SUFFIXES:
        if out.endswith(suffix):
            return out[: -len(suffix)]
    return out


def _thread_count() -> int:
    raw = os.environ.get("ULAM_THREADS")
    if raw is None:
        return min(32, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"ULAM_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"ULAM_THREADS must be >= 1, got {value}")
    return value


def _constant_dict(result) -> dict:
    return {
        "value": float(result.value),
        "tail_bound": float(result.tail_bound),
        "terms": int(result.terms_used),
        "kind": result.kind.value,
    }


def _render(manifest: RunManifest, renderer, *args) -> None:
    """Render one figure; a drawing failure must not change the run result."""
    if manifest.out is None or manifest.no_plot:
        return
    try:
        renderer(_stem(manifest.out) + ".png", *args)
    except Exception as exc:  # noqa: BLE001
        print(f"warning: figure rendering failed: {exc}", file=sys.stderr)


def _verify_determinants(roots: RootSet, data) -> list[str]:
    """Cross-check product-formula determinants against the oracle."""
    if roots.order > _VERIFY_ORDER_CAP:
        return []
    problems = []
    expected = det_bruteforce(vandermonde_matrix(data.roots))
    if abs(data.det - expected) > 1e-10 * max(1.0, abs(expected)):
        problems.append(
            f"determinant mismatch: product {data.det!r} vs expansion {expected!r}"
        )
    for k in range(roots.order):
        expected_k = det_bruteforce(vandermonde_matrix(np.delete(data.roots, k)))
        if abs(data.reduced[k] - expected_k) > 1e-10 * max(1.0, abs(expected_k)):
            problems.append(f"reduced determinant {k} mismatch")
    return problems


def _verify_constant(roots: RootSet, data, best) -> list[str]:
    """Re-sum the series naively and check the certified bracket."""
    problems = _verify_determinants(roots, data)
    terms = best.terms_used
    ref_same = reference_sum(data, terms)
    scale = max(1.0, best.value)
    if abs(best.value - ref_same) > 1e-10 * scale:
        problems.append(
            f"partial sum mismatch: {best.value!r} vs reference {ref_same!r}"
        )
    ref_long = reference_sum(data, min(4 * max(terms, 1), 4 * TERM_CAP))
    if not (
        best.value - 1e-12 * scale
        <= ref_long
        <= best.value + best.tail_bound + 1e-12 * scale
    ):
        problems.append(
            f"long reference sum {ref_long!r} escapes the certified interval "
            f"[{best.value!r}, {(best.value + best.tail_bound)!r}]"
        )
    return problems


def _report_verify(problems: list[str]) -> int:
    for line in problems:
        print(f"verification failed: {line}", file=sys.stderr)
    if problems:
        return 4
    print("verification: all cross-checks passed")
    return 0


def _spectrum_lines(spec: RecurrenceSpec, roots: RootSet) -> list[str]:
    lines = [
        f"order {spec.order} field {spec.field.value} dim {spec.dim} "
        f"norm {spec.norm.value}"
    ]
    for k, (root, modulus) in enumerate(zip(roots.roots, roots.moduli)):
        lines.append(
            f"root {k}: {_fmt(root.real)} {_fmt(root.imag)}j  modulus {_fmt(modulus)}"
        )
    lines.append(f"classification: {roots.classification.value}")
    if roots.order > 1:
        lines.append(f"min separation: {_fmt(roots.min_separation)}")
    return lines


def _convergence_rows(roots: RootSet, data, terms: int) -> list[tuple[int, float, float]]:
    """Partial sums of the constant series with their tail bounds, per s."""
    rows = []
    partial = 0.0
    scale = 1.0 / abs(data.det)
    s = 1
    while s <= terms:
        count = min(4096, terms - s + 1)
        block = np.abs(alternating_terms(data, s, count))
        for offset in range(count):
            partial += float(block[offset]) * scale
            index = s + offset
            rows.append((index, partial, tail_bound(roots, data, index)))
        s += count
    return rows


def _analysis_payload(spec: RecurrenceSpec, roots: RootSet) -> dict:
    return {
        "order": spec.order,
        "field": spec.field.value,
        "dim": spec.dim,
        "norm": spec.norm.value,
        "roots": [_pair(z) for z in roots.roots],
        "moduli": [float(m) for m in roots.moduli],
        "min_separation": float(roots.min_separation),
        "classification": roots.classification.value,
        "residual_bound": float(roots.residual_bound),
    }


def _emit_analysis(
    manifest: RunManifest,
    payload: dict,
    csv_lines: list[str] | None,
) -> None:
    if manifest.out is None:
        return
    stem = _stem(manifest.out)
    _write_json(stem + ".json", {"manifest": manifest.as_dict(), "result": payload})
    if csv_lines is not None:
        _write_text(stem + ".csv", "\n".join(csv_lines) + "\n")


def cmd_analyze(manifest: RunManifest) -> int:
    spec = read_spec(manifest.spec)
    roots = characteristic_roots(spec)
    for line in _spectrum_lines(spec, roots):
        print(line)

    payload = _analysis_payload(spec, roots)
    payload.update({"classical": None, "best": None, "ulam_stable": None})

    if roots.classification is SpectralClass.ON_UNIT_CIRCLE:
        payload["ulam_stable"] = False
        _emit_analysis(manifest, payload, None)
        print(
            "not Ulam stable: a characteristic root lies within tolerance of "
            "the unit circle, so no finite stability constant exists",
            file=sys.stderr,
        )
        return 2

    payload["ulam_stable"] = True
    classical = classical_constant(roots)
    payload["classical"] = _constant_dict(classical)
    print(f"classical constant: {_fmt(classical.value)}")

    if roots.classification is SpectralClass.NEAR_DEGENERATE:
        _emit_analysis(manifest, payload, None)
        print(
            "degenerate roots: separations too small for the sharp-constant "
            "series",
            file=sys.stderr,
        )
        return 3

    tol = manifest.tol if manifest.tol is not None else 1e-10
    data = build(roots)
    best = None
    if roots.classification is SpectralClass.ALL_OUTSIDE_UNIT_DISC:
        best = best_constant(roots, data, tol=tol)
        payload["best"] = _constant_dict(best)
        print(
            f"sharp constant: {_fmt(best.value)}  "
            f"(terms {best.terms_used}, tail {_fmt(best.tail_bound)})"
        )
    else:
        print("sharp constant: not applicable (spectrum not entirely outside)")

    csv_lines = None
    if best is not None:
        csv_lines = ["s,partial,tail"]
        for index, partial, tail in _convergence_rows(roots, data, best.terms_used):
            csv_lines.append(f"{index},{_fmt(partial)},{_fmt(tail)}")
    _emit_analysis(manifest, payload, csv_lines)

    from . import plots

    _render(manifest, plots.render_spectrum, roots, data, best)

    if manifest.verify:
        problems = _verify_determinants(roots, data)
        if best is not None:
            problems = _verify_constant(roots, data, best)
        return _report_verify(problems)
    return 0


def cmd_constant(manifest: RunManifest) -> int:
    spec = read_spec(manifest.spec)
    roots = characteristic_roots(spec)
    tol = manifest.tol if manifest.tol is not None else 1e-10

    # raises NotUlamStable on the unit circle (exit 2)
    classical = classical_constant(roots)
    if roots.classification is SpectralClass.NEAR_DEGENERATE:
        print(f"classical constant: {_fmt(classical.value)}")
        print(
            "degenerate roots: separations too small for the sharp-constant "
            "series",
            file=sys.stderr,
        )
        return 3

    data = build(roots)
    best = None
    if roots.classification is SpectralClass.ALL_OUTSIDE_UNIT_DISC:
        best = best_constant(roots, data, tol=tol)

    print(f"classical constant: {_fmt(classical.value)}")
    if best is not None:
        print(
            f"sharp constant: {_fmt(best.value)} "
            f"in [{_fmt(best.value)}, {_fmt(best.value + best.tail_bound)}] "
            f"(terms {best.terms_used})"
        )
    else:
        print("sharp constant: not applicable (spectrum not entirely outside)")

    payload = _analysis_payload(spec, roots)
    payload["classical"] = _constant_dict(classical)
    payload["best"] = _constant_dict(best) if best is not None else None
    if manifest.out is not None:
        stem = _stem(manifest.out)
        _write_json(stem + ".json", {"manifest": manifest.as_dict(), "result": payload})
        if best is not None:
            lines = ["s,partial,tail"]
            for index, partial, tail in _convergence_rows(roots, data, best.terms_used):
                lines.append(f"{index},{_fmt(partial)},{_fmt(tail)}")
            _write_text(stem + ".csv", "\n".join(lines) + "\n")

    from . import plots

    _render(manifest, plots.render_spectrum, roots, data, best)

    if manifest.verify:
        problems = (
            _verify_constant(roots, data, best)
            if best is not None
            else _verify_determinants(roots, data)
        )
        return _report_verify(problems)
    return 0


def _coefficient_certificates(roots: RootSet, data, eps: float, m: int) -> np.ndarray:
    """Per-root truncation bound on corrected coefficients after m residuals."""
    return (
        np.abs(data.reduced / data.det)
        * eps
        * roots.moduli ** (-float(m))
        / (roots.moduli - 1.0)
    )


def cmd_shadow(manifest: RunManifest) -> int:
    spec = read_spec(manifest.spec)
    traj = read_trajectory_csv(manifest.traj, spec)
    if traj.length < spec.order + 1:
        raise InvalidLength(
            f"trajectory has {traj.length} rows; need at least order+1 = "
            f"{spec.order + 1}"
        )
    roots = characteristic_roots(spec)
    tol = manifest.tol if manifest.tol is not None else 1e-10
    data = build(roots)
    best = best_constant(roots, data, tol=tol)
    result = shadow_direct(spec, roots, data, traj, best)
    report = verify_shadow(spec, traj, result)

    print(f"eps measured: {_fmt(result.eps)}")
    print(f"certified bound: {_fmt(result.bound)}")
    print(f"max deviation: {_fmt(result.max_deviation)}")
    print(f"max certificate: {_fmt(float(np.max(result.cert_error)))}")
    print(
        f"shadow residual: {_fmt(report.residual)} "
        f"(limit {_fmt(report.residual_limit)})"
    )
    print(f"verification: {'pass' if report.passed else 'FAIL'}")

    deviation = sequence_norms(traj.values - result.shadow.values, spec.norm)
    if manifest.out is not None:
        stem = _stem(manifest.out)
        header = _trajectory_header(traj.dim) + ["cert_error", "deviation"]
        lines = [",".join(header)]
        for i in range(traj.length):
            cells = [str(i)]
            for k in range(traj.dim):
                z = result.shadow.values[i, k]
                cells.extend([_fmt(z.real), _fmt(z.imag)])
            cells.extend([_fmt(result.cert_error[i]), _fmt(deviation[i])])
            lines.append(",".join(cells))
        _write_text(stem + ".csv", "\n".join(lines) + "\n")
        payload = {
            "eps": float(result.eps),
            "bound": float(result.bound),
            "max_deviation": float(result.max_deviation),
            "max_cert_error": float(np.max(result.cert_error)),
            "max_imag_discarded": float(result.max_imag_discarded),
            "residual": float(report.residual),
            "residual_limit": float(report.residual_limit),
            "coefficients": [[_pair(z) for z in row] for row in result.coefficients],
            "pass": bool(report.passed),
        }
        _write_json(stem + ".json", {"manifest": manifest.as_dict(), "result": payload})

    from . import plots

    _render(manifest, plots.render_shadow, spec, traj, result, deviation)

    if manifest.verify:
        problems = _verify_determinants(roots, data)
        corrected = shadow_coefficients(spec, roots, data, traj)
        certs = _coefficient_certificates(
            roots, data, result.eps, traj.length - spec.order
        )
        allowance = 1e-9 * (1.0 + float(np.max(np.abs(result.coefficients))))
        diff = np.max(np.abs(result.coefficients - corrected), axis=1)
        if np.any(diff > 2.0 * certs + allowance):
            problems.append(
                "coefficient paths disagree beyond combined certificates"
            )
        code = _report_verify(problems)
        if code != 0:
            return code

    return 0 if report.passed else 4


def cmd_adversary(manifest: RunManifest) -> int:
    spec = read_spec(manifest.spec)
    roots = characteristic_roots(spec)
    eps = manifest.eps if manifest.eps is not None else 1.0
    tol = manifest.tol if manifest.tol is not None else 0.01
    data = build(roots)
    best = best_constant(roots, data)
    report = sharpness_experiment(spec, roots, data, best, eps=eps, tol=tol)

    print(f"sharp constant: {_fmt(report.kr_value)}")
    print(f"achieved ratio: {_fmt(report.achieved_ratio)}")
    print(f"gap: {_fmt(report.gap)}  (budget {_fmt(tol * report.kr_value)})")
    print(f"series horizon: {report.horizon}")
    print(f"zero-shadow coefficient norm: {_fmt(report.shadow_coefficient_norm)}")

    if manifest.out is not None:
        stem = _stem(manifest.out)
        payload = {
            "ratio": float(report.achieved_ratio),
            "kr": float(report.kr_value),
            "gap": float(report.gap),
            "terms": int(report.horizon),
            "tail_budget": float(report.tail_budget),
            "sup_window": float(report.sup_window),
            "shadow_coefficient_norm": float(report.shadow_coefficient_norm),
            "pass": bool(report.gap <= tol * report.kr_value),
        }
        _write_json(stem + ".json", {"manifest": manifest.as_dict(), "result": payload})
        lines = ["s,partial_ratio"]
        partial = 0.0
        scale = 1.0 / abs(data.det)
        if report.horizon >= 1:
            block = np.abs(alternating_terms(data, 1, report.horizon))
            for idx, magnitude in enumerate(block, start=1):
                partial += float(magnitude) * scale
                lines.append(f"{idx},{_fmt(partial)}")
        _write_text(stem + ".csv", "\n".join(lines) + "\n")

    from . import plots

    _render(manifest, plots.render_adversary, data, report)

    if manifest.verify:
        problems = _verify_determinants(roots, data)
        floor = reference_sum(data, report.horizon)
        scale = max(1.0, report.kr_value)
        if report.achieved_ratio < floor - 1e-9 * scale:
            problems.append(
                f"ratio {report.achieved_ratio!r} below reference partial {floor!r}"
            )
        if report.achieved_ratio > report.kr_value + best.tail_bound + 1e-9 * scale:
            problems.append(
                f"ratio {report.achieved_ratio!r} above the certified constant"
            )
        code = _report_verify(problems)
        if code != 0:
            return code

    return 0 if report.gap <= tol * report.kr_value else 4


def read_grid(path: str) -> tuple[int, list[list[complex]]]:
    """Load a sweep grid: {"p", "grid": [[candidates per root]], "polar"?}.

    Candidates are numbers or two-element lists, read as [re, im] by default
    and as [modulus, angle] when "polar" is true.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"grid {path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"grid {path}: top level must be an object")
    unknown = set(raw) - {"p", "grid", "polar"}
    if unknown:
        raise ValueError(f"grid {path}: unknown field(s) {sorted(unknown)}")
    p = raw.get("p")
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise ValueError(f'grid {path}: field "p" must be a positive integer')
    polar = raw.get("polar", False)
    if not isinstance(polar, bool):
        raise ValueError(f'grid {path}: field "polar" must be true or false')
    grid = raw.get("grid")
    if not isinstance(grid, list) or len(grid) != p:
        raise ValueError(f'grid {path}: field "grid" must list {p} candidate lists')
    lists: list[list[complex]] = []
    for k, candidates in enumerate(grid):
        if not isinstance(candidates, list):
            raise ValueError(f'grid {path}: field "grid" entry {k} must be a list')
        parsed = []
        for j, value in enumerate(candidates):
            where = f'grid {path}: field "grid" entry {k}[{j}]'
            z = _parse_entry(value, where)
            if polar and not isinstance(value, (int, float)):
                z = complex(value[0] * np.cos(value[1]), value[0] * np.sin(value[1]))
            parsed.append(z)
        lists.append(parsed)
    return p, lists


def _sweep_header(p: int) -> list[str]:
    columns = ["index"]
    for k in range(p):
        columns.extend([f"root_{k}_re", f"root_{k}_im"])
    columns.extend(["classical", "best", "ratio"])
    return columns


def _sweep_point(item, tol: float, verify: bool):
    """Evaluate one grid point; returns (index, csv row or None, log or None)."""
    index, combo = item
    roots = RootSet.from_roots(np.array(combo, dtype=complex))
    if roots.on_unit_circle:
        return index, None, f"skipped point {index}: root on the unit circle"
    if roots.near_degenerate:
        return index, None, f"skipped point {index}: near-degenerate roots"
    if roots.classification is not SpectralClass.ALL_OUTSIDE_UNIT_DISC:
        return index, None, (
            f"skipped point {index}: sharp constant not applicable "
            "(spectrum not entirely outside)"
        )
    data = build(roots)
    if verify:
        problems = _verify_determinants(roots, data)
        if problems:
            raise _VerifyFailure(f"point {index}: {problems[0]}")
    classical = classical_constant(roots).value
    best = best_constant(roots, data, tol=tol).value
    cells = [str(index)]
    for z in roots.roots:
        cells.extend([_fmt(z.real), _fmt(z.imag)])
    cells.extend([_fmt(classical), _fmt(best), _fmt(best / classical)])
    return index, ",".join(cells), None


def cmd_sweep(manifest: RunManifest) -> int:
    p, lists = read_grid(manifest.spec)
    tol = manifest.tol if manifest.tol is not None else 1e-10
    points = list(itertools.product(*lists))
    threads = _thread_count()

    results = []
    if points:
        try:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(
                    pool.map(
                        lambda item: _sweep_point(item, tol, manifest.verify),
                        enumerate(points),
                    )
                )
        except _VerifyFailure as exc:
            print(f"verification failed: {exc}", file=sys.stderr)
            return 4

    lines = [",".join(_sweep_header(p))]
    kept = 0
    for _, row, log in results:
        if log is not None:
            print(log, file=sys.stderr)
        if row is not None:
            lines.append(row)
            kept += 1
    text = "\n".join(lines) + "\n"

    if manifest.out is None:
        sys.stdout.write(text)
    else:
        stem = _stem(manifest.out)
        _write_text(stem + ".csv", text)
        payload = {
            "points": len(points),
            "rows": kept,
            "skipped": len(points) - kept,
        }
        _write_json(stem + ".json", {"manifest": manifest.as_dict(), "result": payload})
        print(f"sweep: {kept} rows, {len(points) - kept} skipped")

        from . import plots

        _render(manifest, plots.render_sweep, lines)
    return 0


_DISPATCH = {
    "analyze": cmd_analyze,
    "constant": cmd_constant,
    "shadow": cmd_shadow,
    "adversary": cmd_adversary,
    "sweep": cmd_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ulam",
        description=(
            "Stability constants, shadow solutions, and worst-case "
            "perturbations for linear recurrences"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sub, traj=False, eps=False):
        sub.add_argument("--spec", required=True, help="problem JSON path")
        if traj:
            sub.add_argument("--traj", required=True, help="trajectory CSV path")
        if eps:
            sub.add_argument(
                "--eps", type=float, default=None, help="perturbation size (default 1)"
            )
        sub.add_argument("--tol", type=float, default=None, help="tolerance override")
        sub.add_argument("--out", default=None, help="output stem for .json/.csv/.png")
        sub.add_argument("--seed", type=int, default=None, help="recorded run seed")
        sub.add_argument(
            "--verify", action="store_true", help="run brute-force cross-checks"
        )
        sub.add_argument(
            "--no-plot", action="store_true", help="skip the rendered figure"
        )

    common(commands.add_parser("analyze", help="roots, classification, constants"))
    common(commands.add_parser("constant", help="stability constants with certificates"))
    common(commands.add_parser("shadow", help="reconstruct the nearby exact solution"),
           traj=True)
    common(commands.add_parser("adversary", help="attain the sharp constant"),
           eps=True)
    common(commands.add_parser("sweep", help="tabulate constants over a root grid"))
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    manifest = RunManifest(
        command=args.command,
        spec=args.spec,
        traj=getattr(args, "traj", None),
        eps=getattr(args, "eps", None),
        tol=args.tol,
        out=args.out,
        seed=args.seed,
        verify=args.verify,
        no_plot=args.no_plot,
    )
    try:
        return _DISPATCH[manifest.command](manifest)
    except NotUlamStable as exc:
        print(f"not Ulam stable: {exc}", file=sys.stderr)
        return 2
    except DegenerateRoots as exc:
        print(f"degenerate roots: {exc}", file=sys.stderr)
        return 3
    except TolUnreachable as exc:
        print(f"tolerance unreachable: {exc}", file=sys.stderr)
        return 5
    except (NotApplicable, MissingForcing, InvalidLength, TooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())

"""Deterministic artifact writers and loaders.

Every writer here produces byte-identical output for identical inputs: keys
are sorted, floats use Python's shortest round-trip repr, newlines are
always "\\n", and nothing time- or host-dependent is ever serialized (wall
times in particular stay out of artifacts; they are reporting-only).  CSV
files open with a single comment line holding a JSON metadata object so a
file is self-describing without a sidecar.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .ambiguity import AmbiguitySurface, DelayDopplerRegion
from .optimize import OptimizeReport, StudyReport
from .phasecode import PhaseCode
from .waveform import ModulationIndices, SampledWaveform

_STUDY_COLUMNS = ("trial", "seed", "area_init", "area_opt", "gain",
                  "gain_rel_best", "isr_init_db", "isr_final_db",
                  "rms_ratio", "iterations", "feasible", "stop_reason",
                  "error")


def _jsonable(obj):
    """Recursively convert numpy containers to plain Python types."""
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        # bool subclasses int, so this must run before the int branch
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _write_json(obj, path) -> None:
    text = json.dumps(_jsonable(obj), sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", newline="\n")


def _read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def _fmt(x) -> str:
    """Shortest round-trip decimal form of a float (deterministic)."""
    return repr(float(x))


def _write_csv(path, meta: dict, header: list, rows) -> None:
    lines = ["# " + json.dumps(_jsonable(meta), sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_csv_meta(path) -> dict:
    """Metadata object from the leading comment line of a package CSV."""
    with open(path) as f:
        first = f.readline()
    if not first.startswith("# "):
        raise ValueError("missing metadata comment line")
    return json.loads(first[2:])


# -- modulation indices ------------------------------------------------------

def save_indices(idx: ModulationIndices, path) -> None:
    _write_json(idx.to_dict(), path)


def load_indices(path) -> ModulationIndices:
    return ModulationIndices.from_dict(_read_json(path))


# -- regions ------------------------------------------------------------------

def save_region(region: DelayDopplerRegion, path) -> None:
    _write_json(region.to_dict(), path)


def load_region(path) -> DelayDopplerRegion:
    return DelayDopplerRegion.from_dict(_read_json(path))


# -- phase codes ---------------------------------------------------------------

def save_phase_code(code: PhaseCode, path) -> None:
    _write_json(code.to_dict(), path)


def load_phase_code(path) -> PhaseCode:
    return PhaseCode.from_dict(_read_json(path))


# -- sampled series -----------------------------------------------------------

def waveform_csv(w: SampledWaveform, path) -> None:
    meta = {"artifact": "waveform", "fs": w.fs, "T": w.T,
            "num_samples": w.num_samples, "provenance": w.provenance}
    rows = ((_fmt(t), _fmt(s.real), _fmt(s.imag))
            for t, s in zip(w.t, w.samples))
    _write_csv(path, meta, ["t", "re", "im"], rows)


def spectrum_csv(freqs: np.ndarray, values: np.ndarray, path,
                 meta: dict | None = None) -> None:
    full = {"artifact": "spectrum"}
    full.update(meta or {})
    rows = ((_fmt(f), _fmt(v.real), _fmt(np.imag(v)))
            for f, v in zip(freqs, np.asarray(values, dtype=complex)))
    _write_csv(path, full, ["f", "re", "im"], rows)


def acf_csv(taus: np.ndarray, values: np.ndarray, path,
            meta: dict | None = None) -> None:
    full = {"artifact": "acf"}
    full.update(meta or {})
    rows = ((_fmt(t), _fmt(v.real), _fmt(np.imag(v)))
            for t, v in zip(taus, np.asarray(values, dtype=complex)))
    _write_csv(path, full, ["tau", "re", "im"], rows)


def read_series_csv(path):
    """(first column, complex re+jim column) of a waveform/spectrum/acf CSV."""
    data = np.loadtxt(path, delimiter=",", skiprows=2)
    data = np.atleast_2d(data)
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


# -- ambiguity surfaces ---------------------------------------------------------

def surface_binary(surface: AmbiguitySurface, base_path) -> tuple:
    """Write |chi| as row-major float64 with a JSON sidecar.

    ``base_path`` gets the extensions ".f64" (raw magnitudes, C order,
    delay-major) and ".json" (grids plus provenance).  Returns both paths.
    """
    base = Path(base_path)
    bin_path = base.with_suffix(".f64")
    meta_path = base.with_suffix(".json")
    mag = np.ascontiguousarray(np.abs(surface.values), dtype=np.float64)
    bin_path.write_bytes(mag.tobytes())
    _write_json({"artifact": "ambiguity_surface", "dtype": "float64",
                 "order": "C", "shape": list(mag.shape),
                 "tau_grid": surface.tau_grid, "nu_grid": surface.nu_grid,
                 "provenance": surface.provenance}, meta_path)
    return bin_path, meta_path


def load_surface_magnitude(base_path):
    """(tau_grid, nu_grid, |chi| array) from a surface_binary pair."""
    base = Path(base_path)
    meta = _read_json(base.with_suffix(".json"))
    mag = np.frombuffer(base.with_suffix(".f64").read_bytes(),
                        dtype=np.float64).reshape(meta["shape"])
    return (np.asarray(meta["tau_grid"]), np.asarray(meta["nu_grid"]), mag)


# -- optimization reports --------------------------------------------------------

def report_to_dict(report: OptimizeReport) -> dict:
    """JSON form of a solve report.  Wall time is deliberately omitted so
    artifacts are byte-identical across reruns."""
    return {
        "kind": report.kind,
        "problem": report.problem,
        "idx_init": report.idx_init.to_dict(),
        "idx_opt": report.idx_opt.to_dict(),
        "objective_init": report.objective_init,
        "objective_final": report.objective_final,
        "objective_history": list(report.objective_history),
        "area_init": report.area_init,
        "area_final": report.area_final,
        "gain": report.gain,
        "isr_init_db": report.isr_init_db,
        "isr_final_db": report.isr_final_db,
        "volume_init": report.volume_init,
        "volume_final": report.volume_final,
        "rms_ratio_final": report.rms_ratio_final,
        "constraint_residual": report.constraint_residual,
        "feasible": report.feasible,
        "iterations": report.iterations,
        "outer_iterations": report.outer_iterations,
        "stop_reason": report.stop_reason,
        "kkt_residual": report.kkt_residual,
        "outer_history": report.outer_history,
    }


def save_report(report: OptimizeReport, path) -> None:
    _write_json(report_to_dict(report), path)


# -- trial studies ----------------------------------------------------------------

def study_csv(study: StudyReport, path) -> None:
    cfg = study.config
    meta = {"artifact": "trial_study", "num_tones": cfg.num_tones,
            "tbp": cfg.tbp, "symmetry": cfg.symmetry,
            "num_trials": cfg.num_trials, "seed": cfg.seed,
            "delta": cfg.delta, "zero_pad_to": cfg.zero_pad_to,
            "aggregates": study.aggregates}
    rows = []
    for r in study.rows:
        cells = []
        for col in _STUDY_COLUMNS:
            v = r.get(col, "")
            if isinstance(v, bool):
                cells.append("true" if v else "false")
            elif isinstance(v, (int, np.integer)):
                cells.append(str(int(v)))
            elif isinstance(v, (float, np.floating)):
                cells.append(_fmt(v))
            else:
                cells.append(str(v))
        rows.append(cells)
    _write_csv(path, meta, list(_STUDY_COLUMNS), rows)


def save_study(study: StudyReport, path) -> None:
    cfg = study.config
    _write_json({
        "artifact": "trial_study",
        "config": {"num_tones": cfg.num_tones, "tbp": cfg.tbp,
                   "symmetry": cfg.symmetry, "num_trials": cfg.num_trials,
                   "seed": cfg.seed, "delta": cfg.delta,
                   "zero_pad_to": cfg.zero_pad_to, "T": cfg.T,
                   "threads": cfg.threads},
        "rows": study.rows,
        "aggregates": study.aggregates,
    }, path)

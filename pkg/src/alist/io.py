"""File formats: JSON schemas for potentials, scattering data and evolution
reports, plus the per-site reconstruction CSV.

Complex numbers are serialized as [re, im] pairs.  Schema violations raise
:class:`SchemaError`; numeric invariant violations surface as ``ValueError``
from the domain constructors so callers can distinguish the two.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .circle import CircleFunction, make_grid
from .evolution import EvolutionReport
from .lattice import Potential
from .scattering import ScatteringData

__all__ = [
    "SchemaError",
    "read_potential",
    "write_potential",
    "read_scattering",
    "write_scattering",
    "write_site_csv",
    "write_evolution_report",
    "read_evolution_report",
    "write_evolution_series",
]


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


def _pairs_from_complex(values: np.ndarray) -> list:
    return [[float(v.real), float(v.imag)] for v in values]


def _complex_from_pairs(pairs, field: str) -> np.ndarray:
    if not isinstance(pairs, list):
        raise SchemaError(f"field {field!r} must be a list of [re, im] pairs")
    out = np.empty(len(pairs), dtype=complex)
    for i, pair in enumerate(pairs):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise SchemaError(f"entry {i} of {field!r} is not an [re, im] pair")
        out[i] = complex(pair[0], pair[1])
    return out


def _load_json(path) -> dict:
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top-level JSON object expected")
    return doc


def read_potential(path) -> Potential:
    """Read `{"n_min": int, "q": [[re, im], ...]}`."""
    doc = _load_json(path)
    if set(doc) != {"n_min", "q"}:
        raise SchemaError(f"{path}: expected exactly the keys 'n_min' and 'q'")
    n_min = doc["n_min"]
    if not isinstance(n_min, int) or isinstance(n_min, bool):
        raise SchemaError(f"{path}: 'n_min' must be an integer")
    values = _complex_from_pairs(doc["q"], "q")
    return Potential(n_min, values)


def write_potential(q: Potential, path) -> None:
    doc = {"n_min": int(q.n_min), "q": _pairs_from_complex(q.values)}
    with open(path, "w") as handle:
        json.dump(doc, handle)
        handle.write("\n")


def read_scattering(path) -> ScatteringData:
    """Read `{"N": int, "a": pairs, "b": pairs, "r": pairs, "c_inf": real}`."""
    doc = _load_json(path)
    if set(doc) != {"N", "a", "b", "r", "c_inf"}:
        raise SchemaError(f"{path}: expected keys N, a, b, r, c_inf")
    n = doc["N"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 4 or n % 2:
        raise SchemaError(f"{path}: 'N' must be an even integer >= 4")
    c_inf = doc["c_inf"]
    if not isinstance(c_inf, (int, float)) or isinstance(c_inf, bool):
        raise SchemaError(f"{path}: 'c_inf' must be a real number")
    grid = make_grid(n)
    fields = {}
    for name in ("a", "b", "r"):
        values = _complex_from_pairs(doc[name], name)
        if len(values) != n:
            raise SchemaError(f"{path}: field {name!r} must have exactly N={n} entries")
        fields[name] = CircleFunction(grid, values)
    return ScatteringData(grid=grid, c_inf=float(c_inf), **fields)


def write_scattering(data: ScatteringData, path) -> None:
    doc = {
        "N": int(data.grid.n),
        "a": _pairs_from_complex(data.a.samples),
        "b": _pairs_from_complex(data.b.samples),
        "r": _pairs_from_complex(data.r.samples),
        "c_inf": float(data.c_inf),
    }
    with open(path, "w") as handle:
        json.dump(doc, handle)
        handle.write("\n")


def write_site_csv(records, path) -> None:
    """Per-site reconstruction report: n, re_q, im_q, residual, iterations."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["n", "re_q", "im_q", "residual", "iterations"])
        for rec in records:
            writer.writerow(
                [rec.n, repr(rec.value.real), repr(rec.value.imag), repr(rec.residual), rec.iterations]
            )


def _potential_doc(q: Potential | None):
    if q is None:
        return None
    return {"n_min": int(q.n_min), "q": _pairs_from_complex(q.values)}


def write_evolution_report(report: EvolutionReport, path) -> None:
    doc = {
        "t": report.t,
        "q_ist": _potential_doc(report.q_ist),
        "q_rk4": _potential_doc(report.q_rk4),
        "sup_error": report.sup_error,
        "l2_error": report.l2_error,
        "c_inf_drift": report.c_inf_drift,
        "c_inf_drift_rk4": report.c_inf_drift_rk4,
        "edge_amplitude_rk4": report.edge_amplitude_rk4,
    }
    with open(path, "w") as handle:
        json.dump(doc, handle)
        handle.write("\n")


def read_evolution_report(path) -> dict:
    """Raw report document (used by tooling and tests; no domain rebuild)."""
    return _load_json(path)


def write_evolution_series(reports, path) -> None:
    """CSV time series over several output times."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "sup_error", "l2_error", "c_inf_drift", "c_inf_drift_rk4"])
        for rep in reports:
            writer.writerow([
                repr(rep.t),
                "" if rep.sup_error is None else repr(rep.sup_error),
                "" if rep.l2_error is None else repr(rep.l2_error),
                "" if rep.c_inf_drift is None else repr(rep.c_inf_drift),
                "" if rep.c_inf_drift_rk4 is None else repr(rep.c_inf_drift_rk4),
            ])


def default_csv_path(output_path) -> Path:
    out = Path(output_path)
    return out.with_suffix(out.suffix + ".sites.csv") if out.suffix != ".json" else out.with_suffix(".sites.csv")

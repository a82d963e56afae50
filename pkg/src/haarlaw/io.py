"""Spectrum files, evaluation grids and sample sets on disk.

Floats are written with 17 significant digits, which round-trips doubles.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidSpectrum
from .spectrum import Spectrum, from_pairs

FLOAT_FMT = "%.17g"


def fmt(x: float) -> str:
    return FLOAT_FMT % x


def spectrum_to_dict(s: Spectrum) -> dict:
    return {"eigenvalues": [{"value": v, "multiplicity": n}
                            for v, n in zip(s.values, s.multiplicities)]}


def spectrum_from_dict(obj) -> Spectrum:
    try:
        entries = obj["eigenvalues"]
        pairs = [(float(e["value"]), e["multiplicity"]) for e in entries]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpectrum(f"malformed spectrum object: {exc}") from None
    for _, n in pairs:
        if isinstance(n, bool) or not isinstance(n, int):
            raise InvalidSpectrum("multiplicities must be integers")
    return from_pairs(pairs)


def write_spectrum(s: Spectrum, path, kind: str | None = None) -> None:
    """Write as JSON, or as ``value,multiplicity`` lines if the suffix is .csv."""
    path = Path(path)
    if (kind or path.suffix.lstrip(".").lower()) == "csv":
        lines = [f"{fmt(v)},{n}" for v, n in zip(s.values, s.multiplicities)]
        path.write_text("\n".join(lines) + "\n")
    else:
        path.write_text(json.dumps(spectrum_to_dict(s), indent=2) + "\n")


def read_spectrum(path) -> Spectrum:
    """Read a spectrum file; JSON unless the suffix is .csv.

    Repeated values in a file are merged exactly (no clustering).
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return _spectrum_from_csv(text)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpectrum(f"{path}: invalid JSON ({exc})") from None
    return spectrum_from_dict(obj)


def _spectrum_from_csv(text: str) -> Spectrum:
    pairs = []
    for row in csv.reader(io.StringIO(text)):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 2:
            raise InvalidSpectrum(f"expected value,multiplicity, got {row!r}")
        try:
            value = float(row[0])
        except ValueError:
            if not pairs and row[0].strip().lower() == "value":
                continue  # header
            raise InvalidSpectrum(f"bad value {row[0]!r}") from None
        try:
            mult = int(row[1])
        except ValueError:
            raise InvalidSpectrum(f"bad multiplicity {row[1]!r}") from None
        pairs.append((value, mult))
    return from_pairs(pairs)


def grid_csv(x, values, header=("x", "value")) -> str:
    """CSV text for a grid; complex values get real and imaginary columns."""
    x = np.asarray(x, dtype=float)
    values = np.asarray(values)
    out = io.StringIO()
    if np.iscomplexobj(values):
        out.write(f"{header[0]},re,im\n")
        for xi, v in zip(x, values):
            out.write(f"{fmt(xi)},{fmt(v.real)},{fmt(v.imag)}\n")
    else:
        out.write(",".join(header) + "\n")
        for xi, v in zip(x, values):
            out.write(f"{fmt(xi)},{fmt(float(v))}\n")
    return out.getvalue()


def multi_grid_csv(x, columns: dict) -> str:
    """CSV with an ``x`` column and one column per named series."""
    names = list(columns)
    out = io.StringIO()
    out.write(",".join(["x"] + names) + "\n")
    for i, xi in enumerate(np.asarray(x, dtype=float)):
        out.write(",".join([fmt(xi)] + [fmt(float(columns[n][i])) for n in names]) + "\n")
    return out.getvalue()


def read_grid(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def write_samples(samples, path) -> Path:
    """Single-column CSV plus a ``.json`` sidecar; returns the sidecar path."""
    path = Path(path)
    path.write_text("value\n" + "".join(fmt(v) + "\n" for v in samples.values))
    sidecar = path.with_suffix(".json")
    meta = {"seed": samples.seed, "N": samples.n, "spectrum": spectrum_to_dict(samples.spectrum)}
    sidecar.write_text(json.dumps(meta, indent=2) + "\n")
    return sidecar


def read_samples(path):
    from .montecarlo import SampleSet

    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    values = np.loadtxt(path, skiprows=1, ndmin=1)
    if len(values) != meta["N"]:
        raise InvalidSpectrum("sample file and sidecar disagree on N")
    return SampleSet(spectrum_from_dict(meta["spectrum"]), int(meta["seed"]), values)


def to_jsonable(obj):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"

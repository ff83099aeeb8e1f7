"""Reading and writing signals, coefficient arrays and reports.

CSV files carry their metadata as '# ' comment lines holding one JSON object
each ({"grid": ...}, {"lattice": ...}, {"domain": ...}, {"config": ...});
JSON files carry the same keys at top level. Floats are written with 17
significant digits so round trips are exact.
"""
from __future__ import annotations

import io as _io
import json
import math
from pathlib import Path

import numpy as np

from . import gabor as gb
from . import signal as sg
from . import wilson as wl
from .errors import ValidationError

FORMATS = ("csv", "json")
_FMT = "%.17g"


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def format_of(path, default: str = "json") -> str:
    suffix = Path(path).suffix.lower().lstrip(".")
    return suffix if suffix in FORMATS else default


def _csv_text(meta: list, columns: list, data: np.ndarray) -> str:
    buf = _io.StringIO()
    for m in meta:
        buf.write("# " + json.dumps(_clean(m), sort_keys=True) + "\n")
    buf.write(",".join(columns) + "\n")
    if data.size:
        np.savetxt(buf, data, fmt=_FMT, delimiter=",")
    return buf.getvalue()


def _read_csv(text: str):
    meta = {}
    lines = text.splitlines()
    body = []
    header = None
    for line in lines:
        if line.startswith("#"):
            meta.update(json.loads(line[1:].strip()))
        elif header is None and line.strip():
            header = [c.strip() for c in line.split(",")]
        elif line.strip():
            body.append(line)
    if header is None:
        raise ValidationError("CSV file has no header row")
    data = np.loadtxt(_io.StringIO("\n".join(body)), delimiter=",", ndmin=2) if body \
        else np.zeros((0, len(header)))
    if data.shape[1] != len(header):
        raise ValidationError(f"expected {len(header)} columns, got {data.shape[1]}")
    return meta, {c: data[:, i] for i, c in enumerate(header)}


# --------------------------------------------------------------------------
# signals


def signal_to_text(f: sg.SampledSignal, fmt: str = "json", config: dict | None = None) -> str:
    v = f.values
    if fmt == "csv":
        meta = [{"grid": f.grid.to_dict()}]
        if config is not None:
            meta.append({"config": config})
        data = np.column_stack([f.grid.x, v.real, v.imag])
        return _csv_text(meta, ["x", "re", "im"], data)
    if fmt == "json":
        out = {"grid": f.grid.to_dict(), "re": v.real, "im": v.imag}
        if config is not None:
            out["config"] = config
        return dumps(out)
    raise ValidationError(f"format must be one of {FORMATS}, got {fmt!r}")


def signal_from_text(text: str, fmt: str = "json") -> sg.SampledSignal:
    if fmt == "csv":
        meta, cols = _read_csv(text)
        for c in ("re", "im"):
            if c not in cols:
                raise ValidationError(f"signal CSV needs column {c!r}")
        if "grid" in meta:
            grid = sg.GridSpec(**meta["grid"])
        else:
            x = cols["x"]
            grid = sg.GridSpec(-float(x[0]), x.size)
        return sg.SampledSignal(grid, cols["re"] + 1j * cols["im"])
    if fmt == "json":
        d = json.loads(text)
        try:
            grid = sg.GridSpec(**d["grid"])
            return sg.SampledSignal(grid, np.asarray(d["re"]) + 1j * np.asarray(d["im"]))
        except KeyError as e:
            raise ValidationError(f"signal JSON is missing {e}") from None
    raise ValidationError(f"format must be one of {FORMATS}, got {fmt!r}")


# --------------------------------------------------------------------------
# coefficients


def _coeff_parts(c):
    if isinstance(c, gb.GaborCoefficients):
        lat = c.lattice
        k, n = np.meshgrid(lat.ks, lat.ns, indexing="ij")
        return "gabor", {"lattice": lat.to_dict()}, k, n
    if isinstance(c, wl.WilsonCoefficients):
        k, n = np.meshgrid(np.arange(-c.K, c.K + 1), np.arange(c.M + 1), indexing="ij")
        return "wilson", {"K": c.K, "M": c.M}, k, n
    if isinstance(c, wl.GridCoefficients2D):
        k, n = np.meshgrid(np.arange(2 * c.K + 1), np.arange(c.M + 1), indexing="ij")
        return "grid2d", {"K": c.K, "M": c.M}, k, n
    raise ValidationError(f"cannot serialize {type(c).__name__}")


def coefficients_to_text(c, fmt: str = "json", config: dict | None = None) -> str:
    domain, head, k, n = _coeff_parts(c)
    e = c.entries
    if fmt == "csv":
        meta = [{"domain": domain}, head]
        if config is not None:
            meta.append({"config": config})
        data = np.column_stack([k.ravel(), n.ravel(), e.real.ravel(), e.imag.ravel()])
        return _csv_text(meta, ["k", "n", "re", "im"], data)
    if fmt == "json":
        out = {"domain": domain, **head, "k": k.ravel(), "n": n.ravel(),
               "re": e.real.ravel(), "im": e.imag.ravel()}
        if config is not None:
            out["config"] = config
        return dumps(out)
    raise ValidationError(f"format must be one of {FORMATS}, got {fmt!r}")


def coefficients_from_text(text: str, fmt: str = "json"):
    if fmt == "csv":
        meta, cols = _read_csv(text)
    elif fmt == "json":
        meta = json.loads(text)
        cols = meta
    else:
        raise ValidationError(f"format must be one of {FORMATS}, got {fmt!r}")
    domain = meta.get("domain")
    try:
        k = np.asarray(cols["k"]).astype(int)
        n = np.asarray(cols["n"]).astype(int)
        vals = np.asarray(cols["re"], dtype=float) + 1j * np.asarray(cols["im"], dtype=float)
    except KeyError as e:
        raise ValidationError(f"coefficient file is missing {e}") from None
    if domain == "gabor":
        lat = gb.LatticeSpec(**meta["lattice"])
        e = np.zeros(lat.shape, dtype=complex)
        e[k + lat.K, n + lat.M] = vals
        return gb.GaborCoefficients(lat, e)
    if domain in ("wilson", "grid2d"):
        K, M = int(meta["K"]), int(meta["M"])
        e = np.zeros((2 * K + 1, M + 1), dtype=complex)
        rows = k + K if domain == "wilson" else k
        e[rows, n] = vals
        cls = wl.WilsonCoefficients if domain == "wilson" else wl.GridCoefficients2D
        return cls(K, M, e)
    raise ValidationError(f"unknown coefficient domain {domain!r}")


# --------------------------------------------------------------------------
# files


def write_text(path, text: str):
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    return p


def write_signal(path, f, fmt=None, config=None):
    return write_text(path, signal_to_text(f, fmt or format_of(path), config))


def read_signal(path, fmt=None) -> sg.SampledSignal:
    return signal_from_text(Path(path).read_text(), fmt or format_of(path))


def write_coefficients(path, c, fmt=None, config=None):
    return write_text(path, coefficients_to_text(c, fmt or format_of(path), config))


def read_coefficients(path, fmt=None):
    return coefficients_from_text(Path(path).read_text(), fmt or format_of(path))


def header_config(path, fmt=None) -> dict | None:
    """The run configuration recorded in a file header, if any."""
    text = Path(path).read_text()
    fmt = fmt or format_of(path)
    meta = _read_csv(text)[0] if fmt == "csv" else json.loads(text)
    cfg = meta.get("config")
    return cfg if isinstance(cfg, dict) else None


def table_to_csv(columns: list, rows, meta: list | None = None) -> str:
    """Plain numeric table (plot-ready)."""
    data = np.asarray(rows, dtype=float).reshape(-1, len(columns))
    return _csv_text(meta or [], columns, data)

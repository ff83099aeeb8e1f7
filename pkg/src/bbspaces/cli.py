"""Command-line entry point: ``bbspaces <command> [options]``.

Settings are resolved in three layers: built-in defaults, then a TOML file
given with --config, then explicit flags. The resolved settings are echoed
into every report and file header so a run can be repeated exactly.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import classify as cl
from . import expseq as es
from . import gabor as gb
from . import io as bio
from . import signal as sg
from . import weights as wm
from . import wilson as wl
from .errors import BBSpacesError, ValidationError

WILSON_COMMANDS = ("wilson-build", "seqrep", "decay")


@dataclass
class RunConfig:
    grid: dict = field(default_factory=lambda: {"T": 16.0, "N": 2048})
    lattice: dict = field(default_factory=lambda: {"a": 1 / math.sqrt(2), "b": 1 / math.sqrt(2),
                                                   "K": None, "M": None})
    weights: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=lambda: {"cg_tol": 1e-10, "gram_tol": 1e-6,
                                                      "wr_box": 8})
    output: dict = field(default_factory=lambda: {"format": "json", "path": None})
    basis: str = "gabor"
    window: str = "gaussian"

    def validate(self):
        g = self.grid_spec()
        lat = self.lattice
        if not (lat["a"] > 0 and lat["b"] > 0):
            raise ValidationError("lattice constants must be positive")
        for name in ("cg_tol", "gram_tol"):
            if not self.tolerances[name] > 0:
                raise ValidationError(f"{name} must be positive")
        if int(self.tolerances["wr_box"]) < 0:
            raise ValidationError("wr_box must be non-negative")
        if self.output["format"] not in bio.FORMATS:
            raise ValidationError(f"format must be one of {bio.FORMATS}")
        if self.basis not in ("gabor", "wilson"):
            raise ValidationError("basis must be gabor or wilson")
        if self.basis == "wilson":
            g.steps(wl.WILSON_A)
        return self

    def grid_spec(self) -> sg.GridSpec:
        return sg.GridSpec(self.grid["T"], self.grid["N"])

    def lattice_spec(self, grid=None) -> gb.LatticeSpec:
        grid = grid or self.grid_spec()
        a, b = self.lattice["a"], self.lattice["b"]
        auto = gb.LatticeSpec.for_grid(grid, a, b)
        K = auto.K if self.lattice["K"] is None else self.lattice["K"]
        M = auto.M if self.lattice["M"] is None else self.lattice["M"]
        if self.window == "box" and self.lattice["M"] is None and grid.is_aligned(1.0 / b):
            # every channel of the grid, so S is exactly the identity
            M = (grid.steps(1.0 / b) - 1) // 2
        return gb.LatticeSpec(a, b, K, M)

    def to_dict(self):
        return asdict(self)


def _load_toml(path):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"bad TOML in {path}: {exc}") from None


def _json_arg(text, what):
    if text is None:
        return None
    if isinstance(text, dict):
        return text
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} is not valid JSON: {exc}") from None


def resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.command in WILSON_COMMANDS or getattr(args, "basis", None) == "wilson":
        # the window decays like exp(-1.67|x|), so a Wilson box of 24 needs T = 32
        cfg.grid = {"T": 32.0, "N": 4096}
        cfg.lattice.update(a=wl.WILSON_A, b=wl.WILSON_B, K=24, M=24)
    if getattr(args, "window", None) == "box":
        cfg.grid = sg.box_grid().to_dict()
        cfg.lattice.update(a=1.0, b=1.0)
    if args.config:
        data = _load_toml(args.config)
        for section in ("grid", "lattice", "weights", "tolerances", "output"):
            if section in data:
                if not isinstance(data[section], dict):
                    raise ValidationError(f"config section [{section}] must be a table")
                getattr(cfg, section).update(data[section])
        for key in ("basis", "window"):
            if key in data:
                setattr(cfg, key, data[key])
    flags = {"grid_T": ("grid", "T"), "grid_N": ("grid", "N"), "a": ("lattice", "a"),
             "b": ("lattice", "b"), "K": ("lattice", "K"), "M": ("lattice", "M"),
             "tol": ("tolerances", "cg_tol"), "format": ("output", "format"),
             "out": ("output", "path")}
    for attr, (section, key) in flags.items():
        v = getattr(args, attr, None)
        if v is not None:
            getattr(cfg, section)[key] = v
    for key in ("basis", "window"):
        v = getattr(args, key, None)
        if v is not None:
            setattr(cfg, key, v)
    if args.format is None and cfg.output["path"] is not None:
        cfg.output["format"] = bio.format_of(cfg.output["path"], cfg.output["format"])
    if getattr(args, "case", None):
        cfg.weights["case"] = args.case
    for key in ("omega", "eta"):
        vals = getattr(args, key, None)
        if vals:
            cfg.weights[key] = [_json_arg(v, f"--{key}") for v in vals]
    for key in ("omega", "eta"):
        v = cfg.weights.get(key)
        if isinstance(v, dict):
            cfg.weights[key] = [v]
    return cfg.validate()


# --------------------------------------------------------------------------
# helpers


def _emit(text: str, path=None):
    if path is None:
        sys.stdout.write(text)
    else:
        bio.write_text(path, text)


def _report(cfg, body: dict, path=None):
    _emit(bio.dumps({"config": cfg.to_dict(), **body}), path)


def _outdir(cfg):
    p = cfg.output["path"]
    return None if p is None else Path(p)


def _window(cfg, grid):
    w = cfg.window
    if w == "gaussian":
        return sg.gaussian(grid)
    if w == "box":
        return sg.box(grid, 0.0, 1.0)
    if w == "wilson":
        return wl.build_wilson_window(grid)
    f = bio.read_signal(w)
    if f.grid != grid:
        raise ValidationError(f"window file {w} lives on {f.grid.to_dict()}, expected {grid.to_dict()}")
    return f


def _spaces(cfg):
    om, et = cfg.weights.get("omega") or [], cfg.weights.get("eta") or []
    if not om:
        raise ValidationError("need --omega (and optionally --eta) weight descriptors")
    if not et:
        et = om
    if len(et) == 1 and len(om) > 1:
        et = et * len(om)
    if len(om) == 1 and len(et) > 1:
        om = om * len(et)
    if len(om) != len(et):
        raise ValidationError("give the same number of --omega and --eta descriptors")
    case = cfg.weights.get("case", "beurling")
    return [cl.SpaceDescriptor(wm.weight_from_dict(o), wm.weight_from_dict(e), case)
            for o, e in zip(om, et)]


def _probes(text, default):
    if text is None:
        return np.asarray(default, dtype=float)
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"probes must be comma-separated numbers, got {text!r}") from None
    if not vals:
        raise ValidationError("empty probe list")
    return np.asarray(vals)


def _seq(text, what="sequence"):
    return es.sequence_from_dict(_json_arg(text or '{"kind": "id"}', what))


# --------------------------------------------------------------------------
# commands


def cmd_dual(cfg, args):
    grid = cfg.grid_spec()
    lat = cfg.lattice_spec(grid)
    psi = _window(cfg, grid)
    gamma, info = gb.canonical_dual(psi, lat, tol=cfg.tolerances["cg_tol"], return_info=True)
    corpus = sg.hermite_corpus(grid, 9)
    box = int(cfg.tolerances["wr_box"])
    common = {"tol": cfg.tolerances["cg_tol"], "lattice": lat.to_dict(), "grid": grid.to_dict()}
    body = {
        "solver": info.to_dict(),
        "wexler_raz": {"defect": gb.wexler_raz_defect(psi, gamma, lat, box), "box": box, **common},
        "duality": {"defect": gb.duality_defect(psi, gamma, lat, corpus), "box": "hermite m<=9",
                    **common},
    }
    out = _outdir(cfg)
    if out is not None:
        fmt = cfg.output["format"]
        bio.write_signal(out / f"dual.{fmt}", gamma, fmt, cfg.to_dict())
        _report(cfg, body, out / "report.json")
    _report(cfg, body)
    return 0


def cmd_wilson_build(cfg, args):
    grid = cfg.grid_spec()
    psi, info = wl.build_wilson_window(grid, return_info=True)
    K, M = cfg.lattice["K"], cfg.lattice["M"]
    corpus = sg.hermite_corpus(grid, 9)
    parseval = max(abs(np.sum(np.abs(wl.wilson_analyze(psi, f, K, M).entries) ** 2)
                       - f.norm() ** 2) for f in corpus)
    gram = wl.gram_defect(psi, K, M)
    body = {
        "gram": {"defect": gram, "tol": cfg.tolerances["gram_tol"], "box": {"K": K, "M": M},
                 "grid": grid.to_dict(), "passed": gram < cfg.tolerances["gram_tol"]},
        "tightness": {"residual": info.residual, "iterations": info.iterations,
                      "frame_bounds": list(info.frame_bounds)},
        "parseval": {"defect": parseval, "corpus": "hermite m<=9"},
    }
    out = _outdir(cfg)
    if out is not None:
        fmt = cfg.output["format"]
        bio.write_signal(out / f"wilson_window.{fmt}", psi, fmt, cfg.to_dict())
        _report(cfg, body, out / "report.json")
    _report(cfg, body)
    return 0


def _analysis_window(cfg, grid):
    if cfg.basis == "wilson" and cfg.window == "gaussian":
        return wl.build_wilson_window(grid)
    return _window(cfg, grid)


def cmd_analyze(cfg, args):
    f = bio.read_signal(args.input)
    cfg.grid = f.grid.to_dict()
    grid = f.grid
    psi = _analysis_window(cfg, grid)
    if cfg.basis == "wilson":
        c = wl.wilson_analyze(psi, f, cfg.lattice["K"], cfg.lattice["M"])
    else:
        c = gb.analyze(psi, cfg.lattice_spec(grid), f)
    _emit(bio.coefficients_to_text(c, cfg.output["format"], cfg.to_dict()), cfg.output["path"])
    return 0


def cmd_synthesize(cfg, args):
    c = bio.read_coefficients(args.input)
    head = bio.header_config(args.input) or {}
    if "grid" in head and args.grid_T is None and args.grid_N is None:
        # synthesize on the grid the coefficients were computed on
        cfg.grid = dict(head["grid"])
    grid = cfg.grid_spec()
    if isinstance(c, gb.GaborCoefficients):
        if cfg.window == "gaussian":
            # pair with the analysis default: the canonical dual of the Gaussian
            g = gb.canonical_dual(sg.gaussian(grid), c.lattice, tol=cfg.tolerances["cg_tol"])
        else:
            g = _window(cfg, grid)
        f = gb.synthesize(g, c.lattice, c)
    else:
        cfg.basis = "wilson"
        psi = _analysis_window(cfg, grid)
        if isinstance(c, wl.GridCoefficients2D):
            f = wl.sequence_rep_inverse(psi, c)
        else:
            f = wl.wilson_synthesize(psi, c)
    _emit(bio.signal_to_text(f, cfg.output["format"], cfg.to_dict()), cfg.output["path"])
    return 0


def cmd_seqrep(cfg, args):
    f = bio.read_signal(args.input)
    cfg.grid = f.grid.to_dict()
    cfg.basis = "wilson"
    psi = _analysis_window(cfg, f.grid)
    d = wl.sequence_rep(psi, f, cfg.lattice["K"], cfg.lattice["M"])
    back = wl.sequence_rep_inverse(psi, d)
    err = (back - f).norm() / f.norm() if f.norm() > 0 else (back - f).norm()
    body = {"round_trip": {"relative_l2_error": err, "box": {"K": d.K, "M": d.M}}}
    out = _outdir(cfg)
    if out is not None:
        fmt = cfg.output["format"]
        bio.write_coefficients(out / f"seqrep.{fmt}", d, fmt, cfg.to_dict())
        _report(cfg, body, out / "report.json")
    _report(cfg, body)
    return 0


def _table(cfg, columns, rows, extra=None):
    if cfg.output["format"] == "csv":
        text = bio.table_to_csv(columns, rows, [{"config": cfg.to_dict()}, *(extra or [])])
    else:
        body = {c: [r[i] for r in rows] for i, c in enumerate(columns)}
        for e in extra or []:
            body.update(e)
        text = bio.dumps({"config": cfg.to_dict(), **body})
    _emit(text, cfg.output["path"])


def cmd_sharp(cfg, args):
    ab = es.sharp(_seq(args.left, "--left"), _seq(args.right, "--right"))
    if args.count < 0:
        raise ValidationError("--count must be non-negative")
    terms = ab.prefix(args.count)
    rows = [(i, float(t)) for i, t in enumerate(terms)]
    _table(cfg, ["n", "term"], rows, [{"sequence": ab.to_dict()}])
    return 0


def cmd_nu(cfg, args):
    a = _seq(args.seq, "--seq")
    p = _probes(args.probes, [1, 2, 5, 10, 20, 50, 100])
    rows = [(float(s), a.counting(float(s))) for s in p]
    _table(cfg, ["s", "nu"], rows, [{"sequence": a.to_dict()}])
    return 0


def cmd_lemmas(cfg, args):
    a, b = _seq(args.left, "--left"), _seq(args.right, "--right")
    p = _probes(args.probes, np.geomspace(1, 1e4, 40))
    body = {"fundamental": es.check_fundamental(a, b, p),
            "sharp_properties": es.check_sharp_properties(a, b, p),
            "probe_range": [float(p.min()), float(p.max())]}
    if isinstance(a, es.FromWeight) and isinstance(b, es.FromWeight):
        body["explicit"] = es.check_explicit_lemma(a.w, b.w, p).to_dict()
    _report(cfg, body, cfg.output["path"])
    return 0


def cmd_classify(cfg, args):
    spaces = _spaces(cfg)
    if len(spaces) != 2:
        raise ValidationError("classify needs exactly two spaces: --omega W1 --eta E1 --omega W2 --eta E2")
    if args.relation == "inclusion":
        v = cl.decide_inclusion(spaces[0], spaces[1], method=args.method)
    else:
        v = cl.decide_isomorphic(spaces[0], spaces[1], method=args.method)
    _report(cfg, {"verdict": v.to_dict(), "spaces": [s.to_dict() for s in spaces]},
            cfg.output["path"])
    return 0


def cmd_decay(cfg, args):
    path = Path(args.input)
    text = path.read_text()
    fmt = bio.format_of(path)
    try:
        c = bio.coefficients_from_text(text, fmt)
    except (ValidationError, KeyError):
        f = bio.signal_from_text(text, fmt)
        cfg.grid = f.grid.to_dict()
        cfg.basis = "wilson"
        psi = _analysis_window(cfg, f.grid)
        c = wl.wilson_analyze(psi, f, cfg.lattice["K"], cfg.lattice["M"])
    if not cfg.weights.get("omega"):
        cfg.weights["omega"] = [wm.PowerLog(1.0, 0.0).to_dict()]
    sp = _spaces(cfg)[0]
    fit = cl.decay_envelope(c, sp)
    body = {"envelope": fit.to_dict()}
    out = _outdir(cfg)
    if out is not None:
        rows = list(zip(fit.shells, fit.maxima))
        bio.write_text(out / "shell_maxima.csv",
                       bio.table_to_csv(["shell", "max_abs"], rows, [{"config": cfg.to_dict()}]))
        _report(cfg, body, out / "report.json")
    _report(cfg, body)
    return 0


def cmd_corpus(cfg, args):
    grid = cfg.grid_spec()
    corpus = sg.hermite_corpus(grid, args.m_max)
    out = _outdir(cfg)
    fmt = cfg.output["format"]
    files = []
    if out is not None:
        for m, h in enumerate(corpus):
            files.append(str(bio.write_signal(out / f"hermite_{m:02d}.{fmt}", h, fmt, cfg.to_dict())))
    _report(cfg, {"m_max": args.m_max, "norms": [h.norm() for h in corpus], "files": files})
    return 0


COMMANDS = {
    "dual": cmd_dual, "wilson-build": cmd_wilson_build, "analyze": cmd_analyze,
    "synthesize": cmd_synthesize, "seqrep": cmd_seqrep, "sharp": cmd_sharp, "nu": cmd_nu,
    "lemmas": cmd_lemmas, "classify": cmd_classify, "decay": cmd_decay, "corpus": cmd_corpus,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file with [grid], [lattice], [weights], "
                                         "[tolerances], [output] tables")
    common.add_argument("--grid-T", dest="grid_T", type=float)
    common.add_argument("--grid-N", dest="grid_N", type=int)
    common.add_argument("--a", type=float)
    common.add_argument("--b", type=float)
    common.add_argument("--K", type=int)
    common.add_argument("--M", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--case", choices=cl.CASES)
    common.add_argument("--omega", action="append", help="weight JSON; repeat for a second space")
    common.add_argument("--eta", action="append", help="weight JSON; repeat for a second space")
    common.add_argument("--out", help="output file, or directory for multi-file commands")
    common.add_argument("--format", choices=bio.FORMATS)
    common.add_argument("--basis", choices=("gabor", "wilson"))
    common.add_argument("--window", help="gaussian, box, wilson or a signal file")

    p = argparse.ArgumentParser(prog="bbspaces", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("dual", parents=[common], help="canonical dual window and defect reports")
    sub.add_parser("wilson-build", parents=[common], help="orthonormal Wilson window")
    for name in ("analyze", "synthesize", "seqrep", "decay"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input")
    sp = sub.add_parser("sharp", parents=[common], help="terms of a sharp product")
    sp.add_argument("--left")
    sp.add_argument("--right")
    sp.add_argument("--count", type=int, default=10)
    sp = sub.add_parser("nu", parents=[common], help="counting function table")
    sp.add_argument("--seq")
    sp.add_argument("--probes", help="comma-separated s values")
    sp = sub.add_parser("lemmas", parents=[common], help="counting-function lemma checks")
    sp.add_argument("--left")
    sp.add_argument("--right")
    sp.add_argument("--probes")
    sp = sub.add_parser("classify", parents=[common], help="isomorphism or inclusion verdict")
    sp.add_argument("--method", choices=("auto", "closed_form", "numeric"), default="auto")
    sp.add_argument("--relation", choices=("isomorphic", "inclusion"), default="isomorphic")
    sp = sub.add_parser("corpus", parents=[common], help="Hermite function files")
    sp.add_argument("--m-max", dest="m_max", type=int, default=9)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except BBSpacesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

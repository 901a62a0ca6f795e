"""hardyhodge command line: synth, decompose, verify, extend, potential, quat.

Exit codes: 0 all asserted tolerances hold, 1 an invariant failed (the first
failing residual is named on stderr), 2 I/O, configuration or DC-policy error.
Every command writes ``manifest.json`` with its fully resolved configuration
into the output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import HardyHodgeError
from .extension import (
    NEWTON_SIGN_CONVENTION,
    SYSTEMS,
    hardy_norm_profile,
    laplace_residual,
    monogenicity_residual,
    poisson_extend,
    write_slab,
)
from .fieldio import read_field, write_field
from .grid import KINDS, GridSpec
from .hodge import decompose, decompose_quaternionic
from .silent import SILENCE_TOL, hyperplane_frame, silence_report, silent_experiment
from .synth import RECIPES, normalize_recipe, synth_field
from .verify import SUITES, TOL, first_failure, run_suite

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


class InvariantFailure(Exception):
    pass


def _numbers(text: str, cast=float) -> list:
    try:
        return [cast(Fraction(t.strip())) for t in text.replace(";", ",").split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _ints(text):
    return _numbers(text, int)


def _recipe(text: str):
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise argparse.ArgumentTypeError(f"recipe is not valid JSON: {exc}") from exc
    return text


def _grid(args) -> GridSpec:
    shape = args.shape
    if shape is None:
        if args.n is None:
            raise ConfigError("give --shape (and optionally --n)")
        shape = [32] * args.n
    if args.n is not None and len(shape) != args.n:
        raise ConfigError(f"--n {args.n} disagrees with --shape of length {len(shape)}")
    lengths = args.lengths
    if lengths is not None and len(lengths) != len(shape):
        raise ConfigError("--lengths needs one entry per axis")
    return GridSpec(tuple(shape), None if lengths is None else tuple(lengths))


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k == "func":
            continue
        cfg[k] = v
    return cfg


def _dump(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _manifest(out: Path, args, outputs: list[str], summary: dict | None = None) -> None:
    data = {"tool": "hardyhodge", "version": __version__, "command": args.command,
            "config": _config(args), "outputs": sorted(outputs)}
    if summary:
        data["summary"] = summary
    _dump(out / "manifest.json", data)


def _check_residuals(residuals: dict, limits: dict) -> None:
    for key, limit in limits.items():
        val = residuals.get(key)
        if val is not None and not val <= limit:
            raise InvariantFailure(f"{key} = {val:.3e} exceeds {limit:.1e}")


def cmd_synth(args) -> int:
    spec = _grid(args)
    recipe = normalize_recipe(args.recipe)
    f = synth_field(spec, args.kind, recipe, args.seed)
    out = _outdir(args)
    prov = {"recipe": recipe, "seed": args.seed, "kind": args.kind, "gridSpec": spec.to_dict()}
    write_field(f, out / "field.hhf", prov)
    _manifest(out, args, ["field.hhf", "field.json"])
    print(f"wrote {out / 'field.hhf'} ({args.kind}, shape {spec.shape})")
    return EXIT_OK


def _flat_norms(report: dict) -> dict:
    norms = report["norms"]
    return {"normInput": norms["input"], "normPlus": norms["plus"], "normMinus": norms["minus"],
            "normZero": norms["zero"]}


def cmd_decompose(args) -> int:
    f = read_field(args.input)
    res = decompose(f, dc_policy=args.dc_policy)
    out = _outdir(args)
    names = ["plus.hhf", "minus.hhf"] + (["zero.hhf"] if res.f_zero is not None else [])
    for name, part in zip(names, res.parts()):
        write_field(part, out / name)
    report = dict(res.report, **_flat_norms(res.report))
    _dump(out / "report.json", report)
    _manifest(out, args, names + ["report.json"])
    for k, v in sorted(report["residuals"].items()):
        print(f"{k}: {v:.3e}")
    limits = {k: args.tol for k in ("reconstruction", "pythagoras", "crossTerms", "divergenceRelative")}
    _check_residuals(report["residuals"], limits)
    return EXIT_OK


def cmd_quat(args) -> int:
    f = read_field(args.input)
    split = decompose_quaternionic(f, dc_policy=args.dc_policy)
    out = _outdir(args)
    write_field(split.f_plus, out / "plus.hhf")
    write_field(split.f_minus, out / "minus.hhf")
    report = dict(split.report, **_flat_norms(split.report))
    _dump(out / "report.json", report)
    _manifest(out, args, ["plus.hhf", "minus.hhf", "report.json"])
    for k, v in sorted(report["residuals"].items()):
        print(f"{k}: {v:.3e}")
    _check_residuals(report["residuals"], {k: args.tol for k in ("reconstruction", "pythagoras", "crossTerms")})
    return EXIT_OK


def cmd_verify(args) -> int:
    size = args.shape[0] if args.shape else None
    if args.shape and len(set(args.shape)) != 1:
        raise ConfigError("verify runs on cubic grids; give equal --shape entries")
    if args.shape and args.n is not None and len(args.shape) != args.n:
        raise ConfigError(f"--n {args.n} disagrees with --shape of length {len(args.shape)}")
    n = args.n if args.n is not None else (len(args.shape) if args.shape else None)
    checks = run_suite(args.suite, n=n, size=size, seeds=args.seeds)
    for c in checks:
        print(c.line())
    if args.out:
        out = _outdir(args)
        _dump(out / "verify.json", {"suite": args.suite, "tolerances": TOL, "checks": [c.to_dict() for c in checks]})
        _manifest(out, args, ["verify.json"], {"passed": sum(c.passed for c in checks), "total": len(checks)})
    bad = first_failure(checks)
    if bad is not None:
        raise InvariantFailure(f"{bad.name} = {bad.value:.3e} violates bound {bad.bound:.1e}")
    return EXIT_OK


def cmd_extend(args) -> int:
    f = read_field(args.input)
    if not args.heights:
        raise ConfigError("--heights is required")
    slab = poisson_extend(f, args.heights, side=args.side)
    out = _outdir(args)
    summary = {"kind": f.kind}
    steps = np.diff(slab.heights)
    uniform = len(slab.heights) >= 3 and np.allclose(steps, steps[0], rtol=1e-9, atol=0)
    if uniform:
        summary["laplaceResidual"] = laplace_residual(slab)
        if args.system or f.kind in ("paravector", "vector", "quaternion"):
            summary["monogenicityResidual"] = monogenicity_residual(slab, args.system)
    rows = []
    for p in args.p:
        prof = hardy_norm_profile(slab, p)
        summary[f"nonincreasing_p{p:g}"] = prof.nonincreasing
        rows += [(p, h, v) for h, v in prof.rows()]
    with open(out / "profile.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "height", "norm"])
        for p, h, v in rows:
            w.writerow([repr(float(p)), repr(h), repr(v)])
    summary["newtonSignConvention"] = NEWTON_SIGN_CONVENTION
    write_slab(slab, out, {"summary": summary, "config": _config(args), "command": "extend",
                           "version": __version__})
    for k, v in sorted(summary.items()):
        print(f"{k}: {v}")
    bad = [k for k, v in summary.items() if k.startswith("nonincreasing") and v is False]
    if bad:
        raise InvariantFailure(f"{bad[0]}: Hardy norm increased with height")
    return EXIT_OK


def _load_points(path: str) -> np.ndarray:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([float(t) for t in line.replace(",", " ").split()])
    if not rows:
        raise ConfigError(f"no probe points in {path}")
    return np.array(rows)


def cmd_potential(args) -> int:
    if args.input:
        psi = read_field(args.input)
        spec = psi.spec
    else:
        spec = _grid(args)
        psi = None
    probes = None
    if args.probes and args.probes != "default":
        probes = _load_points(args.probes)
        if args.plane_normal is not None:
            probes = hyperplane_frame(args.plane_normal, args.plane_offset)(probes)
    if psi is None:
        recipe = normalize_recipe(args.recipe)
        if args.width is not None:
            recipe["width"] = args.width
        report = silent_experiment(spec, recipe, args.seed, probes, args.tol, args.dc_policy)
    else:
        report = silence_report(psi, probes, args.width, args.tol, args.dc_policy)
    out = _outdir(args)
    _dump(out / "silence_report.json", report)
    with open(out / "silence.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x0"] + [f"x{k}" for k in range(1, spec.n + 1)] + ["plus", "minus", "zero", "total"])
        for pr in report["probes"]:
            w.writerow([repr(c) for c in pr["x"]] + [repr(pr[k]) for k in ("plus", "minus", "zero", "total")])
    _manifest(out, args, ["silence.csv", "silence_report.json"], {"ratios": report["ratios"]})
    for k, v in sorted(report["ratios"].items()):
        print(f"{k}: {v:.3e}")
    if report["failing"]:
        k = report["failing"][0]
        raise InvariantFailure(f"{k} = {report['ratios'][k]:.3e} exceeds {args.tol:.1e}")
    return EXIT_OK


def _grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="boundary dimension")
    p.add_argument("--shape", type=_ints, help="comma separated even sizes, e.g. 32,32")
    p.add_argument("--lengths", type=_numbers, help="periods per axis (default 2*pi)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardyhodge", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a deterministic test field")
    _grid_flags(p)
    p.add_argument("--kind", choices=[k for k in KINDS if k != "multivector"], default="paravector")
    p.add_argument("--recipe", type=_recipe, default="bandlimited_random",
                   help=f"name ({', '.join(RECIPES)}) or JSON object")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    for name, func, help_ in (("decompose", cmd_decompose, "split a field into f+, f-, f0"),
                              ("quat", cmd_quat, "quaternionic split f = f+ + f-")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--input", required=True)
        p.add_argument("--dc-policy", choices=("error", "strip", "tolerate"), default="error")
        p.add_argument("--tol", type=float, default=TOL["identity"])
        p.add_argument("--out", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run an invariant suite at pinned tolerances")
    p.add_argument("--suite", choices=SUITES + ("all",), default="core")
    p.add_argument("--n", type=int)
    p.add_argument("--shape", type=_ints)
    p.add_argument("--seeds", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extend", help="Poisson-extend a boundary field to a slab")
    p.add_argument("--input", required=True)
    p.add_argument("--heights", type=_numbers, required=True)
    p.add_argument("--side", type=int, choices=(1, -1), default=1)
    p.add_argument("--system", choices=SYSTEMS)
    p.add_argument("--p", type=_numbers, default=[2.0])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("potential", help="silence experiment for a divergence-form potential")
    _grid_flags(p)
    p.add_argument("--input", help="paravector density (HHF1); otherwise synthesized from --recipe")
    p.add_argument("--recipe", type=_recipe, default="localized_random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=float)
    p.add_argument("--probes", default="default", help="'default' or a file of points, one per line")
    p.add_argument("--plane-normal", type=_numbers, help="hyperplane normal u for the probe coordinates")
    p.add_argument("--plane-offset", type=float, default=0.0, help="hyperplane offset a in x.u = a")
    p.add_argument("--dc-policy", choices=("error", "strip", "tolerate"), default="strip")
    p.add_argument("--tol", type=float, default=SILENCE_TOL)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_potential)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantFailure as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigError, HardyHodgeError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

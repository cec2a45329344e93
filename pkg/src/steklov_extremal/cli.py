"""Command-line interface: ``steklov-extremal <command> ...``.

Exit codes: 0 success, 1 failed certificate or check, 2 configuration
error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .bem import assemble
from .density import (
    Density,
    DensityError,
    density_from_csv,
    make_arc_indicator,
    make_constant,
    make_fourier_perturbed,
)
from .disk_analytic import fourier_shift
from .experiments import hps_bound_check, homogenization_sweep, weyl_compare
from .geometry import curve_from_descriptor, make_disk
from .optimize import ExtremalProblem, OptimizeError, SolverSettings, optimize_multistart, settings_dict
from .perturbation import PerturbationError, fd_check
from .spectrum import SpectrumError, solve_weighted
from .sturm_liouville import BracketError, lambda2_table, nonconvexity_certificate


class ConfigError(Exception):
    pass


def _load_json_arg(text: str) -> dict:
    """Parse ``text`` as inline JSON or as the path of a JSON file."""
    p = Path(text)
    try:
        if p.suffix == ".json" and p.exists():
            return json.loads(p.read_text(encoding="utf-8"))
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {text!r}: {exc}") from None


def _density_from_arg(curve, text: str) -> Density:
    if text.endswith(".csv"):
        if not Path(text).exists():
            raise ConfigError(f"no such density file: {text}")
        return density_from_csv(curve, text)
    desc = _load_json_arg(text)
    kind = desc.get("kind", "constant")
    alpha = float(desc.get("alpha", 1.0))
    if kind == "constant":
        return make_constant(curve, alpha)
    if kind == "arcs":
        return make_arc_indicator(curve, alpha, int(desc.get("n_arcs", 2)))
    if kind == "fourier":
        return make_fourier_perturbed(
            curve, alpha, float(desc.get("eps", 0.0)), desc.get("cos", []), desc.get("sin", [])
        )
    raise ConfigError(f"unknown density kind {kind!r}")


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _header(command: str, args: argparse.Namespace) -> dict:
    # the output location is left out so reruns elsewhere are byte-identical
    settings = {k: v for k, v in vars(args).items() if k not in ("func", "command", "out")}
    return {"artifact_version": __version__, "command": command, "arguments": settings}


def cmd_solve(args) -> int:
    curve = curve_from_descriptor(_load_json_arg(args.curve), args.nodes)
    rho = _density_from_arg(curve, args.density)
    spec = solve_weighted(assemble(curve), rho, args.k)
    out = _out_dir(args.out)
    manifest = _header("solve", args)
    manifest.update(spec.manifest())
    manifest["hps"] = hps_bound_check(spec).to_dict()
    io.write_json(out / "eigenvalues.json", manifest)
    spec.write_traces_csv(out / "traces.csv")
    print(" ".join("%.12g" % v for v in spec.eigenvalues))
    return 0


def cmd_optimize(args) -> int:
    settings = SolverSettings(max_iters=args.max_iters, n_seeds=args.seeds)
    curve = make_disk(args.nodes)
    problem = ExtremalProblem(curve, args.alpha, args.k, args.direction, settings=settings)
    best, runs = optimize_multistart(problem, args.seeds, args.seed)
    out = _out_dir(args.out)
    manifest = _header("optimize", args)
    manifest["settings"] = settings_dict(settings)
    manifest["objective"] = best.value
    manifest["best_seed_index"] = best.seed_index
    manifest["eigenvalues"] = [float(v) for v in best.spectrum.eigenvalues]
    manifest["hps"] = hps_bound_check(best.spectrum).to_dict()
    manifest["runs"] = [tr.manifest() for tr in runs]
    io.write_json(out / "manifest.json", manifest)
    io.write_csv(out / "density.csv", ["theta", "rho"], [curve.theta, best.density.values])
    best.spectrum.write_traces_csv(out / "traces.csv")
    io.write_json(out / "optimality.json", best.certificate.to_dict())
    print("%.12g" % best.value)
    if not best.certificate.passed:
        print("optimality certificate failed", file=sys.stderr)
        return 1
    return 0


def cmd_homogenize(args) -> int:
    try:
        n_list = [int(x) for x in args.narcs.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--narcs must be a comma-separated integer list, got {args.narcs!r}") from None
    rows = homogenization_sweep(args.alpha, args.k, n_list, args.nodes)
    out = _out_dir(args.out)
    io.write_csv(
        out / "sweep.csv",
        ["n_arcs", "n_nodes", "eigenvalue", "limit"],
        [[r.n_arcs for r in rows], [r.n_nodes for r in rows], [r.eigenvalue for r in rows], [r.limit for r in rows]],
    )
    manifest = _header("homogenize", args)
    manifest["rows"] = [
        {"n_arcs": r.n_arcs, "n_nodes": r.n_nodes, "eigenvalue": r.eigenvalue, "limit": r.limit} for r in rows
    ]
    io.write_json(out / "manifest.json", manifest)
    for r in rows:
        print("%d %.12g %.12g" % (r.n_arcs, r.eigenvalue, r.limit))
    return 0


def cmd_perturb(args) -> int:
    j = args.j
    if j < 1:
        raise ConfigError("--j must be >= 1")
    slopes = fourier_shift(j, args.alpha, args.a, args.b)
    curve = make_disk(args.nodes)
    rho = make_constant(curve, args.alpha)
    delta = args.a * np.cos(2 * j * curve.theta) + args.b * np.sin(2 * j * curve.theta)
    report = fd_check(curve, rho, 2 * j - 1, delta, [args.eps])
    result = {
        "analytic_slopes": list(slopes),
        "gateaux_slopes": report.analytic.tolist(),
        "fd_slopes": report.fd[0].tolist(),
        "fd_rel_error": float(report.errors[0]),
    }
    sys.stdout.write(io.dumps(result))
    gap = float(np.abs(np.sort(slopes) - report.analytic).max()) if report.analytic.size == 2 else np.inf
    ok = report.errors[0] <= args.tol and gap <= args.tol * max(1.0, abs(slopes[1]))
    if not ok:
        print("finite-difference check failed", file=sys.stderr)
        return 1
    return 0


def cmd_appendix(args) -> int:
    cert = nonconvexity_certificate()
    out = _out_dir(args.out)
    manifest = _header("appendix", args)
    manifest["certificate"] = cert.to_dict()
    io.write_json(out / "certificate.json", manifest)
    t, lam, g = lambda2_table(101)
    io.write_csv(out / "lambda2.csv", ["t", "lambda2", "inv_lambda2"], [t, lam, g])
    sys.stdout.write(io.dumps(cert.to_dict()))
    return 0 if cert.passed else 1


def cmd_report(args) -> int:
    src = Path(args.input)
    if not src.is_dir():
        raise ConfigError(f"no such directory: {src}")
    lines = []
    for name in ("eigenvalues.json", "manifest.json"):
        p = src / name
        if not p.exists():
            continue
        data = json.loads(p.read_text(encoding="utf-8"))
        lines.append(f"[{name}] command={data.get('command')} version={data.get('artifact_version')}")
        eig = data.get("eigenvalues")
        alpha = data.get("alpha", data.get("arguments", {}).get("alpha"))
        if eig and alpha:
            k_opt = data.get("arguments", {}).get("k")
            values = {k_opt: eig[k_opt - 1]} if data.get("command") == "optimize" else eig
            for row in weyl_compare(float(alpha), values):
                lines.append(f"  k={row.k:3d} lambda={row.value:.10g} weyl={row.weyl:.10g} ratio={row.ratio:.6f}")
        if "hps" in data:
            margins = data["hps"]["margins"]
            lines.append(
                f"  HPS {'pass' if data['hps']['passed'] else 'FAIL'}: min margin {min(margins):.6g} "
                f"over k=1..{len(margins)}"
            )
        if "rows" in data:
            for r in data["rows"]:
                lines.append(f"  n={r['n_arcs']:3d} lambda={r['eigenvalue']:.10g} limit={r['limit']:.10g}")
        if "certificate" in data and isinstance(data["certificate"], dict):
            lines.append(f"  certificate passed={data['certificate'].get('passed')}")
    opt = src / "optimality.json"
    if opt.exists():
        data = json.loads(opt.read_text(encoding="utf-8"))
        lines.append(f"[optimality.json] passed={data['passed']} c={data['c']:.6g} violations={data['violations']}")
    cert = src / "certificate.json"
    if cert.exists():
        data = json.loads(cert.read_text(encoding="utf-8"))["certificate"]
        lines.append(f"[certificate.json] passed={data['passed']} margin={data['margin']:.6g}")
    if not lines:
        raise ConfigError(f"{src} contains no recognised outputs")
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steklov-extremal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="weighted Steklov eigenvalues for one density")
    p.add_argument("--curve", default='{"kind": "disk"}', help="curve descriptor (JSON text or .json file)")
    p.add_argument("--density", required=True, help="density JSON (constant|arcs|fourier) or theta,rho CSV")
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("optimize", help="extremal density for λ_k on the disk")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--direction", choices=["min", "max"], required=True)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("homogenize", help="λ_k of n-arc indicators")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--narcs", default="2,4,8,16,32")
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_homogenize)

    p = sub.add_parser("perturb", help="first-order shifts of a constant density")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("appendix", help="non-convexity certificate for the 1D example")
    p.add_argument("--out", default="appendix_out")
    p.set_defaults(func=cmd_appendix)

    p = sub.add_parser("report", help="summarize an output directory")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DensityError, PerturbationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SpectrumError, OptimizeError, BracketError, np.linalg.LinAlgError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


def main(argv=None) -> None:
    sys.exit(run(argv))

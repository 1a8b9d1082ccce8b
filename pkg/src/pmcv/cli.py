"""Command-line front end.

Commands
--------
verify     build an instance, run every check, write the JSON report
report     same pipeline, human-readable summary on stdout
theorem35  closed-form values of the two-curvature theorem
classify   construction parameters for type II/III Lorentzian PMCV
spectrum   Jordan structure and canonical form of a matrix under a metric

Exit codes: 0 pass, 1 usage or domain error, 2 verification failure.

JSON is written with a fixed key order and floats at 17 significant digits,
so identical invocations give byte-identical output.  The only environment
variable consulted is ``PMCV_THREADS`` (BLAS thread count).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_FAIL = 2


def _limit_threads() -> None:
    threads = os.environ.get("PMCV_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)


_limit_threads()

from . import analysis as an  # noqa: E402  (thread variables must be set first)
from . import catalog  # noqa: E402
from .errors import PMCVError  # noqa: E402
from .linalg import MetricMatrix, classify_canonical_form, eigen_structure  # noqa: E402


class UsageError(Exception):
    """Bad command line or malformed configuration."""


# -- deterministic JSON ----------------------------------------------------------
def _plain(obj: Any) -> Any:
    """Convert to JSON-ready builtins, preserving key order."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    return str(obj)


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    return text if any(ch in text for ch in ".en") else text + ".0"


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj)


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text (17 significant digits, insertion key order)."""
    return _encode(_plain(obj), indent, 0) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- report serialization --------------------------------------------------------
def report_to_dict(rep: an.PMCVReport) -> dict:
    """Fixed-schema record for a :class:`PMCVReport`."""
    return {
        "instance": rep.instance,
        "grid": rep.grid,
        "extrinsic_summary": rep.extrinsic_summary,
        "spectrum": rep.spectrum.to_dict() if rep.spectrum is not None else None,
        "pmcv": {
            "lambda": rep.lambda_estimate,
            "spread": rep.lambda_spread,
            "minimal": rep.minimal,
            "isoparametric": rep.isoparametric,
            "isoparametric_spread": rep.isoparametric_spread,
            "spectrum_consistent": rep.spectrum_consistent,
            "residuals": {
                "eq1": rep.eq1_residual_max,
                "grad_H": rep.gradH_norm_max,
                "codazzi": rep.codazzi_max,
                "gauss": rep.gauss_max,
                "weingarten": rep.weingarten_max,
                "quadric": rep.extrinsic_summary.get("quadric_residual_max"),
            },
        },
        "theorems": {
            "t33": rep.theorem33,
            "t35": rep.theorem35,
            "t45_t46": rep.theorem45_46,
        },
        "checks": [{"name": c.name, "status": c.status, "margin": c.margin} for c in rep.checks],
        "passed": rep.passed,
    }


def write_grid_csv(rep: an.PMCVReport, path: str) -> None:
    """Per-point rows ``u_1..u_n, H, c_0..c_n`` (characteristic polynomial)."""
    pp = rep.per_point
    u = np.asarray(pp["u"])
    H = np.asarray(pp["H"])
    cp = np.asarray(pp["char_poly"])
    header = [f"u{i + 1}" for i in range(u.shape[1])] + ["H"] + [f"c{k}" for k in range(cp.shape[1])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row_u, h, row_c in zip(u, H, cp):
            w.writerow([_format_float(float(v)) for v in (*row_u, h, *row_c)])


# -- argument parsing ------------------------------------------------------------
class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2, which means "check failed" here
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _instance_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--example", choices=sorted(catalog.EXAMPLES), help="catalog example id")
    src.add_argument("--umbilical", action="store_true", help="totally umbilical hypersurface (A = mu I)")
    src.add_argument("--product", action="store_true", help="Riemannian product S^p x S^(n-p) in S^(n+1)(1)")
    src.add_argument("--config", metavar="FILE", help="JSON instance descriptor")
    p.add_argument("--n", type=int, help="hypersurface dimension (default 4; product default 3)")
    p.add_argument("--p", type=int, help="block size p (example default: 2 for 4.1/4.3, 3 for 4.2/4.4)")
    p.add_argument("--mu", type=float, help="principal curvature mu (Examples 4.1/4.2, umbilical)")
    p.add_argument("--theta", type=float, help="angle theta (Examples 4.3/4.4)")
    p.add_argument("--cot", type=float, help="cot(theta + pi/4), alternative to --theta")
    p.add_argument("--c", type=float, default=None, help="ambient curvature for --umbilical (default 1)")
    p.add_argument("--index", type=int, default=None, help="ambient index for --umbilical (default 1)")
    p.add_argument("--epsilon", type=int, choices=(-1, 1), help="normal causal character for --umbilical")
    p.add_argument("--r1", type=float, help="first-factor radius for --product")
    p.add_argument("--t-range", type=float, nargs=2, metavar=("T0", "T1"), help="frame parameter range")
    p.add_argument("--perturb", type=float, default=0.0, metavar="DELTA", help="add a smooth perturbation (negative control)")
    p.add_argument("--seed", type=int, default=0, help="perturbation seed")
    p.add_argument("--grid", type=int, nargs="+", default=[5], metavar="COUNT",
                   help="points per chart axis (one value or one per axis, each >= 2; default 5)")
    p.add_argument("--minimal-tol", type=float, default=an.MINIMAL_TOL,
                   help=f"|H| below this counts as minimal (default {an.MINIMAL_TOL:g})")
    p.add_argument("--iso-tol", type=float, default=an.ISOPARAMETRIC_TOL,
                   help=f"char-poly spread for isoparametric (default {an.ISOPARAMETRIC_TOL:g})")
    p.add_argument("--residual-tol", type=float, default=an.RESIDUAL_TOL,
                   help=f"Gauss/Codazzi/Weingarten/eq1 limit (default {an.RESIDUAL_TOL:g})")
    p.add_argument("--spread-rel", type=float, default=an.LAMBDA_SPREAD_REL,
                   help=f"relative lambda spread limit (default {an.LAMBDA_SPREAD_REL:g})")
    p.add_argument("--out", metavar="FILE", help="write JSON report here (default stdout for verify)")
    p.add_argument("--csv", metavar="FILE", help="dump per-point u, H and char-poly coefficients")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pmcv", description="Numerical verification of PMCV hypersurfaces in space forms.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("verify", help="run all checks; JSON report; exit 2 on failure")
    _instance_args(v)
    r = sub.add_parser("report", help="run all checks; text summary; exit 2 on failure")
    _instance_args(r)

    t = sub.add_parser("theorem35", help="closed-form H^2, mu^2, nu^2 of the two-curvature theorem")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--l", type=int, required=True, help="multiplicity of mu")
    t.add_argument("--c", type=float, required=True, help="ambient curvature")
    t.add_argument("--eps", type=int, required=True, choices=(-1, 1), help="normal causal character")
    t.add_argument("--lambda", dest="lam", type=float, required=True, help="PMCV constant")
    t.add_argument("--kind", choices=("real", "imaginary"), default="real")
    t.add_argument("--branch", type=int, choices=(-1, 1), help="keep only one branch")
    t.add_argument("--out", metavar="FILE")

    c = sub.add_parser("classify", help="construction parameters for type II/III Lorentzian PMCV")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--l", type=int, required=True, help="multiplicity of the Jordan eigenvalue")
    c.add_argument("--lambda", dest="lam", type=float, required=True)
    c.add_argument("--ambient", choices=("H", "S"), required=True, help="H^{n+1}_1(-1) or S^{n+1}_1(1)")
    c.add_argument("--form", choices=("II", "III"), required=True)
    c.add_argument("--out", metavar="FILE")

    s = sub.add_parser("spectrum", help="eigenstructure and canonical form of a matrix")
    s.add_argument("--matrix", required=True, metavar="FILE", help="JSON row-major square matrix")
    s.add_argument("--metric", required=True, metavar="FILE", help="JSON row-major Lorentzian metric")
    s.add_argument("--tol", type=float, default=1e-8, help="rank/clustering tolerance (default 1e-8)")
    s.add_argument("--out", metavar="FILE")
    return p


# -- commands --------------------------------------------------------------------
def _descriptor(args) -> dict:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            desc = json.load(fh)
        if not isinstance(desc, dict):
            raise UsageError("config must be a JSON object")
    elif args.example:
        desc = {"example_id": args.example}
    elif args.umbilical:
        desc = {"example_id": "umbilical", "mu": 0.0 if args.mu is None else args.mu,
                "c": 1.0 if args.c is None else args.c, "index": 1 if args.index is None else args.index}
        if args.epsilon is not None:
            desc["epsilon"] = args.epsilon
    elif args.product:
        desc = {"example_id": "product", "n": 3}
        if args.r1 is not None:
            desc["r1"] = args.r1
    else:
        raise UsageError("choose an instance: --example, --umbilical, --product or --config")
    for key in ("n", "p", "mu", "theta", "cot"):
        val = getattr(args, key)
        if val is not None and not (args.umbilical and key == "mu"):
            desc[key] = val
    if args.t_range:
        desc["t_range"] = list(args.t_range)
    if args.perturb:
        desc["perturb"] = args.perturb
        desc["seed"] = args.seed
    return desc


def _validate_run(args) -> None:
    if any(g < 2 for g in args.grid):
        raise UsageError("grid counts must be >= 2 per axis")
    for name in ("minimal_tol", "iso_tol", "residual_tol", "spread_rel"):
        if not getattr(args, name) > 0:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")


def _run(args) -> an.PMCVReport:
    _validate_run(args)
    imm = catalog.from_descriptor(_descriptor(args))
    counts = args.grid[0] if len(args.grid) == 1 else args.grid
    if len(args.grid) not in (1, imm.n):
        raise UsageError(f"--grid takes 1 or {imm.n} counts")
    return an.full_report(
        imm, counts=counts, minimal_tol=args.minimal_tol, iso_tol=args.iso_tol,
        residual_tol=args.residual_tol, spread_rel=args.spread_rel,
    )


def cmd_verify(args) -> int:
    rep = _run(args)
    _emit(dumps(report_to_dict(rep)), args.out)
    if args.csv:
        write_grid_csv(rep, args.csv)
    for name in rep.failures():
        print(f"check failed: {name}", file=sys.stderr)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.6g}" if isinstance(x, float) else str(x)


def cmd_report(args) -> int:
    rep = _run(args)
    if args.out:
        _emit(dumps(report_to_dict(rep)), args.out)
    if args.csv:
        write_grid_csv(rep, args.csv)
    ex = rep.extrinsic_summary
    lines = [
        f"instance      {rep.instance.get('name')}",
        f"space form    {ex['space_form']}   eps = {ex['epsilon']}   metric index = {ex['metric_signature'][1]}",
        f"grid points   {rep.grid['points']}",
        f"H             {_fmt(ex['H_mean'])}  (min {_fmt(ex['H_min'])}, max {_fmt(ex['H_max'])})",
        f"lambda        {_fmt(rep.lambda_estimate)}  spread {_fmt(rep.lambda_spread)}  minimal {rep.minimal}",
        f"form          {rep.spectrum.form_tag if rep.spectrum else '-'}",
        f"curvatures    {', '.join(f'{e.value:.8g} x{e.algebraic} (geom {e.geometric})' for e in rep.spectrum.real_eigenvalues) if rep.spectrum else '-'}",
        "",
        f"{'check':<18} {'status':<6} margin",
    ]
    lines += [f"{c.name:<18} {c.status:<6} {_fmt(c.margin)}" for c in rep.checks]
    lines.append("")
    lines.append("PASS" if rep.passed else f"FAIL: {', '.join(rep.failures())}")
    print("\n".join(lines))
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_theorem35(args) -> int:
    res = an.theorem_3_5_values(args.n, args.l, args.c, args.eps, args.lam, branch=args.branch, kind=args.kind)
    out = {"input": {"n": args.n, "l": args.l, "c": args.c, "eps": args.eps, "lambda": args.lam, "kind": args.kind}}
    out.update(res)
    _emit(dumps(out), args.out)
    return EXIT_PASS


def cmd_classify(args) -> int:
    res = an.classify_lorentzian_pmcv(args.n, args.l, args.lam, args.ambient, args.form)
    out = {"input": {"n": args.n, "l": args.l, "lambda": args.lam, "ambient": args.ambient, "form": args.form}}
    out.update(res)
    _emit(dumps(out), args.out)
    return EXIT_PASS


def _load_matrix(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    M = np.asarray(data, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise UsageError(f"{path}: expected a square row-major matrix, got shape {M.shape}")
    return M


def cmd_spectrum(args) -> int:
    A = _load_matrix(args.matrix)
    g = MetricMatrix.of(_load_matrix(args.metric), args.tol)
    if not g.is_lorentzian:
        raise UsageError(f"metric has index {g.signature.index}; a Lorentzian metric (index 1) is required")
    form = classify_canonical_form(A, g, args.tol)
    spec = eigen_structure(A, args.tol)
    out = {"n": spec.n, "form": form}
    out.update(spec.to_dict())
    _emit(dumps(out), args.out)
    return EXIT_PASS


COMMANDS = {
    "verify": cmd_verify,
    "report": cmd_report,
    "theorem35": cmd_theorem35,
    "classify": cmd_classify,
    "spectrum": cmd_spectrum,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as e:  # --help
        return EXIT_PASS if e.code in (0, None) else EXIT_USAGE
    except (UsageError, PMCVError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

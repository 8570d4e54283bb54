"""Batch command-line front end.

Subcommands: ``eval``, ``certify``, ``extract``, ``invert``, ``corpus`` and
``sample-grid``.  Output is CSV with a ``#``-commented header that records the
effective configuration, or JSON (``--format json``).  Identical arguments
give byte-identical output.

Exit codes: 0 success, 1 a certification condition failed, 2 numerical
non-convergence, 3 bad input (arguments, files, measure schema).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .certification import CertConfig, certify_all, default_grid, nevanlinna_residuals
from .corpus import CORPUS_IDS, corpus_entry
from .densities import UnknownDensityError
from .geometry import StolzSchedule
from .inversion import InversionConfig, stieltjes_functional, test_function
from .kernels import psi_integrand
from .measures import MeasureSchemaError, parse_measure
from .quadrature import QuadratureConfig, QuadratureError
from .representation import (HNRepresentation, as_function, evaluate_im_poisson,
                             evaluate_with_error, extract_a, extract_b, extract_c)

EXIT_OK, EXIT_FAIL, EXIT_NONCONV, EXIT_INPUT = 0, 1, 2, 3
THREADS_ENV = "HERGLOTZ_THREADS"


class InputError(Exception):
    """Bad command-line input; maps to exit code 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _floats(raw: str) -> tuple:
    try:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {raw!r}")


def _complex(raw: str) -> complex:
    try:
        return complex(raw.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a complex number such as 1+2j, got {raw!r}")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


# ---------------------------------------------------------------------------
# sources


@dataclass
class Source:
    label: str
    rep: Optional[HNRepresentation]
    q: Callable
    q_im: Callable


def _load_source(args, cfg: QuadratureConfig) -> Source:
    if getattr(args, "corpus", None):
        entry = corpus_entry(args.corpus)
        q = entry.closed_form
        return Source(f"corpus:{entry.id}", entry.rep, q,
                      lambda x1, x2, y1, y2: np.imag(q(x1 + 1j * y1, x2 + 1j * y2)))
    if getattr(args, "measure", None):
        path = Path(args.measure)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read measure file: {exc}") from None
        rep = HNRepresentation(args.a, args.b1, args.b2, parse_measure(text))
        return Source(f"measure:{path.name}", rep, as_function(rep, cfg),
                      lambda x1, x2, y1, y2: evaluate_im_poisson(rep, (x1 + 1j * y1, x2 + 1j * y2), cfg))
    raise InputError("give --corpus ID or --measure FILE")


def _quad(args) -> QuadratureConfig:
    return QuadratureConfig(args.abs_tol, args.rel_tol, args.max_refinements)


def _config(args, command: str) -> dict:
    skip = {"func", "format"}
    cfg = {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(vars(args).items())
           if k not in skip}
    cfg["command"] = command
    cfg["version"] = __version__
    return _jsonable(cfg)


# ---------------------------------------------------------------------------
# output


class Output:
    """Collects a table (CSV) or a document (JSON) and renders it once."""

    def __init__(self, fmt: str, config: dict):
        self.fmt = fmt
        self.config = config
        self.columns: list = []
        self.rows: list = []
        self.extra: dict = {}

    def table(self, columns, rows):
        self.columns, self.rows = list(columns), [list(r) for r in rows]

    def render(self) -> str:
        if self.fmt == "json":
            doc = {"config": self.config,
                   "rows": [dict(zip(self.columns, map(_jsonable, r))) for r in self.rows]}
            doc.update({k: _jsonable(v) for k, v in self.extra.items()})
            return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
        buf = io.StringIO()
        buf.write(f"# herglotz {self.config['command']}\n")
        buf.write("# config: " + json.dumps(self.config, sort_keys=True) + "\n")
        for key, value in sorted(self.extra.items()):
            if key != "report":
                buf.write(f"# {key}: " + json.dumps(_jsonable(value), sort_keys=True) + "\n")
        buf.write(",".join(self.columns) + "\n")
        for r in self.rows:
            buf.write(",".join(_fmt(v) for v in r) + "\n")
        return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, complex):
        return [_jsonable(v.real), _jsonable(v.imag)]
    return v


# ---------------------------------------------------------------------------
# commands


def _grid(args):
    return default_grid(args.re, args.im)


def cmd_eval(args, out: Output) -> int:
    cfg = _quad(args)
    src = _load_source(args, cfg)
    z1, z2 = _grid(args)
    if src.rep is None:
        raise InputError("eval needs representation data")
    value, err, ok = evaluate_with_error(src.rep, (z1, z2), cfg)
    rows = [(a.real, a.imag, b.real, b.imag, v.real, v.imag, e, c)
            for a, b, v, e, c in zip(z1, z2, value, err, ok)]
    out.table(["z1_re", "z1_im", "z2_re", "z2_im", "q_re", "q_im", "error_estimate", "converged"],
              rows)
    return EXIT_OK if np.all(ok) else EXIT_NONCONV


def cmd_certify(args, out: Output) -> int:
    cfg = _quad(args)
    src = _load_source(args, cfg)
    ccfg = CertConfig(quad=cfg, nevanlinna_tol=args.nevanlinna_tol, moment_tol=args.moment_tol,
                      max_order=args.max_order, grid_re=tuple(args.re), grid_im=tuple(args.im))
    report = certify_all(src.rep, ccfg, q=src.q)
    probe = float(nevanlinna_residuals(src.rep.mu, 2j, 2j, cfg)[0][0])
    rows = [
        ("growth", report.growth_value, "finite", report.verdict["growth"]),
        ("nevanlinna_max_residual", report.nevanlinna_max_residual,
         ccfg.nevanlinna_tol * max(1.0, report.growth_value), report.verdict["nevanlinna"]),
        ("nevanlinna_residual_at_2i_2i", probe, ccfg.nevanlinna_tol * max(1.0, report.growth_value),
         abs(probe) <= ccfg.nevanlinna_tol * max(1.0, report.growth_value)),
        ("moments_max_abs", max((abs(v) for v in report.moment_residuals.values()), default=math.nan),
         ccfg.moment_tol * report.torus_mass, report.verdict["moments"]),
        ("corner_zero", report.structural_flags["corner_zero"], "exact", report.verdict["corner_zero"]),
        ("edges_lebesgue", report.structural_flags["edges_lebesgue"], "exact",
         report.verdict["edges_lebesgue"]),
        ("atomless", report.structural_flags["atomless"], ccfg.atom_tol, report.verdict["atomless"]),
        ("total_mass", report.total_mass, "-", True),
        ("finite_mass_contradiction", report.structural_flags["finite_mass_contradiction"], "-",
         not report.structural_flags["finite_mass_contradiction"]),
    ]
    out.table(["condition", "value", "tolerance", "pass"], rows)
    out.extra["report"] = report.to_dict()
    out.extra["verdict"] = report.verdict
    return EXIT_OK if report.all_pass else EXIT_FAIL


def cmd_extract(args, out: Output) -> int:
    cfg = _quad(args)
    src = _load_source(args, cfg)
    sched = StolzSchedule.geometric(0, args.kmax, theta=args.theta, direction=args.direction)
    tol = args.limit_tol
    rows = [("a", extract_a(src.q), 0.0, 0.0, "", True)]
    ok = True
    for name, fn, axis in (("b1", extract_b, 1), ("b2", extract_b, 2),
                           ("c1", extract_c, 1), ("c2", extract_c, 2)):
        est = fn(src.q, axis, args.anchor, sched, tol)
        rows.append((name, est.value.real, est.value.imag, est.error_estimate,
                     "diverged" if est.diverged else "", est.converged))
        ok &= est.converged
    out.table(["parameter", "re", "im", "error_estimate", "note", "converged"], rows)
    return EXIT_OK if ok else EXIT_NONCONV


def cmd_invert(args, out: Output) -> int:
    cfg = _quad(args)
    src = _load_source(args, cfg)
    try:
        params = json.loads(args.psi_params) if args.psi_params else {}
    except json.JSONDecodeError as exc:
        raise InputError(f"--psi-params is not JSON: {exc}") from None
    psi = test_function(args.psi, params)
    icfg = InversionConfig(quad=QuadratureConfig(args.inv_abs_tol, args.inv_rel_tol, 30),
                           y_exponents=tuple(range(1, args.levels + 1)))
    res = stieltjes_functional(src.q_im, psi, icfg)
    reference = ""
    if src.rep is not None and not src.rep.mu.is_zero:
        from .measures import integrate
        reference = float(integrate(src.rep.mu, psi_integrand(psi), cfg)[0].real)
    elif src.rep is not None:
        reference = 0.0
    out.table(["psi", "estimate", "error_estimate", "reference", "converged"],
              [(psi.name, res.estimate, res.error_estimate, reference, res.converged)])
    out.extra["levels"] = {"y": list(res.ys), "value": list(res.values)}
    return EXIT_OK if res.converged else EXIT_NONCONV


def cmd_corpus(args, out: Output) -> int:
    if args.action == "list":
        rows = [(i, corpus_entry(i).description, corpus_entry(i).herglotz) for i in CORPUS_IDS]
        out.table(["id", "description", "herglotz"], rows)
        return EXIT_OK
    if not args.id:
        raise InputError("corpus run needs an id")
    entry = corpus_entry(args.id)
    cfg = _quad(args)
    z1, z2 = _grid(args)
    rng = np.random.default_rng(args.seed)
    r1 = rng.uniform(-3, 3, args.random_points) + 1j * rng.uniform(0.1, 5, args.random_points)
    r2 = rng.uniform(-3, 3, args.random_points) + 1j * rng.uniform(0.1, 5, args.random_points)
    rows = []
    status = EXIT_OK
    for label, a, b in (("grid", z1, z2), ("random", r1, r2)):
        value, err, ok = evaluate_with_error(entry.rep, (a, b), cfg)
        diff = np.abs(value - entry(a, b))
        rows.append((f"evaluate_vs_closed_form[{label}]", float(np.max(diff)),
                     float(np.max(err)), bool(np.all(ok))))
        if not np.all(ok):
            status = EXIT_NONCONV
    sched = StolzSchedule.geometric(0, 40)
    rows.append(("extract_a", extract_a(entry.closed_form), 0.0, True))
    for name, fn, axis in (("extract_b1", extract_b, 1), ("extract_b2", extract_b, 2),
                           ("extract_c1", extract_c, 1), ("extract_c2", extract_c, 2)):
        est = fn(entry.closed_form, axis, 1j, sched)
        rows.append((name, est.value.real, est.error_estimate, est.converged))
    report = certify_all(entry.rep, CertConfig(quad=cfg), q=entry.closed_form)
    for key, passed in report.verdict.items():
        rows.append((f"certify_{key}", "pass" if passed else "fail", "-", passed))
    out.table(["check", "value", "error_estimate", "ok"], rows)
    out.extra["entry"] = {"id": entry.id, "description": entry.description,
                          "herglotz": entry.herglotz, "a": entry.a, "b1": entry.b1, "b2": entry.b2}
    return status


def cmd_sample_grid(args, out: Output) -> int:
    cfg = _quad(args)
    src = _load_source(args, cfg)
    x = np.linspace(args.re_range[0], args.re_range[1], int(args.re_range[2]))
    y = np.linspace(args.im_range[0], args.im_range[1], int(args.im_range[2]))
    if np.any(y <= 0):
        raise InputError("--im-range must stay in the upper half-plane")
    z1 = (x[:, None] + 1j * y[None, :]).ravel()
    z2 = np.full(z1.shape, args.z2)
    q = np.asarray(src.q(z1, z2), dtype=complex)
    out.table(["z1_re", "z1_im", "z2_re", "z2_im", "q_re", "q_im"],
              [(a.real, a.imag, b.real, b.imag, v.real, v.imag) for a, b, v in zip(z1, z2, q)])
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common(p, source=True, grid=False):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    p.add_argument("--abs-tol", type=float, default=1e-9)
    p.add_argument("--rel-tol", type=float, default=1e-7)
    p.add_argument("--max-refinements", type=int, default=24)
    if source:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--corpus", choices=CORPUS_IDS, help="corpus entry")
        g.add_argument("--measure", help="measure file (JSON)")
        p.add_argument("--a", type=float, default=0.0)
        p.add_argument("--b1", type=float, default=0.0)
        p.add_argument("--b2", type=float, default=0.0)
    if grid:
        p.add_argument("--re", type=_floats, default=(-2.0, -1.0, 0.0, 1.0, 2.0),
                       help="real parts per coordinate (comma separated)")
        p.add_argument("--im", type=_floats, default=(0.5, 1.0, 2.0, 4.0),
                       help="imaginary parts per coordinate (comma separated)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="herglotz",
                     description="Two-variable Herglotz-Nevanlinna representations: evaluation, "
                                 "certification, extraction and inversion.")
    parser.add_argument("--version", action="version", version=f"herglotz {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate q on a grid from representation data")
    _add_common(p, grid=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("certify", help="check the representation conditions")
    _add_common(p, grid=True)
    p.add_argument("--nevanlinna-tol", type=float, default=1e-6)
    p.add_argument("--moment-tol", type=float, default=1e-8)
    p.add_argument("--max-order", type=int, default=5)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("extract", help="read a, b1, b2, c1, c2 off the function")
    _add_common(p)
    p.add_argument("--anchor", type=_complex, default=1j)
    p.add_argument("--kmax", type=int, default=40, help="radii 2**0 .. 2**kmax")
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--direction", type=float, default=math.pi / 2)
    p.add_argument("--limit-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("invert", help="Stieltjes inversion of a test-function functional")
    _add_common(p)
    p.add_argument("--psi", default="canonical_weight",
                   choices=("canonical_weight", "gaussian_weighted", "rational_bump"))
    p.add_argument("--psi-params", default="", help='JSON, e.g. {"center": [1, 0]}')
    p.add_argument("--levels", type=int, default=10, help="y = 2**-1 .. 2**-levels")
    p.add_argument("--inv-abs-tol", type=float, default=1e-7)
    p.add_argument("--inv-rel-tol", type=float, default=1e-5)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("corpus", help="list corpus entries or run their oracle comparisons")
    p.add_argument("action", choices=("list", "run"))
    p.add_argument("id", nargs="?", choices=CORPUS_IDS)
    _add_common(p, source=False, grid=True)
    p.add_argument("--random-points", type=int, default=16)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("sample-grid", help="emit (z, Re q, Im q) rows for plotting")
    _add_common(p)
    p.add_argument("--re-range", type=_floats, default=(-3.0, 3.0, 13.0), help="lo,hi,n for Re z1 (write --re-range=-3,3,13 when lo is negative)")
    p.add_argument("--im-range", type=_floats, default=(0.25, 3.0, 12.0), help="lo,hi,n for Im z1")
    p.add_argument("--z2", type=_complex, default=1j, help="fixed second coordinate")
    p.set_defaults(func=cmd_sample_grid)
    return parser


def _apply_threads():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be an integer") from None
    from . import representation
    representation.set_threads(n)
    return n


def run_cli(argv=None, stdout=None) -> int:
    """Run the CLI and return the exit code instead of exiting."""
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        _apply_threads()
        if args.command in ("eval", "certify", "extract", "invert", "sample-grid") \
                and not (args.corpus or args.measure):
            raise InputError("give --corpus ID or --measure FILE")
        if args.command == "sample-grid" and (len(args.re_range) != 3 or len(args.im_range) != 3):
            raise InputError("--re-range and --im-range take lo,hi,n")
        out = Output(args.format, _config(args, args.command))
        code = args.func(args, out)
        stdout.write(out.render())
        return code
    except (InputError, MeasureSchemaError, UnknownDensityError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"herglotz: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except (QuadratureError, ArithmeticError) as exc:
        print(f"herglotz: no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONV


def main(argv=None) -> None:
    sys.exit(run_cli(argv))

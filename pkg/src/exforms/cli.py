"""Command-line front end: a thin client over the service handlers.

Subcommands: analyze, topology, circulate, link, braid, physics.  Input
is a JSON spec file; output is a text report on stdout or a key-sorted
machine-readable document with --format machine.  Exit codes: 0 success,
1 input error, 2 inconclusive analysis, 3 numerical singularity.
"""

from __future__ import annotations

import argparse
import json
import sys

import pydantic

from . import api
from . import schemas as sc
from .errors import InconclusiveZeroTest, InputError, SingularIntegrandError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONCLUSIVE = 2
EXIT_SINGULAR = 3


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, help="path to a JSON spec file")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("text", "machine"), default="text")


def _add_sampling(p: argparse.ArgumentParser):
    p.add_argument("--samples", type=int, help="override sample count")
    p.add_argument("--seed", type=int, help="override sampling seed")
    p.add_argument("--tol-abs", type=float, help="override absolute tolerance")
    p.add_argument("--tol-rel", type=float, help="override relative tolerance")


def _add_quadrature(p: argparse.ArgumentParser):
    p.add_argument("--panels", type=int, help="override quadrature panels")
    p.add_argument("--refine", type=int, help="override Richardson refinements")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exforms",
        description="Exterior differential systems: Pfaff analysis and period integrals",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "analyze": "full Pfaff pipeline for a 1-form spec",
        "topology": "support-topology tables for a 1-form spec",
    }
    for name in ("analyze", "topology"):
        p = sub.add_parser(name, help=helps[name])
        _add_common(p)
        _add_sampling(p)
    for name in ("circulate", "link", "braid"):
        p = sub.add_parser(name, help=f"run the {name} integral")
        _add_common(p)
        _add_quadrature(p)
    p = sub.add_parser("physics", help="field residuals and diagnostics")
    _add_common(p)
    _add_sampling(p)
    return parser


def _load(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e


def _apply_overrides(doc: dict, args):
    if getattr(args, "samples", None) is not None:
        doc["samples"] = args.samples
    if getattr(args, "seed", None) is not None:
        doc["seed"] = args.seed
    if getattr(args, "tol_abs", None) is not None:
        doc.setdefault("tolerances", {})["abs"] = args.tol_abs
    if getattr(args, "tol_rel", None) is not None:
        doc.setdefault("tolerances", {})["rel"] = args.tol_rel
    if getattr(args, "panels", None) is not None:
        doc.setdefault("quadrature", {})["panels"] = args.panels
    if getattr(args, "refine", None) is not None:
        doc.setdefault("quadrature", {})["refinements"] = args.refine
    return doc


def _emit(report, args, renderer):
    if args.format == "machine":
        text = json.dumps(report.model_dump(), sort_keys=True, indent=2) + "\n"
    else:
        text = renderer(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- text renderers ------------------------------------------------------------


def _render_sets(sets):
    out = []
    for s in sets:
        out.append("{" + (", ".join(s) if s else "") + "}")
    return "  ".join(out)


def _render_topology(t: sc.TopologyReport, lines):
    lines.append(f"carrier: {{{', '.join(t.carrier)}}}")
    lines.append(f"open sets ({len(t.opens)}): {_render_sets(t.opens)}")
    lines.append(f"closed sets ({len(t.closeds)}): {_render_sets(t.closeds)}")
    lines.append(f"d is the limit-point operator: {t.d_is_limit_operator}")
    lines.append(f"connected: {t.connected}")
    lines.append(f"{'subset':14} {'limit pts':12} {'interior':12} {'boundary':12} closure")
    for row in t.table:
        fmt = lambda v: ("{" + ",".join(v) + "}") if v else "{}"
        lines.append(
            f"{fmt(row.subset):14} {fmt(row.limit_points):12} {fmt(row.interior):12} "
            f"{fmt(row.boundary):12} {fmt(row.closure)}"
        )


def render_analysis(r: sc.AnalysisReport) -> str:
    lines = [f"1-form over ({', '.join(r.variables)}): {r.one_form}"]
    for w in r.warnings:
        lines.append(f"warning: {w}")
    if r.status == "inconclusive":
        lines.append("status: inconclusive")
        return "\n".join(lines) + "\n"
    for e in r.sequence:
        flag = "nonzero" if e.nonvanishing else "vanishes"
        lines.append(f"  {e.label} (degree {e.degree}, {flag}): {e.form}")
    lines.append(f"Pfaff dimension: {r.pfaff_dimension}")
    if r.torsion is not None:
        lines.append(f"torsion current T: ({', '.join(r.torsion.T)})")
        lines.append(f"helicity density h: {r.torsion.h}")
    if r.parity is not None:
        lines.append(f"parity coefficient: {r.parity}")
    lines.append(f"Cartan topology: {r.connectedness}")
    if r.topology is not None:
        _render_topology(r.topology, lines)
    return "\n".join(lines) + "\n"


def render_integral(r: sc.IntegralReport) -> str:
    lines = [f"{r.kind} = {r.value!r}"]
    if r.error_estimate is not None:
        lines.append(f"error estimate: {r.error_estimate:g}")
    if r.nearest_integer is not None:
        lines.append(f"nearest integer: {r.nearest_integer} (residual {r.integer_residual:g})")
    if len(r.convergence) > 1:
        lines.append("convergence:")
        for row in r.convergence:
            lines.append(f"  panels {row.panels:7d}  value {row.value!r}")
    return "\n".join(lines) + "\n"


def render_physics(r: sc.PhysicsReport) -> str:
    lines = []
    for w in r.warnings:
        lines.append(f"warning: {w}")
    if r.fluid is not None:
        f = r.fluid
        lines.append("fluid:")
        lines.append(f"  vorticity: ({', '.join(f.vorticity)})")
        lines.append(f"  div v: {f.divergence}")
        lines.append(f"  euler residual: ({', '.join(f.euler_residual)})")
        lines.append(f"  helmholtz residual: ({', '.join(f.helmholtz_residual)})")
        lines.append(f"  navier-stokes residual: ({', '.join(f.ns_residual)})")
        lines.append(f"  parity coefficient: {f.parity}")
        if f.parity_at_origin is not None:
            lines.append(f"  parity at origin: {f.parity_at_origin!r}")
        lines.append(f"  classification: {f.classification}")
        lines.append(f"  helicity h: {f.helicity.h}")
        lines.append(f"  torsion T: ({', '.join(f.helicity.T)})")
        lines.append(f"  conservation residual: {f.helicity.conservation_residual}")
        lines.append(f"  parity 4-form vanishes: {f.helicity.parity_form_vanishes}")
    if r.em is not None:
        e = r.em
        lines.append("em:")
        lines.append(f"  E: ({', '.join(e.E)})")
        lines.append(f"  B: ({', '.join(e.B)})")
        lines.append(f"  faraday residual: ({', '.join(e.faraday_residual)})")
        lines.append(f"  div B: {e.div_B}")
        if e.master_r1 is not None:
            lines.append(f"  frozen-in r1: ({', '.join(e.master_r1)})")
            lines.append(f"  frozen-in r2: ({', '.join(e.master_r2)})")
    return "\n".join(lines) + "\n"


_COMMANDS = {
    "analyze": (sc.FormSpec, api.analyze, render_analysis),
    "topology": (sc.FormSpec, api.topology, render_analysis),
    "circulate": (sc.CirculationSpec, api.circulation, render_integral),
    "link": (sc.CurveSetSpec, api.linking, render_integral),
    "braid": (sc.CurveSetSpec, api.braid, render_integral),
    "physics": (sc.PhysicsSpec, api.physics, render_physics),
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    model, handler, renderer = _COMMANDS[args.command]
    try:
        doc = _apply_overrides(_load(args.input), args)
        try:
            spec = model.model_validate(doc)
        except pydantic.ValidationError as e:
            raise InputError(str(e)) from e
        report = handler(spec)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InconclusiveZeroTest as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except SingularIntegrandError as e:
        detail = ""
        if getattr(e, "min_distance", None) is not None:
            detail = f" (minimum distance {e.min_distance:g})"
        print(f"singularity: {e}{detail}", file=sys.stderr)
        return EXIT_SINGULAR
    _emit(report, args, renderer)
    if getattr(report, "status", "ok") == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Subcommand handlers and argument wiring for the ellstab command line."""
from __future__ import annotations

import argparse
import json
import logging
import math
from typing import Any, Dict, List, Optional, Sequence

from . import config, rendering, storage
from .errors import ConfigInvalid, PartialFailure
from .models import (
    Chamber,
    EnvelopeParams,
    GrassParams,
    HypertoricData,
    MultPoint,
    QContext,
    RestrictionMatrix,
    SlopePath,
    SuiteConfig,
    VerificationReport,
    complex_to_dict,
)
from .services import abelianization, envelopes, ktheory_limit, suite, vertex
from .services.qspecial import phi, theta

logger = logging.getLogger(__name__)


def _complex_arg(raw: str) -> complex:
    try:
        return complex(raw.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {raw!r}") from exc


def _chamber_arg(raw: str) -> tuple:
    try:
        return tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"chamber must be comma-separated labels, got {raw!r}") from exc


def _emit(data: Dict[str, Any], out: Optional[str]) -> None:
    """Write *data* to *out* when given, otherwise print it as JSON."""
    if out:
        storage.write_json(out, data)
        return
    print(json.dumps(data, indent=2))


def _load_envelope_params(path: str) -> EnvelopeParams:
    return EnvelopeParams.from_dict(storage.load_params(path))


def _write_matrix(matrix: RestrictionMatrix, out: Optional[str], csv_path: Optional[str]) -> None:
    if csv_path:
        storage.write_matrix_csv(csv_path, matrix.basis, matrix.entries)
    if out:
        storage.write_json(out, matrix.to_dict())
        print(config.MATRIX_WRITTEN.format(rows=matrix.size, cols=matrix.size, path=out))
    else:
        print(rendering.format_matrix(matrix))
    logger.info(rendering.matrix_digest_line(matrix))


def _finish_report(report: VerificationReport, out: str, show_all: bool) -> None:
    """Write the report, print it, and raise PartialFailure if any check failed."""
    storage.write_report(out, report.to_dict())
    print(rendering.format_report(report, show_all))
    total = len(report.checks)
    if not report.all_passed:
        raise PartialFailure(config.SUITE_FAILED.format(failed=len(report.failed), total=total, path=out), out, report)
    print(config.SUITE_PASSED.format(total=total, path=out))


def handle_theta(args: argparse.Namespace) -> None:
    ctx = QContext(args.q)
    x = MultPoint(args.u)
    data = {
        "u": complex_to_dict(x.u),
        "q": complex_to_dict(ctx.q),
        "theta": complex_to_dict(theta(x, ctx)),
        "phi": complex_to_dict(phi(x, ctx)),
    }
    if args.shift:
        shifted = x.shift_q(ctx, args.shift)
        data["theta_shifted"] = complex_to_dict(theta(shifted, ctx))
    _emit(data, args.out)


def handle_stab(args: argparse.Namespace) -> None:
    document = storage.load_params(args.params)
    p = EnvelopeParams.from_dict(document)
    if args.n is not None and args.n != p.n:
        raise ConfigInvalid(f"--n {args.n} does not match the {p.n} equivariant parameters in {args.params}")
    if args.space == "hypertoric":
        data = HypertoricData.from_dict(document)
        matrix = envelopes.restriction_matrix_hypertoric(data, p)
    else:
        order = args.chamber or tuple(range(1, p.n + 1))
        chamber = Chamber(order, -1 if args.opposite else 1)
        matrix = envelopes.restriction_matrix_tpn(p, chamber)
    _write_matrix(matrix, args.out, args.csv)


def handle_grass(args: argparse.Namespace) -> None:
    document = storage.load_params(args.params)
    if args.k is not None:
        document = dict(document, k=args.k)
    gp = GrassParams.from_dict(dict(document, rho=args.rho, trailing=args.trailing))
    matrix = abelianization.restriction_matrix_grass(gp)
    _write_matrix(matrix, args.out, args.csv)
    if args.checks:
        residuals = abelianization.grass_checks(gp)
        print(json.dumps(residuals, indent=2, sort_keys=True))


def handle_rmatrix(args: argparse.Namespace) -> None:
    checks = list(args.check) if args.check else list(suite.RMATRIX_CHECKS)
    producers = suite.rmatrix_suite(args.seed, args.draws, checks)
    report = VerificationReport(seed=args.seed, suites=["rmatrix"])
    report.extend(suite.run_producers("rmatrix", producers, args.timings))
    _finish_report(report, args.out, args.all)


def handle_vertex(args: argparse.Namespace) -> None:
    if args.space != "tpn":
        raise ConfigInvalid("vertex functions are tabulated for --space tpn only")
    p = _load_envelope_params(args.params)
    if args.n is not None and args.n != p.n:
        raise ConfigInvalid(f"--n {args.n} does not match the {p.n} equivariant parameters in {args.params}")
    ks: Sequence[int] = [args.k] if args.k else range(1, p.n + 1)
    table: List[Dict[str, Any]] = []
    for k in ks:
        series = vertex.vertex_tpn(k, args.order, p)
        entry = series.to_dict()
        entry["prefactor"] = complex_to_dict(vertex.vertex_prefactor(k, p))
        entry["value"] = complex_to_dict(vertex.vertex_value(k, args.order, p))
        if args.contour:
            entry["contour"] = complex_to_dict(vertex.vertex_contour(k, p, args.quad_points))
        table.append(entry)
        logger.debug("\n%s", rendering.format_coefficients(series))
    data = {"params": p.to_dict(), "sharp_kahler": vertex.sharp_kahler(p).to_dict(), "fixed_points": table}
    if args.subtracted:
        data["subtracted"] = [complex_to_dict(value) for value in vertex.subtracted_vertex(p, args.order)]
    _emit(data, args.out)


def handle_limits(args: argparse.Namespace) -> None:
    report = VerificationReport(seed=args.seed, suites=["limits"])
    if args.kind == "theta_ratio":
        k = args.k if args.k is not None else math.floor(args.L)
        report.add(ktheory_limit.theta_ratio_limit(MultPoint(args.a), SlopePath(args.L), k))
    elif args.kind == "growth":
        report.extend(ktheory_limit.growth_basis(args.N, args.alpha, complex(args.w)))
    else:
        if not args.params:
            raise ConfigInvalid("--params is required for the support check")
        p = _load_envelope_params(args.params)
        entry = tuple(args.entry)
        report.add(ktheory_limit.stab_support_limit(p, SlopePath(args.L), entry))
    _finish_report(report, args.out, True)


def handle_verify(args: argparse.Namespace) -> None:
    names = list(config.SUITE_NAMES) if "all" in args.suite else list(dict.fromkeys(args.suite))
    cfg = SuiteConfig(
        seed=args.seed,
        suites=names,
        params=args.params,
        output=args.out,
        draws=args.draws,
        timings=args.timings,
        m_max=args.m_max,
    )
    try:
        report = suite.run_suite(cfg)
    except PartialFailure as exc:
        print(rendering.format_report(exc.report, args.all))
        raise
    print(rendering.format_report(report, args.all))
    print(config.SUITE_PASSED.format(total=len(report.checks), path=cfg.output))


def setup(parser: argparse.ArgumentParser) -> None:
    """Register every subcommand on *parser*."""
    subparsers = parser.add_subparsers(dest="command", required=True)

    theta_parser = subparsers.add_parser("theta", help=config.THETA_COMMAND_DESCRIPTION)
    theta_parser.add_argument("--u", type=_complex_arg, required=True, help="log coordinate of x")
    theta_parser.add_argument("--q", type=_complex_arg, default=0.3)
    theta_parser.add_argument("--shift", type=int, default=0, help="also evaluate theta(q^shift x)")
    theta_parser.add_argument("--out")
    theta_parser.set_defaults(handler=handle_theta)

    stab_parser = subparsers.add_parser("stab", help=config.STAB_COMMAND_DESCRIPTION)
    stab_parser.add_argument("--space", choices=("tpn", "hypertoric"), default="tpn")
    stab_parser.add_argument("--n", type=int)
    stab_parser.add_argument("--params", required=True)
    stab_parser.add_argument("--chamber", type=_chamber_arg, help="order of fixed points, e.g. 2,1,3")
    stab_parser.add_argument("--opposite", action="store_true")
    stab_parser.add_argument("--out")
    stab_parser.add_argument("--csv")
    stab_parser.set_defaults(handler=handle_stab)

    grass_parser = subparsers.add_parser("grass", help=config.GRASS_COMMAND_DESCRIPTION)
    grass_parser.add_argument("--k", type=int)
    grass_parser.add_argument("--params", required=True)
    grass_parser.add_argument("--rho", choices=("gl_k", "gl_n"), default="gl_k")
    grass_parser.add_argument("--trailing", choices=("m", "k"), default="m")
    grass_parser.add_argument("--checks", action="store_true")
    grass_parser.add_argument("--out")
    grass_parser.add_argument("--csv")
    grass_parser.set_defaults(handler=handle_grass)

    rmatrix_parser = subparsers.add_parser("rmatrix", help=config.RMATRIX_COMMAND_DESCRIPTION)
    rmatrix_parser.add_argument("--check", action="append", choices=suite.RMATRIX_CHECKS)
    rmatrix_parser.add_argument("--draws", type=int, default=50)
    rmatrix_parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    rmatrix_parser.add_argument("--out", default="rmatrix_report.json")
    rmatrix_parser.add_argument("--timings", action="store_true")
    rmatrix_parser.add_argument("--all", action="store_true", help="print every check, not only failures")
    rmatrix_parser.set_defaults(handler=handle_rmatrix)

    vertex_parser = subparsers.add_parser("vertex", help=config.VERTEX_COMMAND_DESCRIPTION)
    vertex_parser.add_argument("--space", choices=("tpn",), default="tpn")
    vertex_parser.add_argument("--n", type=int)
    vertex_parser.add_argument("--k", type=int)
    vertex_parser.add_argument("--order", type=int, default=config.DEFAULT_VERTEX_ORDER)
    vertex_parser.add_argument("--params", required=True)
    vertex_parser.add_argument("--contour", action="store_true")
    vertex_parser.add_argument("--quad-points", type=int, default=config.DEFAULT_QUAD_POINTS)
    vertex_parser.add_argument("--subtracted", action="store_true")
    vertex_parser.add_argument("--out")
    vertex_parser.set_defaults(handler=handle_vertex)

    limits_parser = subparsers.add_parser("limits", help=config.LIMITS_COMMAND_DESCRIPTION)
    limits_parser.add_argument("--kind", choices=("theta_ratio", "growth", "support"), default="theta_ratio")
    limits_parser.add_argument("--L", type=float, default=0.5)
    limits_parser.add_argument("--k", type=int)
    limits_parser.add_argument("--a", type=_complex_arg, default=0.4 + 0.3j, help="log coordinate of a")
    limits_parser.add_argument("--N", type=int, default=2)
    limits_parser.add_argument("--alpha", type=float, default=0.3)
    limits_parser.add_argument("--w", type=_complex_arg, default=1.0)
    limits_parser.add_argument("--entry", type=int, nargs=2, default=(2, 1))
    limits_parser.add_argument("--params")
    limits_parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    limits_parser.add_argument("--out", default="limits_report.json")
    limits_parser.set_defaults(handler=handle_limits)

    verify_parser = subparsers.add_parser("verify", help=config.VERIFY_COMMAND_DESCRIPTION)
    verify_parser.add_argument(
        "--suite", action="append", choices=("all",) + config.SUITE_NAMES, default=None, required=True
    )
    verify_parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    verify_parser.add_argument("--params")
    verify_parser.add_argument("--out", default="report.json")
    verify_parser.add_argument("--draws", type=int, default=50)
    verify_parser.add_argument("--m-max", type=int, default=3)
    verify_parser.add_argument("--timings", action="store_true")
    verify_parser.add_argument("--all", action="store_true", help="print every check, not only failures")
    verify_parser.set_defaults(handler=handle_verify)

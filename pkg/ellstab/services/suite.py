"""Verification suites: seeded checks of every structural identity, assembled into one report."""
from __future__ import annotations

import cmath
import logging
import math
import time
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .. import config, storage
from ..errors import ContourPinched, EllStabError, PartialFailure
from ..models import (
    Chamber,
    CheckRecord,
    DrawConstraints,
    EnvelopeParams,
    GrassParams,
    KSubset,
    MultPoint,
    QContext,
    QDiffSystem,
    SlopePath,
    SuiteConfig,
    VerificationReport,
)
from . import abelianization, envelopes, ktheory_limit, rmatrix, vertex
from .draws import draw_generic, draw_many
from .qspecial import phi, qpochhammer, theta, theta_shift_factor, theta_three_term, three_term_terms

logger = logging.getLogger(__name__)

Producer = Callable[[], List[CheckRecord]]

THETA_SAMPLES = 100
THETA_IDENTITY_TOL = 1e-10
THETA_LAW_TOL = 1e-12
HYPERTORIC_TOL = 1e-12
GRASS_DIAGONAL_TOL = 1e-9
GRASS_REDUCTION_TOL = 1e-12
REFINEMENT_TOL = 1e-10
QDIFF_TOL = 1e-10
TRIANGLE_DRAWS = 20
GROWTH_SAMPLES = 20
UNIQUENESS_KICK = 1e-3
UNIQUENESS_VIOLATION = 1e-6
HYPERTORIC_POINTS = 3
# Kahler log offsets at which pole cancellation is probed besides the preset itself.
TPS_Z_OFFSETS = (0.9j, -0.5 - 0.8j)

# Fixed parameter points for the vertex and pole-subtraction suites, as
# (a_log, hbar_log, z_log, q). All sit in the contour band with |hbar| < 1
# and a_1 >> a_2 >> ... so that the integration circles separate the poles.
PRESETS: Dict[str, tuple] = {
    "vertex_n2": ((0.8 + 0.3j, -0.7 - 0.4j), -0.6 + 0.4j, -2.53 + 0.5j, 0.25),
    "vertex_n3": ((1.5 + 0.3j, 0.05 - 0.5j, -1.4 + 0.9j), -0.6 + 0.4j, -2.53 + 0.5j, 0.25),
    "probe": ((0.9 + 0.4j, -0.2 - 0.3j), -0.51 + 0.7j, -0.69 + 1.1j, 0.3),
    "a_limit": ((0.9 + 0.4j, -0.2 - 0.3j), -0.51 + 0.7j, -0.69 + 1.1j, 0.1),
}

ENVELOPE_DRAW = {"q_range": (0.05, 0.5), "re_box": 1.5}
RMATRIX_DRAW = {"n": 3, "q_range": (0.05, 0.5), "re_box": 1.5}
VERTEX_DRAW = {"q_range": (0.1, 0.3), "re_box": 1.0}


def preset(name: str) -> EnvelopeParams:
    a_log, hbar_log, z_log, q = PRESETS[name]
    return EnvelopeParams.create(a_log, hbar_log, z_log, QContext(q))


def _suite_seed(seed: int, name: str) -> List[int]:
    return [seed, config.SUITE_NAMES.index(name)]


def _relative_matrix(observed: np.ndarray, expected: np.ndarray) -> float:
    scale = float(np.max(np.abs(expected))) or 1.0
    return float(np.max(np.abs(observed - expected))) / scale


def _suffixed(records: Sequence[CheckRecord], suffix: str) -> List[CheckRecord]:
    return [replace(record, check_id=f"{record.check_id}/{suffix}") for record in records]


def _residual_records(prefix: str, residuals: Dict[str, float], tol: float, digest: str) -> List[CheckRecord]:
    return [CheckRecord.evaluate(f"{prefix}/{key}", value, tol, digest) for key, value in sorted(residuals.items())]


# -- theta ------------------------------------------------------------------


def _theta_point(rng: np.random.Generator) -> MultPoint:
    return MultPoint(complex(rng.uniform(-1.5, 1.5), rng.uniform(-math.pi, math.pi)))


def theta_suite(seed: int) -> List[Producer]:
    rng = np.random.default_rng(_suite_seed(seed, "theta"))
    producers: List[Producer] = []
    for index in range(THETA_SAMPLES):
        modulus = rng.uniform(0.05, 0.5)
        ctx = QContext(modulus * cmath.exp(1j * rng.uniform(-math.pi, math.pi)))
        A, B, C = (_theta_point(rng) for _ in range(3))
        producers.append(lambda A=A, B=B, C=C, ctx=ctx, index=index: _theta_checks(A, B, C, ctx, index))
    return producers


def _theta_checks(A: MultPoint, B: MultPoint, C: MultPoint, ctx: QContext, index: int) -> List[CheckRecord]:
    tag = f"{index:03d}"
    terms = three_term_terms(A, B, C, ctx)
    three_term = abs(theta_three_term(A, B, C, ctx)) / max(abs(term) for term in terms)
    value = theta(A, ctx)
    odd = abs(value + theta(A.inverse(), ctx)) / abs(value)
    shifted = theta(A.shift_q(ctx), ctx)
    quasi = abs(shifted - theta_shift_factor(A, 1, ctx) * value) / abs(shifted)
    finite = qpochhammer(B, 5, ctx)
    pochhammer = abs(finite - phi(B, ctx) / phi(B.shift_q(ctx, 5), ctx)) / abs(finite)
    return [
        CheckRecord.evaluate(f"theta/three_term/{tag}", three_term, THETA_IDENTITY_TOL),
        CheckRecord.evaluate(f"theta/odd/{tag}", odd, THETA_LAW_TOL),
        CheckRecord.evaluate(f"theta/quasi/{tag}", quasi, THETA_LAW_TOL),
        CheckRecord.evaluate(f"theta/pochhammer/{tag}", pochhammer, THETA_LAW_TOL),
    ]


# -- envelope -----------------------------------------------------------------


def _kicked_builder(c: Chamber) -> Callable[[EnvelopeParams], np.ndarray]:
    """Return the envelope with one attracting entry moved by a constant."""

    def build(p: EnvelopeParams) -> np.ndarray:
        matrix = envelopes.label_matrix(p, c)
        low, high = c.order[-1], c.order[0]
        matrix[low - 1, high - 1] += UNIQUENESS_KICK * (float(np.max(np.abs(matrix))) or 1.0)
        return matrix

    return build


def characterization_records(p: EnvelopeParams, c: Chamber, tag: str) -> List[CheckRecord]:
    digest = p.digest()
    residuals = envelopes.characterization_residuals(lambda local: envelopes.label_matrix(local, c), p, c)
    records = _residual_records(f"envelope/char/{tag}", residuals, envelopes.LAW_TOL, digest)
    quasi = envelopes.quasiperiodicity_residuals(p, c)
    records += _residual_records(f"envelope/quasi/{tag}", quasi, envelopes.LAW_TOL, digest)
    kicked = envelopes.characterization_residuals(_kicked_builder(c), p, c)
    violation = max(kicked["z_law"], kicked["a_law"])
    records.append(
        CheckRecord.evaluate(
            f"envelope/uniqueness/{tag}",
            0.0 if violation > UNIQUENESS_VIOLATION else 1.0,
            0.5,
            digest,
            {"violation": violation},
        )
    )
    return records


def hypertoric_records(p: EnvelopeParams, rng: np.random.Generator) -> List[CheckRecord]:
    """T*P^{n-1} encoded as hypertoric data agrees with the direct envelope, as functions and at fixed points."""
    data = envelopes.tpn_hypertoric(p.n, p.z)
    digest = p.digest()
    observed = envelopes.restriction_matrix_hypertoric(data, p).entries
    expected = envelopes.label_matrix(p)
    pointwise = 0.0
    for _ in range(HYPERTORIC_POINTS):
        s = _theta_point(rng)
        for k, F in enumerate(data.fixed_points, start=1):
            value = envelopes.stab_hypertoric(F, [s], data, p)
            reference = envelopes.stab_tpn(k, s, p)
            pointwise = max(pointwise, abs(value - reference) / max(abs(reference), 1e-300))
    at_fixed = np.array(
        [
            [envelopes.stab_hypertoric(F, envelopes.fixed_point_s(G, data, p), data, p) for F in data.fixed_points]
            for G in data.fixed_points
        ]
    )
    return [
        CheckRecord.evaluate(f"envelope/hypertoric/n{p.n}", _relative_matrix(observed, expected), HYPERTORIC_TOL, digest),
        CheckRecord.evaluate(f"envelope/hypertoric/pointwise/n{p.n}", pointwise, HYPERTORIC_TOL, digest),
        CheckRecord.evaluate(
            f"envelope/hypertoric/fixed_points/n{p.n}", _relative_matrix(at_fixed, observed), HYPERTORIC_TOL, digest
        ),
    ]


def _product_records(p: EnvelopeParams) -> List[CheckRecord]:
    """T*P^1 x T*P^1 as rank-2 data factorizes into the Kronecker product of the factors."""
    first_z = p.z
    second_z = MultPoint(p.z.u + 0.37 + 0.21j)
    data = envelopes.product_hypertoric(envelopes.tpn_hypertoric(2, first_z), envelopes.tpn_hypertoric(2, second_z))
    observed = envelopes.restriction_matrix_hypertoric(data, p).entries
    left = envelopes.label_matrix(p.restrict([1, 2]).with_z(first_z))
    right = envelopes.label_matrix(p.restrict([3, 4]).with_z(second_z))
    expected = np.kron(left, right)
    return [
        CheckRecord.evaluate(
            "envelope/hypertoric/product", _relative_matrix(observed, expected), HYPERTORIC_TOL, p.digest()
        )
    ]


def envelope_suite(seed: int, extra: Optional[EnvelopeParams] = None) -> List[Producer]:
    entropy = _suite_seed(seed, "envelope")
    rng = np.random.default_rng(entropy)
    producers: List[Producer] = []
    for n in range(2, 7):
        (p,) = draw_many(entropy + [n], 1, dict(ENVELOPE_DRAW, n=n))
        permuted = Chamber(tuple(int(label) for label in rng.permutation(np.arange(1, n + 1))))
        producers.append(lambda p=p, n=n: characterization_records(p, Chamber.standard(n), f"n{n}"))
        producers.append(lambda p=p, n=n, c=permuted: characterization_records(p, c, f"n{n}/perm"))
        producers.append(lambda p=p: [envelopes.duality_check(p)])
        producers.append(lambda p=p, n=n: hypertoric_records(p, np.random.default_rng(entropy + [n, 1])))
        if n == 4:
            producers.append(lambda p=p: _product_records(p))
    triangles = draw_many(entropy + [0], TRIANGLE_DRAWS, dict(ENVELOPE_DRAW, n=3))
    for index, p in enumerate(triangles):
        for m in (1, 2):
            producers.append(
                lambda p=p, m=m, index=index: _suffixed(
                    envelopes.triangle_factorization_check(p, tuple(range(1, m + 1))), f"d{index:02d}"
                )
            )
    if extra is not None:
        producers.append(lambda: characterization_records(extra, Chamber.standard(extra.n), "file"))
    return producers


# -- grass --------------------------------------------------------------------


def grass_reduction_records(p: EnvelopeParams) -> List[CheckRecord]:
    """Gr(1, n) reproduces T*P^{n-1} entry by entry."""
    observed = abelianization.restriction_matrix_grass(GrassParams(1, p)).entries
    expected = envelopes.restriction_matrix_tpn(p).entries
    return [
        CheckRecord.evaluate(
            f"grass/gr1{p.n}/tpn", _relative_matrix(observed, expected), GRASS_REDUCTION_TOL, p.digest()
        )
    ]


def grass_check_records(gp: GrassParams) -> List[CheckRecord]:
    tag = f"grass/gr{gp.k}{gp.n}"
    digest = gp.params.digest()
    residuals = abelianization.grass_checks(gp)
    records = [
        CheckRecord.evaluate(f"{tag}/support", residuals["support"], envelopes.TRIANGLE_TOL, digest),
        CheckRecord.evaluate(f"{tag}/diagonal", residuals["diagonal"], GRASS_DIAGONAL_TOL, digest),
        CheckRecord.evaluate(f"{tag}/z_law", residuals["z_law"], envelopes.TRIANGLE_TOL, digest),
    ]
    alternatives = {}
    for rho, trailing in (("gl_k", "k"), ("gl_n", "m")):
        try:
            other = abelianization.grass_checks(GrassParams(gp.k, gp.params, rho, trailing))
        except EllStabError as exc:
            alternatives[f"{rho}/{trailing}"] = str(exc)
            continue
        alternatives[f"{rho}/{trailing}"] = max(other.values())
    records.append(
        CheckRecord.evaluate(
            f"{tag}/convention",
            max(residuals.values()),
            GRASS_DIAGONAL_TOL,
            digest,
            {"selected": f"{gp.rho}/{gp.trailing}", "alternatives": alternatives},
        )
    )
    return records


def f_weight_records(gp: GrassParams, rng: np.random.Generator) -> List[CheckRecord]:
    """With z_shift = z and the i > m trailing product, f_m is the T*P^{n-1} envelope of F_m."""
    p = gp.params
    worst = 0.0
    for _ in range(HYPERTORIC_POINTS):
        s = _theta_point(rng)
        for m in range(1, gp.n + 1):
            value = abelianization.f_weight(m, s, p.z, gp)
            reference = envelopes.stab_tpn(m, s, p)
            worst = max(worst, abs(value - reference) / max(abs(reference), 1e-300))
    return [CheckRecord.evaluate(f"grass/f_weight/n{gp.n}", worst, THETA_LAW_TOL, p.digest())]


def grass_point_records(p: EnvelopeParams) -> List[CheckRecord]:
    """Gr(n, n) is a point: the restriction matrix is the single normalization 1."""
    entries = abelianization.restriction_matrix_grass(GrassParams(p.n, p)).entries
    residual = float(np.max(np.abs(entries - np.eye(1))))
    return [CheckRecord.evaluate(f"grass/gr{p.n}{p.n}/point", residual, GRASS_REDUCTION_TOL, p.digest())]


def grass_symmetry_records(gp: GrassParams, rng: np.random.Generator) -> List[CheckRecord]:
    records = []
    for mu in abelianization.dominance_basis(gp.k, gp.n):
        s = [MultPoint(complex(rng.uniform(-1, 1), rng.uniform(-math.pi, math.pi))) for _ in range(gp.k)]
        value = abelianization.stab_grass(mu, s, gp)
        swapped = abelianization.stab_grass(mu, list(reversed(s)), gp)
        residual = abs(value - swapped) / max(abs(value), 1e-300)
        records.append(CheckRecord.evaluate(f"grass/symmetry/{mu.label}", residual, THETA_LAW_TOL, gp.params.digest()))
    return records


def grass_suite(seed: int) -> List[Producer]:
    entropy = _suite_seed(seed, "grass")
    (p4,) = draw_many(entropy + [4], 1, dict(ENVELOPE_DRAW, n=4, re_box=1.0))
    (p3,) = draw_many(entropy + [3], 1, dict(ENVELOPE_DRAW, n=3))
    (p2,) = draw_many(entropy + [2], 1, dict(ENVELOPE_DRAW, n=2))
    gp = GrassParams(2, p4)
    producers: List[Producer] = [
        lambda: grass_reduction_records(p3),
        lambda: grass_reduction_records(p4),
        lambda: grass_check_records(gp),
        lambda: grass_symmetry_records(gp, np.random.default_rng(entropy + [1])),
        lambda: f_weight_records(gp, np.random.default_rng(entropy + [2])),
        lambda: grass_point_records(p2),
    ]
    for mu in abelianization.dominance_basis(2, 4):
        producers.append(lambda mu=mu: [abelianization.regularity_record(mu, (1, 2), gp, "diagonal")])
    shifted_mu = KSubset((1, 3))
    producers.append(lambda: [abelianization.regularity_record(shifted_mu, (1, 2), gp, "shifted")])
    return producers


# -- rmatrix ------------------------------------------------------------------

RMATRIX_CHECKS = ("product_form", "determinant", "gauge", "unitarity", "dyb")


def _shifted_gauge(p: EnvelopeParams) -> rmatrix.GaugeFunction:
    offset = 0.3 + 0.1j
    return lambda z: theta(MultPoint(z.u + offset), p.ctx) / theta(z, p.ctx)


def rmatrix_records(p: EnvelopeParams, index: int, checks: Sequence[str] = RMATRIX_CHECKS) -> List[CheckRecord]:
    suffix = f"d{index:02d}"
    closed = rmatrix.r_closed_form(p)
    felder = rmatrix.r_felder(p)
    gauged = rmatrix.gauge_transform(closed, _shifted_gauge(p), name="gauged")
    records: List[CheckRecord] = []
    if "product_form" in checks:
        records.append(rmatrix.product_form_check(p, suffix))
    if "determinant" in checks:
        records.append(rmatrix.determinant_check(p, suffix))
    if "gauge" in checks:
        records.append(rmatrix.gauge_check(p, suffix))
    if "unitarity" in checks:
        for R in (closed, felder, gauged, rmatrix.r_from_stab(p)):
            records.append(rmatrix.check_unitarity(R, p, suffix))
    if "dyb" in checks:
        for R in (closed, felder, gauged):
            records.append(rmatrix.check_dyb(R, p, suffix))
    return records


def rmatrix_suite(seed: int, draws: int, checks: Sequence[str] = RMATRIX_CHECKS) -> List[Producer]:
    unknown = [name for name in checks if name not in RMATRIX_CHECKS]
    if unknown:
        raise ValueError(f"unknown R-matrix check {unknown[0]!r}")
    params = draw_many(_suite_seed(seed, "rmatrix"), draws, RMATRIX_DRAW)
    return [lambda p=p, index=index: rmatrix_records(p, index, checks) for index, p in enumerate(params)]


# -- vertex -------------------------------------------------------------------


def refinement_record(k: int, p: EnvelopeParams) -> CheckRecord:
    coarse = vertex.vertex_contour(k, p, config.DEFAULT_QUAD_POINTS)
    fine = vertex.vertex_contour(k, p, 2 * config.DEFAULT_QUAD_POINTS)
    residual = abs(coarse - fine) / abs(fine)
    return CheckRecord.evaluate(f"vertex/refinement/n{p.n}/F{k}", residual, REFINEMENT_TOL, p.digest())


def qdiff_records() -> List[CheckRecord]:
    """Solve a fixed non-resonant 2x2 system and test the functional equation away from x = 0."""
    system = QDiffSystem(
        [
            np.array([[0.7, 0.2], [0.1, 1.3]], dtype=complex),
            np.array([[0.3, -0.5j], [0.25, 0.1]], dtype=complex),
        ],
        0.3,
    )
    solution = vertex.qdiff_series_solve(system, 24)
    residual = max(vertex.qdiff_residual(system, solution, x) for x in (0.05, 0.04j, -0.03 + 0.02j))
    return [CheckRecord.evaluate("vertex/qdiff/residual", residual, QDIFF_TOL)]


def vertex_suite(seed: int) -> List[Producer]:
    producers: List[Producer] = []
    for name in ("vertex_n2", "vertex_n3"):
        p = preset(name)
        for k in range(1, p.n + 1):
            producers.append(lambda k=k, p=p: [vertex.series_contour_agreement(k, p)])
            producers.append(lambda k=k, p=p: [refinement_record(k, p)])
            producers.append(lambda k=k, p=p: [vertex.prefactor_growth_check(k, p)])
        producers.append(lambda p=p: [vertex.sharp_inverse_check(p)])
        producers.append(lambda p=p: [vertex.exponent_check(p)])
    p2 = preset("vertex_n2")
    for k in (1, 2):
        producers.append(lambda k=k: [vertex.subtracted_contour_agreement(k, p2)])
    entropy = _suite_seed(seed, "vertex")
    for n in (2, 3):
        (drawn,) = draw_many(entropy + [n], 1, dict(VERTEX_DRAW, n=n))
        for k in range(1, n + 1):
            producers.append(lambda k=k, p=drawn: _suffixed([vertex.prefactor_growth_check(k, p)], "drawn"))
        producers.append(lambda p=drawn: _suffixed([vertex.sharp_inverse_check(p)], "drawn"))
    producers.append(qdiff_records)
    return producers


# -- tps ----------------------------------------------------------------------


def pinch_record(seed: int) -> CheckRecord:
    """A drawn a_1/a_2 = hbar*q configuration must be refused by the separating contour."""
    p = draw_generic(seed, DrawConstraints(n=2, q=0.3, hbar_inside=True, ordered=True, pinch=True))
    try:
        vertex.vertex_contour(1, p, representation="subtracted")
    except ContourPinched as exc:
        return CheckRecord.evaluate("tps/pinch", 0.0, 0.5, p.digest(), {"error": str(exc)})
    return CheckRecord.evaluate("tps/pinch", 1.0, 0.5, p.digest())


def tps_suite(seed: int, m_max: int) -> List[Producer]:
    p = preset("probe")
    digest = p.digest()

    def periodicity() -> List[CheckRecord]:
        residuals = vertex.periodicity_residuals(p)
        return _residual_records("tps/periodicity", residuals, vertex.PERIODICITY_TOL, digest)

    producers: List[Producer] = [
        lambda: vertex.probe_records(vertex.pole_cancellation_check(p, m_max=m_max), p),
    ]
    for index, offset in enumerate(TPS_Z_OFFSETS, start=1):
        local = p.with_z(MultPoint(p.z.u + offset))
        producers.append(
            lambda local=local, index=index: vertex.probe_records(
                vertex.pole_cancellation_check(local, m_max=m_max), local, f"z{index}"
            )
        )
    return producers + [
        periodicity,
        lambda: [CheckRecord.evaluate("tps/triangular", vertex.triangularity_residual(p), vertex.TRIANGULAR_TOL, digest)],
        lambda: vertex.a_limit_check(preset("a_limit")),
        lambda: [pinch_record(seed)],
    ]


# -- limits -------------------------------------------------------------------


def _alpha(rng: np.random.Generator) -> float:
    while True:
        alpha = float(rng.uniform(-2.0, 2.0))
        if abs(alpha - round(alpha)) > 0.05:
            return alpha


def limits_suite(seed: int) -> List[Producer]:
    rng = np.random.default_rng(_suite_seed(seed, "limits"))
    a = MultPoint(complex(rng.uniform(-1.0, 1.0), rng.uniform(-math.pi, math.pi)))
    producers: List[Producer] = [
        lambda k=k: [ktheory_limit.theta_ratio_limit(a, SlopePath(k + 0.5), k)] for k in (0, 1, 2)
    ]
    for index in range(GROWTH_SAMPLES):
        N = 1 + index % 4
        alpha = _alpha(rng)
        w = cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        producers.append(
            lambda N=N, alpha=alpha, w=w, index=index: ktheory_limit.growth_basis(N, alpha, w, tag=f"a{index:02d}")
        )
    p = preset("probe")
    producers.append(lambda: [ktheory_limit.stab_support_limit(p, SlopePath(0.5), (2, 1))])
    producers.append(lambda: [ktheory_limit.stab_support_limit(p, SlopePath(1.5), (2, 1))])
    for entry in ((1, 1), (2, 2)):
        producers.append(lambda entry=entry: [ktheory_limit.stab_support_limit(p, SlopePath(0.5), entry)])
    producers.append(lambda: [ktheory_limit.support_wall_check(p, 0)])
    return producers


# -- orchestration -------------------------------------------------------------


def _producers(name: str, cfg: SuiteConfig, extra: Optional[EnvelopeParams]) -> List[Producer]:
    if name == "theta":
        return theta_suite(cfg.seed)
    if name == "envelope":
        return envelope_suite(cfg.seed, extra)
    if name == "grass":
        return grass_suite(cfg.seed)
    if name == "rmatrix":
        return rmatrix_suite(cfg.seed, cfg.draws)
    if name == "vertex":
        return vertex_suite(cfg.seed)
    if name == "tps":
        return tps_suite(cfg.seed, cfg.m_max)
    if name == "limits":
        return limits_suite(cfg.seed)
    raise ValueError(f"unknown suite {name!r}")


def run_producers(name: str, producers: Sequence[Producer], timings: bool = False) -> List[CheckRecord]:
    """Run each producer; a library error becomes a failing record instead of aborting the suite."""
    records: List[CheckRecord] = []
    for index, producer in enumerate(producers):
        started = time.perf_counter()
        try:
            produced = producer()
        except EllStabError as exc:
            logger.warning("%s check %d raised %s: %s", name, index, type(exc).__name__, exc)
            produced = [
                CheckRecord.evaluate(
                    f"{name}/error/{index:03d}", math.inf, 0.0, details={"error": f"{type(exc).__name__}: {exc}"}
                )
            ]
        elapsed = 1000.0 * (time.perf_counter() - started)
        if timings:
            produced = [replace(record, runtime_ms=elapsed) for record in produced]
        records.extend(produced)
    return records


def collect(cfg: SuiteConfig) -> VerificationReport:
    """Execute the configured suites and return the report without writing it."""
    extra = EnvelopeParams.from_dict(storage.load_params(cfg.params)) if cfg.params else None
    report = VerificationReport(seed=cfg.seed, suites=list(cfg.suites))
    for name in cfg.suites:
        logger.info("suite %s started", name)
        records = run_producers(name, _producers(name, cfg, extra), cfg.timings)
        failed = [record for record in records if not record.passed]
        for record in failed:
            logger.warning("check %s failed: residual %.3e >= %.1e", record.check_id, record.residual, record.tolerance)
        logger.info("suite %s finished: %d of %d checks passed", name, len(records) - len(failed), len(records))
        report.extend(records)
    return report


def run_suite(cfg: SuiteConfig) -> VerificationReport:
    """Run the suites, write the report and raise PartialFailure when any check failed."""
    report = collect(cfg)
    storage.write_report(cfg.output, report.to_dict())
    total = len(report.checks)
    if not report.all_passed:
        message = config.SUITE_FAILED.format(failed=len(report.failed), total=total, path=cfg.output)
        raise PartialFailure(message, cfg.output, report)
    return report

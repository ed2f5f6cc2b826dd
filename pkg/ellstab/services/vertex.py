"""Vertex functions of T*P^{n-1}, their integral forms and the pole-subtraction matrix."""
from __future__ import annotations

import cmath
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .. import config
from ..errors import (
    ContourPinched,
    ControlDegenerate,
    DenominatorVanishes,
    Resonant,
    ResonantDenominator,
    SingularStab,
    TruncationInsufficient,
)
from ..models import (
    Chamber,
    CheckRecord,
    EnvelopeParams,
    MultPoint,
    PoleProbeReport,
    QDiffSolution,
    QDiffSystem,
    RestrictionMatrix,
    SharpKahler,
    VertexSeries,
)
from .envelopes import dual_kahler, label_matrix, stab_tpn, tangent_theta, tangent_weights
from .qspecial import bilinear_exp, phi, theta

logger = logging.getLogger(__name__)

VERTEX_MAX_ORDER = 40
SERIES_TAIL_TOL = 1e-14
AGREEMENT_TOL = 1e-8
INVERSE_TOL = 1e-9
PERIODICITY_TOL = 1e-10
TRIANGULAR_TOL = 1e-8
EXPONENT_TOL = 1e-6
GROWTH_TOL = 1e-5
GROWTH_STEPS = 16
QDIFF_RESONANCE_TOL = 1e-8


def sharp_kahler(p: EnvelopeParams) -> SharpKahler:
    """Return z_# = (-1)^n hbar^{n/2} z with the sign carried as i*pi*n in the logarithm."""
    n = p.n
    u = p.z.u + 0.5 * n * p.hbar.u + 1j * math.pi * n
    return SharpKahler(z_sharp=MultPoint(u), sign_power=n, hbar_half_power=n)


def _phase_distance(u: complex) -> float:
    """Distance from u to 2 pi i Z."""
    return abs(u - 2j * math.pi * round(u.imag / (2 * math.pi)))


def vertex_tpn(k: int, D: int, p: EnvelopeParams) -> VertexSeries:
    """Return c_0..c_D of the vertex function restricted to F_k."""
    n = p.n
    if not 1 <= k <= n:
        raise ValueError(f"fixed point index {k} outside 1..{n}")
    if D < 0:
        raise ValueError("order must be nonnegative")
    ctx = p.ctx
    log_ratios = [point.u - p.a[k - 1].u for point in p.a]
    for i, u in enumerate(log_ratios, start=1):
        for j in range(1, D + 1):
            if _phase_distance(u + j * ctx.log_q) < config.RESONANCE_RADIUS:
                raise ResonantDenominator((i, k), j)

    step = (-ctx.q * cmath.exp(-p.hbar.u / 2)) ** n
    hbar = p.hbar.value
    ratios = [cmath.exp(u) for u in log_ratios]
    coeffs = [1.0 + 0j]
    for d in range(1, D + 1):
        factor = step
        for x in ratios:
            factor *= (1.0 - ctx.q ** (d - 1) * hbar * x) / (1.0 - ctx.q**d * x)
        coeffs.append(coeffs[-1] * factor)
    return VertexSeries(fixed_point=k, coeffs=coeffs)


def phi_ratio(k: int, p: EnvelopeParams) -> complex:
    """Return prod_{i != k} phi(q hbar^{-1} a_k/a_i) / phi(a_k/a_i)."""
    ctx = p.ctx
    value = 1.0 + 0j
    for i, point in enumerate(p.a, start=1):
        if i == k:
            continue
        y = p.a[k - 1] / point
        denominator = phi(y, ctx)
        if abs(denominator) < config.DENOMINATOR_FLOOR:
            raise DenominatorVanishes(f"phi(a{k}/a{i}) vanishes")
        value *= phi(MultPoint(y.u + ctx.log_q - p.hbar.u), ctx) / denominator
    return value


def vertex_prefactor(k: int, p: EnvelopeParams) -> complex:
    z_sharp = sharp_kahler(p).z_sharp
    return bilinear_exp(z_sharp, p.a[k - 1].inverse(), p.ctx) * phi_ratio(k, p)


def vertex_value(k: int, D: int, p: EnvelopeParams) -> complex:
    """Return prefactor times the truncated series at z."""
    return vertex_prefactor(k, p) * vertex_tpn(k, D, p).evaluate(p.z.value)


def _polarization_psi(sigma: complex, p: EnvelopeParams) -> complex:
    """Phi'((q - hbar) * polarization) at s = exp(sigma), zero mode replaced by phi(q)."""
    ctx = p.ctx
    value = phi(MultPoint(ctx.log_q), ctx) / phi(MultPoint(ctx.log_q - p.hbar.u), ctx)
    for point in p.a:
        x = MultPoint(-sigma - point.u)
        value *= phi(MultPoint(x.u + ctx.log_q - p.hbar.u), ctx) / phi(x, ctx)
    return value


def _nearest_pole(center: complex, k: int, d: int, p: EnvelopeParams) -> float:
    """Return the distance from the pole s = q^d / a_k to the nearest other pole, in log s."""
    log_q = p.ctx.log_q
    best = math.inf
    for i, point in enumerate(p.a, start=1):
        guess = ((center + point.u) / log_q).real
        for m in {max(0, int(math.floor(guess)) + offset) for offset in (-1, 0, 1, 2)}:
            for l in (-1, 0, 1):
                if i == k and m == d and l == 0:
                    continue
                best = min(best, abs(center - (m * log_q - point.u + 2j * math.pi * l)))
    return best


def _circle_nodes(count: int) -> np.ndarray:
    return np.exp(2j * math.pi * np.arange(count) / count)


def _enclosed_residue(k: int, d: int, p: EnvelopeParams, z_sharp: MultPoint, quad_points: int) -> complex:
    log_q = p.ctx.log_q
    center = d * log_q - p.a[k - 1].u
    distance = _nearest_pole(center, k, d, p)
    if distance < config.PINCH_TOL:
        raise ContourPinched(f"pole s = q^{d}/a{k} collides with another pole (distance {distance:.2e})")
    radius = min(0.5, 0.4 * distance)
    total = 0j
    for node in _circle_nodes(quad_points):
        delta = radius * node
        sigma = center + delta
        total += cmath.exp(z_sharp.u * sigma / log_q) * _polarization_psi(sigma, p) * delta
    return total / quad_points


def _separating_circle(k: int, p: EnvelopeParams) -> float:
    """Return log r for the circle between the poles q^m/a_i (i <= k) and q^{-m}/(hbar a_i) (i >= k)."""
    inner = max(-p.a[i - 1].u.real for i in range(1, k + 1))
    outer = min(-(p.hbar.u + p.a[i - 1].u).real for i in range(k, p.n + 1))
    if outer - inner < config.PINCH_TOL:
        raise ContourPinched(
            f"no circle separates the pole families for F{k} (log gap {outer - inner:.3e})"
        )
    return 0.5 * (inner + outer)


def subtracted_integrand(k: int, sigma: complex, p: EnvelopeParams, z_sharp: Optional[MultPoint] = None) -> complex:
    """Return Psi(s) Stab_#(F_k)(s) / Theta(T^{1/2})(s) at s = exp(sigma)."""
    z_sharp = z_sharp or sharp_kahler(p).z_sharp
    dual = p.with_z(dual_kahler(p, z_sharp))
    s = MultPoint(sigma)
    stab = stab_tpn(k, s, dual, Chamber.standard(p.n, -1))
    polarization = 1.0 + 0j
    base = theta(p.hbar.inverse(), p.ctx)
    for point in p.a:
        polarization *= theta(MultPoint(-p.hbar.u - point.u - sigma), p.ctx) / base
    return _polarization_psi(sigma, p) * stab / polarization


def vertex_contour(
    k: int,
    p: EnvelopeParams,
    quad_points: int = config.DEFAULT_QUAD_POINTS,
    representation: str = "vertex",
) -> complex:
    """Evaluate the s-integral representation for F_k by the trapezoid rule.

    `vertex` sums small-circle residues of the basic integrand over the enclosed
    poles s = q^d / a_k, and returns the vertex function itself. `subtracted`
    integrates the pole-subtracted integrand over one circle separating the
    two pole families and returns the bare integral.
    """
    if quad_points < 4:
        raise ValueError("quad_points must be at least 4")
    z_sharp = sharp_kahler(p).z_sharp
    if representation == "vertex":
        total = 0j
        quiet = 0
        for d in range(VERTEX_MAX_ORDER + 1):
            term = _enclosed_residue(k, d, p, z_sharp, quad_points)
            total += term
            quiet = quiet + 1 if abs(term) <= SERIES_TAIL_TOL * abs(total) else 0
            if quiet >= 2:
                logger.debug("vertex contour for F%d converged after %d poles", k, d + 1)
                return total
        raise TruncationInsufficient(f"residue sum for F{k} did not settle within {VERTEX_MAX_ORDER} poles")
    if representation == "subtracted":
        log_r = _separating_circle(k, p)
        logger.debug("subtracted contour for F%d on |s| = %.4g", k, math.exp(log_r))
        total = 0j
        for node in _circle_nodes(quad_points):
            total += subtracted_integrand(k, log_r + 1j * cmath.phase(node), p, z_sharp)
        return total / quad_points
    raise ValueError(f"unknown representation {representation!r}")


def sharp_restriction(p: EnvelopeParams) -> np.ndarray:
    """Return S[i][k] = Stab_#(F_k) at s = 1/a_i, the opposite-chamber envelope at hbar^n / z_#."""
    z_sharp = sharp_kahler(p).z_sharp
    return label_matrix(p.with_z(dual_kahler(p, z_sharp)), Chamber.standard(p.n, -1))


def bphi(k: int, p: EnvelopeParams, include_canonical: bool = False) -> complex:
    """Return Phi(q(TX + T^vee X)) at F_k, times K^{1/2} = hbar^{(1-n)/2} when requested."""
    env = p.env()
    value = 1.0 + 0j
    for weight, _ in tangent_weights(k, p.n):
        w = weight.point(env)
        value *= phi(w.shift_q(p.ctx), p.ctx) * phi(w.inverse().shift_q(p.ctx), p.ctx)
    if include_canonical:
        value *= cmath.exp((1 - p.n) * p.hbar.u / 2)
    return value


def stab_sharp(p: EnvelopeParams, include_canonical: bool = False) -> RestrictionMatrix:
    """Return bphi^{-1} Stab_C(z_#)^{-1} bphi, with the inverse taken from the duality pairing."""
    n = p.n
    thetas = np.array([tangent_theta(i, p) for i in range(1, n + 1)])
    if np.min(np.abs(thetas)) < config.DENOMINATOR_FLOOR:
        raise SingularStab("tangent theta class vanishes at a fixed point")
    inverse = (-1) ** (n - 1) * sharp_restriction(p).T / thetas[None, :]
    weights = np.array([bphi(k, p, include_canonical) for k in range(1, n + 1)])
    entries = inverse * weights[None, :] / weights[:, None]
    return RestrictionMatrix(entries=entries, basis=[f"F{k}" for k in range(1, n + 1)], params=p.to_dict())


def sharp_inverse_check(p: EnvelopeParams) -> CheckRecord:
    """Stab^# composed with the conjugated envelope at z_# is the identity."""
    n = p.n
    z_sharp = sharp_kahler(p).z_sharp
    weights = np.array([bphi(k, p) for k in range(1, n + 1)])
    direct = label_matrix(p.with_z(z_sharp), Chamber.standard(n)) * weights[None, :] / weights[:, None]
    product = stab_sharp(p).entries @ direct
    residual = float(np.max(np.abs(product - np.eye(n))))
    return CheckRecord.evaluate(f"vertex/stab_sharp/inverse/n{n}", residual, INVERSE_TOL, p.digest())


def _row_factor(k: int, p: EnvelopeParams, z_sharp: MultPoint) -> complex:
    n = p.n
    exponent = (z_sharp.u - (n - k) * p.hbar.u) * p.a[k - 1].u
    exponent += p.hbar.u * sum(p.a[l - 1].u for l in range(k + 1, n + 1))
    return cmath.exp(-exponent / p.ctx.log_q)


def normalized_subtraction_matrix(p: EnvelopeParams) -> np.ndarray:
    """Return the pole-subtraction matrix without its row factors and e(z_#, a_i) columns.

    Entry [k][i] is Stab_#(F_k) at s = 1/a_i over the half tangent theta class at F_i.
    """
    n = p.n
    S = sharp_restriction(p)
    env = p.env()
    matrix = np.zeros((n, n), dtype=complex)
    for k in range(1, n + 1):
        for i in range(1, k + 1):
            half = 1.0 + 0j
            for l in range(1, n + 1):
                if l != i:
                    half *= theta(MultPoint(env[f"a{i}"] - env[f"a{l}"] - p.hbar.u), p.ctx)
            matrix[k - 1, i - 1] = S[i - 1, k - 1] / half
    return matrix


def pole_subtraction_matrix(p: EnvelopeParams) -> np.ndarray:
    """Return the lower-triangular matrix that maps z-holomorphic to a-holomorphic solutions."""
    n = p.n
    z_sharp = sharp_kahler(p).z_sharp
    rows = np.array([_row_factor(k, p, z_sharp) for k in range(1, n + 1)])
    columns = np.array([bilinear_exp(z_sharp, point, p.ctx) for point in p.a])
    return rows[:, None] * normalized_subtraction_matrix(p) * columns[None, :]


def subtracted_vertex(p: EnvelopeParams, D: int = config.DEFAULT_VERTEX_ORDER) -> np.ndarray:
    values = np.array([vertex_value(k, D, p) for k in range(1, p.n + 1)])
    return pole_subtraction_matrix(p) @ values


def periodicity_residuals(p: EnvelopeParams) -> Dict[str, float]:
    """Return relative changes of the pole-subtraction matrix under z -> qz and a_m -> q a_m."""
    base = pole_subtraction_matrix(p)
    scale = float(np.max(np.abs(base))) or 1.0
    z_shift = pole_subtraction_matrix(p.with_z(p.z.shift_q(p.ctx)))
    a_worst = 0.0
    for m in range(1, p.n + 1):
        shifted = pole_subtraction_matrix(p.with_a(m, p.a[m - 1].shift_q(p.ctx)))
        a_worst = max(a_worst, float(np.max(np.abs(shifted - base))) / scale)
    return {"z": float(np.max(np.abs(z_shift - base))) / scale, "a": a_worst}


def triangularity_residual(p: EnvelopeParams) -> float:
    matrix = pole_subtraction_matrix(p)
    scale = float(np.max(np.abs(matrix))) or 1.0
    return float(np.max(np.abs(np.triu(matrix, 1)))) / scale


def _probe_residues(
    p: EnvelopeParams, m: int, D: int, radius: float, nodes: int
) -> Tuple[np.ndarray, complex, float]:
    """Discrete residues of the subtracted 2-vector and of the control in the variable ln a_1."""
    center = p.a[1].u - m * p.ctx.log_q
    combined = np.zeros(2, dtype=complex)
    control = 0j
    scale = 0.0
    for node in _circle_nodes(nodes):
        delta = radius * node
        local = p.with_a(1, MultPoint(center + delta))
        matrix = pole_subtraction_matrix(local)
        values = np.array([vertex_value(k, D, local) for k in (1, 2)])
        solution = matrix @ values
        combined += solution * delta
        control += matrix[1, 1] * values[1] * delta
        scale = max(scale, float(np.max(np.abs(solution))))
    return combined / nodes, control / nodes, scale


def pole_cancellation_check(
    p: EnvelopeParams,
    D: int = config.DEFAULT_VERTEX_ORDER,
    m_max: int = 3,
    radius: float = config.PROBE_RADIUS,
    nodes: int = config.PROBE_NODES,
    tol: float = config.POLE_RESIDUE_TOL,
) -> List[PoleProbeReport]:
    """Probe the divisors a_1/a_2 = q^{-m}, m = 1..m_max, of the subtracted T*P^1 vertex."""
    if p.n != 2:
        raise ValueError("pole cancellation is probed on T*P^1 only")
    if D < m_max + 2:
        raise ValueError(f"order {D} too small to reach the divisor q^-{m_max}")
    reports = []
    for m in range(1, m_max + 1):
        combined, control, scale = _probe_residues(p, m, D, radius, nodes)
        halved, halved_control, _ = _probe_residues(p, m, D, radius / 2, nodes)
        relative_control = abs(control) / scale if scale else 0.0
        if relative_control < config.CONTROL_FACTOR * tol:
            raise ControlDegenerate(
                f"control residue {relative_control:.2e} at q^-{m} is below {config.CONTROL_FACTOR * tol:.1e}"
            )
        for component in (1, 2):
            report = PoleProbeReport(
                m=m,
                component=component,
                residue=float(abs(combined[component - 1])),
                control_residue=float(abs(control)),
                scale=scale,
                tolerance=tol,
                radius=radius,
                halved_residue=float(abs(halved[component - 1])),
                halved_control=float(abs(halved_control)),
            )
            logger.debug("probe m=%d F%d: relative residue %.2e", m, component, report.relative_residue)
            reports.append(report)
    return reports


def probe_records(
    reports: Sequence[PoleProbeReport], p: EnvelopeParams, suffix: Optional[str] = None
) -> List[CheckRecord]:
    digest = p.digest()
    tail = f"/{suffix}" if suffix else ""
    return [
        CheckRecord(
            check_id=f"tps/residue/m{report.m}/F{report.component}{tail}",
            params_digest=digest,
            residual=report.relative_residue,
            tolerance=report.tolerance,
            verdict=report.verdict,
            details=report.to_dict(),
        )
        for report in reports
    ]


def _progression(p: EnvelopeParams, index: int, j: int) -> EnvelopeParams:
    """Return p with a_index replaced by a_index / q^j."""
    return p.with_a(index, p.a[index - 1].shift_q(p.ctx, -j))


def a_limit_sequence(p: EnvelopeParams, d: int, steps: int) -> np.ndarray:
    """Return the normalized z^d coefficients at F1, F2 along a_1/a_2 -> a_1/a_2 * q^{-j}.

    Row factors and e(z_#) exponentials cancel against the prefactors, leaving the
    normalized subtraction matrix applied to phi_ratio * c_d; F1 is scaled by a_1/a_2.
    """
    rows = []
    for j in range(steps + 1):
        local = _progression(p, 1, j)
        core = normalized_subtraction_matrix(local)
        terms = [phi_ratio(k, local) * vertex_tpn(k, d, local).coeffs[d] for k in (1, 2)]
        ratio = (local.a[0] / local.a[1]).value
        rows.append((ratio * core[0, 0] * terms[0], core[1, 0] * terms[0] + core[1, 1] * terms[1]))
    return np.array(rows, dtype=complex)


def a_limit_prediction(p: EnvelopeParams, d: int) -> Tuple[complex, complex]:
    ctx = p.ctx
    hbar = p.hbar.value
    ratio = 1.0 + 0j
    for j in range(d):
        ratio *= (1.0 - ctx.q**j * hbar) / (1.0 - ctx.q ** (j + 1))
    first = cmath.exp(p.hbar.u / 2) * (ctx.q**2 / hbar) ** d * ratio
    second = -(ctx.q**d) * ratio
    return first, second


def a_limit_check(p: EnvelopeParams, orders: Sequence[int] = (0, 1), steps: int = 10) -> List[CheckRecord]:
    """Check that the normalized subtracted solution settles as a -> 0 along the chamber."""
    if p.n != 2:
        raise ValueError("the a-limit is checked on T*P^1 only")
    digest = p.digest()
    records = []
    for d in orders:
        sequence = a_limit_sequence(p, d, steps)
        predicted = a_limit_prediction(p, d)
        for component in (1, 2):
            last, previous = sequence[-1, component - 1], sequence[-2, component - 1]
            drift = abs(last - previous) / abs(last)
            records.append(CheckRecord.evaluate(f"alimit/drift/d{d}/F{component}", drift, config.LIMIT_TOL, digest))
            error = abs(last - predicted[component - 1]) / abs(predicted[component - 1])
            records.append(CheckRecord.evaluate(f"alimit/limit/d{d}/F{component}", error, config.LIMIT_TOL, digest))
            if d == 0:
                exponent = 2.0 * math.log(abs(last)) / p.hbar.u.real
                records.append(
                    CheckRecord.evaluate(
                        f"alimit/modulus/F{component}",
                        abs(exponent - round(exponent)),
                        config.LIMIT_TOL,
                        digest,
                        {"half_power": round(exponent)},
                    )
                )
    return records


def _growth_ratios(k: int, index: int, p: EnvelopeParams, steps: int) -> List[complex]:
    values = [vertex_prefactor(k, _progression(p, index, j)) for j in range(steps + 1)]
    return [b / a for a, b in zip(values, values[1:])]


def prefactor_growth(k: int, p: EnvelopeParams, steps: int = GROWTH_STEPS) -> Dict[str, complex]:
    """Return the last successive ratio along a_k -> a_k / q and the predicted z_#(q/hbar)^{n-1}."""
    ratios = _growth_ratios(k, k, p, steps)
    z_sharp = sharp_kahler(p).z_sharp
    predicted = z_sharp.value * (p.ctx.q / p.hbar.value) ** (p.n - 1)
    return {"observed": ratios[-1], "predicted": predicted}


def prefactor_growth_check(k: int, p: EnvelopeParams, steps: int = GROWTH_STEPS) -> CheckRecord:
    growth = prefactor_growth(k, p, steps)
    residual = abs(growth["observed"] - growth["predicted"]) / abs(growth["predicted"])
    return CheckRecord.evaluate(f"vertex/prefactor_growth/n{p.n}/F{k}", residual, GROWTH_TOL, p.digest())


def a_shift_exponents(p: EnvelopeParams, steps: int = 8) -> Dict[str, List[complex]]:
    """Return the multipliers of the prefactors under a_1 -> a_1 / q deep in the chamber."""
    observed = [_growth_ratios(k, 1, p, steps)[-1] for k in range(1, p.n + 1)]
    z_sharp = sharp_kahler(p).z_sharp
    predicted = [z_sharp.value * (p.ctx.q / p.hbar.value) ** (p.n - 1)] + [1.0 + 0j] * (p.n - 1)
    return {"observed": observed, "predicted": predicted}


def exponent_check(p: EnvelopeParams, steps: int = 8) -> CheckRecord:
    """Recover the shift multipliers as eigenvalues of M0 of the constant system they define."""
    data = a_shift_exponents(p, steps)
    system = QDiffSystem([np.diag(data["observed"])], p.ctx.q)
    solution = qdiff_series_solve(system, 0)
    recovered = np.linalg.eigvals(linalg.expm(solution.exponent * p.ctx.log_q))
    expected = np.array(data["predicted"])
    residual = 0.0
    for value in expected:
        residual = max(residual, float(np.min(np.abs(recovered - value))) / abs(value))
    return CheckRecord.evaluate(f"vertex/exponents/n{p.n}", residual, EXPONENT_TOL, p.digest())


def qdiff_series_solve(system: QDiffSystem, D: int) -> QDiffSolution:
    """Solve f(qx) = M(x) f(x) as H(x) exp(ln M0 ln x / ln q) with H a matrix series to order D."""
    M0 = system.M0
    q = complex(system.q)
    size = system.size
    if abs(np.linalg.det(M0)) < config.DENOMINATOR_FLOOR:
        raise Resonant("M0 is singular")
    eigenvalues = np.linalg.eigvals(M0)
    for d in range(1, D + 1):
        for mu_i in eigenvalues:
            for mu_j in eigenvalues:
                if abs(mu_i - q**d * mu_j) <= QDIFF_RESONANCE_TOL * max(abs(mu_i), abs(mu_j)):
                    raise Resonant(f"eigenvalue ratio {mu_i / mu_j:.6g} equals q^{d}")
    series = [np.eye(size, dtype=complex)]
    for d in range(1, D + 1):
        rhs = np.zeros((size, size), dtype=complex)
        for j in range(1, min(d, len(system.coefficients) - 1) + 1):
            rhs -= system.coefficients[j] @ series[d - j]
        series.append(linalg.solve_sylvester(M0, -(q**d) * M0, rhs))
    exponent = linalg.logm(M0) / cmath.log(q)
    return QDiffSolution(series=series, exponent=np.asarray(exponent, dtype=complex), q=q)


def qdiff_residual(system: QDiffSystem, solution: QDiffSolution, x: complex) -> float:
    log_x = cmath.log(x)
    shifted = solution.evaluate(system.q * x, log_x + cmath.log(system.q))
    expected = system.evaluate(x) @ solution.evaluate(x, log_x)
    return float(np.max(np.abs(shifted - expected)) / max(np.max(np.abs(expected)), 1e-300))


def series_contour_agreement(k: int, p: EnvelopeParams, D: int = config.DEFAULT_VERTEX_ORDER) -> CheckRecord:
    series = vertex_value(k, D, p)
    contour = vertex_contour(k, p)
    residual = abs(series - contour) / abs(series)
    return CheckRecord.evaluate(f"vertex/contour/n{p.n}/F{k}", residual, AGREEMENT_TOL, p.digest())


def subtracted_contour_agreement(k: int, p: EnvelopeParams, D: int = config.DEFAULT_VERTEX_ORDER) -> CheckRecord:
    """The pole-subtracted integral reproduces row k of the subtracted series."""
    integral = _row_factor(k, p, sharp_kahler(p).z_sharp) * vertex_contour(k, p, representation="subtracted")
    expected = subtracted_vertex(p, D)[k - 1]
    residual = abs(integral - expected) / abs(expected)
    return CheckRecord.evaluate(f"vertex/subtracted/n{p.n}/F{k}", residual, AGREEMENT_TOL, p.digest())


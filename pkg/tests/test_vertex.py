from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ellstab import config
from ellstab.errors import ContourPinched, Resonant, ResonantDenominator
from ellstab.models import EnvelopeParams, MultPoint, PoleProbeReport, QContext, QDiffSystem
from ellstab.services import suite, vertex
from ellstab.services.qspecial import bilinear_exp
from ellstab.services.draws import draw_generic


def test_series_starts_at_one_and_obeys_the_recursion(vertex2: EnvelopeParams) -> None:
    series = vertex.vertex_tpn(1, 6, vertex2)
    assert series.order == 6
    assert series.coeffs[0] == 1
    q, hbar = vertex2.ctx.q, vertex2.hbar.value
    x = vertex2.a[1].value / vertex2.a[0].value
    step = (-q * cmath.exp(-vertex2.hbar.u / 2)) ** 2
    # d = 1: the i = k factor is (1 - hbar) / (1 - q).
    expected = step * (1 - hbar) / (1 - q) * (1 - hbar * x) / (1 - q * x)
    assert series.coeffs[1] == pytest.approx(expected, rel=1e-13)


def test_series_rejects_bad_arguments(vertex2: EnvelopeParams) -> None:
    with pytest.raises(ValueError):
        vertex.vertex_tpn(3, 4, vertex2)
    with pytest.raises(ValueError):
        vertex.vertex_tpn(1, -1, vertex2)


def test_resonant_denominator_names_the_pair() -> None:
    ctx = QContext(0.3)
    p = EnvelopeParams.create((0.2 + 0.1j, 0.2 + 0.1j - 2 * ctx.log_q), -0.6 + 0.4j, -1.5 + 0.5j, ctx, strict=False)
    with pytest.raises(ResonantDenominator) as info:
        vertex.vertex_tpn(1, 5, p)
    assert info.value.pair == (2, 1)
    assert info.value.order == 2


@pytest.mark.parametrize("k", [1, 2])
def test_series_matches_contour_n2(vertex2: EnvelopeParams, k: int) -> None:
    record = vertex.series_contour_agreement(k, vertex2)
    assert record.passed, record.residual


@pytest.mark.parametrize("k", [1, 2, 3])
def test_series_matches_contour_n3(vertex3: EnvelopeParams, k: int) -> None:
    record = vertex.series_contour_agreement(k, vertex3)
    assert record.passed, record.residual


def test_contour_rejects_bad_arguments(vertex2: EnvelopeParams) -> None:
    with pytest.raises(ValueError):
        vertex.vertex_contour(1, vertex2, quad_points=2)
    with pytest.raises(ValueError):
        vertex.vertex_contour(1, vertex2, representation="other")


@pytest.mark.parametrize("k", [1, 2])
def test_subtracted_integral_matches_series(vertex2: EnvelopeParams, k: int) -> None:
    record = vertex.subtracted_contour_agreement(k, vertex2)
    assert record.passed, record.residual


def test_sharp_kahler_carries_sign_in_logarithm(vertex3: EnvelopeParams) -> None:
    sharp = vertex.sharp_kahler(vertex3)
    assert sharp.sign_power == 3
    expected = -cmath.exp(1.5 * vertex3.hbar.u) * vertex3.z.value
    assert sharp.z_sharp.value == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("fixture", ["vertex2", "vertex3"])
def test_sharp_envelope_inverts_the_conjugated_envelope(fixture: str, request: pytest.FixtureRequest) -> None:
    p: EnvelopeParams = request.getfixturevalue(fixture)
    assert vertex.sharp_inverse_check(p).passed


def test_exponents_from_prefactor_growth(vertex2: EnvelopeParams) -> None:
    record = vertex.exponent_check(vertex2)
    assert record.passed, record.residual


def test_pole_subtraction_matrix_is_lower_triangular(probe_params: EnvelopeParams) -> None:
    assert vertex.triangularity_residual(probe_params) < vertex.TRIANGULAR_TOL


def test_pole_subtraction_matrix_is_periodic(probe_params: EnvelopeParams) -> None:
    residuals = vertex.periodicity_residuals(probe_params)
    assert residuals["z"] < vertex.PERIODICITY_TOL
    assert residuals["a"] < vertex.PERIODICITY_TOL


def test_subtracted_solution_has_no_poles(probe_params: EnvelopeParams) -> None:
    reports = vertex.pole_cancellation_check(probe_params, m_max=2)
    assert [(r.m, r.component) for r in reports] == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert all(r.verdict == "pass" for r in reports), [r.to_dict() for r in reports]
    assert all(r.stability < config.PROBE_STABILITY for r in reports)
    records = vertex.probe_records(reports, probe_params)
    assert records[0].check_id == "tps/residue/m1/F1"


def test_pole_probe_guards(vertex3: EnvelopeParams, probe_params: EnvelopeParams) -> None:
    with pytest.raises(ValueError):
        vertex.pole_cancellation_check(vertex3)
    with pytest.raises(ValueError):
        vertex.pole_cancellation_check(probe_params, D=3, m_max=3)


def test_a_limit_settles_on_prediction() -> None:
    records = vertex.a_limit_check(suite.preset("a_limit"))
    assert all(r.passed for r in records), [(r.check_id, r.residual) for r in records if not r.passed]


@pytest.mark.parametrize("fixture", ["vertex2", "vertex3"])
def test_prefactor_grows_by_sharp_kahler_step(fixture: str, request: pytest.FixtureRequest) -> None:
    p: EnvelopeParams = request.getfixturevalue(fixture)
    for k in range(1, p.n + 1):
        growth = vertex.prefactor_growth(k, p)
        assert growth["observed"] == pytest.approx(growth["predicted"], rel=vertex.GROWTH_TOL)
        record = vertex.prefactor_growth_check(k, p)
        assert record.check_id == f"vertex/prefactor_growth/n{p.n}/F{k}"
        assert record.passed, record.residual


def _report(halved_control: float) -> PoleProbeReport:
    return PoleProbeReport(
        m=1,
        component=1,
        residue=1e-12,
        control_residue=1.0,
        scale=1.0,
        tolerance=1e-7,
        radius=0.01,
        halved_residue=1e-12,
        halved_control=halved_control,
    )


def test_unstable_control_residue_fails_the_verdict() -> None:
    steady = _report(1.0)
    assert steady.stability == 0.0
    assert steady.verdict == "pass"
    drifting = _report(1.5)
    assert drifting.stability == pytest.approx(0.5)
    assert drifting.verdict == "fail"
    assert drifting.to_dict()["stability"] == pytest.approx(0.5)


@pytest.mark.parametrize("index, offset", list(enumerate(suite.TPS_Z_OFFSETS, start=1)))
def test_poles_cancel_at_other_kahler_values(probe_params: EnvelopeParams, index: int, offset: complex) -> None:
    local = probe_params.with_z(MultPoint(probe_params.z.u + offset))
    reports = vertex.pole_cancellation_check(local, m_max=2)
    assert all(r.verdict == "pass" for r in reports), [r.to_dict() for r in reports]
    records = vertex.probe_records(reports, local, f"z{index}")
    assert records[0].check_id == f"tps/residue/m1/F1/z{index}"
    assert all(r.passed for r in records)


def test_subtraction_matrix_factors_through_normalized_core(vertex3: EnvelopeParams) -> None:
    matrix = vertex.pole_subtraction_matrix(vertex3)
    core = vertex.normalized_subtraction_matrix(vertex3)
    z_sharp = vertex.sharp_kahler(vertex3).z_sharp
    columns = np.array([bilinear_exp(z_sharp, point, vertex3.ctx) for point in vertex3.a])
    for k in range(3):
        factors = [matrix[k, i] / (core[k, i] * columns[i]) for i in range(k + 1)]
        assert_allclose(factors, [factors[0]] * len(factors), rtol=1e-10)
    assert np.all(np.triu(core, 1) == 0)


def test_a_limit_sequence_is_the_normalized_subtracted_coefficient() -> None:
    p = suite.preset("a_limit")
    d = 1
    (row,) = vertex.a_limit_sequence(p, d, 0)
    matrix = vertex.pole_subtraction_matrix(p)
    core = vertex.normalized_subtraction_matrix(p)
    z_sharp = vertex.sharp_kahler(p).z_sharp
    coefficients = np.array([vertex.vertex_prefactor(k, p) * vertex.vertex_tpn(k, d, p).coeffs[d] for k in (1, 2)])
    subtracted = matrix @ coefficients
    # Row factors, read off the first column.
    rows = [matrix[k, 0] / (core[k, 0] * bilinear_exp(z_sharp, p.a[0], p.ctx)) for k in (0, 1)]
    ratio = (p.a[0] / p.a[1]).value
    assert row[0] == pytest.approx(ratio * subtracted[0] / rows[0], rel=1e-10)
    assert row[1] == pytest.approx(subtracted[1] / rows[1], rel=1e-10)


def test_pinched_configuration_is_refused() -> None:
    p = draw_generic(11, {"n": 2, "q": 0.3, "hbar_inside": True, "ordered": True, "pinch": True})
    gap = p.a[0].u - p.a[1].u - p.hbar.u - p.ctx.log_q
    assert abs(gap) < 1e-12
    with pytest.raises(ContourPinched):
        vertex.vertex_contour(1, p, representation="subtracted")


def _system() -> QDiffSystem:
    return QDiffSystem(
        [
            np.array([[0.7, 0.2], [0.1, 1.3]], dtype=complex),
            np.array([[0.3, -0.5j], [0.25, 0.1]], dtype=complex),
        ],
        0.3,
    )


def test_qdiff_solution_satisfies_the_equation() -> None:
    system = _system()
    solution = vertex.qdiff_series_solve(system, 24)
    assert solution.order == 24
    assert np.allclose(solution.series[0], np.eye(2))
    for x in (0.05, 0.04j, -0.03 + 0.02j):
        assert vertex.qdiff_residual(system, solution, x) < 1e-10


def test_qdiff_constant_system_has_trivial_series() -> None:
    system = QDiffSystem([np.diag([0.5, 2.0])], 0.3)
    solution = vertex.qdiff_series_solve(system, 3)
    assert all(np.allclose(term, 0) for term in solution.series[1:])
    assert_allclose(np.diag(solution.exponent), [math.log(0.5) / math.log(0.3), math.log(2.0) / math.log(0.3)])


def test_qdiff_resonant_eigenvalues() -> None:
    system = QDiffSystem([np.diag([0.09, 1.0]), np.eye(2)], 0.3)
    with pytest.raises(Resonant):
        vertex.qdiff_series_solve(system, 4)


def test_qdiff_singular_leading_term() -> None:
    with pytest.raises(Resonant):
        vertex.qdiff_series_solve(QDiffSystem([np.zeros((2, 2))], 0.3), 2)

from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ellstab.errors import ParameterResonant
from ellstab.models import Chamber, EnvelopeParams, MultPoint, QContext
from ellstab.services import envelopes


def test_strict_triangularity_is_exact(params3: EnvelopeParams) -> None:
    matrix = envelopes.restriction_matrix_tpn(params3).entries
    assert matrix[0, 1] == 0j
    assert matrix[0, 2] == 0j
    assert matrix[1, 2] == 0j
    assert np.all(np.diag(matrix) != 0)


def test_matrix_basis_follows_chamber(params3: EnvelopeParams) -> None:
    chamber = Chamber((2, 3, 1))
    matrix = envelopes.restriction_matrix_tpn(params3, chamber)
    assert matrix.basis == ["F2", "F3", "F1"]
    assert np.allclose(np.triu(matrix.entries, 1), 0)
    opposite = envelopes.restriction_matrix_tpn(params3, chamber.opposite())
    assert opposite.basis == ["F1", "F3", "F2"]


@pytest.mark.parametrize("fixture", ["params2", "params3", "params4"])
def test_characterization_holds_for_the_envelope(fixture: str, request: pytest.FixtureRequest) -> None:
    p: EnvelopeParams = request.getfixturevalue(fixture)
    residuals = envelopes.characterization_residuals(envelopes.label_matrix, p)
    assert residuals["support"] == 0.0
    assert residuals["diagonal"] < 1e-12
    assert residuals["z_law"] < 1e-12
    assert residuals["a_law"] < 1e-12


def test_characterization_holds_in_a_permuted_chamber(params4: EnvelopeParams) -> None:
    chamber = Chamber((3, 1, 4, 2))
    residuals = envelopes.characterization_residuals(lambda p: envelopes.label_matrix(p, chamber), params4, chamber)
    assert max(residuals.values()) < 1e-12


def test_kicked_matrix_breaks_the_laws(params3: EnvelopeParams) -> None:
    def kicked(p: EnvelopeParams) -> np.ndarray:
        matrix = envelopes.label_matrix(p)
        matrix[2, 0] += 1e-3 * np.max(np.abs(matrix))
        return matrix

    residuals = envelopes.characterization_residuals(kicked, params3)
    assert max(residuals["z_law"], residuals["a_law"]) > 1e-6


def test_quasiperiodicity_laws(params4: EnvelopeParams) -> None:
    residuals = envelopes.quasiperiodicity_residuals(params4)
    assert residuals["z_law"] < 1e-12
    assert residuals["a_law"] < 1e-12


def test_z_factor_is_ratio_of_equivariant_parameters(params2: EnvelopeParams) -> None:
    expected = np.exp(params2.a[0].u - params2.a[1].u)
    assert envelopes.z_quasiperiodicity_factor(1, 2, params2) == pytest.approx(expected)
    assert envelopes.z_quasiperiodicity_factor(2, 2, params2) == 1


@pytest.mark.parametrize("fixture", ["params2", "params3", "params4"])
def test_duality_pairing_is_signed_identity(fixture: str, request: pytest.FixtureRequest) -> None:
    p: EnvelopeParams = request.getfixturevalue(fixture)
    record = envelopes.duality_check(p)
    assert record.passed, record.residual


def test_hypertoric_data_reproduces_tpn(params4: EnvelopeParams) -> None:
    data = envelopes.tpn_hypertoric(4, params4.z)
    observed = envelopes.restriction_matrix_hypertoric(data, params4).entries
    expected = envelopes.label_matrix(params4)
    assert_allclose(observed, expected, rtol=1e-12, atol=1e-12 * np.max(np.abs(expected)))


def test_product_hypertoric_is_kronecker_product(params4: EnvelopeParams) -> None:
    second_z = MultPoint(params4.z.u + 0.4 - 0.2j)
    data = envelopes.product_hypertoric(
        envelopes.tpn_hypertoric(2, params4.z), envelopes.tpn_hypertoric(2, second_z)
    )
    observed = envelopes.restriction_matrix_hypertoric(data, params4).entries
    left = envelopes.label_matrix(params4.restrict([1, 2]))
    right = envelopes.label_matrix(params4.restrict([3, 4]).with_z(second_z))
    expected = np.kron(left, right)
    assert [F.label for F in data.fixed_points][:2] == ["F1xF1", "F1xF2"]
    assert_allclose(observed, expected, rtol=1e-11, atol=1e-12 * np.max(np.abs(expected)))


def test_hypertoric_rejects_wrong_parameter_count(params3: EnvelopeParams) -> None:
    data = envelopes.tpn_hypertoric(4, params3.z)
    with pytest.raises(ValueError):
        envelopes.restriction_matrix_hypertoric(data, params3)


@pytest.mark.parametrize("inner", [(1,), (1, 2), (2, 3)])
def test_triangle_factorization(params3: EnvelopeParams, inner: tuple) -> None:
    records = envelopes.triangle_factorization_check(params3, inner)
    assert [r.check_id.rsplit("/", 1)[-1] for r in records] == ["support", "diagonal", "z_law"]
    assert all(r.passed for r in records), [r.residual for r in records]


def test_triangle_rejects_non_contiguous_block(params3: EnvelopeParams) -> None:
    with pytest.raises(ValueError):
        envelopes.triangle_composite(params3, (1, 3))


def test_fixed_point_index_is_validated() -> None:
    with pytest.raises(ValueError):
        envelopes.stab_tpn_product(4, 3)


def test_resonant_parameters_are_rejected() -> None:
    ctx = QContext(0.3)
    with pytest.raises(ParameterResonant) as info:
        EnvelopeParams.create((0.5 + 0.1j, 0.5 + 0.1j), 0.3 + 0.2j, -1.0 + 0.5j, ctx)
    assert info.value.divisor == "a1/a2"


def test_stab_vanishes_at_fixed_points_below(params3: EnvelopeParams) -> None:
    # Stab(F_2) restricted to F_1, which lies above F_2 in the standard chamber.
    value = envelopes.stab_tpn(2, params3.a[0].inverse(), params3)
    assert value == 0j


def test_hypertoric_envelope_agrees_with_projective_envelope(params3: EnvelopeParams) -> None:
    data = envelopes.tpn_hypertoric(3, params3.z)
    rng = np.random.default_rng(5)
    for _ in range(4):
        s = MultPoint(complex(rng.uniform(-1, 1), rng.uniform(-np.pi, np.pi)))
        for k, F in enumerate(data.fixed_points, start=1):
            value = envelopes.stab_hypertoric(F, [s], data, params3)
            assert value == pytest.approx(envelopes.stab_tpn(k, s, params3), rel=1e-10)


def test_fixed_point_coordinates_give_the_restriction_matrix(params3: EnvelopeParams) -> None:
    data = envelopes.tpn_hypertoric(3, params3.z)
    for j, G in enumerate(data.fixed_points, start=1):
        (s,) = envelopes.fixed_point_s(G, data, params3)
        assert s.u == pytest.approx(-params3.a[j - 1].u)
    matrix = envelopes.restriction_matrix_hypertoric(data, params3).entries
    at_points = np.array(
        [
            [envelopes.stab_hypertoric(F, envelopes.fixed_point_s(G, data, params3), data, params3) for F in data.fixed_points]
            for G in data.fixed_points
        ]
    )
    assert_allclose(at_points, matrix, rtol=1e-10, atol=1e-12)

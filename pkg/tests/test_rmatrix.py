from __future__ import annotations

import numpy as np
import pytest

from ellstab.errors import SingularStab
from ellstab.models import EnvelopeParams, MultPoint, RMatrix
from ellstab.services import rmatrix
from ellstab.services.qspecial import theta


def test_product_of_envelopes_matches_closed_form(params3: EnvelopeParams) -> None:
    assert rmatrix.product_form_check(params3).passed


def test_determinant(params3: EnvelopeParams) -> None:
    record = rmatrix.determinant_check(params3, "d00")
    assert record.check_id == "rmatrix/determinant/d00"
    assert record.passed


def test_felder_gauge_gives_closed_form(params3: EnvelopeParams) -> None:
    assert rmatrix.gauge_check(params3).passed


def test_gauge_ratio_is_diagonal_only(params3: EnvelopeParams) -> None:
    ratio = rmatrix.gauge_ratio(params3)
    assert ratio[0, 1] == pytest.approx(-1.0)
    assert ratio[1, 0] == pytest.approx(-1.0)


@pytest.mark.parametrize("builder", [rmatrix.r_closed_form, rmatrix.r_felder, rmatrix.r_from_stab])
def test_unitarity(params3: EnvelopeParams, builder) -> None:
    record = rmatrix.check_unitarity(builder(params3), params3)
    assert record.passed, record.residual


@pytest.mark.parametrize("builder", [rmatrix.r_closed_form, rmatrix.r_felder])
def test_dynamical_yang_baxter(params3: EnvelopeParams, builder) -> None:
    record = rmatrix.check_dyb(builder(params3), params3)
    assert record.passed, record.residual


def test_arbitrary_gauge_preserves_identities(params3: EnvelopeParams) -> None:
    gauged = rmatrix.gauge_transform(
        rmatrix.r_closed_form(params3),
        lambda z: theta(MultPoint(z.u + 0.3 + 0.1j), params3.ctx) / theta(z, params3.ctx),
        name="gauged",
    )
    assert rmatrix.check_unitarity(gauged, params3).passed
    assert rmatrix.check_dyb(gauged, params3).passed


def test_broken_matrix_fails_unitarity(params3: EnvelopeParams) -> None:
    closed = rmatrix.r_closed_form(params3)

    def evaluate(u: MultPoint, z: MultPoint) -> np.ndarray:
        block = closed.block(u, z).copy()
        block[0, 1] *= 2.0
        return block

    broken = RMatrix(name="broken", hbar=params3.hbar, evaluate=evaluate)
    assert not rmatrix.check_unitarity(broken, params3).passed


def test_identity_operator_is_trivially_unitary(params3: EnvelopeParams) -> None:
    assert rmatrix.check_unitarity(rmatrix.r_identity(params3), params3).passed


def test_flip_is_an_involution() -> None:
    P = rmatrix.flip()
    assert np.array_equal(P @ P, np.eye(4))
    assert P[1, 2] == 1 and P[2, 1] == 1


def test_wall_chain_needs_three_parameters(params2: EnvelopeParams) -> None:
    with pytest.raises(ValueError):
        rmatrix.wall_chain(rmatrix.r_closed_form(params2), params2)


def test_closed_form_pole_at_u_equal_hbar(params3: EnvelopeParams) -> None:
    R = rmatrix.r_closed_form(params3)
    with pytest.raises(SingularStab):
        R.block(params3.hbar, params3.z)


def test_zero_wall_shift_returns_the_same_evaluator(params3: EnvelopeParams) -> None:
    R = rmatrix.r_closed_form(params3)
    assert rmatrix.wall_shift(R, 0) is R


@pytest.mark.parametrize("shift", [1, -2])
def test_wall_shift_is_undone_by_its_inverse(params3: EnvelopeParams, shift: int) -> None:
    R = rmatrix.r_closed_form(params3)
    restored = rmatrix.wall_shift(rmatrix.wall_shift(R, shift), -shift)
    u = MultPoint(0.31 - 0.45j)
    for z in (params3.z, MultPoint(params3.z.u + 0.6j)):
        np.testing.assert_allclose(restored.block(u, z), R.block(u, z), rtol=1e-12, atol=1e-14)
    moved = rmatrix.wall_shift(R, shift)
    z_moved = MultPoint(params3.z.u - shift * R.hbar.u)
    np.testing.assert_allclose(moved.block(u, params3.z), R.block(u, z_moved), rtol=1e-12, atol=1e-14)

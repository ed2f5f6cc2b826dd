from __future__ import annotations

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from ellstab.models import EnvelopeParams, GrassParams, KSubset, MultPoint, QContext
from ellstab.services import abelianization, envelopes


def test_dominance_basis_is_lexicographic() -> None:
    labels = [mu.label for mu in abelianization.dominance_basis(2, 4)]
    assert labels == ["{1,2}", "{1,3}", "{1,4}", "{2,3}", "{2,4}", "{3,4}"]


def test_ksubset_validation() -> None:
    with pytest.raises(ValueError):
        KSubset((2, 2))
    assert KSubset((2, 4)).dominates(KSubset((1, 3)))
    assert not KSubset((1, 4)).dominates(KSubset((2, 3)))


def test_grass_params_validation(params3: EnvelopeParams) -> None:
    with pytest.raises(ValueError):
        GrassParams(4, params3)
    with pytest.raises(ValueError):
        GrassParams(2, params3, rho="other")


@pytest.mark.parametrize("fixture", ["params3", "params4"])
def test_gr1n_reduces_to_projective_space(fixture: str, request: pytest.FixtureRequest) -> None:
    p: EnvelopeParams = request.getfixturevalue(fixture)
    observed = abelianization.restriction_matrix_grass(GrassParams(1, p)).entries
    expected = envelopes.restriction_matrix_tpn(p).entries
    assert_allclose(observed, expected, rtol=1e-12, atol=1e-12 * np.max(np.abs(expected)))


def test_gr24_defining_properties(params4: EnvelopeParams) -> None:
    residuals = abelianization.grass_checks(GrassParams(2, params4))
    assert residuals["support"] < 1e-10
    assert residuals["diagonal"] < 1e-9
    assert residuals["z_law"] < 1e-10


def test_gr24_basis_labels(params4: EnvelopeParams) -> None:
    matrix = abelianization.restriction_matrix_grass(GrassParams(2, params4))
    assert matrix.size == 6
    assert matrix.basis[0] == "{1,2}"
    assert matrix.params["k"] == 2


GR24 = GrassParams(
    2,
    EnvelopeParams.create(
        (0.8 + 0.3j, 0.1 - 1.2j, -0.4 + 0.5j, -0.9 - 0.2j), 0.3 + 0.7j, -0.7 - 0.9j, QContext(0.2, precision="double")
    ),
)
s_logs = st.builds(
    complex,
    st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
    st.floats(min_value=-3.1, max_value=3.1, allow_nan=False),
)


@given(first=s_logs, second=s_logs, index=st.integers(min_value=0, max_value=5))
@settings(max_examples=30, deadline=None)
def test_symmetrized_sum_is_symmetric(first: complex, second: complex, index: int) -> None:
    assume(GR24.params.ctx.lattice_distance(first - second) > 1e-2)
    assume(GR24.params.ctx.lattice_distance(first - second - GR24.params.hbar.u) > 1e-2)
    assume(GR24.params.ctx.lattice_distance(second - first - GR24.params.hbar.u) > 1e-2)
    mu = abelianization.dominance_basis(2, 4)[index]
    s = [MultPoint(first), MultPoint(second)]
    value = abelianization.stab_grass(mu, s, GR24)
    swapped = abelianization.stab_grass(mu, list(reversed(s)), GR24)
    assert abs(swapped - value) <= 1e-12 * max(abs(value), 1e-300)


def test_stab_grass_checks_arity(params4: EnvelopeParams) -> None:
    with pytest.raises(ValueError):
        abelianization.stab_grass(KSubset((1, 2)), [MultPoint(0.1j)], GrassParams(2, params4))


@pytest.mark.parametrize("mu", abelianization.dominance_basis(2, 4), ids=lambda mu: mu.label)
def test_diagonal_poles_cancel(params4: EnvelopeParams, mu: KSubset) -> None:
    record = abelianization.regularity_record(mu, (1, 2), GrassParams(2, params4))
    assert record.passed, record.details


def test_shifted_family_keeps_a_simple_pole(params4: EnvelopeParams) -> None:
    probe = abelianization.regularity_probe(KSubset((1, 3)), (1, 2), GrassParams(2, params4), "shifted")
    assert probe["growth"] == pytest.approx(2.0, abs=0.05)


def test_regularity_probe_rejects_bad_arguments(params4: EnvelopeParams) -> None:
    gp = GrassParams(2, params4)
    with pytest.raises(ValueError):
        abelianization.regularity_probe(KSubset((1, 2)), (1, 1), gp)
    with pytest.raises(ValueError):
        abelianization.regularity_probe(KSubset((1, 2)), (1, 2), gp, "sideways")


@pytest.mark.parametrize("fixture", ["params3", "params4"])
def test_f_weight_at_the_kahler_parameter_is_the_projective_envelope(
    fixture: str, request: pytest.FixtureRequest
) -> None:
    p: EnvelopeParams = request.getfixturevalue(fixture)
    gp = GrassParams(2, p)
    rng = np.random.default_rng(17)
    for _ in range(3):
        s = MultPoint(complex(rng.uniform(-1, 1), rng.uniform(-np.pi, np.pi)))
        for m in range(1, p.n + 1):
            value = abelianization.f_weight(m, s, p.z, gp)
            assert value == pytest.approx(envelopes.stab_tpn(m, s, p), rel=1e-10)


def test_f_weight_rejects_out_of_range_index(params3: EnvelopeParams) -> None:
    with pytest.raises(ValueError):
        abelianization.f_weight(4, MultPoint(0.2j), params3.z, GrassParams(2, params3))


def test_gr22_is_a_single_normalized_point(params2: EnvelopeParams) -> None:
    matrix = abelianization.restriction_matrix_grass(GrassParams(2, params2))
    assert matrix.entries.shape == (1, 1)
    assert matrix.entries[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert matrix.basis == ["{1,2}"]

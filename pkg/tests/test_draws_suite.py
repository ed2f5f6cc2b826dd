from __future__ import annotations

import json
import math

import numpy as np
import pytest

from ellstab.errors import ConfigInvalid, DrawExhausted, PartialFailure, Resonant
from ellstab.models import CheckRecord, DrawConstraints, EnvelopeParams, GrassParams, SuiteConfig
from ellstab.services import draws, suite


def test_draws_are_deterministic() -> None:
    first = draws.draw_generic(5, {"n": 3})
    second = draws.draw_generic(5, {"n": 3})
    assert first.to_dict() == second.to_dict()
    assert draws.draw_generic(6, {"n": 3}).to_dict() != first.to_dict()


def test_draw_many_spawns_independent_streams() -> None:
    batch = draws.draw_many(3, 4, {"n": 2})
    assert len(batch) == 4
    assert len({p.digest() for p in batch}) == 4
    assert [p.to_dict() for p in draws.draw_many(3, 4, {"n": 2})] == [p.to_dict() for p in batch]


def test_draws_respect_constraints() -> None:
    c = DrawConstraints(n=4, q=0.2, re_box=1.0, ordered=True, hbar_inside=True, z_max=0.5)
    p = draws.draw_generic(1, c)
    assert p.ctx.q == 0.2
    reals = [point.u.real for point in p.a]
    assert reals == sorted(reals, reverse=True)
    assert max(abs(r) for r in reals) <= 1.0
    assert p.hbar.u.real < 0
    assert p.z.u.real <= math.log(0.5)


def test_degenerate_box_exhausts_the_draw() -> None:
    with pytest.raises(DrawExhausted):
        draws.draw_generic(0, {"n": 2, "q": 0.3, "re_box": 0.0, "im_box": 0.0})


@pytest.mark.parametrize(
    "data",
    [{"n": 0}, {"q": 1.5}, {"q_range": (0.5, 0.1)}, {"re_box": -1.0}, {"n": 1, "pinch": True}, {"z_max": 0.0}],
)
def test_constraint_validation(data: dict) -> None:
    with pytest.raises(ConfigInvalid):
        DrawConstraints.from_dict(data)


def test_suite_config_rejects_unknown_suite() -> None:
    with pytest.raises(ConfigInvalid):
        SuiteConfig(suites=["theta", "bogus"])


def test_run_producers_turns_errors_into_failing_records() -> None:
    def broken() -> list:
        raise Resonant("eigenvalue ratio equals q")

    records = suite.run_producers("vertex", [lambda: [CheckRecord.evaluate("ok", 0.0, 1.0)], broken], timings=True)
    assert [r.check_id for r in records] == ["ok", "vertex/error/001"]
    assert records[1].residual == math.inf
    assert not records[1].passed
    assert "Resonant" in records[1].details["error"]
    assert all(r.runtime_ms is not None for r in records)


def test_theta_suite_passes_and_is_reproducible() -> None:
    records = suite.run_producers("theta", suite.theta_suite(7))
    assert len(records) == 4 * suite.THETA_SAMPLES
    assert all(r.passed for r in records), [r.check_id for r in records if not r.passed][:5]
    again = suite.run_producers("theta", suite.theta_suite(7))
    assert [r.residual for r in again] == [r.residual for r in records]


def test_pinch_record_confirms_refusal() -> None:
    record = suite.pinch_record(7)
    assert record.check_id == "tps/pinch"
    assert record.passed


def test_qdiff_records_pass() -> None:
    assert all(r.passed for r in suite.qdiff_records())


def test_run_suite_writes_report(tmp_path) -> None:
    out = tmp_path / "reports" / "theta.json"
    report = suite.run_suite(SuiteConfig(seed=3, suites=["theta"], output=str(out)))
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["schema_version"] == 1
    assert data["seed"] == 3
    assert data["summary"] == {"total": len(report.checks), "failed": 0}
    ids = [check["check_id"] for check in data["checks"]]
    assert ids == sorted(ids)


def test_run_suite_raises_partial_failure(tmp_path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(suite, "theta_suite", lambda seed: [lambda: [CheckRecord.evaluate("theta/bad", 1.0, 0.1)]])
    out = tmp_path / "report.json"
    with pytest.raises(PartialFailure) as info:
        suite.run_suite(SuiteConfig(seed=1, suites=["theta"], output=str(out)))
    assert info.value.report_path == str(out)
    assert json.loads(out.read_text(encoding="utf-8"))["summary"]["failed"] == 1


def test_extra_params_file_adds_characterization(tmp_path, monkeypatch: pytest.MonkeyPatch) -> None:
    params = tmp_path / "params.json"
    document = {"q": 0.3, "a_log": [[0.7, 0.4], [-0.5, -0.9]], "hbar_half_log": [0.18, 0.3], "z_log": [-1.1, 0.8]}
    params.write_text(json.dumps(document), encoding="utf-8")
    monkeypatch.setattr(suite, "TRIANGLE_DRAWS", 0)
    extra = EnvelopeParams.from_dict(json.loads(params.read_text(encoding="utf-8")))
    producers = suite.envelope_suite(2, extra=extra)
    records = producers[-1]()
    assert any(r.check_id.startswith("envelope/char/file/") for r in records)


def test_vertex_suite_checks_a_seeded_draw() -> None:
    producers = suite.vertex_suite(7)
    # Drawn checks sit just before the closing q-difference record.
    records = suite.run_producers("vertex", producers[-8:-1])
    ids = [r.check_id for r in records]
    assert "vertex/prefactor_growth/n2/F1/drawn" in ids
    assert "vertex/prefactor_growth/n3/F3/drawn" in ids
    assert "vertex/stab_sharp/inverse/n3/drawn" in ids
    assert all(r.passed for r in records), [(r.check_id, r.residual) for r in records if not r.passed]
    again = suite.run_producers("vertex", suite.vertex_suite(7)[-8:-1])
    assert [r.params_digest for r in again] == [r.params_digest for r in records]


def test_hypertoric_records_cover_pointwise_and_fixed_point_values(params3: EnvelopeParams) -> None:
    records = suite.hypertoric_records(params3, np.random.default_rng(4))
    assert [r.check_id for r in records] == [
        "envelope/hypertoric/n3",
        "envelope/hypertoric/pointwise/n3",
        "envelope/hypertoric/fixed_points/n3",
    ]
    assert all(r.passed for r in records), [(r.check_id, r.residual) for r in records]


def test_grass_records_for_f_weight_and_point(params2: EnvelopeParams, params4: EnvelopeParams) -> None:
    (weight,) = suite.f_weight_records(GrassParams(2, params4), np.random.default_rng(4))
    assert weight.check_id == "grass/f_weight/n4"
    assert weight.passed, weight.residual
    (point,) = suite.grass_point_records(params2)
    assert point.check_id == "grass/gr22/point"
    assert point.passed

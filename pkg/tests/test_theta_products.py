from __future__ import annotations

import pytest

from ellstab.errors import DenominatorVanishes
from ellstab.models import QContext
from ellstab.services.theta_products import Monomial, ThetaProduct, gen, product_of

ENV = {"a1": 0.7 + 0.4j, "a2": -0.5 - 0.9j, "hbar": 0.35 + 0.6j, "z": -1.1 + 0.8j}


def _shifted(env: dict, name: str, steps: int, ctx: QContext) -> dict:
    moved = dict(env)
    moved[name] = env[name] + steps * ctx.log_q
    return moved


def test_monomial_arithmetic_cancels_to_unit() -> None:
    m = gen("a1") * gen("hbar", 2) / gen("a1")
    assert m == gen("hbar", 2)
    assert (m / m).is_unit
    assert (gen("a1") ** 3).exponent("a1") == 3
    assert gen("z").inverse() == gen("z", -1)


def test_monomial_log_and_substitute() -> None:
    m = gen("a1") / gen("a2") * gen("hbar")
    assert m.log(ENV) == pytest.approx(ENV["a1"] - ENV["a2"] + ENV["hbar"])
    substituted = m.substitute("hbar", gen("a2") ** 2)
    assert substituted == gen("a1") * gen("a2")


def test_numerator_unit_vanishes(ctx: QContext) -> None:
    product = product_of([gen("a1") / gen("a1"), gen("z")])
    assert product.vanishes
    assert product.evaluate(ENV, ctx) == 0j


def test_denominator_unit_raises(ctx: QContext) -> None:
    product = product_of([gen("z")], [Monomial()])
    with pytest.raises(DenominatorVanishes):
        product.evaluate(ENV, ctx)


def test_product_and_quotient_evaluate_consistently(ctx: QContext) -> None:
    first = product_of([gen("a1") / gen("a2")], [gen("hbar")])
    second = product_of([gen("z") * gen("hbar")]).scaled(2.0)
    assert (first * second).evaluate(ENV, ctx) == pytest.approx(
        first.evaluate(ENV, ctx) * second.evaluate(ENV, ctx), rel=1e-13
    )
    assert (first / second).evaluate(ENV, ctx) == pytest.approx(
        first.evaluate(ENV, ctx) / second.evaluate(ENV, ctx), rel=1e-13
    )


@pytest.mark.parametrize("name", ["a1", "a2", "hbar", "z"])
@pytest.mark.parametrize("steps", [1, -1, 2])
def test_automorphy_predicts_numeric_shift(ctx: QContext, name: str, steps: int) -> None:
    product = ThetaProduct(
        [gen("a1") / gen("a2") * gen("z"), gen("hbar"), gen("a2") * gen("z", -1) * gen("hbar", 2)],
        [gen("a1") / gen("a2")],
        constant=0.5,
    )
    factor = product.automorphy(name, steps).value(ENV, ctx)
    shifted = product.evaluate(_shifted(ENV, name, steps, ctx), ctx)
    assert shifted == pytest.approx(factor * product.evaluate(ENV, ctx), rel=1e-10)


def test_generators_lists_every_name() -> None:
    product = product_of([gen("a1") * gen("z")], [gen("hbar")])
    assert product.generators() == {"a1", "z", "hbar"}

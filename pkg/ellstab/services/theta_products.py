"""Symbolic products of theta functions of Laurent monomials.

Envelope formulas are built once as `ThetaProduct` objects over named generators
("a1".."an", "hbar", "z", "s", ...) and then evaluated at parameter points. The
same objects predict factors of automorphy, which is how the quasi-periodicity
checks obtain their expected monomials without re-deriving them by hand.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .. import config
from ..errors import DenominatorVanishes
from ..models import MultPoint, QContext
from .qspecial import theta


class Monomial:
    """A Laurent monomial prod_g g^{e_g} with integer exponents."""

    __slots__ = ("_exps",)

    def __init__(self, exps: Optional[Mapping[str, int]] = None) -> None:
        cleaned = {g: int(e) for g, e in (exps or {}).items() if e != 0}
        self._exps: Tuple[Tuple[str, int], ...] = tuple(sorted(cleaned.items()))

    @classmethod
    def gen(cls, name: str, exponent: int = 1) -> "Monomial":
        return cls({name: exponent})

    @property
    def exps(self) -> Dict[str, int]:
        return dict(self._exps)

    def exponent(self, name: str) -> int:
        return self.exps.get(name, 0)

    @property
    def is_unit(self) -> bool:
        return not self._exps

    def __mul__(self, other: "Monomial") -> "Monomial":
        merged = self.exps
        for g, e in other._exps:
            merged[g] = merged.get(g, 0) + e
        return Monomial(merged)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.inverse()

    def __pow__(self, power: int) -> "Monomial":
        return Monomial({g: e * power for g, e in self._exps})

    def inverse(self) -> "Monomial":
        return self ** -1

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Monomial) and self._exps == other._exps

    def __hash__(self) -> int:
        return hash(self._exps)

    def __repr__(self) -> str:
        if self.is_unit:
            return "1"
        return "*".join(g if e == 1 else f"{g}^{e}" for g, e in self._exps)

    def log(self, env: Mapping[str, complex]) -> complex:
        return sum((e * env[g] for g, e in self._exps), 0j)

    def point(self, env: Mapping[str, complex]) -> MultPoint:
        return MultPoint(self.log(env))

    def substitute(self, name: str, replacement: "Monomial") -> "Monomial":
        e = self.exponent(name)
        if e == 0:
            return self
        rest = self.exps
        del rest[name]
        return Monomial(rest) * replacement**e


def gen(name: str, exponent: int = 1) -> Monomial:
    return Monomial.gen(name, exponent)


@dataclass(frozen=True)
class Automorphy:
    """sign * q^{q_power} * monomial, the factor picked up under a q-shift."""

    sign: int
    q_power: Fraction
    monomial: Monomial

    def value(self, env: Mapping[str, complex], ctx: QContext) -> complex:
        return self.sign * cmath.exp(float(self.q_power) * ctx.log_q + self.monomial.log(env))


def _factor_automorphy(factor: Monomial, name: str, steps: int) -> Tuple[int, Fraction, Monomial]:
    # theta(q^m X) = (-1)^m q^{-m^2/2} X^{-m} theta(X) with m = steps * e.
    m = steps * factor.exponent(name)
    if m == 0:
        return 1, Fraction(0), Monomial()
    return (-1) ** (m % 2), Fraction(-m * m, 2), factor ** (-m)


@dataclass
class ThetaProduct:
    """constant * prod theta(numerator) / prod theta(denominator)."""

    numerator: List[Monomial] = field(default_factory=list)
    denominator: List[Monomial] = field(default_factory=list)
    constant: complex = 1.0

    def __mul__(self, other: "ThetaProduct") -> "ThetaProduct":
        return ThetaProduct(
            self.numerator + other.numerator,
            self.denominator + other.denominator,
            self.constant * other.constant,
        )

    def __truediv__(self, other: "ThetaProduct") -> "ThetaProduct":
        return ThetaProduct(
            self.numerator + other.denominator,
            self.denominator + other.numerator,
            self.constant / other.constant,
        )

    def scaled(self, factor: complex) -> "ThetaProduct":
        return ThetaProduct(list(self.numerator), list(self.denominator), self.constant * factor)

    def substitute(self, name: str, replacement: Monomial) -> "ThetaProduct":
        return ThetaProduct(
            [m.substitute(name, replacement) for m in self.numerator],
            [m.substitute(name, replacement) for m in self.denominator],
            self.constant,
        )

    @property
    def vanishes(self) -> bool:
        """True when a theta(1) factor sits in the numerator."""
        return any(m.is_unit for m in self.numerator)

    def evaluate(self, env: Mapping[str, complex], ctx: QContext) -> complex:
        if any(m.is_unit for m in self.denominator):
            raise DenominatorVanishes(f"theta(1) in denominator of {self!r}")
        if self.vanishes:
            return 0j
        value = complex(self.constant)
        for monomial in self.numerator:
            value *= theta(monomial.point(env), ctx)
        for monomial in self.denominator:
            d = theta(monomial.point(env), ctx)
            if abs(d) < config.DENOMINATOR_FLOOR:
                raise DenominatorVanishes(f"theta({monomial!r}) = {abs(d):.2e} in denominator")
            value /= d
        return value

    def automorphy(self, name: str, steps: int = 1) -> Automorphy:
        """Return the factor f with P(q^steps * name) = f * P."""
        sign, q_power, monomial = 1, Fraction(0), Monomial()
        for factor in self.numerator:
            s, p, m = _factor_automorphy(factor, name, steps)
            sign, q_power, monomial = sign * s, q_power + p, monomial * m
        for factor in self.denominator:
            s, p, m = _factor_automorphy(factor, name, steps)
            sign, q_power, monomial = sign * s, q_power - p, monomial / m
        return Automorphy(sign, q_power, monomial)

    def generators(self) -> set:
        names = set()
        for m in self.numerator + self.denominator:
            names.update(m.exps)
        return names

    def __repr__(self) -> str:
        num = " ".join(f"t({m!r})" for m in self.numerator) or "1"
        den = " ".join(f"t({m!r})" for m in self.denominator)
        return f"{self.constant}*{num}" + (f" / {den}" if den else "")


def product_of(factors: Iterable[Monomial], denominator: Sequence[Monomial] = ()) -> ThetaProduct:
    return ThetaProduct(list(factors), list(denominator))

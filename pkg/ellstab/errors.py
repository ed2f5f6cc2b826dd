"""Exception hierarchy shared by every service module."""
from __future__ import annotations

from typing import Any, Optional, Tuple


class EllStabError(RuntimeError):
    """Base class for all library errors."""


class TruncationInsufficient(EllStabError):
    pass


class DenominatorVanishes(EllStabError):
    pass


class ParameterResonant(EllStabError):
    """A parameter draw sits on a resonance divisor."""

    def __init__(self, divisor: str, distance: float) -> None:
        super().__init__(f"parameters resonant on divisor {divisor} (distance {distance:.3e})")
        self.divisor = divisor
        self.distance = distance


class SingularStab(EllStabError):
    pass


class ResonantDenominator(EllStabError):
    def __init__(self, pair: Tuple[int, int], order: int) -> None:
        super().__init__(f"Pochhammer denominator vanishes for pair {pair} at order {order}")
        self.pair = pair
        self.order = order


class ContourPinched(EllStabError):
    pass


class ControlDegenerate(EllStabError):
    pass


class Resonant(EllStabError):
    pass


class SlopeOnWall(EllStabError):
    pass


class FitUnderdetermined(EllStabError):
    pass


class ConfigInvalid(EllStabError):
    pass


class PartialFailure(EllStabError):
    """Some checks failed; the report has already been written."""

    def __init__(self, message: str, report_path: Optional[str] = None, report: Any = None) -> None:
        super().__init__(message)
        self.report_path = report_path
        self.report = report


class DrawExhausted(EllStabError):
    pass

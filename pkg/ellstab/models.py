"""Data models used across the envelope, R-matrix and vertex services."""
from __future__ import annotations

import cmath
import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from . import config
from .errors import ConfigInvalid, ParameterResonant


def complex_to_dict(value: complex) -> Dict[str, float]:
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def complex_from_dict(data: Any) -> complex:
    if isinstance(data, dict):
        return complex(float(data.get("re", 0.0)), float(data.get("im", 0.0)))
    if isinstance(data, (list, tuple)) and len(data) == 2:
        return complex(float(data[0]), float(data[1]))
    return complex(data)


def params_digest(data: Dict[str, Any]) -> str:
    """Return a short stable hash of a JSON-serializable parameter document."""
    encoded = json.dumps(data, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(encoded).hexdigest()[:16]


@dataclass(frozen=True)
class QContext:
    """The modulus q together with the truncation and tolerance policy."""

    q: complex
    trunc: Optional[int] = None
    tol: float = config.DEFAULT_TOL
    precision: str = field(default_factory=config.precision_mode)

    def __post_init__(self) -> None:
        q = complex(self.q)
        object.__setattr__(self, "q", q)
        if not 0.0 < abs(q) < 1.0:
            raise ValueError(f"|q| must lie in (0, 1), got {abs(q)}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.precision not in config.PRECISION_MODES:
            raise ConfigInvalid(f"Unknown precision mode {self.precision!r}")
        if self.trunc is not None:
            if self.trunc < 1:
                raise ValueError("trunc must be a positive integer")
            if abs(q) ** self.trunc >= self.tol / (1.0 - abs(q)):
                raise ValueError(
                    f"trunc={self.trunc} too small for |q|={abs(q):.3g} at tol={self.tol:.1e}"
                )

    @property
    def log_q(self) -> complex:
        return cmath.log(self.q)

    def tail_bound(self, terms: int, abs_x: float) -> float:
        """Return the relative tail bound of a product truncated after `terms` factors."""
        exponent = abs(self.q) ** (terms + 1) * abs_x / (1.0 - abs(self.q))
        return math.expm1(exponent) if exponent < 700 else math.inf

    def terms_for(self, abs_x: float) -> int:
        """Return the number of extra factors needed for |x| under the tail-bound policy."""
        if self.trunc is not None:
            return self.trunc
        abs_x = max(abs_x, config.RANGE_LOW)
        target = self.tol * (1.0 - abs(self.q)) / abs_x
        if target >= 1.0:
            return 1
        terms = math.ceil(math.log(target) / math.log(abs(self.q))) - 1
        return int(min(max(terms, 1), config.MAX_TERMS))

    def lattice_distance(self, u: complex) -> float:
        """Return the distance from u to the lattice Z ln q + 2 pi i Z."""
        log_q = self.log_q
        basis = np.array([[log_q.real, 0.0], [log_q.imag, 2.0 * math.pi]])
        alpha, beta = np.linalg.solve(basis, [u.real, u.imag])
        best = math.inf
        for dm, dl in itertools.product((-1, 0, 1), repeat=2):
            m = round(alpha) + dm
            l = round(beta) + dl
            best = min(best, abs(u - m * log_q - 2j * math.pi * l))
        return best

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "QContext":
        trunc = data.get("trunc")
        return cls(
            q=complex_from_dict(data.get("q", 0.1)),
            trunc=int(trunc) if trunc is not None else None,
            tol=float(data.get("tol", config.DEFAULT_TOL)),
            precision=str(data.get("precision") or config.precision_mode()),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": complex_to_dict(self.q),
            "trunc": self.trunc,
            "tol": self.tol,
            "precision": self.precision,
        }


@dataclass(frozen=True)
class MultPoint:
    """A point x = exp(u) of the multiplicative group, kept in log coordinates."""

    u: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", complex(self.u))

    @property
    def value(self) -> complex:
        return cmath.exp(self.u)

    @property
    def half(self) -> complex:
        return cmath.exp(self.u / 2)

    def inverse(self) -> "MultPoint":
        return MultPoint(-self.u)

    def power(self, exponent: Any) -> "MultPoint":
        return MultPoint(self.u * complex(exponent))

    def shift_q(self, ctx: QContext, m: int = 1) -> "MultPoint":
        return MultPoint(self.u + m * ctx.log_q)

    def __mul__(self, other: "MultPoint") -> "MultPoint":
        return MultPoint(self.u + other.u)

    def __truediv__(self, other: "MultPoint") -> "MultPoint":
        return MultPoint(self.u - other.u)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MultPoint":
        return cls(complex(float(data.get("u_re", 0.0)), float(data.get("u_im", 0.0))))

    def to_dict(self) -> Dict[str, float]:
        return {"u_re": self.u.real, "u_im": self.u.imag}


@dataclass(frozen=True)
class HalfWeight:
    """base ** exponent with a half-integer exponent."""

    base: MultPoint
    exponent: Fraction = Fraction(1, 2)

    def __post_init__(self) -> None:
        exponent = Fraction(self.exponent)
        if (2 * exponent).denominator != 1:
            raise ValueError(f"exponent {exponent} is not a half-integer")
        object.__setattr__(self, "exponent", exponent)


@dataclass(frozen=True)
class Chamber:
    """Ordering F_order[0] > F_order[1] > ...; sign -1 selects the opposite chamber."""

    order: Tuple[int, ...]
    sign: int = 1

    def __post_init__(self) -> None:
        order = tuple(int(i) for i in self.order)
        if sorted(order) != list(range(1, len(order) + 1)):
            raise ValueError(f"chamber order {order} is not a permutation of 1..{len(order)}")
        if self.sign not in (1, -1):
            raise ValueError("chamber sign must be +1 or -1")
        object.__setattr__(self, "order", order)

    @classmethod
    def standard(cls, n: int, sign: int = 1) -> "Chamber":
        return cls(tuple(range(1, n + 1)), sign)

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def effective_order(self) -> Tuple[int, ...]:
        return self.order if self.sign == 1 else tuple(reversed(self.order))

    def position(self, label: int) -> int:
        return self.effective_order.index(label) + 1

    def above(self, i: int, k: int) -> bool:
        return self.position(i) < self.position(k)

    def opposite(self) -> "Chamber":
        return Chamber(self.order, -self.sign)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Chamber":
        return cls(tuple(data.get("order", ())), int(data.get("sign", 1)))

    def to_dict(self) -> Dict[str, Any]:
        return {"order": list(self.order), "sign": self.sign}


@dataclass(frozen=True)
class EnvelopeParams:
    """Equivariant parameters a_i, hbar and the Kahler parameter z."""

    a: Tuple[MultPoint, ...]
    hbar_half: HalfWeight
    z: MultPoint
    ctx: QContext
    strict: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(self.a))
        if self.strict:
            self.check_generic()

    @classmethod
    def create(
        cls,
        a_log: Sequence[complex],
        hbar_log: complex,
        z_log: complex,
        ctx: QContext,
        strict: bool = True,
    ) -> "EnvelopeParams":
        return cls(
            a=tuple(MultPoint(u) for u in a_log),
            hbar_half=HalfWeight(MultPoint(hbar_log)),
            z=MultPoint(z_log),
            ctx=ctx,
            strict=strict,
        )

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def hbar(self) -> MultPoint:
        return self.hbar_half.base

    def env(self) -> Dict[str, complex]:
        """Return generator logs for the symbolic theta-product layer."""
        values = {f"a{i}": point.u for i, point in enumerate(self.a, start=1)}
        values["hbar"] = self.hbar.u
        values["z"] = self.z.u
        return values

    def divisors(self) -> List[Tuple[str, complex]]:
        found: List[Tuple[str, complex]] = []
        for i, j in itertools.combinations(range(self.n), 2):
            found.append((f"a{i + 1}/a{j + 1}", self.a[i].u - self.a[j].u))
        found.append(("hbar", self.hbar.u))
        for m in range(-self.n, self.n + 1):
            found.append((f"z*hbar^{m}", self.z.u + m * self.hbar.u))
        return found

    def check_generic(self) -> None:
        for label, u in self.divisors():
            distance = self.ctx.lattice_distance(u)
            if distance < config.RESONANCE_RADIUS:
                raise ParameterResonant(label, distance)

    def with_z(self, z: MultPoint) -> "EnvelopeParams":
        return replace(self, z=z, strict=False)

    def with_a(self, index: int, point: MultPoint) -> "EnvelopeParams":
        a = list(self.a)
        a[index - 1] = point
        return replace(self, a=tuple(a), strict=False)

    def with_a_all(self, a: Sequence[MultPoint]) -> "EnvelopeParams":
        return replace(self, a=tuple(a), strict=False)

    def restrict(self, labels: Sequence[int]) -> "EnvelopeParams":
        return replace(self, a=tuple(self.a[i - 1] for i in labels), strict=False)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EnvelopeParams":
        a_log = [complex_from_dict(u) for u in data.get("a_log", [])]
        if not a_log:
            raise ConfigInvalid("a_log must list at least one equivariant parameter")
        # hbar_half_log is the log of hbar^{1/2}.
        hbar_log = 2 * complex_from_dict(data.get("hbar_half_log", 0.25))
        return cls.create(
            a_log,
            hbar_log,
            complex_from_dict(data.get("z_log", -2.0)),
            QContext.from_dict(data),
            strict=bool(data.get("strict", True)),
        )

    def to_dict(self) -> Dict[str, Any]:
        data = self.ctx.to_dict()
        data.update(
            {
                "a_log": [complex_to_dict(point.u) for point in self.a],
                "hbar_half_log": complex_to_dict(self.hbar.u / 2),
                "z_log": complex_to_dict(self.z.u),
            }
        )
        return data

    def digest(self) -> str:
        return params_digest(self.to_dict())


@dataclass(frozen=True)
class KahlerFactor:
    """An M0 coordinate contributing theta(M_j z_i hbar^e) / theta(z_i hbar^e)."""

    coordinate: int
    kahler: int
    hbar_shift: int = 0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KahlerFactor":
        shift = data.get("shift") or {}
        return cls(
            coordinate=int(data["coordinate"]),
            kahler=int(data["kahler"]),
            hbar_shift=int(shift.get("hbar", data.get("hbar_shift", 0))),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"coordinate": self.coordinate, "kahler": self.kahler, "shift": {"hbar": self.hbar_shift}}


@dataclass(frozen=True)
class RepellingFactor:
    """An M1 coordinate; dual coordinates contribute theta(hbar M_j)."""

    coordinate: int
    dual: bool = False

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RepellingFactor":
        return cls(coordinate=int(data["coordinate"]), dual=bool(data.get("dual", False)))

    def to_dict(self) -> Dict[str, Any]:
        return {"coordinate": self.coordinate, "dual": self.dual}


@dataclass(frozen=True)
class HypertoricFixedPoint:
    label: str
    m0: Tuple[KahlerFactor, ...]
    m1: Tuple[RepellingFactor, ...]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "HypertoricFixedPoint":
        return cls(
            label=str(data.get("label", "")),
            m0=tuple(KahlerFactor.from_dict(item) for item in data.get("m0", [])),
            m1=tuple(RepellingFactor.from_dict(item) for item in data.get("m1", [])),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "m0": [item.to_dict() for item in self.m0],
            "m1": [item.to_dict() for item in self.m1],
        }


@dataclass(frozen=True)
class HypertoricData:
    """Characters W[i][j] of the torus S on the coordinates of M, plus fixed-point splittings."""

    weight_matrix: Tuple[Tuple[int, ...], ...]
    fixed_points: Tuple[HypertoricFixedPoint, ...]
    kahler: Tuple[MultPoint, ...]

    def __post_init__(self) -> None:
        matrix = tuple(tuple(int(x) for x in row) for row in self.weight_matrix)
        object.__setattr__(self, "weight_matrix", matrix)
        object.__setattr__(self, "fixed_points", tuple(self.fixed_points))
        object.__setattr__(self, "kahler", tuple(self.kahler))
        self.validate()

    @property
    def rank(self) -> int:
        return len(self.weight_matrix)

    @property
    def coordinates(self) -> int:
        return len(self.weight_matrix[0]) if self.weight_matrix else 0

    def validate(self) -> None:
        w = np.array(self.weight_matrix, dtype=float)
        rank, cols = w.shape
        if len(self.kahler) != rank:
            raise ConfigInvalid(f"expected {rank} Kahler parameters, got {len(self.kahler)}")
        for size in range(1, rank + 1):
            for rows in itertools.combinations(range(rank), size):
                for columns in itertools.combinations(range(cols), size):
                    minor = round(float(np.linalg.det(w[np.ix_(rows, columns)])))
                    if minor not in (-1, 0, 1):
                        raise ConfigInvalid(f"minor {rows}x{columns} equals {minor}, not unimodular")
        for point in self.fixed_points:
            if len(point.m0) != rank:
                raise ConfigInvalid(f"fixed point {point.label} has {len(point.m0)} M0 coordinates, expected {rank}")
            block = w[:, [factor.coordinate - 1 for factor in point.m0]]
            if abs(round(float(np.linalg.det(block)))) != 1:
                raise ConfigInvalid(f"M0 block of fixed point {point.label} is not invertible over Z")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "HypertoricData":
        return cls(
            weight_matrix=tuple(tuple(row) for row in data.get("weight_matrix", [])),
            fixed_points=tuple(HypertoricFixedPoint.from_dict(item) for item in data.get("fixed_points", [])),
            kahler=tuple(MultPoint(complex_from_dict(u)) for u in data.get("kahler_log", [])),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weight_matrix": [list(row) for row in self.weight_matrix],
            "fixed_points": [point.to_dict() for point in self.fixed_points],
            "kahler_log": [complex_to_dict(point.u) for point in self.kahler],
        }


@dataclass
class RestrictionMatrix:
    """Envelope restrictions M[row][column] = Stab(column)|_row, basis in chamber order."""

    entries: np.ndarray
    basis: List[str]
    params: Optional[Dict[str, Any]] = None

    @property
    def size(self) -> int:
        return len(self.basis)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "basis": list(self.basis),
            "entries": [[complex_to_dict(value) for value in row] for row in self.entries],
            "params": self.params,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RestrictionMatrix":
        entries = np.array(
            [[complex_from_dict(value) for value in row] for row in data.get("entries", [])],
            dtype=complex,
        )
        return cls(entries=entries, basis=list(data.get("basis", [])), params=data.get("params"))


@dataclass(frozen=True)
class KSubset:
    mu: Tuple[int, ...]

    def __post_init__(self) -> None:
        mu = tuple(int(i) for i in self.mu)
        if not mu or mu[0] < 1 or any(b <= a for a, b in zip(mu, mu[1:])):
            raise ValueError(f"{mu} is not a strictly increasing sequence of positive labels")
        object.__setattr__(self, "mu", mu)

    @property
    def k(self) -> int:
        return len(self.mu)

    @property
    def label(self) -> str:
        return "{" + ",".join(str(i) for i in self.mu) + "}"

    def dominates(self, other: "KSubset") -> bool:
        return all(a >= b for a, b in zip(self.mu, other.mu))


@dataclass(frozen=True)
class GrassParams:
    """Parameters for T*Gr(k, n) with the convention flags of the abelianized formula."""

    k: int
    params: EnvelopeParams
    rho: str = "gl_k"
    trailing: str = "m"

    def __post_init__(self) -> None:
        if not 1 <= self.k <= self.params.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.params.n}")
        if self.rho not in ("gl_k", "gl_n"):
            raise ValueError(f"unknown rho convention {self.rho!r}")
        if self.trailing not in ("m", "k"):
            raise ValueError(f"unknown trailing convention {self.trailing!r}")

    @property
    def n(self) -> int:
        return self.params.n

    def two_rho(self, i: int) -> int:
        if self.rho == "gl_k":
            return self.k + 1 - 2 * i
        return self.n + 1 - 2 * i

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GrassParams":
        return cls(
            k=int(data.get("k", 1)),
            params=EnvelopeParams.from_dict(data),
            rho=str(data.get("rho", "gl_k")),
            trailing=str(data.get("trailing", "m")),
        )

    def to_dict(self) -> Dict[str, Any]:
        data = self.params.to_dict()
        data.update({"k": self.k, "rho": self.rho, "trailing": self.trailing})
        return data


@dataclass(frozen=True)
class DynWeight:
    """Weights mu of the basis vectors (e+, e-) of the defining representation."""

    mu: Tuple[int, ...] = (1, -1)


@dataclass
class RMatrix:
    """A 2x2 weight-zero block evaluator R(u, z) acting on (e-e+, e+e-)."""

    name: str
    hbar: MultPoint
    evaluate: Callable[[MultPoint, MultPoint], np.ndarray] = field(repr=False)
    framing: Tuple[str, str] = ("F1", "F2")
    weights: DynWeight = field(default_factory=DynWeight)

    def block(self, u: MultPoint, z: MultPoint) -> np.ndarray:
        return np.asarray(self.evaluate(u, z), dtype=complex)

    def full(self, u: MultPoint, z: MultPoint) -> np.ndarray:
        """Return the 4x4 operator on V (x) V, basis index 2*s1 + s2 with e+ = 0, e- = 1."""
        block = self.block(u, z)
        matrix = np.zeros((4, 4), dtype=complex)
        matrix[0, 0] = 1.0
        matrix[3, 3] = 1.0
        matrix[2, 2] = block[0, 0]
        matrix[2, 1] = block[0, 1]
        matrix[1, 2] = block[1, 0]
        matrix[1, 1] = block[1, 1]
        return matrix


@dataclass
class VertexSeries:
    """Truncated z-series of the vertex function restricted to F_k."""

    fixed_point: int
    coeffs: List[complex]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, z: complex) -> complex:
        return complex(np.polyval(np.array(self.coeffs[::-1], dtype=complex), z))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fixed_point": self.fixed_point,
            "order": self.order,
            "coeffs": [complex_to_dict(value) for value in self.coeffs],
        }


@dataclass(frozen=True)
class SharpKahler:
    """z_# = (-1)^sign_power * hbar^(hbar_half_power / 2) * z."""

    z_sharp: MultPoint
    sign_power: int
    hbar_half_power: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "z_sharp": self.z_sharp.to_dict(),
            "sign_power": self.sign_power,
            "hbar_half_power": self.hbar_half_power,
        }


@dataclass
class QDiffSystem:
    """f(qx) = M(x) f(x) with M(x) = sum_j coefficients[j] x^j."""

    coefficients: List[np.ndarray]
    q: complex

    def __post_init__(self) -> None:
        self.coefficients = [np.atleast_2d(np.asarray(c, dtype=complex)) for c in self.coefficients]
        if not self.coefficients:
            raise ValueError("need at least M0")

    @property
    def M0(self) -> np.ndarray:
        return self.coefficients[0]

    @property
    def size(self) -> int:
        return self.M0.shape[0]

    def evaluate(self, x: complex) -> np.ndarray:
        total = np.zeros_like(self.M0)
        for power, coefficient in enumerate(self.coefficients):
            total = total + coefficient * x**power
        return total


@dataclass
class QDiffSolution:
    """Fundamental solution H(x) * exp(exponent * ln x) with H(0) = Id."""

    series: List[np.ndarray]
    exponent: np.ndarray
    q: complex

    @property
    def order(self) -> int:
        return len(self.series) - 1

    def series_value(self, x: complex) -> np.ndarray:
        total = np.zeros_like(self.series[0])
        for power, coefficient in enumerate(self.series):
            total = total + coefficient * x**power
        return total

    def evaluate(self, x: complex, log_x: Optional[complex] = None) -> np.ndarray:
        log_x = cmath.log(x) if log_x is None else log_x
        return self.series_value(x) @ linalg.expm(self.exponent * log_x)


@dataclass
class PoleProbeReport:
    m: int
    component: int
    residue: float
    control_residue: float
    scale: float
    tolerance: float
    radius: float
    halved_residue: float = 0.0
    halved_control: float = 0.0

    @property
    def stability(self) -> float:
        """Relative change of the control residue when the probe radius is halved."""
        return abs(self.halved_control - self.control_residue) / self.control_residue if self.control_residue else math.inf

    @property
    def relative_residue(self) -> float:
        return self.residue / self.scale if self.scale else math.inf

    @property
    def relative_control(self) -> float:
        return self.control_residue / self.scale if self.scale else 0.0

    @property
    def verdict(self) -> str:
        informative = self.relative_control >= config.CONTROL_FACTOR * self.tolerance
        stable = self.stability < config.PROBE_STABILITY
        return "pass" if informative and stable and self.relative_residue < self.tolerance else "fail"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "component": self.component,
            "residue": self.residue,
            "control_residue": self.control_residue,
            "scale": self.scale,
            "relative_residue": self.relative_residue,
            "relative_control": self.relative_control,
            "halved_residue": self.halved_residue,
            "halved_control": self.halved_control,
            "stability": self.stability,
            "radius": self.radius,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class SlopePath:
    """The path z = q^(-L) * zeta as q runs through q_sequence."""

    L: float
    zeta: MultPoint = MultPoint(0j)
    q_sequence: Tuple[float, ...] = config.DEFAULT_Q_SEQUENCE

    def __post_init__(self) -> None:
        sequence = tuple(float(q) for q in self.q_sequence)
        if len(sequence) < 2:
            raise ValueError("q_sequence needs at least two values")
        if any(b >= a for a, b in zip(sequence, sequence[1:])):
            raise ValueError("q_sequence must be strictly decreasing")
        if sequence[-1] < 1e-8 or sequence[0] >= 1.0:
            raise ValueError("q_sequence must lie in [1e-8, 1)")
        if abs(self.zeta.u.real) > 1e-12:
            raise ValueError("zeta must have modulus 1")
        object.__setattr__(self, "q_sequence", sequence)

    def point(self, q: float, phase: float = 0.0) -> MultPoint:
        return MultPoint(-self.L * math.log(q) + self.zeta.u + 1j * phase)

    def phases(self, count: int = config.PHASE_SAMPLES) -> List[float]:
        return [2.0 * math.pi * m / count for m in range(count)]

    def distance_to_wall(self) -> float:
        return abs(self.L - round(self.L))

    def to_dict(self) -> Dict[str, Any]:
        return {"L": self.L, "zeta": self.zeta.to_dict(), "q_sequence": list(self.q_sequence)}


@dataclass(frozen=True)
class DrawConstraints:
    """Shape of a random parameter draw; log coordinates sampled in |Re u| <= re_box, |Im u| <= im_box."""

    n: int = 2
    q: Optional[float] = None
    q_range: Tuple[float, float] = (0.05, 0.5)
    re_box: float = config.DRAW_RE_BOX
    im_box: float = config.DRAW_IM_BOX
    hbar_inside: bool = False
    ordered: bool = False
    z_max: Optional[float] = None
    pinch: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigInvalid("n must be positive")
        low, high = self.q_range
        if self.q is not None and not 0.0 < self.q < 1.0:
            raise ConfigInvalid(f"q must lie in (0, 1), got {self.q}")
        if not 0.0 < low < high < 1.0:
            raise ConfigInvalid(f"q_range must satisfy 0 < low < high < 1, got {self.q_range}")
        if self.re_box < 0 or self.im_box < 0:
            raise ConfigInvalid("draw boxes must be nonnegative")
        if self.pinch and self.n < 2:
            raise ConfigInvalid("the pinch configuration needs n >= 2")
        if self.z_max is not None and self.z_max <= 0:
            raise ConfigInvalid("z_max must be positive")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DrawConstraints":
        q = data.get("q")
        z_max = data.get("z_max")
        return cls(
            n=int(data.get("n", 2)),
            q=None if q is None else float(q),
            q_range=tuple(float(x) for x in data.get("q_range", (0.05, 0.5))),
            re_box=float(data.get("re_box", config.DRAW_RE_BOX)),
            im_box=float(data.get("im_box", config.DRAW_IM_BOX)),
            hbar_inside=bool(data.get("hbar_inside", False)),
            ordered=bool(data.get("ordered", False)),
            z_max=None if z_max is None else float(z_max),
            pinch=bool(data.get("pinch", False)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "q": self.q,
            "q_range": list(self.q_range),
            "re_box": self.re_box,
            "im_box": self.im_box,
            "hbar_inside": self.hbar_inside,
            "ordered": self.ordered,
            "z_max": self.z_max,
            "pinch": self.pinch,
        }


@dataclass
class SuiteConfig:
    seed: int = config.DEFAULT_SEED
    suites: List[str] = field(default_factory=lambda: list(config.SUITE_NAMES))
    params: Optional[str] = None
    output: str = "report.json"
    draws: int = 50
    timings: bool = False
    m_max: int = 3

    def __post_init__(self) -> None:
        unknown = [name for name in self.suites if name not in config.SUITE_NAMES]
        if unknown:
            raise ConfigInvalid(
                config.UNKNOWN_SUITE.format(name=unknown[0], choices=", ".join(config.SUITE_NAMES))
            )


@dataclass
class CheckRecord:
    check_id: str
    params_digest: str
    residual: float
    tolerance: float
    verdict: str
    runtime_ms: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def evaluate(
        cls,
        check_id: str,
        residual: float,
        tolerance: float,
        params_digest: str = "",
        details: Optional[Dict[str, Any]] = None,
    ) -> "CheckRecord":
        residual = float(residual)
        verdict = "pass" if residual < tolerance else "fail"
        return cls(check_id, params_digest, residual, tolerance, verdict, details=details or {})

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "check_id": self.check_id,
            "params_digest": self.params_digest,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }
        if self.runtime_ms is not None:
            data["runtime_ms"] = self.runtime_ms
        if self.details:
            data["details"] = self.details
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckRecord":
        return cls(
            check_id=str(data.get("check_id", "")),
            params_digest=str(data.get("params_digest", "")),
            residual=float(data.get("residual", math.inf)),
            tolerance=float(data.get("tolerance", 0.0)),
            verdict=str(data.get("verdict", "fail")),
            runtime_ms=data.get("runtime_ms"),
            details=dict(data.get("details") or {}),
        )


@dataclass
class VerificationReport:
    seed: int
    suites: List[str]
    checks: List[CheckRecord] = field(default_factory=list)
    schema_version: int = config.REPORT_SCHEMA_VERSION

    def add(self, record: CheckRecord) -> None:
        self.checks.append(record)

    def extend(self, records: Sequence[CheckRecord]) -> None:
        self.checks.extend(records)

    @property
    def failed(self) -> List[CheckRecord]:
        return [record for record in self.checks if not record.passed]

    @property
    def all_passed(self) -> bool:
        return not self.failed

    def sorted_checks(self) -> List[CheckRecord]:
        return sorted(self.checks, key=lambda record: record.check_id)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "seed": self.seed,
            "suites": list(self.suites),
            "summary": {"total": len(self.checks), "failed": len(self.failed)},
            "checks": [record.to_dict() for record in self.sorted_checks()],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VerificationReport":
        return cls(
            seed=int(data.get("seed", 0)),
            suites=list(data.get("suites", [])),
            checks=[CheckRecord.from_dict(item) for item in data.get("checks", [])],
            schema_version=int(data.get("schema_version", config.REPORT_SCHEMA_VERSION)),
        )

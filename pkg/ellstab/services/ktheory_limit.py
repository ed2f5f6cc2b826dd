"""q -> 0 degenerations: theta ratios, the growth-bounded solution basis and envelope supports."""
from __future__ import annotations

import cmath
import logging
import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .. import config
from ..errors import FitUnderdetermined, SlopeOnWall
from ..models import Chamber, CheckRecord, EnvelopeParams, MultPoint, QContext, SlopePath
from .envelopes import restriction_product
from .qspecial import theta
from .theta_products import Monomial, ThetaProduct

logger = logging.getLogger(__name__)

GROWTH_TERMS = 12
GROWTH_Q_PAIR = (1e-2, 1e-3)
GROWTH_CHECK_Q = 0.2
GROWTH_EQUATION_TOL = 1e-10
MONOTONE_FLOOR = 1e-12


def extrapolate(qs: Sequence[float], values: Sequence[complex]) -> complex:
    """Remove the linear term in q using the two smallest q values."""
    q1, q2 = qs[-2], qs[-1]
    v1, v2 = values[-2], values[-1]
    return (q1 * v2 - q2 * v1) / (q1 - q2)


def _check_slope(path: SlopePath) -> None:
    if path.distance_to_wall() < config.SLOPE_WALL_TOL:
        raise SlopeOnWall(f"slope L={path.L} lies on a wall")


def theta_ratio_limit(a: MultPoint, path: SlopePath, k: int) -> CheckRecord:
    """Check theta(az)/theta(z) -> a^{k+1/2} along z = q^{-L} zeta with L in (k, k+1)."""
    _check_slope(path)
    if not k < path.L < k + 1:
        raise ValueError(f"slope {path.L} is not in ({k}, {k + 1})")
    expected = cmath.exp((k + 0.5) * a.u)
    averages = []
    for q in path.q_sequence:
        ctx = QContext(q)
        values = []
        for phase in path.phases():
            z = path.point(q, phase)
            values.append(theta(a * z, ctx) / theta(z, ctx))
        averages.append(complex(np.mean(values)))
    raw = [abs(value - expected) / abs(expected) for value in averages]
    limit = extrapolate(path.q_sequence, averages)
    error = abs(limit - expected) / abs(expected)
    # Raw errors must shrink along the q-sequence until they reach rounding level.
    monotone = all(later <= earlier or later < MONOTONE_FLOOR for earlier, later in zip(raw, raw[1:]))
    logger.debug("theta ratio limit at L=%.3f: raw errors %s, extrapolated %.2e", path.L, raw, error)
    return CheckRecord(
        check_id=f"limits/theta_ratio/k{k}/L{path.L:g}",
        params_digest="",
        residual=error,
        tolerance=config.LIMIT_TOL,
        verdict="pass" if monotone and error < config.LIMIT_TOL else "fail",
        details={"raw_errors": raw, "monotone": monotone},
    )


def growth_function(k: int, N: int, alpha: float, w: complex, q: float, z: complex) -> complex:
    """Return f_k(z) = z^k sum_n q^{N n^2 / 2} (w^{-1} q^beta z^N)^n, truncated symmetrically in n."""
    beta = k - N / 2 - alpha
    x = q**beta * z**N / w
    total = sum(q ** (N * n * n / 2) * x**n for n in range(-GROWTH_TERMS, GROWTH_TERMS + 1))
    return z**k * total


def growth_slopes(
    k: int, N: int, alpha: float, w: complex, q_pair: Tuple[float, float] = GROWTH_Q_PAIR
) -> Tuple[float, float]:
    """Estimate the q-exponents of the z^{k+N} and z^{k-N} coefficients from sampled values.

    Coefficients are read off a discrete Fourier transform on |z| = q^{-beta/N},
    where every summand has modulus q^{N n^2 / 2}.
    """
    beta = k - N / 2 - alpha
    samples = 16 * N
    magnitudes: Dict[int, List[float]] = {1: [], -1: []}
    for q in q_pair:
        radius = q ** (-beta / N)
        nodes = radius * np.exp(2j * math.pi * np.arange(samples) / samples)
        values = np.array([growth_function(k, N, alpha, w, q, z) for z in nodes])
        spectrum = np.fft.fft(values) / samples
        for n in (1, -1):
            power = k + N * n
            magnitudes[n].append(abs(spectrum[power % samples]) / radius**power)
    ratio = math.log(q_pair[0] / q_pair[1])
    return (
        math.log(magnitudes[1][0] / magnitudes[1][1]) / ratio,
        math.log(magnitudes[-1][0] / magnitudes[-1][1]) / ratio,
    )


def growth_equation_residual(k: int, N: int, alpha: float, w: complex, q: float = GROWTH_CHECK_Q) -> float:
    """Residual of f(qz) = q^alpha w z^{-N} f(z) at a point on the balanced circle."""
    beta = k - N / 2 - alpha
    z = 0.9 * cmath.exp(0.4j) * q ** (-beta / N)
    shifted = growth_function(k, N, alpha, w, q, q * z)
    expected = q**alpha * w * z ** (-N) * growth_function(k, N, alpha, w, q, z)
    return abs(shifted - expected) / abs(expected)


def growth_basis(
    N: int,
    alpha: float,
    w: complex,
    q_pair: Tuple[float, float] = GROWTH_Q_PAIR,
    ks: Optional[Sequence[int]] = None,
    tag: Optional[str] = None,
) -> List[CheckRecord]:
    """Compare the convergence of each f_k to z^k with the interval criterion alpha < k < alpha + N."""
    if N < 1:
        raise ValueError("N must be positive")
    if abs(alpha - round(alpha)) < config.SLOPE_WALL_TOL:
        raise SlopeOnWall(f"alpha={alpha} is an integer")
    if abs(abs(w) - 1.0) > 1e-12:
        raise ValueError("w must have modulus 1")
    full_range = ks is None
    ks = list(range(math.floor(alpha) - 1, math.floor(alpha) + N + 3)) if full_range else list(ks)
    prefix = f"limits/growth/N{N}" + (f"/{tag}" if tag else "")
    records = []
    converging = 0
    for k in ks:
        e_plus, e_minus = growth_slopes(k, N, alpha, w, q_pair)
        converges = e_plus > 0 and e_minus > 0
        expected = alpha < k < alpha + N
        converging += converges
        records.append(
            CheckRecord.evaluate(
                f"{prefix}/k{k}",
                0.0 if converges == expected else 1.0,
                0.5,
                details={"slopes": [e_plus, e_minus], "converges": converges, "beta": k - N / 2 - alpha},
            )
        )
        residual = growth_equation_residual(k, N, alpha, w)
        records.append(CheckRecord.evaluate(f"{prefix}/k{k}/equation", residual, GROWTH_EQUATION_TOL))
    if full_range:
        records.append(CheckRecord.evaluate(f"{prefix}/count", abs(converging - N), 0.5, details={"count": converging}))
    return records


def _u_exponent(monomial: Monomial) -> int:
    e1, e2 = monomial.exponent("a1"), monomial.exponent("a2")
    if e1 != -e2:
        raise ValueError(f"{monomial!r} is not a function of u = a1/a2")
    return e1


def predicted_support(product: ThetaProduct, L: float, normalization: Fraction = Fraction(0)) -> Set[Fraction]:
    """Return the u-exponents of the q -> 0 limit of u^normalization * product along slope L.

    A factor theta(u^e X) contributes {e/2, -e/2}; a Kahler ratio theta(u^e z ...)
    contributes the single exponent e (m + 1/2) with m the integer part of L.
    """
    if product.vanishes:
        return set()
    m = math.floor(L)
    support = {Fraction(normalization)}

    def add(shift: Set[Fraction]) -> None:
        nonlocal support
        support = {s + t for s in support for t in shift}

    for factor in product.numerator:
        e = _u_exponent(factor)
        z = factor.exponent("z")
        if z:
            add({Fraction(e * z) * (m + Fraction(1, 2))})
        else:
            add({Fraction(e, 2), Fraction(-e, 2)})
    for factor in product.denominator:
        e = _u_exponent(factor)
        z = factor.exponent("z")
        if not z:
            raise ValueError(f"theta({factor!r}) in the denominator does not degenerate to a Laurent polynomial")
        add({-Fraction(e * z) * (m + Fraction(1, 2))})
    return support


def normalized_entry(row: int, col: int) -> Tuple[ThetaProduct, Fraction]:
    """Return Stab(F_col)|_{F_row} of T*P^1 and the exponent of u in its row normalization."""
    product = restriction_product(row, col, 2, Chamber.standard(2))
    return product, Fraction(1, 2) if row == 1 else Fraction(-1, 2)


def _entry_samples(
    product: ThetaProduct,
    normalization: Fraction,
    p: EnvelopeParams,
    path: SlopePath,
    q: float,
    u_logs: np.ndarray,
) -> np.ndarray:
    """Phase-averaged values of the normalized entry at the sampled u."""
    ctx = QContext(q)
    phases = path.phases()
    averaged = np.zeros(len(u_logs), dtype=complex)
    for phase in phases:
        env = {"a1": 0j, "a2": 0j, "hbar": p.hbar.u, "z": path.point(q, phase).u}
        for index, u in enumerate(u_logs):
            env["a1"] = complex(u)
            averaged[index] += cmath.exp(float(normalization) * u) * product.evaluate(env, ctx)
    return averaged / len(phases)


def stab_support_limit(
    p: EnvelopeParams,
    path: SlopePath,
    entry: Tuple[int, int] = (2, 1),
    samples: Optional[int] = None,
) -> CheckRecord:
    """Fit the q -> 0 limit of a normalized T*P^1 envelope entry as a Laurent polynomial in u = a1/a2."""
    _check_slope(path)
    product, normalization = normalized_entry(*entry)
    predicted = predicted_support(product, path.L, normalization)
    if not predicted:
        raise ValueError(f"entry {entry} vanishes identically")
    guard = config.SUPPORT_GUARD_SLOTS
    low = math.floor(min(predicted)) - guard
    high = math.ceil(max(predicted)) + guard
    window = list(range(low, high + 1))
    samples = samples if samples is not None else max(16, 2 * len(window))
    if samples < len(window):
        raise FitUnderdetermined(f"{samples} samples cannot resolve a window of {len(window)} exponents")

    u_logs = 2j * math.pi * np.arange(samples) / samples
    vandermonde = np.exp(np.outer(u_logs, window))
    fits = []
    fit_residual = 0.0
    tail = len(path.q_sequence) - 2
    for index, q in enumerate(path.q_sequence):
        values = _entry_samples(product, normalization, p, path, q, u_logs)
        coefficients, *_ = np.linalg.lstsq(vandermonde, values, rcond=None)
        fits.append(coefficients)
        if index >= tail:
            # only the points entering the extrapolation need to be Laurent polynomials in the window
            scale = float(np.max(np.abs(values))) or 1.0
            fit_residual = max(fit_residual, float(np.max(np.abs(vandermonde @ coefficients - values))) / scale)
    limit = extrapolate(path.q_sequence, fits)
    top = float(np.max(np.abs(limit))) or 1.0
    observed = {Fraction(e) for e, c in zip(window, limit) if abs(c) > config.SUPPORT_THRESHOLD * top}
    leakage = max((abs(c) / top for e, c in zip(window, limit) if Fraction(e) not in predicted), default=0.0)
    residual = max(fit_residual, leakage)
    logger.debug("support of entry %s at L=%.3f: observed %s predicted %s", entry, path.L, observed, predicted)
    return CheckRecord.evaluate(
        f"limits/support/F{entry[0]}F{entry[1]}/L{path.L:g}",
        residual,
        config.SUPPORT_THRESHOLD,
        p.digest(),
        {
            "observed": sorted(str(e) for e in observed),
            "predicted": sorted(str(e) for e in predicted),
            "fit_residual": fit_residual,
            "window": [low, high],
        },
    )


def support_wall_check(p: EnvelopeParams, m: int, zeta: MultPoint = MultPoint(0j)) -> CheckRecord:
    """The off-diagonal support moves by one step when L crosses the wall at m + 1."""
    supports = []
    for L in (m + 0.5, m + 1.5):
        record = stab_support_limit(p, SlopePath(L, zeta))
        supports.append([Fraction(e) for e in record.details["observed"]])
    shifted = len(supports[0]) == 1 and len(supports[1]) == 1 and supports[1][0] - supports[0][0] == 1
    return CheckRecord.evaluate(
        f"limits/support/wall/m{m}",
        0.0 if shifted else 1.0,
        0.5,
        p.digest(),
        {"supports": [[str(e) for e in s] for s in supports]},
    )

"""Elliptic dynamical R-matrices of the T*P^1 wall and their identities."""
from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np

from .. import config
from ..errors import DenominatorVanishes, SingularStab
from ..models import Chamber, CheckRecord, EnvelopeParams, MultPoint, QContext, RMatrix
from .envelopes import label_matrix
from .qspecial import theta

logger = logging.getLogger(__name__)

PRODUCT_FORM_TOL = 1e-10
UNITARITY_TOL = 1e-10
DYB_TOL = 1e-9

GaugeFunction = Callable[[MultPoint], complex]


def _spectral(p: EnvelopeParams, i: int = 1, j: int = 2) -> MultPoint:
    return p.a[i - 1] / p.a[j - 1]


def _pole(value: complex, label: str, error: type = SingularStab) -> complex:
    if abs(value) < config.DENOMINATOR_FLOOR:
        raise error(f"theta({label}) = {abs(value):.2e} vanishes")
    return value


def r_from_stab(p: EnvelopeParams) -> RMatrix:
    """Return Stab_{-C}^{-1} Stab_C on the weight-zero block of (T*P^1)^2.

    The equivariant parameters enter inverted and the Kahler parameter is
    shifted to z*hbar, so that at (a1, a2) = (u, 1) the product of restriction
    matrices reproduces the closed form entry by entry.
    """
    chamber = Chamber.standard(2)

    def evaluate(u: MultPoint, z: MultPoint) -> np.ndarray:
        local = EnvelopeParams(
            a=(u.inverse(), MultPoint(0j)),
            hbar_half=p.hbar_half,
            z=z * p.hbar,
            ctx=p.ctx,
            strict=False,
        )
        direct = label_matrix(local, chamber)
        opposite = label_matrix(local, chamber.opposite())
        scale = max(float(np.max(np.abs(opposite))), 1.0)
        det = np.linalg.det(opposite)
        if abs(det) < config.DENOMINATOR_FLOOR * scale**2:
            raise SingularStab(f"opposite-chamber envelope is singular at u={u.value:.6g} (|det|={abs(det):.2e})")
        return np.linalg.solve(opposite, direct)

    return RMatrix(name="product", hbar=p.hbar, evaluate=evaluate)


def closed_form_block(u: MultPoint, z: MultPoint, hbar: MultPoint, ctx: QContext) -> np.ndarray:
    def t(x: MultPoint) -> complex:
        return theta(x, ctx)

    prefactor = 1.0 / _pole(t(u / hbar), "u/hbar")
    tz = _pole(t(z), "z", DenominatorVanishes)
    return prefactor * np.array(
        [
            [t(z * hbar) * t(z / hbar) * t(u) / tz**2, -t(hbar) * t(z * u) / tz],
            [-t(hbar) * t(z / u) / tz, t(u)],
        ],
        dtype=complex,
    )


def felder_block(u: MultPoint, z: MultPoint, hbar: MultPoint, ctx: QContext) -> np.ndarray:
    def t(x: MultPoint) -> complex:
        return theta(x, ctx)

    denominator = _pole(t(hbar / u), "hbar/u") * _pole(t(z), "z", DenominatorVanishes)
    return (
        np.array(
            [
                [t(z * hbar) * t(u.inverse()), t(z * u) * t(hbar)],
                [t(z / u) * t(hbar), t(hbar / z) * t(u)],
            ],
            dtype=complex,
        )
        / denominator
    )


def r_closed_form(p: EnvelopeParams) -> RMatrix:
    return RMatrix(name="closed", hbar=p.hbar, evaluate=lambda u, z: closed_form_block(u, z, p.hbar, p.ctx))


def r_felder(p: EnvelopeParams) -> RMatrix:
    return RMatrix(name="felder", hbar=p.hbar, evaluate=lambda u, z: felder_block(u, z, p.hbar, p.ctx))


def r_identity(p: EnvelopeParams) -> RMatrix:
    return RMatrix(name="identity", hbar=p.hbar, evaluate=lambda u, z: np.eye(2, dtype=complex))


def flip() -> np.ndarray:
    """Return the permutation P of the two tensor factors of V (x) V."""
    matrix = np.zeros((4, 4), dtype=complex)
    for s1 in (0, 1):
        for s2 in (0, 1):
            matrix[2 * s2 + s1, 2 * s1 + s2] = 1.0
    return matrix


def gauge_transform(R: RMatrix, f: GaugeFunction, name: Optional[str] = None) -> RMatrix:
    """Rescale the diagonal of the weight-zero block by f(z) and f(z)^{-1}."""

    def evaluate(u: MultPoint, z: MultPoint) -> np.ndarray:
        block = R.block(u, z).copy()
        factor = complex(f(z))
        block[0, 0] *= factor
        block[1, 1] /= factor
        return block

    return RMatrix(name=name or f"{R.name}/gauged", hbar=R.hbar, evaluate=evaluate, framing=R.framing, weights=R.weights)


def felder_gauge(p: EnvelopeParams) -> GaugeFunction:
    """Return f(z) = theta(z/hbar)/theta(z), which maps Felder's matrix to the closed form."""
    return lambda z: theta(z / p.hbar, p.ctx) / theta(z, p.ctx)


def gauge_ratio(p: EnvelopeParams, u: Optional[MultPoint] = None, z: Optional[MultPoint] = None) -> np.ndarray:
    """Return the entrywise ratio closed form / Felder at (u, z)."""
    u = u or _spectral(p)
    z = z or p.z
    return closed_form_block(u, z, p.hbar, p.ctx) / felder_block(u, z, p.hbar, p.ctx)


def wall_shift(R: RMatrix, shift: int) -> RMatrix:
    """Return the evaluator with z replaced by z * hbar^{-shift}."""
    if shift == 0:
        return R

    def evaluate(u: MultPoint, z: MultPoint) -> np.ndarray:
        return R.block(u, MultPoint(z.u - shift * R.hbar.u))

    return RMatrix(name=f"{R.name}/shift{shift}", hbar=R.hbar, evaluate=evaluate, framing=R.framing, weights=R.weights)


def _embed(R: RMatrix, pair: tuple, u: MultPoint, z: MultPoint, shifted: bool) -> np.ndarray:
    """Return R acting on factors `pair` of V^{(x)3}, basis index 4*s1 + 2*s2 + s3.

    With `shifted`, the spectator factor's weight mu shifts z to z * hbar^{-mu}
    on its block.
    """
    a, b = pair
    (c,) = {0, 1, 2} - {a, b}
    weights = R.weights.mu
    operator = np.zeros((8, 8), dtype=complex)
    for spectator in (0, 1):
        local = wall_shift(R, weights[spectator]) if shifted else R
        four = local.full(u, z)
        for sa in (0, 1):
            for sb in (0, 1):
                for ta in (0, 1):
                    for tb in (0, 1):
                        source = [0, 0, 0]
                        target = [0, 0, 0]
                        source[a], source[b], source[c] = sa, sb, spectator
                        target[a], target[b], target[c] = ta, tb, spectator
                        row = 4 * target[0] + 2 * target[1] + target[2]
                        col = 4 * source[0] + 2 * source[1] + source[2]
                        operator[row, col] = four[2 * ta + tb, 2 * sa + sb]
    return operator


def wall_chain(R: RMatrix, p: EnvelopeParams, side: str = "left") -> np.ndarray:
    """Compose the three wall crossings of the (T*P^1)^3 chamber cycle on one side."""
    if p.n < 3:
        raise ValueError("the wall chain needs three equivariant parameters")
    u12, u13, u23 = _spectral(p, 1, 2), _spectral(p, 1, 3), _spectral(p, 2, 3)
    z = p.z
    if side == "left":
        return _embed(R, (0, 1), u12, z, False) @ _embed(R, (0, 2), u13, z, True) @ _embed(R, (1, 2), u23, z, False)
    if side == "right":
        return _embed(R, (1, 2), u23, z, True) @ _embed(R, (0, 2), u13, z, False) @ _embed(R, (0, 1), u12, z, True)
    raise ValueError(f"unknown side {side!r}")


def _tag(kind: str, R: RMatrix, suffix: Optional[str]) -> str:
    tag = f"rmatrix/{kind}/{R.name}"
    return f"{tag}/{suffix}" if suffix else tag


def check_unitarity(R: RMatrix, p: EnvelopeParams, suffix: Optional[str] = None) -> CheckRecord:
    u = _spectral(p)
    P = flip()
    product = P @ R.full(u.inverse(), p.z) @ P @ R.full(u, p.z)
    residual = float(np.max(np.abs(product - np.eye(4))))
    logger.debug("unitarity residual %.3e for %s", residual, R.name)
    return CheckRecord.evaluate(_tag("unitarity", R, suffix), residual, UNITARITY_TOL, p.digest())


def check_dyb(R: RMatrix, p: EnvelopeParams, suffix: Optional[str] = None) -> CheckRecord:
    left = wall_chain(R, p, "left")
    right = wall_chain(R, p, "right")
    scale = max(float(np.linalg.norm(left, 2)), 1.0)
    residual = float(np.max(np.abs(left - right))) / scale
    logger.debug("DYB residual %.3e for %s", residual, R.name)
    return CheckRecord.evaluate(_tag("dyb", R, suffix), residual, DYB_TOL, p.digest())


def product_form_check(p: EnvelopeParams, suffix: Optional[str] = None) -> CheckRecord:
    """Compare the product of restriction matrices with the closed form at u = a1/a2."""
    u = _spectral(p)
    product = r_from_stab(p).block(u, p.z)
    closed = closed_form_block(u, p.z, p.hbar, p.ctx)
    residual = float(np.max(np.abs(product - closed)) / max(np.max(np.abs(closed)), 1e-300))
    tag = "rmatrix/product_form" + (f"/{suffix}" if suffix else "")
    return CheckRecord.evaluate(tag, residual, PRODUCT_FORM_TOL, p.digest())


def determinant_check(p: EnvelopeParams, suffix: Optional[str] = None) -> CheckRecord:
    """det R = theta(u hbar) / theta(u / hbar)."""
    u = _spectral(p)
    observed = np.linalg.det(r_from_stab(p).block(u, p.z))
    expected = theta(u * p.hbar, p.ctx) / theta(u / p.hbar, p.ctx)
    residual = abs(observed - expected) / abs(expected)
    tag = "rmatrix/determinant" + (f"/{suffix}" if suffix else "")
    return CheckRecord.evaluate(tag, residual, PRODUCT_FORM_TOL, p.digest())


def gauge_check(p: EnvelopeParams, suffix: Optional[str] = None) -> CheckRecord:
    """The closed form is Felder's matrix after the diagonal gauge theta(z/hbar)/theta(z)."""
    u = _spectral(p)
    gauged = gauge_transform(r_felder(p), felder_gauge(p)).block(u, p.z)
    closed = closed_form_block(u, p.z, p.hbar, p.ctx)
    residual = float(np.max(np.abs(gauged - closed)) / np.max(np.abs(closed)))
    tag = "rmatrix/gauge" + (f"/{suffix}" if suffix else "")
    return CheckRecord.evaluate(tag, residual, PRODUCT_FORM_TOL, p.digest())

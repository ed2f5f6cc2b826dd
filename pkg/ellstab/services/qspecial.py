"""q-series special functions: q-Pochhammer symbols, phi, theta and the bilinear exponential."""
from __future__ import annotations

import cmath
import logging

import mpmath
import numpy as np

from .. import config
from ..errors import TruncationInsufficient
from ..models import MultPoint, QContext

logger = logging.getLogger(__name__)


def _wide(ctx: QContext) -> bool:
    return ctx.precision == "wide"


def qpochhammer(x: MultPoint, d: int, ctx: QContext) -> complex:
    """Return (x; q)_d as an exact finite product."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    if d == 0:
        return 1.0 + 0j
    if _wide(ctx):
        with mpmath.workdps(config.WIDE_DPS):
            return complex(mpmath.qp(mpmath.exp(mpmath.mpc(x.u)), mpmath.mpc(ctx.q), d))
    powers = ctx.q ** np.arange(d)
    return complex(np.prod(1.0 - powers * x.value))


def phi(x: MultPoint, ctx: QContext) -> complex:
    """Return the truncated infinite product prod_{i >= 0} (1 - q^i x)."""
    value = x.value
    abs_x = abs(value)
    terms = ctx.terms_for(abs_x)
    bound = ctx.tail_bound(terms, abs_x)
    if bound > ctx.tol:
        logger.debug("phi tail bound %.3e exceeds tol %.1e at |x|=%.3e", bound, ctx.tol, abs_x)
        raise TruncationInsufficient(
            f"tail bound {bound:.3e} exceeds tol {ctx.tol:.1e} with {terms} terms at |x|={abs_x:.3e}"
        )
    if _wide(ctx):
        with mpmath.workdps(config.WIDE_DPS):
            return complex(mpmath.qp(mpmath.exp(mpmath.mpc(x.u)), mpmath.mpc(ctx.q)))
    powers = ctx.q ** np.arange(terms + 1)
    return complex(np.prod(1.0 - powers * value))


def theta_shift_factor(y: MultPoint, m: int, ctx: QContext) -> complex:
    """Return the factor c with theta(q^m y) = c * theta(y)."""
    return (-1) ** m * cmath.exp(-(m * m) * ctx.log_q / 2 - m * y.u)


def _theta_direct(x: MultPoint, ctx: QContext) -> complex:
    if x.u == 0:
        return 0j
    inverse = x.inverse()
    prefactor = x.half - inverse.half
    return prefactor * phi(x.shift_q(ctx), ctx) * phi(inverse.shift_q(ctx), ctx)


def theta(x: MultPoint, ctx: QContext) -> complex:
    """Return (x^{1/2} - x^{-1/2}) phi(qx) phi(q/x), half-powers from the stored logarithm."""
    if _wide(ctx):
        with mpmath.workdps(config.WIDE_DPS):
            u = mpmath.mpc(x.u)
            q = mpmath.mpc(ctx.q)
            value = (mpmath.exp(u / 2) - mpmath.exp(-u / 2)) * mpmath.qp(q * mpmath.exp(u), q) * mpmath.qp(
                q * mpmath.exp(-u), q
            )
            return complex(value)
    abs_x = abs(cmath.exp(x.u.real))
    if config.RANGE_LOW <= abs_x <= config.RANGE_HIGH:
        return _theta_direct(x, ctx)
    m = round(x.u.real / ctx.log_q.real)
    reduced = x.shift_q(ctx, -m)
    return theta_shift_factor(reduced, m, ctx) * _theta_direct(reduced, ctx)


def theta_three_term(A: MultPoint, B: MultPoint, C: MultPoint, ctx: QContext) -> complex:
    """Return the cyclic three-term combination theta(AB)theta(A/B)theta(C)^2 + cyclic."""
    terms = three_term_terms(A, B, C, ctx)
    return sum(terms)


def three_term_terms(A: MultPoint, B: MultPoint, C: MultPoint, ctx: QContext) -> list:
    return [
        theta(A * B, ctx) * theta(A / B, ctx) * theta(C, ctx) ** 2,
        theta(B * C, ctx) * theta(B / C, ctx) * theta(A, ctx) ** 2,
        theta(C * A, ctx) * theta(C / A, ctx) * theta(B, ctx) ** 2,
    ]


def bilinear_exp(z: MultPoint, a: MultPoint, ctx: QContext) -> complex:
    """Return exp(ln z ln a / ln q) from the stored logarithms."""
    return cmath.exp(z.u * a.u / ctx.log_q)

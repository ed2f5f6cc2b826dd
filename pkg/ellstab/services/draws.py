"""Seeded random parameter draws that respect the resonance guards."""
from __future__ import annotations

import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .. import config
from ..errors import DrawExhausted, ParameterResonant
from ..models import DrawConstraints, EnvelopeParams, QContext

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence]

ORDER_SPACING = 1.5
ORDER_JITTER = 0.2
HBAR_INSIDE_RANGE = (-1.5, -0.2)


def _constraints(constraints: Union[DrawConstraints, Dict[str, Any], None]) -> DrawConstraints:
    if constraints is None:
        return DrawConstraints()
    if isinstance(constraints, DrawConstraints):
        return constraints
    return DrawConstraints.from_dict(constraints)


def _box(rng: np.random.Generator, re_box: float, im_box: float) -> complex:
    return complex(rng.uniform(-re_box, re_box), rng.uniform(-im_box, im_box))


def _a_logs(rng: np.random.Generator, c: DrawConstraints) -> List[complex]:
    if not c.ordered:
        return [_box(rng, c.re_box, c.im_box) for _ in range(c.n)]
    # Real parts descend with fixed spacing around zero so that a_1 >> a_2 >> ... stays in the box.
    spacing = ORDER_SPACING
    if c.n > 1:
        spacing = min(spacing, 2.0 * max(c.re_box - ORDER_JITTER, 0.0) / (c.n - 1))
    logs = []
    for i in range(1, c.n + 1):
        centre = ((c.n + 1) / 2 - i) * spacing
        logs.append(complex(centre + rng.uniform(-ORDER_JITTER, ORDER_JITTER), rng.uniform(-c.im_box, c.im_box)))
    return logs


def _hbar_log(rng: np.random.Generator, c: DrawConstraints) -> complex:
    if c.hbar_inside:
        low, high = HBAR_INSIDE_RANGE
        return complex(rng.uniform(max(low, -c.re_box), high), rng.uniform(-c.im_box, c.im_box))
    return _box(rng, c.re_box, c.im_box)


def _z_log(rng: np.random.Generator, c: DrawConstraints) -> complex:
    if c.z_max is None:
        return _box(rng, c.re_box, c.im_box)
    high = min(math.log(c.z_max), c.re_box)
    low = min(-c.re_box, high - 1.0)
    return complex(rng.uniform(low, high), rng.uniform(-c.im_box, c.im_box))


def _q(rng: np.random.Generator, c: DrawConstraints) -> float:
    if c.q is not None:
        return c.q
    low, high = c.q_range
    return float(rng.uniform(low, high))


def draw_generic(
    seed: Seed,
    constraints: Union[DrawConstraints, Dict[str, Any], None] = None,
    ctx: Optional[QContext] = None,
) -> EnvelopeParams:
    """Draw parameters from the seeded generator, resampling until every resonance guard passes.

    With `pinch`, a_1 is placed at hbar * q * a_2 so that the two pole families
    of the pole-subtracted integral collide.
    """
    c = _constraints(constraints)
    rng = np.random.default_rng(seed)
    for attempt in range(config.MAX_REJECTIONS):
        q = _q(rng, c)
        local_ctx = ctx or QContext(q)
        a_logs = _a_logs(rng, c)
        hbar_log = _hbar_log(rng, c)
        z_log = _z_log(rng, c)
        if c.pinch:
            a_logs[0] = a_logs[1] + hbar_log + local_ctx.log_q
        try:
            return EnvelopeParams.create(a_logs, hbar_log, z_log, local_ctx)
        except ParameterResonant as exc:
            logger.debug("draw %d rejected on divisor %s (distance %.2e)", attempt, exc.divisor, exc.distance)
    raise DrawExhausted(f"no generic draw for {c.to_dict()} after {config.MAX_REJECTIONS} rejections")


def draw_many(
    seed: Union[int, Sequence[int]],
    count: int,
    constraints: Union[DrawConstraints, Dict[str, Any], None] = None,
    ctx: Optional[QContext] = None,
) -> List[EnvelopeParams]:
    """Return `count` independent draws spawned from one seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [draw_generic(child, constraints, ctx) for child in children]

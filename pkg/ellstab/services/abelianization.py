"""Stable envelopes of T*Gr(k, n) from the symmetrized abelianized formula."""
from __future__ import annotations

import itertools
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..models import Chamber, CheckRecord, GrassParams, KSubset, MultPoint, RestrictionMatrix
from .envelopes import A, H, Z, is_repelling
from .theta_products import Monomial, ThetaProduct, gen

logger = logging.getLogger(__name__)

REGULARITY_TOL = 1e-2


def dominance_basis(k: int, n: int) -> List[KSubset]:
    """Return all k-subsets of 1..n in lexicographic order, which refines dominance."""
    return [KSubset(mu) for mu in itertools.combinations(range(1, n + 1), k)]


def f_weight_product(m: int, s_name: str, kahler: Monomial, gp: GrassParams) -> ThetaProduct:
    """Return f_m(s) with Kahler monomial `kahler` in place of z."""
    n = gp.n
    if not 1 <= m <= n:
        raise ValueError(f"index {m} outside 1..{n}")
    s = gen(s_name)
    shifted = kahler * H ** (m - n)
    numerator = [s * A(i) for i in range(1, m)]
    numerator.append(s * A(m) * shifted)
    start = m if gp.trailing == "m" else gp.k
    numerator.extend(s * A(i) * H for i in range(start + 1, n + 1))
    return ThetaProduct(numerator, [shifted])


def f_weight(m: int, s: MultPoint, z_shift: MultPoint, gp: GrassParams) -> complex:
    env = gp.params.env()
    env["s"] = s.u
    env["zeta"] = z_shift.u
    return f_weight_product(m, "s", gen("zeta"), gp).evaluate(env, gp.params.ctx)


def _term(mu: KSubset, perm: Sequence[int], gp: GrassParams) -> ThetaProduct:
    """Return the summand of the symmetrization for s_i -> s_{perm[i]}."""
    names = [f"s{perm[i] + 1}" for i in range(mu.k)]
    product = ThetaProduct()
    for i, m in enumerate(mu.mu, start=1):
        product = product * f_weight_product(m, names[i - 1], Z * H ** gp.two_rho(i), gp)
    denominator = []
    for i, j in itertools.combinations(range(mu.k), 2):
        si, sj = gen(names[i]), gen(names[j])
        denominator.append(si / sj)
        denominator.append(sj / si / H)
    return product / ThetaProduct(denominator)


def stab_grass_terms(mu: KSubset, gp: GrassParams) -> List[ThetaProduct]:
    return [_term(mu, perm, gp) for perm in itertools.permutations(range(mu.k))]


def _evaluate_terms(terms: List[ThetaProduct], env: Dict[str, complex], gp: GrassParams) -> complex:
    return sum((term.evaluate(env, gp.params.ctx) for term in terms), 0j)


def stab_grass(mu: KSubset, s: Sequence[MultPoint], gp: GrassParams) -> complex:
    """Return the symmetrized sum over all k! orderings of the s-variables."""
    if len(s) != mu.k or mu.k != gp.k:
        raise ValueError(f"expected {gp.k} s-values for {mu.label}")
    env = gp.params.env()
    for i, point in enumerate(s, start=1):
        env[f"s{i}"] = point.u
    return _evaluate_terms(stab_grass_terms(mu, gp), env, gp)


def _positional(gp: GrassParams, c: Optional[Chamber]) -> tuple:
    """Return parameters with a permuted into chamber positions, and the position -> label map."""
    order = (c or Chamber.standard(gp.n)).effective_order
    p = gp.params.with_a_all([gp.params.a[label - 1] for label in order])
    return GrassParams(gp.k, p, gp.rho, gp.trailing), order


def _restriction_entry(nu: KSubset, mu: KSubset, gp: GrassParams) -> complex:
    env = gp.params.env()
    total = 0j
    for term in stab_grass_terms(mu, gp):
        for i, position in enumerate(nu.mu, start=1):
            term = term.substitute(f"s{i}", A(position).inverse())
        total += term.evaluate(env, gp.params.ctx)
    return total


def restriction_matrix_grass(gp: GrassParams, c: Optional[Chamber] = None) -> RestrictionMatrix:
    positional, order = _positional(gp, c)
    basis = dominance_basis(gp.k, gp.n)
    entries = np.zeros((len(basis), len(basis)), dtype=complex)
    for row, nu in enumerate(basis):
        for col, mu in enumerate(basis):
            entries[row, col] = _restriction_entry(nu, mu, positional)
    labels = ["{" + ",".join(str(order[p - 1]) for p in mu.mu) + "}" for mu in basis]
    logger.debug("Gr(%d,%d) restriction matrix over %d fixed points", gp.k, gp.n, len(basis))
    return RestrictionMatrix(entries=entries, basis=labels, params=gp.to_dict())


def grass_tangent_weights(mu: KSubset, n: int) -> List[tuple]:
    """Return tangent weights of T*Gr(k,n) at mu: Hom(V, W/V) and its hbar^{-1}-dual."""
    weights = []
    for m in mu.mu:
        for l in range(1, n + 1):
            if l in mu.mu:
                continue
            weights.append((A(l) / A(m), True))
            weights.append((A(m) / A(l) / H, False))
    return weights


def grass_repelling_product(mu: KSubset, gp: GrassParams) -> ThetaProduct:
    """Return the polarization-signed theta product of repelling weights, in chamber positions."""
    chamber = Chamber.standard(gp.n)
    factors = []
    sign = 1
    for weight, polarized in grass_tangent_weights(mu, gp.n):
        if is_repelling(weight, chamber):
            factors.append(weight)
            if not polarized:
                sign = -sign
    return ThetaProduct(factors, [], float(sign))


def grass_diagonal_oracle(gp: GrassParams, c: Optional[Chamber] = None) -> np.ndarray:
    positional, _ = _positional(gp, c)
    env = positional.params.env()
    return np.array(
        [grass_repelling_product(mu, positional).evaluate(env, gp.params.ctx) for mu in dominance_basis(gp.k, gp.n)]
    )


def grass_z_factor(nu: KSubset, mu: KSubset, gp: GrassParams) -> complex:
    """Return prod a_nu / prod a_mu, the factor picked up by entry [nu][mu] under z -> qz."""
    log = sum(gp.params.a[i - 1].u for i in nu.mu) - sum(gp.params.a[i - 1].u for i in mu.mu)
    return MultPoint(log).value


def grass_checks(gp: GrassParams, c: Optional[Chamber] = None) -> Dict[str, float]:
    """Return triangularity, diagonal and z-law residuals of the Grassmannian matrix."""
    matrix = restriction_matrix_grass(gp, c).entries
    basis = dominance_basis(gp.k, gp.n)
    scale = float(np.max(np.abs(matrix))) or 1.0
    support = 0.0
    for row, nu in enumerate(basis):
        for col, mu in enumerate(basis):
            if not nu.dominates(mu):
                support = max(support, abs(matrix[row, col]) / scale)
    oracle = grass_diagonal_oracle(gp, c)
    diagonal = float(np.max(np.abs(np.diag(matrix) / oracle - 1.0)))

    positional, _ = _positional(gp, c)
    shifted_gp = GrassParams(gp.k, gp.params.with_z(gp.params.z.shift_q(gp.params.ctx)), gp.rho, gp.trailing)
    shifted = restriction_matrix_grass(shifted_gp, c).entries
    z_law = 0.0
    for row, nu in enumerate(basis):
        for col, mu in enumerate(basis):
            expected = grass_z_factor(nu, mu, positional) * matrix[row, col]
            z_law = max(z_law, abs(shifted[row, col] - expected) / scale)
    return {"support": support, "diagonal": diagonal, "z_law": z_law}


def _probe_s(mu: KSubset, gp: GrassParams) -> List[complex]:
    return [-gp.params.a[m - 1].u + 0.37j * l for l, m in enumerate(mu.mu, start=1)]


def regularity_probe(
    mu: KSubset,
    pair: tuple,
    gp: GrassParams,
    family: str = "diagonal",
    eps: float = 1e-3,
) -> Dict[str, float]:
    """Probe the symmetrized sum as s_i approaches s_j (or hbar^{-1} s_j).

    Returns the relative change between distances eps and eps/2, the growth
    ratio |value(eps/2)| / |value(eps)|, and the same growth for the lone
    identity term. A cancelled pole shows growth near 1, a surviving simple
    pole growth near 2.
    """
    i, j = pair
    if i == j:
        raise ValueError("pair must join two different s-variables")
    base = _probe_s(mu, gp)
    terms = stab_grass_terms(mu, gp)
    offset = 0.0 if family == "diagonal" else -gp.params.hbar.u
    if family not in ("diagonal", "shifted"):
        raise ValueError(f"unknown probe family {family!r}")

    def values(distance: float) -> tuple:
        logs = list(base)
        logs[i - 1] = logs[j - 1] + offset + distance
        env = gp.params.env()
        for index, u in enumerate(logs, start=1):
            env[f"s{index}"] = u
        return _evaluate_terms(terms, env, gp), terms[0].evaluate(env, gp.params.ctx)

    full, single = values(eps)
    full_half, single_half = values(eps / 2)
    return {
        "relative_change": abs(full - full_half) / abs(full),
        "growth": abs(full_half) / abs(full),
        "control_growth": abs(single_half) / abs(single),
    }


def regularity_record(mu: KSubset, pair: tuple, gp: GrassParams, family: str = "diagonal") -> CheckRecord:
    probe = regularity_probe(mu, pair, gp, family)
    tag = f"grass/regularity/{family}/{mu.label}/{pair[0]}{pair[1]}"
    if family == "diagonal":
        return CheckRecord.evaluate(tag, probe["relative_change"], REGULARITY_TOL, gp.params.digest(), probe)
    # The hbar-shifted family keeps a simple pole; the record confirms growth 2 under halving.
    return CheckRecord.evaluate(tag, abs(probe["growth"] - 2.0), 0.05, gp.params.digest(), probe)

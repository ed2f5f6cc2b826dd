"""Elliptic stable envelopes of T*P^{n-1} and smooth hypertoric varieties."""
from __future__ import annotations

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..models import (
    Chamber,
    CheckRecord,
    EnvelopeParams,
    HypertoricData,
    HypertoricFixedPoint,
    KahlerFactor,
    MultPoint,
    RepellingFactor,
    RestrictionMatrix,
)
from .qspecial import theta
from .theta_products import Monomial, ThetaProduct, gen

logger = logging.getLogger(__name__)

H = gen("hbar")
Z = gen("z")
S = gen("s")

TRIANGLE_TOL = 1e-10
LAW_TOL = 1e-12


def A(i: int) -> Monomial:
    return gen(f"a{i}")


def _chamber(p: EnvelopeParams, c: Optional[Chamber]) -> Chamber:
    return c if c is not None else Chamber.standard(p.n)


def stab_tpn_product(k: int, n: int, c: Optional[Chamber] = None) -> ThetaProduct:
    """Return Stab(F_k) as a theta product in s, with F_k placed by its chamber position."""
    if not 1 <= k <= n:
        raise ValueError(f"fixed point index {k} outside 1..{n}")
    order = (c or Chamber.standard(n)).effective_order
    pos = order.index(k) + 1
    kahler = Z * H ** (pos - n)
    numerator = [S * A(i) for i in order[: pos - 1]]
    numerator.append(S * A(k) * kahler)
    numerator.extend(S * A(i) * H for i in order[pos:])
    return ThetaProduct(numerator, [kahler])


def stab_tpn(k: int, s: MultPoint, p: EnvelopeParams, c: Optional[Chamber] = None) -> complex:
    env = p.env()
    env["s"] = s.u
    return stab_tpn_product(k, p.n, c).evaluate(env, p.ctx)


def restriction_product(j: int, k: int, n: int, c: Optional[Chamber] = None) -> ThetaProduct:
    """Return Stab(F_k)|_{F_j} symbolically (s = a_j^{-1})."""
    return stab_tpn_product(k, n, c).substitute("s", A(j).inverse())


def label_matrix(p: EnvelopeParams, c: Optional[Chamber] = None) -> np.ndarray:
    """Return M[j-1][k-1] = Stab_c(F_k)|_{F_j} indexed by labels rather than chamber order."""
    c = _chamber(p, c)
    env = p.env()
    matrix = np.zeros((p.n, p.n), dtype=complex)
    for j in range(1, p.n + 1):
        for k in range(1, p.n + 1):
            matrix[j - 1, k - 1] = restriction_product(j, k, p.n, c).evaluate(env, p.ctx)
    return matrix


def restriction_matrix_tpn(p: EnvelopeParams, c: Optional[Chamber] = None) -> RestrictionMatrix:
    c = _chamber(p, c)
    order = c.effective_order
    full = label_matrix(p, c)
    index = [label - 1 for label in order]
    entries = full[np.ix_(index, index)]
    return RestrictionMatrix(entries=entries, basis=[f"F{label}" for label in order], params=p.to_dict())


def tangent_weights(k: int, n: int) -> List[Tuple[Monomial, bool]]:
    """Return the tangent weights of T*P^{n-1} at F_k, flagged by membership in the polarization."""
    weights = []
    for i in range(1, n + 1):
        if i != k:
            weights.append((A(i) / A(k), True))
            weights.append((A(k) / A(i) / H, False))
    return weights


def is_repelling(weight: Monomial, c: Chamber) -> bool:
    """A weight a_x / a_y * hbar^e repels from the fixed locus iff F_x is above F_y."""
    up = [g for g, e in weight.exps.items() if g.startswith("a") and e > 0]
    down = [g for g, e in weight.exps.items() if g.startswith("a") and e < 0]
    if len(up) != 1 or len(down) != 1:
        raise ValueError(f"{weight!r} is not a root-type weight")
    return c.above(int(up[0][1:]), int(down[0][1:]))


def repelling_theta_product(k: int, n: int, c: Optional[Chamber] = None) -> ThetaProduct:
    """Return the theta product over repelling tangent weights at F_k, polarization-signed."""
    c = c or Chamber.standard(n)
    factors = []
    sign = 1
    for weight, polarized in tangent_weights(k, n):
        if is_repelling(weight, c):
            factors.append(weight)
            if not polarized:
                sign = -sign
    return ThetaProduct(factors, [], float(sign))


def z_quasiperiodicity_factor(j: int, k: int, p: EnvelopeParams) -> complex:
    """Return a_j / a_k, the factor with M[j][k](qz) = factor * M[j][k](z)."""
    if j == k:
        return 1.0 + 0j
    return (p.a[j - 1] / p.a[k - 1]).value


def _relative(observed: complex, expected: complex) -> float:
    scale = max(abs(expected), abs(observed))
    return abs(observed - expected) / scale if scale else 0.0


def _shifted_a(p: EnvelopeParams, m: int) -> EnvelopeParams:
    return p.with_a(m, p.a[m - 1].shift_q(p.ctx))


def a_law_predictions(p: EnvelopeParams, c: Chamber, m: int) -> np.ndarray:
    """Return the predicted ratios M(q a_m)[j][k] / M(a)[j][k] in label indexing."""
    env = p.env()
    prediction = np.ones((p.n, p.n), dtype=complex)
    for j in range(1, p.n + 1):
        for k in range(1, p.n + 1):
            product = restriction_product(j, k, p.n, c)
            prediction[j - 1, k - 1] = product.automorphy(f"a{m}").value(env, p.ctx)
    return prediction


def characterization_residuals(
    builder: Callable[[EnvelopeParams], np.ndarray],
    p: EnvelopeParams,
    c: Optional[Chamber] = None,
) -> Dict[str, float]:
    """Evaluate the defining properties on a label-indexed matrix builder.

    Returns the maximal residual of strict triangularity, diagonal normalization,
    the z-law and the a-law. Any builder passing all four agrees with the envelope.
    """
    c = _chamber(p, c)
    n = p.n
    matrix = builder(p)
    scale = float(np.max(np.abs(matrix))) or 1.0
    env = p.env()
    residuals = {"support": 0.0, "diagonal": 0.0, "z_law": 0.0, "a_law": 0.0}
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            if c.above(j, k):
                residuals["support"] = max(residuals["support"], abs(matrix[j - 1, k - 1]) / scale)
        expected = repelling_theta_product(j, n, c).evaluate(env, p.ctx)
        residuals["diagonal"] = max(residuals["diagonal"], _relative(matrix[j - 1, j - 1], expected))

    shifted = builder(p.with_z(p.z.shift_q(p.ctx)))
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            expected = z_quasiperiodicity_factor(j, k, p) * matrix[j - 1, k - 1]
            residuals["z_law"] = max(residuals["z_law"], abs(shifted[j - 1, k - 1] - expected) / scale)

    for m in range(1, n + 1):
        shifted_p = _shifted_a(p, m)
        shifted = builder(shifted_p)
        prediction = a_law_predictions(p, c, m)
        local = float(np.max(np.abs(shifted))) or 1.0
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                expected = prediction[j - 1, k - 1] * matrix[j - 1, k - 1]
                residuals["a_law"] = max(residuals["a_law"], abs(shifted[j - 1, k - 1] - expected) / local)
    return residuals


def quasiperiodicity_residuals(p: EnvelopeParams, c: Optional[Chamber] = None) -> Dict[str, float]:
    """Return relative residuals of the z- and a-laws over all nonzero entries."""
    c = _chamber(p, c)
    base = label_matrix(p, c)
    z_shift = label_matrix(p.with_z(p.z.shift_q(p.ctx)), c)
    env = p.env()
    worst_z = 0.0
    worst_a = 0.0
    for j in range(1, p.n + 1):
        for k in range(1, p.n + 1):
            if base[j - 1, k - 1] == 0:
                continue
            expected = z_quasiperiodicity_factor(j, k, p) * base[j - 1, k - 1]
            worst_z = max(worst_z, _relative(z_shift[j - 1, k - 1], expected))
            symbolic = restriction_product(j, k, p.n, c).automorphy("z").value(env, p.ctx)
            worst_z = max(worst_z, _relative(symbolic, z_quasiperiodicity_factor(j, k, p)))
    for m in range(1, p.n + 1):
        shifted = label_matrix(_shifted_a(p, m), c)
        prediction = a_law_predictions(p, c, m)
        for j in range(1, p.n + 1):
            for k in range(1, p.n + 1):
                if base[j - 1, k - 1] == 0:
                    continue
                worst_a = max(worst_a, _relative(shifted[j - 1, k - 1], prediction[j - 1, k - 1] * base[j - 1, k - 1]))
    return {"z_law": worst_z, "a_law": worst_a}


def _contiguous_block(order: Sequence[int], inner: Sequence[int]) -> Tuple[int, int]:
    positions = sorted(order.index(label) for label in inner)
    if positions != list(range(positions[0], positions[0] + len(positions))):
        raise ValueError(f"labels {list(inner)} are not contiguous in the chamber order {list(order)}")
    return positions[0], positions[-1] + 1


def triangle_composite(
    p: EnvelopeParams, inner: Sequence[int], c: Optional[Chamber] = None
) -> Tuple[np.ndarray, List[List[int]]]:
    """Return M_C * M_inner^{-1} in chamber order and the components of the coarser fixed locus.

    The inner factor is the envelope of T*P(W') on the block W' with its Kahler
    parameter shifted by hbar^{-b}, b = number of labels below the block.
    """
    c = _chamber(p, c)
    order = list(c.effective_order)
    start, stop = _contiguous_block(order, inner)
    block = order[start:stop]
    below = len(order) - stop
    inner_params = p.restrict(block).with_z(MultPoint(p.z.u - below * p.hbar.u))
    inner_matrix = restriction_matrix_tpn(inner_params, Chamber.standard(len(block))).entries
    embedded = np.eye(p.n, dtype=complex)
    embedded[start:stop, start:stop] = inner_matrix
    outer = restriction_matrix_tpn(p, c).entries
    composite = np.linalg.solve(embedded.T, outer.T).T
    components = [[label] for label in order[:start]] + [block] + [[label] for label in order[stop:]]
    logger.debug("triangle composite for block %s with hbar shift -%d", block, below)
    return composite, components


def triangle_factorization_check(
    p: EnvelopeParams, inner: Sequence[int], c: Optional[Chamber] = None
) -> List[CheckRecord]:
    """Check the composite against support, normalization and the z-law of the coarser envelope."""
    c = _chamber(p, c)
    order = list(c.effective_order)
    composite, components = triangle_composite(p, inner, c)
    component_of = {label: index for index, comp in enumerate(components) for label in comp}
    position = {label: index for index, label in enumerate(order)}
    scale = float(np.max(np.abs(composite))) or 1.0
    env = p.env()

    support = 0.0
    diagonal = 0.0
    for r in order:
        for col in order:
            value = composite[position[r], position[col]]
            if component_of[r] < component_of[col]:
                support = max(support, abs(value) / scale)
            elif component_of[r] == component_of[col]:
                if r != col:
                    diagonal = max(diagonal, abs(value) / scale)
                    continue
                factors = []
                for i in order:
                    if component_of[i] == component_of[r]:
                        continue
                    factors.append(A(i) / A(r) if c.above(i, r) else H * A(i) / A(r))
                expected = ThetaProduct(factors).evaluate(env, p.ctx)
                diagonal = max(diagonal, _relative(value, expected))

    shifted, _ = triangle_composite(p.with_z(p.z.shift_q(p.ctx)), inner, c)
    weights = np.array([p.a[label - 1].value for label in order])
    predicted = (weights[:, None] / weights[None, :]) * composite
    z_law = float(np.max(np.abs(shifted - predicted))) / scale

    digest = p.digest()
    tag = f"triangle/n{p.n}/W{''.join(str(i) for i in sorted(inner))}"
    return [
        CheckRecord.evaluate(f"{tag}/support", support, TRIANGLE_TOL, digest),
        CheckRecord.evaluate(f"{tag}/diagonal", diagonal, TRIANGLE_TOL, digest),
        CheckRecord.evaluate(f"{tag}/z_law", z_law, TRIANGLE_TOL, digest),
    ]


def tangent_theta(i: int, p: EnvelopeParams) -> complex:
    """Return Theta(T_{F_i}) = prod over all tangent weights at F_i."""
    factors = [weight for weight, _ in tangent_weights(i, p.n)]
    return ThetaProduct(factors).evaluate(p.env(), p.ctx)


def dual_kahler(p: EnvelopeParams, z: Optional[MultPoint] = None) -> MultPoint:
    """Return hbar^n / z, the Kahler argument of the dual envelope."""
    z = z or p.z
    return MultPoint(p.n * p.hbar.u - z.u)


def duality_pairing(p: EnvelopeParams) -> np.ndarray:
    """Return sum_F Stab_{-C}(hbar^n/z)[F][i] Stab_C(z)[F][j] / Theta(T_F), labels 1..n."""
    standard = Chamber.standard(p.n)
    dual = label_matrix(p.with_z(dual_kahler(p)), standard.opposite())
    direct = label_matrix(p, standard)
    thetas = np.array([tangent_theta(i, p) for i in range(1, p.n + 1)])
    return dual.T @ (direct / thetas[:, None])


def duality_check(p: EnvelopeParams) -> CheckRecord:
    pairing = duality_pairing(p)
    expected = (-1) ** (p.n - 1) * np.eye(p.n)
    residual = float(np.max(np.abs(pairing - expected)))
    return CheckRecord.evaluate(f"duality/n{p.n}", residual, TRIANGLE_TOL, p.digest())


def chern_root(j: int, h: HypertoricData) -> Monomial:
    """Return M_j = prod_i s_i^{W_ij} * a_j."""
    exps = {f"s{i + 1}": h.weight_matrix[i][j - 1] for i in range(h.rank)}
    return Monomial(exps) * A(j)


def hypertoric_product(F: HypertoricFixedPoint, h: HypertoricData) -> ThetaProduct:
    numerator: List[Monomial] = []
    denominator: List[Monomial] = []
    for factor in F.m0:
        kahler = gen(f"z{factor.kahler}") * H**factor.hbar_shift
        numerator.append(chern_root(factor.coordinate, h) * kahler)
        denominator.append(kahler)
    for factor in F.m1:
        root = chern_root(factor.coordinate, h)
        numerator.append(H * root if factor.dual else root)
    return ThetaProduct(numerator, denominator)


def _hypertoric_env(h: HypertoricData, p: EnvelopeParams) -> Dict[str, complex]:
    if p.n != h.coordinates:
        raise ValueError(f"expected {h.coordinates} equivariant parameters, got {p.n}")
    env = p.env()
    for i, point in enumerate(h.kahler, start=1):
        env[f"z{i}"] = point.u
    return env


def stab_hypertoric(
    F: HypertoricFixedPoint, s: Sequence[MultPoint], h: HypertoricData, p: EnvelopeParams
) -> complex:
    env = _hypertoric_env(h, p)
    for i, point in enumerate(s, start=1):
        env[f"s{i}"] = point.u
    return hypertoric_product(F, h).evaluate(env, p.ctx)


def fixed_point_substitution(G: HypertoricFixedPoint, h: HypertoricData) -> Dict[str, Monomial]:
    """Return s_i as monomials in a, solved from M_j = 1 on the M0 coordinates of G."""
    columns = [factor.coordinate for factor in G.m0]
    block = np.array([[h.weight_matrix[i][j - 1] for j in columns] for i in range(h.rank)], dtype=float)
    inverse = np.rint(np.linalg.inv(block.T)).astype(int)
    substitution = {}
    for i in range(h.rank):
        substitution[f"s{i + 1}"] = Monomial({f"a{columns[t]}": -int(inverse[i, t]) for t in range(h.rank)})
    return substitution


def fixed_point_s(G: HypertoricFixedPoint, h: HypertoricData, p: EnvelopeParams) -> List[MultPoint]:
    env = p.env()
    return [monomial.point(env) for monomial in fixed_point_substitution(G, h).values()]


def restriction_matrix_hypertoric(h: HypertoricData, p: EnvelopeParams) -> RestrictionMatrix:
    env = _hypertoric_env(h, p)
    size = len(h.fixed_points)
    entries = np.zeros((size, size), dtype=complex)
    for row, G in enumerate(h.fixed_points):
        substitution = fixed_point_substitution(G, h)
        for col, F in enumerate(h.fixed_points):
            product = hypertoric_product(F, h)
            for name, monomial in substitution.items():
                product = product.substitute(name, monomial)
            entries[row, col] = product.evaluate(env, p.ctx)
    return RestrictionMatrix(entries=entries, basis=[F.label for F in h.fixed_points], params=p.to_dict())


def tpn_hypertoric(n: int, z: MultPoint) -> HypertoricData:
    """Return T*P^{n-1} as hypertoric data: one C* acting with weight 1 on n coordinates."""
    points = []
    for k in range(1, n + 1):
        m0 = (KahlerFactor(coordinate=k, kahler=1, hbar_shift=k - n),)
        m1 = tuple(RepellingFactor(coordinate=i, dual=i > k) for i in range(1, n + 1) if i != k)
        points.append(HypertoricFixedPoint(label=f"F{k}", m0=m0, m1=m1))
    return HypertoricData(weight_matrix=((1,) * n,), fixed_points=tuple(points), kahler=(z,))


def product_hypertoric(first: HypertoricData, second: HypertoricData) -> HypertoricData:
    """Return the data of the product variety, coordinates and Kahler indices of `second` offset."""
    cols, rank = first.coordinates, first.rank
    matrix = [list(row) + [0] * second.coordinates for row in first.weight_matrix]
    matrix += [[0] * cols + list(row) for row in second.weight_matrix]
    points = []
    for F in first.fixed_points:
        for G in second.fixed_points:
            m0 = F.m0 + tuple(
                KahlerFactor(factor.coordinate + cols, factor.kahler + rank, factor.hbar_shift) for factor in G.m0
            )
            m1 = F.m1 + tuple(RepellingFactor(factor.coordinate + cols, factor.dual) for factor in G.m1)
            points.append(HypertoricFixedPoint(label=f"{F.label}x{G.label}", m0=m0, m1=m1))
    return HypertoricData(
        weight_matrix=tuple(tuple(row) for row in matrix),
        fixed_points=tuple(points),
        kahler=first.kahler + second.kahler,
    )

"""
Seeded instance generators: random elements and maps, invertible atlases,
idempotent (nilpotent-collapsing) atlases and a few fixed small instances.

Random invertible maps are built as composites of elementary maps whose
inverses are known in closed form, so no inverse is ever searched for.
"""
from __future__ import annotations

import logging
import random
from fractions import Fraction
from typing import List, Optional, Tuple

from algebra.grassmann import GrassmannElement, Parity, popcount
from algebra.linear import MapEquation, solve_map_ansatz
from algebra.superpoly import SuperDomainSignature, SuperPolynomial
from algebra.supermap import SuperMap, chain, compose
from geometry.semiatlas import SemiAtlas

__all__ = [
    "random_element",
    "random_polynomial",
    "random_map",
    "random_invertible",
    "coordinate_projector",
    "invertible_atlas",
    "idempotent_atlas",
    "solver_idempotent_atlas",
    "two_chart_nilpotent",
    "no_cancellation_witness",
    "chart_names",
]

logger = logging.getLogger(__name__)

_COEFFS = (-3, -2, -1, 1, 2, 3)


def chart_names(count: int) -> Tuple[str, ...]:
    return tuple(f"U{i}" for i in range(1, count + 1))


def random_element(
    rng: random.Random, n_generators: int, parity: Optional[Parity] = None, density: float = 0.3
) -> GrassmannElement:
    terms = {}
    for mask in range(1 << n_generators):
        if parity is Parity.even and popcount(mask) & 1:
            continue
        if parity is Parity.odd and not popcount(mask) & 1:
            continue
        if rng.random() < density:
            terms[mask] = rng.choice(_COEFFS)
    return GrassmannElement(n_generators, terms)


def random_polynomial(
    rng: random.Random,
    signature: SuperDomainSignature,
    n_generators: int,
    parity: Parity,
    degree: int = 1,
    n_terms: int = 3,
) -> SuperPolynomial:
    """A few random terms of the requested parity and even degree ``<= degree``."""
    want = 0 if parity is Parity.even else 1
    terms = {}
    for _ in range(n_terms * 4):
        if len(terms) >= n_terms:
            break
        exps = [0] * signature.n_even
        for _ in range(rng.randint(0, degree)):
            if signature.n_even:
                exps[rng.randrange(signature.n_even)] += 1
        omask = rng.randrange(1 << signature.n_odd)
        gmask = rng.randrange(1 << n_generators)
        if (popcount(gmask) + popcount(omask)) & 1 != want:
            gmask ^= 1 << rng.randrange(n_generators)
        terms[(gmask, tuple(exps), omask)] = rng.choice(_COEFFS)
    return SuperPolynomial(signature, n_generators, terms)


def random_map(
    rng: random.Random,
    source: SuperDomainSignature,
    target: SuperDomainSignature,
    n_generators: int,
    degree: int = 1,
) -> SuperMap:
    comps = [
        random_polynomial(rng, source, n_generators, target.coordinate_parity(p), degree)
        for p in range(target.dimension)
    ]
    return SuperMap(source, target, comps, n_generators)


# ---------- elementary invertible maps --------------------------------

def _replace(identity: SuperMap, position: int, component: SuperPolynomial) -> SuperMap:
    comps = list(identity.components)
    comps[position] = component
    return SuperMap(identity.source, identity.target, comps, identity.n_generators)


def _elementary(rng: random.Random, signature: SuperDomainSignature, n: int) -> Tuple[SuperMap, SuperMap]:
    """One elementary map and its inverse."""
    identity = SuperMap.identity(signature, n)
    pos = rng.randrange(signature.dimension)
    coord = identity.components[pos]
    odd = pos >= signature.n_even
    kind = rng.choice(("scale", "shear", "shear", "soul"))

    if kind == "scale":
        c = Fraction(rng.choice((-2, -1, 2, 3)), rng.choice((1, 2)))
        return _replace(identity, pos, coord.scale(c)), _replace(identity, pos, coord.scale(1 / c))

    if kind == "soul" and n >= 2:
        soul = random_element(rng, n, Parity.even, 0.5).soul()
        unit = GrassmannElement.scalar(n, 1) + soul
        fwd = SuperPolynomial.constant(signature, n, unit) * coord
        back = SuperPolynomial.constant(signature, n, unit.invert()) * coord
        return _replace(identity, pos, fwd), _replace(identity, pos, back)

    # shear: add a term that does not involve the sheared coordinate
    others = [p for p in range(signature.dimension) if p != pos]
    pieces: List[SuperPolynomial] = []
    gens = [GrassmannElement.generator(n, i) for i in range(1, n + 1)]
    even_others = [p for p in others if p < signature.n_even]
    odd_others = [p for p in others if p >= signature.n_even]
    c = rng.choice(_COEFFS)
    if not odd:
        if even_others and rng.random() < 0.7:
            pieces.append(identity.components[rng.choice(even_others)].scale(c))
        elif len(odd_others) >= 2 and rng.random() < 0.5:
            a, b = rng.sample(odd_others, 2)
            pieces.append((identity.components[a] * identity.components[b]).scale(c))
        elif n >= 2:
            i, j = rng.sample(range(n), 2)
            pieces.append(SuperPolynomial.constant(signature, n, gens[i] * gens[j]).scale(c))
    else:
        if odd_others and even_others and rng.random() < 0.5:
            pieces.append(
                (identity.components[rng.choice(even_others)] * identity.components[rng.choice(odd_others)]).scale(c)
            )
        elif even_others and rng.random() < 0.5:
            g = SuperPolynomial.constant(signature, n, rng.choice(gens))
            pieces.append((g * identity.components[rng.choice(even_others)]).scale(c))
        else:
            pieces.append(SuperPolynomial.constant(signature, n, rng.choice(gens)).scale(c))
    if not pieces:
        return identity, identity
    shift = pieces[0]
    return _replace(identity, pos, coord + shift), _replace(identity, pos, coord - shift)


def random_invertible(
    rng: random.Random, signature: SuperDomainSignature, n_generators: int, steps: int = 3
) -> Tuple[SuperMap, SuperMap]:
    """A random invertible endomap together with its inverse."""
    forward: List[SuperMap] = []
    backward: List[SuperMap] = []
    for _ in range(steps):
        f, b = _elementary(rng, signature, n_generators)
        forward.append(f)
        backward.append(b)
    return chain(forward), chain(list(reversed(backward)))


def coordinate_projector(signature: SuperDomainSignature, n_generators: int) -> SuperMap:
    """Idempotent ``P`` killing the odd coordinates, or the last even one when there are none."""
    identity = SuperMap.identity(signature, n_generators)
    zero = SuperPolynomial.zero(signature, n_generators)
    if signature.n_odd:
        keep = signature.n_even
    else:
        keep = signature.n_even - 1
    comps = [c if p < keep else zero for p, c in enumerate(identity.components)]
    return SuperMap(signature, signature, comps, n_generators)


# ---------- atlases ---------------------------------------------------

def invertible_atlas(
    rng: random.Random, signature: SuperDomainSignature, n_generators: int, n_charts: int, steps: int = 2
) -> SemiAtlas:
    """``φ_a`` invertible, ``Φ_ab = φ_a∘φ_b⁻¹`` and ``Φ_aa = id``; every relation holds."""
    charts = chart_names(n_charts)
    psis = {c: random_invertible(rng, signature, n_generators, steps) for c in charts}
    transitions = {}
    for a in charts:
        for b in charts:
            if a == b:
                transitions[(a, b)] = SuperMap.identity(signature, n_generators)
            else:
                transitions[(a, b)] = compose(psis[a][0], psis[b][1])
    return SemiAtlas(
        signature=signature,
        n_generators=n_generators,
        chart_ids=charts,
        coordinate_maps={c: psis[c][0] for c in charts},
        transitions=transitions,
        overlaps=(charts,),
    )


def idempotent_atlas(
    rng: random.Random,
    signature: SuperDomainSignature,
    n_generators: int,
    n_charts: int,
    projector: Optional[SuperMap] = None,
    steps: int = 2,
) -> SemiAtlas:
    """
    ``Φ_ab = ψ_a∘P∘ψ_b⁻¹`` and ``φ_a = ψ_a∘P∘χ`` for an idempotent ``P``:
    nice, every sandwich relation holds, and no tower identity is the identity.
    """
    charts = chart_names(n_charts)
    p = projector if projector is not None else coordinate_projector(signature, n_generators)
    chi, _ = random_invertible(rng, signature, n_generators, steps)
    psis = {c: random_invertible(rng, signature, n_generators, steps) for c in charts}
    transitions = {(a, b): chain([psis[a][0], p, psis[b][1]]) for a in charts for b in charts}
    return SemiAtlas(
        signature=signature,
        n_generators=n_generators,
        chart_ids=charts,
        coordinate_maps={c: chain([psis[c][0], p, chi]) for c in charts},
        transitions=transitions,
        overlaps=(charts,),
        declared_semi=charts,
    )


def solver_idempotent_atlas(
    rng: random.Random,
    signature: SuperDomainSignature,
    n_generators: int,
    n_charts: int,
    degree_bound: int = 2,
) -> SemiAtlas:
    """Like ``idempotent_atlas`` with ``ψ`` of even degree one, but each ``Φ_ab`` solved from ``X∘ψ_b = ψ_a∘P``."""
    charts = chart_names(n_charts)
    p = coordinate_projector(signature, n_generators)
    psis = {}
    for c in charts:
        psi, _ = random_invertible(rng, signature, n_generators, steps=2)
        while psi.degree() > 1:
            psi, _ = random_invertible(rng, signature, n_generators, steps=2)
        psis[c] = psi
    transitions = {}
    for a in charts:
        for b in charts:
            eq = MapEquation.composition(rhs=compose(psis[a], p), inner=psis[b])
            transitions[(a, b)] = solve_map_ansatz(eq, degree_bound).particular
    logger.debug("solved %d transitions", len(transitions))
    return SemiAtlas(
        signature=signature,
        n_generators=n_generators,
        chart_ids=charts,
        transitions=transitions,
        overlaps=(charts,),
        declared_semi=charts,
    )


def two_chart_nilpotent(n_generators: int = 2) -> SemiAtlas:
    """On ``R^{1|1}``: ``Φ_AB(x, t) = (x, 0)`` and ``Φ_BA = id``."""
    sig = SuperDomainSignature(n_even=1, n_odd=1)
    identity = SuperMap.identity(sig, n_generators)
    x = SuperPolynomial.even_variable(sig, n_generators, 1)
    collapse = SuperMap(sig, sig, [x, SuperPolynomial.zero(sig, n_generators)], n_generators)
    return SemiAtlas(
        signature=sig,
        n_generators=n_generators,
        chart_ids=("A", "B"),
        transitions={("A", "B"): collapse, ("B", "A"): identity},
        overlaps=(("A", "B"),),
    )


def no_cancellation_witness(n_generators: int = 3) -> Tuple[SuperMap, SuperMap, SuperMap]:
    """``(A, X, Y)`` on ``R^{1|1}`` with ``X∘A = Y∘A`` although ``X != Y``."""
    if n_generators < 3:
        raise ValueError("the witness needs at least three generators")
    sig = SuperDomainSignature(n_even=1, n_odd=1)
    n = n_generators
    x = SuperPolynomial.even_variable(sig, n, 1)
    t = SuperPolynomial.odd_variable(sig, n, 1)
    g12 = SuperPolynomial.constant(sig, n, GrassmannElement.monomial(n, (1, 2)))
    g13 = SuperPolynomial.constant(sig, n, GrassmannElement.monomial(n, (1, 3)))
    a = SuperMap(sig, sig, [x, g12 * t], n)
    y = SuperMap(sig, sig, [x, t + g13 * t], n)
    return a, SuperMap.identity(sig, n), y

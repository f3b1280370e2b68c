"""
Semi-bundles ``(E, M, F, π)``: the total space ``E`` and the fiber ``F``
are coordinate superdomains, the base ``M`` is a semi-atlas, and bundle
transitions ``Λ_ab`` are endomaps of ``base ⊕ fiber``.

Coordinates of ``base ⊕ fiber`` are ordered base evens, fiber evens, base
odds, fiber odds (see ``SuperDomainSignature.direct_sum``).
"""
from __future__ import annotations

import logging
from itertools import combinations, permutations
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from algebra.errors import MissingMap, NotBasePreserving, NotInvertible, SignatureMismatch
from algebra.linear import find_inverse
from algebra.superpoly import SuperDomainSignature, SuperPolynomial
from algebra.supermap import SuperMap, chain, compose
from geometry.reports import RelationReport, Verdict, compare_maps
from geometry.semiatlas import (
    Cycle,
    SemiAtlas,
    check_reflexivity,
    check_tower_relations,
    forward_cycles,
    guarded,
    reverse_cycle,
    rotation,
    sandwich_report,
)

__all__ = [
    "SemiBundle",
    "AgreementPattern",
    "AGREEMENT_EQUATIONS",
    "canonical_projection",
    "graph_section",
    "check_semi_section",
    "check_local_trivialization",
    "check_section_compatibility",
    "check_bundle_transitions",
    "fiber_action",
    "check_bundle_morphism",
    "transport_transitions",
    "mixed_cycles",
    "agreement_patterns",
    "check_cover_agreement",
]

logger = logging.getLogger(__name__)


def _base_positions(base: SuperDomainSignature, fiber: SuperDomainSignature) -> List[int]:
    total = base.direct_sum(fiber)
    return list(range(base.n_even)) + [total.n_even + j for j in range(base.n_odd)]


def _fiber_positions(base: SuperDomainSignature, fiber: SuperDomainSignature) -> List[int]:
    total = base.direct_sum(fiber)
    return [base.n_even + i for i in range(fiber.n_even)] + [
        total.n_even + base.n_odd + j for j in range(fiber.n_odd)
    ]


def canonical_projection(base: SuperDomainSignature, fiber: SuperDomainSignature, n_generators: int) -> SuperMap:
    """``(b, f) -> b`` on ``base ⊕ fiber``."""
    total = base.direct_sum(fiber)
    comps = [SuperPolynomial.coordinate(total, n_generators, p) for p in _base_positions(base, fiber)]
    return SuperMap(total, base, comps, n_generators)


def graph_section(
    base: SuperDomainSignature, fiber: SuperDomainSignature, fiber_components: Sequence[SuperPolynomial], n_generators: int
) -> SuperMap:
    """``b -> (b, η(b))`` with ``η`` given by one polynomial over the base per fiber coordinate."""
    fiber_components = list(fiber_components)
    if len(fiber_components) != fiber.dimension:
        raise SignatureMismatch(f"{fiber} needs {fiber.dimension} components")
    coords = [SuperPolynomial.coordinate(base, n_generators, p) for p in range(base.dimension)]
    evens = coords[: base.n_even] + fiber_components[: fiber.n_even]
    odds = coords[base.n_even:] + fiber_components[fiber.n_even:]
    return SuperMap(base, base.direct_sum(fiber), evens + odds, n_generators)


class SemiBundle(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    total: SuperDomainSignature
    base: SemiAtlas
    fiber: SuperDomainSignature
    projection: SuperMap
    sections: Dict[str, SuperMap] = {}
    trivializations: Dict[str, SuperMap] = {}
    bundle_transitions: Dict[Tuple[str, str], SuperMap] = {}

    @property
    def product(self) -> SuperDomainSignature:
        return self.base.signature.direct_sum(self.fiber)

    @property
    def n_generators(self) -> int:
        return self.base.n_generators

    @model_validator(mode="after")
    def _check_shapes(self) -> "SemiBundle":
        base_sig = self.base.signature
        if self.projection.source != self.total or self.projection.target != base_sig:
            raise ValueError(f"projection must map {self.total} to {base_sig}")
        known = set(self.base.chart_ids)
        for name, s in self.sections.items():
            if name not in known:
                raise ValueError(f"section on unknown chart {name}")
            if s.source != base_sig or s.target != self.total:
                raise ValueError(f"section {name} must map {base_sig} to {self.total}")
        for name, lam in self.trivializations.items():
            if name not in known:
                raise ValueError(f"trivialization on unknown chart {name}")
            if lam.source != self.total or lam.target != self.product:
                raise ValueError(f"trivialization {name} must map {self.total} to {self.product}")
        for (a, b), lam in self.bundle_transitions.items():
            if a not in known or b not in known:
                raise ValueError(f"bundle transition {a},{b} names unknown charts")
            if lam.source != self.product or lam.target != self.product:
                raise ValueError(f"bundle transition {a},{b} is not an endomap of {self.product}")
            if a != b and not self.base.overlapping((a, b)):
                raise ValueError(f"bundle transition {a},{b} given but the charts do not overlap")
        return self

    def transition_atlas(self) -> SemiAtlas:
        """The ``Λ`` table as a semi-atlas on ``base ⊕ fiber`` with the trivializations as coordinate maps."""
        return SemiAtlas(
            signature=self.product,
            n_generators=self.n_generators,
            chart_ids=self.base.chart_ids,
            coordinate_maps=dict(self.trivializations),
            transitions=dict(self.bundle_transitions),
            overlaps=self.base.overlaps,
        )

    def section(self, chart: str) -> SuperMap:
        try:
            return self.sections[chart]
        except KeyError:
            raise MissingMap("section", (chart,)) from None

    def trivialization(self, chart: str) -> SuperMap:
        try:
            return self.trivializations[chart]
        except KeyError:
            raise MissingMap("trivialization", (chart,)) from None


# ---------- sections / trivializations --------------------------------

def check_semi_section(projection: SuperMap, section: SuperMap, reflexive: bool = False) -> List[RelationReport]:
    """``π∘s∘π = π`` and, when ``reflexive``, ``s∘π∘s = s``."""
    if section.target != projection.source or section.source != projection.target:
        raise SignatureMismatch(
            f"section {section.source}->{section.target} does not fit projection {projection.source}->{projection.target}"
        )
    reports = [compare_maps("semi-section", (), chain([projection, section, projection]), projection)]
    if reflexive:
        reports.append(compare_maps("reflexive-semi-section", (), chain([section, projection, section]), section))
    else:
        reports.append(
            RelationReport(
                relation="reflexive-semi-section", cycle=(), verdict=Verdict.skip, detail="reflexivity not requested"
            )
        )
    return reports


def check_local_trivialization(bundle: SemiBundle, chart: str) -> RelationReport:
    """``pr∘λ_a = π`` with ``pr`` the canonical projection to the base."""
    lam = bundle.trivialization(chart)
    pr = canonical_projection(bundle.base.signature, bundle.fiber, bundle.n_generators)
    return compare_maps("local-trivialization", (chart,), compose(pr, lam), bundle.projection)


def check_section_compatibility(bundle: SemiBundle) -> List[RelationReport]:
    """``λ_a∘s_a = λ_b∘s_b`` per overlapping pair."""

    def compatible(a: str, b: str) -> RelationReport:
        lhs = compose(bundle.trivialization(a), bundle.section(a))
        rhs = compose(bundle.trivialization(b), bundle.section(b))
        return compare_maps("section-compatibility", (a, b), lhs, rhs)

    return [
        guarded("section-compatibility", (a, b), lambda a=a, b=b: compatible(a, b))
        for a, b in forward_cycles(bundle.base, 2)
    ]


def check_bundle_transitions(bundle: SemiBundle, n_max: int, reflexive: bool = True) -> List[RelationReport]:
    """Gluing ``Λ_ab∘λ_b = λ_a`` followed by the tower (and reflexivity) relations of the ``Λ`` table."""
    atlas = bundle.transition_atlas()
    reports: List[RelationReport] = []
    for (a, b), lam in bundle.bundle_transitions.items():
        if a == b:
            continue
        reports.append(
            guarded(
                "bundle-gluing",
                (a, b),
                lambda a=a, b=b, lam=lam: compare_maps(
                    "bundle-gluing", (a, b), compose(lam, atlas.coordinate_map(b)), atlas.coordinate_map(a)
                ),
            )
        )
    reports.sort(key=lambda r: tuple(atlas.index(c) for c in r.cycle))
    reports.extend(check_tower_relations(atlas, n_max))
    if reflexive:
        reports.extend(check_reflexivity(atlas, n_max))
    return reports


def fiber_action(
    transition: SuperMap, base: SuperDomainSignature, fiber: SuperDomainSignature
) -> SuperMap:
    """
    The fiber block ``L`` of a base-preserving ``Λ(b, f) = (b, L(b, f))``.
    ``L`` keeps the full ``base ⊕ fiber`` source so base coordinates act as parameters.
    """
    total = base.direct_sum(fiber)
    if transition.source != total or transition.target != total:
        raise SignatureMismatch(f"fiber action needs an endomap of {total}")
    n = transition.n_generators
    for p in _base_positions(base, fiber):
        if transition.components[p] != SuperPolynomial.coordinate(total, n, p):
            name = total.coordinate_names()[p]
            raise NotBasePreserving(f"{name}' = {transition.components[p].render()} moves the base")
    comps = [transition.components[p] for p in _fiber_positions(base, fiber)]
    return SuperMap(total, fiber, comps, n)


# ---------- morphisms -------------------------------------------------

def _lookup(table: Mapping, key, role: str) -> SuperMap:
    try:
        return table[key]
    except KeyError:
        raise MissingMap(role, key if isinstance(key, tuple) else (key,)) from None


def check_bundle_morphism(
    src: SemiBundle,
    dst: SemiBundle,
    f_total: SuperMap,
    f_base: SuperMap,
    h_table: Mapping[str, SuperMap],
    chart_map: Optional[Mapping[str, str]] = None,
) -> List[RelationReport]:
    """
    Projection square ``f_M∘π = π'∘f_E``, the trivialization squares
    ``λ'_a'∘f_E = h_a∘λ_a`` and the transition relations
    ``h_a∘Λ_ab = Λ'_a'b'∘h_b``; every one compared as written, never by inverting ``h``.
    """
    chart_map = dict(chart_map) if chart_map is not None else {c: c for c in src.base.chart_ids}
    reports = [
        compare_maps(
            "morphism-projection", (), compose(f_base, src.projection), compose(dst.projection, f_total)
        )
    ]
    for a in src.base.chart_ids:
        if a not in h_table:
            continue
        h = h_table[a]
        lhs = compose(dst.trivialization(_lookup(chart_map, a, "chart")), f_total)
        reports.append(compare_maps("morphism-trivialization", (a,), lhs, compose(h, src.trivialization(a))))
    for (a, b), lam in src.bundle_transitions.items():
        if a == b:
            continue
        target_pair = (_lookup(chart_map, a, "chart"), _lookup(chart_map, b, "chart"))
        lhs = compose(_lookup(h_table, a, "h"), lam)
        rhs = compose(_lookup(dst.bundle_transitions, target_pair, "bundle_transition"), _lookup(h_table, b, "h"))
        reports.append(compare_maps("morphism-transition", (a, b), lhs, rhs))
    return reports


def transport_transitions(
    bundle: SemiBundle,
    h_table: Mapping[str, SuperMap],
    chart_map: Optional[Mapping[str, str]] = None,
    degree_bound: Optional[int] = None,
) -> Dict[Tuple[str, str], SuperMap]:
    """``Λ'_a'b' = h_a∘Λ_ab∘h_b⁻¹``; only available when every ``h`` has a polynomial inverse."""
    chart_map = dict(chart_map) if chart_map is not None else {c: c for c in bundle.base.chart_ids}
    inverses: Dict[str, SuperMap] = {}
    out: Dict[Tuple[str, str], SuperMap] = {}
    for (a, b), lam in bundle.bundle_transitions.items():
        h_b = _lookup(h_table, b, "h")
        if b not in inverses:
            inv = find_inverse(h_b, degree_bound)
            if inv is None:
                raise NotInvertible(f"h for chart {b} has no polynomial inverse")
            inverses[b] = inv
        key = (_lookup(chart_map, a, "chart"), _lookup(chart_map, b, "chart"))
        out[key] = chain([_lookup(h_table, a, "h"), lam, inverses[b]])
    return out


# ---------- agreement of two covers -----------------------------------

class AgreementPattern(BaseModel):
    """One agreement relation written on letters; a trailing ``'`` marks a chart of the second cover."""

    model_config = ConfigDict(frozen=True)

    orientation: str
    cycle: Tuple[str, ...]


def _pattern(orientation: str, letters: str) -> AgreementPattern:
    return AgreementPattern(orientation=orientation, cycle=tuple(letters.split()))


# Reflexive pair relations coincide with the pair agreement ones and are not listed twice.
AGREEMENT_EQUATIONS: Tuple[AgreementPattern, ...] = tuple(
    [_pattern("agreement", c) for c in (
        "a' b", "a b'",
        "a' b c", "b c a'", "c a' b",
        "a' b' c", "b' c a'", "c a' b'",
        "a' b c r", "b c r a'", "c r a' b", "r a' b c",
        "a' b' c r", "b' c r a'", "c r a' b'", "r a' b' c",
        "a' b' c' r", "b' c' r a'", "c' r a' b'", "r a' b' c'",
    )]
    + [_pattern("reflexive-agreement", c) for c in (
        "a' c b", "c b a'", "b a' c",
        "a' c b'", "c b' a'", "b' a' c",
        "a' r c b", "r c b a'", "c b a' r", "b a' r c",
        "a' r c b'", "r c b' a'", "c b' a' r", "b' a' r c",
        "a' r c' b'", "r c' b' a'", "c' b' a' r", "b' a' r c'",
    )]
)

_LETTERS = "abcr"


def _orientation(cycle: Cycle, primed: Callable[[str], bool], index: Callable[[str], int]) -> str:
    """Orientation of a mixed cycle rotated to start at its primed block."""
    k = len(cycle)
    if k == 2:
        return "agreement"
    block = [c for c in cycle if primed(c)]
    if len(block) >= 2:
        ahead = index(block[0]) < index(block[-1])
    else:
        ahead = index(cycle[1]) < index(cycle[-1])
    return "agreement" if ahead else "reflexive-agreement"


def _block_start(cycle: Cycle, primed: Callable[[str], bool]) -> int:
    k = len(cycle)
    return next(i for i in range(k) if primed(cycle[i]) and not primed(cycle[i - 1]))


def _letters(cycle: Cycle, orientation: str, primed: Callable[[str], bool]) -> Dict[str, str]:
    if len(cycle) == 2:
        return {c: _LETTERS[i] + ("'" if primed(c) else "") for i, c in enumerate(cycle)}
    fwd = cycle if orientation == "agreement" else reverse_cycle(cycle)
    fwd = rotation(fwd, _block_start(fwd, primed))
    return {c: _LETTERS[i] + ("'" if primed(c) else "") for i, c in enumerate(fwd)}


def mixed_cycles(
    first: Sequence[str],
    second: Sequence[str],
    overlapping: Callable[[Sequence[str]], bool],
    n_max: int = 4,
    reflexive: bool = True,
) -> Iterator[Tuple[str, Cycle, Tuple[str, ...]]]:
    """
    Directed cycles of length 2..4 through both covers whose second-cover
    charts form one contiguous block, every rotation, as
    ``(orientation, rotated cycle, letter pattern)``.
    """
    order = {c: i for i, c in enumerate(list(first) + list(second))}
    second_set = set(second)

    def primed(c: str) -> bool:
        return c in second_set

    for k in range(2, min(n_max, 4) + 1):
        for p in range(1, k):
            for ps in combinations(second, p):
                for us in combinations(first, k - p):
                    if not overlapping(ps + us):
                        continue
                    for perm_p in permutations(ps):
                        for perm_u in permutations(us):
                            cycle = perm_p + perm_u
                            orientation = _orientation(cycle, primed, order.__getitem__)
                            if orientation != "agreement" and not reflexive:
                                continue
                            names = _letters(cycle, orientation, primed)
                            for r in range(k):
                                rotated = rotation(cycle, r)
                                if k == 2:
                                    names = _letters(rotated, orientation, primed)
                                yield orientation, rotated, tuple(names[c] for c in rotated)


def agreement_patterns(reflexive: bool = True) -> List[AgreementPattern]:
    """The letter patterns produced by ``mixed_cycles`` on a cover where everything overlaps."""
    first = ("u1", "u2", "u3")
    second = ("p1", "p2", "p3")
    seen: List[AgreementPattern] = []
    for orientation, _, letters in mixed_cycles(first, second, lambda charts: True, 4, reflexive):
        pattern = AgreementPattern(orientation=orientation, cycle=letters)
        if pattern not in seen:
            seen.append(pattern)
    return seen


def check_cover_agreement(
    bundle: SemiBundle,
    second_cover: SemiAtlas,
    cross: Mapping[Tuple[str, str], SuperMap],
    n_max: int = 4,
    reflexive: bool = True,
) -> List[RelationReport]:
    """
    Agreement of the ``Λ`` table with a second cover's ``Λ'`` table through
    cross maps ``Λ~``, checked as sandwich relations on mixed cycles of the
    union cover. A mixed set of charts overlaps when each cover's part
    overlaps in that cover and every mixed pair carries a cross map.
    """
    first = bundle.base.chart_ids
    second = second_cover.chart_ids
    if set(first) & set(second):
        raise ValueError("the two covers must use distinct chart ids")
    if second_cover.signature != bundle.product or second_cover.n_generators != bundle.n_generators:
        raise SignatureMismatch(f"second cover transitions must be endomaps of {bundle.product}")
    for (x, y) in cross:
        if (x in first) == (y in first) or {x, y} - set(first) - set(second):
            raise ValueError(f"cross map {x},{y} must join one chart of each cover")
    union = SemiAtlas(
        signature=bundle.product,
        n_generators=bundle.n_generators,
        chart_ids=tuple(first) + tuple(second),
        transitions={**bundle.bundle_transitions, **second_cover.transitions, **dict(cross)},
        overlaps=tuple(bundle.base.overlaps) + tuple(second_cover.overlaps) + tuple(cross.keys()),
    )
    second_set = set(second)

    def overlapping(charts: Sequence[str]) -> bool:
        ps = [c for c in charts if c in second_set]
        us = [c for c in charts if c not in second_set]
        if not (bundle.base.overlapping(us) and second_cover.overlapping(ps)):
            return False
        return all((p, u) in cross or (u, p) in cross for p in ps for u in us)

    reports = []
    for orientation, cycle, letters in mixed_cycles(first, second, overlapping, n_max, reflexive):
        detail = "pattern " + " ".join(letters)
        reports.append(
            guarded(
                orientation,
                cycle,
                lambda c=cycle, o=orientation, d=detail: sandwich_report(union, c, o, detail=d),
            )
        )
    logger.debug("cover agreement: %d mixed relations", len(reports))
    return reports

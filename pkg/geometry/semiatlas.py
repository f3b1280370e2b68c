"""
Semi-atlases: charts whose coordinate maps and transition maps may be
noninvertible, glued by sandwich identities instead of cocycle conditions.

Conventions used throughout:

* ``Φ_ab∘Φ_bc`` applies ``Φ_bc`` first, so indices cancel like arrows.
* A cycle ``(c0, c1, ..., c_{k-1})`` closes back at ``c0``; its closed
  composite ``Φ_{c0c1}∘Φ_{c1c2}∘...∘Φ_{c_{k-1}c0}`` is the tower identity at
  ``c0``. The sandwich relation of the cycle is
  ``(closed composite)∘Φ_{c0c1} = Φ_{c0c1}``.
* Cycles are enumerated from the lowest chart index; the forward orientation
  is the one whose second chart precedes its last chart. Tower relations use
  the forward orientation, reflexivity conditions the reversed one. A pair
  has a single cycle; its tower relation is anchored at the lower chart and
  its reflexivity condition at the higher one.
* Overlaps are combinatorial: a set of charts overlaps iff it is contained
  in some declared overlap.
"""
from __future__ import annotations

import logging
from enum import Enum
from itertools import combinations, permutations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from algebra.errors import MissingMap, NotNice
from algebra.linear import MapEquation, SolutionSet, is_chart, solve_map_ansatz
from algebra.superpoly import SuperDomainSignature
from algebra.supermap import SuperMap, chain, compose
from geometry.reports import RelationReport, Verdict, compare_maps, skipped

__all__ = [
    "ChartKind",
    "SemiAtlas",
    "NicenessResult",
    "TowerSemigroup",
    "Cycle",
    "guarded",
    "sandwich_report",
    "rotation",
    "reverse_cycle",
    "forward_cycles",
    "cycles_through",
    "check_gluing",
    "check_n_regular",
    "check_multi_regular",
    "check_tower_relations",
    "check_reflexivity",
    "tower_identity",
    "conjugate_tower_identity",
    "check_tower_identity_laws",
    "check_cocycles",
    "obstructedness_degree",
    "verify_consequence",
    "is_nice",
    "detect_period",
    "tower_semigroup",
    "classify_charts",
    "derive_transition",
]

logger = logging.getLogger(__name__)

Cycle = Tuple[str, ...]


class ChartKind(str, Enum):
    chart = "chart"
    semi_chart = "semi_chart"

    @classmethod
    def _missing_(cls, value: object) -> "ChartKind":
        if not isinstance(value, str):
            raise ValueError(f"Unknown chart kind: {value}")
        val = value.strip().lower()
        synonyms = {"semi": "semi_chart", "semichart": "semi_chart", "semi-chart": "semi_chart", "regular": "chart"}
        if val in synonyms:
            return cls(synonyms[val])
        return super()._missing_(val)


class SemiAtlas(BaseModel):
    """Charts, declared overlaps, optional coordinate maps and a partial transition table."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    signature: SuperDomainSignature
    n_generators: int
    chart_ids: Tuple[str, ...]
    coordinate_maps: Dict[str, SuperMap] = {}
    transitions: Dict[Tuple[str, str], SuperMap] = {}
    overlaps: Tuple[Tuple[str, ...], ...] = ()
    declared_semi: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_tables(self) -> "SemiAtlas":
        if not self.chart_ids or len(set(self.chart_ids)) != len(self.chart_ids):
            raise ValueError("chart ids must be non-empty and distinct")
        known = set(self.chart_ids)
        for group in self.overlaps:
            unknown = set(group) - known
            if unknown:
                raise ValueError(f"overlap names unknown charts {sorted(unknown)}")
        for name in self.declared_semi:
            if name not in known:
                raise ValueError(f"semi flag on unknown chart {name}")
        for name, phi in self.coordinate_maps.items():
            if name not in known:
                raise ValueError(f"coordinate map for unknown chart {name}")
            if phi.target != self.signature or phi.n_generators != self.n_generators:
                raise ValueError(f"coordinate map of {name} does not land in {self.signature}")
        for (a, b), phi in self.transitions.items():
            if a not in known or b not in known:
                raise ValueError(f"transition {a},{b} names unknown charts")
            if phi.source != self.signature or phi.target != self.signature:
                raise ValueError(f"transition {a},{b} is not an endomap of {self.signature}")
            if phi.n_generators != self.n_generators:
                raise ValueError(f"transition {a},{b} lives in Λ({phi.n_generators})")
            if a != b and not self.overlapping((a, b)):
                raise ValueError(f"transition {a},{b} given but the charts are not declared to overlap")
        return self

    def index(self, chart: str) -> int:
        return self.chart_ids.index(chart)

    def overlapping(self, charts: Sequence[str]) -> bool:
        wanted = set(charts)
        if len(wanted) <= 1:
            return True
        return any(wanted <= set(group) for group in self.overlaps)

    def transition(self, a: str, b: str) -> SuperMap:
        try:
            return self.transitions[(a, b)]
        except KeyError:
            raise MissingMap("transition", (a, b)) from None

    def coordinate_map(self, chart: str) -> SuperMap:
        try:
            return self.coordinate_maps[chart]
        except KeyError:
            raise MissingMap("coordinate", (chart,)) from None

    def identity(self) -> SuperMap:
        return SuperMap.identity(self.signature, self.n_generators)


# ---------- cycles ----------------------------------------------------

def rotation(cycle: Sequence[str], r: int) -> Cycle:
    r %= len(cycle)
    return tuple(cycle[r:]) + tuple(cycle[:r])


def reverse_cycle(cycle: Sequence[str]) -> Cycle:
    return (cycle[0],) + tuple(reversed(cycle[1:]))


def forward_cycles(atlas: SemiAtlas, length: int) -> List[Cycle]:
    """One representative per undirected simple cycle of the given length (>= 2)."""
    out: List[Cycle] = []
    for subset in combinations(atlas.chart_ids, length):
        if not atlas.overlapping(subset):
            continue
        first, rest = subset[0], subset[1:]
        for perm in permutations(rest):
            if length == 2 or atlas.index(perm[0]) < atlas.index(perm[-1]):
                out.append((first,) + perm)
    return out


def _anchors(length: int, reflexive: bool) -> Sequence[int]:
    if length == 2:
        return (1,) if reflexive else (0,)
    return range(length)


def _loop(atlas: SemiAtlas, cycle: Sequence[str]) -> List[SuperMap]:
    k = len(cycle)
    return [atlas.transition(cycle[i], cycle[(i + 1) % k]) for i in range(k)]


def _cycle_length(atlas: SemiAtlas, n_max: int) -> int:
    return min(n_max, len(atlas.chart_ids))


def guarded(relation: str, cycle: Sequence[str], check: Callable[[], RelationReport]) -> RelationReport:
    try:
        return check()
    except MissingMap as exc:
        return skipped(relation, cycle, str(exc))


# ---------- gluing / regularity ---------------------------------------

def check_gluing(atlas: SemiAtlas) -> List[RelationReport]:
    """``Φ_ab∘φ_b = φ_a`` for every stored transition between distinct charts."""

    def glue(a: str, b: str) -> RelationReport:
        lhs = compose(atlas.transition(a, b), atlas.coordinate_map(b))
        return compare_maps("gluing", (a, b), lhs, atlas.coordinate_map(a))

    reports = []
    for a in atlas.chart_ids:
        for b in atlas.chart_ids:
            if a == b or (a, b) not in atlas.transitions:
                continue
            reports.append(guarded("gluing", (a, b), lambda a=a, b=b: glue(a, b)))
    return reports


def sandwich_report(
    atlas: SemiAtlas, cycle: Sequence[str], relation: str, multipliers: int = 1, detail: str = ""
) -> RelationReport:
    """``(closed composite)∘Φ_{c0c1}∘...`` against the trailing factors alone."""
    loop = _loop(atlas, cycle)
    k = len(loop)
    right = [loop[i % k] for i in range(multipliers)]
    return compare_maps(relation, cycle, chain(loop + right), chain(right), detail)


def check_n_regular(atlas: SemiAtlas, cycle: Sequence[str]) -> List[RelationReport]:
    """Sandwich relation for every rotation of the cycle; raises ``MissingMap``."""
    return [sandwich_report(atlas, rotation(cycle, r), "regular") for r in range(len(cycle))]


def check_multi_regular(atlas: SemiAtlas, cycle: Sequence[str], multipliers: int = 2) -> List[RelationReport]:
    """``(closed composite)∘Φ_{c0c1}∘...`` with ``multipliers`` trailing factors, per rotation."""
    if multipliers < 1:
        raise ValueError("multipliers must be at least 1")
    return [
        sandwich_report(atlas, rotation(cycle, r), "multi-regular", multipliers) for r in range(len(cycle))
    ]


def _oriented_relations(atlas: SemiAtlas, n_max: int, reflexive: bool) -> List[RelationReport]:
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    relation = "reflexive" if reflexive else "tower"
    reports = []
    for k in range(2, _cycle_length(atlas, n_max) + 1):
        for cycle in forward_cycles(atlas, k):
            base = reverse_cycle(cycle) if reflexive and k > 2 else cycle
            for r in _anchors(k, reflexive):
                rotated = rotation(base, r)
                reports.append(guarded(relation, rotated, lambda c=rotated: sandwich_report(atlas, c, relation)))
    logger.debug("%s relations: %d reports", relation, len(reports))
    return reports


def check_tower_relations(atlas: SemiAtlas, n_max: int) -> List[RelationReport]:
    return _oriented_relations(atlas, n_max, reflexive=False)


def check_reflexivity(atlas: SemiAtlas, n_max: int) -> List[RelationReport]:
    return _oriented_relations(atlas, n_max, reflexive=True)


# ---------- tower identities ------------------------------------------

def _as_cycle(cycle: Sequence[str]) -> Cycle:
    cycle = tuple(cycle)
    if len(cycle) > 1 and cycle[0] == cycle[-1]:
        cycle = cycle[:-1]
    if not cycle:
        raise ValueError("empty cycle")
    return cycle


def tower_identity(atlas: SemiAtlas, cycle: Sequence[str]) -> SuperMap:
    """Closed composite ``e^(n)`` at ``cycle[0]``; a trailing repeat of the start is accepted."""
    return chain(_loop(atlas, _as_cycle(cycle)))


def conjugate_tower_identity(atlas: SemiAtlas, cycle: Sequence[str]) -> SuperMap:
    """The same transitions taken in opposite order."""
    return tower_identity(atlas, reverse_cycle(_as_cycle(cycle)))


def check_tower_identity_laws(atlas: SemiAtlas, n_max: int, reflexive: bool = True) -> List[RelationReport]:
    """
    Unit and idempotency laws per forward rotation; with ``reflexive`` also
    the conjugate (reflexive) unit laws and annihilation ``e∘ẽ = Φ_ab∘Φ_ba``.
    """
    reports: List[RelationReport] = []

    def unit_left(c: Cycle) -> RelationReport:
        phi = atlas.transition(c[0], c[1 % len(c)])
        return compare_maps("unit-left", c, compose(tower_identity(atlas, c), phi), phi)

    def unit_right(c: Cycle) -> RelationReport:
        phi = atlas.transition(c[0], c[1 % len(c)])
        return compare_maps("unit-right", c, compose(phi, tower_identity(atlas, rotation(c, 1))), phi)

    def idempotent(c: Cycle) -> RelationReport:
        e = tower_identity(atlas, c)
        return compare_maps("idempotent", c, compose(e, e), e)

    def reflexive_unit_left(c: Cycle) -> RelationReport:
        phi = atlas.transition(c[0], c[1])
        e = conjugate_tower_identity(atlas, reverse_cycle(c))
        return compare_maps("reflexive-unit-left", c, compose(e, phi), phi)

    def reflexive_unit_right(c: Cycle) -> RelationReport:
        phi = atlas.transition(c[0], c[1])
        e = conjugate_tower_identity(atlas, reverse_cycle(rotation(c, 1)))
        return compare_maps("reflexive-unit-right", c, compose(phi, e), phi)

    def annihilation(c: Cycle) -> RelationReport:
        lhs = compose(tower_identity(atlas, c), conjugate_tower_identity(atlas, c))
        rhs = compose(atlas.transition(c[0], c[1]), atlas.transition(c[1], c[0]))
        return compare_maps("annihilation", c, lhs, rhs)

    forward_laws = (("unit-left", unit_left), ("unit-right", unit_right), ("idempotent", idempotent))
    # e^(1) at a chart is the stored self-transition
    for chart in atlas.chart_ids:
        if (chart, chart) in atlas.transitions:
            c = (chart,)
            for law, fn in forward_laws:
                reports.append(guarded(law, c, lambda fn=fn, c=c: fn(c)))
    for k in range(2, _cycle_length(atlas, n_max) + 1):
        for cycle in forward_cycles(atlas, k):
            for r in _anchors(k, reflexive=False):
                c = rotation(cycle, r)
                for law, fn in forward_laws:
                    reports.append(guarded(law, c, lambda fn=fn, c=c: fn(c)))
            if k == 2:
                c = rotation(cycle, 1)
                reports.append(guarded("idempotent", c, lambda c=c: idempotent(c)))
            if not reflexive:
                continue
            back = reverse_cycle(cycle) if k > 2 else cycle
            for r in _anchors(k, reflexive=True):
                c = rotation(back, r)
                reports.append(guarded("reflexive-unit-left", c, lambda c=c: reflexive_unit_left(c)))
                reports.append(guarded("reflexive-unit-right", c, lambda c=c: reflexive_unit_right(c)))
            for r in _anchors(k, reflexive=False):
                c = rotation(cycle, r)
                reports.append(guarded("annihilation", c, lambda c=c: annihilation(c)))
    return reports


# ---------- cocycles / obstructedness ---------------------------------

def cycles_through(atlas: SemiAtlas, chart: str, length: int) -> List[Cycle]:
    """Every directed simple cycle of the given length starting at ``chart``."""
    if length == 1:
        return [(chart,)] if (chart, chart) in atlas.transitions else []
    out: List[Cycle] = []
    for cycle in forward_cycles(atlas, length):
        if chart not in cycle:
            continue
        variants = [cycle] if length == 2 else [cycle, reverse_cycle(cycle)]
        for v in variants:
            out.append(rotation(v, v.index(chart)))
    return out


def check_cocycles(atlas: SemiAtlas, n_max: int) -> List[RelationReport]:
    """Classical cocycle identities ``e^(n) = id`` for every directed simple cycle."""
    identity = atlas.identity()
    reports = []
    for k in range(1, _cycle_length(atlas, n_max) + 1):
        for chart in atlas.chart_ids:
            for c in cycles_through(atlas, chart, k):
                reports.append(
                    guarded("cocycle", c, lambda c=c: compare_maps("cocycle", c, tower_identity(atlas, c), identity))
                )
    return reports


def obstructedness_degree(atlas: SemiAtlas, n_max: int, reports: Optional[Sequence[RelationReport]] = None) -> int:
    """Largest cycle length whose cocycle identity fails; 0 when none does."""
    if reports is None:
        reports = check_cocycles(atlas, n_max)
    failed = [len(r.cycle) for r in reports if r.relation == "cocycle" and r.verdict is Verdict.fail]
    return max(failed, default=0)


def verify_consequence(atlas: SemiAtlas, cycle: Sequence[str]) -> RelationReport:
    """
    On a triple ``(a, b, c)``: when the pair relation at ``(a, b)`` and the
    two-multiplier relation hold, check whether the triple relation holds.
    """
    cycle = tuple(cycle)
    if len(cycle) != 3:
        raise ValueError("the consequence check takes a triple of charts")

    def run() -> RelationReport:
        pair = sandwich_report(atlas, cycle[:2], "tower")
        two = sandwich_report(atlas, cycle, "multi-regular", multipliers=2)
        triple = sandwich_report(atlas, cycle, "tower")
        if not (pair.holds and two.holds):
            return RelationReport(
                relation="consequence", cycle=cycle, verdict=Verdict.hold, detail="premises not met"
            )
        if triple.holds:
            return RelationReport(relation="consequence", cycle=cycle, verdict=Verdict.hold)
        return RelationReport(
            relation="consequence",
            cycle=cycle,
            verdict=Verdict.fail,
            witness=triple.witness,
            detail="premises hold but the triple relation fails",
        )

    return guarded("consequence", cycle, run)


# ---------- niceness / semigroup --------------------------------------

class NicenessResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    nice: bool
    chart: Optional[str] = None
    length: Optional[int] = None
    first: Optional[Cycle] = None
    second: Optional[Cycle] = None

    @model_validator(mode="after")
    def _check_witness(self) -> "NicenessResult":
        if self.nice == (self.first is not None):
            raise ValueError("a witness pair is required exactly when the atlas is not nice")
        return self


def _identities_through(atlas: SemiAtlas, chart: str, length: int) -> List[Tuple[Cycle, SuperMap]]:
    out = []
    for c in cycles_through(atlas, chart, length):
        try:
            out.append((c, tower_identity(atlas, c)))
        except MissingMap:
            continue
    return out


def is_nice(atlas: SemiAtlas, n_max: int) -> NicenessResult:
    for chart in atlas.chart_ids:
        for k in range(1, _cycle_length(atlas, n_max) + 1):
            found = _identities_through(atlas, chart, k)
            for c, e in found[1:]:
                if e != found[0][1]:
                    return NicenessResult(nice=False, chart=chart, length=k, first=found[0][0], second=c)
    return NicenessResult(nice=True)


def detect_period(values: Sequence[object]) -> Tuple[int, int]:
    """
    (first position, period) from which the sequence repeats within the window.

    A period counts only when the tail holds it at least twice; without one
    the last value is taken as a period-1 tail.
    """
    size = len(values)
    for i in range(size):
        for p in range(1, (size - i) // 2 + 1):
            if all(values[j] == values[j + p] for j in range(i, size - p)):
                return i, p
    return max(size - 1, 0), 1


class TowerSemigroup(BaseModel):
    """Tower identities at one chart under index addition folded through periodicity."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    chart: str
    exponents: Tuple[int, ...]
    elements: Tuple[SuperMap, ...]
    element_of: Tuple[int, ...]
    index: int
    period: int
    cayley: Tuple[Tuple[int, ...], ...]
    compatibility: Tuple[RelationReport, ...]

    def fold(self, exponent: int) -> int:
        if exponent <= self.exponents[-1]:
            return exponent
        return self.index + (exponent - self.index) % self.period

    def element_for(self, exponent: int) -> int:
        return self.element_of[self.exponents.index(self.fold(exponent))]


def tower_semigroup(atlas: SemiAtlas, chart: str, n_max: int) -> TowerSemigroup:
    niceness = is_nice(atlas, n_max)
    if not niceness.nice:
        raise NotNice(
            f"tower identities at {niceness.chart} of length {niceness.length} differ: "
            f"{','.join(niceness.first)} vs {','.join(niceness.second)}"
        )
    atlas.index(chart)
    exponents: List[int] = []
    sequence: List[SuperMap] = []
    for k in range(1, _cycle_length(atlas, n_max) + 1):
        found = _identities_through(atlas, chart, k)
        if not found:
            if sequence:
                break
            continue
        exponents.append(k)
        sequence.append(found[0][1])
    if not sequence:
        raise MissingMap("transition", (chart,))
    start, period = detect_period(sequence)
    elements: List[SuperMap] = []
    element_of: List[int] = []
    for e in sequence:
        if e not in elements:
            elements.append(e)
        element_of.append(elements.index(e))
    first_exponent = [exponents[element_of.index(i)] for i in range(len(elements))]
    draft = TowerSemigroup(
        chart=chart,
        exponents=tuple(exponents),
        elements=tuple(elements),
        element_of=tuple(element_of),
        index=exponents[start],
        period=period,
        cayley=(),
        compatibility=(),
    )
    cayley = tuple(
        tuple(draft.element_for(n + m) for m in first_exponent) for n in first_exponent
    )
    checks = []
    for i, n in enumerate(exponents):
        for j, m in enumerate(exponents):
            folded = draft.fold(n + m)
            lhs = compose(sequence[i], sequence[j])
            rhs = sequence[exponents.index(folded)]
            checks.append(compare_maps("semigroup", (chart,), lhs, rhs, detail=f"e{n}*e{m} = e{folded}"))
    return draft.model_copy(update={"cayley": cayley, "compatibility": tuple(checks)})


# ---------- charts / transitions --------------------------------------

def classify_charts(atlas: SemiAtlas, degree_bound: Optional[int] = None) -> Dict[str, ChartKind]:
    """Chart when the coordinate map has a polynomial inverse, semi-chart otherwise."""
    kinds: Dict[str, ChartKind] = {}
    for chart in atlas.chart_ids:
        phi = atlas.coordinate_maps.get(chart)
        if phi is None:
            kinds[chart] = ChartKind.semi_chart if chart in atlas.declared_semi else ChartKind.chart
        else:
            kinds[chart] = ChartKind.chart if is_chart(phi, degree_bound) else ChartKind.semi_chart
    return kinds


def derive_transition(
    atlas: SemiAtlas, a: str, b: str, degree_bound: Optional[int] = None
) -> SolutionSet[SuperMap]:
    """All bounded-degree ``Φ`` with ``Φ∘φ_b = φ_a``."""
    eq = MapEquation.composition(rhs=atlas.coordinate_map(a), inner=atlas.coordinate_map(b))
    return solve_map_ansatz(eq, degree_bound)

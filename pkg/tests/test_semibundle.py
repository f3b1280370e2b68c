import random
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import pytest

from algebra.errors import NotBasePreserving, NotInvertible
from algebra.grassmann import GrassmannElement
from algebra.superpoly import SuperDomainSignature, SuperPolynomial
from algebra.supermap import SuperMap, chain, compose
from geometry.checks import check_bundle
from geometry.generators import coordinate_projector, random_invertible
from geometry.reports import Verdict
from geometry.semiatlas import SemiAtlas
from geometry.semibundle import (
    AGREEMENT_EQUATIONS,
    SemiBundle,
    agreement_patterns,
    canonical_projection,
    check_bundle_morphism,
    check_cover_agreement,
    check_section_compatibility,
    check_semi_section,
    fiber_action,
    graph_section,
    transport_transitions,
)

N = 3
BASE = SuperDomainSignature(n_even=1, n_odd=0)
FIBER = SuperDomainSignature(n_even=0, n_odd=1)
PRODUCT = BASE.direct_sum(FIBER)


def g(*indices):
    return SuperPolynomial.constant(PRODUCT, N, GrassmannElement.monomial(N, indices))


def x():
    return SuperPolynomial.even_variable(PRODUCT, N, 1)


def t():
    return SuperPolynomial.odd_variable(PRODUCT, N, 1)


def product_map(*components):
    return SuperMap(PRODUCT, PRODUCT, components, N)


def verdicts(reports):
    return {r.verdict for r in reports}


def make_bundle(bundle_transitions=None):
    base_id = SuperMap.identity(BASE, N)
    base = SemiAtlas(
        signature=BASE,
        n_generators=N,
        chart_ids=("A", "B"),
        transitions={("A", "B"): base_id, ("B", "A"): base_id},
        overlaps=(("A", "B"),),
    )
    eta = SuperPolynomial.constant(BASE, N, GrassmannElement.generator(N, 1)) * SuperPolynomial.even_variable(BASE, N, 1)
    section = graph_section(BASE, FIBER, [eta], N)
    identity = SuperMap.identity(PRODUCT, N)
    if bundle_transitions is None:
        bundle_transitions = {("A", "B"): identity, ("B", "A"): identity}
    return SemiBundle(
        total=PRODUCT,
        base=base,
        fiber=FIBER,
        projection=canonical_projection(BASE, FIBER, N),
        sections={"A": section, "B": section},
        trivializations={"A": identity, "B": identity},
        bundle_transitions=bundle_transitions,
    )


@pytest.fixture
def bundle():
    return make_bundle()


def second_cover(cross_override=None):
    identity = SuperMap.identity(PRODUCT, N)
    cover = SemiAtlas(
        signature=PRODUCT,
        n_generators=N,
        chart_ids=("P", "Q"),
        transitions={("P", "Q"): identity, ("Q", "P"): identity},
        overlaps=(("P", "Q"),),
    )
    cross = {}
    for u in ("A", "B"):
        for p in ("P", "Q"):
            cross[(u, p)] = identity
            cross[(p, u)] = identity
    cross.update(cross_override or {})
    return cover, cross


def test_graph_section_shape():
    s = graph_section(BASE, FIBER, [SuperPolynomial.zero(BASE, N)], N)
    assert s.source == BASE
    assert s.target == PRODUCT
    assert compose(canonical_projection(BASE, FIBER, N), s) == SuperMap.identity(BASE, N)


def test_identity_bundle_holds_everywhere(bundle):
    cover, cross = second_cover()
    sections = check_bundle(bundle, n_max=3, reflexive=True, second_cover=cover, cross=cross)
    names = [s.name for s in sections]
    assert names == [
        "trivializations",
        "semi-sections",
        "section-compatibility",
        "bundle-transitions",
        "agreement",
    ]
    for section in sections:
        assert section.reports, section.name
        assert verdicts(section.reports) == {Verdict.hold}, section.name


def test_section_mismatch_survives_a_missing_section():
    base = SemiAtlas(
        signature=BASE,
        n_generators=N,
        chart_ids=("A", "B", "C"),
        transitions={},
        overlaps=(("A", "B", "C"),),
    )
    eta = SuperPolynomial.constant(BASE, N, GrassmannElement.generator(N, 1)) * SuperPolynomial.even_variable(BASE, N, 1)
    identity = SuperMap.identity(PRODUCT, N)
    bundle = SemiBundle(
        total=PRODUCT,
        base=base,
        fiber=FIBER,
        projection=canonical_projection(BASE, FIBER, N),
        sections={
            "A": graph_section(BASE, FIBER, [eta], N),
            "B": graph_section(BASE, FIBER, [SuperPolynomial.zero(BASE, N)], N),
        },
        trivializations={"A": identity, "B": identity, "C": identity},
    )
    reports = check_section_compatibility(bundle)
    assert [(r.cycle, r.verdict) for r in reports] == [
        (("A", "B"), Verdict.fail),
        (("A", "C"), Verdict.skip),
        (("B", "C"), Verdict.skip),
    ]
    by_name = {s.name: s for s in check_bundle(bundle, n_max=2)}
    assert Verdict.fail in verdicts(by_name["section-compatibility"].reports)


def test_reflexive_section_is_skipped_unless_requested(bundle):
    reports = check_semi_section(bundle.projection, bundle.section("A"))
    assert [r.verdict for r in reports] == [Verdict.hold, Verdict.skip]


def test_collapsing_section_fails_reflexivity(bundle):
    # s(x) = (0, 0) forgets the base point
    zero = SuperPolynomial.zero(BASE, N)
    s = SuperMap(BASE, PRODUCT, [zero, zero], N)
    reports = check_semi_section(bundle.projection, s, reflexive=True)
    assert reports[0].verdict is Verdict.fail
    assert reports[0].witness is not None


def test_fiber_action_composes(bundle):
    first = product_map(x(), (1 + g(1, 2)) * t() + g(1) * x())
    second = product_map(x(), t() + g(2) * x())
    lhs = fiber_action(compose(first, second), BASE, FIBER)
    rhs = compose(fiber_action(first, BASE, FIBER), second)
    assert lhs == rhs
    assert lhs.target == FIBER


def test_fiber_action_rejects_base_motion():
    with pytest.raises(NotBasePreserving):
        fiber_action(product_map(x() + g(1, 2), t()), BASE, FIBER)


def test_identity_morphism(bundle):
    reports = check_bundle_morphism(
        bundle,
        bundle,
        SuperMap.identity(PRODUCT, N),
        SuperMap.identity(BASE, N),
        {"A": SuperMap.identity(PRODUCT, N), "B": SuperMap.identity(PRODUCT, N)},
    )
    assert len(reports) == 5
    assert verdicts(reports) == {Verdict.hold}


def test_transport_transitions():
    lam = product_map(x(), (1 + g(1, 2)) * t() + g(1) * x())
    identity = SuperMap.identity(PRODUCT, N)
    bundle = make_bundle({("A", "B"): lam, ("B", "A"): identity})
    h, h_inv = random_invertible(random.Random(3), PRODUCT, N, steps=2)
    moved = transport_transitions(bundle, {"A": h, "B": h})
    assert moved[("A", "B")] == chain([h, lam, h_inv])
    assert moved[("B", "A")] == identity

    projector = coordinate_projector(PRODUCT, N)
    with pytest.raises(NotInvertible):
        transport_transitions(bundle, {"A": projector, "B": projector})


def test_agreement_patterns_match_the_table():
    patterns = agreement_patterns()
    assert len(patterns) == 38
    assert set(patterns) == set(AGREEMENT_EQUATIONS)
    forward = agreement_patterns(reflexive=False)
    assert {p.orientation for p in forward} == {"agreement"}
    assert len(forward) == 20


def test_projector_cross_map_breaks_agreement(bundle):
    cover, cross = second_cover({("A", "P"): coordinate_projector(PRODUCT, N)})
    reports = check_cover_agreement(bundle, cover, cross, n_max=2)
    assert Verdict.fail in verdicts(reports)
    failing = [r for r in reports if r.verdict is Verdict.fail]
    assert all("A" in r.cycle and "P" in r.cycle for r in failing)


def test_cover_ids_must_be_distinct(bundle):
    cover, cross = second_cover()
    clash = cover.model_copy(update={"chart_ids": ("A", "Q")})
    with pytest.raises(ValueError):
        check_cover_agreement(bundle, clash, {})


if __name__ == "__main__":
    pytest.main([__file__])

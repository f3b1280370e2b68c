import random
import sys
from fractions import Fraction
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import pytest

from algebra.errors import FormatSemanticError, FormatSyntaxError
from algebra.grassmann import GrassmannElement, Parity
from algebra.superpoly import SuperDomainSignature
from geometry.generators import random_element, random_map
from ssmformat import build, parse, serialize
from ssmformat.document import MapRef, MapRole, SolveTask
from ssmformat.parser import parse_elements, parse_map_ref


def test_implicit_space_and_chart():
    doc = parse("algebra 3\nmap phi[A]: x1' = x1\n")
    assert doc.algebra == 3
    assert [s.name for s in doc.spaces] == ["M"]
    assert doc.spaces[0].signature == SuperDomainSignature(n_even=1, n_odd=0)
    assert [c.name for c in doc.charts] == ["A"]
    (decl,) = doc.maps
    assert decl.role is MapRole.coordinate
    assert decl.key == ("coordinate", "A")


def test_inferred_odd_coordinates():
    doc = parse("algebra 2\nmap Phi[A, B]: t1' = t1; x2' = x2; x1' = x1\n")
    assert doc.spaces[0].signature == SuperDomainSignature(n_even=2, n_odd=1)
    assert doc.maps[0].role is MapRole.transition


def test_solve_task():
    doc = parse("algebra 3\ntask solve g1 * X = 2 g1*g2*g3")
    (task,) = doc.tasks
    assert isinstance(task, SolveTask)
    assert task.coefficient == GrassmannElement.generator(3, 1)
    assert task.rhs == 2 * GrassmannElement.monomial(3, (1, 2, 3))


def test_minimal_document():
    assert serialize(parse("algebra 1")) == "algebra 1\n"


def test_coefficients_are_canonical():
    text = serialize(parse("algebra 1\nspace M 1 0\nmap phi[A]: x1' = 2/4*x1\n"))
    assert "map coordinate[A]: x1' = 1/2*x1" in text


def test_parenthesised_sum_may_share_a_generator():
    grouped = parse("algebra 2\nmap phi[A]: x1' = (g1 + g2)*g1*x1\n")
    expanded = parse("algebra 2\nmap phi[A]: x1' = -g1*g2*x1\n")
    assert grouped.maps[0].components == expanded.maps[0].components
    with pytest.raises(FormatSemanticError) as info:
        parse("algebra 2\nmap phi[A]: x1' = (g1)*g1")
    assert info.value.message == "repeated odd generator g1"


def test_comments_and_crlf():
    noisy = "# header\r\nalgebra 2   # two generators\r\n\r\nspace M 1 0\r\n"
    assert parse(noisy) == parse("algebra 2\nspace M 1 0")


def test_role_synonyms():
    assert MapRole("pi") is MapRole.projection
    assert MapRole("Bundle-Transition") is MapRole.bundle_transition
    with pytest.raises(ValueError):
        MapRole("warp")


def test_build_makes_an_atlas():
    ws = build(parse("algebra 2\nspace M 1 1\nchart A\nchart B semi\noverlap A B\n"
                     "map Phi[A, B]: x1' = x1; t1' = t1\nmap Phi[B, A]: x1' = x1; t1' = t1\n"))
    atlas = ws.require_atlas()
    assert atlas.chart_ids == ("A", "B")
    assert ws.bundle is None
    ref = MapRef(role=MapRole.transition, name="transition", indices=("A", "B"))
    assert ws.resolve(ref) == atlas.transition("A", "B")


def test_fragment_parsers():
    doc = parse("algebra 3\nspace M 1 0\nchart A\nchart B\noverlap A B\nmap Phi[A, B]: x1' = x1\n")
    assert parse_elements("g1*g2, 1/2", 3) == (GrassmannElement.monomial(3, (1, 2)), GrassmannElement.scalar(3, Fraction(1, 2)))
    ref = parse_map_ref("transition[A,B]", doc)
    assert ref.render() == "transition[A, B]"
    with pytest.raises(FormatSemanticError):
        parse_map_ref("transition[B, A]", doc)


INVALID = [
    ("", 1, 1, FormatSyntaxError),
    ("algebra 2\nmap phi[A]: x1' = g1*g1*x1", 2, 22, FormatSemanticError),
    ("algebra 2\nmap phi[A]: x1' = (g1)*g1", 2, 24, FormatSemanticError),
    ("algebra 2\nmap phi[A]: x1' = g1*(g1)", 2, 22, FormatSemanticError),
    ("algebra 2\nmap phi[A]: x1' = g3", 2, 19, FormatSemanticError),
    ("algebra 2\nmap phi[A]: x1' = g1", 2, 19, FormatSemanticError),
    ("algebra 2\nmap phi[A]: x1' = x1 +", 2, 23, FormatSyntaxError),
    ("space M 1 0", 1, 1, FormatSemanticError),
    ("algebra 2\nalgebra 3", 2, 1, FormatSemanticError),
    ("algebra 99", 1, 9, FormatSemanticError),
    ("algebra 2\nchart A\noverlap A B", 3, 11, FormatSemanticError),
    ("algebra 2\nspace M 1 0\nmap phi[A]: x1' = x1; x1' = x1", 3, 23, FormatSemanticError),
    ("algebra 2\nspace M 1 1\nmap phi[A]: x1' = x1", 3, 5, FormatSemanticError),
    ("algebra 2\nfoo", 2, 1, FormatSyntaxError),
    ("algebra 2\ntask berezinian f", 2, 17, FormatSemanticError),
    ("algebra 2 @", 1, 11, FormatSyntaxError),
    ("algebra 2\nchart P second", 2, 9, FormatSemanticError),
    ("algebra 2\ntask solve g1 * X * g2 = 0", 2, 19, FormatSemanticError),
    ("algebra 1\nspace E 1 1\nspace M 1 0\nspace F 0 1\nchart A\nbundle E M F", 6, 1, FormatSemanticError),
]


@pytest.mark.parametrize("text,line,column,error", INVALID)
def test_invalid_documents(text, line, column, error):
    with pytest.raises(error) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_error_details():
    with pytest.raises(FormatSyntaxError) as info:
        parse("")
    assert info.value.expected == ("algebra",)
    with pytest.raises(FormatSyntaxError) as info:
        parse("algebra 2\nmap phi[A]: x1' = x1 +")
    assert info.value.expected == ("(", "INT", "gI", "tI", "xI")
    with pytest.raises(FormatSyntaxError) as info:
        parse("algebra 2 @")
    assert info.value.found == "'@'"
    with pytest.raises(FormatSemanticError) as info:
        parse("algebra 2\nmap phi[A]: x1' = g1*g1*x1")
    assert info.value.message == "repeated odd generator g1"
    with pytest.raises(FormatSemanticError) as info:
        parse("algebra 2\nspace M 1 1\nmap phi[A]: x1' = x1")
    assert info.value.message == "missing component t1'"
    with pytest.raises(FormatSemanticError) as info:
        parse("algebra 2\ntask solve g1 * X * g2 = 0")
    assert info.value.message == "X must be the last factor"


# ---------- generated round-trip corpus ----------------------------------

M = SuperDomainSignature(n_even=1, n_odd=1)
BASE = SuperDomainSignature(n_even=1, n_odd=0)
FIBER = SuperDomainSignature(n_even=0, n_odd=1)
Z = SuperDomainSignature(n_even=1, n_odd=2)


def _nonzero(rng, n, parity=None):
    value = random_element(rng, n, parity)
    if value.is_zero():
        value = GrassmannElement.generator(n, 1) if parity is Parity.odd else GrassmannElement.scalar(n, 2)
    return value


def atlas_text(rng, n):
    coef = _nonzero(rng, n).render()
    if " " in coef:
        coef = f"({coef})"
    point = f"{random_element(rng, n, Parity.even).render()}, {random_element(rng, n, Parity.odd).render()}"
    return "\n".join([
        f"algebra {n}",
        "space M 1 1",
        "chart U1",
        "chart U2 semi",
        "chart U3",
        "overlap U1 U2 U3",
        f"map phi[U1]: {random_map(rng, M, M, n).render()}",
        f"map Phi[U1, U2]: {random_map(rng, M, M, n).render()}",
        f"map transition[U2, U1]: {random_map(rng, M, M, n).render()}",
        f"map glue[U2, U3]: {random_map(rng, M, M, n).render()}",
        "task check n_max 3 reflexive",
        f"task solve {coef} * X = {random_element(rng, n).render()}",
        "task transition U1 U2 degree 2",
        f"task berezinian transition[U1, U2] at {point}",
        "task semigroup U1 n_max 3",
    ])


def bundle_text(rng, n):
    total = BASE.direct_sum(FIBER)
    return "\n".join([
        f"algebra {n}",
        "space E 1 1",
        "space M 1 0",
        "space F 0 1",
        "bundle E M F",
        "chart A",
        "chart B",
        "chart P second",
        "overlap A B",
        f"map projection[E, M]: {random_map(rng, total, BASE, n).render()}",
        f"map section[A]: {random_map(rng, BASE, total, n).render()}",
        f"map trivialization[A]: {random_map(rng, total, total, n).render()}",
        f"map bundle_transition[A, B]: {random_map(rng, total, total, n).render()}",
        f"map cross[A, P]: {random_map(rng, total, total, n).render()}",
        "task check",
    ])


def homotopy_text(rng, n):
    ends = f"{random_element(rng, n, Parity.odd).render()}, {random_element(rng, n, Parity.odd).render()}"
    return "\n".join([
        f"algebra {n}",
        "space X 1 1",
        "space Z 1 2",
        f"map f[X, X]: {random_map(rng, M, M, n).render()}",
        f"map g[X, X]: {random_map(rng, M, M, n).render()}",
        f"map G[Z, X]: {random_map(rng, Z, M, n).render()}",
        f"task homotopy check odd G f g endpoints {ends}",
        f"task homotopy average f g endpoints {ends} degree 2",
    ])


def corpus():
    rng = random.Random(31)
    texts = []
    for i in range(12):
        n = 2 + i % 3
        texts.extend([atlas_text(rng, n), bundle_text(rng, n), homotopy_text(rng, n)])
    return texts


CORPUS = corpus()


def test_corpus_size():
    assert len(CORPUS) >= 30


@pytest.mark.parametrize("text", CORPUS)
def test_round_trip(text):
    doc = parse(text)
    out = serialize(doc)
    assert parse(out) == doc
    assert serialize(parse(out)) == out


def test_bundle_document_builds():
    ws = build(parse(CORPUS[1]))
    assert ws.bundle is not None
    assert ws.second_cover is not None
    assert ws.second_cover.chart_ids == ("P",)
    assert set(ws.cross) == {("A", "P")}


if __name__ == "__main__":
    pytest.main([__file__])

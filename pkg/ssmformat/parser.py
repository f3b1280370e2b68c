"""
Recursive-descent parser for ``.ssm`` documents.

Syntax errors carry the offending token and the sorted set of tokens that
would have been accepted; semantic errors carry a position and a message.
Both are deterministic for a given input.
"""
from __future__ import annotations

import logging
import re
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from algebra.config import DEFAULT_MAX_GENERATORS
from algebra.errors import FormatSemanticError, FormatSyntaxError
from algebra.grassmann import GrassmannElement, Parity, mask_indices
from algebra.superpoly import SuperDomainSignature, SuperPolynomial
from ssmformat.document import (
    ROLE_ARITY,
    BerezinianTask,
    BundleDecl,
    ChartDecl,
    CheckTask,
    Document,
    HomotopyAverageTask,
    HomotopyCheckTask,
    MapDecl,
    MapRef,
    MapRole,
    OverlapDecl,
    SemigroupTask,
    SolveTask,
    SpaceDecl,
    Task,
    TransitionTask,
)
from ssmformat.lexer import Token, tokenize

__all__ = ["parse", "parse_elements", "parse_map_ref", "ROLE_WORDS"]

logger = logging.getLogger(__name__)

_FACTOR = re.compile(r"^([xtg])(\d+)$")
_STATEMENTS = ("algebra", "bundle", "chart", "map", "overlap", "space", "task")
_FACTOR_START = ("(", "INT", "gI", "tI", "xI")

# words that select a role map; anything else names a free map
ROLE_WORDS = {
    "coordinate": MapRole.coordinate,
    "phi": MapRole.coordinate,
    "transition": MapRole.transition,
    "Phi": MapRole.transition,
    "glue": MapRole.transition,
    "projection": MapRole.projection,
    "pi": MapRole.projection,
    "section": MapRole.section,
    "trivialization": MapRole.trivialization,
    "lambda": MapRole.trivialization,
    "bundle_transition": MapRole.bundle_transition,
    "cross": MapRole.cross,
    "tilde": MapRole.cross,
}

_CONSTANTS = SuperDomainSignature(n_even=0, n_odd=0)
_UNKNOWN = SuperDomainSignature(n_even=1, n_odd=0)


def _odd_symbols(poly: SuperPolynomial) -> Set[str]:
    """Odd generators and coordinates present in every term of ``poly``."""
    common: Optional[Set[str]] = None
    for gmask, _, omask in poly.terms:
        names = {f"g{i}" for i in mask_indices(gmask)} | {f"t{j}" for j in mask_indices(omask)}
        common = names if common is None else common & names
    return common or set()


class _Parser:
    def __init__(self, text: str, max_generators: int):
        self.tokens = tokenize(text)
        self.pos = 0
        self.max_generators = max_generators
        self.n: Optional[int] = None
        self.spaces: Dict[str, SpaceDecl] = {}
        self.bundle: Optional[BundleDecl] = None
        self.charts: Dict[str, ChartDecl] = {}
        self.overlaps: List[OverlapDecl] = []
        self.maps: Dict[Tuple[str, ...], MapDecl] = {}
        self.tasks: List[Task] = []
        self.seen_chart_or_map = False
        # coordinate-name limits for literals inside the expression being parsed
        self.limits: Tuple[int, int] = (0, 0)
        self.expr_sig = _CONSTANTS
        self.unknown = False

    # ---------- token plumbing ----------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, expected) -> FormatSyntaxError:
        tok = self.peek()
        return FormatSyntaxError(tok.line, tok.column, tok.describe(), expected)

    def semantic(self, tok: Token, message: str) -> FormatSemanticError:
        return FormatSemanticError(tok.line, tok.column, message)

    def at_sym(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text == text

    def at_word(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "name" and tok.text == text

    def expect_sym(self, text: str) -> Token:
        if not self.at_sym(text):
            raise self.fail((text,))
        return self.advance()

    def expect_word(self, *words: str) -> Token:
        tok = self.peek()
        if tok.kind != "name" or tok.text not in words:
            raise self.fail(words)
        return self.advance()

    def expect_name(self) -> Token:
        if self.peek().kind != "name":
            raise self.fail(("NAME",))
        return self.advance()

    def expect_int(self) -> Tuple[int, Token]:
        tok = self.peek()
        if tok.kind != "int":
            raise self.fail(("INT",))
        self.advance()
        return int(tok.text), tok

    def end_statement(self, *alternatives: str) -> None:
        if self.peek().kind not in ("newline", "eof"):
            raise self.fail(("end of line",) + alternatives)
        self.advance()

    # ---------- document ----------------------------------------------

    def document(self) -> Document:
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind != "name" or tok.text not in _STATEMENTS:
                raise self.fail(_STATEMENTS)
            if self.n is None and tok.text != "algebra":
                raise self.semantic(tok, "the algebra must be declared first")
            getattr(self, f"stmt_{tok.text}")()
        if self.n is None:
            raise self.fail(("algebra",))
        return Document(
            algebra=self.n,
            spaces=tuple(self.spaces.values()),
            bundle=self.bundle,
            charts=tuple(self.charts.values()),
            overlaps=tuple(self.overlaps),
            maps=tuple(self.maps.values()),
            tasks=tuple(self.tasks),
        )

    def stmt_algebra(self) -> None:
        head = self.advance()
        if self.n is not None:
            raise self.semantic(head, "duplicate algebra declaration")
        n, tok = self.expect_int()
        if n < 1:
            raise self.semantic(tok, "the algebra needs at least one generator")
        if n > self.max_generators:
            raise self.semantic(tok, f"N={n} exceeds the limit of {self.max_generators} generators")
        self.n = n
        self.end_statement()

    def stmt_space(self) -> None:
        self.advance()
        name = self.expect_name()
        if name.text in self.spaces:
            raise self.semantic(name, f"space {name.text} declared twice")
        n_even, _ = self.expect_int()
        n_odd, _ = self.expect_int()
        sig = SuperDomainSignature(n_even=n_even, n_odd=n_odd)
        self.spaces[name.text] = SpaceDecl(name=name.text, signature=sig)
        self.end_statement()

    def stmt_bundle(self) -> None:
        head = self.advance()
        if self.bundle is not None:
            raise self.semantic(head, "duplicate bundle declaration")
        if self.seen_chart_or_map:
            raise self.semantic(head, "the bundle must be declared before charts and maps")
        names = [self.space_name() for _ in range(3)]
        self.bundle = BundleDecl(total=names[0], base=names[1], fiber=names[2])
        total = self.spaces[names[0]].signature
        product = self.spaces[names[1]].signature.direct_sum(self.spaces[names[2]].signature)
        if total != product:
            raise self.semantic(head, f"total space {names[0]} is {total}, base plus fiber is {product}")
        self.end_statement()

    def stmt_chart(self) -> None:
        self.advance()
        name = self.expect_name()
        if name.text in self.charts:
            raise self.semantic(name, f"chart {name.text} declared twice")
        semi = second = False
        if self.at_word("semi"):
            self.advance()
            semi = True
        if self.at_word("second"):
            tok = self.advance()
            if self.bundle is None:
                raise self.semantic(tok, "second-cover charts need a bundle")
            second = True
        self.charts[name.text] = ChartDecl(name=name.text, semi=semi, second=second)
        self.seen_chart_or_map = True
        alternatives = () if second else (("second",) if semi else ("second", "semi"))
        self.end_statement(*alternatives)

    def stmt_overlap(self) -> None:
        self.advance()
        names = []
        while self.peek().kind == "name":
            tok = self.advance()
            if tok.text not in self.charts:
                raise self.semantic(tok, f"undeclared chart {tok.text}")
            names.append(tok.text)
        if len(names) < 2:
            raise self.fail(("NAME",))
        self.overlaps.append(OverlapDecl(charts=tuple(names)))
        self.end_statement("NAME")

    # ---------- names -------------------------------------------------

    def space_name(self) -> str:
        tok = self.expect_name()
        if tok.text not in self.spaces:
            raise self.semantic(tok, f"undeclared space {tok.text}")
        return tok.text

    def chart_name(self, implicit: bool = False, second: Optional[bool] = None) -> Tuple[str, Token]:
        tok = self.expect_name()
        chart = self.charts.get(tok.text)
        if chart is None:
            if not implicit:
                raise self.semantic(tok, f"undeclared chart {tok.text}")
            chart = ChartDecl(name=tok.text)
            self.charts[tok.text] = chart
        if second is not None and chart.second != second:
            cover = "the second cover" if second else "the first cover"
            raise self.semantic(tok, f"chart {tok.text} is not in {cover}")
        return tok.text, tok

    def role_of(self, word: str) -> MapRole:
        return ROLE_WORDS.get(word, MapRole.named)

    def need_bundle(self, tok: Token) -> BundleDecl:
        if self.bundle is None:
            raise self.semantic(tok, f"{tok.text} maps need a bundle declaration")
        return self.bundle

    def sig(self, space: str) -> SuperDomainSignature:
        return self.spaces[space].signature

    def atlas_space(self, head: Token) -> SuperDomainSignature:
        if self.bundle is not None:
            return self.sig(self.bundle.base)
        if self.spaces:
            return next(iter(self.spaces.values())).signature
        sig = self.infer_signature()
        logger.debug("inferred space M = %s from %s", sig, head.text)
        self.spaces["M"] = SpaceDecl(name="M", signature=sig)
        return sig

    def infer_signature(self) -> SuperDomainSignature:
        """Smallest signature holding every ``x_i'``/``t_j'`` target of the current statement."""
        n_even = n_odd = 0
        i = self.pos
        while self.tokens[i].kind not in ("newline", "eof"):
            tok, nxt = self.tokens[i], self.tokens[i + 1]
            m = _FACTOR.match(tok.text) if tok.kind == "name" else None
            if m and nxt.kind == "sym" and nxt.text == "'":
                if m.group(1) == "x":
                    n_even = max(n_even, int(m.group(2)))
                elif m.group(1) == "t":
                    n_odd = max(n_odd, int(m.group(2)))
            i += 1
        return SuperDomainSignature(n_even=n_even, n_odd=n_odd)

    # ---------- maps --------------------------------------------------

    def stmt_map(self) -> None:
        self.advance()
        head = self.expect_name()
        role = self.role_of(head.text)
        self.expect_sym("[")
        first_index = self.pos
        count = 1
        self.expect_name()
        while self.at_sym(","):
            self.advance()
            self.expect_name()
            count += 1
        self.expect_sym("]")
        if count != ROLE_ARITY[role]:
            raise self.semantic(head, f"{head.text} takes {ROLE_ARITY[role]} indices, got {count}")
        # re-read the indices now that the arity is known
        self.pos = first_index
        source, target, indices = self.map_shape(role, head)
        self.expect_sym("]")
        self.expect_sym(":")
        name = head.text if role is MapRole.named else role.value
        key = (name,) if role is MapRole.named else (role.value,) + indices
        if key in self.maps:
            raise self.semantic(head, f"map {head.text}[{', '.join(indices)}] declared twice")
        components = self.assigns(source, target, head)
        self.maps[key] = MapDecl(
            role=role, name=name, indices=indices, source=source, target=target, components=components
        )
        self.seen_chart_or_map = True
        self.end_statement(";")

    def index_list(self, count: int, reader) -> List[Tuple[str, Token]]:
        out = []
        for pos in range(count):
            out.append(reader())
            if pos + 1 < count:
                self.expect_sym(",")
        return out

    def map_shape(
        self, role: MapRole, head: Token
    ) -> Tuple[SuperDomainSignature, SuperDomainSignature, Tuple[str, ...]]:
        arity = ROLE_ARITY[role]
        if role is MapRole.named:
            names = self.index_list(arity, lambda: (self.space_name(), None))
            return self.sig(names[0][0]), self.sig(names[1][0]), tuple(n for n, _ in names)
        if role is MapRole.projection:
            names = self.index_list(arity, lambda: (self.space_name(), None))
            return self.sig(names[0][0]), self.sig(names[1][0]), tuple(n for n, _ in names)
        if role in (MapRole.coordinate, MapRole.transition):
            charts = self.index_list(arity, lambda: self.chart_name(implicit=True, second=False))
            sig = self.atlas_space(head)
            return sig, sig, tuple(c for c, _ in charts)
        bundle = self.need_bundle(head)
        base, total = self.sig(bundle.base), self.sig(bundle.total)
        product = base.direct_sum(self.sig(bundle.fiber))
        if role is MapRole.section:
            charts = self.index_list(arity, lambda: self.chart_name(implicit=True, second=False))
            return base, total, tuple(c for c, _ in charts)
        if role is MapRole.trivialization:
            charts = self.index_list(arity, lambda: self.chart_name(implicit=True, second=False))
            return total, product, tuple(c for c, _ in charts)
        charts = self.index_list(arity, lambda: self.chart_name())
        covers = [self.charts[c].second for c, _ in charts]
        if role is MapRole.bundle_transition and covers[0] != covers[1]:
            raise self.semantic(charts[1][1], "bundle transitions join charts of one cover")
        if role is MapRole.cross and covers[0] == covers[1]:
            raise self.semantic(charts[1][1], "cross maps join a first-cover and a second-cover chart")
        return product, product, tuple(c for c, _ in charts)

    def assigns(
        self, source: SuperDomainSignature, target: SuperDomainSignature, head: Token
    ) -> Tuple[SuperPolynomial, ...]:
        names = target.coordinate_names()
        found: Dict[str, SuperPolynomial] = {}
        while True:
            var = self.peek()
            if var.kind != "name" or not _FACTOR.match(var.text) or var.text[0] == "g":
                raise self.fail(("VAR",))
            self.advance()
            if var.text not in names:
                raise self.semantic(var, f"{var.text} is not a coordinate of {target}")
            if var.text in found:
                raise self.semantic(var, f"{var.text}' assigned twice")
            self.expect_sym("'")
            self.expect_sym("=")
            start = self.peek()
            poly = self.expr_over(source)
            want = target.coordinate_parity(names.index(var.text))
            if poly.parity() not in (want, Parity.zero):
                raise self.semantic(
                    start, f"{var.text}' = {poly.render()} is {poly.parity().value}, needs {want.value}"
                )
            found[var.text] = poly
            if not self.at_sym(";"):
                break
            self.advance()
        missing = [v for v in names if v not in found]
        if missing:
            raise self.semantic(head, f"missing component {missing[0]}'")
        return tuple(found[v] for v in names)

    # ---------- expressions -------------------------------------------

    def expr_over(self, sig: SuperDomainSignature, unknown: bool = False) -> SuperPolynomial:
        saved = (self.limits, self.expr_sig, self.unknown)
        self.limits = (0, 0) if unknown else (sig.n_even, sig.n_odd)
        self.expr_sig = _UNKNOWN if unknown else sig
        self.unknown = unknown
        try:
            return self.expr()
        finally:
            self.limits, self.expr_sig, self.unknown = saved

    def constant(self) -> GrassmannElement:
        return self.expr_over(_CONSTANTS).as_element()

    def expr(self) -> SuperPolynomial:
        negate = False
        if self.at_sym("-"):
            self.advance()
            negate = True
        total = self.term()
        if negate:
            total = -total
        while self.at_sym("+") or self.at_sym("-"):
            op = self.advance().text
            piece = self.term()
            total = total + piece if op == "+" else total - piece
        return total

    def starts_factor(self) -> bool:
        tok = self.peek()
        if tok.kind == "sym":
            return tok.text == "("
        return tok.kind == "name" and (bool(_FACTOR.match(tok.text)) or (self.unknown and tok.text == "X"))

    def term(self) -> SuperPolynomial:
        coef: Fraction = Fraction(1)
        factors: List[SuperPolynomial] = []
        seen_odd: Set[str] = set()
        if self.peek().kind == "int":
            coef = self.rational()
            if self.at_sym("*"):
                self.advance()
                factors.append(self.factor(seen_odd))
            elif self.starts_factor():
                factors.append(self.factor(seen_odd))
        else:
            if not self.starts_factor():
                raise self.fail(_FACTOR_START + (("X",) if self.unknown else ()))
            factors.append(self.factor(seen_odd))
        while self.at_sym("*"):
            if "X" in seen_odd:
                raise self.semantic(self.peek(), "X must be the last factor")
            self.advance()
            factors.append(self.factor(seen_odd))
        out = SuperPolynomial.constant(self.expr_sig, self.n, coef)
        for f in factors:
            out = out * f
        return out

    def rational(self) -> Fraction:
        num, _ = self.expect_int()
        if not self.at_sym("/"):
            return Fraction(num)
        self.advance()
        den, tok = self.expect_int()
        if den == 0:
            raise self.semantic(tok, "zero denominator")
        return Fraction(num, den)

    def factor(self, seen_odd: Set[str]) -> SuperPolynomial:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "(":
            self.advance()
            inner_unknown = self.unknown
            self.unknown = False
            try:
                inner = self.expr()
            finally:
                self.unknown = inner_unknown
            self.expect_sym(")")
            common = _odd_symbols(inner)
            clash = sorted(common & seen_odd)
            if clash:
                raise self.semantic(tok, f"repeated odd generator {clash[0]}")
            seen_odd.update(common)
            return inner
        if tok.kind == "name" and self.unknown and tok.text == "X":
            self.advance()
            seen_odd.add("X")
            return SuperPolynomial.even_variable(_UNKNOWN, self.n, 1)
        m = _FACTOR.match(tok.text) if tok.kind == "name" else None
        if m is None:
            raise self.fail(_FACTOR_START + (("X",) if self.unknown else ()))
        self.advance()
        letter, index = m.group(1), int(m.group(2))
        if letter != "x" and tok.text in seen_odd:
            raise self.semantic(tok, f"repeated odd generator {tok.text}")
        if letter == "g":
            if not 1 <= index <= self.n:
                raise self.semantic(tok, f"g{index} exceeds the algebra of {self.n} generators")
            seen_odd.add(tok.text)
            return SuperPolynomial.constant(self.expr_sig, self.n, GrassmannElement.generator(self.n, index))
        if letter == "t":
            if not 1 <= index <= self.limits[1]:
                raise self.semantic(tok, f"t{index} is not a coordinate here")
            seen_odd.add(tok.text)
            return SuperPolynomial.odd_variable(self.expr_sig, self.n, index)
        if not 1 <= index <= self.limits[0]:
            raise self.semantic(tok, f"x{index} is not a coordinate here")
        var = SuperPolynomial.even_variable(self.expr_sig, self.n, index)
        if not self.at_sym("^"):
            return var
        self.advance()
        power, _ = self.expect_int()
        out = SuperPolynomial.constant(self.expr_sig, self.n, 1)
        for _ in range(power):
            out = out * var
        return out

    # ---------- tasks -------------------------------------------------

    def stmt_task(self) -> None:
        self.advance()
        kind = self.expect_word("berezinian", "check", "homotopy", "semigroup", "solve", "transition")
        task = getattr(self, f"task_{kind.text}")()
        self.tasks.append(task)
        self.end_statement()

    def task_check(self) -> Task:
        n_max = None
        if self.at_word("n_max"):
            self.advance()
            n_max, tok = self.expect_int()
            if n_max < 1:
                raise self.semantic(tok, "n_max must be at least 1")
        reflexive = False
        if self.at_word("reflexive"):
            self.advance()
            reflexive = True
        return CheckTask(n_max=n_max, reflexive=reflexive)

    def task_solve(self) -> Task:
        start = self.peek()
        lhs = self.expr_over(_UNKNOWN, unknown=True)
        if lhs.is_zero() or any(exps != (1,) for (_, exps, _) in lhs.terms):
            raise self.semantic(start, "the left side must be a multiple of X")
        coefficient = GrassmannElement(self.n, {g: c for (g, _, _), c in lhs.terms.items()})
        self.expect_sym("=")
        return SolveTask(coefficient=coefficient, rhs=self.constant())

    def task_transition(self) -> Task:
        first, _ = self.chart_name()
        second, _ = self.chart_name()
        return TransitionTask(first=first, second=second, degree=self.optional_degree())

    def optional_degree(self) -> Optional[int]:
        if not self.at_word("degree"):
            return None
        self.advance()
        degree, _ = self.expect_int()
        return degree

    def map_ref(self) -> MapRef:
        head = self.expect_name()
        role = self.role_of(head.text)
        indices: Tuple[str, ...] = ()
        if role is not MapRole.named:
            self.expect_sym("[")
            names = [self.expect_name().text]
            while self.at_sym(","):
                self.advance()
                names.append(self.expect_name().text)
            self.expect_sym("]")
            indices = tuple(names)
        ref = MapRef(role=role, name=head.text if role is MapRole.named else role.value, indices=indices)
        if ref.key not in self.maps:
            raise self.semantic(head, f"undeclared map {ref.render()}")
        return ref

    def task_berezinian(self) -> Task:
        target = self.map_ref()
        at: List[GrassmannElement] = []
        if self.at_word("at"):
            self.advance()
            at.append(self.constant())
            while self.at_sym(","):
                self.advance()
                at.append(self.constant())
        return BerezinianTask(target=target, at=tuple(at))

    def task_semigroup(self) -> Task:
        chart, _ = self.chart_name()
        self.expect_word("n_max")
        n_max, tok = self.expect_int()
        if n_max < 1:
            raise self.semantic(tok, "n_max must be at least 1")
        return SemigroupTask(chart=chart, n_max=n_max)

    def endpoints(self) -> Tuple[GrassmannElement, GrassmannElement]:
        self.expect_word("endpoints")
        first = self.constant()
        self.expect_sym(",")
        return first, self.constant()

    def task_homotopy(self) -> Task:
        mode = self.expect_word("average", "check")
        if mode.text == "check":
            parameter = self.expect_word("even", "odd").text
            big, start, end = self.map_ref(), self.map_ref(), self.map_ref()
            return HomotopyCheckTask(
                parameter=parameter, big_map=big, start_map=start, end_map=end, endpoints=self.endpoints()
            )
        start, end = self.map_ref(), self.map_ref()
        endpoints = self.endpoints()
        return HomotopyAverageTask(
            start_map=start, end_map=end, endpoints=endpoints, degree=self.optional_degree()
        )


def parse(text: str, max_generators: int = DEFAULT_MAX_GENERATORS) -> Document:
    """Parse ``.ssm`` text into a ``Document``."""
    doc = _Parser(text, max_generators).document()
    logger.debug("parsed %d maps and %d tasks", len(doc.maps), len(doc.tasks))
    return doc


def _fragment_parser(text: str, n_generators: int) -> _Parser:
    parser = _Parser(text, max(n_generators, DEFAULT_MAX_GENERATORS))
    parser.n = n_generators
    return parser


def parse_elements(text: str, n_generators: int) -> Tuple[GrassmannElement, ...]:
    """Comma-separated Grassmann constants, as written after ``at`` in a task."""
    parser = _fragment_parser(text, n_generators)
    values = [parser.constant()]
    while parser.at_sym(","):
        parser.advance()
        values.append(parser.constant())
    parser.end_statement(",")
    return tuple(values)


def parse_map_ref(text: str, doc: Document) -> MapRef:
    """A map reference such as ``transition[A, B]`` resolved against ``doc``."""
    parser = _fragment_parser(text, doc.algebra)
    parser.maps = {m.key: m for m in doc.maps}
    ref = parser.map_ref()
    parser.end_statement()
    return ref

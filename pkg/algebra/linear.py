"""
Linear algebra over the Grassmann algebra viewed as a 2^N-dimensional
rational vector space: annihilators, division by noninvertible elements and
coefficient-wise solving of map equations.

All elimination goes through sympy's ``DomainMatrix`` over ``QQ``; pivot
columns are taken left to right, so the particular solution (free variables
set to zero) is deterministic.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Generic, Hashable, List, Mapping, Optional, Sequence, Tuple, TypeVar

from pydantic import BaseModel, ConfigDict
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from algebra.errors import AlgebraMismatch, NoSolution, NonlinearUnknown, SignatureMismatch
from algebra.grassmann import GrassmannElement, Parity, Scalar, popcount
from algebra.superpoly import SuperDomainSignature, SuperPolynomial, TermKey
from algebra.supermap import SuperMap, compose, determinant

__all__ = [
    "SolutionSet",
    "MapEquation",
    "mult_operator_matrix",
    "annihilator",
    "solve_linear",
    "solve_map_ansatz",
    "find_inverse",
    "is_chart",
    "solve_augmented",
]

logger = logging.getLogger(__name__)

SolutionT = TypeVar("SolutionT", GrassmannElement, SuperMap)
SparseRow = Dict[int, Fraction]


# ---------- exact elimination -----------------------------------------

def _rref(rows: Sequence[Mapping[int, Fraction]], n_cols: int) -> Tuple[List[SparseRow], Tuple[int, ...]]:
    if not rows or n_cols == 0:
        return [], ()
    data = {}
    for i, row in enumerate(rows):
        entries = {j: QQ(c.numerator, c.denominator) for j, c in row.items() if c}
        if entries:
            data[i] = entries
    if not data:
        return [], ()
    reduced, pivots = DomainMatrix(data, (len(rows), n_cols), QQ).rref()
    sparse = reduced.to_sparse().rep
    out = []
    for i in range(len(pivots)):
        line = sparse.get(i, {})
        out.append({j: Fraction(int(v.numerator), int(v.denominator)) for j, v in line.items()})
    return out, tuple(pivots)


def solve_augmented(
    rows: Sequence[Mapping[int, Fraction]],
    rhs: Sequence[Fraction],
    n_unknowns: int,
) -> Optional[Tuple[SparseRow, List[SparseRow]]]:
    """Solve ``rows · x = rhs``; returns (particular, kernel vectors) or ``None``."""
    augmented = []
    for row, value in zip(rows, rhs):
        line = dict(row)
        if value:
            line[n_unknowns] = Fraction(value)
        augmented.append(line)
    reduced, pivots = _rref(augmented, n_unknowns + 1)
    if n_unknowns in pivots:
        return None
    particular: SparseRow = {}
    for line, p in zip(reduced, pivots):
        value = line.get(n_unknowns, Fraction(0))
        if value:
            particular[p] = value
    pivot_set = set(pivots)
    kernel: List[SparseRow] = []
    for free in range(n_unknowns):
        if free in pivot_set:
            continue
        vec: SparseRow = {free: Fraction(1)}
        for line, p in zip(reduced, pivots):
            coef = line.get(free)
            if coef:
                vec[p] = -coef
        kernel.append(vec)
    return particular, kernel


def _rank(vectors: Sequence[Mapping[int, Fraction]], n_cols: int) -> int:
    return len(_rref(vectors, n_cols)[1])


# ---------- solution sets ---------------------------------------------

def _scaled(value, factor: Fraction):
    if isinstance(value, SuperMap):
        return value.scale(factor)
    return value * factor


def _vectorize(value) -> Dict[Hashable, Fraction]:
    if isinstance(value, SuperMap):
        return {(k, key): c for k, comp in enumerate(value.components) for key, c in comp.terms.items()}
    return dict(value.terms)


class SolutionSet(BaseModel, Generic[SolutionT]):
    """Affine family ``particular + span(kernel_basis)`` over the rationals."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    particular: SolutionT
    kernel_basis: Tuple[SolutionT, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.kernel_basis)

    def member(self, coefficients: Sequence[Scalar]) -> SolutionT:
        if len(coefficients) != len(self.kernel_basis):
            raise ValueError(f"need {len(self.kernel_basis)} coefficients, got {len(coefficients)}")
        out = self.particular
        for c, basis in zip(coefficients, self.kernel_basis):
            if c:
                out = out + _scaled(basis, Fraction(c))
        return out

    def contains(self, value: SolutionT) -> bool:
        diff = _vectorize(value - self.particular)
        if not diff:
            return True
        vectors = [_vectorize(b) for b in self.kernel_basis]
        index: Dict[Hashable, int] = {}
        for vec in vectors + [diff]:
            for key in vec:
                index.setdefault(key, len(index))
        rows = [{index[k]: c for k, c in vec.items()} for vec in vectors]
        base = _rank(rows, len(index))
        return _rank(rows + [{index[k]: c for k, c in diff.items()}], len(index)) == base


# ---------- elements --------------------------------------------------

def mult_operator_matrix(a: GrassmannElement) -> Tuple[Tuple[Fraction, ...], ...]:
    """Matrix of ``x -> a*x`` in the monomial basis; column j is ``a * monomial(j)``."""
    size = 1 << a.n_generators
    columns = [(a * GrassmannElement(a.n_generators, {j: 1})).coordinates() for j in range(size)]
    return tuple(tuple(columns[j][i] for j in range(size)) for i in range(size))


def _sparse_rows(matrix: Sequence[Sequence[Fraction]]) -> List[SparseRow]:
    return [{j: v for j, v in enumerate(row) if v} for row in matrix]


def annihilator(a: GrassmannElement) -> List[GrassmannElement]:
    size = 1 << a.n_generators
    solved = solve_augmented(_sparse_rows(mult_operator_matrix(a)), [Fraction(0)] * size, size)
    assert solved is not None
    _, kernel = solved
    return [GrassmannElement(a.n_generators, vec) for vec in kernel]


def solve_linear(a: GrassmannElement, b: GrassmannElement) -> SolutionSet[GrassmannElement]:
    """All ``x`` with ``a * x == b``."""
    if a.n_generators != b.n_generators:
        raise AlgebraMismatch(f"Λ({a.n_generators}) vs Λ({b.n_generators})")
    size = 1 << a.n_generators
    solved = solve_augmented(_sparse_rows(mult_operator_matrix(a)), b.coordinates(), size)
    if solved is None:
        raise NoSolution(f"{b.render()} is not a multiple of {a.render()}")
    particular, kernel = solved
    n = a.n_generators
    return SolutionSet(
        particular=GrassmannElement(n, particular),
        kernel_basis=tuple(GrassmannElement(n, vec) for vec in kernel),
    )


# ---------- map equations ---------------------------------------------

Image = Tuple[SuperPolynomial, ...]


def _is_affine(comp: SuperPolynomial) -> bool:
    return all(sum(e) + popcount(o) <= 1 for (_, e, o) in comp.terms)


def _linear_coefficient(comp: SuperPolynomial, position: int) -> GrassmannElement:
    """Grassmann coefficient standing left of coordinate ``position`` in an affine polynomial."""
    sig = comp.signature
    terms: Dict[int, Fraction] = {}
    for (g, e, o), c in comp.terms.items():
        if position < sig.n_even:
            hit = o == 0 and sum(e) == 1 and e[position] == 1
        else:
            hit = sum(e) == 0 and o == 1 << (position - sig.n_even)
        if hit:
            terms[g] = c
    return GrassmannElement(comp.n_generators, terms)


class MapEquation(BaseModel):
    """
    ``constant + L(unknown) = rhs`` with ``L`` linear in the unknown map's
    coefficients; ``operator(k, p)`` is ``L`` applied to the map whose
    ``k``-th component is ``p`` and whose other components vanish.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    unknown_source: SuperDomainSignature
    unknown_target: SuperDomainSignature
    n_generators: int
    operator: Callable[[int, SuperPolynomial], Image]
    constant: Image
    rhs: Image
    componentwise: bool = False
    degree_hint: int = 0

    @classmethod
    def composition(
        cls,
        rhs: SuperMap,
        outer: Optional[SuperMap] = None,
        inner: Optional[SuperMap] = None,
    ) -> "MapEquation":
        """``outer ∘ inner = rhs`` with exactly one side left unknown (``None``)."""
        n = rhs.n_generators
        if outer is None and inner is None:
            raise NonlinearUnknown("the unknown map would be composed with itself")
        if outer is None:
            if inner.source != rhs.source:
                raise SignatureMismatch("inner map and right-hand side have different sources")
            src = inner.source

            def operator(k: int, poly: SuperPolynomial) -> Image:
                zero = SuperPolynomial.zero(src, n)
                image = poly.substitute(inner.components, target=src)
                return tuple(image if i == k else zero for i in range(rhs.target.dimension))

            return cls(
                unknown_source=inner.target,
                unknown_target=rhs.target,
                n_generators=n,
                operator=operator,
                constant=tuple(SuperPolynomial.zero(src, n) for _ in rhs.components),
                rhs=rhs.components,
                componentwise=True,
                degree_hint=max(inner.degree(), rhs.degree()),
            )
        if inner is not None:
            raise ValueError("one side of the composition must be unknown")
        if outer.target != rhs.target:
            raise SignatureMismatch("outer map and right-hand side have different targets")
        if not all(_is_affine(c) for c in outer.components):
            raise NonlinearUnknown("unknown inner map under a non-affine outer map")
        src = rhs.source
        coeffs = [
            [
                SuperPolynomial.constant(src, n, _linear_coefficient(comp, pos))
                for pos in range(outer.source.dimension)
            ]
            for comp in outer.components
        ]
        offsets = tuple(
            SuperPolynomial.constant(src, n, _linear_coefficient_free(comp)) for comp in outer.components
        )

        def operator(k: int, poly: SuperPolynomial) -> Image:
            return tuple(row[k] * poly for row in coeffs)

        return cls(
            unknown_source=rhs.source,
            unknown_target=outer.source,
            n_generators=n,
            operator=operator,
            constant=offsets,
            rhs=rhs.components,
            componentwise=False,
            degree_hint=rhs.degree(),
        )

    @classmethod
    def scaled(
        cls,
        scalar: GrassmannElement,
        rhs: Sequence[SuperPolynomial],
        unknown_source: SuperDomainSignature,
        unknown_target: SuperDomainSignature,
        degree_hint: int = 0,
    ) -> "MapEquation":
        """``scalar * unknown = rhs`` componentwise; the scalar is never cancelled."""
        n = scalar.n_generators
        rhs = tuple(rhs)
        if len(rhs) != unknown_target.dimension:
            raise SignatureMismatch("one right-hand side per unknown component is required")
        for r in rhs:
            if r.signature != unknown_source:
                raise SignatureMismatch("right-hand side must be a polynomial over the unknown's source")
        coef = SuperPolynomial.constant(unknown_source, n, scalar)
        zero = SuperPolynomial.zero(unknown_source, n)

        def operator(k: int, poly: SuperPolynomial) -> Image:
            image = coef * poly
            return tuple(image if i == k else zero for i in range(len(rhs)))

        return cls(
            unknown_source=unknown_source,
            unknown_target=unknown_target,
            n_generators=n,
            operator=operator,
            constant=tuple(zero for _ in rhs),
            rhs=rhs,
            componentwise=True,
            degree_hint=max((r.degree() for r in rhs), default=0) + degree_hint,
        )


def _linear_coefficient_free(comp: SuperPolynomial) -> GrassmannElement:
    return GrassmannElement(
        comp.n_generators, {g: c for (g, e, o), c in comp.terms.items() if sum(e) == 0 and o == 0}
    )


def _exponent_vectors(n_even: int, bound: int) -> List[Tuple[int, ...]]:
    if n_even == 0:
        return [()]
    return [e for e in product(range(bound + 1), repeat=n_even) if sum(e) <= bound]


def _ansatz(source: SuperDomainSignature, n: int, parity: Parity, bound: int) -> List[TermKey]:
    want = 0 if parity is Parity.even else 1
    keys = []
    for exps in _exponent_vectors(source.n_even, bound):
        for omask in range(1 << source.n_odd):
            for gmask in range(1 << n):
                if (popcount(gmask) + popcount(omask)) & 1 == want:
                    keys.append((gmask, exps, omask))
    return keys


def _solve_block(
    eq: MapEquation,
    components: Sequence[int],
    bound: int,
) -> Tuple[Dict[int, Dict[TermKey, Fraction]], List[Dict[int, Dict[TermKey, Fraction]]]]:
    src, n = eq.unknown_source, eq.n_generators
    unknowns: List[Tuple[int, TermKey]] = []
    for k in components:
        for key in _ansatz(src, n, eq.unknown_target.coordinate_parity(k), bound):
            unknowns.append((k, key))
    rows_index: Dict[Tuple[int, TermKey], int] = {}
    rows: List[SparseRow] = []
    eq_components = components if eq.componentwise else range(len(eq.rhs))

    def row_for(i: int, key: TermKey) -> SparseRow:
        if (i, key) not in rows_index:
            rows_index[(i, key)] = len(rows)
            rows.append({})
        return rows[rows_index[(i, key)]]

    for col, (k, key) in enumerate(unknowns):
        image = eq.operator(k, SuperPolynomial(src, n, {key: 1}))
        for i in eq_components:
            for term, coef in image[i].terms.items():
                row_for(i, term)[col] = coef
    targets: Dict[int, Fraction] = {}
    for i in eq_components:
        for term, coef in (eq.rhs[i] - eq.constant[i]).terms.items():
            row_for(i, term)
            targets[rows_index[(i, term)]] = coef
    rhs_vec = [targets.get(r, Fraction(0)) for r in range(len(rows))]
    logger.debug("ansatz block %s: %d unknowns, %d equations", list(components), len(unknowns), len(rows))
    solved = solve_augmented(rows, rhs_vec, len(unknowns))
    if solved is None:
        raise NoSolution(f"no polynomial solution of degree <= {bound}")
    particular, kernel = solved

    def split(vec: SparseRow) -> Dict[int, Dict[TermKey, Fraction]]:
        out: Dict[int, Dict[TermKey, Fraction]] = {}
        for col, coef in vec.items():
            k, key = unknowns[col]
            out.setdefault(k, {})[key] = coef
        return out

    return split(particular), [split(v) for v in kernel]


def _assemble(eq: MapEquation, parts: Mapping[int, Mapping[TermKey, Fraction]]) -> SuperMap:
    comps = [
        SuperPolynomial(eq.unknown_source, eq.n_generators, parts.get(k, {}))
        for k in range(eq.unknown_target.dimension)
    ]
    return SuperMap(eq.unknown_source, eq.unknown_target, comps, eq.n_generators)


def solve_map_ansatz(eq: MapEquation, degree_bound: Optional[int] = None) -> SolutionSet[SuperMap]:
    """Every unknown map of even degree ``<= degree_bound`` solving ``eq``."""
    bound = degree_bound if degree_bound is not None else eq.degree_hint + eq.n_generators
    if bound < 0:
        raise ValueError("degree_bound must be non-negative")
    dims = range(eq.unknown_target.dimension)
    blocks = [[k] for k in dims] if eq.componentwise else [list(dims)]
    particular: Dict[int, Dict[TermKey, Fraction]] = {}
    kernel: List[SuperMap] = []
    for block in blocks:
        part, vecs = _solve_block(eq, block, bound)
        particular.update(part)
        kernel.extend(_assemble(eq, v) for v in vecs)
    return SolutionSet(particular=_assemble(eq, particular), kernel_basis=tuple(kernel))


# ---------- inverses --------------------------------------------------

def _body_jacobian_invertible(f: SuperMap) -> bool:
    src = f.source
    origin = [0] * src.dimension
    n = f.n_generators

    def body_block(comps: Sequence[SuperPolynomial], odd: bool) -> List[List[GrassmannElement]]:
        out = []
        for comp in comps:
            if odd:
                line = [comp.derivative_odd(j).evaluate(origin) for j in range(1, src.n_odd + 1)]
            else:
                line = [comp.derivative_even(i).evaluate(origin) for i in range(1, src.n_even + 1)]
            out.append([GrassmannElement.scalar(n, v.body()) for v in line])
        return out

    a = body_block(f.even_components(), odd=False)
    d = body_block(f.odd_components(), odd=True)
    return bool(determinant(a, n).body()) and bool(determinant(d, n).body())


def find_inverse(f: SuperMap, degree_bound: Optional[int] = None) -> Optional[SuperMap]:
    """A two-sided polynomial inverse within the degree bound, or ``None``."""
    if f.source != f.target or not _body_jacobian_invertible(f):
        return None
    identity = SuperMap.identity(f.source, f.n_generators)
    try:
        family = solve_map_ansatz(MapEquation.composition(rhs=identity, inner=f), degree_bound)
    except NoSolution:
        return None
    candidate = family.particular
    if compose(f, candidate) != identity:
        logger.debug("left inverse of %s is not a right inverse", f.render())
        return None
    return candidate


def is_chart(f: SuperMap, degree_bound: Optional[int] = None) -> bool:
    return find_inverse(f, degree_bound) is not None

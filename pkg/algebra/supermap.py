"""
Polynomial supermaps ``R^{n|m} -> R^{n'|m'}``: composition, super-Jacobian,
Berezinian and orientation classification.
"""
from __future__ import annotations

import logging
from enum import Enum
from fractions import Fraction
from itertools import permutations
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from algebra.errors import AlgebraMismatch, OddBlockSingular, ParityViolation, SignatureMismatch
from algebra.grassmann import GrassmannElement, Parity, Scalar
from algebra.superpoly import PointValue, SuperDomainSignature, SuperPolynomial

__all__ = [
    "SuperMap",
    "SuperJacobian",
    "BerezinianResult",
    "OrientationKind",
    "OrientationClass",
    "compose",
    "chain",
    "map_equal",
    "super_jacobian",
    "berezinian",
    "orientation_class",
    "determinant",
]

logger = logging.getLogger(__name__)


class SuperMap:
    """Immutable map given by one polynomial per target coordinate."""

    __slots__ = ("_source", "_target", "_n", "_components", "_hash")

    def __init__(
        self,
        source: SuperDomainSignature,
        target: SuperDomainSignature,
        components: Sequence[SuperPolynomial],
        n_generators: Optional[int] = None,
    ):
        components = tuple(components)
        if len(components) != target.dimension:
            raise SignatureMismatch(
                f"{target} needs {target.dimension} components, got {len(components)}"
            )
        if n_generators is None:
            if not components:
                raise SignatureMismatch("n_generators is required for a map into 0|0")
            n_generators = components[0].n_generators
        for pos, comp in enumerate(components):
            if comp.signature != source:
                raise SignatureMismatch(
                    f"component {pos + 1} is a polynomial over {comp.signature}, not {source}"
                )
            if comp.n_generators != n_generators:
                raise AlgebraMismatch(f"component {pos + 1} lives in Λ({comp.n_generators})")
            expected = target.coordinate_parity(pos)
            got = comp.parity()
            if got not in (expected, Parity.zero):
                name = target.coordinate_names()[pos]
                raise ParityViolation(f"component {name}' = {comp.render()} is {got.value}, needs {expected.value}")
        self._source = source
        self._target = target
        self._n = n_generators
        self._components = components
        self._hash: Optional[int] = None

    @classmethod
    def identity(cls, signature: SuperDomainSignature, n_generators: int) -> "SuperMap":
        comps = [
            SuperPolynomial.coordinate(signature, n_generators, p) for p in range(signature.dimension)
        ]
        return cls(signature, signature, comps, n_generators)

    @classmethod
    def constant(
        cls,
        source: SuperDomainSignature,
        target: SuperDomainSignature,
        values: Sequence[PointValue],
        n_generators: int,
    ) -> "SuperMap":
        comps = [SuperPolynomial.constant(source, n_generators, v) for v in values]
        return cls(source, target, comps, n_generators)

    # ---------- accessors ---------------------------------------------

    @property
    def source(self) -> SuperDomainSignature:
        return self._source

    @property
    def target(self) -> SuperDomainSignature:
        return self._target

    @property
    def n_generators(self) -> int:
        return self._n

    @property
    def components(self) -> Tuple[SuperPolynomial, ...]:
        return self._components

    def even_components(self) -> Tuple[SuperPolynomial, ...]:
        return self._components[: self._target.n_even]

    def odd_components(self) -> Tuple[SuperPolynomial, ...]:
        return self._components[self._target.n_even:]

    def degree(self) -> int:
        return max((c.degree() for c in self._components), default=0)

    def is_endomap(self) -> bool:
        return self._source == self._target

    # ---------- algebra -----------------------------------------------

    def _same_shape(self, other: "SuperMap") -> None:
        if self._source != other._source or self._target != other._target:
            raise SignatureMismatch(
                f"maps {self._source}->{self._target} and {other._source}->{other._target} differ in shape"
            )
        if self._n != other._n:
            raise AlgebraMismatch(f"Λ({self._n}) vs Λ({other._n})")

    def __add__(self, other: "SuperMap") -> "SuperMap":
        if not isinstance(other, SuperMap):
            return NotImplemented
        self._same_shape(other)
        comps = [a + b for a, b in zip(self._components, other._components)]
        return SuperMap(self._source, self._target, comps, self._n)

    def __sub__(self, other: "SuperMap") -> "SuperMap":
        if not isinstance(other, SuperMap):
            return NotImplemented
        self._same_shape(other)
        comps = [a - b for a, b in zip(self._components, other._components)]
        return SuperMap(self._source, self._target, comps, self._n)

    def scale(self, factor: Scalar) -> "SuperMap":
        return SuperMap(self._source, self._target, [c.scale(factor) for c in self._components], self._n)

    def after(self, inner: "SuperMap") -> "SuperMap":
        return compose(self, inner)

    def evaluate(self, point: Sequence[PointValue]) -> Tuple[GrassmannElement, ...]:
        return tuple(c.evaluate(point) for c in self._components)

    def embed_source(
        self,
        source: SuperDomainSignature,
        even_positions: Optional[Sequence[int]] = None,
        odd_positions: Optional[Sequence[int]] = None,
    ) -> "SuperMap":
        """The same map read as a function of a larger source that ignores the extra coordinates."""
        comps = [c.embed(source, even_positions, odd_positions) for c in self._components]
        return SuperMap(source, self._target, comps, self._n)

    # ---------- comparison / display ----------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SuperMap):
            return NotImplemented
        return (
            self._source == other._source
            and self._target == other._target
            and self._n == other._n
            and self._components == other._components
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._source, self._target, self._n, self._components))
        return self._hash

    def render(self) -> str:
        names = self._target.coordinate_names()
        return "; ".join(f"{name}' = {comp.render()}" for name, comp in zip(names, self._components))

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"SuperMap({self._source}->{self._target}, N={self._n}, {self.render()!r})"


def compose(outer: SuperMap, inner: SuperMap) -> SuperMap:
    """``outer ∘ inner``: ``inner`` is applied first."""
    if inner.target != outer.source:
        raise SignatureMismatch(
            f"cannot compose {outer.source}->{outer.target} after {inner.source}->{inner.target}"
        )
    if inner.n_generators != outer.n_generators:
        raise AlgebraMismatch(f"Λ({outer.n_generators}) vs Λ({inner.n_generators})")
    comps = [c.substitute(inner.components, target=inner.source) for c in outer.components]
    return SuperMap(inner.source, outer.target, comps, outer.n_generators)


def chain(maps: Sequence[SuperMap]) -> SuperMap:
    """``maps[0] ∘ maps[1] ∘ ... ∘ maps[-1]``; the last map is applied first."""
    if not maps:
        raise ValueError("chain of zero maps")
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = compose(m, out)
    return out


def map_equal(f: SuperMap, g: SuperMap) -> bool:
    if f.source != g.source or f.target != g.target:
        raise SignatureMismatch(
            f"cannot compare {f.source}->{f.target} with {g.source}->{g.target}"
        )
    return f == g


# ---------- Jacobian / Berezinian -------------------------------------

Block = Tuple[Tuple[SuperPolynomial, ...], ...]


class SuperJacobian(BaseModel):
    """Blocks of left derivatives: rows are target coordinates, columns source coordinates."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: Block
    b: Block
    c: Block
    d: Block


def super_jacobian(f: SuperMap) -> SuperJacobian:
    src = f.source

    def row(comp: SuperPolynomial) -> Tuple[Tuple[SuperPolynomial, ...], Tuple[SuperPolynomial, ...]]:
        evens = tuple(comp.derivative_even(i) for i in range(1, src.n_even + 1))
        odds = tuple(comp.derivative_odd(j) for j in range(1, src.n_odd + 1))
        return evens, odds

    top = [row(c) for c in f.even_components()]
    bottom = [row(c) for c in f.odd_components()]
    return SuperJacobian(
        a=tuple(r[0] for r in top),
        b=tuple(r[1] for r in top),
        c=tuple(r[0] for r in bottom),
        d=tuple(r[1] for r in bottom),
    )


Matrix = List[List[GrassmannElement]]


def _perm_sign(perm: Sequence[int]) -> int:
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inversions & 1 else 1


def determinant(matrix: Matrix, n_generators: int) -> GrassmannElement:
    """Leibniz expansion; valid because the entries are even and commute."""
    size = len(matrix)
    total = GrassmannElement.zero(n_generators)
    if size == 0:
        return GrassmannElement.scalar(n_generators, 1)
    for perm in permutations(range(size)):
        prod = GrassmannElement.scalar(n_generators, _perm_sign(perm))
        for i, j in enumerate(perm):
            prod = prod * matrix[i][j]
            if prod.is_zero():
                break
        total = total + prod
    return total


def _minor(matrix: Matrix, row: int, col: int) -> Matrix:
    return [[v for j, v in enumerate(r) if j != col] for i, r in enumerate(matrix) if i != row]


def _inverse(matrix: Matrix, det: GrassmannElement, n_generators: int) -> Matrix:
    inv_det = det.invert()
    size = len(matrix)
    out: Matrix = [[GrassmannElement.zero(n_generators)] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            cof = determinant(_minor(matrix, i, j), n_generators)
            if (i + j) & 1:
                cof = -cof
            out[j][i] = cof * inv_det
    return out


def _matmul(left: Matrix, right: Matrix, rows: int, cols: int, n_generators: int) -> Matrix:
    inner = len(right)
    out: Matrix = []
    for i in range(rows):
        line = []
        for j in range(cols):
            acc = GrassmannElement.zero(n_generators)
            for k in range(inner):
                acc = acc + left[i][k] * right[k][j]
            line.append(acc)
        out.append(line)
    return out


class OrientationKind(str, Enum):
    sign_pair = "sign_pair"
    nilpotent = "nilpotent"
    zero = "zero"

    @classmethod
    def _missing_(cls, value: object) -> "OrientationKind":
        if not isinstance(value, str):
            raise ValueError(f"Unknown orientation kind: {value}")
        val = value.strip().lower()
        synonyms = {"signpair": "sign_pair", "signs": "sign_pair", "zeroberezinian": "zero"}
        if val in synonyms:
            return cls(synonyms[val])
        return super()._missing_(val)


class OrientationClass(BaseModel):
    """Three-way orientation class of a Berezinian value."""

    model_config = ConfigDict(frozen=True)

    kind: OrientationKind
    signs: Optional[Tuple[str, str]] = None
    degree: Optional[int] = None

    def render(self) -> str:
        if self.kind is OrientationKind.sign_pair:
            return f"SignPair({self.signs[0]}, {self.signs[1]})"
        if self.kind is OrientationKind.nilpotent:
            return f"Nilpotent({self.degree})"
        return "ZeroBerezinian"


def _sign(value: Fraction) -> str:
    return "+" if value > 0 else "-"


def orientation_class(
    ber: GrassmannElement,
    factor_bodies: Optional[Tuple[Fraction, Fraction]] = None,
) -> OrientationClass:
    """
    Classify a Berezinian; ``factor_bodies`` are the (Schur factor, odd-block
    factor) bodies and are required whenever ``ber`` has a nonzero body.
    """
    if ber.is_zero():
        return OrientationClass(kind=OrientationKind.zero)
    if not ber.body():
        return OrientationClass(kind=OrientationKind.nilpotent, degree=ber.nilpotency_index())
    if factor_bodies is None or not all(factor_bodies):
        raise ValueError("a Berezinian with nonzero body needs both nonzero factor bodies")
    schur, odd = factor_bodies
    if (schur / odd > 0) != (ber.body() > 0):
        raise ValueError(f"factor bodies {schur}, {odd} disagree with the body {ber.body()}")
    return OrientationClass(kind=OrientationKind.sign_pair, signs=(_sign(schur), _sign(odd)))


class BerezinianResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: GrassmannElement
    schur_factor: GrassmannElement
    odd_factor: GrassmannElement
    orientation: OrientationClass


def berezinian(f: SuperMap, at: Optional[Sequence[PointValue]] = None) -> BerezinianResult:
    """
    Superdeterminant of the Jacobian at a superpoint.

    ``at`` lists the even coordinates, optionally followed by the odd ones;
    missing coordinates are zero. The B block holds left derivatives, which
    for even components are the negatives of right derivatives, hence the
    ``A + B D^-1 C`` Schur complement.
    """
    if f.source != f.target:
        raise SignatureMismatch(f"Berezinian needs a square Jacobian, got {f.source}->{f.target}")
    sig = f.source
    n = f.n_generators
    point: List[PointValue] = list(at or [])
    if len(point) not in (0, sig.n_even, sig.dimension):
        raise SignatureMismatch(f"point must list {sig.n_even} even or {sig.dimension} coordinates")
    point.extend([0] * (sig.dimension - len(point)))

    jac = super_jacobian(f)

    def ev(block: Block) -> Matrix:
        return [[entry.evaluate(point) for entry in line] for line in block]

    a, b, c, d = ev(jac.a), ev(jac.b), ev(jac.c), ev(jac.d)
    odd_det = determinant(d, n)
    if not odd_det.body():
        raise OddBlockSingular(f"det D = {odd_det.render()} has zero body")
    schur = a
    if sig.n_odd and sig.n_even:
        correction = _matmul(_matmul(b, _inverse(d, odd_det, n), sig.n_even, sig.n_odd, n), c, sig.n_even, sig.n_even, n)
        schur = [[a[i][j] + correction[i][j] for j in range(sig.n_even)] for i in range(sig.n_even)]
    schur_det = determinant(schur, n)
    value = schur_det * odd_det.invert()
    logger.debug("Berezinian of %s at %s: %s", f.render(), point, value.render())
    return BerezinianResult(
        value=value,
        schur_factor=schur_det,
        odd_factor=odd_det,
        orientation=orientation_class(value, (schur_det.body(), odd_det.body())),
    )

"""
Polynomials in even coordinates ``x1..xn`` and odd coordinates ``t1..tm``
with Grassmann-algebra coefficients.

A term is stored fully expanded as ``r * g_S * x^e * t_O`` under the key
``(S, e, O)``: ``S`` a generator mask, ``e`` a tuple of even exponents, ``O``
an odd-variable mask. Generators and odd variables anticommute with each
other, so moving ``g_S`` of a right factor past ``t_O`` of a left factor
costs ``(-1)^(|O||S|)``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from algebra.errors import AlgebraMismatch, SignatureMismatch
from algebra.grassmann import (
    GrassmannElement,
    Parity,
    Scalar,
    mask_indices,
    merge_sign,
    popcount,
    render_terms,
)

__all__ = ["SuperDomainSignature", "SuperPolynomial", "TermKey", "PointValue"]

TermKey = Tuple[int, Tuple[int, ...], int]
PointValue = Union[GrassmannElement, int, Fraction]


class SuperDomainSignature(BaseModel):
    """Dimension ``n|m`` of a superdomain."""

    model_config = ConfigDict(frozen=True)

    n_even: int = Field(default=0, ge=0)
    n_odd: int = Field(default=0, ge=0)

    @property
    def dimension(self) -> int:
        return self.n_even + self.n_odd

    def direct_sum(self, other: "SuperDomainSignature") -> "SuperDomainSignature":
        """``self ⊕ other``: evens of ``self`` then of ``other``, likewise for odds."""
        return SuperDomainSignature(
            n_even=self.n_even + other.n_even, n_odd=self.n_odd + other.n_odd
        )

    def coordinate_names(self) -> Tuple[str, ...]:
        return tuple(f"x{i}" for i in range(1, self.n_even + 1)) + tuple(
            f"t{j}" for j in range(1, self.n_odd + 1)
        )

    def coordinate_parity(self, position: int) -> Parity:
        return Parity.even if position < self.n_even else Parity.odd

    def __str__(self) -> str:
        return f"{self.n_even}|{self.n_odd}"


def _sort_key(key: TermKey):
    gmask, exps, omask = key
    return (
        sum(exps),
        tuple(-e for e in exps),
        popcount(omask),
        mask_indices(omask),
        popcount(gmask),
        mask_indices(gmask),
    )


class SuperPolynomial:
    """Immutable canonical polynomial over one signature and one algebra."""

    __slots__ = ("_sig", "_n", "_terms", "_hash")

    def __init__(
        self,
        signature: SuperDomainSignature,
        n_generators: int,
        terms: Optional[Mapping[TermKey, Scalar]] = None,
    ):
        glimit = 1 << n_generators
        olimit = 1 << signature.n_odd
        clean: Dict[TermKey, Fraction] = {}
        for (gmask, exps, omask), coef in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != signature.n_even or any(e < 0 for e in exps):
                raise SignatureMismatch(f"exponent vector {exps} does not fit {signature}")
            if not 0 <= gmask < glimit or not 0 <= omask < olimit:
                raise SignatureMismatch(f"term mask out of range for {signature}, N={n_generators}")
            c = Fraction(coef)
            if c:
                key = (gmask, exps, omask)
                total = clean.get(key, Fraction(0)) + c
                if total:
                    clean[key] = total
                else:
                    clean.pop(key, None)
        self._sig = signature
        self._n = n_generators
        self._terms = clean
        self._hash: Optional[int] = None

    # ---------- constructors ------------------------------------------

    @classmethod
    def zero(cls, signature: SuperDomainSignature, n_generators: int) -> "SuperPolynomial":
        return cls(signature, n_generators)

    @classmethod
    def constant(
        cls, signature: SuperDomainSignature, n_generators: int, value: PointValue
    ) -> "SuperPolynomial":
        if isinstance(value, GrassmannElement):
            if value.n_generators != n_generators:
                raise AlgebraMismatch("constant lives in a different algebra")
            items = value.terms.items()
        else:
            items = [(0, Fraction(value))]
        zeros = (0,) * signature.n_even
        return cls(signature, n_generators, {(m, zeros, 0): c for m, c in items})

    @classmethod
    def coordinate(
        cls, signature: SuperDomainSignature, n_generators: int, position: int
    ) -> "SuperPolynomial":
        """The coordinate function at 0-based ``position`` (evens first, then odds)."""
        if not 0 <= position < signature.dimension:
            raise SignatureMismatch(f"coordinate {position} outside {signature}")
        if position < signature.n_even:
            exps = tuple(1 if i == position else 0 for i in range(signature.n_even))
            return cls(signature, n_generators, {(0, exps, 0): 1})
        j = position - signature.n_even
        return cls(signature, n_generators, {(0, (0,) * signature.n_even, 1 << j): 1})

    @classmethod
    def even_variable(cls, signature: SuperDomainSignature, n_generators: int, index: int):
        return cls.coordinate(signature, n_generators, index - 1)

    @classmethod
    def odd_variable(cls, signature: SuperDomainSignature, n_generators: int, index: int):
        return cls.coordinate(signature, n_generators, signature.n_even + index - 1)

    # ---------- accessors ---------------------------------------------

    @property
    def signature(self) -> SuperDomainSignature:
        return self._sig

    @property
    def n_generators(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[TermKey, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[TermKey, Fraction]]:
        for key in sorted(self._terms, key=_sort_key):
            yield key, self._terms[key]

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 and o == 0 for (_, e, o) in self._terms)

    def as_element(self) -> GrassmannElement:
        if not self.is_constant():
            raise SignatureMismatch("polynomial depends on coordinates")
        return GrassmannElement(self._n, {g: c for (g, _, _), c in self._terms.items()})

    def degree(self) -> int:
        """Largest total even degree of a term (0 for the zero polynomial)."""
        return max((sum(e) for (_, e, _) in self._terms), default=0)

    def parity(self) -> Parity:
        if not self._terms:
            return Parity.zero
        kinds = {(popcount(g) + popcount(o)) & 1 for (g, _, o) in self._terms}
        if kinds == {0}:
            return Parity.even
        if kinds == {1}:
            return Parity.odd
        return Parity.mixed

    # ---------- arithmetic --------------------------------------------

    def _same_space(self, other: "SuperPolynomial") -> None:
        if other._n != self._n:
            raise AlgebraMismatch(f"Λ({self._n}) vs Λ({other._n})")
        if other._sig != self._sig:
            raise SignatureMismatch(f"polynomials over {self._sig} and {other._sig}")

    def _lift(self, other: object) -> "SuperPolynomial":
        if isinstance(other, SuperPolynomial):
            self._same_space(other)
            return other
        if isinstance(other, (GrassmannElement, int, Fraction)):
            return SuperPolynomial.constant(self._sig, self._n, other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "SuperPolynomial":
        rhs = self._lift(other)
        if rhs is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for key, coef in rhs._terms.items():
            terms[key] = terms.get(key, Fraction(0)) + coef
        return SuperPolynomial(self._sig, self._n, terms)

    __radd__ = __add__

    def __neg__(self) -> "SuperPolynomial":
        return SuperPolynomial(self._sig, self._n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: object) -> "SuperPolynomial":
        rhs = self._lift(other)
        if rhs is NotImplemented:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> "SuperPolynomial":
        lhs = self._lift(other)
        if lhs is NotImplemented:
            return NotImplemented
        return lhs - self

    def __mul__(self, other: object) -> "SuperPolynomial":
        rhs = self._lift(other)
        if rhs is NotImplemented:
            return NotImplemented
        terms: Dict[TermKey, Fraction] = {}
        for (g1, e1, o1), c1 in self._terms.items():
            o1_odd = popcount(o1) & 1
            for (g2, e2, o2), c2 in rhs._terms.items():
                sg = merge_sign(g1, g2)
                if not sg:
                    continue
                so = merge_sign(o1, o2)
                if not so:
                    continue
                sign = sg * so
                if o1_odd and popcount(g2) & 1:
                    sign = -sign
                key = (g1 | g2, tuple(a + b for a, b in zip(e1, e2)), o1 | o2)
                terms[key] = terms.get(key, Fraction(0)) + sign * c1 * c2
        return SuperPolynomial(self._sig, self._n, terms)

    def __rmul__(self, other: object) -> "SuperPolynomial":
        lhs = self._lift(other)
        if lhs is NotImplemented:
            return NotImplemented
        return lhs * self

    def scale(self, factor: Scalar) -> "SuperPolynomial":
        f = Fraction(factor)
        return SuperPolynomial(self._sig, self._n, {k: c * f for k, c in self._terms.items()})

    # ---------- calculus ----------------------------------------------

    def derivative_even(self, index: int) -> "SuperPolynomial":
        """Partial derivative by ``x_index`` (1-based)."""
        i = index - 1
        if not 0 <= i < self._sig.n_even:
            raise SignatureMismatch(f"x{index} not a coordinate of {self._sig}")
        terms: Dict[TermKey, Fraction] = {}
        for (g, e, o), c in self._terms.items():
            if e[i]:
                lowered = e[:i] + (e[i] - 1,) + e[i + 1:]
                terms[(g, lowered, o)] = c * e[i]
        return SuperPolynomial(self._sig, self._n, terms)

    def derivative_odd(self, index: int) -> "SuperPolynomial":
        """Left derivative by ``t_index``: ``t_j`` is moved to the front before removal."""
        j = index - 1
        if not 0 <= j < self._sig.n_odd:
            raise SignatureMismatch(f"t{index} not a coordinate of {self._sig}")
        bit = 1 << j
        below = bit - 1
        terms: Dict[TermKey, Fraction] = {}
        for (g, e, o), c in self._terms.items():
            if o & bit:
                swaps = popcount(g) + popcount(o & below)
                terms[(g, e, o & ~bit)] = -c if swaps & 1 else c
        return SuperPolynomial(self._sig, self._n, terms)

    # ---------- substitution ------------------------------------------

    def substitute(
        self,
        values: Sequence["SuperPolynomial"],
        target: Optional[SuperDomainSignature] = None,
    ) -> "SuperPolynomial":
        """Replace every coordinate by a polynomial; all values share one space."""
        if len(values) != self._sig.dimension:
            raise SignatureMismatch(
                f"need {self._sig.dimension} substitutes for {self._sig}, got {len(values)}"
            )
        if values:
            target = values[0].signature
        elif target is None:
            raise SignatureMismatch("substituting into a 0|0 polynomial needs a target signature")
        for v in values:
            if v.signature != target or v.n_generators != self._n:
                raise SignatureMismatch("substitutes must share one signature and algebra")
        n_even = self._sig.n_even
        powers: Dict[Tuple[int, int], SuperPolynomial] = {}

        def power(i: int, k: int) -> SuperPolynomial:
            if (i, k) not in powers:
                powers[(i, k)] = values[i] if k == 1 else power(i, k - 1) * values[i]
            return powers[(i, k)]

        out = SuperPolynomial.zero(target, self._n)
        for (g, e, o), c in self._terms.items():
            piece = SuperPolynomial(target, self._n, {(g, (0,) * target.n_even, 0): c})
            for i, k in enumerate(e):
                if k:
                    piece = piece * power(i, k)
                    if piece.is_zero():
                        break
            if piece.is_zero():
                continue
            for j in mask_indices(o):
                piece = piece * values[n_even + j - 1]
                if piece.is_zero():
                    break
            out = out + piece
        return out

    def evaluate(self, point: Sequence[PointValue]) -> GrassmannElement:
        """Value at a superpoint given as even values followed by odd values."""
        if len(point) != self._sig.dimension:
            raise SignatureMismatch(f"point has {len(point)} coordinates, {self._sig} needs {self._sig.dimension}")
        vals = [
            p if isinstance(p, GrassmannElement) else GrassmannElement.scalar(self._n, p)
            for p in point
        ]
        for v in vals:
            if v.n_generators != self._n:
                raise AlgebraMismatch("point lives in a different algebra")
        n_even = self._sig.n_even
        total = GrassmannElement.zero(self._n)
        for (g, e, o), c in self._terms.items():
            piece = GrassmannElement(self._n, {g: c})
            for i, k in enumerate(e):
                if k:
                    piece = piece * (vals[i] ** k)
            for j in mask_indices(o):
                piece = piece * vals[n_even + j - 1]
            total = total + piece
        return total

    def embed(
        self,
        signature: SuperDomainSignature,
        even_positions: Optional[Sequence[int]] = None,
        odd_positions: Optional[Sequence[int]] = None,
    ) -> "SuperPolynomial":
        """Re-express over a larger signature; positions are 0-based and increasing."""
        even_positions = list(even_positions if even_positions is not None else range(self._sig.n_even))
        odd_positions = list(odd_positions if odd_positions is not None else range(self._sig.n_odd))
        if len(even_positions) != self._sig.n_even or len(odd_positions) != self._sig.n_odd:
            raise SignatureMismatch("embedding must place every coordinate")
        if odd_positions != sorted(odd_positions) or len(set(odd_positions)) != len(odd_positions):
            raise SignatureMismatch("odd coordinates must keep their relative order")
        if any(p >= signature.n_even for p in even_positions) or any(
            p >= signature.n_odd for p in odd_positions
        ):
            raise SignatureMismatch(f"embedding target {signature} too small")
        terms: Dict[TermKey, Fraction] = {}
        for (g, e, o), c in self._terms.items():
            exps = [0] * signature.n_even
            for i, k in enumerate(e):
                exps[even_positions[i]] += k
            omask = 0
            for j in mask_indices(o):
                omask |= 1 << odd_positions[j - 1]
            terms[(g, tuple(exps), omask)] = c
        return SuperPolynomial(signature, self._n, terms)

    # ---------- comparison / display ----------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SuperPolynomial):
            return self._sig == other._sig and self._n == other._n and self._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._sig, self._n, frozenset(self._terms.items())))
        return self._hash

    def render(self) -> str:
        pieces = []
        for (g, e, o), c in self.items():
            factors = [f"g{i}" for i in mask_indices(g)]
            for i, k in enumerate(e, start=1):
                if k == 1:
                    factors.append(f"x{i}")
                elif k > 1:
                    factors.append(f"x{i}^{k}")
            factors.extend(f"t{j}" for j in mask_indices(o))
            pieces.append((c, factors))
        return render_terms(pieces)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"SuperPolynomial({self._sig}, N={self._n}, {self.render()!r})"

"""
Exact arithmetic in the Grassmann algebra over the rationals.

Generator ``g_i`` is stored as bit ``i - 1`` of an integer mask; a monomial
``g_{i1} g_{i2} ... g_{ik}`` with ``i1 < i2 < ... < ik`` is the mask with
those bits set. Every element keeps a sparse ``{mask: Fraction}`` map with no
zero coefficients, so structural equality is semantic equality.
"""
from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from algebra.errors import AlgebraMismatch, NotInvertible

__all__ = [
    "Parity",
    "GrassmannElement",
    "Scalar",
    "merge_sign",
    "mask_indices",
    "popcount",
]

Scalar = Union[int, Fraction]


class Parity(str, Enum):
    """Grading class of an element, a polynomial or a coordinate."""

    even = "even"
    odd = "odd"
    mixed = "mixed"
    zero = "zero"

    @classmethod
    def _missing_(cls, value: object) -> "Parity":
        if not isinstance(value, str):
            raise ValueError(f"Unknown parity: {value}")
        val = value.strip().lower()
        synonyms = {
            "bosonic": "even",
            "0": "even",
            "fermionic": "odd",
            "1": "odd",
            "inhomogeneous": "mixed",
            "none": "zero",
        }
        if val in synonyms:
            return cls(synonyms[val])
        return super()._missing_(val)

    def flip(self) -> "Parity":
        if self is Parity.even:
            return Parity.odd
        if self is Parity.odd:
            return Parity.even
        return self


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_indices(mask: int) -> Tuple[int, ...]:
    """1-based generator indices of a mask, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def merge_sign(a: int, b: int) -> int:
    """Sign of ``g_a * g_b`` after sorting, or 0 when the masks share a bit."""
    if a & b:
        return 0
    swaps = 0
    rest = b
    j = 0
    while rest:
        if rest & 1:
            swaps += popcount(a >> (j + 1))
        rest >>= 1
        j += 1
    return -1 if swaps & 1 else 1


def _coerce(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _term_order(mask: int) -> Tuple[int, Tuple[int, ...]]:
    return popcount(mask), mask_indices(mask)


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_terms(pieces: Sequence[Tuple[Fraction, Sequence[str]]]) -> str:
    """Join ``(coefficient, factor names)`` pieces as ``2*g1*g2 - x1 + 1/2``."""
    if not pieces:
        return "0"
    out = []
    for pos, (coef, factors) in enumerate(pieces):
        negative = coef < 0
        mag = -coef if negative else coef
        if factors:
            body = "*".join(factors)
            text = body if mag == 1 else f"{format_rational(mag)}*{body}"
        else:
            text = format_rational(mag)
        if pos == 0:
            out.append(f"-{text}" if negative else text)
        else:
            out.append(f" - {text}" if negative else f" + {text}")
    return "".join(out)


class GrassmannElement:
    """Immutable sparse element of the Grassmann algebra with ``N`` generators."""

    __slots__ = ("_n", "_terms", "_hash")

    def __init__(self, n_generators: int, terms: Optional[Mapping[int, Scalar]] = None):
        if not isinstance(n_generators, int) or n_generators < 1:
            raise ValueError(f"n_generators must be a positive integer, got {n_generators!r}")
        limit = 1 << n_generators
        clean: Dict[int, Fraction] = {}
        for mask, coef in (terms or {}).items():
            if mask < 0 or mask >= limit:
                raise ValueError(f"monomial mask {mask} uses generators beyond g{n_generators}")
            c = _coerce(coef)
            if c:
                clean[mask] = clean.get(mask, Fraction(0)) + c
                if not clean[mask]:
                    del clean[mask]
        self._n = n_generators
        self._terms = clean
        self._hash: Optional[int] = None

    # ---------- constructors ------------------------------------------

    @classmethod
    def zero(cls, n_generators: int) -> "GrassmannElement":
        return cls(n_generators)

    @classmethod
    def scalar(cls, n_generators: int, value: Scalar) -> "GrassmannElement":
        return cls(n_generators, {0: value})

    @classmethod
    def generator(cls, n_generators: int, index: int) -> "GrassmannElement":
        if not 1 <= index <= n_generators:
            raise ValueError(f"generator g{index} outside 1..{n_generators}")
        return cls(n_generators, {1 << (index - 1): 1})

    @classmethod
    def monomial(
        cls, n_generators: int, indices: Iterable[int], coefficient: Scalar = 1
    ) -> "GrassmannElement":
        """Product ``coefficient * g_{i1} * g_{i2} * ...`` in the order given."""
        out = cls.scalar(n_generators, coefficient)
        for i in indices:
            out = out * cls.generator(n_generators, i)
        return out

    @classmethod
    def from_coordinates(cls, n_generators: int, coords: Sequence[Scalar]) -> "GrassmannElement":
        if len(coords) != 1 << n_generators:
            raise ValueError("coordinate vector must have length 2^N")
        return cls(n_generators, {m: c for m, c in enumerate(coords) if c})

    # ---------- accessors ---------------------------------------------

    @property
    def n_generators(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[int, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[int, Fraction]]:
        for mask in sorted(self._terms, key=_term_order):
            yield mask, self._terms[mask]

    def coefficient(self, mask: int) -> Fraction:
        return self._terms.get(mask, Fraction(0))

    def coordinates(self) -> Tuple[Fraction, ...]:
        """Coefficients in mask order ``1, g1, g2, g1g2, g3, ...``."""
        return tuple(self._terms.get(m, Fraction(0)) for m in range(1 << self._n))

    def is_zero(self) -> bool:
        return not self._terms

    def parity(self) -> Parity:
        if not self._terms:
            return Parity.zero
        kinds = {popcount(m) & 1 for m in self._terms}
        if kinds == {0}:
            return Parity.even
        if kinds == {1}:
            return Parity.odd
        return Parity.mixed

    def body(self) -> Fraction:
        return self._terms.get(0, Fraction(0))

    def soul(self) -> "GrassmannElement":
        return GrassmannElement(self._n, {m: c for m, c in self._terms.items() if m})

    def even_part(self) -> "GrassmannElement":
        return GrassmannElement(self._n, {m: c for m, c in self._terms.items() if not popcount(m) & 1})

    def odd_part(self) -> "GrassmannElement":
        return GrassmannElement(self._n, {m: c for m, c in self._terms.items() if popcount(m) & 1})

    # ---------- arithmetic --------------------------------------------

    def _check(self, other: "GrassmannElement") -> None:
        if other._n != self._n:
            raise AlgebraMismatch(
                f"cannot combine elements of Λ({self._n}) and Λ({other._n})"
            )

    def _lift(self, other: object) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return GrassmannElement.scalar(self._n, other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "GrassmannElement":
        rhs = self._lift(other)
        if rhs is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for mask, coef in rhs._terms.items():
            terms[mask] = terms.get(mask, Fraction(0)) + coef
        return GrassmannElement(self._n, terms)

    __radd__ = __add__

    def __neg__(self) -> "GrassmannElement":
        return GrassmannElement(self._n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: object) -> "GrassmannElement":
        rhs = self._lift(other)
        if rhs is NotImplemented:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> "GrassmannElement":
        lhs = self._lift(other)
        if lhs is NotImplemented:
            return NotImplemented
        return lhs - self

    def __mul__(self, other: object) -> "GrassmannElement":
        rhs = self._lift(other)
        if rhs is NotImplemented:
            return NotImplemented
        terms: Dict[int, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in rhs._terms.items():
                sign = merge_sign(ma, mb)
                if sign:
                    key = ma | mb
                    terms[key] = terms.get(key, Fraction(0)) + sign * ca * cb
        return GrassmannElement(self._n, terms)

    def __rmul__(self, other: object) -> "GrassmannElement":
        lhs = self._lift(other)
        if lhs is NotImplemented:
            return NotImplemented
        return lhs * self

    def __truediv__(self, other: Scalar) -> "GrassmannElement":
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        d = _coerce(other)
        return GrassmannElement(self._n, {m: c / d for m, c in self._terms.items()})

    def __pow__(self, exponent: int) -> "GrassmannElement":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = GrassmannElement.scalar(self._n, 1)
        for _ in range(exponent):
            out = out * self
            if out.is_zero():
                break
        return out

    def nilpotency_index(self) -> Optional[int]:
        """Smallest ``k >= 1`` with ``a**k == 0``; ``None`` when the body is nonzero."""
        if self.body():
            return None
        k = 1
        power = self
        while not power.is_zero():
            power = power * self
            k += 1
        return k

    def invert(self) -> "GrassmannElement":
        b = self.body()
        if not b:
            raise NotInvertible(f"{self.render()} has zero body")
        step = -self.soul() / b
        total = GrassmannElement.scalar(self._n, 1)
        power = GrassmannElement.scalar(self._n, 1)
        while True:
            power = power * step
            if power.is_zero():
                break
            total = total + power
        return total / b

    # ---------- comparison / display ----------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GrassmannElement):
            return self._n == other._n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({0: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def render(self) -> str:
        pieces = [
            (coef, [f"g{i}" for i in mask_indices(mask)]) for mask, coef in self.items()
        ]
        return render_terms(pieces)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"GrassmannElement({self._n}, {self.render()!r})"

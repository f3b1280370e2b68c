import sys
from fractions import Fraction
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algebra.errors import AlgebraMismatch, NotInvertible
from algebra.grassmann import GrassmannElement, Parity, merge_sign, popcount

N = 4


def g(*indices, n=N):
    return GrassmannElement.monomial(n, indices)


def elements(parity=None):
    masks = st.integers(min_value=0, max_value=(1 << N) - 1)
    if parity == "even":
        masks = masks.filter(lambda m: popcount(m) % 2 == 0)
    elif parity == "odd":
        masks = masks.filter(lambda m: popcount(m) % 2 == 1)
    coefs = st.integers(min_value=-3, max_value=3)
    return st.dictionaries(masks, coefs, max_size=6).map(lambda d: GrassmannElement(N, d))


homogeneous = st.one_of(elements("even"), elements("odd"))


def test_parity_synonyms():
    assert Parity("bosonic") is Parity.even
    assert Parity("Fermionic") is Parity.odd
    assert Parity("inhomogeneous") is Parity.mixed
    with pytest.raises(ValueError):
        Parity("sideways")


def test_addition_examples():
    one = GrassmannElement.scalar(N, 1)
    assert (g(1) + (-g(1))).is_zero()
    assert (one + g(1, 2)) + g(1, 2) == one + 2 * g(1, 2)
    assert (3 + g(1)) + (-3) == g(1)


def test_product_signs():
    assert (g(1) * g(1)).is_zero()
    assert g(1) * g(2) == g(1, 2)
    assert g(2) * g(1) == -g(1, 2)
    assert (1 + g(1, 2)) * (1 - g(1, 2)) == 1
    assert merge_sign(0b10, 0b01) == -1
    assert merge_sign(0b01, 0b01) == 0


def test_mismatched_algebras():
    with pytest.raises(AlgebraMismatch):
        GrassmannElement.generator(2, 1) + GrassmannElement.generator(3, 1)


def test_parity_body_soul():
    assert g(1).parity() is Parity.odd
    assert g(1, 2).parity() is Parity.even
    assert (1 + g(1)).parity() is Parity.mixed
    assert GrassmannElement.zero(N).parity() is Parity.zero
    a = 3 + 2 * g(1, 2)
    assert a.body() == 3
    assert a.soul() == 2 * g(1, 2)
    assert g(1).body() == 0


def test_nilpotency_examples():
    assert g(1).nilpotency_index() == 2
    assert (g(1, 2) + g(3, 4)).nilpotency_index() == 3
    assert (1 + g(1)).nilpotency_index() is None


def test_invert_examples():
    assert GrassmannElement.scalar(N, 2).invert() == Fraction(1, 2)
    assert (1 + g(1, 2)).invert() == 1 - g(1, 2)
    with pytest.raises(NotInvertible):
        g(1, 2).invert()


def test_render_is_canonical():
    assert (2 * g(1, 2) - g(3) + Fraction(1, 2)).render() == "1/2 - g3 + 2*g1*g2"
    assert GrassmannElement(N, {0b11: Fraction(2, 4)}).render() == "1/2*g1*g2"
    assert GrassmannElement.zero(N).render() == "0"


def test_coordinates_round_trip():
    a = 1 - g(2) + 5 * g(1, 3)
    assert GrassmannElement.from_coordinates(N, a.coordinates()) == a


@settings(max_examples=150, deadline=None)
@given(homogeneous, homogeneous)
def test_supercommutativity(a, b):
    if a.is_zero() or b.is_zero():
        return
    sign = -1 if a.parity() is Parity.odd and b.parity() is Parity.odd else 1
    assert a * b == sign * (b * a)


@settings(max_examples=150, deadline=None)
@given(elements(), elements(), elements())
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c


@settings(max_examples=150, deadline=None)
@given(elements(), elements())
def test_body_is_a_homomorphism(a, b):
    assert (a * b).body() == a.body() * b.body()
    assert (a + b).body() == a.body() + b.body()
    assert a == a.body() + a.soul()


@settings(max_examples=150, deadline=None)
@given(elements())
def test_inverse_or_nilpotent(a):
    if a.body():
        assert a.invert() * a == 1
        assert a.nilpotency_index() is None
    else:
        k = a.nilpotency_index()
        assert 1 <= k <= N + 1
        assert (a ** k).is_zero()
        if k > 1:
            assert not (a ** (k - 1)).is_zero()


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=(1 << N) - 1))
def test_odd_monomials_square_to_zero(mask):
    m = GrassmannElement(N, {mask: 1})
    if popcount(mask) % 2:
        assert m.nilpotency_index() == 2


if __name__ == "__main__":
    pytest.main([__file__])

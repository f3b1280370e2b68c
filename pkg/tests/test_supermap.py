import random
import sys
from fractions import Fraction
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import pytest

from algebra.errors import OddBlockSingular, ParityViolation, SignatureMismatch
from algebra.grassmann import GrassmannElement
from algebra.superpoly import SuperDomainSignature, SuperPolynomial
from algebra.supermap import (
    OrientationKind,
    SuperMap,
    berezinian,
    chain,
    compose,
    map_equal,
    orientation_class,
    super_jacobian,
)
from geometry.generators import coordinate_projector, random_invertible

N = 3
SIG = SuperDomainSignature(n_even=1, n_odd=1)


def x(sig=SIG, n=N):
    return SuperPolynomial.even_variable(sig, n, 1)


def t(sig=SIG, n=N, index=1):
    return SuperPolynomial.odd_variable(sig, n, index)


def const(value, sig=SIG, n=N):
    return SuperPolynomial.constant(sig, n, value)


def g(*indices):
    return GrassmannElement.monomial(N, indices)


def endo(*components):
    return SuperMap(SIG, SIG, components, N)


def test_parity_is_enforced():
    with pytest.raises(ParityViolation):
        endo(const(g(1)), t())
    with pytest.raises(ParityViolation):
        endo(x(), x())


def test_zero_components_are_allowed():
    assert endo(x(), SuperPolynomial.zero(SIG, N)) == coordinate_projector(SIG, N)


def test_compose_applies_inner_first():
    f = endo(x() * x(), t())
    h = endo(x() + 1, t())
    assert compose(f, h) == endo((x() + 1) * (x() + 1), t())
    assert compose(h, f) == endo(x() * x() + 1, t())
    assert chain([f, h]) == compose(f, h)
    assert chain([f, h, f]) == compose(f, compose(h, f))


def test_compose_rejects_mismatched_shapes():
    other = SuperDomainSignature(n_even=2, n_odd=0)
    f = SuperMap(other, other, [SuperPolynomial.even_variable(other, N, 1)] * 2, N)
    with pytest.raises(SignatureMismatch):
        compose(f, SuperMap.identity(SIG, N))
    with pytest.raises(SignatureMismatch):
        map_equal(f, SuperMap.identity(SIG, N))


def test_odd_substitution_signs():
    f = endo(x(), const(g(1)) * x())
    h = endo(x() + const(g(2, 3)), t())
    # g1 * (x + g2 g3) = g1 x + g1 g2 g3
    assert compose(f, h).components[1] == const(g(1)) * x() + const(g(1, 2, 3))


def test_left_odd_derivative():
    sig = SuperDomainSignature(n_even=0, n_odd=2)
    t1, t2 = t(sig, index=1), t(sig, index=2)
    assert (t1 * t2).derivative_odd(1) == t2
    assert (t1 * t2).derivative_odd(2) == -t1
    # the generator stands left of t1: d/dt1 (g1 t1) = -g1
    g1 = SuperPolynomial.constant(sig, N, g(1))
    assert (g1 * t1).derivative_odd(1) == -g1


def test_jacobian_blocks():
    f = endo(x() * x() + const(g(1)) * t(), const(g(2)) * x() + t())
    jac = super_jacobian(f)
    assert jac.a == ((x().scale(2),),)
    assert jac.b == ((-const(g(1)),),)
    assert jac.c == ((const(g(2)),),)
    assert jac.d == ((const(1),),)


def test_berezinian_of_identity():
    result = berezinian(SuperMap.identity(SIG, N))
    assert result.value == 1
    assert result.orientation.render() == "SignPair(+, +)"


def test_berezinian_of_scaling():
    result = berezinian(endo(x().scale(-2), t().scale(3)))
    assert result.value == Fraction(-2, 3)
    assert result.schur_factor == -2
    assert result.odd_factor == 3
    assert result.orientation.render() == "SignPair(-, +)"


def test_nilpotent_berezinian():
    result = berezinian(endo(const(g(1, 2)) * x(), t()))
    assert result.value == g(1, 2)
    assert result.orientation.kind is OrientationKind.nilpotent
    assert result.orientation.render() == "Nilpotent(2)"


def test_singular_odd_block():
    with pytest.raises(OddBlockSingular):
        berezinian(coordinate_projector(SIG, N))


def test_mixed_blocks_cancel():
    shear = endo(x() + const(g(1)) * t(), t())
    twist = endo(x(), t() + const(g(2)) * x())
    both = compose(twist, shear)
    result = berezinian(both)
    assert result.schur_factor == 1 - g(1, 2)
    assert result.odd_factor == 1 - g(1, 2)
    assert result.value == 1


def test_berezinian_at_a_point():
    f = endo(x() * x(), t())
    assert berezinian(f, at=[3]).value == 6
    assert berezinian(f, at=[1 + g(1, 2), g(3)]).value == 2 + 2 * g(1, 2)
    with pytest.raises(SignatureMismatch):
        berezinian(f, at=[1, 2, 3])


def test_orientation_classes():
    assert orientation_class(GrassmannElement.zero(N)).render() == "ZeroBerezinian"
    assert orientation_class(g(1, 2)).render() == "Nilpotent(2)"
    assert orientation_class(GrassmannElement.scalar(N, 2), (Fraction(-1), Fraction(-2))).render() == "SignPair(-, -)"
    assert OrientationKind("SignPair") is OrientationKind.sign_pair


def test_sign_pair_needs_consistent_factor_bodies():
    two = GrassmannElement.scalar(N, 2)
    with pytest.raises(ValueError):
        orientation_class(two)
    with pytest.raises(ValueError):
        orientation_class(two, (Fraction(0), Fraction(1)))
    with pytest.raises(ValueError):
        orientation_class(two, (Fraction(-1), Fraction(2)))


@pytest.mark.parametrize("sig", [SIG, SuperDomainSignature(n_even=2, n_odd=2)])
def test_berezinian_chain_rule(sig):
    rng = random.Random(7)
    origin = [0] * sig.dimension
    for _ in range(50):
        f, _ = random_invertible(rng, sig, N)
        h, _ = random_invertible(rng, sig, N)
        lhs = berezinian(compose(f, h)).value
        rhs = berezinian(f, at=h.evaluate(origin)).value * berezinian(h).value
        assert lhs == rhs


def test_embed_source_ignores_new_coordinates():
    big = SuperDomainSignature(n_even=1, n_odd=2)
    f = endo(x() + const(g(1)) * t(), t())
    wide = f.embed_source(big)
    assert wide.source == big
    assert wide.evaluate([2, g(2), g(3)]) == f.evaluate([2, g(2)])


if __name__ == "__main__":
    pytest.main([__file__])

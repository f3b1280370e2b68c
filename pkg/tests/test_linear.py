import random
import sys
from fractions import Fraction
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import pytest

from algebra.errors import NoSolution
from algebra.grassmann import GrassmannElement, Parity
from algebra.linear import (
    MapEquation,
    annihilator,
    find_inverse,
    is_chart,
    mult_operator_matrix,
    solve_linear,
    solve_map_ansatz,
)
from algebra.superpoly import SuperDomainSignature
from algebra.supermap import SuperMap, compose
from geometry.generators import coordinate_projector, random_element, random_invertible


def _rank(matrix):
    rows = [list(r) for r in matrix]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = Fraction(rows[r][c]) / rows[rank][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@pytest.fixture
def rng():
    return random.Random(20240611)


def test_division_by_a_generator():
    g = lambda *i: GrassmannElement.monomial(3, i)
    sol = solve_linear(g(1), 2 * g(1, 2, 3))
    assert sol.particular == 2 * g(2, 3)
    assert sol.particular.render() == "2*g2*g3"
    assert set(sol.kernel_basis) == {g(1), g(1, 2), g(1, 3), g(1, 2, 3)}
    assert sol.dimension == 4
    assert sol.contains(2 * g(2, 3) + 5 * g(1, 3))
    assert not sol.contains(g(2))


def test_unsolvable_raises():
    g1 = GrassmannElement.generator(2, 1)
    with pytest.raises(NoSolution):
        solve_linear(g1, GrassmannElement.scalar(2, 1))


def test_invertible_coefficient_has_unique_solution():
    g = lambda *i: GrassmannElement.monomial(3, i)
    a = 2 + g(1, 2)
    b = 1 - g(3)
    sol = solve_linear(a, b)
    assert sol.dimension == 0
    assert a * sol.particular == b


def test_annihilator_of_generator():
    g1 = GrassmannElement.generator(2, 1)
    basis = annihilator(g1)
    assert len(basis) == 2
    for x in basis:
        assert (g1 * x).is_zero()


def test_matches_dense_rank(rng):
    for _ in range(500):
        n = rng.randint(1, 5)
        a = random_element(rng, n)
        b = random_element(rng, n)
        matrix = mult_operator_matrix(a)
        augmented = [list(row) + [c] for row, c in zip(matrix, b.coordinates())]
        rank = _rank(matrix)
        solvable = rank == _rank(augmented)
        try:
            sol = solve_linear(a, b)
        except NoSolution:
            assert not solvable
            continue
        assert solvable
        assert a * sol.particular == b
        assert sol.dimension == (1 << n) - rank
        for x in sol.kernel_basis:
            assert (a * x).is_zero()
        if sol.dimension:
            assert a * sol.member([1] * sol.dimension) == b


def test_solvable_by_nilpotent_is_nilpotent(rng):
    for i in range(500):
        n = rng.randint(1, 5)
        a = random_element(rng, n).soul()
        b = a * random_element(rng, n) if i % 2 else random_element(rng, n)
        try:
            solve_linear(a, b)
        except NoSolution:
            continue
        assert b.nilpotency_index() is not None


def test_map_ansatz_recovers_a_known_factor(rng):
    sig = SuperDomainSignature(n_even=1, n_odd=1)
    for _ in range(10):
        psi, psi_inv = random_invertible(rng, sig, 3, steps=2)
        sol = solve_map_ansatz(MapEquation.composition(rhs=psi, inner=psi_inv), degree_bound=4)
        assert compose(sol.particular, psi_inv) == psi


def test_find_inverse(rng):
    sig = SuperDomainSignature(n_even=1, n_odd=1)
    for _ in range(10):
        f, f_inv = random_invertible(rng, sig, 3, steps=2)
        inverse = find_inverse(f, degree_bound=4)
        assert inverse is not None
        assert compose(f, inverse) == SuperMap.identity(sig, 3)
        assert compose(inverse, f) == SuperMap.identity(sig, 3)
    assert not is_chart(coordinate_projector(sig, 3))


def test_projector_composition_family():
    sig = SuperDomainSignature(n_even=1, n_odd=1)
    p = coordinate_projector(sig, 2)
    sol = solve_map_ansatz(MapEquation.composition(rhs=p, inner=p), degree_bound=1)
    assert compose(sol.particular, p) == p
    assert sol.dimension > 0
    for k in sol.kernel_basis:
        assert compose(k, p).components[0].is_zero()


def test_random_element_parity(rng):
    for _ in range(20):
        x = random_element(rng, 4, Parity.odd)
        assert x.is_zero() or x.parity() is Parity.odd


if __name__ == "__main__":
    pytest.main([__file__])

import random
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import pytest

from algebra.errors import BodyNotZero, NoSolution, ParityMismatch
from algebra.grassmann import GrassmannElement, Parity
from algebra.superpoly import SuperDomainSignature, SuperPolynomial
from algebra.supermap import SuperMap
from geometry.checks import check_homotopy
from geometry.generators import random_element, random_map, random_polynomial
from geometry.reports import Verdict
from geometry.semihomotopy import (
    SemiHomotopy,
    average_solutions,
    check_even_semihomotopy,
    check_odd_semihomotopy,
    odd_average_solutions,
    stage,
)

N = 3
X = SuperDomainSignature(n_even=1, n_odd=0)


def gen(n, *indices):
    return GrassmannElement.monomial(n, indices)


def verdicts(reports):
    return {r.verdict for r in reports}


def constant_map(value, n):
    return SuperMap.constant(X, X, [value], n)


def even_homotopy(n=N):
    """``Γ(x, s) = x + s·x`` on ``R^{1|0}`` with the even parameter ``s`` as ``x2``."""
    z = SuperDomainSignature(n_even=2, n_odd=0)
    x = SuperPolynomial.even_variable(z, n, 1)
    s = SuperPolynomial.even_variable(z, n, 2)
    return SuperMap(z, X, [x + s * x], n)


def test_stage_substitutes_the_parameter():
    a = gen(N, 1, 2)
    h = SemiHomotopy(big_map=even_homotopy(), parameter_kind=Parity.even, endpoints=(a, GrassmannElement.zero(N)))
    x = SuperPolynomial.even_variable(X, N, 1)
    assert stage(h, a) == SuperMap(X, X, [x + SuperPolynomial.constant(X, N, a) * x], N)
    assert stage(h, GrassmannElement.zero(N)) == SuperMap.identity(X, N)
    assert h.source == X
    assert h.delta == -a


def test_even_parameter_without_cancellation():
    a = gen(N, 1, 2)
    h = SemiHomotopy(big_map=even_homotopy(), parameter_kind=Parity.even, endpoints=(a, GrassmannElement.zero(N)))
    identity = SuperMap.identity(X, N)
    # stage(a) = (1 + g1 g2) x differs from f, yet (g1 g2)^2 = 0 makes the scaled condition hold
    assert stage(h, a) != identity
    reports = check_even_semihomotopy(h, identity, identity)
    assert [r.relation for r in reports] == ["homotopy-start", "homotopy-end"]
    assert verdicts(reports) == {Verdict.hold}
    assert check_homotopy(h, identity, identity).name == "even-semihomotopy"


def test_endpoint_checks_reject_bad_values():
    with pytest.raises(ValueError):
        SemiHomotopy(
            big_map=even_homotopy(),
            parameter_kind=Parity.even,
            endpoints=(GrassmannElement.scalar(N, 1), GrassmannElement.zero(N)),
        )
    h = SemiHomotopy(
        big_map=even_homotopy(), parameter_kind=Parity.even, endpoints=(gen(N, 1, 2), GrassmannElement.zero(N))
    )
    with pytest.raises(BodyNotZero):
        stage(h, 1 + gen(N, 1, 2))
    with pytest.raises(ParityMismatch):
        stage(h, gen(N, 1))
    identity = SuperMap.identity(X, N)
    with pytest.raises(ParityMismatch):
        check_odd_semihomotopy(h, identity, identity)


def test_odd_homotopy_from_a_document():
    n = 2
    z = SuperDomainSignature(n_even=1, n_odd=1)
    x = SuperPolynomial.even_variable(z, n, 1)
    tau = SuperPolynomial.odd_variable(z, n, 1)
    g1 = SuperPolynomial.constant(z, n, gen(n, 1))
    big = SuperMap(z, X, [x - g1 * tau], n)
    h = SemiHomotopy(big_map=big, parameter_kind=Parity.odd, endpoints=(gen(n, 1), gen(n, 2)))
    xx = SuperPolynomial.even_variable(X, n, 1)
    f = SuperMap.identity(X, n)
    g = SuperMap(X, X, [xx + SuperPolynomial.constant(X, n, gen(n, 1, 2))], n)
    section = check_homotopy(h, f, g)
    assert section.name == "odd-semihomotopy"
    assert verdicts(section.reports) == {Verdict.hold}


def test_averaging_constant_maps():
    n = 2
    f = constant_map(GrassmannElement.zero(n), n)
    g = constant_map(gen(n, 1, 2), n)
    family = odd_average_solutions(f, g, gen(n, 1), gen(n, 2), degree_bound=1)
    assert family.dimension > 0
    h = SemiHomotopy(big_map=family.particular, parameter_kind=Parity.odd, endpoints=(gen(n, 1), gen(n, 2)))
    assert verdicts(check_odd_semihomotopy(h, f, g)) == {Verdict.hold}
    for basis in family.kernel_basis:
        member = family.particular + basis
        h = SemiHomotopy(big_map=member, parameter_kind=Parity.odd, endpoints=(gen(n, 1), gen(n, 2)))
        assert verdicts(check_odd_semihomotopy(h, f, g)) == {Verdict.hold}


def test_averaging_without_a_solution():
    n = 2
    f = constant_map(GrassmannElement.zero(n), n)
    g = constant_map(GrassmannElement.scalar(n, 1), n)
    with pytest.raises(NoSolution):
        odd_average_solutions(f, g, gen(n, 1), gen(n, 2), degree_bound=1)


def test_averaging_is_closed_under_checking():
    rng = random.Random(99)
    sig = SuperDomainSignature(n_even=1, n_odd=1)
    for _ in range(20):
        alpha = random_element(rng, N, Parity.odd)
        beta = random_element(rng, N, Parity.odd)
        if (beta - alpha).is_zero():
            beta = alpha + gen(N, 3)
        f = random_map(rng, sig, sig, N)
        # g - f must be a multiple of beta - alpha for a solution to exist
        delta = SuperPolynomial.constant(sig, N, beta - alpha)
        shift = [
            delta * random_polynomial(rng, sig, N, sig.coordinate_parity(p).flip())
            for p in range(sig.dimension)
        ]
        g = f + SuperMap(sig, sig, shift, N)
        family = average_solutions(f, g, alpha, beta, Parity.odd, degree_bound=2)
        h = SemiHomotopy(big_map=family.particular, parameter_kind=Parity.odd, endpoints=(alpha, beta))
        assert verdicts(check_odd_semihomotopy(h, f, g)) == {Verdict.hold}


def test_even_averaging():
    n = 3
    a = gen(n, 1, 2)
    x = SuperPolynomial.even_variable(X, n, 1)
    f = SuperMap.identity(X, n)
    g = SuperMap(X, X, [x - SuperPolynomial.constant(X, n, a) * x], n)
    family = average_solutions(f, g, a, GrassmannElement.zero(n), Parity.even, degree_bound=2)
    h = SemiHomotopy(big_map=family.particular, parameter_kind=Parity.even, endpoints=(a, GrassmannElement.zero(n)))
    assert verdicts(check_even_semihomotopy(h, f, g)) == {Verdict.hold}


if __name__ == "__main__":
    pytest.main([__file__])

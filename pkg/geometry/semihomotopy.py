"""
Semi-homotopies ``Γ(x, τ)`` with a nilpotent even or an odd parameter.

Endpoint conditions carry the factor ``Δ = end - start`` on both sides and
are compared as written: ``Δ`` is nilpotent or odd, so it is never divided
out and an instance may hold with ``stage(h, start) != f``.
"""
from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from algebra.errors import BodyNotZero, ParityMismatch, SignatureMismatch
from algebra.grassmann import GrassmannElement, Parity
from algebra.linear import MapEquation, SolutionSet, solve_map_ansatz
from algebra.superpoly import SuperDomainSignature, SuperPolynomial
from algebra.supermap import SuperMap
from geometry.reports import RelationReport, compare_components

__all__ = [
    "SemiHomotopy",
    "stage",
    "check_even_semihomotopy",
    "check_odd_semihomotopy",
    "average_solutions",
    "odd_average_solutions",
]

logger = logging.getLogger(__name__)


def _check_parameter(value: GrassmannElement, kind: Parity) -> None:
    got = value.parity()
    if kind is Parity.even:
        if got not in (Parity.even, Parity.zero):
            raise ParityMismatch(f"even parameter value {value.render()} is {got.value}")
        if value.body():
            raise BodyNotZero(f"even parameter value {value.render()} has body {value.body()}")
    elif got not in (Parity.odd, Parity.zero):
        raise ParityMismatch(f"odd parameter value {value.render()} is {got.value}")


def _with_parameter(source: SuperDomainSignature, kind: Parity) -> SuperDomainSignature:
    if kind is Parity.even:
        return SuperDomainSignature(n_even=source.n_even + 1, n_odd=source.n_odd)
    return SuperDomainSignature(n_even=source.n_even, n_odd=source.n_odd + 1)


def _parameter_position(signature: SuperDomainSignature, kind: Parity) -> int:
    """The parameter is the last even or the last odd coordinate."""
    return signature.n_even - 1 if kind is Parity.even else signature.dimension - 1


class SemiHomotopy(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    big_map: SuperMap
    parameter_kind: Parity
    endpoints: Tuple[GrassmannElement, GrassmannElement]

    @model_validator(mode="after")
    def _check_parameter_kind(self) -> "SemiHomotopy":
        src = self.big_map.source
        if self.parameter_kind is Parity.even:
            if src.n_even < 1:
                raise ValueError(f"{src} has no even coordinate to serve as the parameter")
        elif self.parameter_kind is Parity.odd:
            if src.n_odd < 1:
                raise ValueError(f"{src} has no odd coordinate to serve as the parameter")
        else:
            raise ValueError("the parameter is either even or odd")
        for value in self.endpoints:
            if value.n_generators != self.big_map.n_generators:
                raise ValueError(f"endpoint {value.render()} lives in Λ({value.n_generators})")
            _check_parameter(value, self.parameter_kind)
        return self

    @property
    def source(self) -> SuperDomainSignature:
        """``X``: the big map's source without the parameter."""
        src = self.big_map.source
        if self.parameter_kind is Parity.even:
            return SuperDomainSignature(n_even=src.n_even - 1, n_odd=src.n_odd)
        return SuperDomainSignature(n_even=src.n_even, n_odd=src.n_odd - 1)

    @property
    def target(self) -> SuperDomainSignature:
        return self.big_map.target

    @property
    def delta(self) -> GrassmannElement:
        start, end = self.endpoints
        return end - start


def stage(h: SemiHomotopy, value: GrassmannElement) -> SuperMap:
    """``γ(x) = Γ(x, value)``."""
    _check_parameter(value, h.parameter_kind)
    x = h.source
    n = h.big_map.n_generators
    coords = [SuperPolynomial.coordinate(x, n, p) for p in range(x.dimension)]
    param = SuperPolynomial.constant(x, n, value)
    if h.parameter_kind is Parity.even:
        values = coords[: x.n_even] + [param] + coords[x.n_even:]
    else:
        values = coords + [param]
    comps = [c.substitute(values, target=x) for c in h.big_map.components]
    return SuperMap(x, h.target, comps, n)


def _scaled_components(delta: GrassmannElement, m: SuperMap) -> List[SuperPolynomial]:
    factor = SuperPolynomial.constant(m.source, m.n_generators, delta)
    return [factor * c for c in m.components]


def _check_endpoints(h: SemiHomotopy, f: SuperMap, g: SuperMap, kind: Parity) -> List[RelationReport]:
    if h.parameter_kind is not kind:
        raise ParityMismatch(f"expected a {kind.value} parameter, got {h.parameter_kind.value}")
    for name, m in (("f", f), ("g", g)):
        if m.source != h.source or m.target != h.target:
            raise SignatureMismatch(f"{name} is {m.source}->{m.target}, the stages are {h.source}->{h.target}")
    start, end = h.endpoints
    delta = h.delta
    reports = []
    for relation, point, expected in (("homotopy-start", start, f), ("homotopy-end", end, g)):
        lhs = _scaled_components(delta, stage(h, point))
        rhs = _scaled_components(delta, expected)
        reports.append(compare_components(relation, (), lhs, rhs, detail=f"Δ = {delta.render()}"))
    return reports


def check_even_semihomotopy(h: SemiHomotopy, f: SuperMap, g: SuperMap) -> List[RelationReport]:
    return _check_endpoints(h, f, g, Parity.even)


def check_odd_semihomotopy(h: SemiHomotopy, f: SuperMap, g: SuperMap) -> List[RelationReport]:
    return _check_endpoints(h, f, g, Parity.odd)


def average_solutions(
    f: SuperMap,
    g: SuperMap,
    start: GrassmannElement,
    end: GrassmannElement,
    kind: Parity = Parity.odd,
    degree_bound: Optional[int] = None,
) -> SolutionSet[SuperMap]:
    """
    Every bounded-degree ``Γ`` on ``X ⊕ τ`` with
    ``(end - start)·Γ(x, τ) = (end - τ)·f(x) + (τ - start)·g(x)``.
    Raises ``NoSolution`` when the bound admits none.
    """
    if f.source != g.source or f.target != g.target:
        raise SignatureMismatch("f and g must have the same source and target")
    _check_parameter(start, kind)
    _check_parameter(end, kind)
    x = f.source
    n = f.n_generators
    z = _with_parameter(x, kind)
    tau = SuperPolynomial.coordinate(z, n, _parameter_position(z, kind))

    def lifted(m: SuperMap) -> Sequence[SuperPolynomial]:
        return m.embed_source(z, range(x.n_even), range(x.n_odd)).components

    to_end = SuperPolynomial.constant(z, n, end) - tau
    from_start = tau - SuperPolynomial.constant(z, n, start)
    rhs = [to_end * fc + from_start * gc for fc, gc in zip(lifted(f), lifted(g))]
    eq = MapEquation.scaled(end - start, rhs, unknown_source=z, unknown_target=f.target)
    logger.debug("averaging %s and %s over %s", f.render(), g.render(), z)
    return solve_map_ansatz(eq, degree_bound)


def odd_average_solutions(
    f: SuperMap,
    g: SuperMap,
    alpha: GrassmannElement,
    beta: GrassmannElement,
    degree_bound: Optional[int] = None,
) -> SolutionSet[SuperMap]:
    return average_solutions(f, g, alpha, beta, Parity.odd, degree_bound)

from __future__ import annotations

import logging
from enum import Enum
from typing import Dict, Iterable, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from algebra.superpoly import SuperPolynomial
from algebra.supermap import SuperMap, map_equal

__all__ = ["Verdict", "Witness", "RelationReport", "compare_maps", "compare_components", "skipped", "tally"]

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    """Outcome of one relation check."""

    hold = "hold"
    fail = "fail"
    skip = "skip"

    @classmethod
    def _missing_(cls, value: object) -> "Verdict":
        if not isinstance(value, str):
            raise ValueError(f"Unknown verdict: {value}")
        val = value.strip().lower()
        synonyms = {
            "pass": "hold",
            "passed": "hold",
            "ok": "hold",
            "holds": "hold",
            "failed": "fail",
            "violated": "fail",
            "skipped": "skip",
            "missing": "skip",
        }
        if val in synonyms:
            return cls(synonyms[val])
        return super()._missing_(val)


class Witness(BaseModel):
    """Both sides of a failed identity, rendered in full."""

    model_config = ConfigDict(frozen=True)

    lhs: str
    rhs: str


class RelationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    relation: str
    cycle: Tuple[str, ...]
    verdict: Verdict
    witness: Optional[Witness] = None
    detail: str = ""

    @model_validator(mode="after")
    def _check_witness(self) -> "RelationReport":
        if (self.witness is not None) != (self.verdict is Verdict.fail):
            raise ValueError("a witness is required exactly when the verdict is fail")
        return self

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.hold

    def machine_line(self) -> str:
        return f"relation={self.relation} cycle={','.join(self.cycle)} verdict={self.verdict.value}"


def compare_maps(
    relation: str, cycle: Sequence[str], lhs: SuperMap, rhs: SuperMap, detail: str = ""
) -> RelationReport:
    if map_equal(lhs, rhs):
        return RelationReport(relation=relation, cycle=tuple(cycle), verdict=Verdict.hold, detail=detail)
    return RelationReport(
        relation=relation,
        cycle=tuple(cycle),
        verdict=Verdict.fail,
        witness=Witness(lhs=lhs.render(), rhs=rhs.render()),
        detail=detail,
    )


def _render_components(polys: Sequence[SuperPolynomial]) -> str:
    return "; ".join(f"[{i + 1}] {p.render()}" for i, p in enumerate(polys))


def compare_components(
    relation: str,
    cycle: Sequence[str],
    lhs: Sequence[SuperPolynomial],
    rhs: Sequence[SuperPolynomial],
    detail: str = "",
) -> RelationReport:
    """Like ``compare_maps`` for component tuples that need not form a parity-valid map."""
    if tuple(lhs) == tuple(rhs):
        return RelationReport(relation=relation, cycle=tuple(cycle), verdict=Verdict.hold, detail=detail)
    return RelationReport(
        relation=relation,
        cycle=tuple(cycle),
        verdict=Verdict.fail,
        witness=Witness(lhs=_render_components(lhs), rhs=_render_components(rhs)),
        detail=detail,
    )


def skipped(relation: str, cycle: Sequence[str], detail: str) -> RelationReport:
    logger.warning("skipping %s on %s: %s", relation, ",".join(cycle), detail)
    return RelationReport(relation=relation, cycle=tuple(cycle), verdict=Verdict.skip, detail=detail)


def tally(reports: Iterable[RelationReport]) -> Dict[str, int]:
    counts = {v.value: 0 for v in Verdict}
    for r in reports:
        counts[r.verdict.value] += 1
    return counts

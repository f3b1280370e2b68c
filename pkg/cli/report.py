"""The verification report printed by every subcommand, in human, machine or JSON form."""
from __future__ import annotations

import hashlib
from typing import Dict, Iterable, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from algebra.config import TOOL_VERSION
from geometry.reports import RelationReport, Verdict, tally

__all__ = ["ReportSection", "Report", "make_report"]


class ReportSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    reports: Tuple[RelationReport, ...] = ()
    # computed scalars, kept in insertion order
    values: Tuple[Tuple[str, str], ...] = ()


class Report(BaseModel):
    model_config = ConfigDict(frozen=True)

    tool_version: str
    input_digest: str
    sections: Tuple[ReportSection, ...]
    summary: Dict[str, int]

    @model_validator(mode="after")
    def _check_summary(self) -> "Report":
        if self.summary != tally(self.all_reports()):
            raise ValueError("summary counts must equal the section tallies")
        return self

    def all_reports(self) -> List[RelationReport]:
        return [r for s in self.sections for r in s.reports]

    @property
    def ok(self) -> bool:
        return self.summary[Verdict.fail.value] == 0

    def _summary_line(self) -> str:
        return " ".join(f"{v.value}={self.summary[v.value]}" for v in Verdict)

    def render_human(self) -> str:
        lines = [f"semisuper {self.tool_version}  input sha256:{self.input_digest}"]
        for section in self.sections:
            lines.append(f"== {section.name} ==")
            for key, value in section.values:
                lines.append(f"  {key}: {value}")
            for r in section.reports:
                where = ",".join(r.cycle) or "-"
                line = f"  {r.verdict.value:<4} {r.relation} [{where}]"
                if r.detail:
                    line += f"  {r.detail}"
                lines.append(line)
                if r.witness is not None:
                    lines.append(f"         lhs: {r.witness.lhs}")
                    lines.append(f"         rhs: {r.witness.rhs}")
        lines.append(f"summary: {self._summary_line()}")
        return "\n".join(lines) + "\n"

    def render_machine(self) -> str:
        lines = []
        for section in self.sections:
            for key, value in section.values:
                lines.append(f"section={section.name} {key.replace(' ', '_')}={value.replace(' ', '')}")
            lines.extend(r.machine_line() for r in section.reports)
        lines.append(f"summary {self._summary_line()}")
        return "\n".join(lines) + "\n"


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def make_report(data: bytes, sections: Iterable[ReportSection]) -> Report:
    sections = tuple(sections)
    reports: Sequence[RelationReport] = [r for s in sections for r in s.reports]
    return Report(
        tool_version=TOOL_VERSION,
        input_digest=digest(data),
        sections=sections,
        summary=tally(reports),
    )

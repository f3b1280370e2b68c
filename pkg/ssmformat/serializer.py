"""Canonical text rendering of a ``Document``; ``parse(serialize(doc)) == doc``."""
from __future__ import annotations

from typing import List

from ssmformat.document import (
    BerezinianTask,
    CheckTask,
    Document,
    HomotopyAverageTask,
    HomotopyCheckTask,
    MapDecl,
    MapRole,
    SemigroupTask,
    SolveTask,
    Task,
    TransitionTask,
)

__all__ = ["serialize", "render_map", "render_task"]


def render_map(decl: MapDecl) -> str:
    head = decl.name if decl.role is MapRole.named else decl.role.value
    names = decl.target.coordinate_names()
    assigns = "; ".join(f"{v}' = {c.render()}" for v, c in zip(names, decl.components))
    return f"map {head}[{', '.join(decl.indices)}]: {assigns}"


def _degree(degree) -> str:
    return "" if degree is None else f" degree {degree}"


def render_task(task: Task) -> str:
    if isinstance(task, CheckTask):
        out = "task check"
        if task.n_max is not None:
            out += f" n_max {task.n_max}"
        return out + (" reflexive" if task.reflexive else "")
    if isinstance(task, SolveTask):
        coef = task.coefficient.render()
        if len(task.coefficient.terms) > 1:
            coef = f"({coef})"
        return f"task solve {coef} * X = {task.rhs.render()}"
    if isinstance(task, TransitionTask):
        return f"task transition {task.first} {task.second}{_degree(task.degree)}"
    if isinstance(task, BerezinianTask):
        out = f"task berezinian {task.target.render()}"
        if task.at:
            out += " at " + ", ".join(v.render() for v in task.at)
        return out
    if isinstance(task, SemigroupTask):
        return f"task semigroup {task.chart} n_max {task.n_max}"
    ends = ", ".join(v.render() for v in task.endpoints)
    if isinstance(task, HomotopyCheckTask):
        refs = " ".join(r.render() for r in (task.big_map, task.start_map, task.end_map))
        return f"task homotopy check {task.parameter} {refs} endpoints {ends}"
    if isinstance(task, HomotopyAverageTask):
        refs = f"{task.start_map.render()} {task.end_map.render()}"
        return f"task homotopy average {refs} endpoints {ends}{_degree(task.degree)}"
    raise TypeError(f"unknown task {task!r}")


def serialize(doc: Document) -> str:
    lines: List[str] = [f"algebra {doc.algebra}"]
    lines.extend(f"space {s.name} {s.signature.n_even} {s.signature.n_odd}" for s in doc.spaces)
    if doc.bundle is not None:
        lines.append(f"bundle {doc.bundle.total} {doc.bundle.base} {doc.bundle.fiber}")
    for c in doc.charts:
        lines.append(f"chart {c.name}" + (" semi" if c.semi else "") + (" second" if c.second else ""))
    lines.extend("overlap " + " ".join(o.charts) for o in doc.overlaps)
    lines.extend(render_map(m) for m in doc.maps)
    lines.extend(render_task(t) for t in doc.tasks)
    return "\n".join(lines) + "\n"

"""
Command-line front end.

Exit codes: 0 every checked relation holds, 1 at least one fails (or a
task has no solution), 2 input error, 3 internal error. Reports go to
stdout, diagnostics and the sweep progress bar to stderr.
"""
from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError
from tqdm import tqdm

from algebra.config import DEFAULT_N_MAX, TOOL_VERSION, EngineConfig
from algebra.errors import (
    FormatSemanticError,
    FormatSyntaxError,
    NoSolution,
    SemiSuperError,
)
from algebra.grassmann import Parity
from algebra.linear import solve_linear
from algebra.superpoly import SuperDomainSignature
from algebra.supermap import berezinian
from cli.report import Report, ReportSection, make_report
from geometry.checks import SuiteSection, check_atlas, check_bundle, check_homotopy
from geometry.generators import idempotent_atlas, invertible_atlas
from geometry.reports import RelationReport, Verdict, Witness
from geometry.semiatlas import (
    classify_charts,
    derive_transition,
    is_nice,
    tower_identity,
    tower_semigroup,
)
from geometry.semihomotopy import SemiHomotopy, average_solutions
from ssmformat.build import Workspace, build
from ssmformat.document import (
    BerezinianTask,
    CheckTask,
    HomotopyAverageTask,
    HomotopyCheckTask,
    SemigroupTask,
    SolveTask,
    TransitionTask,
)
from ssmformat.parser import parse, parse_elements, parse_map_ref

__all__ = ["build_parser", "run", "main"]

logger = logging.getLogger(__name__)


class NothingToDo(SemiSuperError):
    """The document holds no task for the requested subcommand."""


def _from_suite(section: SuiteSection, values: Sequence[Tuple[str, str]] = ()) -> ReportSection:
    return ReportSection(name=section.name, reports=section.reports, values=tuple(values))


def _solvable(cycle: Sequence[str], lhs: str, rhs: str, exc: Optional[NoSolution] = None) -> RelationReport:
    if exc is None:
        return RelationReport(relation="solvable", cycle=tuple(cycle), verdict=Verdict.hold, detail=f"{lhs} = {rhs}")
    return RelationReport(
        relation="solvable", cycle=tuple(cycle), verdict=Verdict.fail, witness=Witness(lhs=lhs, rhs=rhs), detail=str(exc)
    )


# ---------- subcommands -----------------------------------------------

def cmd_check(args: argparse.Namespace, ws: Workspace, config: EngineConfig) -> List[ReportSection]:
    doc = ws.document
    task = next((t for t in doc.tasks if isinstance(t, CheckTask)), CheckTask())
    n_max = args.n_max or task.n_max or config.n_max
    reflexive = args.reflexive or task.reflexive
    if ws.atlas is None:
        raise NothingToDo("the document declares no atlas to check")
    atlas = ws.atlas
    sections: List[ReportSection] = []
    suite = check_atlas(atlas, n_max, reflexive)
    kinds = classify_charts(atlas, config.degree_bound)
    values = [("n_max", str(n_max)), ("obstructedness", str(suite.obstructedness))]
    values.append(("nice", "yes" if suite.niceness.nice else f"no, at {suite.niceness.chart}"))
    values.extend((f"kind {c}", kinds[c].value) for c in atlas.chart_ids)
    sections.append(ReportSection(name="atlas", values=tuple(values)))
    sections.extend(_from_suite(s) for s in suite.sections)
    if ws.bundle is not None:
        sections.extend(
            _from_suite(s) for s in check_bundle(ws.bundle, n_max, reflexive, ws.second_cover, ws.cross)
        )
    for t in doc.tasks:
        if isinstance(t, TransitionTask):
            sections.append(_transition_section(ws, t, config))
    return sections


def _transition_section(ws: Workspace, task: TransitionTask, config: EngineConfig) -> ReportSection:
    atlas = ws.require_atlas()
    degree = task.degree if task.degree is not None else config.degree_bound
    lhs = f"X∘phi[{task.second}]"
    rhs = f"phi[{task.first}]"
    try:
        sol = derive_transition(atlas, task.first, task.second, degree)
    except NoSolution as exc:
        return ReportSection(name="transition", reports=(_solvable((task.first, task.second), lhs, rhs, exc),))
    values = (("particular", sol.particular.render()), ("kernel dimension", str(sol.dimension)))
    return ReportSection(
        name="transition", reports=(_solvable((task.first, task.second), lhs, rhs),), values=values
    )


def cmd_solve(args: argparse.Namespace, ws: Workspace, config: EngineConfig) -> List[ReportSection]:
    tasks = [t for t in ws.document.tasks if isinstance(t, SolveTask)]
    if not tasks:
        raise NothingToDo("the document has no solve task")
    sections = []
    for t in tasks:
        lhs, rhs = f"({t.coefficient.render()}) * X", t.rhs.render()
        try:
            sol = solve_linear(t.coefficient, t.rhs)
        except NoSolution as exc:
            sections.append(ReportSection(name="solve", reports=(_solvable((), lhs, rhs, exc),)))
            continue
        values = (
            ("particular", sol.particular.render()),
            ("kernel dimension", str(sol.dimension)),
            ("kernel basis", "; ".join(k.render() for k in sol.kernel_basis) or "-"),
        )
        sections.append(ReportSection(name="solve", reports=(_solvable((), lhs, rhs),), values=values))
    return sections


def cmd_berezinian(args: argparse.Namespace, ws: Workspace, config: EngineConfig) -> List[ReportSection]:
    doc = ws.document
    if args.map:
        at = parse_elements(args.at, doc.algebra) if args.at else ()
        tasks = [BerezinianTask(target=parse_map_ref(args.map, doc), at=at)]
    else:
        tasks = [t for t in doc.tasks if isinstance(t, BerezinianTask)]
    if not tasks:
        raise NothingToDo("no map given and the document has no berezinian task")
    sections = []
    for t in tasks:
        res = berezinian(ws.resolve(t.target), t.at or None)
        values = (
            ("map", t.target.render()),
            ("at", ", ".join(v.render() for v in t.at) or "0"),
            ("value", res.value.render()),
            ("schur factor", res.schur_factor.render()),
            ("odd factor", res.odd_factor.render()),
            ("orientation", res.orientation.render()),
        )
        sections.append(ReportSection(name="berezinian", values=values))
    return sections


def cmd_semigroup(args: argparse.Namespace, ws: Workspace, config: EngineConfig) -> List[ReportSection]:
    atlas = ws.require_atlas()
    if args.chart:
        tasks = [SemigroupTask(chart=args.chart, n_max=args.n_max or config.n_max)]
    else:
        tasks = [t for t in ws.document.tasks if isinstance(t, SemigroupTask)]
    if not tasks:
        raise NothingToDo("no chart given and the document has no semigroup task")
    sections = []
    for t in tasks:
        niceness = is_nice(atlas, t.n_max)
        if not niceness.nice:
            report = RelationReport(
                relation="nice",
                cycle=(niceness.chart,),
                verdict=Verdict.fail,
                witness=Witness(
                    lhs=tower_identity(atlas, niceness.first).render(),
                    rhs=tower_identity(atlas, niceness.second).render(),
                ),
                detail=f"{','.join(niceness.first)} vs {','.join(niceness.second)}",
            )
            sections.append(ReportSection(name="semigroup", reports=(report,)))
            continue
        sg = tower_semigroup(atlas, t.chart, t.n_max)
        values = [
            ("chart", sg.chart),
            ("exponents", ",".join(str(e) for e in sg.exponents)),
            ("elements", str(len(sg.elements))),
            ("index", str(sg.index)),
            ("period", str(sg.period)),
        ]
        values.extend((f"cayley row {i}", ",".join(str(x) for x in row)) for i, row in enumerate(sg.cayley))
        sections.append(ReportSection(name="semigroup", reports=sg.compatibility, values=tuple(values)))
    return sections


def cmd_homotopy(args: argparse.Namespace, ws: Workspace, config: EngineConfig) -> List[ReportSection]:
    tasks = [t for t in ws.document.tasks if isinstance(t, (HomotopyCheckTask, HomotopyAverageTask))]
    if not tasks:
        raise NothingToDo("the document has no homotopy task")
    sections = []
    for t in tasks:
        f, g = ws.resolve(t.start_map), ws.resolve(t.end_map)
        if isinstance(t, HomotopyCheckTask):
            h = SemiHomotopy(big_map=ws.resolve(t.big_map), parameter_kind=Parity(t.parameter), endpoints=t.endpoints)
            sections.append(_from_suite(check_homotopy(h, f, g)))
            continue
        kind = Parity.even if any(e.parity() is Parity.even for e in t.endpoints) else Parity.odd
        degree = t.degree if t.degree is not None else config.degree_bound
        start, end = t.endpoints
        try:
            sol = average_solutions(f, g, start, end, kind, degree)
        except NoSolution as exc:
            lhs = f"({(end - start).render()})·Gamma"
            rhs = f"(end - τ)·{t.start_map.render()} + (τ - start)·{t.end_map.render()}"
            sections.append(ReportSection(name="homotopy-average", reports=(_solvable((), lhs, rhs, exc),)))
            continue
        h = SemiHomotopy(big_map=sol.particular, parameter_kind=kind, endpoints=t.endpoints)
        values = (
            ("parameter", kind.value),
            ("particular", sol.particular.render()),
            ("kernel dimension", str(sol.dimension)),
        )
        sections.append(ReportSection(name="homotopy-average", values=values))
        sections.append(_from_suite(check_homotopy(h, f, g)))
    return sections


def cmd_sweep(args: argparse.Namespace, config: EngineConfig) -> List[ReportSection]:
    rng = random.Random(args.seed)
    sig = SuperDomainSignature(n_even=args.even, n_odd=args.odd)
    make = invertible_atlas if args.kind == "invertible" else idempotent_atlas
    n_max = args.n_max or config.n_max
    sections = []
    for i in tqdm(range(args.count), desc=f"sweep {args.kind}", file=sys.stderr):
        atlas = make(rng, sig, args.generators, args.charts)
        suite = check_atlas(atlas, n_max, args.reflexive)
        reports = tuple(r for s in suite.sections for r in s.reports)
        values = (("obstructedness", str(suite.obstructedness)), ("nice", "yes" if suite.niceness.nice else "no"))
        sections.append(ReportSection(name=f"instance {i + 1}", reports=reports, values=values))
    return sections


# ---------- argument parsing ------------------------------------------

def _add_output_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--machine", action="store_true", help="one key=value record per line")
    group.add_argument("--json", action="store_true", help="the report as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semisuper", description="Check semi-supermanifold structures.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the atlas and bundle relation suites")
    p.add_argument("file")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--reflexive", action="store_true")
    p.add_argument("--degree", type=int, default=None, help="degree bound for derived transitions")
    _add_output_flags(p)

    p = sub.add_parser("solve", help="solve the a*X = b tasks of a document")
    p.add_argument("file")
    _add_output_flags(p)

    p = sub.add_parser("berezinian", help="Berezinian and orientation class of a map")
    p.add_argument("file")
    p.add_argument("--map", default=None, help="e.g. 'transition[A,B]' or a named map")
    p.add_argument("--at", default=None, help="comma-separated point, e.g. 'g1*g2, g3'")
    _add_output_flags(p)

    p = sub.add_parser("semigroup", help="tower semigroup at one chart")
    p.add_argument("file")
    p.add_argument("--chart", default=None)
    p.add_argument("--n-max", type=int, default=None)
    _add_output_flags(p)

    p = sub.add_parser("homotopy", help="check or average semi-homotopies")
    p.add_argument("file")
    p.add_argument("--degree", type=int, default=None)
    _add_output_flags(p)

    p = sub.add_parser("sweep", help="run generated atlases through the checker")
    p.add_argument("--kind", choices=("invertible", "idempotent"), default="invertible")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--charts", type=int, default=3)
    p.add_argument("--generators", type=int, default=3)
    p.add_argument("--even", type=int, default=1)
    p.add_argument("--odd", type=int, default=1)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--reflexive", action="store_true")
    _add_output_flags(p)
    return parser


_FILE_COMMANDS: Dict[str, Callable[[argparse.Namespace, Workspace, EngineConfig], List[ReportSection]]] = {
    "check": cmd_check,
    "solve": cmd_solve,
    "berezinian": cmd_berezinian,
    "semigroup": cmd_semigroup,
    "homotopy": cmd_homotopy,
}


def _emit(report: Report, args: argparse.Namespace) -> None:
    if args.json:
        sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    elif args.machine:
        sys.stdout.write(report.render_machine())
    else:
        sys.stdout.write(report.render_human())


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.ERROR,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        config = EngineConfig(
            n_max=getattr(args, "n_max", None) or DEFAULT_N_MAX,
            degree_bound=getattr(args, "degree", None),
        )
        if args.command == "sweep":
            data = " ".join(sys.argv[1:] if argv is None else argv).encode("utf-8")
            sections = cmd_sweep(args, config)
        else:
            data = Path(args.file).read_bytes()
            ws = build(parse(data.decode("utf-8"), config.max_generators))
            sections = _FILE_COMMANDS[args.command](args, ws, config)
        report = make_report(data, sections)
    except (FormatSyntaxError, FormatSemanticError) as exc:
        logger.error("%s:%s", args.file, exc)
        return 2
    except (SemiSuperError, ValidationError, OSError, UnicodeDecodeError) as exc:
        logger.error("%s", exc)
        return 2
    except Exception:
        logger.exception("internal error")
        return 3
    _emit(report, args)
    return 0 if report.ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

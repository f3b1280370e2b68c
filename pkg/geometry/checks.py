"""Full verification suites over an atlas, a bundle or a homotopy, grouped in named sections."""
from __future__ import annotations

import logging
from typing import List, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from algebra.config import DEFAULT_N_MAX
from algebra.grassmann import Parity
from algebra.supermap import SuperMap
from geometry.reports import RelationReport
from geometry.semiatlas import (
    NicenessResult,
    SemiAtlas,
    check_cocycles,
    check_gluing,
    check_reflexivity,
    check_tower_identity_laws,
    check_tower_relations,
    is_nice,
    obstructedness_degree,
)
from geometry.semibundle import (
    SemiBundle,
    check_bundle_transitions,
    check_cover_agreement,
    check_local_trivialization,
    check_section_compatibility,
    check_semi_section,
)
from geometry.semihomotopy import SemiHomotopy, check_even_semihomotopy, check_odd_semihomotopy

__all__ = ["SuiteSection", "AtlasSuite", "check_atlas", "check_bundle", "check_homotopy"]

logger = logging.getLogger(__name__)


class SuiteSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    reports: Tuple[RelationReport, ...]


class AtlasSuite(BaseModel):
    model_config = ConfigDict(frozen=True)

    sections: Tuple[SuiteSection, ...]
    obstructedness: int
    niceness: NicenessResult


def _section(name: str, reports: List[RelationReport]) -> SuiteSection:
    logger.debug("section %s: %d reports", name, len(reports))
    return SuiteSection(name=name, reports=tuple(reports))


def check_atlas(atlas: SemiAtlas, n_max: int = DEFAULT_N_MAX, reflexive: bool = False) -> AtlasSuite:
    sections = []
    if atlas.coordinate_maps:
        sections.append(_section("gluing", check_gluing(atlas)))
    if n_max >= 2:
        sections.append(_section("tower", check_tower_relations(atlas, n_max)))
        if reflexive:
            sections.append(_section("reflexivity", check_reflexivity(atlas, n_max)))
    sections.append(_section("identity-laws", check_tower_identity_laws(atlas, n_max, reflexive)))
    cocycles = check_cocycles(atlas, n_max)
    sections.append(_section("cocycles", cocycles))
    return AtlasSuite(
        sections=tuple(sections),
        obstructedness=obstructedness_degree(atlas, n_max, cocycles),
        niceness=is_nice(atlas, n_max),
    )


def check_bundle(
    bundle: SemiBundle,
    n_max: int = DEFAULT_N_MAX,
    reflexive: bool = False,
    second_cover: Optional[SemiAtlas] = None,
    cross: Optional[Mapping[Tuple[str, str], SuperMap]] = None,
) -> List[SuiteSection]:
    charts = bundle.base.chart_ids
    sections = [
        _section(
            "trivializations",
            [check_local_trivialization(bundle, c) for c in charts if c in bundle.trivializations],
        )
    ]
    semi_sections = []
    for c in charts:
        if c in bundle.sections:
            for report in check_semi_section(bundle.projection, bundle.sections[c], reflexive):
                semi_sections.append(report.model_copy(update={"cycle": (c,)}))
    sections.append(_section("semi-sections", semi_sections))
    if bundle.sections:
        sections.append(_section("section-compatibility", check_section_compatibility(bundle)))
    if n_max >= 2:
        sections.append(_section("bundle-transitions", check_bundle_transitions(bundle, n_max, reflexive)))
    if second_cover is not None:
        sections.append(
            _section("agreement", check_cover_agreement(bundle, second_cover, cross or {}, n_max, reflexive))
        )
    return sections


def check_homotopy(h: SemiHomotopy, f: SuperMap, g: SuperMap) -> SuiteSection:
    if h.parameter_kind is Parity.even:
        return _section("even-semihomotopy", check_even_semihomotopy(h, f, g))
    return _section("odd-semihomotopy", check_odd_semihomotopy(h, f, g))

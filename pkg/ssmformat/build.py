"""Turn a parsed ``Document`` into the geometry objects the checkers consume."""
from __future__ import annotations

import logging
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from algebra.errors import MissingMap
from algebra.superpoly import SuperDomainSignature
from algebra.supermap import SuperMap
from geometry.semiatlas import SemiAtlas
from geometry.semibundle import SemiBundle
from ssmformat.document import Document, MapRef, MapRole

__all__ = ["Workspace", "build"]

logger = logging.getLogger(__name__)


class Workspace(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    document: Document
    maps: Dict[Tuple[str, ...], SuperMap]
    atlas: Optional[SemiAtlas] = None
    bundle: Optional[SemiBundle] = None
    second_cover: Optional[SemiAtlas] = None
    cross: Dict[Tuple[str, str], SuperMap] = {}

    def resolve(self, ref: MapRef) -> SuperMap:
        try:
            return self.maps[ref.key]
        except KeyError:
            raise MissingMap(ref.role.value, ref.indices or (ref.name,)) from None

    def require_atlas(self) -> SemiAtlas:
        if self.atlas is None:
            raise MissingMap("atlas", ("charts",))
        return self.atlas


def _atlas_signature(doc: Document) -> Optional[SuperDomainSignature]:
    if doc.bundle is not None:
        return doc.space(doc.bundle.base).signature
    if doc.spaces:
        return doc.spaces[0].signature
    return None


def _by_role(doc: Document, maps: Dict[Tuple[str, ...], SuperMap], role: MapRole) -> Dict[Tuple[str, ...], SuperMap]:
    return {m.indices: maps[m.key] for m in doc.maps if m.role is role}


def build(doc: Document) -> Workspace:
    n = doc.algebra
    maps = {m.key: SuperMap(m.source, m.target, m.components, n) for m in doc.maps}
    first = tuple(c.name for c in doc.charts if not c.second)
    second = tuple(c.name for c in doc.charts if c.second)
    semi = tuple(c.name for c in doc.charts if c.semi)
    sig = _atlas_signature(doc)

    def groups(names: Tuple[str, ...]) -> Tuple[Tuple[str, ...], ...]:
        return tuple(o.charts for o in doc.overlaps if set(o.charts) <= set(names))

    atlas = None
    if first and sig is not None:
        atlas = SemiAtlas(
            signature=sig,
            n_generators=n,
            chart_ids=first,
            coordinate_maps={k[0]: f for k, f in _by_role(doc, maps, MapRole.coordinate).items()},
            transitions=dict(_by_role(doc, maps, MapRole.transition)),
            overlaps=groups(first),
            declared_semi=tuple(c for c in semi if c in first),
        )

    bundle = second_cover = None
    cross: Dict[Tuple[str, str], SuperMap] = {}
    if doc.bundle is not None and atlas is not None:
        total = doc.space(doc.bundle.total).signature
        fiber = doc.space(doc.bundle.fiber).signature
        projection = maps.get(("projection", doc.bundle.total, doc.bundle.base))
        if projection is None:
            raise MissingMap("projection", (doc.bundle.total, doc.bundle.base))
        lambdas = _by_role(doc, maps, MapRole.bundle_transition)
        bundle = SemiBundle(
            total=total,
            base=atlas,
            fiber=fiber,
            projection=projection,
            sections={k[0]: f for k, f in _by_role(doc, maps, MapRole.section).items()},
            trivializations={k[0]: f for k, f in _by_role(doc, maps, MapRole.trivialization).items()},
            bundle_transitions={k: f for k, f in lambdas.items() if k[0] in first},
        )
        if second:
            second_cover = SemiAtlas(
                signature=bundle.product,
                n_generators=n,
                chart_ids=second,
                transitions={k: f for k, f in lambdas.items() if k[0] in second},
                overlaps=groups(second),
                declared_semi=tuple(c for c in semi if c in second),
            )
            cross = dict(_by_role(doc, maps, MapRole.cross))
    logger.debug(
        "built workspace: atlas=%s bundle=%s second cover=%s",
        atlas is not None,
        bundle is not None,
        second_cover is not None,
    )
    return Workspace(
        document=doc, maps=maps, atlas=atlas, bundle=bundle, second_cover=second_cover, cross=cross
    )

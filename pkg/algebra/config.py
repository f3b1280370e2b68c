from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

__all__ = ["DEFAULT_MAX_GENERATORS", "DEFAULT_N_MAX", "TOOL_VERSION", "EngineConfig"]

TOOL_VERSION = "0.1.0"

# term keys are bitmasks, so every 2^N-sized system stays small enough to eliminate
DEFAULT_MAX_GENERATORS = 16
DEFAULT_N_MAX = 3


class EngineConfig(BaseModel):
    """Knobs selected by CLI flags; nothing is read from the environment."""

    model_config = ConfigDict(frozen=True)

    max_generators: int = Field(default=DEFAULT_MAX_GENERATORS, ge=1)
    n_max: int = Field(default=DEFAULT_N_MAX, ge=1)
    degree_bound: Optional[int] = Field(default=None, ge=0)

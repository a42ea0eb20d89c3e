"""Engine limits and CLI run configuration."""

import os
from enum import Enum
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

TRUNCATION_ENV_VAR = "LAD_MAX_TRUNCATION"


class EngineLimits(BaseModel):
    """Caps that turn runaway computations into reported errors.

    Frozen so instances are hashable and can key the basis and iterate caches.
    """

    model_config = ConfigDict(frozen=True)

    max_basis_size: int = Field(default=10_000, gt=0, description="Largest intermediate Gröbner basis")
    max_degree: int = Field(default=4_096, gt=0, description="Largest leading total degree in a basis")
    max_truncation: int = Field(
        default=128, gt=0, description="How far the truncation N may climb above its starting value"
    )
    materialize_limit: int = Field(
        default=1_000_000, gt=0, description="Staircases above this size are counted, not listed"
    )
    truncation: Literal["bracket", "power"] = Field(
        default="bracket",
        description="bracket adjoins x_i^N, power adjoins every monomial of degree N",
    )
    workers: int = Field(default=1, gt=0, description="Threads for per-n colength tasks")

    @classmethod
    def from_env(cls, **overrides) -> "EngineLimits":
        """Build limits, letting LAD_MAX_TRUNCATION override the truncation budget."""
        values = dict(overrides)
        raw = os.environ.get(TRUNCATION_ENV_VAR)
        if raw and "max_truncation" not in values:
            values["max_truncation"] = int(raw)
        return cls(**values)


DEFAULT_LIMITS = EngineLimits()


class OutputFormat(str, Enum):
    HUMAN = "human"
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel):
    """Validated options of a single CLI invocation."""

    fixture: Path
    command: str
    n_max: int = Field(default=3, gt=0)
    limits: EngineLimits = Field(default_factory=EngineLimits)
    output_format: OutputFormat = OutputFormat.HUMAN
    output: Optional[Path] = None

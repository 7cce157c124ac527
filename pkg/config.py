"""
Run configuration shared by the command line front end and the tool server.
"""

import os
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Optional

try:
    from .errors import UsageError
    from .exactfield import Field
except ImportError:
    from errors import UsageError
    from exactfield import Field


DEFAULT_SEED = 0xAFF1E
DEFAULT_PRIME = 17
DEFAULT_SUBSPACE_CAP = 10 ** 7
ISO_TRIALS = 64
ISO_EXHAUSTIVE_LIMIT = 2 ** 16
LOCAL_EXHAUSTIVE_LIMIT = 2 ** 12
SPLIT_TRIALS = 48
SAMPLING_BUDGET = 200
CACHE_ENV = "AFFINE_QUIVER_CACHE"
OUTPUT_FORMATS = ("json", "table")


def default_cache_dir() -> Path:
    override = os.environ.get(CACHE_ENV)
    if override:
        return Path(override)
    return Path.home() / ".cache" / "affine-quiver"


def parse_field_spec(spec) -> Optional[int]:
    """Turn "17", 17, "Q" or "rational" into a prime or None (for the rationals)."""
    if spec is None:
        return DEFAULT_PRIME
    if isinstance(spec, int):
        return spec
    text = str(spec).strip()
    if text.upper() in ("Q", "QQ", "RATIONAL"):
        return None
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"field must be a prime or 'Q', got {spec!r}")


@dataclass(frozen=True)
class Config:
    prime: Optional[int] = DEFAULT_PRIME
    seed: int = DEFAULT_SEED
    cache_dir: Optional[Path] = dataclass_field(default_factory=default_cache_dir)
    subspace_cap: int = DEFAULT_SUBSPACE_CAP
    output_format: str = "table"
    log_level: str = "WARNING"

    def __post_init__(self):
        if self.output_format not in OUTPUT_FORMATS:
            raise UsageError(f"format must be one of {', '.join(OUTPUT_FORMATS)}")
        if self.subspace_cap < 1:
            raise UsageError("cap must be positive")

    def field(self) -> Field:
        return Field(self.prime)

    @classmethod
    def from_args(cls, args) -> "Config":
        cache = getattr(args, "cache", None)
        return cls(
            prime=parse_field_spec(getattr(args, "field", None)),
            seed=getattr(args, "seed", None) if getattr(args, "seed", None) is not None else DEFAULT_SEED,
            cache_dir=None if getattr(args, "no_cache", False) else (Path(cache) if cache else default_cache_dir()),
            subspace_cap=getattr(args, "cap", None) or DEFAULT_SUBSPACE_CAP,
            output_format=getattr(args, "format", None) or "table",
            log_level=getattr(args, "log_level", None) or "WARNING",
        )

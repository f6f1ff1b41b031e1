"""Systematic literature review toolkit."""

from ._slrkit import (
    ConfigError,
    Error,
    IngestError,
    IntegrityError,
    LockError,
    NotFoundError,
    PrerequisiteError,
    ValidationError,
    __version__,
    box_stats,
    catalog,
    config_hash,
    detect_duplicates,
    find_acronyms,
    rank,
    run_stage,
    similarity,
    stages,
    stem,
    tfidf,
    tokenize,
)

__all__ = [
    "ConfigError",
    "Error",
    "IngestError",
    "IntegrityError",
    "LockError",
    "NotFoundError",
    "PrerequisiteError",
    "ValidationError",
    "__version__",
    "box_stats",
    "catalog",
    "config_hash",
    "detect_duplicates",
    "find_acronyms",
    "rank",
    "run_stage",
    "similarity",
    "stages",
    "stem",
    "tfidf",
    "tokenize",
]

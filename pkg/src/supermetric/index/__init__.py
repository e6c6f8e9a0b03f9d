"""Hyperplane partition trees, monotone/LRT trees and the VPT baseline."""
from __future__ import annotations

from .config import EXCLUSIONS, STRUCTURES, IndexConfig, arity_for
from .core import (
    Index,
    QueryReport,
    build,
    count_exclusive_queries,
    exclusion_verdicts,
    range_query,
    range_query_batch,
)
from .flat import FlatTree
from .selection import select_fft, select_random, select_sat
from .space import Space

__all__ = [
    "EXCLUSIONS",
    "STRUCTURES",
    "FlatTree",
    "Index",
    "IndexConfig",
    "QueryReport",
    "Space",
    "arity_for",
    "build",
    "count_exclusive_queries",
    "exclusion_verdicts",
    "range_query",
    "range_query_batch",
    "select_fft",
    "select_random",
    "select_sat",
]

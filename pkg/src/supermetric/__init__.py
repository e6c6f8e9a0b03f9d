"""Exact range search in metric and supermetric spaces."""
from __future__ import annotations

from . import kernels
from .data import Dataset, generate_uniform, load_ascii, save_ascii, split_queries
from .errors import (
    DegenerateSpace,
    IllegalExclusion,
    IncompatibleVectors,
    NonMetricInput,
    ParseError,
    UndefinedDirection,
    ZeroMass,
)
from .index import IndexConfig, QueryReport, build, range_query
from .metrics import METRICS, MetricDescriptor, get_metric, power_transform
from .oracle import exhaustive_range, quadruple_check

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DegenerateSpace",
    "IllegalExclusion",
    "IncompatibleVectors",
    "IndexConfig",
    "METRICS",
    "MetricDescriptor",
    "NonMetricInput",
    "ParseError",
    "QueryReport",
    "UndefinedDirection",
    "ZeroMass",
    "build",
    "exhaustive_range",
    "generate_uniform",
    "get_metric",
    "kernels",
    "load_ascii",
    "power_transform",
    "quadruple_check",
    "range_query",
    "save_ascii",
    "split_queries",
]

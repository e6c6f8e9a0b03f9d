"""Kernel backend selection.

The compiled extension is used when it was built and importable; setting
``SUPERMETRIC_PURE_PYTHON=1`` forces the numpy fallback.  :func:`use_backend`
switches at runtime (tests and the backend benchmark rely on it).
"""
from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

from . import _layout, _pykernels
from ._layout import CHEBYSHEV, EUCLIDEAN, JSD, MANHATTAN, TRIANGULAR  # noqa: F401

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_impl = _pykernels
BACKEND = "python"
if _ckernels is not None and not os.environ.get("SUPERMETRIC_PURE_PYTHON"):
    _impl = _ckernels
    BACKEND = "compiled"


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _ckernels is not None else [])


def set_backend(name: str) -> None:
    global _impl, BACKEND
    if name == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        _impl = _ckernels
    elif name == "python":
        _impl = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


@contextmanager
def use_backend(name: str):
    previous = BACKEND
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def one_to_many(X: np.ndarray, q: np.ndarray, idx, code: int, alpha: float) -> np.ndarray:
    return _impl.one_to_many(X, q, idx, code, alpha)


def paired(A: np.ndarray, B: np.ndarray, code: int, alpha: float) -> np.ndarray:
    # row-paired distances are only used for sampling, so numpy suffices on both backends
    return _pykernels.paired(A, B, code, alpha)


def range_query(tree, X, q, t: float, hilbert: bool, code: int, alpha: float):
    return _impl.range_query(tree, X, q, float(t), bool(hilbert), code, alpha)


def range_query_batch(tree, X, Q, t: float, hilbert: bool, code: int, alpha: float):
    return _impl.range_query_batch(tree, X, Q, float(t), bool(hilbert), code, alpha)


__all__ = [
    "BACKEND",
    "available_backends",
    "set_backend",
    "use_backend",
    "one_to_many",
    "paired",
    "range_query",
    "range_query_batch",
    "_layout",
]

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple


class Family(NamedTuple):
    family: str  # hpt | sat | monpt | balanced_monpt | lrt | vpt
    selection: str
    arity_policy: str
    pure: bool = False


STRUCTURES: dict[str, Family] = {
    "sat_pure": Family("sat", "proximal", "none", pure=True),
    "sat_distal_pure": Family("sat", "distal", "none", pure=True),
    "sat_distal_fixed": Family("sat", "distal", "fixed:4"),
    "sat_distal_log": Family("sat", "distal", "log"),
    "sat_global_fixed": Family("sat", "global", "fixed:4"),
    "sat_global_log": Family("sat", "global", "log"),
    "hpt_fft_binary": Family("hpt", "fft", "binary"),
    "hpt_fft_fixed": Family("hpt", "fft", "fixed:4"),
    "hpt_fft_log": Family("hpt", "fft", "log"),
    "hpt_random_binary": Family("hpt", "random", "binary"),
    "hpt_random_fixed": Family("hpt", "random", "fixed:4"),
    "hpt_random_log": Family("hpt", "random", "log"),
    "monpt_rand": Family("monpt", "random", "binary"),
    "monpt_far": Family("monpt", "far", "binary"),
    "balanced_monpt_rand": Family("balanced_monpt", "random", "binary"),
    "balanced_monpt_far": Family("balanced_monpt", "far", "binary"),
    "lrt_rand": Family("lrt", "random", "binary"),
    "lrt_far": Family("lrt", "far", "binary"),
    "vpt": Family("vpt", "random", "binary"),
}

EXCLUSIONS = ("hyperbolic", "hilbert")


def arity_for(policy: str, size: int) -> int | None:
    """Number of pivots a node over ``size`` objects gets; None means uncapped (pure SAT)."""
    if policy == "binary":
        return 2
    if policy.startswith("fixed:"):
        return int(policy.split(":", 1)[1])
    if policy == "log":
        return max(2, int(math.floor(math.log(size)))) if size > 1 else 2
    if policy == "none":
        return None
    raise ValueError(f"unknown arity policy {policy!r}")


@dataclass(frozen=True)
class IndexConfig:
    structure: str
    selection: str
    arity_policy: str
    exclusion: str = "hilbert"
    seed: int = 0
    leaf_capacity: int | None = None
    fit_sample: int | None = None  # LRT: cap on points used for the line fit

    def __post_init__(self):
        fam = STRUCTURES.get(self.structure)
        if fam is None:
            raise ValueError(f"unknown structure {self.structure!r}; choose from {sorted(STRUCTURES)}")
        if self.selection != fam.selection or self.arity_policy != fam.arity_policy:
            raise ValueError(
                f"{self.structure} uses selection={fam.selection!r}, arity={fam.arity_policy!r}"
            )
        if self.exclusion not in EXCLUSIONS:
            raise ValueError(f"exclusion must be one of {EXCLUSIONS}")
        if self.leaf_capacity is not None and self.leaf_capacity < 1:
            raise ValueError("leaf_capacity must be positive")

    @classmethod
    def named(cls, structure: str, **kwargs) -> IndexConfig:
        fam = STRUCTURES.get(structure)
        if fam is None:
            raise ValueError(f"unknown structure {structure!r}; choose from {sorted(STRUCTURES)}")
        return cls(structure=structure, selection=fam.selection, arity_policy=fam.arity_policy, **kwargs)

    @property
    def family(self) -> Family:
        return STRUCTURES[self.structure]

    def with_seed(self, seed: int) -> IndexConfig:
        return replace(self, seed=seed)

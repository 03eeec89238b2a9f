"""Reference optimizers evaluated through the same charged oracle."""

from .algorithms import (DEFAULT_POWER_LEVELS, KINDS, BaselineSpec, basic_bo, basic_bo_weights,
                         cma_es, compute_first, direct_search, exhaustive, random_search,
                         run_baseline, transmit_first)
from .cmaes import CmaResult, cma_es_minimize
from .direct import DirectResult, direct_minimize, potentially_optimal

__all__ = [
    "BaselineSpec",
    "KINDS",
    "DEFAULT_POWER_LEVELS",
    "exhaustive",
    "basic_bo",
    "basic_bo_weights",
    "direct_search",
    "cma_es",
    "random_search",
    "transmit_first",
    "compute_first",
    "run_baseline",
    "direct_minimize",
    "DirectResult",
    "potentially_optimal",
    "cma_es_minimize",
    "CmaResult",
]

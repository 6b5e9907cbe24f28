"""
Opposite-direction helper traffic as a homogeneous Poisson process on the line.
"""
from __future__ import annotations

import numpy as np

from ..scenario import HelperConfig


__all__ = ["poisson_points", "generate_helpers", "count_clusters"]


def poisson_points(density: float, low: float, high: float, stream: np.random.Generator) -> np.ndarray:
    """
    Sorted points of a homogeneous Poisson process with the given density on [low, high]
    """
    if density < 0 or high < low:
        raise ValueError(f"Need density >= 0 and high >= low, got density={density}, [{low}, {high}]")
    if density == 0:
        return np.zeros(0)
    n = stream.poisson(density * (high - low))
    return np.sort(stream.uniform(low, high, size=n))


def generate_helpers(rho2: float, span: float, stream: np.random.Generator) -> HelperConfig:
    """
    Helpers met by the VoI in one cycle: n ~ Poisson(rho2·span), positions uniform on [0, span].

    Args:
        rho2: Helper density in veh/m
        span: Length of the relative road segment in m
        stream: Random stream

    Returns:
        The sampled HelperConfig, with `l0` the first position and `gaps` the successive differences
    """
    if span <= 0:
        raise ValueError(f"span must be positive, got {span}")
    positions = poisson_points(rho2, 0.0, span, stream)
    if positions.size == 0:
        return HelperConfig(n=0)
    return HelperConfig(n=int(positions.size), l0=float(positions[0]), gaps=tuple(np.diff(positions)))


def count_clusters(cfg: HelperConfig, radius: float) -> int:
    """
    Number of maximal groups of helpers whose consecutive gaps are at most 2·radius
    """
    if cfg.n == 0:
        return 0
    return 1 + int(np.count_nonzero(np.asarray(cfg.gaps) > 2 * radius))

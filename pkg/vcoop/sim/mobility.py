"""
Speed models. A model turns a nominal speed into a `Trajectory`, the displacement of one vehicle along its own
direction of travel as a piecewise linear function of time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..configs import MobilityConfig
from ..constants import MIN_SPEED_MPS
from ..registry import register_mobility
from ..scenario import Scenario


__all__ = [
    "Trajectory",
    "Mobility",
    "ConstantMobility",
    "ConstantMobilityConfig",
    "GaussianMobility",
    "GaussianMobilityConfig",
]

# far enough that no simulated event ever reaches the last breakpoint
_FAR_FUTURE_S = 1e9


@dataclass
class Trajectory:
    """
    Displacement `offsets[i]` at time `times[i]`, both strictly increasing from (0, 0), linear in between.
    """

    times: np.ndarray
    offsets: np.ndarray

    @classmethod
    def linear(cls, speed: float) -> "Trajectory":
        return cls(times=np.array([0.0, _FAR_FUTURE_S]), offsets=np.array([0.0, speed * _FAR_FUTURE_S]))

    @classmethod
    def from_slots(cls, speed: float, anchor: float, tau: float, slot_speeds: np.ndarray) -> "Trajectory":
        """
        Nominal `speed` until `anchor`, then `slot_speeds[m]` during [anchor + m·tau, anchor + (m + 1)·tau), then
        nominal again.
        """
        slot_ends = anchor + tau * np.arange(1, slot_speeds.size + 1)
        times = np.concatenate(([0.0, anchor], slot_ends, [_FAR_FUTURE_S]))
        steps = np.concatenate(([speed * anchor], slot_speeds * tau, [speed * (_FAR_FUTURE_S - slot_ends[-1])]))
        offsets = np.concatenate(([0.0], np.cumsum(steps)))
        if anchor <= 0:
            times, offsets = times[1:], offsets[1:]
        return cls(times=times, offsets=offsets)

    def offset_at(self, t):
        return np.interp(t, self.times, self.offsets)

    def time_at(self, x):
        """
        Time at which the displacement reaches `x` (0 for x <= 0)
        """
        return np.interp(x, self.offsets, self.times)


class Mobility:
    """
    Base class of the speed models. `voi_trajectory` covers a whole run, `helper_trajectory` only has to be random
    from `anchor` on, the time a helper approaches the infrastructure it serves the VoI from.
    """

    def __init__(self, config: MobilityConfig, **kwargs):
        self.config = config.update(kwargs)

    @property
    def is_constant(self) -> bool:
        return False

    def voi_trajectory(self, s: Scenario, distance: float, stream: np.random.Generator) -> Trajectory:
        raise NotImplementedError

    def helper_trajectory(
        self,
        s: Scenario,
        anchor: float,
        distance: float,
        stream: np.random.Generator,
    ) -> Trajectory:
        raise NotImplementedError


@dataclass
class ConstantMobilityConfig(MobilityConfig):
    name = "constant"


@register_mobility("constant", config_class=ConstantMobilityConfig, description="Constant speeds v1, v2")
class ConstantMobility(Mobility):
    @property
    def is_constant(self) -> bool:
        return True

    def voi_trajectory(self, s, distance, stream=None):
        return Trajectory.linear(s.v1)

    def helper_trajectory(self, s, anchor=0.0, distance=0.0, stream=None):
        return Trajectory.linear(s.v2)


@dataclass
class GaussianMobilityConfig(MobilityConfig):
    """
    Args:
        sigma1: Standard deviation of the VoI speed in m/s
        sigma2: Standard deviation of the helper speeds in m/s
        tau: Speed-change interval in s
    """

    name = "gaussian"
    sigma1: float = 2.0
    sigma2: float = 2.0
    tau: float = 5.0

    def __post_init__(self):
        super().__post_init__()
        if self.sigma1 < 0 or self.sigma2 < 0 or self.tau <= 0:
            raise ValueError(f"Gaussian mobility needs sigma1, sigma2 >= 0 and tau > 0, got {self}")


@register_mobility(
    "gaussian",
    config_class=GaussianMobilityConfig,
    description="Speeds redrawn from N(v, sigma^2) every tau seconds",
)
class GaussianMobility(Mobility):
    def _slot_speeds(self, speed: float, sigma: float, distance: float, stream: np.random.Generator):
        # two spare slots beyond the nominal travel time, after which motion is nominal again
        num_slots = math.ceil(distance / (speed * self.config.tau)) + 2
        return np.maximum(stream.normal(speed, sigma, size=num_slots), MIN_SPEED_MPS)

    def voi_trajectory(self, s, distance, stream):
        speeds = self._slot_speeds(s.v1, self.config.sigma1, distance, stream)
        return Trajectory.from_slots(s.v1, 0.0, self.config.tau, speeds)

    def helper_trajectory(self, s, anchor, distance, stream):
        anchor = math.floor(max(anchor, 0.0) / self.config.tau) * self.config.tau
        speeds = self._slot_speeds(s.v2, self.config.sigma2, distance, stream)
        return Trajectory.from_slots(s.v2, anchor, self.config.tau, speeds)

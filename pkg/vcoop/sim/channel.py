"""
Channel models turn a link into a transmission rate. The constant-rate model uses the scenario rates directly; the
Rayleigh/path-loss model averages the Shannon rate B·log2(1 + P·|β·d^-2|^2) over the segments of one traverse of the
coverage region.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..configs import ChannelConfig
from ..constants import DISTANCE_FLOOR_M, LinkKind
from ..registry import register_channel
from ..scenario import Scenario
from .connection import nominal_range


__all__ = [
    "LinkProfile",
    "Channel",
    "ConstantRateChannel",
    "ConstantRateChannelConfig",
    "RayleighPathLossChannel",
    "RayleighPathLossChannelConfig",
    "effective_rate",
    "measure_average_rates",
]


@dataclass(frozen=True)
class LinkProfile:
    """
    One traverse of a coverage region: the distance to the transmitter runs over [-half_length, half_length].

    Args:
        half_length: Radio range of the transmitter in m
        bandwidth: Bandwidth in Hz
        power_dbm: Transmit power in dBm
    """

    half_length: float
    bandwidth: float
    power_dbm: float

    @property
    def power_mw(self) -> float:
        return 10.0 ** (self.power_dbm / 10.0)


def effective_rate(
    link: LinkProfile,
    segments: int,
    stream: Optional[np.random.Generator] = None,
    beta: Optional[np.ndarray] = None,
) -> float:
    """
    Segment-averaged Shannon rate of one traverse.

    Args:
        link: The traverse geometry and radio parameters
        segments: Number K of equal segments; the distance of a segment is its midpoint, floored at 1 m
        stream: Source of the per-segment fading gains β ~ N(0, 1)
        beta: Fixed fading gains of shape (K,) instead of drawing them

    Returns:
        The mean rate over the segments in bit/s
    """
    if segments < 1:
        raise ValueError(f"segments must be at least 1, got {segments}")
    width = 2.0 * link.half_length / segments
    midpoints = -link.half_length + width * (np.arange(segments) + 0.5)
    distance = np.maximum(np.abs(midpoints), DISTANCE_FLOOR_M)
    if beta is None:
        if stream is None:
            raise ValueError("effective_rate needs either a random stream or fixed fading gains")
        beta = stream.standard_normal(segments)
    beta = np.broadcast_to(np.asarray(beta, dtype=np.float64), (segments,))
    snr = link.power_mw * np.square(beta) * np.power(distance, -4.0)
    return float(link.bandwidth * np.mean(np.log2(1.0 + snr)))


class Channel:
    def __init__(self, config: ChannelConfig, **kwargs):
        self.config = config.update(kwargs)

    def link_rate(self, link: LinkKind | str, radius: float, s: Scenario, stream: np.random.Generator) -> float:
        """
        Rate of one contact on `link` whose coverage has the given radius
        """
        raise NotImplementedError


@dataclass
class ConstantRateChannelConfig(ChannelConfig):
    name = "constant_rate"


@register_channel("constant_rate", config_class=ConstantRateChannelConfig, description="Fixed rates w_I and w_V")
class ConstantRateChannel(Channel):
    def link_rate(self, link, radius, s, stream=None):
        return s.w_I if LinkKind(link) == LinkKind.V2I else s.w_V


@dataclass
class RayleighPathLossChannelConfig(ChannelConfig):
    """
    Args:
        bandwidth_v2i: Infrastructure bandwidth in Hz
        power_v2i_dbm: Infrastructure transmit power in dBm
        bandwidth_v2v: Vehicle bandwidth in Hz
        power_v2v_dbm: Vehicle transmit power in dBm
        segments: Segments K per traverse
    """

    name = "rayleigh_path_loss"
    bandwidth_v2i: float = 40e6
    power_v2i_dbm: float = 52.0
    bandwidth_v2v: float = 5e6
    power_v2v_dbm: float = 20.0
    segments: int = 1000

    def __post_init__(self):
        super().__post_init__()
        if self.segments < 1 or self.bandwidth_v2i <= 0 or self.bandwidth_v2v <= 0:
            raise ValueError(f"Rayleigh channel needs segments >= 1 and positive bandwidths, got {self}")


@register_channel(
    "rayleigh_path_loss",
    config_class=RayleighPathLossChannelConfig,
    description="Shannon rate with Rayleigh fading and d^-2 amplitude path loss, averaged per traverse",
)
class RayleighPathLossChannel(Channel):
    def profile(self, link: LinkKind | str, radius: float) -> LinkProfile:
        if LinkKind(link) == LinkKind.V2I:
            return LinkProfile(radius, self.config.bandwidth_v2i, self.config.power_v2i_dbm)
        return LinkProfile(radius, self.config.bandwidth_v2v, self.config.power_v2v_dbm)

    def link_rate(self, link, radius, s, stream):
        return effective_rate(self.profile(link, radius), self.config.segments, stream)


def measure_average_rates(
    channel: Channel,
    s: Scenario,
    traverses: int,
    stream: np.random.Generator,
) -> Tuple[float, float]:
    """
    Average V2I and V2V rates over independent traverses of the nominal coverage regions. Feeding them back as w_I and
    w_V gives the constant-rate equivalent of a time-varying channel.

    Returns:
        A tuple of (mean V2I rate, mean V2V rate) in bit/s
    """
    if traverses < 1:
        raise ValueError(f"traverses must be at least 1, got {traverses}")
    v2i = [channel.link_rate(LinkKind.V2I, nominal_range(LinkKind.V2I, s), s, stream) for _ in range(traverses)]
    v2v = [channel.link_rate(LinkKind.V2V, nominal_range(LinkKind.V2V, s), s, stream) for _ in range(traverses)]
    return float(np.mean(v2i)), float(np.mean(v2v))

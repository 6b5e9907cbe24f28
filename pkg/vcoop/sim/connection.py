"""
Connection models decide the radio range of a link: the fixed range of the unit disk model, or a range with
log-normal shadowing around it that is redrawn on a fixed time grid while a contact lasts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import norm, truncnorm

from ..configs import ConnectionConfig
from ..constants import LinkKind
from ..registry import register_connection
from ..scenario import Scenario


__all__ = [
    "Connection",
    "UnitDiskConnection",
    "UnitDiskConnectionConfig",
    "LogNormalConnection",
    "LogNormalConnectionConfig",
    "nominal_range",
]


def nominal_range(link: LinkKind | str, s: Scenario) -> float:
    return s.r_I if LinkKind(link) == LinkKind.V2I else s.r0


class Connection:
    def __init__(self, config: ConnectionConfig, **kwargs):
        self.config = config.update(kwargs)

    @property
    def is_fixed(self) -> bool:
        """
        Whether every draw returns the nominal range, so a contact is one uninterrupted interval
        """
        return False

    @property
    def tau(self) -> Optional[float]:
        """
        Interval in s at which the link state is re-evaluated, None when it never changes during a contact
        """
        return None

    def max_radius(self, link: LinkKind | str, s: Scenario) -> float:
        return nominal_range(link, s)

    def radius(self, link: LinkKind | str, s: Scenario, stream: np.random.Generator, size=None):
        """
        Draw effective ranges of the given shape on the given link (a float when `size` is None)
        """
        raise NotImplementedError


@dataclass
class UnitDiskConnectionConfig(ConnectionConfig):
    name = "unit_disk"


@register_connection("unit_disk", config_class=UnitDiskConnectionConfig, description="Fixed ranges r_I and r0")
class UnitDiskConnection(Connection):
    @property
    def is_fixed(self) -> bool:
        return True

    def radius(self, link, s, stream=None, size=None):
        r = nominal_range(link, s)
        return r if size is None else np.full(size, r)


@dataclass
class LogNormalConnectionConfig(ConnectionConfig):
    """
    Args:
        alpha: Path loss exponent
        sigma: Shadowing standard deviation in dB
        truncation: The shadowing term is truncated at +-truncation·sigma
        tau: Re-evaluation interval of the link state in s; Gaussian mobility replaces it with its own speed-change
            interval so both share one time grid
        reference: `median` puts the nominal range at zero shadowing (the mean path loss), `mean` rescales the
            ranges so their arithmetic mean is the nominal range
    """

    name = "log_normal"
    alpha: float = 2.0
    sigma: float = 4.0
    truncation: float = 3.0
    tau: float = 5.0
    reference: str = "median"

    def __post_init__(self):
        super().__post_init__()
        if self.sigma < 0 or self.alpha <= 0 or self.truncation <= 0 or self.tau <= 0:
            raise ValueError(
                f"Log-normal connection needs sigma >= 0, alpha > 0, truncation > 0 and tau > 0, got {self}"
            )
        if self.reference not in ("median", "mean"):
            raise ValueError(f"Log-normal `reference` must be `median` or `mean`, got `{self.reference}`")


@register_connection(
    "log_normal",
    config_class=LogNormalConnectionConfig,
    description="Range r·10^(X/(10·alpha)) with X ~ N(0, sigma^2) in dB, redrawn every tau seconds",
)
class LogNormalConnection(Connection):
    """
    Shadowing X in dB shifts the range to r·10^(X / (10·alpha)). X is symmetric around 0, so with the `median`
    reference the nominal range is the median of the drawn ranges and their mean lies above it.
    """

    @property
    def is_fixed(self) -> bool:
        return self.config.sigma == 0

    @property
    def tau(self) -> Optional[float]:
        return None if self.is_fixed else self.config.tau

    @property
    def _exponent(self) -> float:
        # range factor is exp(k·Z) for standard normal Z truncated at +-truncation
        return self.config.sigma * math.log(10.0) / (10.0 * self.config.alpha)

    @property
    def scale(self) -> float:
        """
        Factor applied to the nominal range: 1 for the `median` reference, 1 / E[10^(X/(10·alpha))] for `mean`
        """
        if self.config.reference == "median" or self.is_fixed:
            return 1.0
        k, t = self._exponent, self.config.truncation
        factor_mean = math.exp(k * k / 2.0) * (norm.cdf(t - k) - norm.cdf(-t - k)) / (norm.cdf(t) - norm.cdf(-t))
        return 1.0 / factor_mean

    def max_radius(self, link, s):
        return nominal_range(link, s) * self.scale * math.exp(self._exponent * self.config.truncation)

    def radius(self, link, s, stream, size=None):
        r = nominal_range(link, s)
        if self.is_fixed:
            return r if size is None else np.full(size, r)
        bound = self.config.truncation
        shadowing = truncnorm.rvs(-bound, bound, scale=self.config.sigma, size=size, random_state=stream)
        return r * self.scale * np.power(10.0, shadowing / (10.0 * self.config.alpha))

"""
Closed-form long-run throughput of the vehicle of interest.

Throughput is a renewal-reward ratio: per cycle (one infrastructure to the next) the VoI gets E[D_I] bits directly and
E[D_V] bits through helpers, over an expected cycle time E[T] = d/v1. Every E[D_V] below has the shape

    E[D_V] = B·(1 - e^{-2·ρ2·r})·rate / v1,    B = (d - 2r_I)(v1 + v2) + r0·v1 - v1/ρ2

with a regime specific radius r and rate factor. B is clamped at 0 where the Wald approximation breaks down
(span shorter than the mean first-helper offset).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from ..constants import RegimeType
from ..scenario import Regime, RegimeError, Scenario, classify_regime
from ..utils import Logger


__all__ = [
    "ThroughputBreakdown",
    "expected_cycle_time",
    "expected_v2i_data",
    "effective_radius",
    "validity_density",
    "transition_point",
    "non_cooperative_throughput",
    "throughput_eta1",
    "throughput_eta2",
    "throughput_eta3_bounds",
    "throughput",
    "throughput_map",
]

logger = Logger(__name__)


@dataclass(frozen=True)
class ThroughputBreakdown:
    """
    Expected per-cycle quantities and the resulting throughput.

    In the transitional regime the result is an interval: `eta` / `e_v2v_data` hold the lower bound and
    `eta_upper` / `e_v2v_data_upper` the upper bound. Otherwise the `*_upper` fields are None.
    """

    e_cycle_time: float
    e_v2i_data: float
    e_v2v_data: float
    eta: float
    regime: Regime
    e_v2v_data_upper: Optional[float] = None
    eta_upper: Optional[float] = None
    transition_point: Optional[float] = None
    clamped: bool = False

    @property
    def is_interval(self) -> bool:
        return self.eta_upper is not None

    @property
    def eta_lower(self) -> float:
        return self.eta

    @property
    def bounds(self) -> Tuple[float, float]:
        return self.eta, self.eta_upper if self.eta_upper is not None else self.eta


def expected_cycle_time(s: Scenario) -> float:
    return s.d / s.v1


def expected_v2i_data(s: Scenario) -> float:
    return 2.0 * s.r_I * s.w_I / s.v1


def effective_radius(s: Scenario) -> float:
    """
    Radius r0·w_V·v2 / (w_I·(v1 + v2)) that clusters helpers in the transitional lower bound.
    """
    if s.w_I <= 0:
        return math.inf
    return s.r0 * s.w_V * s.v2 / (s.w_I * (s.v1 + s.v2))


def validity_density(s: Scenario) -> float:
    """
    Smallest helper density rho_min = v1 / ((d - 2r_I)(v1 + v2) + r0·v1) for which the cooperative formulas are
    positive.
    """
    return s.v1 / ((s.d - 2.0 * s.r_I) * (s.v1 + s.v2) + s.r0 * s.v1)


def transition_point(s: Scenario) -> float:
    """
    The w_I at which the η₁ and η₂ branches of the transitional upper bound cross:
    (1 - e^{-2ρ2·r0}) / (1 - e^{-2ρ2·r_I})·w_V·v2/(v1 + v2). Tends to w_lo as ρ2 -> 0 and to w_hi as ρ2 -> ∞.
    """
    w_hi = s.w_V * s.v2 / (s.v1 + s.v2)
    if s.rho2 <= 0:
        return s.r0 / s.r_I * w_hi
    return -math.expm1(-2.0 * s.rho2 * s.r0) / -math.expm1(-2.0 * s.rho2 * s.r_I) * w_hi


def non_cooperative_throughput(s: Scenario) -> float:
    return 2.0 * s.r_I * s.w_I / s.d


def _bracket(s: Scenario) -> Tuple[float, bool]:
    b = (s.d - 2.0 * s.r_I) * (s.v1 + s.v2) + s.r0 * s.v1 - s.v1 / s.rho2
    if b < 0:
        logger.warning(
            f"rho2={s.rho2} is below the validity threshold {validity_density(s):.6g} veh/m, "
            f"V2V data clamped at 0"
        )
        return 0.0, True
    return b, False


def _v2v_data(s: Scenario, radius: float, rate_per_m: float) -> Tuple[float, bool]:
    """
    E[D_V] = B·(1 - e^{-2ρ2·radius})·rate_per_m / v1 for rho2 > 0
    """
    b, clamped = _bracket(s)
    return b * -math.expm1(-2.0 * s.rho2 * radius) * rate_per_m / s.v1, clamped


def _check_regime(s: Scenario, expected: RegimeType, allow_any_regime: bool) -> Regime:
    regime = classify_regime(s)
    if regime.kind != expected and not allow_any_regime:
        raise RegimeError(
            f"This closed form holds in the {expected} regime only, but w_I={s.w_I:g} bit/s puts the scenario in the "
            f"{regime.kind} regime (w_lo={regime.w_lo:g}, w_hi={regime.w_hi:g})"
        )
    return regime


def _breakdown(s: Scenario, regime: Regime, e_v2v: float, clamped: bool = False, **kwargs) -> ThroughputBreakdown:
    e_t = expected_cycle_time(s)
    e_i = expected_v2i_data(s)
    return ThroughputBreakdown(
        e_cycle_time=e_t,
        e_v2i_data=e_i,
        e_v2v_data=e_v2v,
        eta=(e_i + e_v2v) / e_t,
        regime=regime,
        clamped=clamped,
        **kwargs,
    )


def throughput_eta1(s: Scenario, allow_any_regime: bool = False) -> ThroughputBreakdown:
    """
    Infrastructure-limited throughput η₁ = (2r_I·w_I + c₁)/d with c₁ = B·(1 - e^{-2ρ2·r_I})·w_I/v2.

    Args:
        s: The scenario
        allow_any_regime: Evaluate the formula outside its regime (used for the transitional upper bound)
    """
    regime = _check_regime(s, RegimeType.INFRASTRUCTURE_LIMITED, allow_any_regime)
    if s.rho2 == 0:
        return _breakdown(s, regime, 0.0)
    e_v2v, clamped = _v2v_data(s, s.r_I, s.w_I / s.v2)
    return _breakdown(s, regime, e_v2v, clamped)


def throughput_eta2(s: Scenario, allow_any_regime: bool = False) -> ThroughputBreakdown:
    """
    V2V-limited throughput η₂ = (2r_I·w_I + c₂)/d with c₂ = B·(1 - e^{-2ρ2·r0})·w_V/(v1 + v2).
    """
    regime = _check_regime(s, RegimeType.V2V_LIMITED, allow_any_regime)
    if s.rho2 == 0:
        return _breakdown(s, regime, 0.0)
    e_v2v, clamped = _v2v_data(s, s.r0, s.w_V / (s.v1 + s.v2))
    return _breakdown(s, regime, e_v2v, clamped)


def throughput_eta3_bounds(s: Scenario, allow_any_regime: bool = False) -> ThroughputBreakdown:
    """
    Transitional regime interval: the lower bound η₃ₗ = (2r_I·w_I + c₃)/d with
    c₃ = B·(1 - e^{-2ρ2·r0·w_V·v2/(w_I(v1 + v2))})·w_I/v2, and the upper bound η₃ᵤ = min(η₁, η₂).
    """
    regime = _check_regime(s, RegimeType.TRANSITIONAL, allow_any_regime)
    point = transition_point(s)
    if s.rho2 == 0:
        return _breakdown(s, regime, 0.0, e_v2v_data_upper=0.0, eta_upper=non_cooperative_throughput(s),
                          transition_point=point)

    lower_v2v, clamped = _v2v_data(s, effective_radius(s), s.w_I / s.v2)
    eta1 = throughput_eta1(s, allow_any_regime=True)
    eta2 = throughput_eta2(s, allow_any_regime=True)
    upper = eta1 if eta1.eta <= eta2.eta else eta2
    return _breakdown(
        s,
        regime,
        lower_v2v,
        clamped,
        e_v2v_data_upper=upper.e_v2v_data,
        eta_upper=upper.eta,
        transition_point=point,
    )


def throughput(s: Scenario) -> ThroughputBreakdown:
    """
    Dispatch on the regime: η₁, η₂, or the (η₃ₗ, η₃ᵤ) interval.
    """
    kind = classify_regime(s).kind
    if kind == RegimeType.INFRASTRUCTURE_LIMITED:
        return throughput_eta1(s)
    if kind == RegimeType.V2V_LIMITED:
        return throughput_eta2(s)
    return throughput_eta3_bounds(s)


def throughput_map(s: Scenario, w_values: Iterable[float]) -> List[ThroughputBreakdown]:
    """
    Throughput over a grid of V2I rates (bit/s), everything else taken from `s`.
    """
    return [throughput(s.replace(w_I=float(w))) for w in w_values]

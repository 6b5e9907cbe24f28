"""
Cluster statistics of a Poisson helper stream. A cluster is a maximal run of helpers whose consecutive gaps are at most
2·radius; its expected length, the expected gap after it and the expected number of clusters in a span give the
expected V2V data of a cycle through Wald's equality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..scenario import Scenario, relative_span


__all__ = ["ClusterStats", "cluster_stats", "expected_v2v_data", "finite_span_v2v_data"]

# exp() of anything larger overflows a double
_MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class ClusterStats:
    expected_cluster_len: float
    expected_gap: float
    expected_first_offset: float
    expected_cluster_count: float
    radius_used: float


def cluster_stats(rho2: float, radius: float, span: float) -> ClusterStats:
    """
    Expected cluster geometry for helpers of density `rho2` clustered at gap threshold 2·`radius` over `span`.

    E[L] = (e^{2ρr} - 1)(1/ρ - 2r·e^{-2ρr} / (1 - e^{-2ρr})), which simplifies to (e^{2ρr} - 1)/ρ - 2r;
    E[g] = 2r + 1/ρ; E[l0] = 1/ρ; E[K] = (span - E[l0]) / (E[L] + E[g]).

    Raises:
        ValueError: "no helpers" when rho2 is 0, the caller has to take the non-cooperative path
    """
    if rho2 <= 0:
        raise ValueError("no helpers: cluster statistics need rho2 > 0")
    if radius <= 0 or span <= 0:
        raise ValueError(f"radius and span must be positive, got radius={radius}, span={span}")

    x = 2.0 * rho2 * radius
    expected_gap = 2.0 * radius + 1.0 / rho2
    expected_first_offset = 1.0 / rho2
    if x > _MAX_EXPONENT:
        expected_cluster_len = math.inf
        expected_cluster_count = 0.0
    else:
        expected_cluster_len = math.expm1(x) / rho2 - 2.0 * radius
        # E[L] + E[g] = e^{2ρr}/ρ
        expected_cluster_count = (span - expected_first_offset) * rho2 * math.exp(-x)

    return ClusterStats(
        expected_cluster_len=expected_cluster_len,
        expected_gap=expected_gap,
        expected_first_offset=expected_first_offset,
        expected_cluster_count=expected_cluster_count,
        radius_used=radius,
    )


def expected_v2v_data(s: Scenario, radius: float, rate_per_m: float) -> float:
    """
    Expected V2V bits of a cycle written as E[K]·(E[L] + 2r)·rate_per_m, i.e. every cluster delivers its length plus
    one full window. `rate_per_m` is w_I/v2 for infrastructure windows or w_V/(v1 + v2) for V2V windows.

    Algebraically equal to the closed forms used by the throughput functions before clamping; kept separate so the
    two derivations can check each other.
    """
    stats = cluster_stats(s.rho2, radius, relative_span(s))
    if stats.expected_cluster_count <= 0:
        return 0.0
    return stats.expected_cluster_count * (stats.expected_cluster_len + 2.0 * radius) * rate_per_m


def finite_span_v2v_data(s: Scenario, radius: float, rate_per_m: float) -> float:
    """
    Exact expected V2V bits of a cycle under the windowed schedule, Σ_{i<n} min(l_i, 2r)·rate_per_m plus one full
    window 2r·rate_per_m when there is at least one helper, for Poisson helpers on the relative span S.

    With W = 2r, q = e^{-ρW} and S ≥ W this is rate_per_m·((S - W)(1 - q) + 2W - 2(1 - q)/ρ). The closed forms give
    rate_per_m·(S - 1/ρ)(1 - q) instead, which is lower by rate_per_m·(W(1 + q) - (1 - q)/ρ) because the number of
    clusters and their lengths are treated as independent.
    """
    rho, span, window = s.rho2, relative_span(s), 2.0 * radius
    if rho <= 0:
        return 0.0
    inner = min(span, window)
    e_inner = math.exp(-rho * inner)
    # helpers less than one window before the span end
    gaps = inner + (2.0 * e_inner - 2.0 + rho * inner * e_inner) / rho
    if span > window:
        q = math.exp(-rho * window)
        gaps += (span - window) * (1.0 - q) - window * (q - math.exp(-rho * span))
    return (gaps + window * -math.expm1(-rho * span)) * rate_per_m

from .cluster_stats import ClusterStats, cluster_stats, expected_v2v_data, finite_span_v2v_data
from .throughput import (
    ThroughputBreakdown,
    effective_radius,
    expected_cycle_time,
    expected_v2i_data,
    non_cooperative_throughput,
    throughput,
    throughput_eta1,
    throughput_eta2,
    throughput_eta3_bounds,
    throughput_map,
    transition_point,
    validity_density,
)

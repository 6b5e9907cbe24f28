from .channel import (
    Channel,
    ConstantRateChannel,
    ConstantRateChannelConfig,
    LinkProfile,
    RayleighPathLossChannel,
    RayleighPathLossChannelConfig,
    effective_rate,
    measure_average_rates,
)
from .connection import (
    Connection,
    LogNormalConnection,
    LogNormalConnectionConfig,
    UnitDiskConnection,
    UnitDiskConnectionConfig,
)
from .estimator import ThroughputEstimate, estimate_from_traces, estimate_throughput, simulate_cycles
from .event_driven import EventDrivenEngine, EventEngineError, EventStreams, run_event_driven
from .mobility import ConstantMobility, ConstantMobilityConfig, GaussianMobility, GaussianMobilityConfig, Trajectory
from .sampled import cycle_v2v_bits, run_cycle_sampled
from .traces import CycleTrace, write_trace_csv
from .traffic import count_clusters, generate_helpers, poisson_points

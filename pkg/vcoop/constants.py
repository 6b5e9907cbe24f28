"""
Home to all constant variables in vcoop
"""

from enum import Enum, IntEnum


DEFAULT_NUM_INFRA = 20
DEFAULT_N_CYCLES = 2000
DEFAULT_LP_CAP = 64
MIN_CYCLES_FOR_CI = 30
CI95_Z = 1.96

LP_REL_TOL = 1e-9
DISTANCE_FLOOR_M = 1.0
MIN_SPEED_MPS = 0.5

DEFAULT_SCENARIO_CONFIG_FILE = "scenario.json"
DEFAULT_MODEL_CONFIG_FILE = "models.json"
DEFAULT_SWEEP_CONFIG_FILE = "sweep.yaml"
DEFAULT_TRACE_CSV_FILE = "trace.csv"

RESULT_CSV_COLUMNS = [
    "axis",
    "value",
    "regime",
    "eta_analytic",
    "eta_lower",
    "eta_upper",
    "eta_sampled",
    "eta_sampled_ci_lo",
    "eta_sampled_ci_hi",
    "eta_event",
    "eta_event_ci_lo",
    "eta_event_ci_hi",
    "ratio_noncoop",
    "series",
]
TRACE_CSV_COLUMNS = ["cycle_index", "duration_s", "v2i_bits", "v2v_bits", "helper_count", "cluster_count"]
ANALYTIC_CSV_COLUMNS = [
    "axis",
    "value",
    "regime",
    "e_cycle_time",
    "e_v2i_data",
    "e_v2v_data",
    "e_v2v_data_upper",
    "eta_analytic",
    "eta_lower",
    "eta_upper",
    "eta_noncoop",
    "transition_point",
    "clamped",
]

TQDM_BAR_FORMAT = "{desc:<16}{percentage:3.0f}%|{bar:50}{r_bar}"

# unit factors from the config file keys to SI
KM = 1000.0
MBPS = 1e6


class ExplicitEnum(str, Enum):
    def __str__(self):
        return self.value

    @classmethod
    def list(cls):
        return [x.value for x in cls.__members__.values()]


class RegimeType(ExplicitEnum):
    INFRASTRUCTURE_LIMITED = "infrastructure_limited"
    TRANSITIONAL = "transitional"
    V2V_LIMITED = "v2v_limited"


class SimulationMode(ExplicitEnum):
    SAMPLED = "sampled"
    EVENT = "event"


class SweepMode(ExplicitEnum):
    ANALYTIC = "analytic"
    SAMPLED = "sampled"
    EVENT = "event"
    APPROX = "approx"


class SweepAxis(ExplicitEnum):
    D = "d"
    W_I = "w_I"
    RHO2 = "rho2"


class OptimumSolver(ExplicitEnum):
    CUT = "cut"
    SIMPLEX = "simplex"


class OracleSuite(ExplicitEnum):
    INFRA = "infra"
    V2V = "v2v"
    TRANSITIONAL = "transitional"
    ALL = "all"


class MobilityType(ExplicitEnum):
    CONSTANT = "constant"
    GAUSSIAN = "gaussian"


class ConnectionType(ExplicitEnum):
    UNIT_DISK = "unit_disk"
    LOG_NORMAL = "log_normal"


class ChannelType(ExplicitEnum):
    CONSTANT_RATE = "constant_rate"
    RAYLEIGH_PATH_LOSS = "rayleigh_path_loss"


class LinkKind(ExplicitEnum):
    V2I = "v2i"
    V2V = "v2v"


class ConfigType(ExplicitEnum):
    BASE = "base"
    SCENARIO = "scenario"
    MODELS = "models"
    MOBILITY = "mobility"
    CONNECTION = "connection"
    CHANNEL = "channel"
    SWEEP = "sweep"


class RegistryType(ExplicitEnum):
    MOBILITY = "mobility"
    CONNECTION = "connection"
    CHANNEL = "channel"
    PRESET = "preset"


class StreamComponent(IntEnum):
    """
    Component ids mixed into per-replication seeds. Values are part of the reproducibility contract, never renumber.
    """

    TRAFFIC = 1
    VOI_MOBILITY = 2
    HELPER_MOBILITY = 3
    CONNECTION = 4
    CHANNEL = 5
    SAMPLED_CYCLE = 6
    ORACLE = 7
    RATE_MEASUREMENT = 8

from .cycle_lp import LpInstance, Schedule, build_cycle_lp, check_schedule, solve_cycle_lp
from .oracle import OracleReport, run_oracle_suite
from .schedules import (
    TransitionalBounds,
    max_cycle_delivery,
    schedule_theorem1,
    schedule_theorem2,
    transitional_cycle_bounds,
)
from .simplex import DenseSimplex, SimplexResult, SimplexStatus, SolverError

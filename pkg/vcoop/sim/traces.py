from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO

from ..constants import TRACE_CSV_COLUMNS
from ..utils import Logger, write_csv


__all__ = ["CycleTrace", "write_trace_csv"]

logger = Logger(__name__)


@dataclass
class CycleTrace:
    """
    What the VoI got in one cycle.

    Args:
        cycle_index: Index of the cycle in its run (sampled mode: global cycle number)
        duration: Cycle duration in s
        v2i_bits: Bits received directly from the infrastructure
        v2v_bits: Bits delivered by helpers
        helper_count: Helpers assigned to the cycle
        cluster_count: Clusters among those helpers
        v2v_lower: Transitional cycles only, the lower-bound schedule total
        v2v_upper: Transitional cycles only, the upper bound
        flagged: The cycle was too large for the exact solver and fell back to the lower bound
    """

    cycle_index: int
    duration: float
    v2i_bits: float
    v2v_bits: float
    helper_count: int
    cluster_count: int
    v2v_lower: Optional[float] = None
    v2v_upper: Optional[float] = None
    flagged: bool = False

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"Cycle {self.cycle_index} has a non-positive duration {self.duration}")
        if min(self.v2i_bits, self.v2v_bits, self.helper_count, self.cluster_count) < 0:
            raise ValueError(f"Cycle {self.cycle_index} has negative counters: {self}")

    @property
    def total_bits(self) -> float:
        return self.v2i_bits + self.v2v_bits

    def row(self) -> dict:
        return {
            "cycle_index": self.cycle_index,
            "duration_s": self.duration,
            "v2i_bits": self.v2i_bits,
            "v2v_bits": self.v2v_bits,
            "helper_count": self.helper_count,
            "cluster_count": self.cluster_count,
        }


def write_trace_csv(
    traces: Sequence[CycleTrace],
    target: str | os.PathLike | TextIO,
    header_comment: Optional[str] = None,
) -> List[dict]:
    """
    Dump one CSV row per cycle with the columns in `TRACE_CSV_COLUMNS`
    """
    rows = [t.row() for t in traces]
    write_csv(rows, TRACE_CSV_COLUMNS, target, header_comment=header_comment)
    if not hasattr(target, "write"):
        logger.log_file_written("cycle traces", str(target))
    return rows

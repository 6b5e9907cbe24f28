from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..constants import CI95_Z, MIN_CYCLES_FOR_CI
from ..sim.traces import CycleTrace
from ..utils import ratio_confidence_interval


__all__ = ["Summary", "summarize", "mean_confidence_interval"]


@dataclass(frozen=True)
class Summary:
    mean: float
    std_err: float
    ci95_lo: float
    ci95_hi: float
    n: int

    @property
    def ci95(self) -> Tuple[float, float]:
        return self.ci95_lo, self.ci95_hi

    @property
    def relative_half_width(self) -> float:
        return (self.ci95_hi - self.ci95_lo) / 2 / abs(self.mean) if self.mean else float("inf")


def summarize(samples: Sequence[CycleTrace]) -> Summary:
    """
    Throughput of a set of cycles as the ratio of total bits to total time, with a jackknife standard error.

    Raises:
        ValueError: with fewer than 30 samples
    """
    bits = [t.total_bits for t in samples]
    durations = [t.duration for t in samples]
    mean, std_err, lo, hi = ratio_confidence_interval(bits, durations)
    return Summary(mean=mean, std_err=std_err, ci95_lo=lo, ci95_hi=hi, n=len(samples))


def mean_confidence_interval(values: Sequence[float]) -> Summary:
    """
    Plain sample mean with a normal 95% interval, for per-cycle quantities that are not rates
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size < MIN_CYCLES_FOR_CI:
        raise ValueError(f"A confidence interval needs at least {MIN_CYCLES_FOR_CI} samples, got {values.size}")
    mean = float(values.mean())
    std_err = float(values.std(ddof=1) / np.sqrt(values.size))
    half_width = CI95_Z * std_err
    return Summary(mean=mean, std_err=std_err, ci95_lo=mean - half_width, ci95_hi=mean + half_width, n=int(values.size))

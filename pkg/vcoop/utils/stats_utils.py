from __future__ import annotations

from typing import Tuple

import numpy as np

from ..constants import CI95_Z, MIN_CYCLES_FOR_CI


__all__ = ["ratio_jackknife", "ratio_confidence_interval"]


def ratio_jackknife(numerators, denominators) -> Tuple[float, float]:
    """
    Ratio-of-sums estimate with a leave-one-out jackknife standard error.

    The point estimate is sum(numerators) / sum(denominators). The i-th jackknife replicate drops sample i from both
    sums, and the standard error is sqrt((n - 1) / n * sum((theta_i - theta_bar) ** 2)).

    Args:
        numerators: Per-sample rewards (e.g. bits per cycle)
        denominators: Per-sample lengths (e.g. cycle durations), all positive

    Returns:
        A tuple of (estimate, standard error)
    """
    num = np.asarray(numerators, dtype=np.float64)
    den = np.asarray(denominators, dtype=np.float64)
    if num.shape != den.shape or num.ndim != 1:
        raise ValueError(f"Expected two 1-D arrays of equal length, got shapes {num.shape} and {den.shape}!")
    n = num.size
    if n < 2:
        raise ValueError(f"Jackknife needs at least 2 samples, got {n}!")

    num_total = num.sum()
    den_total = den.sum()
    estimate = float(num_total / den_total)

    replicates = (num_total - num) / (den_total - den)
    spread = replicates - replicates.mean()
    std_err = float(np.sqrt((n - 1) / n * np.dot(spread, spread)))
    return estimate, std_err


def ratio_confidence_interval(
    numerators,
    denominators,
    min_samples: int = MIN_CYCLES_FOR_CI,
    z: float = CI95_Z,
) -> Tuple[float, float, float, float]:
    """
    `ratio_jackknife` plus a normal confidence interval estimate ± z·std_err.

    Returns:
        A tuple of (estimate, standard error, lower end, upper end)
    """
    if len(numerators) < min_samples:
        raise ValueError(f"A confidence interval needs at least {min_samples} samples, got {len(numerators)}")
    estimate, std_err = ratio_jackknife(numerators, denominators)
    return estimate, std_err, estimate - z * std_err, estimate + z * std_err

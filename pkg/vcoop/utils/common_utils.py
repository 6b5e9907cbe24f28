from __future__ import annotations

from time import perf_counter
from typing import List


__all__ = [
    "exec_timer",
    "parse_range",
]


class exec_timer:
    """
    A context manager that captures the execution time of all the operations inside it

    Examples:
        >>> with exec_timer() as timer:
        >>>     # operations here
        >>> print(timer.time)
    """

    def __enter__(self):
        self.time = perf_counter()
        return self

    def __exit__(self, type, value, traceback):
        self.time = perf_counter() - self.time


def parse_range(text: str) -> List[float]:
    """
    Parse a `lo:hi:step` string into an inclusive list of floats, e.g. `"2:10:4"` -> `[2.0, 6.0, 10.0]`
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"Invalid range `{text}`, expected `lo:hi:step`!")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError(f"Invalid range `{text}`, need step > 0 and hi >= lo!")
    count = int(round((hi - lo) / step)) + 1
    values = [lo + i * step for i in range(count)]
    return [v for v in values if v <= hi + 1e-9 * max(1.0, abs(hi))]

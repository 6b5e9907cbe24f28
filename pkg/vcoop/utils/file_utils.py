from __future__ import annotations

import os
from typing import Dict, List, Optional, TextIO

import pandas as pd

from .logging import Logger


logger = Logger(__name__)

__all__ = ["write_csv"]


def write_csv(
    records: List[Dict],
    columns: List[str],
    target: str | os.PathLike | TextIO,
    header_comment: Optional[str] = None,
):
    """
    Write records as a CSV table with a fixed column order. Missing values become empty cells and floats keep their
    full double precision repr.

    Args:
        records: A list of row dicts
        columns: Column order of the output
        target: File path or an open text stream
        header_comment: Optional single line written first, prefixed with `# `
    """
    df = pd.DataFrame.from_records(records, columns=columns)

    def _write(f):
        if header_comment is not None:
            f.write(f"# {header_comment}\n")
        df.to_csv(f, index=False, lineterminator="\n", float_format=_full_precision)

    if hasattr(target, "write"):
        _write(target)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(target)), exist_ok=True)
        with open(target, "w", newline="") as f:
            _write(f)
        logger.debug(f"Saved {len(df)} rows to {target}")


def _full_precision(value) -> str:
    return repr(float(value))

"""
Dense tableau simplex for `maximize c·x subject to A·x <= b, x >= 0` with `b >= 0`, so the slack basis is feasible
from the start and no phase one is needed. Pivoting follows Bland's rule (lowest index enters, ties in the ratio test
leave by lowest basic index), which cannot cycle on degenerate vertices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constants import ExplicitEnum
from ..utils import Logger


__all__ = ["SimplexStatus", "SimplexResult", "SolverError", "DenseSimplex"]

logger = Logger(__name__)


class SolverError(RuntimeError):
    pass


class SimplexStatus(ExplicitEnum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    status: SimplexStatus
    iterations: int


class DenseSimplex:
    """
    Args:
        c: Objective coefficients, shape (n,)
        A: Constraint matrix, shape (m, n)
        b: Right-hand sides, shape (m,), all >= 0
        tol: Absolute tolerance on reduced costs and pivot elements (the problem is expected to be scaled to O(1))
        max_iterations: Safety cap on pivots
    """

    def __init__(self, c, A, b, tol: float = 1e-9, max_iterations: int = 50_000):
        self.c = np.asarray(c, dtype=np.float64)
        self.A = np.asarray(A, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.m, self.n = self.A.shape
        if self.c.shape != (self.n,) or self.b.shape != (self.m,):
            raise ValueError(f"Inconsistent shapes: c{self.c.shape}, A{self.A.shape}, b{self.b.shape}")
        if np.any(self.b < 0) or not np.all(np.isfinite(self.b)):
            raise ValueError("DenseSimplex needs finite, non-negative right-hand sides!")
        self.tol = tol
        self.max_iterations = max_iterations

    def _initial_tableau(self):
        m, n = self.m, self.n
        tableau = np.zeros((m + 1, n + m + 1))
        tableau[:m, :n] = self.A
        tableau[:m, n:n + m] = np.eye(m)
        tableau[:m, -1] = self.b
        tableau[m, :n] = -self.c
        return tableau

    def _entering(self, tableau):
        candidates = np.flatnonzero(tableau[-1, :-1] < -self.tol)
        return int(candidates[0]) if candidates.size else None

    def _leaving(self, tableau, basis, col):
        column = tableau[:-1, col]
        rows = np.flatnonzero(column > self.tol)
        if rows.size == 0:
            return None
        ratios = tableau[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + self.tol * max(1.0, abs(best))]
        return int(min(tied, key=lambda r: basis[r]))

    @staticmethod
    def _pivot(tableau, row, col):
        tableau[row] /= tableau[row, col]
        factors = tableau[:, col].copy()
        factors[row] = 0.0
        tableau -= np.outer(factors, tableau[row])

    def solve(self) -> SimplexResult:
        tableau = self._initial_tableau()
        basis = list(range(self.n, self.n + self.m))
        status = SimplexStatus.ITERATION_LIMIT
        iterations = 0
        while iterations < self.max_iterations:
            col = self._entering(tableau)
            if col is None:
                status = SimplexStatus.OPTIMAL
                break
            row = self._leaving(tableau, basis, col)
            if row is None:
                status = SimplexStatus.UNBOUNDED
                break
            self._pivot(tableau, row, col)
            basis[row] = col
            iterations += 1

        x = np.zeros(self.n + self.m)
        x[basis] = tableau[:-1, -1]
        x = np.maximum(x[:self.n], 0.0)
        logger.debug(f"Simplex finished with status `{status}` after {iterations} pivots")
        return SimplexResult(x=x, objective=float(self.c @ x), status=status, iterations=iterations)

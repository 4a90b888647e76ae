"""Brute-force minimum-support oracle for tiny instances.

Enumerates supports by increasing size and solves the restricted
least-squares system for each, keeping nonnegative solutions with zero
residual.  Exact at small scale; guarded to n_vars <= 20.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph import SensingMatrix

__all__ = ["SparsestSolution", "brute_force_sparsest"]

_MAX_VARS = 20


@dataclass(frozen=True)
class SparsestSolution:
    """Result of the exhaustive search.

    ``status`` is "unique" (x holds the solution), "ambiguous" (two or
    more distinct minimum-support solutions exist) or "none" (nothing fits
    within the support budget).  ``support_size`` is the minimum feasible
    support size when one was found.
    """

    status: str
    x: np.ndarray | None
    support_size: int | None


def brute_force_sparsest(matrix: SensingMatrix, y, max_support: int,
                         tol: float = 1e-9) -> SparsestSolution:
    """Sparsest nonnegative solution of y = Hx by support enumeration."""
    if matrix.n_vars > _MAX_VARS:
        raise ValueError(
            f"brute-force search is limited to {_MAX_VARS} variables, "
            f"got {matrix.n_vars}"
        )
    max_support = int(max_support)
    if max_support < 0 or max_support > matrix.n_vars:
        raise ValueError(
            f"max_support {max_support} out of range [0, {matrix.n_vars}]"
        )
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.shape != (matrix.n_checks,):
        raise ValueError(
            f"measurement vector has length {y.size}, expected {matrix.n_checks}"
        )
    dense = matrix.to_dense().astype(np.float64)
    thresh = tol * max(1.0, float(np.abs(y).max(initial=0.0)))

    for size in range(max_support + 1):
        solutions: list[np.ndarray] = []
        for support in combinations(range(matrix.n_vars), size):
            if size == 0:
                candidate = np.zeros(matrix.n_vars)
                residual = float(np.abs(y).max(initial=0.0))
            else:
                cols = dense[:, support]
                coef, *_ = np.linalg.lstsq(cols, y, rcond=None)
                if np.any(coef < -thresh):
                    continue
                residual = float(np.abs(cols @ coef - y).max(initial=0.0))
                candidate = np.zeros(matrix.n_vars)
                candidate[list(support)] = np.maximum(coef, 0.0)
            if residual > thresh:
                continue
            if all(float(np.abs(candidate - seen).max()) > thresh
                   for seen in solutions):
                solutions.append(candidate)
        if solutions:
            if len(solutions) == 1:
                return SparsestSolution("unique", solutions[0], size)
            return SparsestSolution("ambiguous", None, size)
    return SparsestSolution("none", None, None)

"""Time grids on [0, T] shared by the solvers and the deconvolution."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["TimeGrid"]


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing nodes t_0 = 0 < t_1 < ... < t_K = T."""

    nodes: np.ndarray
    kind: str = "custom"          # uniform | graded | custom
    grading_exponent: float | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise ValueError("a time grid needs at least two nodes")
        if nodes[0] != 0.0:
            raise ValueError("time grids start at t_0 = 0")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("time nodes must be strictly increasing")

    @staticmethod
    def uniform(horizon: float, cells: int) -> "TimeGrid":
        if not horizon > 0.0 or cells < 1:
            raise ValueError("need horizon > 0 and at least one cell")
        return TimeGrid(np.linspace(0.0, horizon, cells + 1), kind="uniform")

    @staticmethod
    def graded(horizon: float, cells: int, exponent: float = 2.0) -> "TimeGrid":
        """Nodes horizon * (k/K)^exponent, clustering toward t = 0."""
        if not horizon > 0.0 or cells < 1 or exponent <= 0.0:
            raise ValueError("need horizon > 0, cells >= 1, exponent > 0")
        k = np.arange(cells + 1) / cells
        return TimeGrid(horizon * k**exponent, kind="graded",
                        grading_exponent=exponent)

    @property
    def horizon(self) -> float:
        return float(self.nodes[-1])

    @property
    def cells(self) -> int:
        return len(self.nodes) - 1

    @property
    def is_uniform(self) -> bool:
        h = np.diff(self.nodes)
        return bool(np.all(np.abs(h - h[0]) <= 1e-12 * h[0]))

    def describe(self) -> dict:
        d = {"kind": self.kind, "T": self.horizon, "cells": self.cells}
        if self.grading_exponent is not None:
            d["grading_exponent"] = self.grading_exponent
        return d

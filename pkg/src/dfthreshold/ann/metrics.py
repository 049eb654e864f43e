from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Metrics:
    mse: float
    mae: float
    r2: float | None  # None when the targets have zero variance

    def to_dict(self) -> dict:
        return {"mse": self.mse, "mae": self.mae, "r2": self.r2}


def evaluate_metrics(predictions, targets) -> Metrics:
    """MSE, MAE and coefficient of determination of ``predictions`` against ``targets``."""
    y = np.asarray(predictions, dtype=float).reshape(-1)
    t = np.asarray(targets, dtype=float).reshape(-1)
    if y.shape != t.shape or y.size == 0:
        raise ValueError("predictions and targets must be nonempty and of equal length")
    err = y - t
    mse = float(np.mean(err**2))
    mae = float(np.mean(np.abs(err)))
    ss_tot = float(np.sum((t - t.mean()) ** 2))
    r2 = None if ss_tot == 0.0 else 1.0 - float(np.sum(err**2)) / ss_tot
    return Metrics(mse, mae, r2)

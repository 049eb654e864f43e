"""Gaussian RBF network: k-means centers and ridge least-squares output layer."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.cluster.vq import kmeans2

from ..dataset import Dataset, NormParams, normalize


@dataclass
class RbfParams:
    centers: np.ndarray  # (n_centers, 5), normalized feature space
    spread: float
    output_weights: np.ndarray  # (n_centers,)
    output_bias: float
    norm: NormParams

    def __post_init__(self) -> None:
        self.centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        self.output_weights = np.asarray(self.output_weights, dtype=float).reshape(-1)
        self.output_bias = float(self.output_bias)
        self.spread = float(self.spread)
        if not self.spread > 0:
            raise ValueError("spread must be positive")
        if self.output_weights.shape != (self.centers.shape[0],):
            raise ValueError("one output weight per center required")

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]


def design_matrix(u: np.ndarray, centers: np.ndarray, spread: float) -> np.ndarray:
    """Gaussian activations ``exp(-|u - c|^2 / (2 spread^2))``, shape (n, n_centers)."""
    d2 = ((u[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-d2 / (2.0 * spread**2))


def forward_unit(p: RbfParams, u: np.ndarray) -> np.ndarray:
    return design_matrix(u, p.centers, p.spread) @ p.output_weights + p.output_bias


def rbf_forward(p: RbfParams, features, pre_normalized: bool = False):
    """Predicted optimal threshold (linear) for one feature vector or a batch."""
    x = np.asarray(features, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if not np.all(np.isfinite(x)):
        raise ValueError("features must be finite")
    u = x if pre_normalized else p.norm.features_to_unit(x)
    y = p.norm.target_from_unit(forward_unit(p, u))
    return float(y[0]) if single else y


def ridge_output_layer(phi: np.ndarray, t: np.ndarray, ridge: float) -> tuple[np.ndarray, float]:
    """Minimize ``|phi w + b - t|^2 + ridge*|w|^2`` (bias unpenalized)."""
    n, k = phi.shape
    a = np.hstack([phi, np.ones((n, 1))])
    penalty = np.sqrt(ridge) * np.eye(k + 1)[:k]
    sol, *_ = np.linalg.lstsq(np.vstack([a, penalty]), np.concatenate([t, np.zeros(k)]), rcond=None)
    return sol[:k], float(sol[k])


def train_rbf(
    train: Dataset,
    n_centers: int = 12,
    spread: float = 0.8,
    seed: int = 0,
    ridge: float = 1e-8,
    kmeans_iter: int = 50,
    norm: NormParams | None = None,
) -> RbfParams:
    """Fit an RBF network on a raw dataset.

    Centers come from k-means on the normalized features, started from
    ``n_centers`` samples picked by a seeded shuffle.
    """
    if not spread > 0:
        raise ValueError("spread must be positive")
    if not 1 <= n_centers <= len(train):
        raise ValueError(f"n_centers must be in [1, {len(train)}], got {n_centers}")
    unit, norm = normalize(train, norm)
    u, t = unit.features, unit.targets
    rng = np.random.default_rng(seed)
    init = u[rng.permutation(len(u))[:n_centers]]
    with warnings.catch_warnings():
        # an emptied cluster keeps its previous center
        warnings.simplefilter("ignore", UserWarning)
        centers, _ = kmeans2(u, init, iter=kmeans_iter, minit="matrix", missing="warn")
    w, b = ridge_output_layer(design_matrix(u, centers, spread), t, ridge)
    return RbfParams(centers, spread, w, b, norm)

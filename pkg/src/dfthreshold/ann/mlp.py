"""One-hidden-layer tanh MLP with a linear output, trained by Levenberg-Marquardt."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..dataset import Dataset, NormParams, normalize


@dataclass
class MlpParams:
    hidden_weights: np.ndarray  # (n_hidden, 5)
    hidden_biases: np.ndarray  # (n_hidden,)
    output_weights: np.ndarray  # (n_hidden,)
    output_bias: float
    norm: NormParams

    def __post_init__(self) -> None:
        self.hidden_weights = np.asarray(self.hidden_weights, dtype=float)
        self.hidden_biases = np.asarray(self.hidden_biases, dtype=float).reshape(-1)
        self.output_weights = np.asarray(self.output_weights, dtype=float).reshape(-1)
        self.output_bias = float(self.output_bias)
        h = self.hidden_weights.shape[0]
        if self.hidden_weights.ndim != 2 or self.hidden_biases.shape != (h,) or self.output_weights.shape != (h,):
            raise ValueError("inconsistent MLP parameter shapes")

    @property
    def n_hidden(self) -> int:
        return self.hidden_weights.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.hidden_weights.shape[1]

    def pack(self) -> np.ndarray:
        return np.concatenate(
            [self.hidden_weights.ravel(), self.hidden_biases, self.output_weights, [self.output_bias]]
        )

    @classmethod
    def unpack(cls, theta: np.ndarray, n_hidden: int, n_inputs: int, norm: NormParams) -> "MlpParams":
        k = n_hidden * n_inputs
        return cls(
            theta[:k].reshape(n_hidden, n_inputs),
            theta[k : k + n_hidden],
            theta[k + n_hidden : k + 2 * n_hidden],
            theta[-1],
            norm,
        )


def forward_unit(p: MlpParams, u: np.ndarray) -> np.ndarray:
    """Network output in normalized units for normalized inputs ``u`` of shape (n, 5)."""
    hidden = np.tanh(u @ p.hidden_weights.T + p.hidden_biases)
    return hidden @ p.output_weights + p.output_bias


def mlp_forward(p: MlpParams, features, pre_normalized: bool = False):
    """Predicted optimal threshold (linear) for one feature vector or a batch."""
    x = np.asarray(features, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if not np.all(np.isfinite(x)):
        raise ValueError("features must be finite")
    u = x if pre_normalized else p.norm.features_to_unit(x)
    y = p.norm.target_from_unit(forward_unit(p, u))
    return float(y[0]) if single else y


def jacobian(p: MlpParams, u: np.ndarray) -> np.ndarray:
    """d(output)/d(parameters) for every sample, columns ordered as :meth:`MlpParams.pack`."""
    hidden = np.tanh(u @ p.hidden_weights.T + p.hidden_biases)
    dact = (1.0 - hidden**2) * p.output_weights  # (n, h)
    n = u.shape[0]
    j_w = (dact[:, :, None] * u[:, None, :]).reshape(n, -1)
    return np.hstack([j_w, dact, hidden, np.ones((n, 1))])


@dataclass(frozen=True)
class LMConfig:
    mu_init: float = 1e-3
    mu_increase: float = 10.0
    mu_decrease: float = 0.1
    mu_max: float = 1e10
    max_iter: int = 200
    mse_goal: float = 1e-7

    def to_dict(self) -> dict:
        return {
            "mu_init": self.mu_init,
            "mu_increase": self.mu_increase,
            "mu_decrease": self.mu_decrease,
            "mu_max": self.mu_max,
            "max_iter": self.max_iter,
            "mse_goal": self.mse_goal,
        }


@dataclass
class TrainingTrace:
    iterations: list[int] = field(default_factory=list)
    mse: list[float] = field(default_factory=list)
    damping: list[float] = field(default_factory=list)
    stop_reason: str = ""

    def append(self, it: int, mse: float, mu: float) -> None:
        self.iterations.append(it)
        self.mse.append(mse)
        self.damping.append(mu)

    def to_csv(self) -> str:
        lines = ["iteration,mse,damping"]
        lines += [f"{i},{m!r},{d!r}" for i, m, d in zip(self.iterations, self.mse, self.damping)]
        return "\n".join(lines) + "\n"


def init_params(n_hidden: int, n_inputs: int, norm: NormParams, seed: int) -> MlpParams:
    """Random hidden layer scaled by fan-in; the output layer starts at zero.

    With a zero output layer the first LM step is an exact linear least-squares
    fit of the output weights on the random hidden features.
    """
    rng = np.random.default_rng(seed)
    s_in = 1.0 / math.sqrt(n_inputs)
    return MlpParams(
        rng.uniform(-0.5, 0.5, (n_hidden, n_inputs)) * s_in,
        rng.uniform(-0.5, 0.5, n_hidden) * s_in,
        np.zeros(n_hidden),
        0.0,
        norm,
    )


def fit_lm(p0: MlpParams, u: np.ndarray, t: np.ndarray, cfg: LMConfig = LMConfig()) -> tuple[MlpParams, TrainingTrace]:
    """Levenberg-Marquardt on normalized inputs ``u`` and targets ``t``.

    Every accepted step strictly lowers the sum of squared residuals, so the
    returned parameters are the best seen.
    """
    n_h, n_in, norm = p0.n_hidden, p0.n_inputs, p0.norm
    theta = p0.pack()
    p = p0
    r = forward_unit(p, u) - t
    sse = float(r @ r)
    n = len(t)
    mu = cfg.mu_init
    trace = TrainingTrace()
    trace.append(0, sse / n, mu)
    eye = np.eye(theta.size)
    for it in range(1, cfg.max_iter + 1):
        if sse / n <= cfg.mse_goal:
            trace.stop_reason = "mse_goal"
            break
        jac = jacobian(p, u)
        jtj = jac.T @ jac
        grad = jac.T @ r
        accepted = False
        while mu <= cfg.mu_max:
            try:
                step = np.linalg.solve(jtj + mu * eye, -grad)
            except np.linalg.LinAlgError:
                mu *= cfg.mu_increase
                continue
            cand = MlpParams.unpack(theta + step, n_h, n_in, norm)
            r_new = forward_unit(cand, u) - t
            sse_new = float(r_new @ r_new)
            if sse_new < sse:
                theta, p, r, sse = theta + step, cand, r_new, sse_new
                mu *= cfg.mu_decrease
                accepted = True
                break
            mu *= cfg.mu_increase
        if not accepted:
            trace.stop_reason = "damping_cap"
            break
        trace.append(it, sse / n, mu)
    else:
        trace.stop_reason = "max_iter"
    return p, trace


def train_mlp(
    train: Dataset,
    n_hidden: int = 12,
    cfg: LMConfig = LMConfig(),
    seed: int = 0,
    norm: NormParams | None = None,
) -> tuple[MlpParams, TrainingTrace]:
    """Train on a raw (unnormalized) dataset; normalization bounds come from ``train`` unless given."""
    if len(train) == 0:
        raise ValueError("training set is empty")
    if n_hidden < 1:
        raise ValueError("n_hidden must be >= 1")
    unit, norm = normalize(train, norm)
    p0 = init_params(n_hidden, unit.features.shape[1], norm, seed)
    return fit_lm(p0, unit.features, unit.targets, cfg)

"""JSON model files for trained predictors."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..dataset import NormParams
from .mlp import MlpParams, mlp_forward
from .rbf import RbfParams, rbf_forward


def model_to_dict(model, seed=None, training_config=None, formula_variant=None) -> dict:
    if isinstance(model, MlpParams):
        kind = "mlp"
        weights = {
            "hidden_weights": model.hidden_weights.tolist(),
            "hidden_biases": model.hidden_biases.tolist(),
            "output_weights": model.output_weights.tolist(),
            "output_bias": model.output_bias,
        }
    elif isinstance(model, RbfParams):
        kind = "rbf"
        weights = {
            "centers": model.centers.tolist(),
            "spread": model.spread,
            "output_weights": model.output_weights.tolist(),
            "output_bias": model.output_bias,
        }
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    return {
        "kind": kind,
        "norm": model.norm.to_dict(),
        "weights": weights,
        "seed": seed,
        "training_config": training_config or {},
        "formula_variant": formula_variant,
    }


def model_from_dict(d: dict):
    kind = d.get("kind")
    norm = NormParams.from_dict(d["norm"])
    w = d["weights"]
    for key, value in w.items():
        if not np.all(np.isfinite(np.asarray(value, dtype=float))):
            raise ValueError(f"non-finite values in model parameter {key!r}")
    if kind == "mlp":
        return MlpParams(w["hidden_weights"], w["hidden_biases"], w["output_weights"], w["output_bias"], norm)
    if kind == "rbf":
        return RbfParams(w["centers"], w["spread"], w["output_weights"], w["output_bias"], norm)
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(path, model, **meta) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model, **meta), indent=2) + "\n")


def load_model(path):
    return model_from_dict(json.loads(Path(path).read_text()))


def predict(model, features, pre_normalized: bool = False):
    if isinstance(model, MlpParams):
        return mlp_forward(model, features, pre_normalized)
    return rbf_forward(model, features, pre_normalized)

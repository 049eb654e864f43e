from .metrics import Metrics, evaluate_metrics
from .mlp import LMConfig, MlpParams, TrainingTrace, fit_lm, mlp_forward, train_mlp
from .model_io import load_model, model_from_dict, model_to_dict, predict, save_model
from .rbf import RbfParams, rbf_forward, train_rbf

__all__ = [
    "LMConfig",
    "Metrics",
    "MlpParams",
    "RbfParams",
    "TrainingTrace",
    "evaluate_metrics",
    "fit_lm",
    "load_model",
    "mlp_forward",
    "model_from_dict",
    "model_to_dict",
    "predict",
    "rbf_forward",
    "save_model",
    "train_mlp",
    "train_rbf",
]

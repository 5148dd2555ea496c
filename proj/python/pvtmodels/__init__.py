"""PV/T electrical efficiency regression models (LSSVM, ANFIS, MLP, RBF)."""

import json

from . import _core
from ._core import (
    COLUMNS,
    IoError,
    NumericalError,
    ValidationError,
    __version__,
    andrews_curve,
    count_parameters,
    generate_synthetic,
    hat_diagonal,
    load_csv,
    metrics,
    predict,
    rbf_kernel,
    relevancy_factor,
    warning_leverage,
)


def train(data, config=None):
    """Train on an n×6 array. Returns (model, report, history); model and
    report are dicts, and the model dict can be passed back to predict_with."""
    model, report, history = _core.train(json.dumps(config or {}), data)
    return json.loads(model), json.loads(report), history


def predict_with(model, data):
    """Predictions from a model dict (as returned by train) on an n×5 or n×6 array."""
    return _core.predict(json.dumps(model), data)


__all__ = [
    "COLUMNS",
    "IoError",
    "NumericalError",
    "ValidationError",
    "__version__",
    "andrews_curve",
    "count_parameters",
    "generate_synthetic",
    "hat_diagonal",
    "load_csv",
    "metrics",
    "predict",
    "predict_with",
    "rbf_kernel",
    "relevancy_factor",
    "train",
    "warning_leverage",
]

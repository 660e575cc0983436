"""Fitted-model serialization: versioned JSON, same real encoding as episodes."""

import json

import numpy as np

from physbench.episodes import FORMAT_VERSION
from physbench.errors import FormatError
from physbench.predictors.linear import LinearPredictor
from physbench.predictors.neural import (
    MlpDerivativeModel,
    NeuralDerivativePredictor,
    Normalization,
)


def save_predictor(predictor, path: str) -> None:
    if isinstance(predictor, LinearPredictor):
        payload = {
            "format_version": FORMAT_VERSION,
            "kind": "predictor",
            "type": "linear",
            "ridge": predictor.ridge,
            "weights": predictor.weights.tolist(),
        }
    elif isinstance(predictor, NeuralDerivativePredictor):
        model = predictor.model
        payload = {
            "format_version": FORMAT_VERSION,
            "kind": "predictor",
            "type": "neural_derivative",
            "params": [p.tolist() for p in model.params],
            "input_mean": model.inputs.mean.tolist(),
            "input_std": model.inputs.std.tolist(),
            "target_mean": model.targets.mean.tolist(),
            "target_std": model.targets.std.tolist(),
            "final_loss": predictor.final_loss,
        }
    else:
        raise FormatError(f"cannot serialize predictor of type {type(predictor).__name__}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(json.dumps(payload, indent=2, allow_nan=False) + "\n")


def load_predictor(path: str):
    try:
        with open(path, encoding="ascii") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise FormatError(f"cannot parse model file {path}: {exc}") from exc
    if data.get("format_version") != FORMAT_VERSION or data.get("kind") != "predictor":
        raise FormatError(f"{path} is not a supported predictor file")
    if data["type"] == "linear":
        return LinearPredictor(np.asarray(data["weights"], dtype=float), data.get("ridge", 0.0))
    if data["type"] == "neural_derivative":
        model = MlpDerivativeModel(
            params=[np.asarray(p, dtype=float) for p in data["params"]],
            inputs=Normalization(
                np.asarray(data["input_mean"], dtype=float),
                np.asarray(data["input_std"], dtype=float),
            ),
            targets=Normalization(
                np.asarray(data["target_mean"], dtype=float),
                np.asarray(data["target_std"], dtype=float),
            ),
        )
        return NeuralDerivativePredictor(model, final_loss=data.get("final_loss"))
    raise FormatError(f"unknown predictor type '{data['type']}' in {path}")

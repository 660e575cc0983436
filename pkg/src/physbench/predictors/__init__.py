"""Built-in predictors and the fit/predict entry points."""

from physbench.errors import InvalidRange
from physbench.predictors.base import (
    DEFAULT_CONDITION_STEPS,
    EpisodeView,
    Predictor,
    autoregressive,
    make_view,
)
from physbench.predictors.baselines import ConstantVelocity, OraclePredictor, ZeroOrderHold
from physbench.predictors.linear import LinearPredictor, fit_linear
from physbench.predictors.neural import (
    AdamState,
    MlpDerivativeModel,
    NeuralDerivativePredictor,
    adam_step,
    fit_neural_derivative,
    mlp_loss_and_grads,
)
from physbench.predictors.store import load_predictor, save_predictor

BUILTIN_PREDICTORS = ("oracle", "zoh", "constvel")
FITTED_PREDICTORS = ("linear", "mlp")


def make_builtin(name: str) -> Predictor:
    if name == "oracle":
        return OraclePredictor()
    if name == "zoh":
        return ZeroOrderHold()
    if name == "constvel":
        return ConstantVelocity()
    raise InvalidRange(f"unknown built-in predictor '{name}'; known: {BUILTIN_PREDICTORS}")


__all__ = [
    "AdamState",
    "BUILTIN_PREDICTORS",
    "ConstantVelocity",
    "DEFAULT_CONDITION_STEPS",
    "EpisodeView",
    "FITTED_PREDICTORS",
    "LinearPredictor",
    "MlpDerivativeModel",
    "NeuralDerivativePredictor",
    "OraclePredictor",
    "Predictor",
    "ZeroOrderHold",
    "adam_step",
    "autoregressive",
    "fit_linear",
    "fit_neural_derivative",
    "load_predictor",
    "make_builtin",
    "make_view",
    "mlp_loss_and_grads",
    "save_predictor",
]

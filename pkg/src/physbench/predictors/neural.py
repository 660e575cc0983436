"""Neural state-derivative model: tanh MLP trained on finite differences.

The network approximates ds/dt from (state, action); rollouts integrate
it with the same RK4 stepper the simulator uses, renormalizing any
quaternion block.  Targets are (s_{t+1} - s_t) / dt; inputs and targets
are z-scored per dimension with statistics frozen at fit time.  Training
is fully deterministic given (data, seed, epochs).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from physbench.core.rng import Rng
from physbench.dynamics import OdeState, rk4_step
from physbench.errors import InvalidRange, NonFinite
from physbench.predictors.base import EpisodeView, Predictor

DEFAULT_HIDDEN = 64
DEFAULT_EPOCHS = 50
DEFAULT_BATCH = 256
STD_FLOOR = 1e-8


@dataclass
class Normalization:
    mean: np.ndarray
    std: np.ndarray

    @staticmethod
    def fit(data: np.ndarray) -> "Normalization":
        std = data.std(axis=0)
        return Normalization(data.mean(axis=0), np.maximum(std, STD_FLOOR))

    def forward(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.std

    def inverse(self, x: np.ndarray) -> np.ndarray:
        return x * self.std + self.mean


@dataclass
class MlpDerivativeModel:
    params: list  # [W1, b1, W2, b2, W3, b3]
    inputs: Normalization
    targets: Normalization

    @staticmethod
    def init(in_dim: int, out_dim: int, hidden: int, rng: Rng) -> "MlpDerivativeModel":
        def glorot(n_in, n_out):
            limit = math.sqrt(6.0 / (n_in + n_out))
            w = np.empty((n_in, n_out))
            for i in range(n_in):
                for j in range(n_out):
                    w[i, j] = rng.uniform(-limit, limit)
            return w

        params = [
            glorot(in_dim, hidden),
            np.zeros(hidden),
            glorot(hidden, hidden),
            np.zeros(hidden),
            glorot(hidden, out_dim),
            np.zeros(out_dim),
        ]
        ident = Normalization(np.zeros(in_dim), np.ones(in_dim))
        ident_out = Normalization(np.zeros(out_dim), np.ones(out_dim))
        return MlpDerivativeModel(params, ident, ident_out)

    def net(self, x_norm: np.ndarray) -> np.ndarray:
        w1, b1, w2, b2, w3, b3 = self.params
        h1 = np.tanh(x_norm @ w1 + b1)
        h2 = np.tanh(h1 @ w2 + b2)
        return h2 @ w3 + b3

    def derivative(self, state: np.ndarray, action: np.ndarray) -> np.ndarray:
        x = np.concatenate([state, action])[None, :]
        return self.targets.inverse(self.net(self.inputs.forward(x)))[0]


def mlp_loss_and_grads(params: list, x_norm: np.ndarray, t_norm: np.ndarray):
    """Mean squared error over the batch and analytic parameter gradients."""
    w1, b1, w2, b2, w3, b3 = params
    z1 = x_norm @ w1 + b1
    h1 = np.tanh(z1)
    z2 = h1 @ w2 + b2
    h2 = np.tanh(z2)
    pred = h2 @ w3 + b3
    diff = pred - t_norm
    loss = float(np.mean(diff * diff))
    scale = 2.0 / diff.size
    dpred = scale * diff
    dw3 = h2.T @ dpred
    db3 = dpred.sum(axis=0)
    dh2 = dpred @ w3.T
    dz2 = dh2 * (1.0 - h2 * h2)
    dw2 = h1.T @ dz2
    db2 = dz2.sum(axis=0)
    dh1 = dz2 @ w2.T
    dz1 = dh1 * (1.0 - h1 * h1)
    dw1 = x_norm.T @ dz1
    db1 = dz1.sum(axis=0)
    return loss, [dw1, db1, dw2, db2, dw3, db3]


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def adam_step(opt: AdamState, params: list, grads: list) -> list:
    """Standard bias-corrected Adam update; returns the new parameters."""
    if not opt.m:
        opt.m = [np.zeros_like(p) for p in params]
        opt.v = [np.zeros_like(p) for p in params]
    opt.step += 1
    out = []
    bc1 = 1.0 - opt.beta1**opt.step
    bc2 = 1.0 - opt.beta2**opt.step
    for i, (p, g) in enumerate(zip(params, grads)):
        opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * g
        opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * (g * g)
        m_hat = opt.m[i] / bc1
        v_hat = opt.v[i] / bc2
        out.append(p - opt.lr * m_hat / (np.sqrt(v_hat) + opt.eps))
    return out


def transitions_from_episodes(episodes: list) -> tuple[np.ndarray, np.ndarray]:
    """Stack (state, action) inputs and finite-difference derivative targets."""
    xs, ys = [], []
    for ep in episodes:
        xs.append(np.hstack([ep.states[:-1], ep.actions]))
        ys.append((ep.states[1:] - ep.states[:-1]) / ep.dt)
    return np.vstack(xs), np.vstack(ys)


class NeuralDerivativePredictor(Predictor):
    name = "mlp"

    def __init__(self, model: MlpDerivativeModel, final_loss: float | None = None):
        self.model = model
        self.final_loss = final_loss

    def rollout(self, view: EpisodeView) -> np.ndarray:
        out = np.empty((view.rollout_steps, view.state_dim))
        state = OdeState(view.cond_states[-1].copy(), view.layout)
        for t in range(view.rollout_steps):
            action = view.future_actions[t]
            deriv = lambda s: self.model.derivative(s, action)
            state = rk4_step(deriv, state, view.dt)
            out[t] = state.values
        return out


def fit_neural_derivative(
    train_episodes: list,
    epochs: int = DEFAULT_EPOCHS,
    batch: int = DEFAULT_BATCH,
    seed: int = 0,
    hidden: int = DEFAULT_HIDDEN,
    lr: float = 1e-3,
) -> NeuralDerivativePredictor:
    if not train_episodes:
        raise InvalidRange("fit_neural_derivative needs at least one episode")
    x, y = transitions_from_episodes(train_episodes)
    rng = Rng(seed)
    model = MlpDerivativeModel.init(x.shape[1], y.shape[1], hidden, rng)
    model.inputs = Normalization.fit(x)
    model.targets = Normalization.fit(y)
    x_norm = model.inputs.forward(x)
    y_norm = model.targets.forward(y)
    opt = AdamState(lr=lr)
    n = x_norm.shape[0]
    final_loss = math.nan
    for epoch in range(epochs):
        perm = np.array(rng.permutation(n))
        epoch_loss = 0.0
        batches = 0
        for start in range(0, n, batch):
            idx = perm[start : start + batch]
            loss, grads = mlp_loss_and_grads(model.params, x_norm[idx], y_norm[idx])
            for g in grads:
                if not np.all(np.isfinite(g)):
                    raise NonFinite(
                        f"non-finite gradient at epoch {epoch}, batch {batches} (loss {loss})"
                    )
            model.params = adam_step(opt, model.params, grads)
            epoch_loss += loss
            batches += 1
        final_loss = epoch_loss / max(batches, 1)
    return NeuralDerivativePredictor(model, final_loss=final_loss)

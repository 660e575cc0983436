"""Ridge-regularized least-squares next-state model.

Fits s_{t+1} ~ W^T [s_t; a_t; 1] on the normal equations; the intercept
column is left unpenalized, so as the ridge grows the model collapses to
predicting the mean next state rather than zero.
"""

import numpy as np

from physbench.core.linalg import solve_spd
from physbench.errors import InvalidRange
from physbench.predictors.base import EpisodeView, Predictor, autoregressive

DEFAULT_RIDGE = 1e-6


class LinearPredictor(Predictor):
    name = "linear"

    def __init__(self, weights: np.ndarray, ridge: float = DEFAULT_RIDGE):
        self.weights = np.asarray(weights, dtype=float)  # (D + A + 1, D)
        self.ridge = ridge

    def rollout(self, view: EpisodeView) -> np.ndarray:
        def step(s, a):
            feat = np.concatenate([s, a, [1.0]])
            return feat @ self.weights

        return autoregressive(step, view.cond_states[-1], view.future_actions)


def fit_linear(train_episodes: list, ridge: float = DEFAULT_RIDGE) -> LinearPredictor:
    if not train_episodes:
        raise InvalidRange("fit_linear needs at least one episode")
    feats, targets = [], []
    for ep in train_episodes:
        t_count = ep.states.shape[0] - 1
        ones = np.ones((t_count, 1))
        feats.append(np.hstack([ep.states[:-1], ep.actions, ones]))
        targets.append(ep.states[1:])
    x = np.vstack(feats)
    y = np.vstack(targets)
    if x.shape[0] < 1:
        raise InvalidRange("fit_linear needs at least one transition")
    gram = x.T @ x
    penalty = np.full(x.shape[1], ridge)
    penalty[-1] = 0.0  # intercept unpenalized
    gram[np.diag_indices_from(gram)] += penalty
    weights = solve_spd(gram, x.T @ y)
    return LinearPredictor(weights, ridge)

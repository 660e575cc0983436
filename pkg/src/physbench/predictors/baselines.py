"""Reference baselines: oracle, zero-order hold, constant velocity."""

import numpy as np

from physbench.predictors.base import EpisodeView, Predictor, autoregressive
from physbench.tasks import get_task


class OraclePredictor(Predictor):
    """The simulator itself; defines the zero-error floor."""

    name = "oracle"

    def rollout(self, view: EpisodeView) -> np.ndarray:
        task = get_task(view.task["task_id"])
        step = lambda s, a: task.step(s, a, view.params, view.dt)
        return autoregressive(step, view.cond_states[-1], view.future_actions)


class ZeroOrderHold(Predictor):
    """Predicts the last conditioned state forever."""

    name = "zoh"

    def rollout(self, view: EpisodeView) -> np.ndarray:
        return np.tile(view.cond_states[-1], (view.rollout_steps, 1))


class ConstantVelocity(Predictor):
    """Integrates the declared velocity dims; everything else is held.

    Positions advance as p + (h * dt) * v with the velocity frozen at the
    last conditioned state (the adapter clients replicate this expression
    order for bit parity).
    """

    name = "constvel"

    def rollout(self, view: EpisodeView) -> np.ndarray:
        last = view.cond_states[-1]
        out = np.tile(last, (view.rollout_steps, 1))
        for p_idx, v_idx in view.layout.vel_pairs():
            for h in range(1, view.rollout_steps + 1):
                out[h - 1, p_idx] = last[p_idx] + (h * view.dt) * last[v_idx]
        return out

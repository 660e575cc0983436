"""Predictor contract: conditioning window in, imagined rollout out.

Predictors only ever see an :class:`EpisodeView` — the conditioning
states and actions plus the future action sequence.  Ground truth beyond
the conditioning window never reaches predictor code.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from physbench.dynamics import StateLayout
from physbench.episodes import Episode, PredictionRecord
from physbench.errors import NonFinite, ShapeMismatch

DEFAULT_CONDITION_STEPS = 10


@dataclass(frozen=True)
class EpisodeView:
    """Truncated view of one episode handed to a predictor."""

    episode_id: str
    task: dict
    dt: float
    params: dict
    layout: StateLayout
    metadata: Optional[dict]
    cond_states: np.ndarray  # (condition_steps, D)
    cond_actions: np.ndarray  # (condition_steps - 1, A)
    future_actions: np.ndarray  # (rollout_steps, A)

    @property
    def condition_steps(self) -> int:
        return self.cond_states.shape[0]

    @property
    def rollout_steps(self) -> int:
        return self.future_actions.shape[0]

    @property
    def state_dim(self) -> int:
        return self.cond_states.shape[1]


def make_view(
    episode: Episode,
    condition_steps: int = DEFAULT_CONDITION_STEPS,
    rollout_steps: Optional[int] = None,
) -> EpisodeView:
    total = episode.states.shape[0]
    if condition_steps < 1:
        raise ShapeMismatch(f"condition_steps must be >= 1, got {condition_steps}")
    if rollout_steps is None:
        # default: predict through the last recorded transition (T steps
        # total, so T - condition_steps imagined states)
        rollout_steps = (total - 1) - condition_steps
    if rollout_steps < 1 or condition_steps + rollout_steps > total:
        raise ShapeMismatch(
            f"episode {episode.episode_id} has {total} states; cannot condition on "
            f"{condition_steps} and roll out {rollout_steps}"
        )
    c = condition_steps
    return EpisodeView(
        episode_id=episode.episode_id,
        task=episode.task,
        dt=episode.dt,
        params=episode.params,
        layout=episode.layout,
        metadata=episode.metadata,
        cond_states=episode.states[:c].copy(),
        cond_actions=episode.actions[: c - 1].copy(),
        future_actions=episode.actions[c - 1 : c - 1 + rollout_steps].copy(),
    )


class Predictor:
    """Base class; subclasses fill in name and the rollout."""

    name = "base"

    def rollout(self, view: EpisodeView) -> np.ndarray:
        """Imagined states, shape (rollout_steps, D)."""
        raise NotImplementedError

    def predict(
        self,
        episode: Episode,
        condition_steps: int = DEFAULT_CONDITION_STEPS,
        rollout_steps: Optional[int] = None,
    ) -> PredictionRecord:
        view = make_view(episode, condition_steps, rollout_steps)
        states = np.asarray(self.rollout(view), dtype=float)
        expected = (view.rollout_steps, view.state_dim)
        if states.shape != expected:
            raise ShapeMismatch(
                f"{self.name} returned grid {states.shape}, expected {expected}"
            )
        bad = ~np.isfinite(states)
        if bad.any():
            step = int(np.argwhere(bad.any(axis=1))[0, 0])
            raise NonFinite(f"{self.name} produced a non-finite state at rollout step {step + 1}")
        return PredictionRecord(episode.episode_id, self.name, condition_steps, states)


def autoregressive(step_fn, start: np.ndarray, future_actions: np.ndarray) -> np.ndarray:
    """Feed each imagined state back through step_fn with the next action."""
    out = np.empty((future_actions.shape[0], start.shape[0]))
    state = start
    for t in range(future_actions.shape[0]):
        state = step_fn(state, future_actions[t])
        out[t] = state
    return out

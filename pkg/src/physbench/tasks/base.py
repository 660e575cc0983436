"""Task base class: layout, parameter sampling, one-step transition."""

from typing import Optional

import numpy as np

from physbench.core.rng import Rng
from physbench.errors import InvalidRange

# give a rejection sampler this many tries before declaring the ranges bad
MAX_REDRAWS = 1000


class Task:
    """A deterministic transition system with a parameterized initial
    distribution.

    Subclasses define the state layout, default parameter ranges, the
    initial state as a function of sampled parameters, and the one-step
    transition.  Transitions are pure: same (state, action, params) in,
    bit-identical state out.
    """

    task_id: str = ""
    action_dim: int = 0
    action_scale: tuple = ()
    # momentum factor for random-action episode collection (0 = iid steps)
    action_smoothing: float = 0.0

    @property
    def layout(self):
        raise NotImplementedError

    @property
    def param_ranges(self) -> dict:
        """Default sampling intervals, parameter name -> (lo, hi)."""
        raise NotImplementedError

    @property
    def action_layout(self) -> tuple:
        return tuple(f"a{i}" for i in range(self.action_dim))

    def sample_params(self, ranges: dict, rng: Rng) -> dict:
        """Draw every parameter uniformly, in sorted-name order.

        Subclasses with coupled constraints redraw the offending
        parameters after the base pass (documented per task).
        """
        params = {}
        for name in sorted(ranges):
            lo, hi = ranges[name]
            if lo > hi:
                raise InvalidRange(f"range for {name} out of order: [{lo}, {hi}]")
            params[name] = rng.uniform(lo, hi)
        return params

    def init_state(self, params: dict) -> np.ndarray:
        raise NotImplementedError

    def step(self, state: np.ndarray, action: np.ndarray, params: dict, dt: float) -> np.ndarray:
        raise NotImplementedError

    def metadata(self, params: dict) -> Optional[dict]:
        """Extra per-episode file metadata (cameras etc.); None for most tasks."""
        return None

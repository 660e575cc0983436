"""Gravity-driven point-mass tasks: free fall and projectile motion.

Both share a 3-D position/velocity layout and an elastic floor: the ball
reflects with the vertical velocity negated, so speed is conserved and
episodes stay well-defined past the first landing.
"""

import numpy as np

from physbench.dynamics import DimSpec, EventSpec, OdeState, StateLayout, step_with_events
from physbench.tasks.base import Task

_LAYOUT = StateLayout(
    dims=(
        DimSpec("px", "m", "pos", vel="vx"),
        DimSpec("py", "m", "pos", vel="vy"),
        DimSpec("pz", "m", "pos", vel="vz"),
        DimSpec("vx", "m/s", "vel"),
        DimSpec("vy", "m/s", "vel"),
        DimSpec("vz", "m/s", "vel"),
    )
)


def _gravity_deriv(g: float):
    def deriv(y: np.ndarray) -> np.ndarray:
        return np.array([y[3], y[4], y[5], 0.0, 0.0, -g])

    return deriv


def _floor_bounce(radius: float) -> EventSpec:
    def guard(y: np.ndarray) -> float:
        return y[2] - radius

    def resolve(y: np.ndarray) -> np.ndarray:
        out = y.copy()
        out[5] = -out[5]
        return out

    return EventSpec(guard, resolve, name="floor")


class FreeFallTask(Task):
    task_id = "free_fall"

    @property
    def layout(self):
        return _LAYOUT

    @property
    def param_ranges(self):
        return {
            "g": (9.81, 9.81),
            "height": (0.5, 2.0),
            "radius": (0.05, 0.2),
        }

    def init_state(self, params):
        return np.array([0.0, 0.0, params["height"], 0.0, 0.0, 0.0])

    @staticmethod
    def deriv(params):
        return _gravity_deriv(params["g"])

    @staticmethod
    def events(params):
        return [_floor_bounce(params["radius"])]

    def step(self, state, action, params, dt, fired=None):
        s = OdeState(state, _LAYOUT)
        out = step_with_events(self.deriv(params), self.events(params), s, dt, fired=fired)
        return out.values


class ProjectileTask(FreeFallTask):
    task_id = "projectile"

    @property
    def param_ranges(self):
        return {
            "g": (9.81, 9.81),
            "height": (0.5, 2.0),
            "radius": (0.05, 0.2),
            "vx0": (0.5, 3.0),
        }

    def init_state(self, params):
        return np.array([0.0, 0.0, params["height"], params["vx0"], 0.0, 0.0])

"""Boxed-in collision tasks: bouncing ball and two-disc elastic collision.

Motion between contacts is uniform (frictionless horizontal plane); wall
hits negate the normal velocity component; disc-disc contacts exchange
the normal components by the 1-D elastic formulas, conserving kinetic
energy and momentum exactly.
"""

import math

import numpy as np

from physbench.dynamics import DimSpec, EventSpec, OdeState, StateLayout, step_with_events
from physbench.errors import InvalidRange
from physbench.tasks.base import MAX_REDRAWS, Task

_BALL_LAYOUT = StateLayout(
    dims=(
        DimSpec("px", "m", "pos", vel="vx"),
        DimSpec("py", "m", "pos", vel="vy"),
        DimSpec("vx", "m/s", "vel"),
        DimSpec("vy", "m/s", "vel"),
    )
)

_TWO_DISC_LAYOUT = StateLayout(
    dims=(
        DimSpec("p1x", "m", "pos", vel="v1x"),
        DimSpec("p1y", "m", "pos", vel="v1y"),
        DimSpec("v1x", "m/s", "vel"),
        DimSpec("v1y", "m/s", "vel"),
        DimSpec("p2x", "m", "pos", vel="v2x"),
        DimSpec("p2y", "m", "pos", vel="v2y"),
        DimSpec("v2x", "m/s", "vel"),
        DimSpec("v2y", "m/s", "vel"),
    )
)

# spawn positions keep the largest disc clear of every wall
_SPAWN_RANGE = (0.25, 1.75)
_MIN_GAP = 0.05


def _wall_events(p_idx: int, v_idx: int, radius: float, side: float, tag: str):
    def flip(y: np.ndarray) -> np.ndarray:
        out = y.copy()
        out[v_idx] = -out[v_idx]
        return out

    lo = EventSpec(lambda y: y[p_idx] - radius, flip, name=f"{tag}_lo")
    hi = EventSpec(lambda y: (side - radius) - y[p_idx], flip, name=f"{tag}_hi")
    return [lo, hi]


class BouncingBallTask(Task):
    task_id = "bouncing_ball"

    @property
    def layout(self):
        return _BALL_LAYOUT

    @property
    def param_ranges(self):
        return {
            "angle": (0.0, 2.0 * math.pi),
            "box_side": (2.0, 2.0),
            "px0": _SPAWN_RANGE,
            "py0": _SPAWN_RANGE,
            "radius": (0.05, 0.2),
            "speed": (0.5, 3.0),
        }

    def init_state(self, params):
        s, a = params["speed"], params["angle"]
        return np.array([params["px0"], params["py0"], s * math.cos(a), s * math.sin(a)])

    @staticmethod
    def deriv(params):
        return lambda y: np.array([y[2], y[3], 0.0, 0.0])

    @staticmethod
    def events(params):
        r, side = params["radius"], params["box_side"]
        return _wall_events(0, 2, r, side, "x") + _wall_events(1, 3, r, side, "y")

    def step(self, state, action, params, dt, fired=None):
        out = step_with_events(
            self.deriv(params), self.events(params), OdeState(state, _BALL_LAYOUT), dt, fired=fired
        )
        return out.values


def elastic_disc_resolve(y: np.ndarray, m1: float, m2: float) -> np.ndarray:
    """Exchange normal velocity components of two touching discs."""
    out = y.copy()
    nx, ny = y[0] - y[4], y[1] - y[5]
    d = math.hypot(nx, ny)
    nx, ny = nx / d, ny / d
    rel = (y[2] - y[6]) * nx + (y[3] - y[7]) * ny
    j1 = -2.0 * m2 / (m1 + m2) * rel
    j2 = 2.0 * m1 / (m1 + m2) * rel
    out[2] += j1 * nx
    out[3] += j1 * ny
    out[6] += j2 * nx
    out[7] += j2 * ny
    return out


class ElasticCollisionTask(Task):
    task_id = "elastic_collision"

    @property
    def layout(self):
        return _TWO_DISC_LAYOUT

    @property
    def param_ranges(self):
        return {
            "angle1": (0.0, 2.0 * math.pi),
            "angle2": (0.0, 2.0 * math.pi),
            "box_side": (2.0, 2.0),
            "m1": (0.5, 2.0),
            "m2": (0.5, 2.0),
            "p1x": _SPAWN_RANGE,
            "p1y": _SPAWN_RANGE,
            "p2x": _SPAWN_RANGE,
            "p2y": _SPAWN_RANGE,
            "radius": (0.05, 0.2),
            "speed1": (0.5, 3.0),
            "speed2": (0.5, 3.0),
        }

    def sample_params(self, ranges, rng):
        # base pass in sorted order, then redraw disc 2's position until
        # the discs spawn clear of each other
        params = super().sample_params(ranges, rng)
        gap = 2.0 * params["radius"] + _MIN_GAP
        for _ in range(MAX_REDRAWS):
            if math.hypot(params["p1x"] - params["p2x"], params["p1y"] - params["p2y"]) >= gap:
                return params
            params["p2x"] = rng.uniform(*ranges["p2x"])
            params["p2y"] = rng.uniform(*ranges["p2y"])
        raise InvalidRange("could not place two non-overlapping discs in the given ranges")

    def init_state(self, params):
        s1, a1 = params["speed1"], params["angle1"]
        s2, a2 = params["speed2"], params["angle2"]
        return np.array(
            [
                params["p1x"],
                params["p1y"],
                s1 * math.cos(a1),
                s1 * math.sin(a1),
                params["p2x"],
                params["p2y"],
                s2 * math.cos(a2),
                s2 * math.sin(a2),
            ]
        )

    @staticmethod
    def deriv(params):
        return lambda y: np.array([y[2], y[3], 0.0, 0.0, y[6], y[7], 0.0, 0.0])

    @staticmethod
    def events(params):
        r, side = params["radius"], params["box_side"]
        m1, m2 = params["m1"], params["m2"]
        events = (
            _wall_events(0, 2, r, side, "d1x")
            + _wall_events(1, 3, r, side, "d1y")
            + _wall_events(4, 6, r, side, "d2x")
            + _wall_events(5, 7, r, side, "d2y")
        )
        events.append(
            EventSpec(
                lambda y: math.hypot(y[0] - y[4], y[1] - y[5]) - 2.0 * r,
                lambda y: elastic_disc_resolve(y, m1, m2),
                name="contact",
            )
        )
        return events

    def step(self, state, action, params, dt, fired=None):
        out = step_with_events(
            self.deriv(params),
            self.events(params),
            OdeState(state, _TWO_DISC_LAYOUT),
            dt,
            fired=fired,
        )
        return out.values

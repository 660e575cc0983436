"""Rotation-dominated rigid-body tasks: rolling, rotation, spinning top.

The spinning top integrates Euler's equations for a symmetric cone
pivoting at its apex (gravity torque in the body frame, viscous damping)
while the spin rate keeps it gyroscopically stable.  Once the spin decays
below the classical stability threshold the fall is modeled
kinematically: the axis tips at a fixed rate while the angular velocity
keeps its exact viscous decay, so rotational kinetic energy never
increases; integrating the raw equations through the fall would convert
potential energy into kinetic energy.  At 85 degrees of tilt the
orientation is clamped, the residual spin decays with a five-step time
constant, and below 1e-3 rad/s the state freezes.
"""

import math

import numpy as np

from physbench.core.quat import quat_from_axis_angle, quat_mul, quat_normalize, quat_to_matrix
from physbench.dynamics import DimSpec, OdeState, StateLayout, rk4_step
from physbench.tasks.base import Task

_ROLL_LAYOUT = StateLayout(
    dims=(
        DimSpec("x", "m", "pos", vel="v"),
        DimSpec("v", "m/s", "vel"),
        DimSpec("phi", "rad", "pos", vel="omega"),
        DimSpec("omega", "rad/s", "vel"),
    )
)

_BODY_LAYOUT = StateLayout(
    dims=(
        DimSpec("qw", "1", "quat"),
        DimSpec("qx", "1", "quat"),
        DimSpec("qy", "1", "quat"),
        DimSpec("qz", "1", "quat"),
        DimSpec("wx", "rad/s", "vel"),
        DimSpec("wy", "rad/s", "vel"),
        DimSpec("wz", "rad/s", "vel"),
    )
)

TILT_MAX = math.radians(85.0)
SETTLE_OMEGA = 1e-3
SETTLE_DECAY = math.exp(-0.2)  # per-step factor for time constant 5 dt
FALL_RATE = 1.5  # rad/s kinematic tipping rate once sub-critical


class RollingTask(Task):
    """Cylinder rolling without slip: v = omega * r held exactly."""

    task_id = "rolling"

    @property
    def layout(self):
        return _ROLL_LAYOUT

    @property
    def param_ranges(self):
        return {
            "m": (0.5, 2.0),
            "phi0": (0.0, 2.0 * math.pi),
            "radius": (0.05, 0.2),
            "speed": (0.5, 3.0),
        }

    def init_state(self, params):
        omega = params["speed"] / params["radius"]
        # store v as the product so v == omega * r holds bit-exactly
        return np.array([0.0, omega * params["radius"], params["phi0"], omega])

    def step(self, state, action, params, dt):
        deriv = lambda y: np.array([y[1], 0.0, y[3], 0.0])
        return rk4_step(deriv, OdeState(state, _ROLL_LAYOUT), dt).values


class RotationTask(Task):
    """Torque-free spin about the symmetry axis: omega exactly constant."""

    task_id = "rotation"

    @property
    def layout(self):
        return _BODY_LAYOUT

    @property
    def param_ranges(self):
        return {
            "angle0": (0.0, 2.0 * math.pi),
            "axis_costheta": (-1.0, 1.0),
            "axis_phi": (0.0, 2.0 * math.pi),
            "spin_rate": (1.0, 10.0),
        }

    def init_state(self, params):
        ct = params["axis_costheta"]
        st = math.sqrt(max(0.0, 1.0 - ct * ct))
        axis = np.array([st * math.cos(params["axis_phi"]), st * math.sin(params["axis_phi"]), ct])
        q = quat_from_axis_angle(axis, params["angle0"])
        return np.concatenate([q, [0.0, 0.0, params["spin_rate"]]])

    def step(self, state, action, params, dt):
        def deriv(y):
            qdot = 0.5 * quat_mul(y[:4], np.array([0.0, y[4], y[5], y[6]]))
            return np.concatenate([qdot, [0.0, 0.0, 0.0]])

        return rk4_step(deriv, OdeState(state, _BODY_LAYOUT), dt).values


def _cone_inertia(params):
    """Principal inertia about the apex and the center-of-mass offset."""
    m, a, h = params["m"], params["base_radius"], params["height"]
    i_axial = 0.3 * m * a * a
    i_transverse = m * (3.0 * a * a / 20.0 + 3.0 * h * h / 5.0)
    return i_transverse, i_axial, 0.75 * h


def critical_spin(params) -> float:
    """Sleeping-top stability threshold 2 sqrt(I1 m g l) / I3."""
    i1, i3, l_cm = _cone_inertia(params)
    return 2.0 * math.sqrt(i1 * params["m"] * 9.81 * l_cm) / i3


def _tilt_of(q: np.ndarray) -> tuple[float, np.ndarray]:
    """Tilt angle of the body z-axis from vertical, and that axis."""
    z_body = quat_to_matrix(q)[:, 2]
    return math.acos(max(-1.0, min(1.0, z_body[2]))), z_body


def _tilt_by(q: np.ndarray, delta: float) -> np.ndarray:
    """World-frame rotation changing tilt by delta in the current fall plane."""
    _, z_body = _tilt_of(q)
    axis = np.array([-z_body[1], z_body[0], 0.0])  # e_z x z_body
    n = math.hypot(axis[0], axis[1])
    axis = axis / n if n > 1e-12 else np.array([1.0, 0.0, 0.0])
    return quat_normalize(quat_mul(quat_from_axis_angle(axis, delta), q))


class SpinTask(Task):
    task_id = "spin"

    @property
    def layout(self):
        return _BODY_LAYOUT

    @property
    def param_ranges(self):
        # squat cone: every sampled top starts above its critical spin
        return {
            "base_radius": (0.2, 0.3),
            "damping": (0.001, 0.01),
            "height": (0.06, 0.1),
            "m": (0.5, 2.0),
            "spin_rate": (20.0, 60.0),
            "tilt0": (0.01, 0.05),
            "tilt_azimuth": (0.0, 2.0 * math.pi),
        }

    def init_state(self, params):
        az = params["tilt_azimuth"]
        q = quat_from_axis_angle(np.array([math.cos(az), math.sin(az), 0.0]), params["tilt0"])
        return np.concatenate([q, [0.0, 0.0, params["spin_rate"]]])

    def step(self, state, action, params, dt):
        q, w = state[:4], state[4:7]
        i1, i3, l_cm = _cone_inertia(params)
        c = params["damping"]
        tilt, _ = _tilt_of(q)
        w_norm = math.sqrt(float(w @ w))

        if tilt >= TILT_MAX - 1e-9:
            # settled: orientation frozen, residual spin decays then freezes
            if w_norm < SETTLE_OMEGA:
                return state.copy()
            out = state.copy()
            out[4:7] = w * SETTLE_DECAY
            return out

        if c > 0.0 and w_norm < critical_spin(params) and tilt > 1e-9:
            # sub-critical: kinematic topple, exact viscous decay on omega
            spin = quat_from_axis_angle(np.array([0.0, 0.0, 1.0]), w[2] * dt)
            q_new = _tilt_by(quat_normalize(quat_mul(q, spin)), min(FALL_RATE * dt, TILT_MAX - tilt))
            w_new = w * np.array(
                [math.exp(-c / i1 * dt), math.exp(-c / i1 * dt), math.exp(-c / i3 * dt)]
            )
            new_tilt, _ = _tilt_of(q_new)
            if new_tilt > TILT_MAX:
                q_new = _tilt_by(q_new, TILT_MAX - new_tilt)
            return np.concatenate([q_new, w_new])

        m, g = params["m"], 9.81
        inertia = np.array([i1, i1, i3])
        gravity = np.array([0.0, 0.0, -m * g])
        arm = np.array([0.0, 0.0, l_cm])

        def deriv(y):
            qq, ww = y[:4], y[4:7]
            rot = quat_to_matrix(qq)
            tau_body = rot.T @ np.cross(rot @ arm, gravity)
            wdot = (np.cross(inertia * ww, ww) + tau_body - c * ww) / inertia
            qdot = 0.5 * quat_mul(qq, np.array([0.0, ww[0], ww[1], ww[2]]))
            return np.concatenate([qdot, wdot])

        out = rk4_step(deriv, OdeState(state, _BODY_LAYOUT), dt).values
        new_tilt, _ = _tilt_of(out[:4])
        if new_tilt > TILT_MAX:
            out = np.concatenate([_tilt_by(out[:4], TILT_MAX - new_tilt), out[4:7]])
        return out

import math

import numpy as np
import pytest

from physbench.dynamics import (
    DimSpec,
    EventSpec,
    OdeState,
    StateLayout,
    rk4_step,
    step_with_events,
)
from physbench.errors import EventStorm, NonFinite

_G = 9.81

_FALL_LAYOUT = StateLayout(
    dims=(
        DimSpec("z", "m", "pos", vel="vz"),
        DimSpec("vz", "m/s", "vel"),
    )
)

_BALL2D_LAYOUT = StateLayout(
    dims=(
        DimSpec("px", "m", "pos", vel="vx"),
        DimSpec("py", "m", "pos", vel="vy"),
        DimSpec("vx", "m/s", "vel"),
        DimSpec("vy", "m/s", "vel"),
    )
)


def _fall_deriv(y):
    return np.array([y[1], -_G])


def _ball_deriv(y):
    return np.array([y[2], y[3], 0.0, 0.0])


def _floor_event(r=0.0):
    def resolve(y):
        out = y.copy()
        out[1] = -out[1]
        return out

    return EventSpec(lambda y: y[0] - r, resolve, name="floor")


class TestRk4:
    def test_zero_derivative_is_identity(self):
        s = OdeState(np.array([1.0, 2.0]), _FALL_LAYOUT)
        out = rk4_step(lambda y: np.zeros(2), s, 0.1)
        np.testing.assert_array_equal(out.values, s.values)

    def test_free_fall_closed_form(self):
        # RK4 is exact for polynomial-in-time dynamics
        s = OdeState(np.array([1.0, 0.0]), _FALL_LAYOUT)
        out = rk4_step(_fall_deriv, s, 0.1)
        assert abs(out.values[0] - 0.95095) <= 1e-12
        assert abs(out.values[1] - (-0.981)) <= 1e-12

    def test_pendulum_energy_drift(self):
        # oracle: E = L^2 w^2 / 2 - g L cos(theta); small amplitude
        length = 1.0
        deriv = lambda y: np.array([y[1], -(_G / length) * math.sin(y[0])])
        layout = StateLayout(
            dims=(DimSpec("theta", "rad", "pos", vel="omega"), DimSpec("omega", "rad/s", "vel"))
        )
        s = OdeState(np.array([0.1, 0.0]), layout)
        energy = lambda y: 0.5 * length**2 * y[1] ** 2 - _G * length * math.cos(y[0])
        e0 = energy(s.values)
        for _ in range(2000):
            s = rk4_step(deriv, s, 0.02)
        assert abs(energy(s.values) - e0) <= 1e-7 * abs(e0)

    def test_non_finite_raises(self):
        s = OdeState(np.array([1.0, 0.0]), _FALL_LAYOUT)
        with pytest.raises(NonFinite):
            rk4_step(lambda y: np.array([np.inf, 0.0]), s, 0.1)

    def test_quaternion_renormalized(self):
        layout = StateLayout(
            dims=(
                DimSpec("qw", "1", "quat"),
                DimSpec("qx", "1", "quat"),
                DimSpec("qy", "1", "quat"),
                DimSpec("qz", "1", "quat"),
            )
        )
        s = OdeState(np.array([1.0, 0.0, 0.0, 0.0]), layout)
        # a derivative that inflates the quaternion
        out = rk4_step(lambda y: y.copy(), s, 0.3)
        assert abs(np.linalg.norm(out.values) - 1.0) <= 1e-12


class TestEvents:
    def test_no_crossing_matches_plain_step(self):
        s = OdeState(np.array([5.0, -1.0]), _FALL_LAYOUT)
        plain = rk4_step(_fall_deriv, s, 0.02)
        evented = step_with_events(_fall_deriv, [_floor_event()], s, 0.02)
        np.testing.assert_array_equal(plain.values, evented.values)

    def test_floor_reflection(self):
        # ball moving down-right in 2D, floor at py = 0
        def resolve(y):
            out = y.copy()
            out[3] = -out[3]
            return out

        floor = EventSpec(lambda y: y[1], resolve, name="floor")
        s = OdeState(np.array([0.0, 0.01, 1.0, -2.0]), _BALL2D_LAYOUT)
        out = step_with_events(_ball_deriv, [floor], s, 0.02)
        np.testing.assert_allclose(out.values[2:], [1.0, 2.0], atol=0)

    def test_corner_two_events_in_order(self):
        # ball aimed into the corner (0, 0): both walls reflect within one dt
        def flip(idx):
            def resolve(y):
                out = y.copy()
                out[idx] = -out[idx]
                return out

            return resolve

        walls = [
            EventSpec(lambda y: y[0], flip(2), name="wall_x"),
            EventSpec(lambda y: y[1], flip(3), name="wall_y"),
        ]
        start = np.array([0.010, 0.015, -1.0, -2.0])
        s = OdeState(start, _BALL2D_LAYOUT)
        fired = []
        out = step_with_events(_ball_deriv, walls, s, 0.02, fired=fired)
        # y wall is reached at t = 0.0075, x wall at t = 0.010
        assert [f.name for f in fired] == ["wall_y", "wall_x"]
        assert fired[0].time_in_step < fired[1].time_in_step
        speed0 = math.hypot(start[2], start[3])
        speed1 = math.hypot(out.values[2], out.values[3])
        assert abs(speed1 - speed0) <= 1e-12
        # reference: same interval at dt / 100
        ref = OdeState(start, _BALL2D_LAYOUT)
        for _ in range(100):
            ref = step_with_events(_ball_deriv, walls, ref, 0.02 / 100)
        assert np.max(np.abs(out.values - ref.values)) <= 1e-8

    def test_event_localization_against_fine_reference(self):
        s0 = np.array([1.0, 0.0])
        coarse = OdeState(s0, _FALL_LAYOUT)
        events = [_floor_event(0.1)]
        for _ in range(25):
            coarse = step_with_events(_fall_deriv, events, coarse, 0.02)
        fine = OdeState(s0, _FALL_LAYOUT)
        for _ in range(2500):
            fine = step_with_events(_fall_deriv, events, fine, 0.0002)
        assert np.max(np.abs(coarse.values - fine.values)) <= 1e-8

    def test_resting_contact_unchanged(self):
        s = OdeState(np.array([0.0, 0.0]), _FALL_LAYOUT)
        out = step_with_events(_fall_deriv, [_floor_event()], s, 0.02)
        np.testing.assert_array_equal(out.values, s.values)

    def test_grazing_slide_along_wall(self):
        # moving parallel to the wall with guard exactly zero: no chattering
        def resolve(y):
            out = y.copy()
            out[2] = -out[2]
            return out

        wall = EventSpec(lambda y: y[0], resolve, name="wall")
        s = OdeState(np.array([0.0, 0.0, 0.0, 1.5]), _BALL2D_LAYOUT)
        out = s
        for _ in range(50):
            out = step_with_events(_ball_deriv, [wall], out, 0.02)
        assert abs(out.values[1] - 1.5) <= 1e-12
        assert out.values[0] == 0.0

    def test_event_storm_detected(self):
        # ball rattling between two walls 2 mm apart at 10 m/s
        def flip(y):
            out = y.copy()
            out[2] = -out[2]
            return out

        walls = [
            EventSpec(lambda y: y[0], flip, name="lo"),
            EventSpec(lambda y: 0.002 - y[0], flip, name="hi"),
        ]
        s = OdeState(np.array([0.001, 0.0, 10.0, 0.0]), _BALL2D_LAYOUT)
        with pytest.raises(EventStorm):
            step_with_events(_ball_deriv, walls, s, 0.02)

    def test_bit_identical_repeat(self):
        s = OdeState(np.array([1.0, -3.0]), _FALL_LAYOUT)
        a = step_with_events(_fall_deriv, [_floor_event(0.1)], s, 0.02)
        b = step_with_events(_fall_deriv, [_floor_event(0.1)], s, 0.02)
        assert np.array_equal(a.values, b.values)

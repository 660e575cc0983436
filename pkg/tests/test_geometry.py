import math

import numpy as np
import pytest

from physbench.core.quat import Quat, Vec3, quat_from_axis_angle
from physbench.core.rng import Rng
from physbench.errors import ActionOutOfRange
from physbench.geometry import (
    CameraPose,
    Intrinsics,
    back_project,
    project,
    step_camera,
)
from physbench.tasks import get_task, make_spec, sample_init

IDENT = CameraPose(Vec3(0.0, 0.0, 0.0), Quat.identity())


class TestProject:
    def test_optical_axis_hits_principal_point(self):
        intr = Intrinsics(640, 480, math.radians(60.0))
        for depth in (0.5, 2.0, 50.0):
            u, v, visible = project(IDENT, intr, Vec3(0.0, 0.0, -depth))
            assert visible
            assert u == intr.cx
            assert v == intr.cy

    def test_pinhole_formula(self):
        # fov_y = 90 deg, height = 100 -> f = 50; x/z = 1/5 -> u = 60
        intr = Intrinsics(100, 100, math.radians(90.0))
        assert abs(intr.focal - 50.0) <= 1e-12
        u, v, visible = project(IDENT, intr, Vec3(1.0, 0.0, -5.0))
        assert abs(u - 60.0) <= 1e-12
        assert abs(v - 50.0) <= 1e-12
        assert visible

    def test_behind_camera_invisible(self):
        intr = Intrinsics(100, 100, math.radians(90.0))
        _, _, visible = project(IDENT, intr, Vec3(0.0, 0.0, 2.0))
        assert not visible

    def test_outside_rectangle_invisible(self):
        intr = Intrinsics(100, 100, math.radians(90.0))
        _, _, visible = project(IDENT, intr, Vec3(10.0, 0.0, -1.0))
        assert not visible

    def test_back_projection_roundtrip(self):
        intr = Intrinsics(256, 256, math.radians(75.0))
        rng = Rng(55)
        pose = CameraPose(
            Vec3(0.2, -0.4, 1.0),
            Quat.from_array(quat_from_axis_angle(np.array([0.3, 1.0, -0.2]), 0.4)),
        )
        checked = 0
        while checked < 1000:
            p = Vec3(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-4.0, -1.0))
            world = Vec3.from_array(
                pose.orientation.matrix() @ p.as_array() + pose.position.as_array()
            )
            u, v, visible = project(pose, intr, world)
            if not visible:
                continue
            rebuilt = back_project(pose, intr, u, v, -p.z)
            assert (rebuilt - world).norm() <= 1e-9
            checked += 1


class TestStepCamera:
    def test_zero_action_identity(self):
        out = step_camera(IDENT, np.zeros(6))
        np.testing.assert_array_equal(out.position.as_array(), np.zeros(3))
        np.testing.assert_array_equal(out.orientation.as_array(), [1, 0, 0, 0])

    def test_unit_x_translation(self):
        out = step_camera(IDENT, np.array([1.0, 0, 0, 0, 0, 0]))
        np.testing.assert_allclose(out.position.as_array(), [0.05, 0.0, 0.0], atol=0)

    def test_translation_in_camera_frame(self):
        # camera yawed 90 degrees: its x axis is world -z
        pose = CameraPose(
            Vec3(0.0, 0.0, 0.0),
            Quat.from_array(quat_from_axis_angle(np.array([0.0, 1.0, 0.0]), math.pi / 2)),
        )
        out = step_camera(pose, np.array([1.0, 0, 0, 0, 0, 0]))
        np.testing.assert_allclose(out.position.as_array(), [0.0, 0.0, -0.05], atol=1e-15)

    def test_pure_translation_invertible(self):
        pose = CameraPose(
            Vec3(1.0, 2.0, 3.0),
            Quat.from_array(quat_from_axis_angle(np.array([0.1, 0.9, 0.2]), 0.7)),
        )
        a = np.array([0.3, -0.8, 0.5, 0.0, 0.0, 0.0])
        there = step_camera(pose, a)
        back = step_camera(there, -a)
        assert np.max(np.abs(back.position.as_array() - pose.position.as_array())) <= 1e-12
        assert np.max(np.abs(back.orientation.as_array() - pose.orientation.as_array())) <= 1e-12

    def test_rotation_changes_orientation(self):
        out = step_camera(IDENT, np.array([0.0, 0, 0, 1.0, 0, 0]))
        # yaw by 2 degrees about camera y
        expected = quat_from_axis_angle(np.array([0.0, 1.0, 0.0]), math.radians(2.0))
        np.testing.assert_allclose(out.orientation.as_array(), expected, atol=1e-15)

    def test_out_of_range_action_rejected(self):
        with pytest.raises(ActionOutOfRange):
            step_camera(IDENT, np.array([1.5, 0, 0, 0, 0, 0]))
        with pytest.raises(ActionOutOfRange):
            step_camera(IDENT, np.array([0.0, 0, 0]))


class TestReprojectionTask:
    def _fresh(self, seed=0):
        spec = make_spec("reprojection")
        params, state = sample_init(spec, Rng(seed))
        return get_task("reprojection"), params, state

    def test_zero_action_keeps_pixels(self):
        task, params, s = self._fresh()
        out = task.step(s, np.zeros(6), params, 0.02)
        np.testing.assert_array_equal(out, s)

    def test_visible_pixels_normalized(self):
        task, params, s = self._fresh(3)
        rng = Rng(8)
        for _ in range(50):
            a = np.array([rng.uniform(-1.0, 1.0) for _ in range(6)])
            s = task.step(s, a, params, 0.02)
            for k in range(8):
                base = 7 + 6 * k
                if s[base + 5] == 1.0:
                    assert -1.0 <= s[base + 3] <= 1.0
                    assert -1.0 <= s[base + 4] <= 1.0

    def test_invisible_keeps_last_pixel(self):
        task, params, s = self._fresh(3)
        # rotate hard until some keypoint leaves the view, then confirm
        # its pixel stays put while the flag is down
        frozen = {}
        for _ in range(200):
            prev = s
            s = task.step(s, np.array([0.0, 0, 0, 1.0, 0, 0]), params, 0.02)
            for k in range(8):
                base = 7 + 6 * k
                if prev[base + 5] == 1.0 and s[base + 5] == 0.0:
                    frozen[k] = s[base + 3 : base + 5].copy()
                elif k in frozen and s[base + 5] == 0.0:
                    np.testing.assert_array_equal(s[base + 3 : base + 5], frozen[k])
                elif k in frozen and s[base + 5] == 1.0:
                    del frozen[k]
            if frozen:
                break
        assert frozen, "expected at least one keypoint to leave the view"

    def test_positive_x_translation_shifts_view_left(self):
        task, params, s = self._fresh(5)
        a = np.array([1.0, 0, 0, 0, 0, 0])
        out = task.step(s, a, params, 0.02)
        moved = 0
        for k in range(8):
            base = 7 + 6 * k
            if s[base + 5] == 1.0 and out[base + 5] == 1.0:
                assert out[base + 3] < s[base + 3]
                moved += 1
        assert moved >= 4

    def test_camera_quaternion_stays_unit(self):
        task, params, s = self._fresh(6)
        rng = Rng(31)
        for _ in range(100):
            a = np.array([rng.uniform(-1.0, 1.0) for _ in range(6)])
            s = task.step(s, a, params, 0.02)
        assert abs(np.linalg.norm(s[3:7]) - 1.0) <= 1e-12

"""Keypoint-reprojection task: camera-motion actions over a static scene."""

import math

import numpy as np

from physbench.core.quat import Quat, Vec3
from physbench.dynamics import DimSpec, StateLayout
from physbench.geometry import (
    ROTATION_STEP,
    TRANSLATION_STEP,
    CameraPose,
    Intrinsics,
    normalize_px,
    project,
    step_camera,
)
from physbench.tasks.base import Task

IMAGE_WIDTH = 256
IMAGE_HEIGHT = 256
NUM_KEYPOINTS = 8


def _reprojection_layout() -> StateLayout:
    dims = [
        DimSpec("cam_x", "m", "pos"),
        DimSpec("cam_y", "m", "pos"),
        DimSpec("cam_z", "m", "pos"),
        DimSpec("cam_qw", "1", "quat"),
        DimSpec("cam_qx", "1", "quat"),
        DimSpec("cam_qy", "1", "quat"),
        DimSpec("cam_qz", "1", "quat"),
    ]
    for k in range(NUM_KEYPOINTS):
        dims.append(DimSpec(f"kp{k}_x", "m", "aux", group=k))
        dims.append(DimSpec(f"kp{k}_y", "m", "aux", group=k))
        dims.append(DimSpec(f"kp{k}_z", "m", "aux", group=k))
        dims.append(DimSpec(f"kp{k}_u", "norm_px", "pixel", group=k))
        dims.append(DimSpec(f"kp{k}_v", "norm_px", "pixel", group=k))
        dims.append(DimSpec(f"kp{k}_vis", "1", "flag", group=k))
    return StateLayout(dims=tuple(dims))


_REPROJECTION_LAYOUT = _reprojection_layout()


class ReprojectionTask(Task):
    """Predict normalized keypoint pixels as the camera flies around.

    Keypoints are sampled in a 4 x 4 x 2 m box in front of the initial
    camera; invisible keypoints hold their last visible pixel with the
    flag cleared.  Random-action episodes smooth the 6-D camera action
    with a 0.8 momentum factor so the motion stays coherent.
    """

    task_id = "reprojection"
    action_dim = 6
    action_scale = (
        TRANSLATION_STEP,
        TRANSLATION_STEP,
        TRANSLATION_STEP,
        ROTATION_STEP,
        ROTATION_STEP,
        ROTATION_STEP,
    )
    action_smoothing = 0.8

    @property
    def layout(self):
        return _REPROJECTION_LAYOUT

    @property
    def param_ranges(self):
        ranges = {"fov_y": (math.pi / 2.0, math.pi / 2.0)}
        for k in range(NUM_KEYPOINTS):
            ranges[f"kp{k}_x"] = (-2.0, 2.0)
            ranges[f"kp{k}_y"] = (-2.0, 2.0)
            ranges[f"kp{k}_z"] = (-4.0, -2.0)
        return ranges

    @property
    def action_layout(self):
        return ("dx", "dy", "dz", "yaw", "pitch", "roll")

    def intrinsics(self, params) -> Intrinsics:
        return Intrinsics(IMAGE_WIDTH, IMAGE_HEIGHT, params["fov_y"])

    def metadata(self, params):
        return {
            "intrinsics": {
                "width": IMAGE_WIDTH,
                "height": IMAGE_HEIGHT,
                "fov_y": params["fov_y"],
            },
            "keypoints": NUM_KEYPOINTS,
        }

    def init_state(self, params):
        pose = CameraPose(Vec3(0.0, 0.0, 0.0), Quat.identity())
        intr = self.intrinsics(params)
        state = np.zeros(self.layout.size)
        state[3] = 1.0  # identity quaternion
        for k in range(NUM_KEYPOINTS):
            base = 7 + 6 * k
            world = Vec3(params[f"kp{k}_x"], params[f"kp{k}_y"], params[f"kp{k}_z"])
            state[base : base + 3] = world.as_array()
            u, v, visible = project(pose, intr, world)
            if visible:
                un, vn = normalize_px(u, v, intr)
                state[base + 3 : base + 6] = [un, vn, 1.0]
        return state

    def step(self, state, action, params, dt):
        pose = CameraPose(Vec3.from_array(state[0:3]), Quat.from_array(state[3:7]))
        new_pose = step_camera(pose, action)
        intr = self.intrinsics(params)
        out = state.copy()
        out[0:3] = new_pose.position.as_array()
        out[3:7] = new_pose.orientation.as_array()
        for k in range(NUM_KEYPOINTS):
            base = 7 + 6 * k
            world = Vec3.from_array(state[base : base + 3])
            u, v, visible = project(new_pose, intr, world)
            if visible:
                un, vn = normalize_px(u, v, intr)
                out[base + 3 : base + 6] = [un, vn, 1.0]
            else:
                out[base + 5] = 0.0  # keep last visible pixel, drop the flag
        return out

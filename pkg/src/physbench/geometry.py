"""Keypoint reprojection: pinhole camera, explicit extrinsics, visibility.

Conventions, stated once: the camera looks along its -z axis with x right
and y up; pixel origin is the top-left corner with v growing downward;
orientation quaternions rotate camera-frame vectors into the world frame.
Observed pixel coordinates are normalized to [-1, 1] per axis so the
reprojection error is commensurate with the physics tasks.
"""

import math
from dataclasses import dataclass

import numpy as np

from physbench.core.quat import Quat, Vec3, quat_from_axis_angle, quat_mul, quat_normalize
from physbench.errors import ActionOutOfRange

Z_NEAR = 1e-3  # m; points closer than this (or behind) are invisible
TRANSLATION_STEP = 0.05  # m per unit action component
ROTATION_STEP = math.radians(2.0)  # rad per unit action component


@dataclass(frozen=True)
class CameraPose:
    position: Vec3
    orientation: Quat  # world-from-camera rotation


@dataclass(frozen=True)
class Intrinsics:
    width: int
    height: int
    fov_y: float  # radians

    def __post_init__(self):
        if not (0.0 < self.fov_y < math.pi):
            raise ValueError(f"fov_y must be in (0, pi), got {self.fov_y}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")

    @property
    def focal(self) -> float:
        # derived every time so it can never go stale
        return self.height / (2.0 * math.tan(0.5 * self.fov_y))

    @property
    def cx(self) -> float:
        return self.width / 2.0

    @property
    def cy(self) -> float:
        return self.height / 2.0


def project(pose: CameraPose, intr: Intrinsics, p_world: Vec3) -> tuple[float, float, bool]:
    """Pixel coordinates of a world point, and whether it is visible.

    Behind-camera points return (0, 0, False); invisibility is a value,
    not an error.
    """
    rot = pose.orientation.matrix()
    rel = (p_world - pose.position).as_array()
    p_cam = rot.T @ rel
    z = p_cam[2]
    if z >= -Z_NEAR:
        return 0.0, 0.0, False
    u = intr.cx + intr.focal * (p_cam[0] / -z)
    v = intr.cy - intr.focal * (p_cam[1] / -z)
    visible = 0.0 <= u <= intr.width and 0.0 <= v <= intr.height
    return float(u), float(v), visible


def back_project(pose: CameraPose, intr: Intrinsics, u: float, v: float, depth: float) -> Vec3:
    """World point on the ray through pixel (u, v) at camera depth |z|."""
    x = (u - intr.cx) / intr.focal * depth
    y = -(v - intr.cy) / intr.focal * depth
    p_cam = np.array([x, y, -depth])
    world = pose.orientation.matrix() @ p_cam + pose.position.as_array()
    return Vec3.from_array(world)


def step_camera(pose: CameraPose, action: np.ndarray) -> CameraPose:
    """Translate in the camera frame, then apply intrinsic yaw-pitch-roll."""
    a = np.asarray(action, dtype=float)
    if a.shape != (6,):
        raise ActionOutOfRange(f"camera action must have 6 components, got shape {a.shape}")
    if np.any(np.abs(a) > 1.0):
        raise ActionOutOfRange(f"camera action outside [-1, 1]: {a}")
    rot = pose.orientation.matrix()
    new_pos = pose.position.as_array() + rot @ (a[:3] * TRANSLATION_STEP)
    q = pose.orientation.as_array()
    yaw = quat_from_axis_angle(np.array([0.0, 1.0, 0.0]), a[3] * ROTATION_STEP)
    pitch = quat_from_axis_angle(np.array([1.0, 0.0, 0.0]), a[4] * ROTATION_STEP)
    roll = quat_from_axis_angle(np.array([0.0, 0.0, 1.0]), a[5] * ROTATION_STEP)
    q_new = quat_normalize(quat_mul(quat_mul(quat_mul(q, yaw), pitch), roll))
    return CameraPose(Vec3.from_array(new_pos), Quat.from_array(q_new))


def normalize_px(u: float, v: float, intr: Intrinsics) -> tuple[float, float]:
    """Map raw pixels onto [-1, 1] per axis."""
    return 2.0 * u / intr.width - 1.0, 2.0 * v / intr.height - 1.0

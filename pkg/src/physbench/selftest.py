"""Built-in invariant suite: conservation, closed forms, geometry, protocol.

Each check is a small self-contained experiment returning pass/fail plus
a measured quantity, so `selftest` output doubles as a numeric health
report.  The acceptance tests run the same checks at full scale.
"""

import math
from dataclasses import dataclass

import numpy as np

from physbench.core.quat import Quat, Vec3, quat_to_matrix
from physbench.core.rng import Rng
from physbench.episodes import generate
from physbench.errors import ZeroReference
from physbench.geometry import CameraPose, Intrinsics, back_project, project, step_camera
from physbench.harness import EvalCell, evaluate, radar_ratios
from physbench.predictors import OraclePredictor, ZeroOrderHold
from physbench.tasks import get_task, make_spec, sample_init
from physbench.tasks.rotational import _cone_inertia

NO_ACTION = np.zeros(0)
DT = 0.02


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def check_bouncing_speed(steps: int = 5000) -> CheckResult:
    task = get_task("bouncing_ball")
    params, s = sample_init(make_spec("bouncing_ball"), Rng(101))
    speed0 = math.hypot(s[2], s[3])
    worst = 0.0
    for _ in range(steps):
        s = task.step(s, NO_ACTION, params, DT)
        worst = max(worst, abs(math.hypot(s[2], s[3]) - speed0))
    return CheckResult(
        "bouncing-ball speed conservation",
        worst <= 1e-12 * max(1.0, speed0),
        f"max |speed - speed0| = {worst:.3e} over {steps} steps",
    )


def check_elastic_conservation(min_events: int = 100) -> CheckResult:
    task = get_task("elastic_collision")
    contact_events = 0
    worst_ke = worst_p = 0.0
    episode = 0
    while contact_events < min_events and episode < 200:
        params, s = sample_init(make_spec("elastic_collision"), Rng(7000 + episode))
        episode += 1
        m1, m2 = params["m1"], params["m2"]
        for _ in range(300):
            ke0 = 0.5 * m1 * (s[2] ** 2 + s[3] ** 2) + 0.5 * m2 * (s[6] ** 2 + s[7] ** 2)
            p0 = np.array([m1 * s[2] + m2 * s[6], m1 * s[3] + m2 * s[7]])
            fired = []
            s = task.step(s, NO_ACTION, params, DT, fired=fired)
            ke1 = 0.5 * m1 * (s[2] ** 2 + s[3] ** 2) + 0.5 * m2 * (s[6] ** 2 + s[7] ** 2)
            worst_ke = max(worst_ke, abs(ke1 - ke0) / max(1.0, ke0))
            if fired and all(f.name == "contact" for f in fired):
                contact_events += 1
                p1 = np.array([m1 * s[2] + m2 * s[6], m1 * s[3] + m2 * s[7]])
                worst_p = max(worst_p, float(np.max(np.abs(p1 - p0))))
    ok = contact_events >= min_events and worst_ke <= 1e-12 and worst_p <= 1e-12
    return CheckResult(
        "elastic-collision KE and momentum conservation",
        ok,
        f"{contact_events} contacts, worst dKE = {worst_ke:.3e}, worst dP = {worst_p:.3e}",
    )


def check_pendulum_drift(steps: int = 2000, episodes: int = 3) -> CheckResult:
    task = get_task("pendulum")
    worst = 0.0
    for i in range(episodes):
        params, s = sample_init(make_spec("pendulum"), Rng(900 + i))
        length, g = params["length"], params["g"]
        energy = lambda y: 0.5 * length**2 * y[1] ** 2 + g * length * (1.0 - math.cos(y[0]))
        e0 = energy(s)
        for _ in range(steps):
            s = task.step(s, NO_ACTION, params, DT)
            worst = max(worst, abs(energy(s) - e0) / e0)
    return CheckResult(
        "pendulum energy drift",
        worst <= 1e-7,
        f"max relative drift = {worst:.3e} over {steps} steps x {episodes} episodes",
    )


def check_rotation_invariants(steps: int = 10000) -> CheckResult:
    task = get_task("rotation")
    params, s = sample_init(make_spec("rotation"), Rng(77))
    w0 = s[4:7].copy()
    worst_norm = 0.0
    omega_exact = True
    for _ in range(steps):
        s = task.step(s, NO_ACTION, params, DT)
        omega_exact = omega_exact and np.array_equal(s[4:7], w0)
        worst_norm = max(worst_norm, abs(float(np.linalg.norm(s[:4])) - 1.0))
    return CheckResult(
        "rotation omega constant + unit quaternion",
        omega_exact and worst_norm <= 1e-12,
        f"omega bit-exact = {omega_exact}, max |1 - |q|| = {worst_norm:.3e} over {steps} steps",
    )


def check_spin_energy(steps: int = 800, episodes: int = 3) -> CheckResult:
    task = get_task("spin")
    worst = -math.inf
    for i in range(episodes):
        params, s = sample_init(make_spec("spin"), Rng(300 + i))
        i1, i3, _ = _cone_inertia(params)
        inertia = np.array([i1, i1, i3])
        ke = 0.5 * float(inertia @ (s[4:7] * s[4:7]))
        for _ in range(steps):
            s = task.step(s, NO_ACTION, params, DT)
            ke_next = 0.5 * float(inertia @ (s[4:7] * s[4:7]))
            worst = max(worst, (ke_next - ke) / max(ke, 1e-30))
            ke = ke_next
    return CheckResult(
        "spin kinetic energy non-increasing",
        worst <= 1e-12,
        f"max relative per-step KE increase = {worst:.3e}",
    )


def check_free_fall_closed_form() -> CheckResult:
    task = get_task("free_fall")
    params = {"g": 9.81, "height": 1.0, "radius": 0.1}
    s = task.step(np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0]), NO_ACTION, params, 0.1)
    err = max(abs(s[2] - 0.95095), abs(s[5] + 0.981))
    return CheckResult("free-fall closed form", err <= 1e-12, f"max error = {err:.3e}")


def check_projectile_first_bounce() -> CheckResult:
    task = get_task("projectile")
    params = {"g": 9.81, "height": 1.0, "radius": 0.1, "vx0": 2.0}
    s = task.init_state(params)
    t = 0.0
    fired = []
    while not fired and t < 2.0:
        s = task.step(s, NO_ACTION, params, DT, fired=fired)
        t += DT
    t_star = t - DT + fired[0].time_in_step
    t_true = math.sqrt(2.0 * 0.9 / 9.81)
    err = abs(2.0 * t_star - 2.0 * t_true)
    return CheckResult("projectile first-bounce range", err <= 1e-8, f"range error = {err:.3e}")


def check_circular_period() -> CheckResult:
    task = get_task("circular")
    params = {"m": 1.0, "speed0": 1.0, "string_length": 1.0, "theta0": 0.0}
    s = task.init_state(params)
    n = math.ceil(2 * math.pi / DT)
    for _ in range(n):
        s = task.step(s, np.zeros(1), params, DT)
    angle = n * DT  # omega = 1
    err = float(np.max(np.abs(s[:2] - [math.cos(angle), math.sin(angle)])))
    return CheckResult("circular uniform period", err <= 1e-9, f"position error = {err:.3e}")


def check_rolling_no_slip() -> CheckResult:
    params = {"m": 1.0, "phi0": 0.0, "radius": 0.1, "speed": 1.0}
    task = get_task("rolling")
    s = task.init_state(params)
    exact = s[1] == s[3] * params["radius"]
    for _ in range(100):
        s = task.step(s, NO_ACTION, params, DT)
    exact = exact and s[1] == s[3] * params["radius"]
    return CheckResult("rolling no-slip v = omega r", exact, f"bit-exact = {exact}")


def check_inclined_closed_form() -> CheckResult:
    task = get_task("inclined_plane")
    params = {"alpha": math.radians(30.0), "g": 9.81, "mu": 0.0, "v0": 0.0}
    a_net = 9.81 * math.sin(params["alpha"])
    s = np.array([0.0, 0.0])
    worst = 0.0
    for n in range(1, 51):
        s = task.step(s, NO_ACTION, params, DT)
        t = n * DT
        worst = max(worst, abs(s[1] - a_net * t), abs(s[0] - 0.5 * a_net * t * t))
    return CheckResult("inclined-plane closed form", worst <= 1e-10, f"max error = {worst:.3e}")


def check_pinhole_formula() -> CheckResult:
    intr = Intrinsics(100, 100, math.radians(90.0))
    pose = CameraPose(Vec3(0.0, 0.0, 0.0), Quat.identity())
    u, v, visible = project(pose, intr, Vec3(1.0, 0.0, -5.0))
    axis_u, axis_v, axis_vis = project(pose, intr, Vec3(0.0, 0.0, -3.0))
    ok = (
        visible
        and abs(u - 60.0) <= 1e-12
        and abs(v - 50.0) <= 1e-12
        and axis_vis
        and axis_u == 50.0
        and axis_v == 50.0
    )
    return CheckResult("pinhole projection formula", ok, f"u = {u}, v = {v}")


def check_projection_roundtrip(points: int = 1000) -> CheckResult:
    from physbench.core.quat import quat_from_axis_angle

    intr = Intrinsics(256, 256, math.radians(75.0))
    pose = CameraPose(
        Vec3(0.3, -0.2, 0.5),
        Quat.from_array(quat_from_axis_angle(np.array([0.2, 1.0, 0.1]), 0.3)),
    )
    rng = Rng(404)
    worst = 0.0
    checked = 0
    while checked < points:
        cam_pt = Vec3(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-4.0, -1.0))
        world = Vec3.from_array(
            pose.orientation.matrix() @ cam_pt.as_array() + pose.position.as_array()
        )
        u, v, visible = project(pose, intr, world)
        if not visible:
            continue
        rebuilt = back_project(pose, intr, u, v, -cam_pt.z)
        worst = max(worst, (rebuilt - world).norm())
        checked += 1
    return CheckResult(
        "project/back-project round trip", worst <= 1e-9, f"max error = {worst:.3e} m"
    )


def check_camera_invertibility() -> CheckResult:
    from physbench.core.quat import quat_from_axis_angle

    pose = CameraPose(
        Vec3(1.0, -2.0, 0.5),
        Quat.from_array(quat_from_axis_angle(np.array([0.4, 0.8, 0.1]), 1.1)),
    )
    a = np.array([0.7, -0.4, 0.9, 0.0, 0.0, 0.0])
    back = step_camera(step_camera(pose, a), -a)
    err = float(np.max(np.abs(back.position.as_array() - pose.position.as_array())))
    return CheckResult("camera translation invertibility", err <= 1e-12, f"error = {err:.3e}")


def check_oracle_zero_mse() -> CheckResult:
    worst = 0.0
    for task_id in ("pendulum", "bouncing_ball", "reprojection"):
        indexed, _ = generate(make_spec(task_id, horizon=100), 2, 606)
        cell = evaluate(OraclePredictor(), [ep for _, ep in indexed])
        worst = max(worst, cell.mse)
    return CheckResult("oracle MSE is zero", worst == 0.0, f"max MSE = {worst}")


def check_zoh_closed_form_mse() -> CheckResult:
    overrides = {
        "speed": (0.5, 0.5),
        "angle": (math.pi / 4, math.pi / 4),
        "px0": (1.0, 1.0),
        "py0": (1.0, 1.0),
    }
    indexed, _ = generate(make_spec("bouncing_ball", range_overrides=overrides), 1, 5)
    cell = evaluate(ZeroOrderHold(), [ep for _, ep in indexed])
    sigma = 0.5
    expected = np.mean([(sigma * h * DT) ** 2 / 4.0 for h in range(1, 91)])
    err = abs(cell.mse - expected)
    return CheckResult("zero-order-hold closed-form MSE", err <= 1e-9, f"error = {err:.3e}")


def check_radar_worked_example() -> CheckResult:
    def cell(name, mse):
        return EvalCell(name, "t", 1, 10, 90, mse, np.full(90, mse), np.full(90, 1.0))

    table = radar_ratios([cell("a", 2.0), cell("b", 4.0), cell("c", 8.0)], "a")
    got = table["normalized"]["t"]
    ok = got == {"a": 0.25, "b": 0.5, "c": 1.0}
    try:
        radar_ratios([cell("a", 0.0), cell("b", 1.0)], "a")
        zero_ok = False
    except ZeroReference:
        zero_ok = True
    return CheckResult("radar normalization worked example", ok and zero_ok, f"{got}")


ALL_CHECKS = [
    check_bouncing_speed,
    check_elastic_conservation,
    check_pendulum_drift,
    check_rotation_invariants,
    check_spin_energy,
    check_free_fall_closed_form,
    check_projectile_first_bounce,
    check_circular_period,
    check_rolling_no_slip,
    check_inclined_closed_form,
    check_pinhole_formula,
    check_projection_roundtrip,
    check_camera_invertibility,
    check_oracle_zero_mse,
    check_zoh_closed_form_mse,
    check_radar_worked_example,
]


def run_all() -> list:
    return [check() for check in ALL_CHECKS]

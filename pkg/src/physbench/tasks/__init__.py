"""Task catalog and episode-level task specification."""

from dataclasses import dataclass, field

import numpy as np

from physbench.core.rng import Rng
from physbench.errors import InvalidRange
from physbench.tasks.ballistic import FreeFallTask, ProjectileTask
from physbench.tasks.base import Task
from physbench.tasks.billiards import BouncingBallTask, ElasticCollisionTask
from physbench.tasks.rotational import RollingTask, RotationTask, SpinTask
from physbench.tasks.smooth import CircularTask, InclinedPlaneTask, PendulumTask

DEFAULT_DT = 0.02  # s
DEFAULT_HORIZON = 100  # steps


def _build_registry() -> dict:
    from physbench.tasks.reprojection import ReprojectionTask

    tasks = [
        FreeFallTask(),
        ProjectileTask(),
        BouncingBallTask(),
        ElasticCollisionTask(),
        CircularTask(),
        InclinedPlaneTask(),
        PendulumTask(),
        RollingTask(),
        RotationTask(),
        SpinTask(),
        ReprojectionTask(),
    ]
    return {t.task_id: t for t in tasks}


TASKS: dict = _build_registry()


def get_task(task_id: str) -> Task:
    if task_id not in TASKS:
        raise InvalidRange(f"unknown task '{task_id}'; known: {sorted(TASKS)}")
    return TASKS[task_id]


@dataclass(frozen=True)
class TaskSpec:
    """Task identity plus the sampling distribution for one dataset."""

    task_id: str
    dt: float = DEFAULT_DT
    horizon: int = DEFAULT_HORIZON
    param_ranges: dict = field(default_factory=dict)

    def __post_init__(self):
        task = get_task(self.task_id)
        if not self.dt > 0.0:
            raise InvalidRange(f"dt must be positive, got {self.dt}")
        if self.horizon < 1:
            raise InvalidRange(f"horizon must be >= 1, got {self.horizon}")
        for name, (lo, hi) in self.param_ranges.items():
            if name not in task.param_ranges:
                raise InvalidRange(f"unknown parameter '{name}' for task {self.task_id}")
            if lo > hi:
                raise InvalidRange(f"range for {name} out of order: [{lo}, {hi}]")

    @property
    def task(self) -> Task:
        return TASKS[self.task_id]

    @property
    def action_dim(self) -> int:
        return self.task.action_dim

    def ranges(self) -> dict:
        """Catalog defaults merged with this spec's overrides, sorted."""
        merged = dict(self.task.param_ranges)
        merged.update(self.param_ranges)
        return {k: merged[k] for k in sorted(merged)}

    def snapshot(self) -> dict:
        """Serializable description embedded in every episode file."""
        task = self.task
        return {
            "task_id": self.task_id,
            "dt": self.dt,
            "horizon": self.horizon,
            "action_dim": task.action_dim,
            "action_scale": list(task.action_scale),
            "param_ranges": {k: list(v) for k, v in self.ranges().items()},
        }


def make_spec(
    task_id: str,
    dt: float = DEFAULT_DT,
    horizon: int = DEFAULT_HORIZON,
    range_overrides: dict | None = None,
) -> TaskSpec:
    return TaskSpec(task_id, dt, horizon, dict(range_overrides or {}))


def sample_init(spec: TaskSpec, rng: Rng) -> tuple[dict, np.ndarray]:
    """Sample (params, initial state) for one episode.

    Draw order is fixed: sorted parameter names, uniform per range, with
    task-documented redraws for coupled constraints; the initial state is
    a deterministic function of the sampled parameters.
    """
    task = spec.task
    params = task.sample_params(spec.ranges(), rng)
    return params, task.init_state(params)


def catalog() -> dict:
    """Machine-readable task catalog keyed by task id."""
    out = {}
    for task_id in sorted(TASKS):
        task = TASKS[task_id]
        out[task_id] = {
            "task_id": task_id,
            "state_dim": task.layout.size,
            "state_layout": [
                {
                    "name": d.name,
                    "unit": d.unit,
                    "role": d.role,
                    **({"vel": d.vel} if d.vel else {}),
                    **({"group": d.group} if d.group is not None else {}),
                }
                for d in task.layout.dims
            ],
            "action_dim": task.action_dim,
            "action_layout": list(task.action_layout),
            "action_scale": list(task.action_scale),
            "action_smoothing": task.action_smoothing,
            "param_ranges": {k: list(v) for k, v in sorted(task.param_ranges.items())},
            "default_dt": DEFAULT_DT,
            "default_horizon": DEFAULT_HORIZON,
        }
    return out

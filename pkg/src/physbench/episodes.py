"""Seeded episode generation and the on-disk interchange format.

One JSON file per episode; reals are serialized as the shortest decimal
that round-trips the underlying binary64, so write -> read is the
identity bit for bit and files diff cleanly.  A dataset directory holds
episode files plus a manifest with content digests.
"""

import concurrent.futures
import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from physbench.core.rng import Rng, derive_child_seed
from physbench.dynamics import DimSpec, StateLayout
from physbench.errors import FormatError, InvalidRange, PhysbenchError
from physbench.tasks import TaskSpec, get_task, sample_init

FORMAT_VERSION = 1

_VALID_ROLES = {"pos", "vel", "quat", "pixel", "flag", "aux"}


def episode_id_for(task_id: str, seed: int, params: dict) -> str:
    """Content-addressed id: hex digest of (task_id, seed, params)."""
    canon = json.dumps(
        [task_id, seed, {k: params[k] for k in sorted(params)}],
        separators=(",", ":"),
        allow_nan=False,
    )
    return hashlib.sha256(canon.encode("ascii")).hexdigest()


@dataclass
class Episode:
    episode_id: str
    task: dict  # TaskSpec snapshot
    dt: float
    seed: int
    params: dict
    layout: StateLayout
    action_layout: tuple
    states: np.ndarray  # (T+1, D)
    actions: np.ndarray  # (T, A)
    metadata: Optional[dict] = None

    @property
    def task_id(self) -> str:
        return self.task["task_id"]

    @property
    def horizon(self) -> int:
        return self.states.shape[0] - 1


@dataclass
class PredictionRecord:
    episode_id: str
    predictor: str
    condition_steps: int
    states: np.ndarray  # (rollout, D)


@dataclass
class GenerationFailure:
    index: int
    seed: int
    error: str


def _layout_to_json(layout: StateLayout) -> list:
    out = []
    for d in layout.dims:
        entry = {"name": d.name, "unit": d.unit, "role": d.role}
        if d.vel is not None:
            entry["vel"] = d.vel
        if d.group is not None:
            entry["group"] = d.group
        out.append(entry)
    return out


def _layout_from_json(data) -> StateLayout:
    dims = []
    for entry in data:
        role = entry.get("role", "aux")
        if role not in _VALID_ROLES:
            raise FormatError(f"unknown layout role '{role}'")
        dims.append(
            DimSpec(entry["name"], entry["unit"], role, entry.get("vel"), entry.get("group"))
        )
    try:
        layout = StateLayout(dims=tuple(dims))
        layout.quat_start  # validates block contiguity
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    return layout


def generate_episode(spec: TaskSpec, index: int, base_seed: int) -> Episode:
    """Episode ``index`` of a dataset; owns its derived child stream."""
    seed = derive_child_seed(base_seed, index)
    rng = Rng(seed)
    task = spec.task
    params, state = sample_init(spec, rng)
    states = np.empty((spec.horizon + 1, task.layout.size))
    actions = np.empty((spec.horizon, task.action_dim))
    states[0] = state
    prev_action = np.zeros(task.action_dim)
    for t in range(spec.horizon):
        raw = np.array([rng.uniform(-1.0, 1.0) for _ in range(task.action_dim)])
        if task.action_smoothing > 0.0 and t > 0:
            a = task.action_smoothing * prev_action + (1.0 - task.action_smoothing) * raw
        else:
            a = raw
        actions[t] = a
        prev_action = a
        state = task.step(state, a, params, spec.dt)
        states[t + 1] = state
    return Episode(
        episode_id=episode_id_for(spec.task_id, seed, params),
        task=spec.snapshot(),
        dt=spec.dt,
        seed=seed,
        params=params,
        layout=task.layout,
        action_layout=task.action_layout,
        states=states,
        actions=actions,
        metadata=task.metadata(params),
    )


def generate(
    spec: TaskSpec, count: int, base_seed: int, jobs: int = 1, seed_offset: int = 0
) -> tuple[list, list]:
    """Generate ``count`` episodes; failures abort one episode, not the batch.

    Episodes use child seeds derived from (base_seed, seed_offset + i), so
    results are identical however the work is scheduled.  Returns
    ([(index, Episode), ...], [GenerationFailure, ...]).
    """
    if count < 0:
        raise InvalidRange(f"count must be >= 0, got {count}")
    indices = list(range(seed_offset, seed_offset + count))

    def one(i):
        try:
            return i, generate_episode(spec, i, base_seed), None
        except PhysbenchError as exc:
            return i, None, GenerationFailure(i, derive_child_seed(base_seed, i), str(exc))

    if jobs <= 1:
        results = [one(i) for i in indices]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, indices))
    episodes = [(i, ep) for i, ep, _ in results if ep is not None]
    failures = [f for _, _, f in results if f is not None]
    return episodes, failures


def episode_to_dict(e: Episode) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "episode_id": e.episode_id,
        "task": e.task,
        "dt": e.dt,
        "seed": e.seed,
        "params": {k: e.params[k] for k in sorted(e.params)},
        "state_layout": _layout_to_json(e.layout),
        "action_layout": list(e.action_layout),
        "states": e.states.tolist(),
        "actions": e.actions.tolist(),
        "metadata": e.metadata,
    }


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def episode_from_dict(data: dict) -> Episode:
    if not isinstance(data, dict):
        raise FormatError("episode file must hold a JSON object")
    if data.get("format_version") != FORMAT_VERSION:
        raise FormatError(
            f"unsupported format_version {data.get('format_version')}, expected {FORMAT_VERSION}"
        )
    for key in ("episode_id", "task", "dt", "seed", "params", "state_layout", "states", "actions"):
        if key not in data:
            raise FormatError(f"episode file missing field '{key}'")
    layout = _layout_from_json(data["state_layout"])
    states = np.asarray(data["states"], dtype=float)
    if states.ndim != 2 or states.shape[1] != layout.size or states.shape[0] < 2:
        raise FormatError(
            f"states grid {states.shape} does not match layout size {layout.size}"
        )
    horizon = states.shape[0] - 1
    action_layout = tuple(data.get("action_layout", ()))
    actions = np.asarray(data["actions"], dtype=float)
    if len(action_layout) == 0:
        actions = actions.reshape(horizon, 0)
    if actions.shape != (horizon, len(action_layout)):
        raise FormatError(
            f"actions grid {actions.shape} does not match (T={horizon}, A={len(action_layout)})"
        )
    if not (np.all(np.isfinite(states)) and np.all(np.isfinite(actions))):
        raise FormatError("episode contains non-finite values")
    return Episode(
        episode_id=data["episode_id"],
        task=data["task"],
        dt=float(data["dt"]),
        seed=int(data["seed"]),
        params=dict(data["params"]),
        layout=layout,
        action_layout=action_layout,
        states=states,
        actions=actions,
        metadata=data.get("metadata"),
    )


def write_episode(e: Episode, path: str) -> None:
    if not (np.all(np.isfinite(e.states)) and np.all(np.isfinite(e.actions))):
        raise FormatError(f"episode {e.episode_id} contains non-finite values")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(_dump_json(episode_to_dict(e)))


def read_episode(path: str) -> Episode:
    try:
        with open(path, encoding="ascii") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise FormatError(f"cannot parse episode file {path}: {exc}") from exc
    return episode_from_dict(data)


def prediction_to_dict(r: PredictionRecord) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "episode_id": r.episode_id,
        "predictor": r.predictor,
        "condition_steps": r.condition_steps,
        "states": r.states.tolist(),
    }


def prediction_from_dict(data: dict) -> PredictionRecord:
    if not isinstance(data, dict):
        raise FormatError("prediction file must hold a JSON object")
    if data.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {data.get('format_version')}")
    for key in ("episode_id", "predictor", "condition_steps", "states"):
        if key not in data:
            raise FormatError(f"prediction file missing field '{key}'")
    states = np.asarray(data["states"], dtype=float)
    if states.ndim != 2:
        raise FormatError(f"prediction states must be a 2-D grid, got shape {states.shape}")
    if not np.all(np.isfinite(states)):
        raise FormatError("prediction contains non-finite values")
    condition_steps = int(data["condition_steps"])
    if condition_steps < 1:
        raise FormatError(f"condition_steps must be >= 1, got {condition_steps}")
    return PredictionRecord(data["episode_id"], data["predictor"], condition_steps, states)


def write_prediction(r: PredictionRecord, path: str) -> None:
    if not np.all(np.isfinite(r.states)):
        raise FormatError(f"prediction for {r.episode_id} contains non-finite values")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(_dump_json(prediction_to_dict(r)))


def read_prediction(path: str) -> PredictionRecord:
    try:
        with open(path, encoding="ascii") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise FormatError(f"cannot parse prediction file {path}: {exc}") from exc
    return prediction_from_dict(data)


def _file_digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def episode_filename(index: int, episode_id: str) -> str:
    return f"ep_{index:05d}_{episode_id[:12]}.json"


@dataclass
class DatasetManifest:
    task_id: str
    dt: float
    count: int
    split: str
    param_ranges: dict
    base_seed: int
    episodes: list = field(default_factory=list)  # {index, seed, episode_id, file, sha256}
    task: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "task_id": self.task_id,
            "dt": self.dt,
            "count": self.count,
            "split": self.split,
            "param_ranges": {k: list(v) for k, v in sorted(self.param_ranges.items())},
            "base_seed": self.base_seed,
            "task": self.task,
            "episodes": self.episodes,
        }


def write_dataset(
    indexed_episodes: list,
    out_dir: str,
    spec: TaskSpec,
    base_seed: int,
    split: str = "train",
    overwrite: bool = False,
) -> DatasetManifest:
    """Write episode files then the manifest, in episode-index order.

    ``indexed_episodes`` is a list of (generation index, Episode) pairs as
    returned by :func:`generate`.
    """
    os.makedirs(out_dir, exist_ok=True)
    manifest_path = os.path.join(out_dir, "manifest.json")
    if os.path.exists(manifest_path) and not overwrite:
        raise InvalidRange(f"{manifest_path} exists; pass overwrite to replace it")
    entries = []
    for index, ep in indexed_episodes:
        fname = episode_filename(index, ep.episode_id)
        fpath = os.path.join(out_dir, fname)
        if os.path.exists(fpath) and not overwrite:
            raise InvalidRange(f"{fpath} exists; pass overwrite to replace it")
        write_episode(ep, fpath)
        entries.append(
            {
                "index": index,
                "seed": ep.seed,
                "episode_id": ep.episode_id,
                "file": fname,
                "sha256": _file_digest(fpath),
            }
        )
    manifest = DatasetManifest(
        task_id=spec.task_id,
        dt=spec.dt,
        count=len(indexed_episodes),
        split=split,
        param_ranges=spec.ranges(),
        base_seed=base_seed,
        episodes=entries,
        task=spec.snapshot(),
    )
    with open(manifest_path, "w", encoding="ascii") as fh:
        fh.write(_dump_json(manifest.to_dict()))
    return manifest


def read_manifest(dataset_dir: str) -> dict:
    path = os.path.join(dataset_dir, "manifest.json")
    try:
        with open(path, encoding="ascii") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise FormatError(f"cannot parse manifest {path}: {exc}") from exc
    if data.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported manifest format_version {data.get('format_version')}")
    return data


def load_dataset(dataset_dir: str, verify_digests: bool = True) -> tuple[list, dict]:
    """Episodes in manifest order; digest mismatches are format errors."""
    manifest = read_manifest(dataset_dir)
    episodes = []
    for entry in manifest["episodes"]:
        path = os.path.join(dataset_dir, entry["file"])
        if verify_digests and _file_digest(path) != entry["sha256"]:
            raise FormatError(f"digest mismatch for {path}")
        ep = read_episode(path)
        if ep.episode_id != entry["episode_id"]:
            raise FormatError(
                f"episode id mismatch in {path}: {ep.episode_id} vs manifest {entry['episode_id']}"
            )
        episodes.append(ep)
    return episodes, manifest


def generate_dataset(
    spec: TaskSpec,
    count: int,
    base_seed: int,
    out_dir: str,
    split: str = "train",
    jobs: int = 1,
    seed_offset: int = 0,
    overwrite: bool = False,
) -> tuple[DatasetManifest, list]:
    indexed, failures = generate(spec, count, base_seed, jobs=jobs, seed_offset=seed_offset)
    manifest = write_dataset(indexed, out_dir, spec, base_seed, split=split, overwrite=overwrite)
    return manifest, failures


def split_ood(
    spec: TaskSpec,
    train_ranges: dict,
    eval_ranges: dict,
    train_count: int,
    eval_count: int,
    base_seed: int,
    out_dir: str,
    jobs: int = 1,
    overwrite: bool = False,
    eval_seed_start: Optional[int] = None,
) -> tuple[DatasetManifest, DatasetManifest]:
    """Train/eval datasets over disjoint seed blocks of one base seed.

    Eval ranges may lie entirely outside the train ranges; that is the
    point of the split.  Eval seed indices start after the train block
    unless overridden, and any overlap between the blocks is rejected.
    """
    train_spec = TaskSpec(spec.task_id, spec.dt, spec.horizon, dict(train_ranges))
    eval_spec = TaskSpec(spec.task_id, spec.dt, spec.horizon, dict(eval_ranges))
    if eval_seed_start is None:
        eval_seed_start = train_count
    train_idx = range(0, train_count)
    eval_idx = range(eval_seed_start, eval_seed_start + eval_count)
    if set(train_idx) & set(eval_idx):
        raise InvalidRange("train and eval seed blocks overlap")
    train_seeds = {derive_child_seed(base_seed, i) for i in train_idx}
    eval_seeds = {derive_child_seed(base_seed, i) for i in eval_idx}
    if train_seeds & eval_seeds:
        raise InvalidRange("train and eval seed sets overlap")
    train_manifest, train_failures = generate_dataset(
        train_spec,
        train_count,
        base_seed,
        os.path.join(out_dir, "train"),
        split="train",
        jobs=jobs,
        seed_offset=0,
        overwrite=overwrite,
    )
    eval_manifest, eval_failures = generate_dataset(
        eval_spec,
        eval_count,
        base_seed,
        os.path.join(out_dir, "eval"),
        split="eval",
        jobs=jobs,
        seed_offset=eval_seed_start,
        overwrite=overwrite,
    )
    failures = train_failures + eval_failures
    if failures:
        raise InvalidRange(f"{len(failures)} episodes failed during OOD split: {failures[:3]}")
    return train_manifest, eval_manifest

"""Rollout-evaluation protocol: MSE tables, horizon curves, radar ratios.

The squared-error reduction is defined once: every included (episode,
step, dimension) cell contributes one squared error, the per-horizon
curve e[h] averages the cells at offset h, and the reported MSE is the
grand mean, i.e. the count-weighted mean of e[1..90].  For tasks with
equal dimension counts everywhere this is exactly the mean over
dimensions, then steps, then episodes.  Keypoint-reprojection episodes
are scored on normalized pixel dimensions only, restricted to steps
where the ground-truth keypoint is visible.

Episodes are reduced in sorted-episode-id order, so results do not
depend on input ordering or scheduling.
"""

import csv
import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from physbench.episodes import FORMAT_VERSION, Episode, read_prediction
from physbench.errors import FormatError, JoinError, ShapeMismatch, ZeroReference
from physbench.predictors.base import DEFAULT_CONDITION_STEPS, Predictor

DEFAULT_ROLLOUT_STEPS = 90


@dataclass
class EvalCell:
    predictor: str
    task_id: str
    episode_count: int
    condition_steps: int
    rollout_steps: int
    mse: float
    per_horizon: np.ndarray  # e[1..rollout]
    per_horizon_count: np.ndarray  # included cells behind each e[h]

    def to_dict(self) -> dict:
        return {
            "predictor": self.predictor,
            "task_id": self.task_id,
            "episode_count": self.episode_count,
            "condition_steps": self.condition_steps,
            "rollout_steps": self.rollout_steps,
            "mse": self.mse,
            "per_horizon": self.per_horizon.tolist(),
            "per_horizon_count": [int(c) for c in self.per_horizon_count],
        }

    @staticmethod
    def from_dict(data: dict) -> "EvalCell":
        return EvalCell(
            predictor=data["predictor"],
            task_id=data["task_id"],
            episode_count=int(data["episode_count"]),
            condition_steps=int(data["condition_steps"]),
            rollout_steps=int(data["rollout_steps"]),
            mse=float(data["mse"]),
            per_horizon=np.asarray(data["per_horizon"], dtype=float),
            per_horizon_count=np.asarray(data["per_horizon_count"], dtype=float),
        )


def error_mask(episode: Episode, truth: np.ndarray) -> np.ndarray:
    """Which (step, dim) cells count; masks reprojection by visibility."""
    if not any(d.role == "pixel" for d in episode.layout.dims):
        return np.ones_like(truth)
    mask = np.zeros_like(truth)
    flags = {d.group: i for i, d in enumerate(episode.layout.dims) if d.role == "flag"}
    for i, dim in enumerate(episode.layout.dims):
        if dim.role == "pixel":
            mask[:, i] = truth[:, flags[dim.group]] == 1.0
    return mask


def _score_one(
    episode: Episode, predicted: np.ndarray, condition_steps: int, rollout_steps: int
) -> tuple[np.ndarray, np.ndarray]:
    total = episode.states.shape[0]
    if condition_steps + rollout_steps > total:
        raise ShapeMismatch(
            f"episode {episode.episode_id} has {total} states; need "
            f"{condition_steps} + {rollout_steps}"
        )
    expected = (rollout_steps, episode.layout.size)
    if predicted.shape != expected:
        raise ShapeMismatch(
            f"prediction grid {predicted.shape} does not match expected {expected} "
            f"for episode {episode.episode_id}"
        )
    truth = episode.states[condition_steps : condition_steps + rollout_steps]
    sq = (predicted - truth) ** 2
    mask = error_mask(episode, truth)
    return (sq * mask).sum(axis=1), mask.sum(axis=1)


def _reduce(
    pairs: list,
    predictor_name: str,
    task_id: str,
    condition_steps: int,
    rollout_steps: int,
) -> EvalCell:
    """pairs: [(episode, predicted grid)], reduced in sorted-id order."""
    sums = np.zeros(rollout_steps)
    counts = np.zeros(rollout_steps)
    for episode, predicted in sorted(pairs, key=lambda p: p[0].episode_id):
        s, c = _score_one(episode, predicted, condition_steps, rollout_steps)
        sums += s
        counts += c
    per_h = np.where(counts > 0, sums / np.maximum(counts, 1.0), 0.0)
    total_count = counts.sum()
    mse = float(sums.sum() / total_count) if total_count > 0 else 0.0
    return EvalCell(
        predictor=predictor_name,
        task_id=task_id,
        episode_count=len(pairs),
        condition_steps=condition_steps,
        rollout_steps=rollout_steps,
        mse=mse,
        per_horizon=per_h,
        per_horizon_count=counts,
    )


def _common_task_id(episodes: list) -> str:
    task_ids = {ep.task_id for ep in episodes}
    if len(task_ids) != 1:
        raise JoinError(f"evaluation set mixes tasks: {sorted(task_ids)}")
    return task_ids.pop()


def evaluate(
    predictor: Predictor,
    episodes: list,
    condition_steps: int = DEFAULT_CONDITION_STEPS,
    rollout_steps: int = DEFAULT_ROLLOUT_STEPS,
) -> EvalCell:
    if not episodes:
        raise JoinError("evaluation set is empty")
    task_id = _common_task_id(episodes)
    pairs = []
    for ep in episodes:
        record = predictor.predict(ep, condition_steps, rollout_steps)
        pairs.append((ep, record.states))
    return _reduce(pairs, predictor.name, task_id, condition_steps, rollout_steps)


def score_records(
    records: list,
    episodes: list,
    condition_steps: int = DEFAULT_CONDITION_STEPS,
    rollout_steps: int = DEFAULT_ROLLOUT_STEPS,
) -> EvalCell:
    """Score externally produced prediction records against an eval set."""
    if not episodes:
        raise JoinError("evaluation set is empty")
    task_id = _common_task_id(episodes)
    by_id: dict = {}
    names = set()
    for rec in records:
        if rec.episode_id in by_id:
            raise JoinError(f"duplicate prediction for episode {rec.episode_id}")
        by_id[rec.episode_id] = rec
        names.add(rec.predictor)
    if len(names) > 1:
        raise JoinError(f"prediction set mixes predictors: {sorted(names)}")
    pairs = []
    for ep in episodes:
        rec = by_id.get(ep.episode_id)
        if rec is None:
            raise JoinError(f"no prediction record for episode {ep.episode_id}")
        if rec.condition_steps != condition_steps:
            raise JoinError(
                f"episode {ep.episode_id}: prediction conditioned on "
                f"{rec.condition_steps} steps, expected {condition_steps}"
            )
        pairs.append((ep, rec.states))
    name = names.pop() if names else "external"
    return _reduce(pairs, name, task_id, condition_steps, rollout_steps)


def score_external(
    prediction_dir: str,
    episodes: list,
    condition_steps: int = DEFAULT_CONDITION_STEPS,
    rollout_steps: int = DEFAULT_ROLLOUT_STEPS,
) -> EvalCell:
    """Same math path as evaluate, fed from prediction files."""
    if not os.path.isdir(prediction_dir):
        raise FormatError(f"prediction directory {prediction_dir} does not exist")
    records = []
    for fname in sorted(os.listdir(prediction_dir)):
        if fname.endswith(".json"):
            records.append(read_prediction(os.path.join(prediction_dir, fname)))
    return score_records(records, episodes, condition_steps, rollout_steps)


def horizon_curve(cell: EvalCell) -> list:
    """(h, e[h]) pairs, h = 1..rollout_steps."""
    return [(h + 1, float(cell.per_horizon[h])) for h in range(cell.rollout_steps)]


def radar_ratios(cells: list, reference: str) -> dict:
    """Per-task error ratios against a reference predictor, normalized so
    the worst predictor on each task scores exactly 1."""
    tasks = sorted({c.task_id for c in cells})
    predictors = sorted({c.predictor for c in cells})
    if reference not in predictors:
        raise JoinError(f"reference predictor '{reference}' has no cells")
    mse: dict = {}
    for c in cells:
        mse[(c.predictor, c.task_id)] = c.mse
    for p in predictors:
        for t in tasks:
            if (p, t) not in mse:
                raise JoinError(f"missing cell ({p}, {t}) in radar input")
    ratios = {}
    for t in tasks:
        ref = mse[(reference, t)]
        if ref == 0.0:
            raise ZeroReference(f"reference '{reference}' has zero error on task {t}")
        ratios[t] = {p: mse[(p, t)] / ref for p in predictors}
    normalized = {}
    for t in tasks:
        worst = max(ratios[t].values())
        normalized[t] = {p: ratios[t][p] / worst for p in predictors}
    return {
        "reference": reference,
        "tasks": tasks,
        "predictors": predictors,
        "ratios": ratios,
        "normalized": normalized,
    }


def write_report(cells: list, out_dir: str, ratios: Optional[dict] = None) -> str:
    """Emit report.json, table.csv, and one curve CSV per cell."""
    os.makedirs(out_dir, exist_ok=True)
    payload = {
        "format_version": FORMAT_VERSION,
        "cells": [c.to_dict() for c in cells],
    }
    if ratios is not None:
        payload["radar"] = ratios
    report_path = os.path.join(out_dir, "report.json")
    with open(report_path, "w", encoding="ascii") as fh:
        fh.write(json.dumps(payload, indent=2, allow_nan=False) + "\n")
    tasks = sorted({c.task_id for c in cells})
    predictors = sorted({c.predictor for c in cells})
    by_key = {(c.predictor, c.task_id): c for c in cells}
    with open(os.path.join(out_dir, "table.csv"), "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["predictor"] + tasks)
        for p in predictors:
            row = [p]
            for t in tasks:
                cell = by_key.get((p, t))
                row.append(repr(cell.mse) if cell is not None else "")
            writer.writerow(row)
    for c in cells:
        curve_path = os.path.join(out_dir, f"curve_{c.task_id}_{c.predictor}.csv")
        with open(curve_path, "w", encoding="ascii", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["horizon", "mse"])
            for h, e in horizon_curve(c):
                writer.writerow([h, repr(e)])
    return report_path


def write_radar_csv(ratios: dict, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["predictor"] + ratios["tasks"])
        for p in ratios["predictors"]:
            writer.writerow([p] + [repr(ratios["normalized"][t][p]) for t in ratios["tasks"]])


def load_report(path: str) -> list:
    try:
        with open(path, encoding="ascii") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise FormatError(f"cannot parse report {path}: {exc}") from exc
    if data.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported report format_version {data.get('format_version')}")
    return [EvalCell.from_dict(c) for c in data["cells"]]

"""Pydantic request/response models for the service endpoints.

Paths in requests are server-local: the service operates on its own
filesystem and returns the artifacts it wrote.
"""

from typing import Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class GenerateRequest(BaseModel):
    task: str
    count: int = Field(ge=0)
    seed: int = 0
    out_dir: str
    dt: float = 0.02
    steps: int = 100
    ranges: dict[str, tuple[float, float]] = {}
    split: str = "train"
    eval_count: Optional[int] = Field(default=None, ge=0)
    eval_ranges: Optional[dict[str, tuple[float, float]]] = None
    eval_seed_start: Optional[int] = None
    jobs: int = Field(default=1, ge=1)
    overwrite: bool = False


class ManifestSummary(BaseModel):
    path: str
    count: int
    split: str
    episode_ids: list[str]


class GenerateResponse(BaseModel):
    manifests: list[ManifestSummary]
    failures: list[str] = []


class FitRequest(BaseModel):
    predictor: str  # "linear" or "mlp"
    data_dir: str
    out_path: str
    epochs: int = Field(default=50, ge=1)
    batch: int = Field(default=256, ge=1)
    seed: int = 0
    ridge: float = 1e-6
    hidden: int = Field(default=64, ge=1)
    learning_rate: float = 1e-3
    overwrite: bool = False


class FitResponse(BaseModel):
    model_path: str
    predictor: str
    train_episodes: int
    final_loss: Optional[float] = None


class PredictRequest(BaseModel):
    predictor: str
    model_path: Optional[str] = None
    data_dir: str
    out_dir: str
    condition_steps: int = Field(default=10, ge=1)
    rollout_steps: Optional[int] = Field(default=None, ge=1)
    overwrite: bool = False


class PredictResponse(BaseModel):
    prediction_files: int
    out_dir: str


class EvaluateRequest(BaseModel):
    predictors: list[str] = []  # names, optionally "name=model_path"
    predictions_dir: Optional[str] = None  # external records instead
    data_dirs: list[str]
    condition_steps: int = Field(default=10, ge=1)
    rollout_steps: int = Field(default=90, ge=1)
    reference: Optional[str] = None
    out_dir: Optional[str] = None
    overwrite: bool = False


class CellModel(BaseModel):
    predictor: str
    task_id: str
    episode_count: int
    condition_steps: int
    rollout_steps: int
    mse: float
    per_horizon: list[float]
    per_horizon_count: list[int]


class EvaluateResponse(BaseModel):
    cells: list[CellModel]
    report_path: Optional[str] = None
    radar: Optional[dict] = None


class CurveRequest(BaseModel):
    report_path: str
    task: str
    predictor: str
    out_path: Optional[str] = None


class CurveResponse(BaseModel):
    horizons: list[int]
    errors: list[float]
    out_path: Optional[str] = None


class RadarRequest(BaseModel):
    report_path: str
    reference: str
    out_path: Optional[str] = None


class RadarResponse(BaseModel):
    reference: str
    tasks: list[str]
    predictors: list[str]
    normalized: dict[str, dict[str, float]]
    out_path: Optional[str] = None


class CheckModel(BaseModel):
    name: str
    passed: bool
    detail: str


class SelftestResponse(BaseModel):
    ok: bool
    checks: list[CheckModel]


class TaskCatalogResponse(BaseModel):
    tasks: dict[str, dict]

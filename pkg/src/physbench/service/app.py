"""FastAPI application wrapping the core library."""

import os

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

import physbench
from physbench.episodes import generate_dataset, load_dataset, split_ood, write_prediction
from physbench.errors import (
    ConfigError,
    FormatError,
    InvalidRange,
    JoinError,
    PhysbenchError,
    ShapeMismatch,
    ZeroReference,
)
from physbench.harness import (
    evaluate,
    horizon_curve,
    load_report,
    radar_ratios,
    score_external,
    write_radar_csv,
    write_report,
)
from physbench.predictors import (
    BUILTIN_PREDICTORS,
    fit_linear,
    fit_neural_derivative,
    load_predictor,
    make_builtin,
    save_predictor,
)
from physbench.service import schemas
from physbench.tasks import catalog, make_spec
from physbench.selftest import run_all

# user-input problems map to 400 (CLI exit 1); runtime failures to 500 (exit 2)
_CLIENT_ERRORS = (ConfigError, InvalidRange, FormatError, JoinError, ShapeMismatch, ZeroReference)


def _resolve_predictor(token: str):
    """A predictor token is a built-in name or 'name=model.json'."""
    if "=" in token:
        name, path = token.split("=", 1)
        predictor = load_predictor(path)
        if predictor.name != name:
            raise ConfigError(f"model file {path} holds a '{predictor.name}', not '{name}'")
        return predictor
    if token in BUILTIN_PREDICTORS:
        return make_builtin(token)
    raise ConfigError(
        f"predictor '{token}' is not built in ({', '.join(BUILTIN_PREDICTORS)}); "
        "fitted predictors need '<name>=<model.json>'"
    )


def _guard_overwrite(path: str, overwrite: bool) -> None:
    if os.path.exists(path) and not overwrite:
        raise ConfigError(f"{path} exists; pass overwrite to replace it")


def create_app() -> FastAPI:
    app = FastAPI(title="physbench service", version=physbench.__version__)

    @app.exception_handler(PhysbenchError)
    async def physbench_error_handler(request: Request, exc: PhysbenchError):
        status = 400 if isinstance(exc, _CLIENT_ERRORS) else 500
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=physbench.__version__)

    @app.get("/tasks", response_model=schemas.TaskCatalogResponse)
    def tasks():
        return schemas.TaskCatalogResponse(tasks=catalog())

    @app.post("/datasets/generate", response_model=schemas.GenerateResponse)
    def datasets_generate(req: schemas.GenerateRequest):
        spec = make_spec(req.task, dt=req.dt, horizon=req.steps, range_overrides=req.ranges)
        manifests = []
        failures = []
        if req.eval_count is not None:
            train_m, eval_m = split_ood(
                spec,
                dict(req.ranges),
                dict(req.eval_ranges if req.eval_ranges is not None else req.ranges),
                req.count,
                req.eval_count,
                req.seed,
                req.out_dir,
                jobs=req.jobs,
                overwrite=req.overwrite,
                eval_seed_start=req.eval_seed_start,
            )
            for sub, manifest in (("train", train_m), ("eval", eval_m)):
                manifests.append(
                    schemas.ManifestSummary(
                        path=os.path.join(req.out_dir, sub, "manifest.json"),
                        count=manifest.count,
                        split=manifest.split,
                        episode_ids=[e["episode_id"] for e in manifest.episodes],
                    )
                )
        else:
            manifest, gen_failures = generate_dataset(
                spec,
                req.count,
                req.seed,
                req.out_dir,
                split=req.split,
                jobs=req.jobs,
                overwrite=req.overwrite,
            )
            failures = [f"episode {f.index}: {f.error}" for f in gen_failures]
            manifests.append(
                schemas.ManifestSummary(
                    path=os.path.join(req.out_dir, "manifest.json"),
                    count=manifest.count,
                    split=manifest.split,
                    episode_ids=[e["episode_id"] for e in manifest.episodes],
                )
            )
        return schemas.GenerateResponse(manifests=manifests, failures=failures)

    @app.post("/fit", response_model=schemas.FitResponse)
    def fit(req: schemas.FitRequest):
        _guard_overwrite(req.out_path, req.overwrite)
        episodes, _ = load_dataset(req.data_dir)
        if req.predictor == "linear":
            predictor = fit_linear(episodes, ridge=req.ridge)
            final_loss = None
        elif req.predictor == "mlp":
            predictor = fit_neural_derivative(
                episodes,
                epochs=req.epochs,
                batch=req.batch,
                seed=req.seed,
                hidden=req.hidden,
                lr=req.learning_rate,
            )
            final_loss = predictor.final_loss
        else:
            raise ConfigError(f"cannot fit '{req.predictor}'; choose linear or mlp")
        save_predictor(predictor, req.out_path)
        return schemas.FitResponse(
            model_path=req.out_path,
            predictor=req.predictor,
            train_episodes=len(episodes),
            final_loss=final_loss,
        )

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict(req: schemas.PredictRequest):
        token = req.predictor if req.model_path is None else f"{req.predictor}={req.model_path}"
        predictor = _resolve_predictor(token)
        episodes, manifest = load_dataset(req.data_dir)
        os.makedirs(req.out_dir, exist_ok=True)
        count = 0
        for entry, ep in zip(manifest["episodes"], episodes):
            record = predictor.predict(ep, req.condition_steps, req.rollout_steps)
            path = os.path.join(req.out_dir, f"pred_{entry['index']:05d}_{ep.episode_id[:12]}.json")
            _guard_overwrite(path, req.overwrite)
            write_prediction(record, path)
            count += 1
        return schemas.PredictResponse(prediction_files=count, out_dir=req.out_dir)

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate_endpoint(req: schemas.EvaluateRequest):
        if bool(req.predictors) == (req.predictions_dir is not None):
            raise ConfigError("provide either predictors or predictions_dir, not both or neither")
        cells = []
        for data_dir in req.data_dirs:
            episodes, _ = load_dataset(data_dir)
            if req.predictions_dir is not None:
                cells.append(
                    score_external(
                        req.predictions_dir, episodes, req.condition_steps, req.rollout_steps
                    )
                )
            else:
                for token in req.predictors:
                    predictor = _resolve_predictor(token)
                    cells.append(
                        evaluate(predictor, episodes, req.condition_steps, req.rollout_steps)
                    )
        radar = None
        if req.reference is not None:
            radar = radar_ratios(cells, req.reference)
        report_path = None
        if req.out_dir is not None:
            _guard_overwrite(os.path.join(req.out_dir, "report.json"), req.overwrite)
            report_path = write_report(cells, req.out_dir, ratios=radar)
            if radar is not None:
                write_radar_csv(radar, os.path.join(req.out_dir, "radar.csv"))
        return schemas.EvaluateResponse(
            cells=[schemas.CellModel(**c.to_dict()) for c in cells],
            report_path=report_path,
            radar=radar,
        )

    @app.post("/reports/curve", response_model=schemas.CurveResponse)
    def curve(req: schemas.CurveRequest):
        cells = load_report(req.report_path)
        match = [c for c in cells if c.task_id == req.task and c.predictor == req.predictor]
        if not match:
            raise JoinError(f"no cell for task '{req.task}' and predictor '{req.predictor}'")
        pairs = horizon_curve(match[0])
        out_path = None
        if req.out_path is not None:
            import csv

            with open(req.out_path, "w", encoding="ascii", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["horizon", "mse"])
                for h, e in pairs:
                    writer.writerow([h, repr(e)])
            out_path = req.out_path
        return schemas.CurveResponse(
            horizons=[h for h, _ in pairs], errors=[e for _, e in pairs], out_path=out_path
        )

    @app.post("/reports/radar", response_model=schemas.RadarResponse)
    def radar(req: schemas.RadarRequest):
        cells = load_report(req.report_path)
        table = radar_ratios(cells, req.reference)
        out_path = None
        if req.out_path is not None:
            write_radar_csv(table, req.out_path)
            out_path = req.out_path
        return schemas.RadarResponse(
            reference=table["reference"],
            tasks=table["tasks"],
            predictors=table["predictors"],
            normalized=table["normalized"],
            out_path=out_path,
        )

    @app.post("/selftest", response_model=schemas.SelftestResponse)
    def selftest():
        results = run_all()
        return schemas.SelftestResponse(
            ok=all(r.passed for r in results),
            checks=[
                schemas.CheckModel(name=r.name, passed=r.passed, detail=r.detail)
                for r in results
            ],
        )

    return app

"""Thin command-line client for the service.

Every subcommand serializes its flags into a request and sends it through
the service layer: a remote server when --server is given, otherwise an
in-process application over the same HTTP/JSON path.  Exit codes: 0 on
success, 1 for validation errors, 2 for runtime failures.
"""

import json
import sys

import click

from physbench.service.client import ServiceClient


def _parse_range(_ctx, _param, values):
    out = {}
    for item in values:
        try:
            key, bounds = item.split("=", 1)
            lo, hi = bounds.split(":", 1)
            out[key] = (float(lo), float(hi))
        except ValueError:
            raise click.BadParameter(f"expected key=lo:hi, got '{item}'")
    return out


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise click.ClickException(f"config {path} must hold a JSON object")
    return cfg


def _merge(config, **flag_values):
    """Config supplies defaults; explicitly passed flags win."""
    merged = {}
    for key, (value, provided) in flag_values.items():
        if provided or key not in config:
            merged[key] = value
        else:
            merged[key] = config[key]
    return merged


def _provided(ctx, name):
    return ctx.get_parameter_source(name) == click.core.ParameterSource.COMMANDLINE


def _run(ctx, method, path, payload=None):
    client = ServiceClient(ctx.obj.get("server"))
    try:
        status, body = client.request(method, path, payload)
    except Exception as exc:  # connection-level failure
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if status >= 500:
        click.echo(f"error: {body.get('detail', body)}", err=True)
        sys.exit(2)
    if status >= 400:
        detail = body.get("detail", body)
        click.echo(f"invalid request: {detail}", err=True)
        sys.exit(1)
    return body


@click.group()
@click.option("--server", default=None, help="Service URL; default runs in-process.")
@click.option("--config", "config_path", default=None, type=click.Path(), help="JSON config file with flag names as keys; explicit flags win.")
@click.pass_context
def main(ctx, server, config_path):
    """Deterministic physics episodes, baseline predictors, rollout scoring."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server
    ctx.obj["config"] = _load_config(config_path)


@main.command()
@click.option("--task", required=True, help="Task id (see `physbench tasks`).")
@click.option("--count", default=100, show_default=True, help="Episodes to generate (train block when --eval-count is set).")
@click.option("--seed", default=0, show_default=True, help="Base seed; episode i uses a derived child seed.")
@click.option("--dt", default=0.02, show_default=True, help="Integration step (seconds).")
@click.option("--steps", default=100, show_default=True, help="Episode length T (steps); files hold T+1 states.")
@click.option("--range", "ranges", multiple=True, callback=_parse_range, help="Sampling override key=lo:hi (repeatable); drives OOD splits.")
@click.option("--split", default="train", show_default=True, help="Split label recorded in the manifest.")
@click.option("--eval-count", default=None, type=int, help="Also generate an eval split of this size (disjoint seeds).")
@click.option("--eval-range", "eval_ranges", multiple=True, callback=_parse_range, help="Eval-split override key=lo:hi (repeatable); may lie outside --range.")
@click.option("--eval-seed-start", default=None, type=int, help="First eval seed index; defaults to just after the train block.")
@click.option("--out", required=True, help="Output dataset directory.")
@click.option("--jobs", default=1, show_default=True, help="Parallel generation workers; results identical for any value.")
@click.option("--overwrite", is_flag=True, help="Replace existing outputs.")
@click.pass_context
def gen(ctx, task, count, seed, dt, steps, ranges, split, eval_count, eval_ranges,
        eval_seed_start, out, jobs, overwrite):
    """Generate a seeded episode dataset (optionally a train/eval split)."""
    cfg = ctx.obj["config"]
    payload = _merge(
        cfg,
        task=(task, True),
        count=(count, _provided(ctx, "count")),
        seed=(seed, _provided(ctx, "seed")),
        dt=(dt, _provided(ctx, "dt")),
        steps=(steps, _provided(ctx, "steps")),
        split=(split, _provided(ctx, "split")),
        jobs=(jobs, _provided(ctx, "jobs")),
    )
    payload["ranges"] = {k: list(v) for k, v in ranges.items()} or cfg.get("ranges", {})
    payload["out_dir"] = out
    payload["overwrite"] = overwrite
    if eval_count is not None:
        payload["eval_count"] = eval_count
        payload["eval_ranges"] = {k: list(v) for k, v in eval_ranges.items()} or None
        payload["eval_seed_start"] = eval_seed_start
    body = _run(ctx, "POST", "/datasets/generate", payload)
    for m in body["manifests"]:
        click.echo(f"wrote {m['count']} episodes ({m['split']}) -> {m['path']}")
    for failure in body["failures"]:
        click.echo(f"skipped: {failure}", err=True)


@main.command()
@click.option("--predictor", required=True, type=click.Choice(["linear", "mlp"]), help="Model family to fit.")
@click.option("--data", "data_dir", required=True, help="Training dataset directory.")
@click.option("--out", required=True, help="Output model file (JSON).")
@click.option("--epochs", default=50, show_default=True, help="Training epochs (mlp).")
@click.option("--batch", default=256, show_default=True, help="Mini-batch size (mlp).")
@click.option("--seed", default=0, show_default=True, help="Init/shuffle seed (mlp).")
@click.option("--ridge", default=1e-6, show_default=True, help="Ridge strength (linear).")
@click.option("--hidden", default=64, show_default=True, help="Hidden width (mlp).")
@click.option("--learning-rate", default=1e-3, show_default=True, help="Adam learning rate (mlp).")
@click.option("--overwrite", is_flag=True, help="Replace an existing model file.")
@click.pass_context
def fit(ctx, predictor, data_dir, out, epochs, batch, seed, ridge, hidden, learning_rate, overwrite):
    """Fit a baseline predictor on a dataset and save it."""
    payload = {
        "predictor": predictor,
        "data_dir": data_dir,
        "out_path": out,
        "epochs": epochs,
        "batch": batch,
        "seed": seed,
        "ridge": ridge,
        "hidden": hidden,
        "learning_rate": learning_rate,
        "overwrite": overwrite,
    }
    body = _run(ctx, "POST", "/fit", payload)
    msg = f"fitted {body['predictor']} on {body['train_episodes']} episodes -> {body['model_path']}"
    if body.get("final_loss") is not None:
        msg += f" (final loss {body['final_loss']:.6g})"
    click.echo(msg)


@main.command()
@click.option("--predictor", required=True, help="oracle | zoh | constvel | linear | mlp (fitted ones need --model).")
@click.option("--model", "model_path", default=None, help="Model file for fitted predictors.")
@click.option("--data", "data_dir", required=True, help="Dataset directory to predict on.")
@click.option("--out", required=True, help="Directory for prediction record files.")
@click.option("--condition-steps", default=10, show_default=True, help="Ground-truth warm-up states handed to the predictor.")
@click.option("--rollout-steps", default=None, type=int, help="Imagined steps; default covers the rest of the episode.")
@click.option("--overwrite", is_flag=True, help="Replace existing prediction files.")
@click.pass_context
def predict(ctx, predictor, model_path, data_dir, out, condition_steps, rollout_steps, overwrite):
    """Write one prediction record file per episode."""
    payload = {
        "predictor": predictor,
        "model_path": model_path,
        "data_dir": data_dir,
        "out_dir": out,
        "condition_steps": condition_steps,
        "rollout_steps": rollout_steps,
        "overwrite": overwrite,
    }
    body = _run(ctx, "POST", "/predict", payload)
    click.echo(f"wrote {body['prediction_files']} prediction files -> {body['out_dir']}")


@main.command(name="eval")
@click.option("--predictor", "predictors", multiple=True, help="Predictor to score (repeatable); fitted ones as name=model.json.")
@click.option("--predictions", "predictions_dir", default=None, help="Score externally produced prediction files instead.")
@click.option("--data", "data_dirs", multiple=True, required=True, help="Evaluation dataset directory (repeatable, one per task).")
@click.option("--condition-steps", default=10, show_default=True, help="Ground-truth warm-up states.")
@click.option("--rollout-steps", default=90, show_default=True, help="Imagined steps scored.")
@click.option("--reference", default=None, help="Reference predictor for the radar ratio table.")
@click.option("--out", default=None, help="Report directory (report.json, table.csv, curves, radar.csv).")
@click.option("--overwrite", is_flag=True, help="Replace an existing report.")
@click.pass_context
def eval_cmd(ctx, predictors, predictions_dir, data_dirs, condition_steps, rollout_steps,
             reference, out, overwrite):
    """Score predictors (MSE over the imagined rollout) on eval datasets."""
    payload = {
        "predictors": list(predictors),
        "predictions_dir": predictions_dir,
        "data_dirs": list(data_dirs),
        "condition_steps": condition_steps,
        "rollout_steps": rollout_steps,
        "reference": reference,
        "out_dir": out,
        "overwrite": overwrite,
    }
    body = _run(ctx, "POST", "/evaluate", payload)
    for cell in body["cells"]:
        click.echo(
            f"{cell['predictor']:>10s}  {cell['task_id']:<18s} "
            f"episodes={cell['episode_count']:<4d} mse={cell['mse']!r}"
        )
    if body.get("report_path"):
        click.echo(f"report -> {body['report_path']}")


@main.command()
@click.option("--report", "report_path", required=True, help="report.json produced by eval.")
@click.option("--task", required=True, help="Task id of the curve.")
@click.option("--predictor", required=True, help="Predictor name of the curve.")
@click.option("--out", default=None, help="CSV output path; default prints to stdout.")
@click.pass_context
def curve(ctx, report_path, task, predictor, out):
    """Per-horizon error curve e[h] for one (task, predictor) cell."""
    payload = {"report_path": report_path, "task": task, "predictor": predictor, "out_path": out}
    body = _run(ctx, "POST", "/reports/curve", payload)
    if out is None:
        click.echo("horizon,mse")
        for h, e in zip(body["horizons"], body["errors"]):
            click.echo(f"{h},{e!r}")
    else:
        click.echo(f"curve -> {body['out_path']}")


@main.command()
@click.option("--report", "report_path", required=True, help="report.json produced by eval.")
@click.option("--reference", required=True, help="Reference predictor for the ratios.")
@click.option("--out", default=None, help="CSV output path; default prints to stdout.")
@click.pass_context
def radar(ctx, report_path, reference, out):
    """Normalized error-ratio table (worst predictor per task scores 1)."""
    payload = {"report_path": report_path, "reference": reference, "out_path": out}
    body = _run(ctx, "POST", "/reports/radar", payload)
    if out is None:
        header = "predictor," + ",".join(body["tasks"])
        click.echo(header)
        for p in body["predictors"]:
            cells = ",".join(repr(body["normalized"][t][p]) for t in body["tasks"])
            click.echo(f"{p},{cells}")
    else:
        click.echo(f"radar -> {body['out_path']}")


@main.command()
@click.pass_context
def selftest(ctx):
    """Run the conservation/closed-form invariant suite."""
    body = _run(ctx, "POST", "/selftest", {})
    for check in body["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(f"[{status}] {check['name']}: {check['detail']}")
    if not body["ok"]:
        sys.exit(2)


@main.command()
@click.pass_context
def tasks(ctx):
    """List the task catalog."""
    body = _run(ctx, "GET", "/tasks")
    for task_id, info in body["tasks"].items():
        click.echo(
            f"{task_id:<18s} D={info['state_dim']:<3d} A={info['action_dim']} "
            f"dt={info['default_dt']} T={info['default_horizon']}"
        )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8800, show_default=True)
def serve(host, port):
    """Run the service under uvicorn."""
    import uvicorn

    from physbench.service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()

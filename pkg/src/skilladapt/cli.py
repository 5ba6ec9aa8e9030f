"""Command line entry points: a scenario runner for headless experiments
and a serve command that brings up the engine plus the bridge."""

from __future__ import annotations

import csv
import json
import os
import sys
from pathlib import Path

import click

from .demo_data import arc_demo_set
from .engine import Engine, EngineConfig
from .errors import SkillError
from .gateway import HttpBackend, ToolCall, dispatch, mock_backend
from .kmp import Demonstration

LLM_URL_ENV = "SKILLADAPT_LLM_URL"


def _make_engine(config_path=None, mock_llm=False, seed=0) -> Engine:
    cfg = EngineConfig(seed=seed)
    if config_path:
        data = json.loads(Path(config_path).read_text())
        for key, value in data.items():
            if hasattr(cfg, key):
                setattr(cfg, key, value)
    backend = None
    url = os.environ.get(LLM_URL_ENV)
    if url and not mock_llm:
        backend = HttpBackend(url)
    else:
        backend = mock_backend
    return Engine(cfg, backend=backend)


@click.group()
def main():
    """Skill adaptation toolkit."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True)
@click.option("--config", type=click.Path(exists=True), default=None,
              help="JSON file overriding engine defaults.")
@click.option("--mock-llm", is_flag=True,
              help="Use the offline rule-based chat backend.")
@click.option("--synthetic-demos", is_flag=True,
              help="Fit a model from built-in synthetic demonstrations.")
def serve(host, port, config, mock_llm, synthetic_demos):
    """Run the engine with the WebSocket bridge."""
    from .bridge import serve as bridge_serve

    engine = _make_engine(config, mock_llm)
    if synthetic_demos:
        for i, demo in enumerate(arc_demo_set(seed=engine.config.seed)):
            engine.add_demonstration(f"synthetic_{i}", demo)
        engine.fit()
    try:
        bridge_serve(engine, host=host, port=port)
    except SkillError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(1)


def _export_trajectory(engine: Engine, path: Path):
    traj = engine.model.sample_trajectory(
        engine.config.n_reference_points, engine.profile)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "s", "x", "y", "z", "qw", "qx", "qy", "qz"])
        for p in traj.points:
            writer.writerow([f"{p.t:.9f}", f"{p.s:.9f}"]
                            + [f"{x:.9f}" for x in p.pose])


def _export_metrics(engine: Engine, path: Path):
    metrics = {
        "n_via_points": len(engine.model.via_points)
        if engine.model else 0,
        "profile": {
            "knots": [float(k) for k in engine.profile.knots],
            "factors": [float(f) for f in engine.profile.factors],
            "total_duration": float(engine.profile.total_duration()),
        },
        "coverage_metric": float(engine.ergodic_state.metric()),
        # wall_time_s omitted: exports must be byte-identical under a seed
        "dispatch_records": [
            {k: v for k, v in r.to_dict().items() if k != "wall_time_s"}
            for r in engine.session.records],
        "n_statuses": len(engine.last_statuses),
    }
    path.write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n")


def _run_step(engine: Engine, action: str, args: dict, out_dir: Path):
    if action == "fit":
        if args.get("synthetic", False):
            k = int(args.get("k", 3))
            for i, demo in enumerate(
                    arc_demo_set(k=k, seed=engine.config.seed)):
                engine.add_demonstration(f"synthetic_{i}", demo)
        for name, demo_path in args.get("demos", {}).items():
            engine.add_demonstration(name, Demonstration.load(demo_path))
        engine.fit()
    elif action == "execute":
        engine.execute_blocking()
    elif action == "tool_call":
        call = ToolCall(args["tool"], args.get("args", {}), origin="scenario")
        record = dispatch(engine.registry, call, engine)
        if record.outcome != "applied":
            raise SkillError(f"{call.tool} rejected: {record.reason}")
    elif action == "set_hid_enabled":
        engine.set_hid_enabled(bool(args.get("enabled", True)))
    elif action == "inject_wrench":
        engine.inject_wrench(args["wrench"], args["duration_s"],
                             now=args.get("at", 0.0))
    elif action == "export":
        what = args.get("what", "trajectory")
        path = out_dir / args.get("path", f"{what}.csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        if what == "trajectory":
            _export_trajectory(engine, path)
        elif what == "metrics":
            _export_metrics(engine, path)
        else:
            raise SkillError(f"unknown export kind {what!r}")
    elif action == "serve":
        from .bridge import serve as bridge_serve
        bridge_serve(engine, host=args.get("host", "127.0.0.1"),
                     port=args.get("port", 8765))
    else:
        raise SkillError(f"unknown action {action!r}")


@main.command()
@click.argument("scenario", type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
def run(scenario, seed, out_dir):
    """Execute a JSON scenario file step by step."""
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    data = json.loads(Path(scenario).read_text())
    steps = data.get("steps", [])
    engine = _make_engine(mock_llm=True, seed=seed)
    for i, step in enumerate(steps):
        action = step.get("action", "")
        try:
            _run_step(engine, action, step.get("args", {}), out_path)
        except (SkillError, KeyError, ValueError, OSError) as e:
            click.echo(f"step {i} ({action}) failed: {e}", err=True)
            sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()

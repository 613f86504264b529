"""Command-line entry points: run missions, sweep seeds, serve the API."""

from __future__ import annotations

import argparse
import json
import sys
import threading
from pathlib import Path

from .campaign import run_campaign, write_csv
from .mission import GroundControl
from .scenario import ScenarioConfig, load_scenario, preset, preset_names, save_scenario
from .simloop import run_scenario


def _load_cfg(args) -> ScenarioConfig:
    if getattr(args, "scenario", None):
        return load_scenario(Path(args.scenario))
    if getattr(args, "preset", None):
        try:
            return preset(args.preset)
        except KeyError as exc:
            raise SystemExit(exc.args[0])
    raise SystemExit("specify --preset or --scenario")


def _cmd_presets(_args) -> int:
    for name in preset_names():
        cfg = preset(name)
        print(f"{name:20s} {cfg.vehicle.name:3s} {cfg.mode:10s} "
              f"{len(cfg.tags) + len(cfg.pending_tags)} tags  {cfg.description}")
    return 0


def _print_result(result) -> None:
    rate = f"{result.n_detected}/{result.n_tags}"
    print(f"mission {result.mission_id}: completed={result.completed} "
          f"landed={result.landed} sim_time={result.sim_time_s:.1f}s "
          f"detected {rate}")
    for epc, ok in result.detected.items():
        if ok:
            t = result.time_to_read_s[epc]
            readings = result.sensor_values.get(epc) or {}
            extra = "  ".join(f"{k}={v:g}" for k, v in readings.items())
            print(f"  {epc}  read at {t:7.1f}s  {extra}".rstrip())
        else:
            print(f"  {epc}  not detected")


def _cmd_run(args) -> int:
    cfg = _load_cfg(args)
    result = run_scenario(cfg, args.seed,
                          log_dir=Path(args.log_dir) if args.log_dir else None)
    _print_result(result)
    if args.json:
        payload = {
            "mission_id": result.mission_id, "scenario": result.scenario,
            "seed": result.seed, "sim_time_s": result.sim_time_s,
            "completed": result.completed, "landed": result.landed,
            "detected": result.detected, "time_to_read_s": result.time_to_read_s,
            "sensor_values": result.sensor_values,
            "detection_rate": result.detection_rate,
        }
        Path(args.json).write_text(json.dumps(payload, indent=2))
        print(f"wrote {args.json}")
    return 0


def _cmd_montecarlo(args) -> int:
    cfg = _load_cfg(args)
    seeds = list(range(args.seed_base, args.seed_base + args.runs))

    def progress(seed, result):
        print(f"  seed {seed:5d}: {result.n_detected}/{result.n_tags} "
              f"in {result.sim_time_s:.0f}s", file=sys.stderr)

    summary, rows = run_campaign(
        cfg, seeds, log_dir=Path(args.log_dir) if args.log_dir else None,
        progress=progress if args.verbose else None)
    print(f"{summary.scenario}: {summary.n_detected}/{summary.n_tag_trials} tags "
          f"over {summary.n_runs} runs  rate={summary.detection_rate:.3f} "
          f"(95% CI {summary.wilson_low:.3f}–{summary.wilson_high:.3f})  "
          f"mean mission {summary.mean_mission_s:.0f}s")
    if args.csv:
        write_csv(rows, Path(args.csv))
        print(f"wrote {args.csv}")
    if args.json:
        Path(args.json).write_text(json.dumps(summary.to_dict(), indent=2))
        print(f"wrote {args.json}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import build_app

    cfg = _load_cfg(args)
    gcs = GroundControl(Path(args.log_dir) if args.log_dir else None)
    mission_id = f"{cfg.name}-{args.seed}"
    queues: dict[str, list] = {}
    if args.live:
        queues[mission_id] = []
        pace = 0.1 / max(args.rate, 1e-6)
        worker = threading.Thread(
            target=run_scenario,
            kwargs=dict(cfg=cfg, seed=args.seed, gcs=gcs, tick_sleep_s=pace,
                        operator_queue=queues[mission_id]),
            daemon=True)
        worker.start()
        print(f"live mission {mission_id} running at {args.rate:g}x")
    else:
        result = run_scenario(cfg, args.seed, gcs=gcs)
        _print_result(result)
    app = build_app(gcs, queues)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_export(args) -> int:
    cfg = preset(args.preset)
    out = Path(args.out or f"{cfg.name}.json")
    save_scenario(cfg, out)
    print(f"wrote {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tagbot",
        description="Simulated robotic search and interrogation of battery-free "
                    "field tags, with its ground-control API.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("presets", help="list built-in scenarios").set_defaults(func=_cmd_presets)

    def add_cfg_args(p):
        p.add_argument("--preset", help="built-in scenario name")
        p.add_argument("--scenario", help="scenario JSON file")
        p.add_argument("--log-dir", help="directory for mission logs")

    p_run = sub.add_parser("run", help="run one mission")
    add_cfg_args(p_run)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--json", help="write result JSON here")
    p_run.set_defaults(func=_cmd_run)

    p_mc = sub.add_parser("montecarlo", help="run a seed sweep and summarize")
    add_cfg_args(p_mc)
    p_mc.add_argument("--runs", type=int, default=20)
    p_mc.add_argument("--seed-base", type=int, default=0)
    p_mc.add_argument("--csv", help="write per-tag outcomes CSV here")
    p_mc.add_argument("--json", help="write summary JSON here")
    p_mc.add_argument("--verbose", action="store_true")
    p_mc.set_defaults(func=_cmd_montecarlo)

    p_serve = sub.add_parser("serve", help="serve the ground-control API")
    add_cfg_args(p_serve)
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--live", action="store_true",
                         help="run the mission paced in real time while serving")
    p_serve.add_argument("--rate", type=float, default=1.0,
                         help="live pacing multiplier (2 = twice real time)")
    p_serve.set_defaults(func=_cmd_serve)

    p_exp = sub.add_parser("export-scenario", help="write a preset as JSON to customize")
    p_exp.add_argument("--preset", required=True)
    p_exp.add_argument("-o", "--out")
    p_exp.set_defaults(func=_cmd_export)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end: ``trm match|inspect|sweep|repro``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import load_scenario_file, parse_config, scenario_to_dict
from .errors import ParseError, TRMError, ValidationError
from .hypergraph import build_resource_hypergraph, build_task_hypergraph
from .model import ValueBreakdown
from .scenario import MATCHERS, REPRO_PRESETS, ScenarioConfig, repro, run_trial, sweep


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def _matchers(text: str | None) -> tuple[str, ...]:
    if not text:
        return MATCHERS
    names = tuple(n.strip() for n in text.split(",") if n.strip())
    bad = [n for n in names if n not in MATCHERS]
    if bad or not names:
        raise ValidationError(f"unknown matcher {bad[0] if bad else text!r}; choose from {MATCHERS}")
    return names


def _sweep_values(param: str, text: str) -> list:
    out = []
    for item in text.split(","):
        item = item.strip()
        try:
            if param == "xi":
                t, e = item.split(":")
                out.append((float(t), float(e)))
            elif param in ("deadline", "t_max", "tmax"):
                out.append(float(item))
            else:
                out.append(int(item))
        except ValueError:
            raise ParseError(f"--values: cannot parse {item!r} for parameter {param!r}") from None
    if not out:
        raise ParseError("--values is empty")
    return out


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_summary(path: str | None, payload: dict):
    if path:
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_match(args) -> int:
    scenario, weights, alpha1, cfg = load_scenario_file(_read(args.config), args.seed, args.config)
    cfg = cfg or ScenarioConfig(alpha1=alpha1)
    results = run_trial(scenario, _matchers(args.matchers), weights, cfg)
    fields = [f.name for f in dataclasses.fields(ValueBreakdown)]
    lines = [",".join(["matcher", "subtask", "task_type", "device", *fields])]
    totals = []
    status = 0
    for r in results:
        if not r.ok:
            print(f"error:{r.matcher}:{r.error}", file=sys.stderr)
            status = 1
            continue
        for m, entry in sorted(r.assignment.entries.items()):
            b = entry.breakdown
            cells = [r.matcher, m, scenario.task.subtasks[m].task_type, entry.device]
            cells += [f"{getattr(b, f):.6g}" for f in fields]
            lines.append(",".join(map(str, cells)))
        totals.append({"matcher": r.matcher, "total_value": r.total_value,
                       "total_time": r.total_time, "total_energy": r.total_energy,
                       "devices": r.assignment.devices(), "iterations": r.iterations,
                       "candidates": r.candidates})
    _emit("\n".join(lines) + "\n", args.out)
    for t in totals:
        print(f"# {t['matcher']}: total value {t['total_value']:.6g}", file=sys.stderr)
    _write_summary(args.summary, {"scenario": scenario_to_dict(scenario, weights, alpha1),
                                  "results": totals})
    return status


def cmd_inspect(args) -> int:
    scenario, _, _, _ = load_scenario_file(_read(args.config), args.seed, args.config)
    if args.graph == "resource":
        h = build_resource_hypergraph(scenario.devices, scenario.channel)
    else:
        h = build_task_hypergraph(scenario.task, scenario.channel)
    if args.json:
        _emit(json.dumps(h.to_dict(), indent=2) + "\n", args.out)
        return 0
    d = h.to_dict()
    lines = [f"{d['kind']} hypergraph: {len(d['vertices'])} vertices, {len(d['hyperedges'])} hyperedges"]
    for e in d["hyperedges"]:
        lines.append(f"e{e['id']}: ({', '.join(e['vertices'])}) weight={e['weight']:.6g}")
    lines.append("incidence:")
    for v, ids in sorted(h.incidence.items(), key=lambda kv: kv[0].sort_key()):
        lines.append(f"  {v.label()}: " + " ".join(f"e{i}" for i in ids))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _load_cfg(args) -> ScenarioConfig:
    cfg = parse_config(_read(args.config), args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def cmd_sweep(args) -> int:
    cfg = _load_cfg(args)
    if not args.param or not args.values:
        raise ValidationError("sweep needs --param and --values")
    result = sweep(cfg, args.param, _sweep_values(args.param, args.values), args.trials,
                   _matchers(args.matchers))
    _emit(result.to_csv(), args.out)
    _write_summary(args.summary, result.to_json())
    return 0


def cmd_repro(args) -> int:
    cfg = _load_cfg(args)
    result = repro(args.figure, cfg, args.trials, _matchers(args.matchers))
    _emit(result.to_csv(), args.out)
    _write_summary(args.summary, result.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trm", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=False):
        sp.add_argument("--config", required=config_required, help="JSON config or scenario file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--matchers", help="comma-separated subset of " + ",".join(MATCHERS))
        sp.add_argument("--summary", help="also write a JSON summary to this path")

    sp = sub.add_parser("match", help="match one scenario and print the assignment")
    common(sp, config_required=True)
    sp.set_defaults(func=cmd_match)

    sp = sub.add_parser("inspect", help="print a hypergraph built from a scenario")
    common(sp, config_required=True)
    sp.add_argument("--graph", choices=("resource", "task"), default="resource")
    sp.add_argument("--json", action="store_true", help="dump the hypergraph as JSON")
    sp.set_defaults(func=cmd_inspect)

    sp = sub.add_parser("sweep", help="sweep one parameter and write a CSV table")
    common(sp)
    sp.add_argument("--param", help="deadline | device_count | xi | subtask_count")
    sp.add_argument("--values", help="comma-separated values; xi pairs as time:energy")
    sp.add_argument("--trials", type=int, default=None)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("repro", help="run a figure preset and write a CSV table")
    sp.add_argument("figure", choices=sorted(REPRO_PRESETS))
    common(sp)
    sp.add_argument("--trials", type=int, default=None)
    sp.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and args.command in ("match", "inspect"):
        args.seed = 0
    try:
        return args.func(args)
    except TRMError as exc:
        msg = str(exc).replace("\n", " ")
        print(f"error:{type(exc).__name__}: {msg}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

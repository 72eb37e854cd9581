"""Seeded scenario generation, trials, and parameter sweeps."""
from __future__ import annotations

import csv
import io
import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .assignment import Assignment, has_complete_matching
from .baselines import eligibility, match_exact, match_nearest, match_random
from .errors import Infeasible, TRMError, ValidationError
from .hypergraph import build_resource_hypergraph, build_task_hypergraph
from .matching import DynamicsConfig, match_detailed
from .model import (BITS_PER_KB, DEFAULT_ALPHA1, DEFAULT_SNR_THRESHOLD, ChannelParams,
                    DeviceSpec, Position, SubtaskSpec, TaskSpec, ValueWeights, dbm_to_watts)

MATCHERS = ("trm", "nn", "random", "exact")
INITIATOR_ID = 1


@dataclass(frozen=True)
class ScenarioConfig:
    area: tuple[float, float] = (100.0, 100.0)
    device_count: int = 25
    type_count: int = 5
    types_per_device: int = 3
    cpu_freq_choices: tuple[float, ...] = (0.5e9, 0.8e9, 1.0e9)
    tx_power_choices: tuple[float, ...] = (0.1, 0.15, 0.2)
    data_size_range: tuple[float, float] = (200 * BITS_PER_KB, 1000 * BITS_PER_KB)
    proc_density_choices: tuple[float, ...] = (500.0, 600.0, 700.0, 800.0)
    bandwidth: float = 5e6
    noise_dbm: float = -100.0
    snr_threshold: float = DEFAULT_SNR_THRESHOLD
    alpha1: float = DEFAULT_ALPHA1
    deadline: float = 0.8
    xi_time: float = 0.5
    xi_energy: float = 0.5
    subtask_count: int = 3
    trials: int = 100
    seed: int = 0
    max_retries: int = 100
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)

    def __post_init__(self):
        for name in ("area", "cpu_freq_choices", "tx_power_choices", "data_size_range",
                     "proc_density_choices"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        self.validate()

    def validate(self):
        def need(cond, msg):
            if not cond:
                raise ValidationError(msg)
        need(len(self.area) == 2 and all(v > 0 for v in self.area), "area must be two positive lengths")
        need(self.device_count >= 1, "device_count must be >= 1")
        need(self.type_count >= 1, "type_count must be >= 1")
        need(self.subtask_count >= 1, "subtask_count must be >= 1")
        need(self.device_count >= self.subtask_count + 1, "device_count must be >= subtask_count + 1")
        need(1 <= self.types_per_device <= self.type_count, "types_per_device must lie in [1, type_count]")
        need(self.subtask_count <= self.types_per_device,
             "subtask_count must be <= types_per_device (subtask types come from the initiator's types)")
        for name in ("cpu_freq_choices", "tx_power_choices", "proc_density_choices"):
            vals = getattr(self, name)
            need(len(vals) > 0 and all(v > 0 for v in vals), f"{name} must be nonempty and positive")
        lo, hi = self.data_size_range if len(self.data_size_range) == 2 else (0, -1)
        need(0 < lo <= hi, "data_size_range must be [lo, hi] with 0 < lo <= hi")
        need(self.bandwidth > 0, "bandwidth must be > 0")
        need(math.isfinite(self.noise_dbm), "noise_dbm must be finite")
        need(self.snr_threshold > 0, "snr_threshold must be > 0")
        need(self.alpha1 > 0, "alpha1 must be > 0")
        need(self.deadline > 0, "deadline must be > 0")
        need(0 <= self.xi_time <= 1 and 0 <= self.xi_energy <= 1, "weights must lie in [0, 1]")
        need(self.trials >= 1, "trials must be >= 1")
        need(self.seed >= 0, "seed must be >= 0")
        need(self.max_retries >= 1, "max_retries must be >= 1")

    @property
    def channel(self) -> ChannelParams:
        return ChannelParams(self.bandwidth, dbm_to_watts(self.noise_dbm), self.snr_threshold)

    @property
    def weights(self) -> ValueWeights:
        return ValueWeights(self.xi_time, self.xi_energy)


@dataclass(frozen=True)
class Scenario:
    devices: tuple[DeviceSpec, ...]
    task: TaskSpec
    channel: ChannelParams
    seed: int
    attempts: int = 1

    @property
    def positions(self) -> dict[int, Position]:
        return {d.id: d.position for d in self.devices}


def _draw(cfg: ScenarioConfig, rng: np.random.Generator) -> tuple[list[DeviceSpec], TaskSpec]:
    devices = []
    for dev_id in range(1, cfg.device_count + 1):
        x = rng.uniform(0.0, cfg.area[0])
        y = rng.uniform(0.0, cfg.area[1])
        f = cfg.cpu_freq_choices[rng.integers(len(cfg.cpu_freq_choices))]
        p = cfg.tx_power_choices[rng.integers(len(cfg.tx_power_choices))]
        types = rng.choice(cfg.type_count, size=cfg.types_per_device, replace=False)
        devices.append(DeviceSpec(dev_id, f, Position(x, y, 0.0),
                                  frozenset(int(t) for t in types), p))
    initiator = devices[INITIATOR_ID - 1]
    own = np.array(sorted(initiator.supported_types))
    task_types = rng.choice(own, size=cfg.subtask_count, replace=False)
    lo_kb = math.ceil(cfg.data_size_range[0] / BITS_PER_KB)
    hi_kb = math.floor(cfg.data_size_range[1] / BITS_PER_KB)
    subtasks = []
    for t in task_types:
        if lo_kb <= hi_kb:
            size = float(rng.integers(lo_kb, hi_kb + 1) * BITS_PER_KB)
        else:
            size = float(rng.uniform(*cfg.data_size_range))
        rho = cfg.proc_density_choices[rng.integers(len(cfg.proc_density_choices))]
        subtasks.append(SubtaskSpec(size, rho, int(t), cfg.deadline))
    return devices, TaskSpec(INITIATOR_ID, tuple(subtasks))


def generate_scenario(cfg: ScenarioConfig, seed: int) -> Scenario:
    """Draw a scenario; redraw from derived seeds until every subtask can be placed."""
    channel = cfg.channel
    for attempt in range(cfg.max_retries):
        ss = np.random.SeedSequence(seed) if attempt == 0 else np.random.SeedSequence(seed, spawn_key=(attempt,))
        devices, task = _draw(cfg, np.random.default_rng(ss))
        table = eligibility(task, devices, channel, cfg.weights, cfg.alpha1)
        if has_complete_matching([[e.device for e in row] for row in table]):
            return Scenario(tuple(devices), task, channel, seed, attempt + 1)
    raise Infeasible(f"seed {seed}: no feasible scenario after {cfg.max_retries} draws")


@dataclass(frozen=True)
class TrialResult:
    matcher: str
    seed: int
    assignment: Assignment | None
    error: str | None = None
    iterations: int | None = None
    candidates: int | None = None

    @property
    def ok(self) -> bool:
        return self.assignment is not None

    @property
    def total_value(self) -> float:
        return self.assignment.total_value if self.assignment else math.nan

    @property
    def total_time(self) -> float:
        return self.assignment.total_time if self.assignment else math.nan

    @property
    def total_energy(self) -> float:
        return self.assignment.total_energy if self.assignment else math.nan


def run_trial(scenario: Scenario, matchers: Sequence[str] = MATCHERS,
              weights: ValueWeights | None = None, cfg: ScenarioConfig | None = None
              ) -> list[TrialResult]:
    """Run every matcher on the same scenario; a failing matcher does not stop the others."""
    cfg = cfg or ScenarioConfig()
    weights = weights or cfg.weights
    out = []
    table = None
    for name in matchers:
        try:
            if name == "trm":
                rh = build_resource_hypergraph(scenario.devices, scenario.channel)
                th = build_task_hypergraph(scenario.task, scenario.channel)
                res = match_detailed(th, rh, weights, cfg.dynamics, cfg.alpha1)
                out.append(TrialResult(name, scenario.seed, res.assignment,
                                       iterations=res.state.iterations,
                                       candidates=len(res.strategies)))
                continue
            if table is None:
                table = eligibility(scenario.task, scenario.devices, scenario.channel,
                                    weights, cfg.alpha1)
            if name == "nn":
                a = match_nearest(table, scenario.positions, scenario.task.initiator)
            elif name == "random":
                a = match_random(table, scenario.seed)
            elif name == "exact":
                a = match_exact(table)
            else:
                raise ValidationError(f"unknown matcher {name!r}")
            out.append(TrialResult(name, scenario.seed, a))
        except TRMError as exc:
            out.append(TrialResult(name, scenario.seed, None, f"{type(exc).__name__}: {exc}"))
    return out


@dataclass(frozen=True)
class SweepPoint:
    value: object
    matcher: str
    values: tuple[float, ...]
    times: tuple[float, ...]
    energies: tuple[float, ...]
    failures: int
    infeasible: int

    @property
    def mean_value(self) -> float:
        return statistics.fmean(self.values) if self.values else math.nan

    @property
    def std_value(self) -> float:
        return statistics.stdev(self.values) if len(self.values) > 1 else 0.0

    @property
    def mean_time(self) -> float:
        return statistics.fmean(self.times) if self.times else math.nan

    @property
    def mean_energy(self) -> float:
        return statistics.fmean(self.energies) if self.energies else math.nan

    @property
    def std_energy(self) -> float:
        return statistics.stdev(self.energies) if len(self.energies) > 1 else 0.0


@dataclass(frozen=True)
class SweepResult:
    param: str
    values: tuple
    trials: int
    points: tuple[SweepPoint, ...]
    trial_results: tuple[tuple[TrialResult, ...], ...] = field(repr=False, default=())

    def point(self, value, matcher: str) -> SweepPoint:
        for p in self.points:
            if p.value == value and p.matcher == matcher:
                return p
        raise KeyError((value, matcher))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for p in self.points:
            w.writerow([self.param, _fmt_param(p.value), p.matcher, _g(p.mean_value),
                        _g(p.std_value), _g(p.mean_time), _g(p.mean_energy), p.failures,
                        len(p.values), p.infeasible])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "param": self.param,
            "values": [_json_param(v) for v in self.values],
            "trials": self.trials,
            "points": [
                {"value": _json_param(p.value), "matcher": p.matcher, "mean_value": p.mean_value,
                 "std_value": p.std_value, "mean_time": p.mean_time,
                 "mean_energy": p.mean_energy, "failures": p.failures,
                 "completed": len(p.values), "infeasible": p.infeasible}
                for p in self.points
            ],
        }


CSV_COLUMNS = ("param", "value", "matcher", "mean_value", "std_value", "mean_time",
               "mean_energy", "failures", "completed", "infeasible")

PARAM_ALIASES = {
    "deadline": "deadline", "t_max": "deadline", "tmax": "deadline",
    "device_count": "device_count", "J": "device_count", "j": "device_count",
    "xi": "xi", "subtask_count": "subtask_count", "M": "subtask_count", "m": "subtask_count",
}


def _g(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.6g}"


def _fmt_param(v) -> str:
    if isinstance(v, tuple):
        return ":".join(_g(float(x)) for x in v)
    return _g(float(v)) if isinstance(v, float) else str(v)


def _json_param(v):
    return list(v) if isinstance(v, tuple) else v


def apply_param(cfg: ScenarioConfig, param: str, value) -> ScenarioConfig:
    name = PARAM_ALIASES.get(param)
    if name is None:
        raise ValidationError(f"cannot sweep {param!r}; choose from {sorted(set(PARAM_ALIASES))}")
    if name == "xi":
        t, e = value
        return replace(cfg, xi_time=float(t), xi_energy=float(e))
    if name == "deadline":
        return replace(cfg, deadline=float(value))
    return replace(cfg, **{name: int(value)})


def _thread_count() -> int:
    env = os.environ.get("TRM_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            return max(1, min(int(env), cap))
        except ValueError:
            raise ValidationError(f"TRM_THREADS must be an integer, got {env!r}") from None
    return cap


def _one(cfg: ScenarioConfig, seed: int, matchers) -> tuple[TrialResult, ...] | None:
    try:
        scenario = generate_scenario(cfg, seed)
    except Infeasible:
        return None
    return tuple(run_trial(scenario, matchers, cfg.weights, cfg))


def sweep(cfg: ScenarioConfig, param: str, values: Sequence, trials: int | None = None,
          matchers: Sequence[str] = MATCHERS, threads: int | None = None) -> SweepResult:
    """Run ``trials`` seeded trials per sweep value and aggregate per matcher.

    Seeds are ``cfg.seed .. cfg.seed + trials - 1`` at every sweep point, so
    points differ only in the swept parameter wherever it does not change the
    random draws.
    """
    trials = cfg.trials if trials is None else trials
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    name = PARAM_ALIASES.get(param)
    if name is None:
        raise ValidationError(f"cannot sweep {param!r}")
    values = tuple(tuple(v) if isinstance(v, (list, tuple)) else v for v in values)
    threads = threads or _thread_count()
    points = []
    all_results = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for v in values:
            c = apply_param(cfg, param, v)
            seeds = range(cfg.seed, cfg.seed + trials)
            results = list(pool.map(lambda s: _one(c, s, matchers), seeds))
            infeasible = sum(r is None for r in results)
            done = [r for r in results if r is not None]
            all_results.extend(done)
            for mi, mname in enumerate(matchers):
                rs = [r[mi] for r in done]
                ok = [r for r in rs if r.ok]
                points.append(SweepPoint(
                    v, mname,
                    tuple(r.total_value for r in ok),
                    tuple(r.total_time for r in ok),
                    tuple(r.total_energy for r in ok),
                    failures=len(rs) - len(ok), infeasible=infeasible))
    return SweepResult(name, values, trials, tuple(points), tuple(all_results))


REPRO_PRESETS = {
    "fig6a": dict(param="deadline", values=(0.4, 0.5, 0.6, 0.7, 0.8, 0.9), xi=(0.0, 1.0)),
    "fig6b": dict(param="deadline", values=(0.4, 0.5, 0.6, 0.7, 0.8, 0.9), xi=(1.0, 0.0)),
    "fig6c": dict(param="deadline", values=(0.4, 0.5, 0.6, 0.7, 0.8, 0.9), xi=(0.5, 0.5)),
    "fig7": dict(param="device_count", values=(10, 15, 20, 25), xi=(0.0, 1.0)),
    "fig8": dict(param="device_count", values=(10, 15, 20, 25), xi=(1.0, 0.0)),
}


def repro(figure: str, cfg: ScenarioConfig | None = None, trials: int | None = None,
          matchers: Sequence[str] = MATCHERS) -> SweepResult:
    if figure not in REPRO_PRESETS:
        raise ValidationError(f"unknown figure {figure!r}; choose from {sorted(REPRO_PRESETS)}")
    preset = REPRO_PRESETS[figure]
    cfg = cfg or ScenarioConfig()
    xi_t, xi_e = preset["xi"]
    cfg = replace(cfg, xi_time=xi_t, xi_energy=xi_e)
    if preset["param"] == "device_count":
        cfg = replace(cfg, deadline=0.8)
    return sweep(cfg, preset["param"], preset["values"], trials, matchers)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    d = asdict(cfg)
    d["area"] = list(cfg.area)
    for k in ("cpu_freq_choices", "tx_power_choices", "data_size_range", "proc_density_choices"):
        d[k] = list(d[k])
    return d

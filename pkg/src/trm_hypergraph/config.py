"""JSON config and scenario-file parsing."""
from __future__ import annotations

import dataclasses
import json
from typing import Any

from .errors import DuplicateDeviceId, ParseError, TRMError
from .hypergraph import device_from_dict, device_to_dict
from .matching import DynamicsConfig
from .model import DEFAULT_ALPHA1, ChannelParams, SubtaskSpec, TaskSpec, ValueWeights
from .scenario import Scenario, ScenarioConfig, generate_scenario

_CONFIG_FIELDS = {f.name for f in dataclasses.fields(ScenarioConfig)}
_DYNAMICS_FIELDS = {f.name for f in dataclasses.fields(DynamicsConfig)}
_TUPLE_FIELDS = {"area", "cpu_freq_choices", "tx_power_choices", "data_size_range",
                 "proc_density_choices"}


def _load_json(text: str, source: str = "<config>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def config_from_dict(obj: Any, source: str = "<config>") -> ScenarioConfig:
    if not isinstance(obj, dict):
        raise ParseError(f"{source}: top level must be an object")
    unknown = sorted(set(obj) - _CONFIG_FIELDS)
    if unknown:
        raise ParseError(f"{source}: unknown field {unknown[0]!r}")
    kwargs = {}
    for key, value in obj.items():
        if key == "dynamics":
            if not isinstance(value, dict):
                raise ParseError(f"{source}: field 'dynamics' must be an object")
            bad = sorted(set(value) - _DYNAMICS_FIELDS)
            if bad:
                raise ParseError(f"{source}: unknown field 'dynamics.{bad[0]}'")
            try:
                kwargs[key] = DynamicsConfig(**value)
            except TypeError as exc:
                raise ParseError(f"{source}: field 'dynamics': {exc}") from None
        elif key in _TUPLE_FIELDS:
            if not isinstance(value, list) or not all(isinstance(v, (int, float)) for v in value):
                raise ParseError(f"{source}: field {key!r} must be a list of numbers")
            kwargs[key] = tuple(value)
        else:
            if isinstance(value, (list, dict)) or value is None:
                raise ParseError(f"{source}: field {key!r} must be a scalar")
            kwargs[key] = value
    for key in ("device_count", "type_count", "types_per_device", "subtask_count", "trials",
                "seed", "max_retries"):
        if key in kwargs and not (isinstance(kwargs[key], int) and not isinstance(kwargs[key], bool)):
            raise ParseError(f"{source}: field {key!r} must be an integer")
    try:
        return ScenarioConfig(**kwargs)
    except TypeError as exc:
        raise ParseError(f"{source}: {exc}") from None


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    """Parse a JSON scenario config; absent fields take the default experiment values."""
    return config_from_dict(_load_json(text, source), source)


def scenario_from_dict(obj: dict, source: str = "<scenario>"
                       ) -> tuple[Scenario, ValueWeights, float]:
    """Explicit scenario: devices, a task, and optional channel, weights and alpha1."""
    known = {"devices", "task", "channel", "weights", "alpha1"}
    unknown = sorted(set(obj) - known)
    if unknown:
        raise ParseError(f"{source}: unknown field {unknown[0]!r}")
    try:
        devices = tuple(device_from_dict(d) for d in obj["devices"])
        t = obj["task"]
        task = TaskSpec(int(t["initiator"]), tuple(
            SubtaskSpec(float(s["data_size"]), float(s["proc_density"]), int(s["task_type"]),
                        float(s["deadline"])) for s in t["subtasks"]))
        channel = ChannelParams(**obj.get("channel", {}))
        weights = ValueWeights(**obj.get("weights", {}))
        alpha1 = float(obj.get("alpha1", DEFAULT_ALPHA1))
    except TRMError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{source}: malformed scenario: {exc!r}") from None
    ids = [d.id for d in devices]
    if len(set(ids)) != len(ids):
        raise DuplicateDeviceId(f"{source}: duplicate device ids")
    return Scenario(devices, task, channel, seed=0), weights, alpha1


def load_scenario_file(text: str, seed: int, source: str = "<scenario>"
                       ) -> tuple[Scenario, ValueWeights, float, ScenarioConfig | None]:
    """A scenario file is either an explicit scenario or a config to generate one from."""
    obj = _load_json(text, source)
    if isinstance(obj, dict) and "devices" in obj:
        scenario, weights, alpha1 = scenario_from_dict(obj, source)
        return scenario, weights, alpha1, None
    cfg = config_from_dict(obj, source)
    return generate_scenario(cfg, seed), cfg.weights, cfg.alpha1, cfg


def scenario_to_dict(scenario: Scenario, weights: ValueWeights | None = None,
                     alpha1: float = DEFAULT_ALPHA1) -> dict:
    out = {
        "devices": [device_to_dict(d) for d in scenario.devices],
        "task": {
            "initiator": scenario.task.initiator,
            "subtasks": [dataclasses.asdict(s) for s in scenario.task.subtasks],
        },
        "channel": dataclasses.asdict(scenario.channel),
        "alpha1": alpha1,
    }
    if weights is not None:
        out["weights"] = dataclasses.asdict(weights)
    return out

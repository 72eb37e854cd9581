"""Attributed 3-uniform resource and task hypergraphs.

A resource hyperedge ``(initiator, type, collaborator)`` says the initiator
can ship a subtask of ``type`` to the collaborator over a link at least as
fast as the configured minimum rate.  A task hyperedge
``(initiator, type, dummy)`` carries one subtask and its minimum rate
requirement.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DuplicateDeviceId
from .model import ChannelParams, DeviceSpec, Position, SubtaskSpec, TaskSpec, link_rate

DEVICE = "device"
TASK_TYPE = "type"
DUMMY_KIND = "dummy"
_KIND_ORDER = {DEVICE: 0, TASK_TYPE: 1, DUMMY_KIND: 2}


@dataclass(frozen=True)
class VertexRef:
    kind: str
    key: int | None = None

    def sort_key(self):
        return (_KIND_ORDER[self.kind], -1 if self.key is None else self.key)

    def label(self) -> str:
        if self.kind == DEVICE:
            return f"a{self.key}"
        if self.kind == TASK_TYPE:
            return f"o{self.key}"
        return "dummy"


def device_vertex(device_id: int) -> VertexRef:
    return VertexRef(DEVICE, device_id)


def type_vertex(task_type: int) -> VertexRef:
    return VertexRef(TASK_TYPE, task_type)


DUMMY = VertexRef(DUMMY_KIND)


@dataclass(frozen=True, order=True)
class ResourceHyperedge:
    initiator: int
    task_type: int
    collaborator: int
    weight: float = field(compare=False)  # link rate initiator -> collaborator, bit/s

    @property
    def vertices(self) -> tuple[VertexRef, VertexRef, VertexRef]:
        return (device_vertex(self.initiator), type_vertex(self.task_type),
                device_vertex(self.collaborator))

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.initiator, self.task_type, self.collaborator)


@dataclass(frozen=True)
class TaskHyperedge:
    subtask: int  # index into TaskSpec.subtasks
    initiator: int
    task_type: int
    weight: float  # minimum rate requirement, bit/s
    data_size: float
    proc_density: float
    deadline: float

    @property
    def vertices(self) -> tuple[VertexRef, VertexRef, VertexRef]:
        return (device_vertex(self.initiator), type_vertex(self.task_type), DUMMY)

    def subtask_spec(self) -> SubtaskSpec:
        return SubtaskSpec(self.data_size, self.proc_density, self.task_type, self.deadline)


def _incidence(edges) -> dict[VertexRef, tuple[int, ...]]:
    index: dict[VertexRef, list[int]] = defaultdict(list)
    for eid, e in enumerate(edges):
        for v in e.vertices:
            index[v].append(eid)
    return {v: tuple(ids) for v, ids in index.items()}


@dataclass(frozen=True)
class ResourceHypergraph:
    """Collaboration-driven resource hypergraph.

    Hyperedges are kept sorted by ``(initiator, type, collaborator)`` so the
    edge ids do not depend on the order devices were added in.
    """

    devices: Mapping[int, DeviceSpec]
    edges: tuple[ResourceHyperedge, ...]
    channel: ChannelParams
    min_rate: float

    @property
    def vertices(self) -> frozenset[VertexRef]:
        vs = {device_vertex(i) for i in self.devices}
        vs.update(type_vertex(t) for d in self.devices.values() for t in d.supported_types)
        return frozenset(vs)

    @property
    def incidence(self) -> dict[VertexRef, tuple[int, ...]]:
        return _incidence(self.edges)

    def edge_set(self) -> frozenset[tuple[int, int, int, float]]:
        return frozenset((*e.key, e.weight) for e in self.edges)

    def edges_from(self, initiator: int, task_type: int) -> list[tuple[int, ResourceHyperedge]]:
        return [(eid, e) for eid, e in enumerate(self.edges)
                if e.initiator == initiator and e.task_type == task_type]

    def to_dict(self) -> dict:
        return {
            "kind": "resource",
            "min_rate": self.min_rate,
            "vertices": [v.label() for v in sorted(self.vertices, key=VertexRef.sort_key)],
            "devices": [device_to_dict(self.devices[i]) for i in sorted(self.devices)],
            "hyperedges": [
                {"id": eid, "vertices": [v.label() for v in e.vertices], "weight": e.weight}
                for eid, e in enumerate(self.edges)
            ],
        }


@dataclass(frozen=True)
class TaskHypergraph:
    initiator: int
    edges: tuple[TaskHyperedge, ...]

    @property
    def vertices(self) -> frozenset[VertexRef]:
        vs = {device_vertex(self.initiator), DUMMY}
        vs.update(type_vertex(e.task_type) for e in self.edges)
        return frozenset(vs)

    @property
    def incidence(self) -> dict[VertexRef, tuple[int, ...]]:
        return _incidence(self.edges)

    def to_dict(self) -> dict:
        return {
            "kind": "task",
            "initiator": self.initiator,
            "vertices": [v.label() for v in sorted(self.vertices, key=VertexRef.sort_key)],
            "hyperedges": [
                {"id": eid, "vertices": [v.label() for v in e.vertices], "weight": e.weight,
                 "data_size": e.data_size, "proc_density": e.proc_density,
                 "deadline": e.deadline}
                for eid, e in enumerate(self.edges)
            ],
        }


def device_to_dict(d: DeviceSpec) -> dict:
    return {
        "id": d.id,
        "cpu_freq": d.cpu_freq,
        "position": [d.position.x, d.position.y, d.position.z],
        "supported_types": sorted(d.supported_types),
        "tx_power": d.tx_power,
    }


def device_from_dict(obj: Mapping) -> DeviceSpec:
    return DeviceSpec(
        id=int(obj["id"]),
        cpu_freq=float(obj["cpu_freq"]),
        position=Position(*(float(c) for c in obj["position"])),
        supported_types=frozenset(int(t) for t in obj["supported_types"]),
        tx_power=float(obj["tx_power"]),
    )


def _pair_edges(a: DeviceSpec, b: DeviceSpec, channel: ChannelParams,
                min_rate: float) -> list[ResourceHyperedge]:
    """Hyperedges a->b for every type both devices support."""
    shared = a.supported_types & b.supported_types
    if not shared:
        return []
    rate = link_rate(a, b, channel)
    if rate is None or rate < min_rate:
        return []
    return [ResourceHyperedge(a.id, t, b.id, rate) for t in sorted(shared)]


def build_resource_hypergraph(devices: Iterable[DeviceSpec], channel: ChannelParams,
                              min_rate: float | None = None) -> ResourceHypergraph:
    """Enumerate every ordered device pair and every shared task type."""
    if min_rate is None:
        min_rate = channel.min_rate
    table: dict[int, DeviceSpec] = {}
    for d in devices:
        if d.id in table:
            raise DuplicateDeviceId(f"device id {d.id} appears twice")
        table[d.id] = d
    edges = []
    for a in table.values():
        for b in table.values():
            if a.id != b.id:
                edges.extend(_pair_edges(a, b, channel, min_rate))
    return ResourceHypergraph(table, tuple(sorted(edges)), channel, min_rate)


def empty_resource_hypergraph(channel: ChannelParams,
                              min_rate: float | None = None) -> ResourceHypergraph:
    return ResourceHypergraph({}, (), channel, channel.min_rate if min_rate is None else min_rate)


def add_device(h: ResourceHypergraph, d: DeviceSpec) -> ResourceHypergraph:
    """Return a new hypergraph with ``d`` joined; ``h`` is left untouched.

    The newcomer is checked against every existing device in both directions.
    """
    if d.id in h.devices:
        raise DuplicateDeviceId(f"device id {d.id} already present")
    new_edges = list(h.edges)
    for other in h.devices.values():
        new_edges.extend(_pair_edges(d, other, h.channel, h.min_rate))
        new_edges.extend(_pair_edges(other, d, h.channel, h.min_rate))
    table = dict(h.devices)
    table[d.id] = d
    return ResourceHypergraph(table, tuple(sorted(new_edges)), h.channel, h.min_rate)


def build_task_hypergraph(task: TaskSpec, channel: ChannelParams,
                          min_rate: float | None = None) -> TaskHypergraph:
    w = channel.min_rate if min_rate is None else min_rate
    edges = tuple(
        TaskHyperedge(m, task.initiator, s.task_type, w, s.data_size, s.proc_density, s.deadline)
        for m, s in enumerate(task.subtasks)
    )
    return TaskHypergraph(task.initiator, edges)

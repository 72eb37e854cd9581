"""Subtask-to-device assignments and an independent constraint checker."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import ChannelParams, DeviceSpec, TaskSpec, ValueBreakdown, snr


@dataclass(frozen=True)
class AssignedSubtask:
    device: int
    breakdown: ValueBreakdown


@dataclass(frozen=True)
class Assignment:
    entries: Mapping[int, AssignedSubtask]

    @property
    def total_value(self) -> float:
        return sum(self.entries[m].breakdown.v_total for m in sorted(self.entries))

    @property
    def total_time(self) -> float:
        return sum(self.entries[m].breakdown.t_total for m in sorted(self.entries))

    @property
    def total_energy(self) -> float:
        return sum(self.entries[m].breakdown.e_total for m in sorted(self.entries))

    def devices(self) -> dict[int, int]:
        return {m: self.entries[m].device for m in sorted(self.entries)}

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int, ValueBreakdown]]) -> Assignment:
        return cls({m: AssignedSubtask(dev, bd) for m, dev, bd in sorted(pairs, key=lambda p: p[0])})


def has_complete_matching(rows: Sequence[Iterable[int]], used: Iterable[int] = ()) -> bool:
    """True if every row can take a distinct device from its list, avoiding ``used``."""
    blocked = set(used)
    rows = [[d for d in r if d not in blocked] for r in rows]
    owner: dict[int, int] = {}

    def augment(m, seen):
        for d in rows[m]:
            if d in seen:
                continue
            seen.add(d)
            if d not in owner or augment(owner[d], seen):
                owner[d] = m
                return True
        return False

    return all(augment(m, set()) for m in range(len(rows)))


def constraint_violations(assignment: Assignment, task: TaskSpec,
                          devices: Iterable[DeviceSpec], channel: ChannelParams) -> list[str]:
    """List every violated assignment constraint; an empty list means the assignment is sound.

    Recomputes SNR from positions and powers rather than trusting any cached rate.
    """
    table = {d.id: d for d in devices}
    problems = []
    m_count = len(task.subtasks)
    assigned = set(assignment.entries)
    for m in range(m_count):
        if m not in assigned:
            problems.append(f"subtask {m} unassigned")
    for m in sorted(assigned - set(range(m_count))):
        problems.append(f"unknown subtask {m} assigned")
    used: dict[int, int] = {}
    initiator = table.get(task.initiator)
    for m, entry in sorted(assignment.entries.items()):
        dev = table.get(entry.device)
        if dev is None:
            problems.append(f"subtask {m}: unknown device {entry.device}")
            continue
        if entry.device == task.initiator:
            problems.append(f"subtask {m}: assigned to the initiator itself")
        if entry.device in used:
            problems.append(f"device {entry.device} reused by subtasks {used[entry.device]} and {m}")
        used[entry.device] = m
        if m < m_count and task.subtasks[m].task_type not in dev.supported_types:
            problems.append(f"subtask {m}: device {dev.id} lacks type {task.subtasks[m].task_type}")
        if initiator is not None and dev.id != initiator.id:
            if snr(initiator, dev, channel) < channel.snr_threshold:
                problems.append(f"subtask {m}: link {initiator.id}->{dev.id} below SNR threshold")
    return problems

"""Comparison matchers: nearest neighbour, seeded random, and an exhaustive oracle."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .assignment import Assignment
from .errors import InstanceTooLarge, UnassignedSubtask, ValidationError
from .model import (DEFAULT_ALPHA1, ChannelParams, DeviceSpec, Position, TaskSpec,
                    ValueBreakdown, ValueWeights, evaluate_offload, link_rate)

DEFAULT_EXACT_CAP = 6


@dataclass(frozen=True)
class Eligible:
    device: int
    rate: float
    breakdown: ValueBreakdown


#: per subtask, the devices that may take it, sorted by device id
EligibilityTable = tuple[tuple[Eligible, ...], ...]


def eligibility(task: TaskSpec, devices: Iterable[DeviceSpec], channel: ChannelParams,
                weights: ValueWeights, alpha1: float = DEFAULT_ALPHA1,
                min_rate: float | None = None) -> EligibilityTable:
    if min_rate is None:
        min_rate = channel.min_rate
    table = {d.id: d for d in devices}
    if task.initiator not in table:
        raise ValidationError(f"initiator {task.initiator} not among devices")
    init = table[task.initiator]
    rates = {}
    for dev_id in sorted(table):
        if dev_id == init.id:
            continue
        r = link_rate(init, table[dev_id], channel)
        if r is not None and r >= min_rate:
            rates[dev_id] = r
    out = []
    for sub in task.subtasks:
        row = []
        for dev_id, r in rates.items():
            dev = table[dev_id]
            if dev.supports(sub.task_type):
                row.append(Eligible(dev_id, r, evaluate_offload(init, dev, sub, r, weights, alpha1)))
        out.append(tuple(row))
    return tuple(out)


def match_nearest(table: EligibilityTable, positions: Mapping[int, Position],
                  initiator: int) -> Assignment:
    """Each subtask in order takes the closest unused eligible device."""
    origin = positions[initiator]
    used: set[int] = set()
    picks = []
    for m, row in enumerate(table):
        free = [e for e in row if e.device not in used]
        if not free:
            raise UnassignedSubtask(m)
        best = min(free, key=lambda e: (positions[e.device].distance(origin), e.device))
        used.add(best.device)
        picks.append((m, best.device, best.breakdown))
    return Assignment.from_pairs(picks)


def match_random(table: EligibilityTable, seed: int) -> Assignment:
    rng = np.random.default_rng(seed)
    used: set[int] = set()
    picks = []
    for m, row in enumerate(table):
        free = [e for e in row if e.device not in used]
        if not free:
            raise UnassignedSubtask(m)
        pick = free[int(rng.integers(len(free)))]
        used.add(pick.device)
        picks.append((m, pick.device, pick.breakdown))
    return Assignment.from_pairs(picks)


def match_exact(table: EligibilityTable, cap: int = DEFAULT_EXACT_CAP) -> Assignment:
    """Exhaustive depth-first search over one-to-one assignments.

    Ties go to the lexicographically smallest device sequence, which falls out
    of visiting devices in ascending id order and keeping only strict
    improvements.
    """
    m_count = len(table)
    if m_count > cap:
        raise InstanceTooLarge(f"{m_count} subtasks exceeds exact-search cap {cap}")
    for m, row in enumerate(table):
        if not row:
            raise UnassignedSubtask(m)
    best_value = -np.inf
    best: list[Eligible] | None = None
    chosen: list[Eligible] = []
    used: set[int] = set()

    def dfs(m: int):
        nonlocal best_value, best
        if m == m_count:
            # sum in subtask order so the total matches Assignment.total_value bit for bit
            value = sum(e.breakdown.v_total for e in chosen)
            if value > best_value:
                best_value, best = value, list(chosen)
            return
        for e in table[m]:
            if e.device in used:
                continue
            used.add(e.device)
            chosen.append(e)
            dfs(m + 1)
            chosen.pop()
            used.discard(e.device)

    dfs(0)
    if best is None:
        raise UnassignedSubtask(m_count - 1, "no one-to-one assignment covers every subtask")
    return Assignment.from_pairs((m, e.device, e.breakdown) for m, e in enumerate(best))

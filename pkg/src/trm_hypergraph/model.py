"""Physical and value model of a collaborative-computing IoT cell.

Devices, subtasks, the distance-based channel, and the value of task
completion used everywhere as the matching score.  Everything here is an
immutable value or a pure function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import UnsupportedTaskType, ValidationError, ZeroDistance

#: bits per kilobyte (1 KB = 1024 bytes)
BITS_PER_KB = 8192
#: energy coefficient per cycle, with the CPU frequency taken in GHz
DEFAULT_ALPHA1 = 1e-11
#: SNR threshold giving a 1 Mbps floor at 5 MHz bandwidth
DEFAULT_SNR_THRESHOLD = 2.0 ** 0.2 - 1.0


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValidationError(f"non-finite position {self!r}")

    def distance(self, other: Position) -> float:
        return math.sqrt((self.x - other.x) ** 2 + (self.y - other.y) ** 2
                         + (self.z - other.z) ** 2)


@dataclass(frozen=True)
class DeviceSpec:
    """One IoT device: single-core CPU, single antenna."""

    id: int
    cpu_freq: float  # Hz
    position: Position
    supported_types: frozenset[int]
    tx_power: float  # W

    def __post_init__(self):
        object.__setattr__(self, "supported_types", frozenset(self.supported_types))
        if not self.cpu_freq > 0:
            raise ValidationError(f"device {self.id}: cpu_freq must be > 0")
        if not self.tx_power > 0:
            raise ValidationError(f"device {self.id}: tx_power must be > 0")
        if not self.supported_types:
            raise ValidationError(f"device {self.id}: supported_types is empty")
        if any(t < 0 for t in self.supported_types):
            raise ValidationError(f"device {self.id}: negative task type")

    def supports(self, task_type: int) -> bool:
        return task_type in self.supported_types


@dataclass(frozen=True)
class SubtaskSpec:
    data_size: float  # bits
    proc_density: float  # cycles/bit
    task_type: int
    deadline: float  # s

    def __post_init__(self):
        if not self.data_size > 0:
            raise ValidationError("subtask data_size must be > 0")
        if not self.proc_density > 0:
            raise ValidationError("subtask proc_density must be > 0")
        if not self.deadline > 0:
            raise ValidationError("subtask deadline must be > 0")
        if self.task_type < 0:
            raise ValidationError("subtask task_type must be >= 0")

    @property
    def cycles(self) -> float:
        return self.data_size * self.proc_density


@dataclass(frozen=True)
class TaskSpec:
    initiator: int
    subtasks: tuple[SubtaskSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "subtasks", tuple(self.subtasks))
        if not self.subtasks:
            raise ValidationError("a task needs at least one subtask")
        types = [s.task_type for s in self.subtasks]
        if len(set(types)) != len(types):
            raise ValidationError(f"subtask task types must be pairwise distinct, got {types}")


@dataclass(frozen=True)
class ChannelParams:
    bandwidth: float = 5e6
    noise_power: float = field(default_factory=lambda: dbm_to_watts(-100.0))
    snr_threshold: float = DEFAULT_SNR_THRESHOLD
    path_loss_exponent: float = 4.0

    def __post_init__(self):
        for name in ("bandwidth", "noise_power", "snr_threshold", "path_loss_exponent"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"channel {name} must be > 0")

    @property
    def min_rate(self) -> float:
        """Rate of a link sitting exactly at the SNR threshold."""
        return self.bandwidth * math.log2(1.0 + self.snr_threshold)


@dataclass(frozen=True)
class ValueWeights:
    xi_time: float = 0.5
    xi_energy: float = 0.5

    def __post_init__(self):
        for name in ("xi_time", "xi_energy"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class ValueBreakdown:
    t_tra: float
    t_exe: float
    t_total: float
    e_tra: float
    e_exe: float
    e_total: float
    e_expected: float
    v_time: float
    v_energy: float
    v_total: float


def channel_gain(a: Position, b: Position, params: ChannelParams) -> float:
    d = a.distance(b)
    if d == 0.0:
        raise ZeroDistance(f"coincident positions {a!r}")
    return d ** (-params.path_loss_exponent)


def snr(tx: DeviceSpec, rx: DeviceSpec, params: ChannelParams) -> float:
    return tx.tx_power * channel_gain(tx.position, rx.position, params) / params.noise_power


def link_rate(tx: DeviceSpec, rx: DeviceSpec, params: ChannelParams) -> float | None:
    """Achievable rate from ``tx`` to ``rx`` in bit/s, or None below the SNR threshold."""
    gamma = snr(tx, rx, params)
    if gamma < params.snr_threshold:
        return None
    return params.bandwidth * math.log2(1.0 + gamma)


def _cycle_energy(freq_hz: float, cycles: float, alpha1: float) -> float:
    f_ghz = freq_hz / 1e9
    return alpha1 * f_ghz * f_ghz * cycles


def expected_self_energy(initiator: DeviceSpec, sub: SubtaskSpec,
                         alpha1: float = DEFAULT_ALPHA1) -> float:
    """Energy the initiator would spend running ``sub`` locally.

    Defined whether or not the initiator supports the subtask's type.
    """
    return _cycle_energy(initiator.cpu_freq, sub.cycles, alpha1)


def evaluate_offload(initiator: DeviceSpec, collaborator: DeviceSpec, sub: SubtaskSpec,
                     rate: float, weights: ValueWeights,
                     alpha1: float = DEFAULT_ALPHA1) -> ValueBreakdown:
    """Time, energy and value of offloading ``sub`` from initiator to collaborator."""
    if not collaborator.supports(sub.task_type):
        raise UnsupportedTaskType(
            f"device {collaborator.id} does not support task type {sub.task_type}")
    if not rate > 0:
        raise ValidationError(f"rate must be > 0, got {rate}")
    t_tra = sub.data_size / rate
    t_exe = sub.cycles / collaborator.cpu_freq
    t_total = t_tra + t_exe
    e_tra = initiator.tx_power * t_tra
    e_exe = _cycle_energy(collaborator.cpu_freq, sub.cycles, alpha1)
    e_total = e_tra + e_exe
    e_expected = expected_self_energy(initiator, sub, alpha1)
    v_time = math.exp((sub.deadline - t_total) / sub.deadline)
    v_energy = math.exp((e_expected - e_total) / e_expected)
    v_total = weights.xi_time * v_time + weights.xi_energy * v_energy
    return ValueBreakdown(t_tra, t_exe, t_total, e_tra, e_exe, e_total, e_expected,
                          v_time, v_energy, v_total)

import pytest

from trm_hypergraph.model import BITS_PER_KB, ChannelParams, DeviceSpec, Position, SubtaskSpec, TaskSpec


def dev(i, x, y, types, f=1e9, p=0.1):
    return DeviceSpec(i, f, Position(x, y), frozenset(types), p)


@pytest.fixture
def channel():
    return ChannelParams()


@pytest.fixture
def sample_task():
    """Three subtasks with types 1, 4, 5 (sizes in KB, densities in cycles/bit)."""
    rows = [(1, 722, 600), (4, 272, 500), (5, 861, 400)]
    return TaskSpec(10, tuple(SubtaskSpec(kb * BITS_PER_KB, rho, t, 0.8) for t, kb, rho in rows))


def contested_devices():
    """Initiator 10 with two competing collaborators (1 near, 4 far) for type 1."""
    return [dev(10, 50, 50, {1, 2, 3}),
            dev(1, 55, 50, {1}), dev(4, 50, 80, {1}),
            dev(2, 50, 45, {2}), dev(5, 20, 20, {2}),
            dev(3, 45, 50, {3}), dev(6, 80, 80, {3})]


def contested_task():
    rows = [(1, 722, 600), (2, 272, 500), (3, 861, 700)]
    return TaskSpec(10, tuple(SubtaskSpec(kb * BITS_PER_KB, rho, t, 0.8) for t, kb, rho in rows))


# acceptance lines collected during the run, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

"""Game-theoretic matching of a task hypergraph onto a resource hypergraph.

Every (task hyperedge, resource hyperedge) pair that agrees on initiator and
task type and meets the rate requirement is a pure strategy of a symmetric
three-player clustering game.  Mutually compatible strategies (distinct
subtasks, distinct collaborators) reward each other; conflicting ones earn
nothing.  A growth transform on the simplex drives the population to an
evolutionarily stable cluster, which is then cut down to a one-to-one
assignment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO

import numpy as np

from . import kernels
from .assignment import Assignment, has_complete_matching
from .errors import DegeneratePopulation, EmptyCluster, NoCandidates, UnassignedSubtask, ValidationError
from .hypergraph import ResourceHypergraph, TaskHypergraph
from .model import DEFAULT_ALPHA1, ValueBreakdown, ValueWeights, evaluate_offload

AGGREGATIONS = ("slot", "mean")
INITIAL_STATES = ("score", "barycenter")


@dataclass(frozen=True)
class Strategy:
    task_edge_id: int
    resource_edge_id: int
    collaborator: int
    score: float
    breakdown: ValueBreakdown = field(repr=False, compare=False)


@dataclass(frozen=True)
class DynamicsConfig:
    max_iters: int = 1000
    epsilon: float = 1e-9
    threshold: float = 0.1  # cluster membership: q_n > threshold * max(q)
    aggregation: str = "mean"
    initial: str = "score"
    seed: int | None = None  # reserved for tie perturbation; unused

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be > 0")
        if not 0 <= self.threshold < 1:
            raise ValidationError("threshold must lie in [0, 1)")
        if self.aggregation not in AGGREGATIONS:
            raise ValidationError(f"aggregation must be one of {AGGREGATIONS}")
        if self.initial not in INITIAL_STATES:
            raise ValidationError(f"initial must be one of {INITIAL_STATES}")


@dataclass(frozen=True)
class PopulationState:
    q: np.ndarray
    iterations: int = 0
    converged: bool = False


@dataclass(frozen=True, eq=False)
class PayoffTensor:
    """Sparse symmetric payoff over unordered strategy triples.

    ``triples`` rows are sorted ``(a <= b <= c)``; absent triples pay zero.
    """

    n: int
    triples: np.ndarray  # (K, 3) int64
    values: np.ndarray  # (K,) float64

    def __post_init__(self):
        t = np.ascontiguousarray(self.triples, dtype=np.int64).reshape(-1, 3)
        object.__setattr__(self, "triples", t)
        object.__setattr__(self, "values", np.ascontiguousarray(self.values, dtype=np.float64))
        object.__setattr__(self, "_cols", tuple(np.ascontiguousarray(t[:, i]) for i in range(3)))

    @classmethod
    def from_dict(cls, n: int, entries: dict[tuple[int, int, int], float]) -> PayoffTensor:
        canon = {tuple(sorted(k)): float(v) for k, v in entries.items()}
        keys = sorted(canon)
        return cls(n, np.array(keys, dtype=np.int64).reshape(-1, 3),
                   np.array([canon[k] for k in keys], dtype=float))

    @property
    def columns(self):
        return (*self._cols, self.values)

    def payoff(self, i: int, j: int, k: int) -> float:
        lookup = self.__dict__.get("_lookup")
        if lookup is None:
            lookup = {tuple(r): v for r, v in zip(self.triples.tolist(), self.values.tolist())}
            object.__setattr__(self, "_lookup", lookup)
        return lookup.get(tuple(sorted((i, j, k))), 0.0)


def generate_candidates(th: TaskHypergraph, rh: ResourceHypergraph, weights: ValueWeights,
                        alpha1: float = DEFAULT_ALPHA1) -> list[Strategy]:
    """Coarse matches of every task hyperedge against the resource hypergraph."""
    initiator = rh.devices.get(th.initiator)
    if initiator is None:
        raise ValidationError(f"initiator {th.initiator} is not in the resource hypergraph")
    out = []
    for tid, te in enumerate(th.edges):
        sub = te.subtask_spec()
        found = 0
        for rid, re_ in rh.edges_from(th.initiator, te.task_type):
            if re_.weight < te.weight:
                continue
            bd = evaluate_offload(initiator, rh.devices[re_.collaborator], sub, re_.weight,
                                  weights, alpha1)
            out.append(Strategy(tid, rid, re_.collaborator, bd.v_total, bd))
            found += 1
        if not found:
            raise NoCandidates(tid)
    return out


def conflict_matrix(strategies: Sequence[Strategy]) -> np.ndarray:
    """Boolean N x N: True where two distinct strategies share a subtask or a collaborator."""
    task = np.array([s.task_edge_id for s in strategies])
    dev = np.array([s.collaborator for s in strategies])
    c = (task[:, None] == task[None, :]) | (dev[:, None] == dev[None, :])
    np.fill_diagonal(c, False)
    return c


def build_payoff(strategies: Sequence[Strategy], aggregation: str = "mean") -> PayoffTensor:
    """Payoff tensor of the clustering game.

    Scores are normalized by the best one.  A triple pays only if its
    distinct members are pairwise compatible.  With ``"slot"`` it pays the
    sum of its distinct members' scores divided by three, so a repeated
    strategy fills one slot and leaves the others empty; ``"mean"`` pays
    their arithmetic mean instead.
    """
    n = len(strategies)
    if n < 1:
        raise ValidationError("need at least one strategy")
    if aggregation not in AGGREGATIONS:
        raise ValidationError(f"unknown aggregation {aggregation!r}")
    scores = np.array([s.score for s in strategies], dtype=float)
    top = scores.max()
    if not top > 0:
        raise ValidationError("all strategy scores are zero")
    s = scores / top
    compat = ~conflict_matrix(strategies)

    rows = [np.stack([np.arange(n)] * 3, axis=1)]
    vals = [s.copy()]
    ii, jj = np.nonzero(np.triu(compat, 1))
    if ii.size:
        pair_sum = s[ii] + s[jj]
        rows.append(np.stack([ii, ii, jj], axis=1))
        rows.append(np.stack([ii, jj, jj], axis=1))
        vals += [pair_sum, pair_sum]
        for i, j in zip(ii.tolist(), jj.tolist()):
            ks = np.nonzero(compat[i, j + 1:] & compat[j, j + 1:])[0] + j + 1
            if ks.size:
                rows.append(np.stack([np.full(ks.size, i), np.full(ks.size, j), ks], axis=1))
                vals.append(s[i] + s[j] + s[ks])
    triples = np.concatenate(rows).astype(np.int64)
    values = np.concatenate(vals)
    distinct = 1 + (triples[:, 0] != triples[:, 1]) + (triples[:, 1] != triples[:, 2])
    if aggregation == "mean":
        values = values / distinct
    else:
        values = values / 3.0
    order = np.lexsort((triples[:, 2], triples[:, 1], triples[:, 0]))
    return PayoffTensor(n, triples[order], values[order])


def _simplex(q) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 1 or np.any(q < 0) or abs(q.sum() - 1.0) > 1e-12:
        raise ValidationError("population state must lie on the standard simplex")
    return q


def expected_payoffs(pt: PayoffTensor, q) -> tuple[np.ndarray, float]:
    """Per-strategy payoff against a population ``q`` and the population mean."""
    q = _simplex(q.q if isinstance(q, PopulationState) else q)
    u = kernels.expected_payoffs(*pt.columns, q)
    return u, float(q @ u)


def baum_eagon_step(pt: PayoffTensor, q) -> PopulationState:
    q = _simplex(q.q if isinstance(q, PopulationState) else q)
    u = kernels.expected_payoffs(*pt.columns, q)
    total = float(q @ u)
    if not total > 0:
        raise DegeneratePopulation("mean payoff of the population is zero")
    new = q * u / total
    new /= new.sum()
    new[new < kernels.FLOOR] = 0.0
    return PopulationState(new)


def initial_state(strategies: Sequence[Strategy], kind: str = "score") -> np.ndarray:
    """Starting population: proportional to each candidate's score, or uniform."""
    n = len(strategies)
    if kind == "barycenter":
        return np.full(n, 1.0 / n)
    w = np.array([s.score for s in strategies], dtype=float)
    if not w.sum() > 0:
        return np.full(n, 1.0 / n)
    return w / w.sum()


def run_dynamics(pt: PayoffTensor, cfg: DynamicsConfig = DynamicsConfig(),
                 trace: TextIO | Callable[[int, float, float], None] | None = None,
                 q0=None) -> PopulationState:
    """Iterate from ``q0`` (the barycenter if omitted) until the state moves less than ``epsilon``.

    ``trace`` receives ``(t, mean payoff, max |dq|)`` per iteration, either as
    a callback or as CSV rows written to a text stream.
    """
    q0 = np.full(pt.n, 1.0 / pt.n) if q0 is None else _simplex(q0)
    if trace is None:
        q, iters, converged, status = kernels.run(*pt.columns, q0, cfg.max_iters, cfg.epsilon)
        if status:
            raise DegeneratePopulation("mean payoff of the population is zero")
        return PopulationState(q, iters, bool(converged))

    emit = trace if callable(trace) else _csv_trace(trace)
    state = PopulationState(q0)
    for t in range(1, cfg.max_iters + 1):
        nxt = baum_eagon_step(pt, state.q)
        delta = float(np.max(np.abs(nxt.q - state.q)))
        _, total = expected_payoffs(pt, nxt.q)
        emit(t, total, delta)
        state = PopulationState(nxt.q, t, delta < cfg.epsilon)
        if state.converged:
            break
    return state


def _csv_trace(stream: TextIO):
    stream.write("iteration,mean_payoff,max_delta\n")

    def emit(t, total, delta):
        stream.write(f"{t},{total:.12g},{delta:.6g}\n")
    return emit


def extract_ess_cluster(q, strategies: Sequence[Strategy],
                        cfg: DynamicsConfig = DynamicsConfig()) -> list[tuple[Strategy, float]]:
    q = np.asarray(q.q if isinstance(q, PopulationState) else q, dtype=float)
    top = float(q.max()) if q.size else 0.0
    if not top > 0:
        raise EmptyCluster("every strategy weight is zero")
    cut = cfg.threshold * top
    return [(s, float(w)) for s, w in zip(strategies, q) if w > cut]


def _by_weight(item: tuple[Strategy, float]):
    s, w = item
    return (-w, -s.score, s.task_edge_id, s.resource_edge_id)


def _greedy(ranked, n_edges, taken=None, used=None):
    taken = dict(taken or {})
    used = set(used or ())
    for s, _ in ranked:
        if s.task_edge_id in taken or s.collaborator in used:
            continue
        taken[s.task_edge_id] = s
        used.add(s.collaborator)
        if len(taken) == n_edges:
            break
    return taken, used


def resolve_one_to_one(cluster: Sequence[tuple[Strategy, float]], th: TaskHypergraph) -> Assignment:
    """Keep the heaviest match per subtask, repairing collaborator clashes greedily."""
    if not cluster:
        raise EmptyCluster("cannot resolve an empty cluster")
    taken, _ = _greedy(sorted(cluster, key=_by_weight), len(th.edges))
    for tid in range(len(th.edges)):
        if tid not in taken:
            raise UnassignedSubtask(th.edges[tid].subtask)
    return _to_assignment(taken, th)


def _complete(ranked, th: TaskHypergraph) -> dict[int, Strategy]:
    """Greedy by weight over all candidates, skipping picks that would strand a later subtask."""
    options: dict[int, list[int]] = {tid: [] for tid in range(len(th.edges))}
    for s, _ in ranked:
        options[s.task_edge_id].append(s.collaborator)
    if not has_complete_matching(list(options.values())):
        missing = next(t for t, o in options.items() if not o) if any(not o for o in options.values()) else 0
        raise UnassignedSubtask(th.edges[missing].subtask)
    taken: dict[int, Strategy] = {}
    used: set[int] = set()
    for s, _ in ranked:
        if s.task_edge_id in taken or s.collaborator in used:
            continue
        rest = [options[t] for t in options if t not in taken and t != s.task_edge_id]
        if has_complete_matching(rest, used | {s.collaborator}):
            taken[s.task_edge_id] = s
            used.add(s.collaborator)
    return taken


def _to_assignment(taken: dict[int, Strategy], th: TaskHypergraph) -> Assignment:
    return Assignment.from_pairs(
        (th.edges[tid].subtask, s.collaborator, s.breakdown) for tid, s in taken.items())


@dataclass(frozen=True)
class MatchResult:
    assignment: Assignment
    strategies: tuple[Strategy, ...]
    state: PopulationState
    cluster: tuple[tuple[Strategy, float], ...]
    fallback: bool  # True when the cluster alone did not cover every subtask


def match_detailed(th: TaskHypergraph, rh: ResourceHypergraph, weights: ValueWeights,
                   cfg: DynamicsConfig = DynamicsConfig(), alpha1: float = DEFAULT_ALPHA1,
                   trace=None) -> MatchResult:
    strategies = generate_candidates(th, rh, weights, alpha1)
    pt = build_payoff(strategies, cfg.aggregation)
    state = run_dynamics(pt, cfg, trace, initial_state(strategies, cfg.initial))
    cluster = extract_ess_cluster(state, strategies, cfg)
    try:
        assignment = resolve_one_to_one(cluster, th)
        fallback = False
    except UnassignedSubtask:
        taken = _complete(sorted(zip(strategies, state.q.tolist()), key=_by_weight), th)
        assignment = _to_assignment(taken, th)
        fallback = True
    return MatchResult(assignment, tuple(strategies), state, tuple(cluster), fallback)


def match(th: TaskHypergraph, rh: ResourceHypergraph, weights: ValueWeights,
          cfg: DynamicsConfig = DynamicsConfig(), alpha1: float = DEFAULT_ALPHA1) -> Assignment:
    return match_detailed(th, rh, weights, cfg, alpha1).assignment

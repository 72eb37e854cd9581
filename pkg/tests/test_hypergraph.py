import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trm_hypergraph.errors import DuplicateDeviceId
from trm_hypergraph.hypergraph import (DUMMY, add_device, build_resource_hypergraph,
                                       build_task_hypergraph, device_vertex,
                                       empty_resource_hypergraph, type_vertex)
from trm_hypergraph.model import ChannelParams, SubtaskSpec, TaskSpec, link_rate

from conftest import dev


def test_two_devices_shared_type(channel):
    h = build_resource_hypergraph([dev(1, 0, 0, {2, 3}), dev(2, 10, 0, {2, 4})], channel)
    assert [e.key for e in h.edges] == [(1, 2, 2), (2, 2, 1)]
    assert h.edges[0].weight == link_rate(h.devices[1], h.devices[2], channel)


def test_disjoint_types_and_single_device(channel):
    assert build_resource_hypergraph([dev(1, 0, 0, {1}), dev(2, 1, 0, {2})], channel).edges == ()
    assert build_resource_hypergraph([dev(1, 0, 0, {1})], channel).edges == ()


def test_out_of_range_pairs_dropped(channel):
    assert build_resource_hypergraph([dev(1, 0, 0, {1}), dev(2, 5000, 0, {1})], channel).edges == ()


def test_asymmetric_power_gives_directional_weights(channel):
    h = build_resource_hypergraph([dev(1, 0, 0, {1}, p=0.1), dev(2, 30, 0, {1}, p=0.2)], channel)
    assert h.edges[0].weight < h.edges[1].weight


def test_duplicate_ids(channel):
    with pytest.raises(DuplicateDeviceId):
        build_resource_hypergraph([dev(1, 0, 0, {1}), dev(1, 3, 0, {1})], channel)
    h = add_device(empty_resource_hypergraph(channel), dev(1, 0, 0, {1}))
    assert len(h.devices) == 1 and h.edges == ()
    with pytest.raises(DuplicateDeviceId):
        add_device(h, dev(1, 2, 0, {1}))


def test_add_device_leaves_input_untouched(channel):
    h1 = add_device(empty_resource_hypergraph(channel), dev(1, 0, 0, {1}))
    h2 = add_device(h1, dev(2, 5, 0, {1}))
    assert len(h1.edges) == 0 and len(h2.edges) == 2
    assert h2.edge_set() == build_resource_hypergraph([dev(1, 0, 0, {1}), dev(2, 5, 0, {1})],
                                                      channel).edge_set()


def _random_devices(rng, j, s=5):
    return [dev(i + 1, *rng.uniform(0, 100, 2), rng.choice(s, size=3, replace=False).tolist(),
                f=1e9, p=float(rng.choice([0.1, 0.15, 0.2]))) for i in range(j)]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_batch_incremental_equivalence(seed, j):
    rng = np.random.default_rng(seed)
    devices = _random_devices(rng, j)
    batch = build_resource_hypergraph(devices, ChannelParams())
    h = empty_resource_hypergraph(ChannelParams())
    for k in rng.permutation(j):
        h = add_device(h, devices[k])
    assert h.edge_set() == batch.edge_set()
    assert h.edges == batch.edges
    assert len(batch.edges) <= j * (j - 1) * 5
    # every edge satisfies type support on both ends and the rate threshold
    for e in batch.edges:
        assert batch.devices[e.initiator].supports(e.task_type)
        assert batch.devices[e.collaborator].supports(e.task_type)
        assert e.weight >= batch.min_rate


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_incidence_round_trip(seed):
    h = build_resource_hypergraph(_random_devices(np.random.default_rng(seed), 8), ChannelParams())
    inc = h.incidence
    for eid, e in enumerate(h.edges):
        assert len(e.vertices) == 3
        for v in e.vertices:
            assert v in h.vertices and eid in inc[v]
    for v, ids in inc.items():
        assert all(v in h.edges[i].vertices for i in ids)


def test_task_hypergraph_from_sample_task(sample_task, channel):
    th = build_task_hypergraph(sample_task, channel)
    assert len(th.edges) == 3
    assert [e.task_type for e in th.edges] == [1, 4, 5]
    assert th.vertices == {device_vertex(10), DUMMY, type_vertex(1), type_vertex(4), type_vertex(5)}
    assert th.incidence[DUMMY] == (0, 1, 2)
    assert th.edges[2].proc_density == 400 and th.edges[2].data_size == 861 * 8192
    assert all(e.weight == pytest.approx(1e6) for e in th.edges)
    for e, s in zip(th.edges, sample_task.subtasks):
        assert e.subtask_spec() == s


def test_task_hypergraph_single_and_deterministic(channel):
    task = TaskSpec(1, (SubtaskSpec(100, 500, 2, 0.5),))
    th = build_task_hypergraph(task, channel)
    assert len(th.edges) == 1 and len(th.vertices) == 3
    assert th == build_task_hypergraph(task, channel)


def test_json_round_trip(channel, sample_task):
    h = build_resource_hypergraph([dev(1, 0, 0, {2}), dev(2, 10, 0, {2})], channel)
    d = json.loads(json.dumps(h.to_dict()))
    assert d["hyperedges"][0]["vertices"] == ["a1", "o2", "a2"]
    assert d["vertices"] == ["a1", "a2", "o2"]
    t = json.loads(json.dumps(build_task_hypergraph(sample_task, channel).to_dict()))
    assert t["hyperedges"][1]["vertices"] == ["a10", "o4", "dummy"]

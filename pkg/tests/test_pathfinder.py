import pytest
from conftest import enumerate_loopless_paths

from qroute.netmodel import build_lattice
from qroute.pathfinder import (Path, build_path_info, collect_path_edges,
                               k_shortest_paths, path_lengths)


def active_lattice(rows, cols, kind="square", dead_edges=()):
    net = build_lattice(rows, cols, kind)
    for e in net.edges:
        e.capacity = 50
        e.fidelity = 0.9
        e.active = e.key not in set(dead_edges)
    net.phase = "purified"
    return net


def test_two_by_two_opposite_corners():
    net = active_lattice(2, 2)
    paths = k_shortest_paths(net, 0, 3, 2)
    assert [p.nodes for p in paths] == [(0, 1, 3), (0, 2, 3)]
    assert all(p.length == 2 for p in paths)
    # only two loopless routes exist at all, so asking for more returns two
    assert len(k_shortest_paths(net, 0, 3, 5)) == 2


def test_k1_single_shortest():
    net = active_lattice(3, 3)
    paths = k_shortest_paths(net, 0, 8, 1)
    assert len(paths) == 1
    assert paths[0].rank == 0
    assert paths[0].length == 4


def test_three_by_three_corner_six_monotone_paths():
    # C(4,2) = 6 staircase paths of length 4 between opposite corners
    net = active_lattice(3, 3)
    paths = k_shortest_paths(net, 0, 8, 6)
    assert len(paths) == 6
    assert all(p.length == 4 for p in paths)
    oracle = enumerate_loopless_paths(net, 0, 8)
    assert [p.nodes for p in paths] == [tuple(p) for p in oracle[:6]]


def test_matches_exhaustive_oracle_sample_pairs():
    net = active_lattice(3, 3)
    for s, t in [(0, 8), (1, 7), (2, 6), (3, 5), (0, 5)]:
        oracle = enumerate_loopless_paths(net, s, t)
        for k in (1, 3, 8):
            got = [p.nodes for p in k_shortest_paths(net, s, t, k)]
            assert got == [tuple(p) for p in oracle[:k]]


def test_respects_inactive_edges():
    net = active_lattice(3, 3, dead_edges=[(0, 1)])
    paths = k_shortest_paths(net, 0, 8, 8)
    for p in paths:
        assert (0, 1) not in p.edge_keys()
    oracle = enumerate_loopless_paths(net, 0, 8)
    assert [p.nodes for p in paths] == [tuple(q) for q in oracle[:8]]


def test_disconnected_returns_empty():
    # cut node 0 off completely
    net = active_lattice(2, 2, dead_edges=[(0, 1), (0, 2)])
    assert k_shortest_paths(net, 0, 3, 4) == []


def test_lengths_nondecreasing_and_rank0_is_bfs_distance():
    net = active_lattice(4, 4, dead_edges=[(5, 6), (9, 10)])
    paths = k_shortest_paths(net, 0, 15, 10)
    lengths = [p.length for p in paths]
    assert lengths == sorted(lengths)
    oracle = enumerate_loopless_paths(net, 0, 15)
    assert paths[0].length == len(oracle[0]) - 1


def test_argument_validation():
    net = active_lattice(2, 2)
    with pytest.raises(ValueError):
        k_shortest_paths(net, 0, 3, 0)
    with pytest.raises(ValueError):
        k_shortest_paths(net, 2, 2, 1)


def test_determinism():
    net = active_lattice(4, 4)
    a = k_shortest_paths(net, 0, 15, 9)
    b = k_shortest_paths(net, 0, 15, 9)
    assert a == b


def test_build_path_info_single_path():
    path = Path(0, 0, (0, 1, 2, 5))
    info = build_path_info([path])
    assert set(info) == {(0, 1), (1, 2), (2, 5)}
    orders = sorted(h.edge_order for entries in info.values() for h in entries)
    assert orders == [0, 1, 2]
    for entries in info.values():
        (h,) = entries
        assert h.request_id == 0 and h.path_rank == 0 and h.path_length == 3


def test_build_path_info_shared_edge():
    a = Path(0, 0, (0, 1, 2))
    b = Path(1, 0, (3, 1, 2))
    info = build_path_info([a, b])
    assert len(info[(1, 2)]) == 2
    assert {h.key for h in info[(1, 2)]} == {(0, 0), (1, 0)}


def test_build_path_info_empty():
    assert build_path_info([]) == {}


def test_collect_roundtrip():
    net = active_lattice(3, 3)
    paths = k_shortest_paths(net, 0, 8, 5, request_id=2)
    info = build_path_info(paths)
    edges = collect_path_edges(info)
    lengths = path_lengths(info)
    for p in paths:
        assert edges[p.key] == p.edge_keys()
        assert lengths[p.key] == p.length

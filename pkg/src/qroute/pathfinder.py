"""Loopless k-shortest-path enumeration (unit hop weights) and the per-edge
path information set."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable

from .netmodel import Edge, Network, Request

#: (request_id, path rank) identifies one enumerated path
PathKey = tuple[int, int]


def edge_key(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Path:
    """One loopless route for a request, ranked within its k-shortest output."""

    request_id: int
    rank: int
    nodes: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.nodes) - 1

    @property
    def key(self) -> PathKey:
        return (self.request_id, self.rank)

    def edge_keys(self) -> tuple[Edge, ...]:
        return tuple(edge_key(a, b) for a, b in zip(self.nodes, self.nodes[1:]))


@dataclass(frozen=True)
class PathInfoEntry:
    """Per-edge bookkeeping tuple [r, l, d, o]."""

    request_id: int
    path_rank: int
    path_length: int
    edge_order: int

    @property
    def key(self) -> PathKey:
        return (self.request_id, self.path_rank)


#: H: edge -> entries for every (request, path) traversal of that edge
PathInfoSet = dict[Edge, list[PathInfoEntry]]


def _lex_shortest(adj: dict[int, list[int]], s: int, t: int,
                  banned_nodes: frozenset[int] = frozenset(),
                  banned_edges: frozenset[Edge] = frozenset()) -> tuple[int, ...] | None:
    """Lexicographically smallest shortest s-t node sequence, or None.

    BFS from t gives hop distances; walking from s and always taking the
    smallest neighbor one hop closer to t yields the lexicographic minimum
    because all shortest sequences have equal length.
    """
    if s in banned_nodes or t in banned_nodes:
        return None
    dist = {t: 0}
    frontier = [t]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v in dist or v in banned_nodes or edge_key(u, v) in banned_edges:
                    continue
                dist[v] = dist[u] + 1
                nxt.append(v)
        frontier = nxt
    if s not in dist:
        return None
    nodes = [s]
    u = s
    while u != t:
        for v in adj[u]:
            if v in banned_nodes or edge_key(u, v) in banned_edges:
                continue
            if dist.get(v, -1) == dist[u] - 1:
                nodes.append(v)
                u = v
                break
        else:  # unreachable when dist[s] is finite
            return None
    return tuple(nodes)


def k_shortest_paths(net: Network, s: int, t: int, k: int,
                     request_id: int = 0) -> list[Path]:
    """Yen's algorithm over active edges with deterministic tie-breaking.

    Returns up to k loopless paths ordered by (length, node sequence); fewer
    when fewer exist, empty when s and t are disconnected in G'.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if s == t:
        raise ValueError("source and terminal must differ")
    adj = net.adjacency()
    first = _lex_shortest(adj, s, t)
    if first is None:
        return []
    accepted: list[tuple[int, ...]] = [first]
    candidates: list[tuple[int, tuple[int, ...]]] = []
    seen = {first}
    while len(accepted) < k:
        prev = accepted[-1]
        for i in range(len(prev) - 1):
            root = prev[:i + 1]
            banned_nodes = frozenset(root[:-1])
            banned_edges = frozenset(
                edge_key(p[i], p[i + 1]) for p in accepted if p[:i + 1] == root)
            spur = _lex_shortest(adj, root[-1], t, banned_nodes, banned_edges)
            if spur is None:
                continue
            cand = root[:-1] + spur
            if cand not in seen:
                seen.add(cand)
                heapq.heappush(candidates, (len(cand) - 1, cand))
        if not candidates:
            break
        _, best = heapq.heappop(candidates)
        accepted.append(best)
    return [Path(request_id, rank, nodes) for rank, nodes in enumerate(accepted)]


def find_request_paths(net: Network, requests: Iterable[Request],
                       k: int) -> dict[int, list[Path]]:
    """k shortest paths per request; a disconnected request maps to []."""
    return {r.id: k_shortest_paths(net, r.source, r.terminal, k, request_id=r.id)
            for r in requests}


def build_path_info(paths: Iterable[Path]) -> PathInfoSet:
    """Assemble H: one entry per (request, path) traversal of each edge."""
    info: PathInfoSet = {}
    for path in sorted(paths, key=lambda p: p.key):
        d = path.length
        for order, e in enumerate(path.edge_keys()):
            info.setdefault(e, []).append(
                PathInfoEntry(path.request_id, path.rank, d, order))
    return info


def collect_path_edges(info: PathInfoSet) -> dict[PathKey, tuple[Edge, ...]]:
    """Recover each path's traversal-ordered edge list from H."""
    acc: dict[PathKey, list[tuple[int, Edge]]] = {}
    for e, entries in info.items():
        for h in entries:
            acc.setdefault(h.key, []).append((h.edge_order, e))
    return {key: tuple(e for _, e in sorted(pairs))
            for key, pairs in sorted(acc.items())}


def path_lengths(info: PathInfoSet) -> dict[PathKey, int]:
    lengths: dict[PathKey, int] = {}
    for entries in info.values():
        for h in entries:
            lengths[h.key] = h.path_length
    return dict(sorted(lengths.items()))

"""Capacity-allocation scheduling: proportional share (PS), progressive
filling (PF), propagatory update (PU), and the short-board flow determination."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .netmodel import Edge, Network
from .pathfinder import (PathInfoEntry, PathInfoSet, PathKey,
                         collect_path_edges, path_lengths)

ALGORITHMS = ("PS", "PF", "PU")


@dataclass
class RoutingParams:
    """Free parameters X = {l_max, k, alpha, beta}; f_min is derived per window."""

    k: int = 10
    l_max: int = 10
    alpha: float = 1.0
    beta: float = 1.0
    f_min: int | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.l_max < 1:
            raise ValueError(f"l_max must be >= 1, got {self.l_max}")

    def require_f_min(self) -> int:
        if self.f_min is None:
            raise ValueError("f_min has not been derived; call compute_f_min first")
        return self.f_min


@dataclass
class ScheduleTable:
    """Per-edge, per-path allocated capacities; PU also keeps the desired table."""

    allocations: dict[Edge, dict[PathKey, int]]
    desired: dict[PathKey, int] | None = None


@dataclass
class RoutingOutcome:
    """Integer flows per path plus the bookkeeping metrics need."""

    algorithm: str
    flows: dict[PathKey, int]
    lengths: dict[PathKey, int]
    path_edges: dict[PathKey, tuple[Edge, ...]]
    schedule: ScheduleTable | None = field(default=None, compare=False)

    def request_ids(self) -> list[int]:
        return sorted({r for r, _ in self.flows})

    def request_flow(self, request_id: int) -> int:
        return sum(f for (r, _), f in self.flows.items() if r == request_id)

    def edge_usage(self) -> dict[Edge, int]:
        usage: dict[Edge, int] = {}
        for key, flow in self.flows.items():
            if flow <= 0:
                continue
            for e in self.path_edges[key]:
                usage[e] = usage.get(e, 0) + flow
        return dict(sorted(usage.items()))


def compute_f_min(net: Network, l_max: int) -> int:
    """Guaranteed per-path floor: floor(min active capacity / l_max).

    Call after deactivate_low_capacity_edges so the result is >= 1.
    """
    caps = [e.capacity for e in net.active_edges()]
    if not caps:
        raise ValueError("no active edges")
    return min(caps) // l_max


def truncate_edge_paths(entries: Sequence[PathInfoEntry], l_max: int) -> list[PathInfoEntry]:
    """Keep at most l_max entries of one edge's list, preferring short paths.

    An entry that is its request's only entry on this edge is kept
    unconditionally, evicting the longest non-sole entries instead; if sole
    entries alone exceed l_max the shortest of them win. Result is sorted by
    (request_id, rank).
    """
    order = lambda h: (h.request_id, h.path_rank)
    if len(entries) <= l_max:
        return sorted(entries, key=order)
    counts = Counter(h.request_id for h in entries)
    priority = lambda h: (h.path_length, h.request_id, h.path_rank)
    soles = sorted((h for h in entries if counts[h.request_id] == 1), key=priority)
    others = sorted((h for h in entries if counts[h.request_id] > 1), key=priority)
    if len(soles) >= l_max:
        kept = soles[:l_max]
    else:
        kept = soles + others[:l_max - len(soles)]
    return sorted(kept, key=order)


def fully_kept_paths(info: PathInfoSet, l_max: int) -> set[PathKey]:
    """Paths that survive truncation on every edge they traverse."""
    kept_on: dict[Edge, set[PathKey]] = {
        e: {h.key for h in truncate_edge_paths(entries, l_max)}
        for e, entries in info.items()}
    path_edges = collect_path_edges(info)
    return {key for key, edges in path_edges.items()
            if all(key in kept_on[e] for e in edges)}


def two_stage_weights(entries: Sequence[PathInfoEntry], alpha: float,
                      beta: float) -> dict[PathKey, float]:
    """Real-valued per-entry weights: request share ~ n_r^beta, then within a
    request shorter paths take more (share ~ d^-alpha). Weights sum to 1."""
    if not entries:
        raise ValueError("empty entry list")
    by_request: dict[int, list[PathInfoEntry]] = {}
    for h in sorted(entries, key=lambda h: h.key):
        by_request.setdefault(h.request_id, []).append(h)
    request_raw = {r: float(len(group)) ** beta for r, group in by_request.items()}
    request_total = sum(request_raw.values())
    weights: dict[PathKey, float] = {}
    for r, group in by_request.items():
        path_raw = [float(h.path_length) ** -alpha for h in group]
        path_total = sum(path_raw)
        for h, raw in zip(group, path_raw):
            weights[h.key] = (request_raw[r] / request_total) * (raw / path_total)
    return weights


def largest_remainder(quotas: Sequence[float], total: int) -> list[int]:
    """Hamilton apportionment of ``total`` units; ties favor earlier positions."""
    base = [math.floor(q) for q in quotas]
    short = total - sum(base)
    assert 0 <= short <= len(base), "quotas do not sum to total"
    order = sorted(range(len(base)), key=lambda i: (base[i] - quotas[i], i))
    for i in order[:short]:
        base[i] += 1
    return base


def _apportion_two_stage(entries: Sequence[PathInfoEntry], total: int,
                         path_exp: float, beta: float) -> dict[PathKey, int]:
    """Stage-wise integer apportionment: units go to requests by n_r^beta
    (ties by request id), then within each request by d^path_exp (ties by rank)."""
    ordered = sorted(entries, key=lambda h: h.key)
    by_request: dict[int, list[PathInfoEntry]] = {}
    for h in ordered:
        by_request.setdefault(h.request_id, []).append(h)
    requests = list(by_request)
    request_raw = [float(len(by_request[r])) ** beta for r in requests]
    raw_total = sum(request_raw)
    request_units = largest_remainder(
        [total * w / raw_total for w in request_raw], total)
    shares: dict[PathKey, int] = {}
    for r, units in zip(requests, request_units):
        group = by_request[r]
        path_raw = [float(h.path_length) ** path_exp for h in group]
        path_total = sum(path_raw)
        path_units = largest_remainder(
            [units * w / path_total for w in path_raw], units)
        for h, x in zip(group, path_units):
            shares[h.key] = x
    return shares


def proportional_share(net: Network, info: PathInfoSet,
                       params: RoutingParams) -> ScheduleTable:
    """Edge-local allocation: every kept entry gets the f_min floor, the rest
    of the capacity is split by the two-stage proportional rule."""
    f_min = params.require_f_min()
    caps = net.capacity_map()
    allocations: dict[Edge, dict[PathKey, int]] = {}
    for e in sorted(info):
        entries = info[e]
        if not entries:
            continue
        kept = truncate_edge_paths(entries, params.l_max)
        spare = caps[e] - f_min * len(kept)
        assert spare >= 0, "edge kept below l_max * f_min; was Step 1 skipped?"
        extra = _apportion_two_stage(kept, spare, -params.alpha, params.beta)
        allocations[e] = {h.key: f_min + extra[h.key] for h in kept}
    return ScheduleTable(allocations)


def flow_determination(table: ScheduleTable, info: PathInfoSet) -> RoutingOutcome:
    """Short-board constraint: a path's flow is its minimum per-edge allocation."""
    path_edges = collect_path_edges(info)
    lengths = path_lengths(info)
    flows = {key: min(table.allocations.get(e, {}).get(key, 0) for e in edges)
             for key, edges in path_edges.items()}
    return RoutingOutcome("PS", flows, lengths, path_edges, schedule=table)


def _progressive_fill(path_edges: dict[PathKey, tuple[Edge, ...]],
                      capacity: dict[Edge, int]) -> dict[PathKey, int]:
    """Uniform unit increments with integer saturation.

    Before each round, any edge whose slack is below its active-path count
    saturates and freezes those paths; the sub-count leftover stays
    unallocated. Remaining active paths then all gain one unit.
    """
    flows = {key: 0 for key in sorted(path_edges)}
    on_edge: dict[Edge, list[PathKey]] = {}
    for key, edges in path_edges.items():
        for e in edges:
            on_edge.setdefault(e, []).append(key)
    usage = {e: 0 for e in on_edge}
    active = set(flows)
    while active:
        frozen: set[PathKey] = set()
        for e, keys in on_edge.items():
            n_active = sum(1 for key in keys if key in active)
            if n_active and capacity[e] - usage[e] < n_active:
                frozen.update(key for key in keys if key in active)
        active -= frozen
        for key in active:
            flows[key] += 1
            for e in path_edges[key]:
                usage[e] += 1
    return flows


def progressive_filling(net: Network, info: PathInfoSet,
                        requests=None) -> RoutingOutcome:
    """Round-based water filling over all enumerated paths (no truncation,
    no f_min); the short-board constraint is built in."""
    path_edges = collect_path_edges(info)
    lengths = path_lengths(info)
    flows = _progressive_fill(path_edges, net.capacity_map())
    allocations: dict[Edge, dict[PathKey, int]] = {}
    for key, edges in path_edges.items():
        for e in edges:
            allocations.setdefault(e, {})[key] = flows[key]
    table = ScheduleTable({e: allocations[e] for e in sorted(allocations)})
    return RoutingOutcome("PF", flows, lengths, path_edges, schedule=table)


def _propagatory_core(capacity: dict[Edge, int],
                      entries_by_edge: dict[Edge, list[PathInfoEntry]],
                      path_edges: dict[PathKey, tuple[Edge, ...]],
                      f_min: int, alpha: float, beta: float) -> dict[PathKey, int]:
    """Iterate deduction/update passes over the desired-capacity table until a
    full pass changes nothing. ``entries_by_edge`` must only contain live paths."""
    f_max = {key: min(capacity[e] for e in path_edges[key])
             for key in sorted(path_edges)}
    usage = {e: sum(f_max[h.key] for h in entries)
             for e, entries in entries_by_edge.items()}
    edges = sorted(entries_by_edge)

    def deduct(e: Edge) -> None:
        entries = entries_by_edge[e]
        excess = usage[e] - capacity[e]
        assigned = _apportion_two_stage(entries, excess, alpha, beta)
        removed = 0
        for h in entries:
            cut = min(assigned[h.key], f_max[h.key] - f_min)
            if cut > 0:
                f_max[h.key] -= cut
                for e2 in path_edges[h.key]:
                    usage[e2] -= cut
                removed += cut
        while removed < excess:
            # residual lands on the currently largest desired capacity
            key = min((h.key for h in entries if f_max[h.key] > f_min),
                      key=lambda k: (-f_max[k], k))
            f_max[key] -= 1
            for e2 in path_edges[key]:
                usage[e2] -= 1
            removed += 1

    def raise_entries(e: Edge) -> bool:
        weights = two_stage_weights(entries_by_edge[e], alpha, beta)
        order = sorted(weights, key=lambda k: (-weights[k], k))
        changed = False
        while usage[e] < capacity[e]:
            for key in order:
                if all(usage[e2] + 1 <= capacity[e2] for e2 in path_edges[key]):
                    f_max[key] += 1
                    for e2 in path_edges[key]:
                        usage[e2] += 1
                    changed = True
                    break
            else:
                break
        return changed

    silent = 0
    while edges and silent < len(edges):
        # most oversubscribed edges first; ratio recomputed each pass
        order = sorted(edges, key=lambda e: (-usage[e] / capacity[e], e))
        for e in order:
            if usage[e] > capacity[e]:
                deduct(e)
                changed = True
            elif usage[e] < capacity[e]:
                changed = raise_entries(e)
            else:
                changed = False
            silent = 0 if changed else silent + 1
            if silent >= len(edges):
                break
    return f_max


def propagatory_update(net: Network, info: PathInfoSet, requests,
                       params: RoutingParams) -> RoutingOutcome:
    """Global schedule-table allocation: per-path desired capacities start at
    the bottleneck value, oversubscribed edges deduct (two-stage weights with
    longer paths deducted more, never below f_min), undersubscribed edges
    propagate freed capacity back by raising entries while every edge of the
    raised path stays within capacity."""
    f_min = params.require_f_min()
    caps = net.capacity_map()
    path_edges = collect_path_edges(info)
    lengths = path_lengths(info)
    kept_on = {e: truncate_edge_paths(info[e], params.l_max) for e in sorted(info)}
    kept_keys = {e: {h.key for h in kept} for e, kept in kept_on.items()}
    live = {key for key, edges in path_edges.items()
            if all(key in kept_keys[e] for e in edges)}
    entries_by_edge = {
        e: [h for h in kept if h.key in live]
        for e, kept in kept_on.items()}
    entries_by_edge = {e: hs for e, hs in entries_by_edge.items() if hs}
    live_edges = {key: path_edges[key] for key in sorted(live)}
    if live_edges:
        f_max = _propagatory_core(caps, entries_by_edge, live_edges,
                                  f_min, params.alpha, params.beta)
    else:
        f_max = {}
    flows = {key: f_max.get(key, 0) for key in path_edges}
    allocations = {e: {h.key: f_max[h.key] for h in entries}
                   for e, entries in entries_by_edge.items()}
    table = ScheduleTable(allocations, desired=dict(sorted(f_max.items())))
    return RoutingOutcome("PU", flows, lengths, path_edges, schedule=table)


def run_algorithm(name: str, net: Network, info: PathInfoSet,
                  params: RoutingParams, requests=None) -> RoutingOutcome:
    if name == "PS":
        outcome = flow_determination(proportional_share(net, info, params), info)
    elif name == "PF":
        outcome = progressive_filling(net, info, requests)
    elif name == "PU":
        outcome = propagatory_update(net, info, requests, params)
    else:
        raise ValueError(f"unknown algorithm {name!r}, expected one of {ALGORITHMS}")
    _assert_feasible(outcome, net)
    return outcome


def _assert_feasible(outcome: RoutingOutcome, net: Network) -> None:
    caps = net.capacity_map()
    for e, used in outcome.edge_usage().items():
        assert used <= caps[e], (
            f"{outcome.algorithm}: usage {used} exceeds capacity {caps[e]} on edge {e}")

"""Routing performance measures: throughput, traffic, delay, and fairness."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .netmodel import Edge, Network, Request
from .scheduler import RoutingOutcome


@dataclass
class MetricsReport:
    """All measures for one routing outcome; degenerate cases carry flags
    instead of raising so that sweeps never abort."""

    throughput: float
    min_flow: float
    utilization: dict[Edge, float]
    u_ave: float
    u_var: float
    stretch_per_request: dict[int, float]
    stretch: float
    jain_requests: float
    jain_paths: float
    jain_paths_normalized: float
    demand_satisfied: dict[int, bool]
    flags: tuple[str, ...] = field(default_factory=tuple)


def per_request_throughput(outcome: RoutingOutcome, requests: Sequence[Request],
                           p_in: float) -> dict[int, float]:
    """w_r * sum_l f^{r,l} * p_in^(d-1) for every request (0 when pathless)."""
    terms = {r.id: 0.0 for r in requests}
    weights = {r.id: r.weight for r in requests}
    for (r, l), flow in outcome.flows.items():
        if flow > 0:
            d = outcome.lengths[(r, l)]
            terms[r] += weights[r] * flow * p_in ** (d - 1)
    return terms


def throughput(outcome: RoutingOutcome, requests: Sequence[Request],
               p_in: float) -> float:
    if not 0.0 <= p_in <= 1.0:
        raise ValueError(f"p_in must be in [0, 1], got {p_in}")
    return sum(per_request_throughput(outcome, requests, p_in).values())


def min_flow(outcome: RoutingOutcome, requests: Sequence[Request],
             p_in: float) -> float:
    return min(per_request_throughput(outcome, requests, p_in).values())


def utilization_stats(outcome: RoutingOutcome,
                      net: Network) -> tuple[dict[Edge, float], float, float, bool]:
    """Utilization per utilized edge plus population mean/variance.

    Edges carrying zero flow are excluded; returns (u, 0, 0, True) when no
    edge is utilized.
    """
    caps = net.capacity_map()
    usage = outcome.edge_usage()
    u = {e: used / caps[e] for e, used in usage.items() if used > 0}
    if not u:
        return {}, 0.0, 0.0, True
    values = np.fromiter(u.values(), dtype=float)
    return u, float(values.mean()), float(values.var()), False


def stretch_factor(outcome: RoutingOutcome) -> tuple[dict[int, float], float, bool]:
    """Flow-weighted path length over the shortest length, per request and
    averaged; zero-flow requests are excluded, and an all-zero outcome is
    reported as (-, 0, flagged)."""
    per_request: dict[int, float] = {}
    for r in outcome.request_ids():
        total = weighted = 0
        for (rid, l), flow in outcome.flows.items():
            if rid == r and flow > 0:
                total += flow
                weighted += flow * outcome.lengths[(rid, l)]
        if total > 0:
            per_request[r] = weighted / (outcome.lengths[(r, 0)] * total)
    if not per_request:
        return {}, 0.0, True
    return per_request, float(np.mean(list(per_request.values()))), False


def jain_requests(outcome: RoutingOutcome, requests: Sequence[Request]) -> tuple[float, bool]:
    """Jain's index over weighted per-request flows; 0/0 reported as (0, flagged)."""
    if not requests:
        raise ValueError("at least one request is required")
    shares = [r.weight * outcome.request_flow(r.id) for r in requests]
    denom = len(requests) * sum(s * s for s in shares)
    if denom == 0:
        return 0.0, True
    return sum(shares) ** 2 / denom, False


def jain_paths(outcome: RoutingOutcome,
               requests: Sequence[Request]) -> tuple[float, float, bool]:
    """Per-path fairness, as printed (|R| normalizer, may exceed 1) and a
    normalized variant dividing by the total number of enumerated paths."""
    if not requests:
        raise ValueError("at least one request is required")
    weights = {r.id: r.weight for r in requests}
    numer = sum(weights[r] * f for (r, _), f in outcome.flows.items()) ** 2
    sq = sum(weights[r] ** 2 * f * f for (r, _), f in outcome.flows.items())
    if sq == 0:
        return 0.0, 0.0, True
    n_paths = len(outcome.flows)
    return numer / (len(requests) * sq), numer / (n_paths * sq), False


def evaluate_demand(outcome: RoutingOutcome,
                    requests: Sequence[Request]) -> dict[int, bool]:
    """Satisfied iff the realized aggregate flow covers the demand."""
    return {r.id: outcome.request_flow(r.id) >= r.demand for r in requests}


def evaluate(outcome: RoutingOutcome, net: Network, requests: Sequence[Request],
             p_in: float) -> MetricsReport:
    flags: list[str] = []
    u, u_ave, u_var, no_traffic = utilization_stats(outcome, net)
    if no_traffic:
        flags.append("no_traffic")
    per_req_stretch, stretch, stretch_undef = stretch_factor(outcome)
    if stretch_undef:
        flags.append("stretch_undefined")
    j_req, j_req_undef = jain_requests(outcome, requests)
    if j_req_undef:
        flags.append("jain_req_undefined")
    j_path, j_path_norm, j_path_undef = jain_paths(outcome, requests)
    if j_path_undef:
        flags.append("jain_path_undefined")
    elif j_path > 1.0:
        flags.append("jain_path_above_one")
    return MetricsReport(
        throughput=throughput(outcome, requests, p_in),
        min_flow=min_flow(outcome, requests, p_in),
        utilization=u,
        u_ave=u_ave,
        u_var=u_var,
        stretch_per_request=per_req_stretch,
        stretch=stretch,
        jain_requests=j_req,
        jain_paths=j_path,
        jain_paths_normalized=j_path_norm,
        demand_satisfied=evaluate_demand(outcome, requests),
        flags=tuple(flags),
    )


def zero_report(requests: Sequence[Request], reason: str) -> MetricsReport:
    """All-zero report for trials that could not route (no edges / no paths)."""
    return MetricsReport(
        throughput=0.0, min_flow=0.0, utilization={}, u_ave=0.0, u_var=0.0,
        stretch_per_request={}, stretch=0.0, jain_requests=0.0,
        jain_paths=0.0, jain_paths_normalized=0.0,
        demand_satisfied={r.id: False for r in requests},
        flags=("no_traffic", reason),
    )

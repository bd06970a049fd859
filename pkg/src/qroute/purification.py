"""Entanglement purification: trade edge capacity for fidelity until a threshold holds."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .netmodel import Network


@dataclass(frozen=True)
class PurificationOutcome:
    fidelity: float
    capacity: int
    rounds: int


def pump_fidelity(f: float) -> float:
    """One two-to-one purification round: F -> F^2 / (F^2 + (1-F)^2).

    Monotone increasing toward 1 for F > 0.5; 0.5 and the endpoints are
    fixed points.
    """
    good = f * f
    return good / (good + (1.0 - f) * (1.0 - f))


def purify_edge(fidelity: float, capacity: int, f_th: float,
                pump: Callable[[float], float] = pump_fidelity) -> PurificationOutcome:
    """Purify one edge until its fidelity reaches f_th, halving capacity per round.

    If the threshold is unreachable before the pairs run out, the edge keeps
    its last fidelity but ends with zero capacity (it will be deactivated).
    The ``pump`` map is swappable for alternative purification models.
    """
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError(f"fidelity must be in [0, 1], got {fidelity}")
    if capacity < 0:
        raise ValueError(f"capacity must be >= 0, got {capacity}")
    f, c, rounds = fidelity, capacity, 0
    while f < f_th and c >= 2:
        c //= 2
        f = pump(f)
        rounds += 1
    if f < f_th:
        return PurificationOutcome(f, 0, rounds)
    return PurificationOutcome(f, c, rounds)


def purify_network(net: Network, f_th: float) -> Network:
    """Apply purify_edge to every active edge; zero-capacity edges are deactivated."""
    if net.phase != "initialized":
        raise ValueError(f"purification runs on an initialized network, got phase {net.phase!r}")
    out = net.copy()
    for edge in out.edges:
        if not edge.active:
            continue
        result = purify_edge(edge.fidelity, edge.capacity, f_th)
        edge.fidelity = result.fidelity
        edge.capacity = result.capacity
        if edge.capacity == 0:
            edge.active = False
        else:
            assert edge.fidelity >= f_th
    out.phase = "purified"
    return out

"""Lattice topologies, stochastic edge initialization, topology revision, and requests."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

TOPOLOGIES = ("square", "hexagonal", "triangular")

#: canonical edge key: (smaller node id, larger node id)
Edge = tuple[int, int]


def node_id(x: int, y: int, cols: int) -> int:
    return y * cols + x


def node_xy(node: int, cols: int) -> tuple[int, int]:
    return node % cols, node // cols


def node_label(node: int, cols: int) -> str:
    """Two-digit display label, horizontal coordinate first (node 'xy')."""
    x, y = node_xy(node, cols)
    return f"{x}{y}"


@dataclass
class EdgeState:
    """One lattice edge holding entangled pairs between adjacent stations.

    After initialization, capacity 0 implies the edge is inactive and an
    active edge has capacity >= 1.
    """

    u: int
    v: int
    capacity: int = 0
    fidelity: float = 0.0
    active: bool = True

    @property
    def key(self) -> Edge:
        return (self.u, self.v)


@dataclass
class ScenarioParams:
    """Global quantum-layer parameters for one processing window."""

    c0: int = 100
    f_mean: float = 0.8
    f_std: float = 0.1
    f_th: float = 0.8
    p_in: float = 0.9
    p_out: float = 0.8

    def __post_init__(self) -> None:
        if self.c0 < 1:
            raise ValueError(f"c0 must be >= 1, got {self.c0}")
        if self.f_std < 0:
            raise ValueError(f"f_std must be >= 0, got {self.f_std}")
        if not 0.0 <= self.f_mean <= 1.0:
            raise ValueError(f"f_mean must be in [0, 1], got {self.f_mean}")
        if not 0.0 < self.f_th <= 1.0:
            raise ValueError(f"f_th must be in (0, 1], got {self.f_th}")
        for name in ("p_in", "p_out"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")


@dataclass(frozen=True)
class Request:
    """Connection request r = [s, t] with demand and scheduling weight."""

    id: int
    source: int
    terminal: int
    demand: int = 10
    weight: float = 1.0

    def __post_init__(self) -> None:
        if self.source == self.terminal:
            raise ValueError("source and terminal must differ")
        if self.demand < 1:
            raise ValueError(f"demand must be >= 1, got {self.demand}")
        if self.weight <= 0:
            raise ValueError(f"weight must be > 0, got {self.weight}")


@dataclass
class Network:
    """Lattice network with per-edge state.

    ``phase`` tracks the window lifecycle: raw -> initialized -> purified.
    """

    rows: int
    cols: int
    kind: str
    edges: list[EdgeState] = field(default_factory=list)
    phase: str = "raw"

    @property
    def node_count(self) -> int:
        return self.rows * self.cols

    def copy(self) -> "Network":
        return Network(self.rows, self.cols, self.kind,
                       [replace(e) for e in self.edges], self.phase)

    def edge_map(self) -> dict[Edge, EdgeState]:
        return {e.key: e for e in self.edges}

    def active_edges(self) -> list[EdgeState]:
        return [e for e in self.edges if e.active]

    def capacity_map(self) -> dict[Edge, int]:
        """Capacities of active edges only."""
        return {e.key: e.capacity for e in self.edges if e.active}

    def adjacency(self) -> dict[int, list[int]]:
        """Sorted adjacency lists over active edges."""
        adj: dict[int, list[int]] = {n: [] for n in range(self.node_count)}
        for e in self.edges:
            if e.active:
                adj[e.u].append(e.v)
                adj[e.v].append(e.u)
        for lst in adj.values():
            lst.sort()
        return adj


def expected_edge_count(rows: int, cols: int, kind: str) -> int:
    """Closed-form edge count for each topology kind."""
    horizontal = rows * (cols - 1)
    if kind == "square":
        return horizontal + cols * (rows - 1)
    if kind == "hexagonal":
        # brick wall: verticals only where (x + y) is even
        vertical = sum(1 for y in range(rows - 1) for x in range(cols) if (x + y) % 2 == 0)
        return horizontal + vertical
    if kind == "triangular":
        return horizontal + cols * (rows - 1) + (rows - 1) * (cols - 1)
    raise ValueError(f"unknown topology kind {kind!r}")


def build_lattice(rows: int, cols: int, kind: str = "square") -> Network:
    """Construct a raw lattice with all edges active and state unset.

    Square is the plain grid; hexagonal is the degree-3 brick-wall variant
    (vertical rungs only where x+y is even); triangular augments the square
    grid with one down-right diagonal per cell (degree 6 in the interior).
    """
    if rows < 2 or cols < 2:
        raise ValueError(f"lattice dimensions must be >= 2, got {rows}x{cols}")
    if kind not in TOPOLOGIES:
        raise ValueError(f"unknown topology kind {kind!r}, expected one of {TOPOLOGIES}")
    pairs: list[Edge] = []
    for y in range(rows):
        for x in range(cols):
            n = node_id(x, y, cols)
            if x + 1 < cols:
                pairs.append((n, node_id(x + 1, y, cols)))
            if y + 1 < rows and (kind != "hexagonal" or (x + y) % 2 == 0):
                pairs.append((n, node_id(x, y + 1, cols)))
            if kind == "triangular" and x + 1 < cols and y + 1 < rows:
                pairs.append((n, node_id(x + 1, y + 1, cols)))
    pairs.sort()
    return Network(rows, cols, kind, [EdgeState(u, v) for u, v in pairs], "raw")


def sample_edge_states(net: Network, params: ScenarioParams,
                       rng: np.random.Generator) -> Network:
    """Draw realized capacities and fidelities for every edge.

    Capacity is Binomial(C0, p_out) per edge (independent pair attempts);
    fidelity is Normal(F_mean, F_std) clipped into [0, 1]. Edges that realize
    zero capacity are deactivated.
    """
    if net.phase != "raw":
        raise ValueError(f"sample_edge_states requires a raw network, got phase {net.phase!r}")
    out = net.copy()
    n_edges = len(out.edges)
    caps = rng.binomial(params.c0, params.p_out, size=n_edges)
    fids = np.clip(rng.normal(params.f_mean, params.f_std, size=n_edges), 0.0, 1.0)
    for edge, cap, fid in zip(out.edges, caps, fids):
        edge.capacity = int(cap)
        edge.fidelity = float(fid)
        edge.active = edge.capacity > 0
    out.phase = "initialized"
    return out


def deactivate_low_capacity_edges(net: Network, l_max: int) -> Network:
    """Remove edges that cannot host l_max paths with one channel each (G -> G')."""
    if net.phase != "purified":
        raise ValueError(f"deactivation runs on a purified network, got phase {net.phase!r}")
    if l_max < 1:
        raise ValueError(f"l_max must be >= 1, got {l_max}")
    out = net.copy()
    for edge in out.edges:
        if edge.active and edge.capacity < l_max:
            edge.active = False
    return out


def inject_failures(net: Network, mode: str, count: int,
                    utilized, rng: np.random.Generator) -> Network:
    """Deactivate ``count`` uniformly-drawn utilized elements without replacement.

    ``utilized`` holds edge keys for mode "edge" and node ids for mode "node";
    a failed node takes down every incident edge.
    """
    if mode not in ("edge", "node"):
        raise ValueError(f"mode must be 'edge' or 'node', got {mode!r}")
    if count < 1:
        raise ValueError(f"failure count must be >= 1, got {count}")
    targets = sorted(utilized)
    if count > len(targets):
        raise ValueError(f"cannot fail {count} of {len(targets)} utilized {mode}s")
    picks = rng.choice(len(targets), size=count, replace=False)
    chosen = {targets[int(i)] for i in picks}
    out = net.copy()
    for edge in out.edges:
        if mode == "edge":
            if edge.key in chosen:
                edge.active = False
        else:
            if edge.u in chosen or edge.v in chosen:
                edge.active = False
    return out


def _offset_pairs(net: Network, distance: int) -> list[tuple[int, int]]:
    pairs = []
    for sy in range(net.rows):
        for sx in range(net.cols):
            for dy in (-distance, distance):
                for dx in (-distance, distance):
                    tx, ty = sx + dx, sy + dy
                    if 0 <= tx < net.cols and 0 <= ty < net.rows:
                        pairs.append((node_id(sx, sy, net.cols), node_id(tx, ty, net.cols)))
    return pairs


def generate_requests(net: Network, count: int, distance: int | None,
                      rng: np.random.Generator, demand: int = 10,
                      weight: float = 1.0, start_id: int = 0) -> list[Request]:
    """Draw connection requests; duplicates of s, t, or [s, t] are permitted.

    When ``distance`` is given, pairs satisfy |dx| = |dy| = distance in lattice
    coordinates; otherwise arbitrary distinct node pairs are drawn.
    """
    if count < 1:
        raise ValueError(f"request count must be >= 1, got {count}")
    requests: list[Request] = []
    if distance is not None:
        if distance < 1 or distance > min(net.rows, net.cols) - 1:
            raise ValueError(
                f"no node pair at offset ({distance}, {distance}) in a "
                f"{net.rows}x{net.cols} lattice")
        pairs = _offset_pairs(net, distance)
        for i in range(count):
            s, t = pairs[int(rng.integers(len(pairs)))]
            requests.append(Request(start_id + i, s, t, demand, weight))
    else:
        n_nodes = net.node_count
        for i in range(count):
            s = int(rng.integers(n_nodes))
            t = int(rng.integers(n_nodes))
            while t == s:
                t = int(rng.integers(n_nodes))
            requests.append(Request(start_id + i, s, t, demand, weight))
    return requests

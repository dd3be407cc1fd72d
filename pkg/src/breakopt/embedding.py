"""Hardware-style graphs and a greedy minor-embedding heuristic.

Chimera(m, n, t): an m x n grid of complete bipartite K_{t,t} cells with
vertical couplers between the left shores of vertically adjacent cells and
horizontal couplers between the right shores of horizontally adjacent cells.
Node id = (row * n + col) * 2t + shore * t + k.

Pegasus(m): qubits are coordinates (u, w, k, z) with u the orientation
(0 vertical, 1 horizontal), w in 0..m-1 the perpendicular tile offset,
k in 0..11 the qubit offset, z in 0..m-2 the parallel tile offset; node
id = ((u * m + w) * 12 + k) * (m - 1) + z. A vertical qubit occupies
column 12w + k and rows [12z + off(k), 12z + off(k) + 12); a horizontal
qubit occupies row 12w' + k' and the analogous column span; qubits are
coupled when their segments cross (internal), when they are consecutive
on the same line (external), or when they share a segment pairwise
(odd, k and k + 1 for even k). Offsets are (2,2,2,2,6,6,6,6,10,10,10,10)
for both orientations.
"""
from __future__ import annotations

import heapq
import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .qubo import SourceGraph
from .schedule import ValidationReport

_PEGASUS_OFFSETS = (2, 2, 2, 2, 6, 6, 6, 6, 10, 10, 10, 10)


@dataclass(frozen=True)
class HardwareGraph:
    family: str
    params: tuple[int, ...]
    num_nodes: int
    edges: list[tuple[int, int]]
    adjacency: dict[int, frozenset[int]]

    @property
    def nodes(self) -> list[int]:
        return sorted(self.adjacency)


def _make_graph(family: str, params: tuple[int, ...], num_nodes: int,
                edges: set[tuple[int, int]]) -> HardwareGraph:
    adj: dict[int, set[int]] = {v: set() for v in range(num_nodes)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return HardwareGraph(
        family=family, params=params, num_nodes=num_nodes,
        edges=sorted(edges),
        adjacency={v: frozenset(s) for v, s in adj.items()},
    )


def chimera_graph(m: int, n: int, t: int) -> HardwareGraph:
    if m < 1 or n < 1 or t < 1:
        raise ValueError("chimera dimensions must be >= 1")

    def nid(row, col, shore, k):
        return (row * n + col) * 2 * t + shore * t + k

    edges: set[tuple[int, int]] = set()
    for row in range(m):
        for col in range(n):
            for k1 in range(t):
                for k2 in range(t):
                    edges.add((nid(row, col, 0, k1), nid(row, col, 1, k2)))
            if row + 1 < m:
                for k in range(t):
                    edges.add((nid(row, col, 0, k), nid(row + 1, col, 0, k)))
            if col + 1 < n:
                for k in range(t):
                    edges.add((nid(row, col, 1, k), nid(row, col + 1, 1, k)))
    return _make_graph("chimera", (m, n, t), 2 * m * n * t, edges)


def pegasus_graph(m: int) -> HardwareGraph:
    if m < 2:
        raise ValueError("pegasus size must be >= 2")
    off = _PEGASUS_OFFSETS

    def nid(u, w, k, z):
        return ((u * m + w) * 12 + k) * (m - 1) + z

    edges: set[tuple[int, int]] = set()
    for u in range(2):
        for w in range(m):
            for k in range(12):
                for z in range(m - 1):
                    if z + 1 < m - 1:
                        edges.add((nid(u, w, k, z), nid(u, w, k, z + 1)))
                    if k % 2 == 0:
                        edges.add((nid(u, w, k, z), nid(u, w, k + 1, z)))
    # Internal couplers: vertical (0,w,k,z) crosses horizontal (1,w',k',z')
    # when each lies inside the other's 12-unit span.
    for w in range(m):
        for k in range(12):
            x = 12 * w + k
            for z in range(m - 1):
                y_lo = 12 * z + off[k]
                for y in range(y_lo, y_lo + 12):
                    w2, k2 = divmod(y, 12)
                    if not (0 <= w2 < m):
                        continue
                    z2, rem = divmod(x - off[k2], 12)
                    if rem >= 12 or not (0 <= z2 < m - 1):
                        continue
                    if 12 * z2 + off[k2] <= x < 12 * z2 + off[k2] + 12:
                        edges.add((nid(0, w, k, z), nid(1, w2, k2, z2)))
    return _make_graph("pegasus", (m,), 24 * m * (m - 1), edges)


@dataclass(frozen=True)
class Embedding:
    chains: dict[int, frozenset[int]]


@dataclass(frozen=True)
class EmbeddingStats:
    nodes: int
    edges: int
    qubits_used: int
    qubits_per_node: float
    max_chain_length: int


def _source_adjacency(src: SourceGraph) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {v: set() for v in range(src.num_nodes)}
    for a, b in src.edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


# Qubits already claimed by k chains cost _PENALTY**k to route through, so
# overlaps are allowed mid-search but discouraged. A gentle base keeps the
# first placement compact; refinement escalates it to drive overlaps out.
_PENALTY = 2.0
_MAX_PENALTY_EXP = 24


def _cost_vector(usage: np.ndarray, penalty: float, salt: int,
                 hist: np.ndarray) -> np.ndarray:
    """Per-qubit routing cost: exponential in current sharing, scaled by the
    accumulated contention history (negotiated congestion) and a small
    hash-based jitter that breaks the cost ties which would otherwise pin
    re-routing to a single fixed point."""
    ids = np.arange(usage.shape[0], dtype=np.int64)
    jitter = 1.0 + ((ids * 2654435761 + salt) % 997) / 9970.0
    cost = penalty ** np.minimum(usage, _MAX_PENALTY_EXP).astype(np.float64)
    cost *= jitter * (1.0 + 0.3 * hist)
    return np.minimum(cost, 1e30)


def _dijkstra_from_chain(adj: list[list[int]], chain: set[int], cost: list[float]):
    """Node-weighted shortest paths out of a chain (chain nodes cost 0)."""
    dist = [math.inf] * len(adj)
    parent = [-1] * len(adj)
    heap = [(0.0, g) for g in sorted(chain)]
    for g in chain:
        dist[g] = 0.0
    heapq.heapify(heap)
    push, pop = heapq.heappush, heapq.heappop
    while heap:
        d, g = pop(heap)
        if d > dist[g]:
            continue
        for nb in adj[g]:
            nd = d + cost[nb]
            if nd < dist[nb]:
                dist[nb] = nd
                parent[nb] = g
                push(heap, (nd, nb))
    return dist, parent


def _bfs_order(src_adj: dict[int, set[int]], rng: np.random.Generator) -> list[int]:
    """Randomized BFS order per component, so chains grow next to placed ones."""
    remaining = set(src_adj)
    order: list[int] = []
    while remaining:
        start = int(rng.choice(sorted(remaining)))
        queue = deque([start])
        remaining.discard(start)
        while queue:
            v = queue.popleft()
            order.append(v)
            nbrs = [u for u in sorted(src_adj[v]) if u in remaining]
            rng.shuffle(nbrs)
            for u in nbrs:
                remaining.discard(u)
                queue.append(u)
    return order


def _route_chain(v: int, src_adj: dict[int, set[int]], adj: list[list[int]],
                 chains: dict[int, set[int]], usage: np.ndarray,
                 rng: np.random.Generator, penalty: float,
                 hist: np.ndarray) -> set[int] | None:
    """Build a chain for v reaching every already-placed neighbor chain."""
    placed_nbrs = [u for u in sorted(src_adj[v]) if u in chains]
    if not placed_nbrs:
        candidates = np.flatnonzero(usage == usage.min())
        return {int(rng.choice(candidates))}
    salt = int(rng.integers(1 << 30))
    cost = _cost_vector(usage, penalty, salt, hist)
    cost_list = cost.tolist()
    dists, parents = [], []
    # each path counts the root's cost once; keep a single copy overall
    total = cost * (1 - len(placed_nbrs))
    for u in placed_nbrs:
        d, p = _dijkstra_from_chain(adj, chains[u], cost_list)
        du = np.array(d)
        members = list(chains[u])
        du[members] = cost[members]  # rooting inside u's chain costs the root
        total += du
        dists.append(d)
        parents.append(p)
    best_root = int(np.argmin(total))
    if not math.isfinite(total[best_root]):
        return None
    chain = {best_root}
    for u, p in zip(placed_nbrs, parents):
        node = best_root
        while node not in chains[u]:
            chain.add(node)
            node = p[node]
            if node < 0:  # root already inside chains[u]
                break
    return chain


def _try_embed_once(src_adj: dict[int, set[int]], adj: list[list[int]],
                    order: list[int], rng: np.random.Generator,
                    rounds: int = 24) -> dict[int, frozenset[int]] | None:
    usage = np.zeros(len(adj), dtype=np.int64)
    hist = np.zeros(len(adj))
    chains: dict[int, set[int]] = {}

    def assign(v: int, penalty: float) -> bool:
        chain = _route_chain(v, src_adj, adj, chains, usage, rng, penalty, hist)
        if chain is None:
            return False
        chains[v] = chain
        usage[list(chain)] += 1
        return True

    for v in order:
        if not assign(v, _PENALTY):
            return None
    # Rip out and re-route every chain repeatedly. While qubits are shared the
    # penalty escalates each round to push chains apart; once conflict-free,
    # extra rounds at the base penalty shrink the chains, and the smallest
    # conflict-free configuration seen is kept. Orders are reshuffled so the
    # deterministic re-routing cannot settle into a cycle.
    best: dict[int, frozenset[int]] | None = None
    best_total = math.inf
    reroute = list(order)
    stall, escalation = 0, 0
    for _ in range(rounds):
        if usage.max() <= 1:
            total = sum(len(c) for c in chains.values())
            if total < best_total:
                best = {v: frozenset(c) for v, c in chains.items()}
                best_total = total
                stall = 0
            else:
                stall += 1
                if stall >= 2:
                    break
            penalty = _PENALTY
        else:
            penalty = _PENALTY * 2.0 ** min(escalation, 10)
            escalation += 1
            hist[usage > 1] += 1.0
        rng.shuffle(reroute)
        for v in reroute:
            usage[list(chains.pop(v))] -= 1
            if not assign(v, penalty):
                return None
    if usage.max() <= 1:
        total = sum(len(c) for c in chains.values())
        if total < best_total:
            best = {v: frozenset(c) for v, c in chains.items()}
    return best


def find_embedding(src: SourceGraph, hw: HardwareGraph, seed: int = 0,
                   retries: int = 10) -> Embedding | None:
    """Randomized greedy chain routing; returns None when no embedding is found.

    Each attempt places source nodes in a randomized BFS order, rooting every
    chain at the qubit minimizing total weighted distance to the already-placed
    neighbor chains and absorbing the connecting paths. Qubits may be shared by
    several chains during search at a steep cost; chains are then iteratively
    re-routed until the sharing disappears, or the attempt is abandoned.
    """
    src_adj = _source_adjacency(src)
    if src.num_nodes > hw.num_nodes:
        return None
    adj = [sorted(hw.adjacency[g]) for g in range(hw.num_nodes)]
    for attempt in range(retries):
        rng = np.random.default_rng([seed, attempt])
        order = _bfs_order(src_adj, rng)
        chains = _try_embed_once(src_adj, adj, order, rng)
        if chains is not None:
            emb = Embedding(chains=chains)
            if verify_embedding(src, hw, emb).ok:
                return emb
    return None


def verify_embedding(src: SourceGraph, hw: HardwareGraph, emb: Embedding
                     ) -> ValidationReport:
    """Check chain disjointness, chain connectivity, and source-edge coverage."""
    violations: list[tuple[str, str]] = []
    seen: dict[int, int] = {}
    for v in range(src.num_nodes):
        chain = emb.chains.get(v)
        if not chain:
            violations.append(("missing-chain", f"source node {v}"))
            continue
        for g in chain:
            if g not in hw.adjacency:
                violations.append(("unknown-qubit", f"node {g} in chain {v}"))
            elif g in seen:
                violations.append(("chain-overlap", f"qubit {g} in chains {seen[g]} and {v}"))
            else:
                seen[g] = v
        # connectivity within the chain
        start = next(iter(chain))
        reached = {start}
        queue = deque([start])
        while queue:
            g = queue.popleft()
            for nb in hw.adjacency.get(g, ()):  # ignore unknown qubits here
                if nb in chain and nb not in reached:
                    reached.add(nb)
                    queue.append(nb)
        if reached != set(chain):
            violations.append(("chain-disconnected", f"source node {v}"))
    for a, b in src.edges:
        ca, cb = emb.chains.get(a), emb.chains.get(b)
        if not ca or not cb:
            continue
        if not any(nb in cb for g in ca for nb in hw.adjacency.get(g, ())):
            violations.append(("edge-uncovered", f"source edge ({a},{b})"))
    return ValidationReport(violations)


def embedding_stats(src: SourceGraph, emb: Embedding) -> EmbeddingStats:
    qubits = sum(len(c) for c in emb.chains.values())
    return EmbeddingStats(
        nodes=src.num_nodes,
        edges=len(src.edges),
        qubits_used=qubits,
        qubits_per_node=qubits / src.num_nodes,
        max_chain_length=max(len(c) for c in emb.chains.values()),
    )


def embedding_to_json(emb: Embedding) -> str:
    return json.dumps({str(v): sorted(c) for v, c in sorted(emb.chains.items())}, indent=2)


def embedding_from_json(text: str) -> Embedding:
    d = json.loads(text)
    return Embedding(chains={int(v): frozenset(c) for v, c in d.items()})

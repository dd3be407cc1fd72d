"""Unconstrained quadratic model of break minimization in a DRRT/MDRRT.

Each team pair gets one binary variable: fixing the bit of the pair's first
meeting at the lower-numbered team's cell determines all four cells the pair
occupies, so the home/away constraints vanish and the break count becomes a
quadratic function of one bit per pair.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .schedule import HAAssignment, Kind, Timetable


@dataclass(frozen=True)
class PairIndex:
    """One team pair: teams (a < b) meeting first at slot_first, then slot_second."""
    k: int
    team_a: int
    team_b: int
    slot_first: int
    slot_second: int

    @property
    def cells(self) -> set[tuple[int, int]]:
        return {
            (self.team_a, self.slot_first), (self.team_a, self.slot_second),
            (self.team_b, self.slot_first), (self.team_b, self.slot_second),
        }


@dataclass(frozen=True)
class VariableMap:
    """Cell (t, s) -> (variable k, sign): home bit = z_k if sign > 0 else 1 - z_k."""
    timetable: Timetable
    pairs: list[PairIndex]
    var_of: np.ndarray   # (num_teams, num_slots) int
    sign_of: np.ndarray  # (num_teams, num_slots) int8, +1 or -1

    @property
    def num_vars(self) -> int:
        return len(self.pairs)

    def cell(self, t: int, s: int) -> tuple[int, int]:
        return int(self.var_of[t, s]), int(self.sign_of[t, s])


@dataclass
class Qubo:
    """Minimize offset + sum(linear[i] x_i) + sum(quadratic[i,j] x_i x_j), x binary."""
    num_vars: int
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def add_linear(self, i: int, v: float) -> None:
        self.linear[i] = self.linear.get(i, 0.0) + v

    def add_quadratic(self, i: int, j: int, v: float) -> None:
        if i == j:
            raise ValueError("diagonal terms belong in linear")
        key = (i, j) if i < j else (j, i)
        self.quadratic[key] = self.quadratic.get(key, 0.0) + v


@dataclass(frozen=True)
class IsingModel:
    """Energy offset + sum(h_i s_i) + sum(J_ij s_i s_j) over spins s_i in {-1, +1}."""
    num_spins: int
    biases: dict[int, float]
    couplings: dict[tuple[int, int], float]
    offset: float

    def energy(self, spins) -> float:
        s = np.asarray(spins)
        e = self.offset
        for i, h in self.biases.items():
            e += h * s[i]
        for (i, j), v in self.couplings.items():
            e += v * s[i] * s[j]
        return float(e)


@dataclass(frozen=True)
class SourceGraph:
    num_nodes: int
    edges: list[tuple[int, int]]


def build_pairs(tt: Timetable) -> VariableMap:
    """Decompose a DRRT/MDRRT into team pairs and the per-cell sign convention.

    Variables are ordered by (team_a, team_b) lexicographically. Sign is + at
    the two cells fixed equal to the variable (first meeting row of team_a,
    second meeting row of team_b) and - at the other two.
    """
    if tt.kind is Kind.RRT:
        raise ValueError("build_pairs needs a DRRT or MDRRT (two meetings per pair)")
    meetings: dict[tuple[int, int], list[int]] = {}
    opp = tt.opponents
    for s in range(tt.num_slots):
        for t in range(tt.num_teams):
            o = int(opp[t, s])
            if t < o:
                meetings.setdefault((t, o), []).append(s)

    pairs: list[PairIndex] = []
    var_of = np.full(opp.shape, -1, dtype=np.int64)
    sign_of = np.zeros(opp.shape, dtype=np.int8)
    for k, (a, b) in enumerate(sorted(meetings)):
        slots = sorted(meetings[(a, b)])
        if len(slots) != 2:
            raise ValueError(f"pair ({a + 1},{b + 1}) meets {len(slots)} times, want 2")
        s1, s2 = slots
        pairs.append(PairIndex(k=k, team_a=a, team_b=b, slot_first=s1, slot_second=s2))
        var_of[a, s1] = var_of[a, s2] = var_of[b, s1] = var_of[b, s2] = k
        sign_of[a, s1] = sign_of[b, s2] = 1
        sign_of[b, s1] = sign_of[a, s2] = -1

    var_of.setflags(write=False)
    sign_of.setflags(write=False)
    return VariableMap(timetable=tt, pairs=pairs, var_of=var_of, sign_of=sign_of)


def build_qubo(tt: Timetable) -> tuple[Qubo, VariableMap]:
    """Quadratic break-count model: one indicator per (team, adjacent slot pair).

    [bit(t,s) == bit(t,s+1)] expands to 1 - z - z' + 2zz' when the two cells
    carry the same sign and z + z' - 2zz' when they differ. Cells of the same
    pair adjacent to each other always differ in sign and contribute nothing.
    """
    vm = build_pairs(tt)
    q = Qubo(num_vars=vm.num_vars)
    for t in range(tt.num_teams):
        for s in range(tt.num_slots - 1):
            k, sign = vm.cell(t, s)
            k2, sign2 = vm.cell(t, s + 1)
            if k == k2:
                continue  # same pair back to back: bits are complementary, no break
            if sign == sign2:
                q.offset += 1.0
                q.add_linear(k, -1.0)
                q.add_linear(k2, -1.0)
                q.add_quadratic(k, k2, 2.0)
            else:
                q.add_linear(k, 1.0)
                q.add_linear(k2, 1.0)
                q.add_quadratic(k, k2, -2.0)
    q.linear = {i: v for i, v in q.linear.items() if v != 0.0}
    q.quadratic = {key: v for key, v in q.quadratic.items() if v != 0.0}
    return q, vm


def decode(z, vm: VariableMap) -> HAAssignment:
    """Expand a pair-variable vector into the full home/away bit grid."""
    z = np.asarray(z, dtype=np.uint8)
    if z.shape != (vm.num_vars,):
        raise ValueError(f"expected {vm.num_vars} bits, got shape {z.shape}")
    bits = np.where(vm.sign_of > 0, z[vm.var_of], 1 - z[vm.var_of])
    return HAAssignment(timetable=vm.timetable, home_bits=bits)


def encode(ha: HAAssignment, vm: VariableMap) -> np.ndarray:
    """Read back the pair variables from an assignment (inverse of decode)."""
    z = np.empty(vm.num_vars, dtype=np.uint8)
    for p in vm.pairs:
        z[p.k] = ha.home_bits[p.team_a, p.slot_first]
    return z


def qubo_to_ising(q: Qubo) -> IsingModel:
    """Exact change of variables x = (s + 1) / 2; energies agree state for state."""
    h: dict[int, float] = {}
    j: dict[tuple[int, int], float] = {}
    offset = q.offset
    for i, c in q.linear.items():
        h[i] = h.get(i, 0.0) + c / 2.0
        offset += c / 2.0
    for (a, b), v in q.quadratic.items():
        j[(a, b)] = j.get((a, b), 0.0) + v / 4.0
        h[a] = h.get(a, 0.0) + v / 4.0
        h[b] = h.get(b, 0.0) + v / 4.0
        offset += v / 4.0
    return IsingModel(num_spins=q.num_vars, biases=h, couplings=j, offset=offset)


def source_graph(q: Qubo) -> SourceGraph:
    edges = sorted(key for key, v in q.quadratic.items() if v != 0.0)
    return SourceGraph(num_nodes=q.num_vars, edges=edges)


def degree_stats(g: SourceGraph) -> tuple[int, int, bool]:
    """(min degree, max degree, is the graph regular)."""
    deg = np.zeros(g.num_nodes, dtype=np.int64)
    for a, b in g.edges:
        deg[a] += 1
        deg[b] += 1
    if g.num_nodes == 0:
        return 0, 0, True
    lo, hi = int(deg.min()), int(deg.max())
    return lo, hi, lo == hi


# ---------------------------------------------------------------------------
# Serialization

def qubo_to_dict(q: Qubo) -> dict:
    return {
        "num_vars": q.num_vars,
        "offset": q.offset,
        "linear": sorted([i, v] for i, v in q.linear.items()),
        "quadratic": sorted([i, j, v] for (i, j), v in q.quadratic.items()),
    }


def qubo_from_dict(d: dict) -> Qubo:
    return Qubo(
        num_vars=int(d["num_vars"]),
        offset=float(d["offset"]),
        linear={int(i): float(v) for i, v in d["linear"]},
        quadratic={(int(i), int(j)): float(v) for i, j, v in d["quadratic"]},
    )


def qubo_to_json(q: Qubo) -> str:
    return json.dumps(qubo_to_dict(q), indent=2)


def qubo_from_json(text: str) -> Qubo:
    return qubo_from_dict(json.loads(text))


def qubo_to_coord_text(q: Qubo) -> str:
    """Plain-text coordinate list, one "i j value" per line (i == j for linear).

    Line 1 is a comment carrying num_vars and the constant offset. UTF-8,
    LF line endings, 0-based variable indices.
    """
    lines = [f"# qubo num_vars={q.num_vars} offset={q.offset!r}"]
    for i, v in sorted(q.linear.items()):
        lines.append(f"{i} {i} {v!r}")
    for (i, j), v in sorted(q.quadratic.items()):
        lines.append(f"{i} {j} {v!r}")
    return "\n".join(lines) + "\n"


def qubo_from_coord_text(text: str) -> Qubo:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0]
    if not header.startswith("#"):
        raise ValueError("coordinate text must start with a '# qubo ...' comment line")
    fields = dict(part.split("=", 1) for part in header.lstrip("# ").split()[1:])
    q = Qubo(num_vars=int(fields["num_vars"]), offset=float(fields["offset"]))
    for ln in lines[1:]:
        i_s, j_s, v_s = ln.split()
        i, j, v = int(i_s), int(j_s), float(v_s)
        if i == j:
            q.add_linear(i, v)
        else:
            q.add_quadratic(i, j, v)
    return q

"""Round-robin timetables, home/away assignments, and break counting.

Conventions: teams and slots are 0-based internally; all external formats
(JSON, CSV) use 1-based ids to match the usual tabular presentation.
Timetables are stored as an opponent matrix ``opponents[t, s]``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Kind(str, Enum):
    RRT = "RRT"
    DRRT = "DRRT"
    MDRRT = "MDRRT"


@dataclass(frozen=True)
class ValidationReport:
    violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class Timetable:
    kind: Kind
    opponents: np.ndarray  # shape (num_teams, num_slots), 0-based team ids

    def __post_init__(self):
        opp = np.asarray(self.opponents, dtype=np.int64)
        opp.setflags(write=False)
        object.__setattr__(self, "opponents", opp)

    @property
    def num_teams(self) -> int:
        return self.opponents.shape[0]

    @property
    def num_slots(self) -> int:
        return self.opponents.shape[1]

    def opponent(self, t: int, s: int) -> int:
        return int(self.opponents[t, s])


@dataclass(frozen=True)
class HAAssignment:
    """Home/away bits over a timetable: bit (t, s) is 1 for a home game."""

    timetable: Timetable
    home_bits: np.ndarray  # shape (num_teams, num_slots), values in {0, 1}

    def __post_init__(self):
        bits = np.asarray(self.home_bits, dtype=np.uint8)
        if bits.shape != self.timetable.opponents.shape:
            raise ValueError("home_bits shape does not match timetable")
        bits.setflags(write=False)
        object.__setattr__(self, "home_bits", bits)


def _check_team_count(num_teams: int) -> None:
    if num_teams < 4 or num_teams % 2 != 0:
        raise ValueError(f"num_teams must be even and >= 4, got {num_teams}")


def kirkman_rrt(num_teams: int) -> Timetable:
    """Single round robin over ``num_teams - 1`` slots via the circle method.

    Team ``num_teams`` (1-based) sits at the hub; in round r it plays team r,
    and the remaining teams pair up symmetrically around the wheel.
    Deterministic: no randomness involved.
    """
    _check_team_count(num_teams)
    n2 = num_teams
    wheel = n2 - 1
    opp = np.empty((n2, wheel), dtype=np.int64)
    for r in range(1, wheel + 1):
        s = r - 1
        opp[n2 - 1, s] = r - 1
        opp[r - 1, s] = n2 - 1
        for i in range(1, n2 // 2):
            a = (r + i - 1) % wheel
            b = (r - i - 1) % wheel
            opp[a, s] = b
            opp[b, s] = a
    return Timetable(kind=Kind.RRT, opponents=opp)


def _fisher_yates(n: int, rng: np.random.Generator) -> list[int]:
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def shuffle_slots(tt: Timetable, seed: int) -> Timetable:
    """Permute the slot columns uniformly at random (PCG64 + Fisher-Yates)."""
    if tt.kind is not Kind.RRT:
        raise ValueError("shuffle_slots expects an RRT timetable")
    rng = np.random.default_rng(seed)
    perm = _fisher_yates(tt.num_slots, rng)
    return Timetable(kind=Kind.RRT, opponents=tt.opponents[:, perm])


def mirror(tt: Timetable) -> Timetable:
    """Concatenate an RRT with a copy of itself, yielding an MDRRT."""
    if tt.kind is not Kind.RRT:
        raise ValueError("mirror expects an RRT timetable")
    return Timetable(kind=Kind.MDRRT,
                     opponents=np.concatenate([tt.opponents, tt.opponents], axis=1))


def random_mdrrt(num_teams: int, seed: int) -> Timetable:
    """Seeded MDRRT instance: Kirkman base, shuffled slots, mirrored."""
    return mirror(shuffle_slots(kirkman_rrt(num_teams), seed))


def random_drrt(num_teams: int, seed: int) -> Timetable:
    """Seeded DRRT instance: two independently slot-shuffled Kirkman halves.

    The second half uses sub-seed ``seed + 1`` so each pair still meets once
    per half but the halves generally do not mirror each other.
    """
    first = shuffle_slots(kirkman_rrt(num_teams), seed)
    second = shuffle_slots(kirkman_rrt(num_teams), seed + 1)
    return Timetable(kind=Kind.DRRT,
                     opponents=np.concatenate([first.opponents, second.opponents], axis=1))


def _expected_slots(kind: Kind, num_teams: int) -> int:
    return num_teams - 1 if kind is Kind.RRT else 2 * (num_teams - 1)


def validate(tt: Timetable) -> ValidationReport:
    """Check all kind-appropriate timetable invariants; report every violation."""
    violations: list[tuple[str, str]] = []
    n2, ns = tt.num_teams, tt.num_slots
    if n2 < 4 or n2 % 2 != 0:
        violations.append(("team-count", f"num_teams={n2}"))
    expected = _expected_slots(tt.kind, n2)
    if ns != expected:
        violations.append(("slot-count", f"expected {expected}, got {ns}"))

    opp = tt.opponents
    if opp.size and (opp.min() < 0 or opp.max() >= n2):
        violations.append(("opponent-range", "opponent id out of range"))
        return ValidationReport(violations)

    for s in range(ns):
        for t in range(n2):
            o = int(opp[t, s])
            if o == t:
                violations.append(("self-play", f"(t={t + 1}, s={s + 1})"))
            elif int(opp[o, s]) != t:
                violations.append(("involution", f"(t={t + 1}, s={s + 1})"))

    want = 1 if tt.kind is Kind.RRT else 2
    meetings: dict[tuple[int, int], int] = {}
    for s in range(ns):
        for t in range(n2):
            o = int(opp[t, s])
            if t < o:
                key = (t, o)
                meetings[key] = meetings.get(key, 0) + 1
    for a in range(n2):
        for b in range(a + 1, n2):
            got = meetings.get((a, b), 0)
            if got != want:
                violations.append(
                    ("pair-count", f"pair ({a + 1},{b + 1}) meets {got} times, want {want}"))

    if tt.kind is Kind.MDRRT and ns == expected:
        half = n2 - 1
        if not np.array_equal(opp[:, :half], opp[:, half:]):
            violations.append(("mirror", "second half differs from first half"))

    return ValidationReport(violations)


def _pair_meetings(tt: Timetable) -> dict[tuple[int, int], list[int]]:
    """Slots of each unordered pair's meetings, in slot order."""
    out: dict[tuple[int, int], list[int]] = {}
    opp = tt.opponents
    for s in range(tt.num_slots):
        for t in range(tt.num_teams):
            o = int(opp[t, s])
            if t < o:
                out.setdefault((t, o), []).append(s)
    return out


def validate_assignment(ha: HAAssignment) -> ValidationReport:
    """Check complementarity and the venue-swap constraints of a DRRT/MDRRT."""
    violations: list[tuple[str, str]] = []
    tt = ha.timetable
    bits = ha.home_bits
    opp = tt.opponents
    for s in range(tt.num_slots):
        for t in range(tt.num_teams):
            o = int(opp[t, s])
            if t < o and int(bits[t, s]) + int(bits[o, s]) != 1:
                violations.append(("complementarity", f"(t={t + 1}, s={s + 1})"))
    if tt.kind is not Kind.RRT:
        for (a, b), slots in _pair_meetings(tt).items():
            if len(slots) != 2:
                continue  # timetable defect; reported by validate()
            s1, s2 = slots
            if int(bits[a, s1]) + int(bits[a, s2]) != 1:
                violations.append(("venue-swap", f"pair ({a + 1},{b + 1}) team {a + 1}"))
            if int(bits[b, s2]) != int(bits[a, s1]):
                violations.append(("venue-swap", f"pair ({a + 1},{b + 1}) team {b + 1}"))
    return ValidationReport(violations)


def count_breaks(ha: HAAssignment) -> int:
    """Number of (team, slot) cells whose home/away bit repeats in the next slot."""
    bits = ha.home_bits
    return int(np.sum(bits[:, :-1] == bits[:, 1:]))


def lower_bound(kind: Kind, num_teams: int) -> int:
    """Known break lower bounds: num_teams - 2 for an RRT, 3*num_teams - 6 for an MDRRT."""
    _check_team_count(num_teams)
    if kind is Kind.RRT:
        return num_teams - 2
    if kind is Kind.MDRRT:
        return 3 * num_teams - 6
    return 0


# ---------------------------------------------------------------------------
# Serialization (1-based external ids)

def timetable_to_dict(tt: Timetable, ha: HAAssignment | None = None) -> dict:
    d = {
        "kind": tt.kind.value,
        "num_teams": tt.num_teams,
        "opponents": (tt.opponents + 1).tolist(),
    }
    if ha is not None:
        d["home_bits"] = ha.home_bits.astype(int).tolist()
    return d


def timetable_from_dict(d: dict) -> tuple[Timetable, HAAssignment | None]:
    opp = np.asarray(d["opponents"], dtype=np.int64) - 1
    tt = Timetable(kind=Kind(d["kind"]), opponents=opp)
    ha = None
    if d.get("home_bits") is not None:
        ha = HAAssignment(timetable=tt, home_bits=np.asarray(d["home_bits"]))
    return tt, ha


def timetable_to_json(tt: Timetable, ha: HAAssignment | None = None) -> str:
    return json.dumps(timetable_to_dict(tt, ha), indent=2)


def timetable_from_json(text: str) -> tuple[Timetable, HAAssignment | None]:
    return timetable_from_dict(json.loads(text))


def _grid_to_csv(grid: np.ndarray, num_slots: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["team"] + [f"slot{s + 1}" for s in range(num_slots)])
    for t, row in enumerate(grid):
        w.writerow([t + 1] + [int(v) for v in row])
    return buf.getvalue()


def timetable_to_csv(tt: Timetable) -> str:
    """CSV with rows = teams, columns = slots, cells = 1-based opponent ids."""
    return _grid_to_csv(tt.opponents + 1, tt.num_slots)


def assignment_to_csv(ha: HAAssignment) -> str:
    """CSV with rows = teams, columns = slots, cells = home bits."""
    return _grid_to_csv(ha.home_bits, ha.timetable.num_slots)

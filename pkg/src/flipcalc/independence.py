"""Flip independence, flip distance, and separation balls -- the metric
layer over flips.

Semantics follow the set-based definition uniformly: X and Y are
independent at radius r over S when some flip of the enumerated S-family
leaves no Gaifman path of length <= r from X∖S to Y, nor from X to Y∖S.
The older graph phrasing (distinct endpoints, no S carve-out) is available
behind ``legacy_graph_diagonal``.

Graphs enumerate S-definable flips; structures enumerate syntactic-flip
traces over S (one optional step per relation/split).  ``separation_ball``
on graphs uses a vectorized oracle that materializes every flip's
adjacency at once (bit-packed rows, one XOR-doubling per matrix bit), which
is what makes the rank/game solvers affordable.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .core import FiniteStructure, atomic_type_partition, set_distance
from .errors import BudgetExceeded, DomainError
from .flips import (
    FlipSpec,
    FlipTrace,
    apply_graph_flip,
    enumerate_s_definable_flips,
    enumerate_syntactic_traces,
)

__all__ = [
    "IndependenceQuery",
    "IndependenceWitness",
    "flip_independent",
    "flip_dist",
    "separation_ball",
    "GraphBallOracle",
    "default_ball_budget_bits",
]


def default_ball_budget_bits() -> int:
    return int(os.environ.get("FLIPCALC_BALL_BITS", "20"))


@dataclass(frozen=True)
class IndependenceQuery:
    structure: FiniteStructure
    S: frozenset
    r: int
    X: frozenset
    Y: frozenset
    budget_bits: Optional[int] = None
    legacy_graph_diagonal: bool = False

    def __post_init__(self):
        n = self.structure.universe_size
        for name in ("S", "X", "Y"):
            vals = frozenset(getattr(self, name))
            for u in vals:
                if not isinstance(u, int) or not 0 <= u < n:
                    raise DomainError(f"{name} element {u!r} outside universe of size {n}")
            object.__setattr__(self, name, vals)
        if self.r < 0:
            raise DomainError("radius must be >= 0")


@dataclass(frozen=True)
class IndependenceWitness:
    verdict: str  # "independent" | "dependent"
    witness: object = None  # FlipSpec (graphs) / FlipTrace (structures) when independent
    certificate_path: Optional[tuple] = None  # violating path when dependent

    @property
    def independent(self) -> bool:
        return self.verdict == "independent"


def _candidate_flips(structure: FiniteStructure, S, budget_bits) -> Iterator[tuple]:
    """Yield (witness object, flipped structure) over the S-flip family, in
    canonical order (identity first)."""
    if structure.graph:
        for spec in enumerate_s_definable_flips(structure, S, budget_bits):
            yield spec, apply_graph_flip(structure, spec)
    else:
        for trace, final in enumerate_syntactic_traces(structure, S, budget_bits):
            yield trace, final


def _forbidden_distance(flipped, X, Y, S, cutoff, legacy: bool):
    """Length of the shortest forbidden path in one flip (inf when none
    within the cutoff)."""
    if legacy:
        best = math.inf
        for a in sorted(X):
            targets = set(Y) - {a}
            if not targets:
                continue
            d = set_distance(flipped, (a,), targets, cutoff=cutoff)
            best = min(best, d)
        return best
    best = math.inf
    x_free = set(X) - set(S)
    y_free = set(Y) - set(S)
    if x_free and Y:
        best = min(best, set_distance(flipped, x_free, Y, cutoff=cutoff))
    if X and y_free:
        best = min(best, set_distance(flipped, X, y_free, cutoff=cutoff))
    return best


def _bfs_path(structure: FiniteStructure, sources, targets):
    """Deterministic shortest path (list of vertices) from the source set to
    the target set, or None.  Smallest-id tie-breaks throughout."""
    rows = structure.gaifman_bits()
    targets = set(targets)
    parent = {}
    frontier = sorted(set(sources))
    for s in frontier:
        parent[s] = None
    while frontier:
        hits = [v for v in frontier if v in targets]
        if hits:
            v = min(hits)
            path = [v]
            while parent[v] is not None:
                v = parent[v]
                path.append(v)
            return list(reversed(path))
        nxt = []
        for u in frontier:
            m = rows[u]
            while m:
                b = m & -m
                w = b.bit_length() - 1
                m ^= b
                if w not in parent:
                    parent[w] = u
                    nxt.append(w)
        frontier = sorted(nxt)
    return None


def _violating_path(flipped, X, Y, S, r, legacy: bool):
    if legacy:
        best = None
        for a in sorted(X):
            targets = set(Y) - {a}
            if not targets:
                continue
            p = _bfs_path(flipped, (a,), targets)
            if p is not None and len(p) - 1 <= r and (best is None or len(p) < len(best)):
                best = p
        return best
    x_free = set(X) - set(S)
    y_free = set(Y) - set(S)
    candidates = []
    if x_free and Y:
        p = _bfs_path(flipped, x_free, Y)
        if p is not None and len(p) - 1 <= r:
            candidates.append(p)
    if X and y_free:
        p = _bfs_path(flipped, X, y_free)
        if p is not None and len(p) - 1 <= r:
            candidates.append(p)
    return candidates[0] if candidates else None


def flip_independent(query: IndependenceQuery) -> IndependenceWitness:
    """Decide X ⫝(r,S) Y over the enumerated flip family.

    An independent verdict carries the first witnessing flip (re-verified
    by re-applying it); a dependent verdict carries a violating path from
    the canonically first flip.
    """
    first = None
    for wobj, flipped in _candidate_flips(query.structure, query.S, query.budget_bits):
        if first is None:
            first = (wobj, flipped)
        d = _forbidden_distance(
            flipped, query.X, query.Y, query.S, query.r, query.legacy_graph_diagonal
        )
        if d > query.r:
            replayed = (
                apply_graph_flip(query.structure, wobj)
                if isinstance(wobj, FlipSpec)
                else wobj.replay(query.structure)
            )
            check = _forbidden_distance(
                replayed, query.X, query.Y, query.S, query.r, query.legacy_graph_diagonal
            )
            if not check > query.r:
                raise DomainError("independence witness failed re-verification")
            return IndependenceWitness("independent", witness=wobj)
    _, flipped = first
    path = _violating_path(
        flipped, query.X, query.Y, query.S, query.r, query.legacy_graph_diagonal
    )
    return IndependenceWitness(
        "dependent", certificate_path=tuple(path) if path is not None else None
    )


def flip_dist(
    structure: FiniteStructure,
    S,
    u: int,
    v: int,
    r_max: Optional[int] = None,
    budget_bits: Optional[int] = None,
    legacy_graph_diagonal: bool = False,
):
    """max over the enumerated S-flips of dist(u, v), i.e. the least radius
    at which the pair stops being flip-independent.

    Returns math.inf both when some flip disconnects the pair and when the
    maximum exceeds r_max (default 2n, which no finite Gaifman distance
    reaches, so the cap is exact by default).
    """
    n = structure.universe_size
    if r_max is None:
        r_max = 2 * n
    X, Y, Sset = frozenset({u}), frozenset({v}), frozenset(S)
    IndependenceQuery(structure, Sset, 0, X, Y)  # validates ids
    best = 0
    for _, flipped in _candidate_flips(structure, Sset, budget_bits):
        d = _forbidden_distance(flipped, X, Y, Sset, r_max, legacy_graph_diagonal)
        if d > r_max:
            return math.inf
        best = max(best, d)
    return best


# ---------------------------------------------------------------------------
# Separation balls
# ---------------------------------------------------------------------------


class GraphBallOracle:
    """All S-definable flips of one graph, materialized as bit-packed
    adjacency rows, answering B^r_S(v) queries with vectorized reachability.

    Construction doubles a row array once per effective matrix bit
    (diagonal bits of singleton classes toggle nothing and are skipped), so
    the array has one row block per flip.  A fully discrete partition
    short-circuits: per-edge toggles can isolate any vertex, so the ball is
    {v} (or empty for v in S).
    """

    def __init__(self, graph: FiniteStructure, S, budget_bits: Optional[int] = None):
        if not graph.graph:
            raise DomainError("ball oracle requires a graph-flagged structure")
        n = graph.universe_size
        if n > 63:
            raise BudgetExceeded(f"ball oracle packs rows into 64-bit words; n={n} is too large")
        budget = default_ball_budget_bits() if budget_bits is None else budget_bits
        self.n = n
        self.S = frozenset(S)
        part = atomic_type_partition(graph, self.S)
        masks = []
        for cls in part.classes:
            m = 0
            for t in cls.members:
                m |= 1 << t[0]
            masks.append(m)
        self.discrete = all(m.bit_count() <= 1 for m in masks)
        if self.discrete:
            self.arr = None
            return
        count = len(masks)
        deltas = []
        for i in range(count):
            for j in range(i, count):
                if i == j:
                    if masks[i].bit_count() <= 1:
                        continue  # no distinct pair inside a singleton class
                    delta = [
                        masks[i] & ~(1 << u) if (masks[i] >> u) & 1 else 0 for u in range(n)
                    ]
                else:
                    delta = [
                        masks[j] if (masks[i] >> u) & 1 else (masks[i] if (masks[j] >> u) & 1 else 0)
                        for u in range(n)
                    ]
                deltas.append(delta)
        if len(deltas) > budget:
            raise BudgetExceeded(
                f"ball oracle needs {len(deltas)} matrix bits, budget is {budget}",
                required=len(deltas),
                budget=budget,
            )
        arr = np.array([graph.gaifman_bits()], dtype=np.uint64)
        for delta in deltas:
            d = np.array(delta, dtype=np.uint64)
            arr = np.concatenate([arr, arr ^ d], axis=0)
        self.arr = arr

    def ball(self, v: int, r: int) -> frozenset:
        """B^r_S(v) = the elements flip-dependent on v at radius r."""
        if not 0 <= v < self.n:
            raise DomainError(f"vertex {v} outside universe of size {self.n}")
        if self.discrete:
            return frozenset() if v in self.S else frozenset({v})
        reached = np.full(self.arr.shape[0], np.uint64(1 << v))
        for _ in range(r):
            new = reached.copy()
            for u in range(self.n):
                bit = np.uint64(1 << u)
                new |= np.where((reached & bit) != 0, self.arr[:, u], np.uint64(0))
            if np.array_equal(new, reached):
                break
            reached = new
        and_mask = int(np.bitwise_and.reduce(reached))
        members = set()
        while and_mask:
            b = and_mask & -and_mask
            members.add(b.bit_length() - 1)
            and_mask ^= b
        if v in self.S:
            members -= self.S
        return frozenset(members)


@lru_cache(maxsize=64)
def _graph_ball_oracle(graph: FiniteStructure, S: frozenset, budget: int) -> GraphBallOracle:
    return GraphBallOracle(graph, S, budget)


def _structure_ball(structure: FiniteStructure, S, r: int, v: int, budget_bits) -> frozenset:
    Sset = frozenset(S)
    n = structure.universe_size
    members = set(range(n))
    for _, flipped in _candidate_flips(structure, Sset, budget_bits):
        rows = flipped.gaifman_bits()
        reached = 1 << v
        for _ in range(r):
            new = reached
            m = reached
            while m:
                b = m & -m
                new |= rows[b.bit_length() - 1]
                m ^= b
            if new == reached:
                break
            reached = new
        keep = set()
        for u in list(members):
            if (reached >> u) & 1:
                keep.add(u)
        members = keep if v not in Sset else keep - Sset
        if not members:
            break
    return frozenset(members)


def separation_ball(
    structure: FiniteStructure, S, r: int, v: int, budget_bits: Optional[int] = None
) -> frozenset:
    """Exactly the elements u with v ⫝̸(r,S) u, over the enumerated family."""
    n = structure.universe_size
    if not 0 <= v < n:
        raise DomainError(f"vertex {v} outside universe of size {n}")
    if r < 0:
        raise DomainError("radius must be >= 0")
    Sset = frozenset(S)
    for s in Sset:
        if not isinstance(s, int) or not 0 <= s < n:
            raise DomainError(f"parameter {s!r} outside universe of size {n}")
    if structure.graph:
        budget = default_ball_budget_bits() if budget_bits is None else budget_bits
        return _graph_ball_oracle(structure, Sset, budget).ball(v, r)
    return _structure_ball(structure, Sset, r, v, budget_bits)

"""Scattered sets after flips, and sparsity/stability diagnostics.

This module answers two families of questions about a finite structure:

* flatness -- given a vertex set ``X``, a radius ``r`` and a parameter
  budget ``k``, how large a subset ``Y`` of ``X`` can be made pairwise
  far apart (Gaifman distance ``> r``) by applying a single flip from
  the family definable over some ``S`` with ``|S| <= k``?  The search
  returns a :class:`FlatnessCertificate` that re-verifies itself.

* sparsity / order -- does a graph contain a ``K_{t,t}`` subgraph, or a
  subdivided clique?  How long a ladder (the order pattern
  ``holds(a_i, b_j)  iff  i <= j``) can an atomic formula realize?  Which
  of the four bipartite patterns ``=, !=, <=, >=`` appear, and at what
  size?

Canonical generators (half-graphs, stars, paths, cliques, bicliques) are
included so callers and fixtures share one vocabulary.
"""

from __future__ import annotations

import itertools
import operator
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .core import FiniteStructure, PartitionedAtom, gaifman
from .errors import BudgetExceeded, DomainError
from .flips import FlipTrace, GraphFlipStep
from .independence import _candidate_flips

__all__ = [
    "EXACT_SCATTER_LIMIT",
    "EFFORT_LEVELS",
    "DEFAULT_SEARCH_NODES",
    "PATTERNS",
    "FlatnessCertificate",
    "flip_flatness_search",
    "BicliqueWitness",
    "biclique_subgraph",
    "SubdivisionWitness",
    "subdivided_clique_search",
    "LadderCertificate",
    "ladder_index",
    "edge_atom",
    "PatternWitness",
    "PatternReport",
    "bipartite_pattern",
    "half_graph",
    "star",
    "path",
    "clique",
    "biclique",
]

# Scattered-set extraction is an exact maximum-independent-set solve up to
# this many candidates; beyond it a deterministic greedy takes over.
EXACT_SCATTER_LIMIT = 20

# Outer search strategies for the parameter set, weakest first.
EFFORT_LEVELS = ("greedy", "exhaustive")

# Node budget shared by the exponential searches in this module.
DEFAULT_SEARCH_NODES = 200_000

_GREEDY_BEAM = 4


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _reach_mask(rows, v: int, r: int) -> int:
    """Bitmask of vertices within Gaifman distance r of v."""
    seen = 1 << v
    frontier = seen
    for _ in range(r):
        grown = 0
        for u in _bits(frontier):
            grown |= rows[u]
        frontier = grown & ~seen
        if not frontier:
            break
        seen |= frontier
    return seen


# ---------------------------------------------------------------------------
# Flatness certificates and search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlatnessCertificate:
    """A verified witness that ``Y`` is scattered after one definable flip.

    ``trace`` is replayed against ``structure`` on construction and the
    pairwise distance bound is re-checked, so a certificate cannot exist
    in an invalid state.  ``exact`` means ``|Y|`` is known to be the best
    achievable over the whole ``|S| <= k`` flip family; ``partial`` marks
    results truncated by a budget.
    """

    structure: FiniteStructure
    X: frozenset
    r: int
    k: int
    S: frozenset
    trace: FlipTrace
    Y: frozenset
    exact: bool = True
    partial: bool = False

    def __post_init__(self):
        object.__setattr__(self, "X", frozenset(self.X))
        object.__setattr__(self, "S", frozenset(self.S))
        object.__setattr__(self, "Y", frozenset(self.Y))
        n = self.structure.universe_size
        if self.r < 0:
            raise DomainError("radius must be nonnegative")
        if self.k < 0:
            raise DomainError("parameter budget must be nonnegative")
        for v in sorted(self.X | self.S):
            if not (0 <= v < n):
                raise DomainError(f"element {v} outside the universe of size {n}")
        if not self.Y <= self.X:
            raise DomainError("scattered set must be a subset of the input set")
        if len(self.S) > self.k:
            raise DomainError(
                f"parameter set has {len(self.S)} elements, budget allows {self.k}"
            )
        flipped = self.trace.replay(self.structure)
        rows = gaifman(flipped).gaifman_bits()
        ys = sorted(self.Y)
        for i, u in enumerate(ys):
            reach = _reach_mask(rows, u, self.r)
            for v in ys[i + 1 :]:
                if (reach >> v) & 1:
                    raise DomainError(
                        f"scattered-set check failed: {u} and {v} are within "
                        f"distance {self.r} after the flip"
                    )

    @property
    def flipped(self) -> FiniteStructure:
        return self.trace.replay(self.structure)


def _mis_exact(avail: int, adj) -> int:
    """Maximum independent set of the conflict graph, as a position mask.

    Branches on a maximum-degree vertex; ties in size prefer the smaller
    mask so the result is deterministic.
    """
    if not avail:
        return 0
    pivot, pivot_deg = -1, -1
    for v in _bits(avail):
        d = (adj[v] & avail).bit_count()
        if d > pivot_deg:
            pivot, pivot_deg = v, d
    if pivot_deg == 0:
        return avail
    taken = (1 << pivot) | _mis_exact(avail & ~adj[pivot] & ~(1 << pivot), adj)
    skipped = _mis_exact(avail & ~(1 << pivot), adj)
    if taken.bit_count() > skipped.bit_count():
        return taken
    if taken.bit_count() < skipped.bit_count():
        return skipped
    return min(taken, skipped)


def _mis_greedy(count: int, adj) -> int:
    chosen = 0
    blocked = 0
    for v in range(count):
        if not (blocked >> v) & 1:
            chosen |= 1 << v
            blocked |= adj[v]
    return chosen


def _scattered_subset(flipped: FiniteStructure, xs, r: int):
    """Largest (or greedily large) subset of xs pairwise at distance > r."""
    rows = gaifman(flipped).gaifman_bits()
    m = len(xs)
    balls = [_reach_mask(rows, x, r) for x in xs]
    adj = [0] * m
    for i in range(m):
        for j in range(i + 1, m):
            if (balls[i] >> xs[j]) & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    exact = m <= EXACT_SCATTER_LIMIT
    chosen = _mis_exact((1 << m) - 1, adj) if exact else _mis_greedy(m, adj)
    return frozenset(xs[i] for i in _bits(chosen)), exact


def _parameter_candidates(structure: FiniteStructure, k: int, effort: str):
    n = structure.universe_size
    if effort == "exhaustive":
        out = []
        for size in range(k + 1):
            out.extend(frozenset(c) for c in itertools.combinations(range(n), size))
        return out
    rows = gaifman(structure).gaifman_bits()
    order = sorted(range(n), key=lambda v: (-rows[v].bit_count(), v))
    seen = {frozenset(): None}
    for size in range(1, k + 1):
        seen.setdefault(frozenset(order[:size]), None)
    if k >= 1:
        for v in order[:_GREEDY_BEAM]:
            seen.setdefault(frozenset({v}), None)
    return list(seen)


def _wrap_flip(witness, S) -> FlipTrace:
    if isinstance(witness, FlipTrace):
        return witness
    if witness.is_identity:
        return FlipTrace(())
    return FlipTrace((GraphFlipStep(tuple(sorted(S)), witness),))


def flip_flatness_search(
    structure: FiniteStructure,
    X,
    r: int,
    k: int,
    effort: str = "exhaustive",
    budget_bits: Optional[int] = None,
) -> FlatnessCertificate:
    """Best scattered subset of X achievable by one flip over some |S| <= k.

    Outer loop over parameter-set candidates (all of them for
    ``effort="exhaustive"``, a degree-guided beam for ``"greedy"``), inner
    loop over the definable flip family for each candidate; the scattered
    subset inside each flipped structure is extracted exactly up to
    ``EXACT_SCATTER_LIMIT`` candidates and greedily beyond.  Candidate
    sets whose flip family exceeds the bit budget are skipped and the
    result is flagged ``partial``.
    """
    if effort not in EFFORT_LEVELS:
        raise DomainError(f"effort must be one of {EFFORT_LEVELS}, got {effort!r}")
    if r < 0:
        raise DomainError("radius must be nonnegative")
    if k < 0:
        raise DomainError("parameter budget must be nonnegative")
    n = structure.universe_size
    xs = sorted(set(X))
    for x in xs:
        if not isinstance(x, int) or not (0 <= x < n):
            raise DomainError(f"input element {x!r} outside the universe of size {n}")

    best = None  # (Y, S, trace)
    partial = False
    done = False
    for S in _parameter_candidates(structure, k, effort):
        try:
            for witness, flipped in _candidate_flips(structure, S, budget_bits):
                Y, _ = _scattered_subset(flipped, xs, r)
                if best is None or len(Y) > len(best[0]):
                    best = (Y, S, _wrap_flip(witness, S))
                    if len(Y) == len(xs):
                        done = True
                        break
        except BudgetExceeded:
            partial = True
            continue
        if done:
            break

    if best is None:
        # Even the empty parameter set was over budget; fall back to the
        # identity flip, which is always in the family.
        Y, _ = _scattered_subset(structure, xs, r)
        best = (Y, frozenset(), FlipTrace(()))
        partial = True

    Y, S, trace = best
    exact = len(Y) == len(xs) or (
        effort == "exhaustive" and not partial and len(xs) <= EXACT_SCATTER_LIMIT
    )
    return FlatnessCertificate(
        structure=structure,
        X=frozenset(xs),
        r=r,
        k=k,
        S=S,
        trace=trace,
        Y=Y,
        exact=exact,
        partial=partial,
    )


# ---------------------------------------------------------------------------
# Biclique subgraphs
# ---------------------------------------------------------------------------


class BicliqueWitness(NamedTuple):
    left: frozenset
    right: frozenset


def _biclique_brute(rows, n: int, t: int) -> bool:
    """Independent existence check: scan left sides, test edges directly."""
    for A in itertools.combinations(range(n), t):
        count = 0
        for v in range(n):
            if v in A:
                continue
            if all((rows[a] >> v) & 1 for a in A):
                count += 1
                if count >= t:
                    return True
    return False


def biclique_subgraph(structure: FiniteStructure, t: int) -> Optional[BicliqueWitness]:
    """First K_{t,t} subgraph witness in lexicographic order, or None.

    The two sides are disjoint and every cross pair is adjacent; edges
    inside a side are allowed (subgraph containment, not induced).  On
    universes of at most 12 vertices the branch-and-bound answer is
    cross-checked against a direct enumeration.
    """
    if t < 0:
        raise DomainError("biclique size must be nonnegative")
    if t == 0:
        return BicliqueWitness(frozenset(), frozenset())
    n = structure.universe_size
    rows = gaifman(structure).gaifman_bits()
    result = None

    def rec(side: tuple, start: int, common: int):
        nonlocal result
        if result is not None:
            return
        if len(side) == t:
            if common.bit_count() >= t:
                right = []
                for v in _bits(common):
                    right.append(v)
                    if len(right) == t:
                        break
                result = BicliqueWitness(frozenset(side), frozenset(right))
            return
        if common.bit_count() < t:
            return
        for v in range(start, n):
            if n - v < t - len(side):
                break
            rec(side + (v,), v + 1, common & rows[v])
            if result is not None:
                return

    rec((), 0, (1 << n) - 1)
    if n <= 12 and (result is not None) != _biclique_brute(rows, n, t):
        raise AssertionError("biclique branch-and-bound disagrees with the direct scan")
    if result is not None:
        for a in result.left:
            for b in result.right:
                if not (rows[a] >> b) & 1:
                    raise AssertionError("biclique witness failed verification")
    return result


# ---------------------------------------------------------------------------
# Subdivided cliques
# ---------------------------------------------------------------------------


class SubdivisionWitness(NamedTuple):
    principals: tuple
    paths: tuple  # full vertex paths, one per principal pair in lex order


def _verify_subdivision(rows, witness: SubdivisionWitness, n: int, r: int):
    principals = witness.principals
    if len(principals) != n or len(set(principals)) != n:
        raise DomainError("subdivision witness needs n distinct principal vertices")
    pairs = list(itertools.combinations(range(n), 2))
    if len(witness.paths) != len(pairs):
        raise DomainError("subdivision witness must connect every principal pair")
    used = set()
    for (i, j), walk in zip(pairs, witness.paths):
        if len(walk) != r or walk[0] != principals[i] or walk[-1] != principals[j]:
            raise DomainError(f"path for pair ({i},{j}) has the wrong shape")
        for u, v in zip(walk, walk[1:]):
            if not (rows[u] >> v) & 1:
                raise DomainError(f"path step {u}-{v} is not an edge")
        internals = walk[1:-1]
        for v in internals:
            if v in principals or v in used:
                raise DomainError(f"internal vertex {v} is reused")
        used.update(internals)


def subdivided_clique_search(
    structure: FiniteStructure,
    n: int,
    r: int,
    budget_nodes: Optional[int] = None,
) -> Optional[SubdivisionWitness]:
    """Subgraph copy of the clique on n principals with every edge replaced
    by a path of length r - 1 (so r = 2 asks for the clique itself).

    Paths are internally disjoint from each other and from the principal
    set.  Search is exhaustive backtracking over principal choices and
    connecting paths; the node budget caps explored path extensions.
    """
    if n < 1:
        raise DomainError("need at least one principal vertex")
    if r < 2:
        raise DomainError("subdivision parameter must be at least 2")
    budget = DEFAULT_SEARCH_NODES if budget_nodes is None else budget_nodes
    length = r - 1
    N = structure.universe_size
    rows = gaifman(structure).gaifman_bits()
    pairs = list(itertools.combinations(range(n), 2))
    spent = 0

    def charge():
        nonlocal spent
        spent += 1
        if spent > budget:
            raise BudgetExceeded(
                f"subdivision search explored more than {budget} nodes",
                required=spent,
                budget=budget,
            )

    def connect(idx: int, principals, used: set, paths: list):
        if idx == len(pairs):
            return tuple(paths)
        i, j = pairs[idx]
        src, dst = principals[i], principals[j]

        def extend(walk: list):
            charge()
            if len(walk) == length:
                if walk[-1] == dst or not (rows[walk[-1]] >> dst) & 1:
                    return None
                full = walk + [dst]
                internals = full[1:-1]
                used.update(internals)
                paths.append(tuple(full))
                found = connect(idx + 1, principals, used, paths)
                if found is not None:
                    return found
                paths.pop()
                used.difference_update(internals)
                return None
            for v in _bits(rows[walk[-1]]):
                if v in used or v in principals or v in walk:
                    continue
                walk.append(v)
                found = extend(walk)
                if found is not None:
                    return found
                walk.pop()
            return None

        if length == 1:
            if not (rows[src] >> dst) & 1:
                return None
            paths.append((src, dst))
            found = connect(idx + 1, principals, used, paths)
            if found is None:
                paths.pop()
            return found
        return extend([src])

    for principals in itertools.combinations(range(N), n):
        charge()
        found = connect(0, principals, set(), [])
        if found is not None:
            witness = SubdivisionWitness(principals, found)
            _verify_subdivision(rows, witness, n, r)
            return witness
    return None


# ---------------------------------------------------------------------------
# Ladders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LadderCertificate:
    """Sequences realizing the half-graph pattern for one atomic formula:
    the atom holds on (a_i, b_j) exactly when i <= j.  Re-verified on
    construction; ``exact`` is False when a budget truncated the search,
    in which case ``n`` is only a lower bound.
    """

    structure: FiniteStructure
    atom: PartitionedAtom
    a_tuples: tuple
    b_tuples: tuple
    n: int
    exact: bool = True

    def __post_init__(self):
        object.__setattr__(self, "a_tuples", tuple(tuple(t) for t in self.a_tuples))
        object.__setattr__(self, "b_tuples", tuple(tuple(t) for t in self.b_tuples))
        if len(self.a_tuples) != self.n or len(self.b_tuples) != self.n:
            raise DomainError("ladder certificate needs n tuples on each side")
        for i in range(self.n):
            for j in range(self.n):
                actual = self.atom.holds(self.structure, self.a_tuples[i], self.b_tuples[j])
                if actual != (i <= j):
                    raise DomainError(
                        f"ladder pattern broken at ({i},{j}): atom holds={actual}"
                    )


def edge_atom(structure: FiniteStructure) -> PartitionedAtom:
    """The adjacency atom E(x; y) of a graph, as a partitioned formula."""
    if not structure.graph:
        raise DomainError("edge_atom requires a graph-flagged structure")
    return PartitionedAtom(structure.graph_relation.name, 2, (0,), (1,))


def ladder_index(
    structure: FiniteStructure,
    atom: PartitionedAtom,
    n_max: int,
    budget_nodes: Optional[int] = None,
) -> LadderCertificate:
    """Longest ladder of the atom up to n_max, by depth-first extension.

    Each candidate pair examined costs one budget node; exhausting the
    budget returns the best ladder found so far with ``exact=False``.
    Atom evaluations are memoized across the whole search.
    """
    if n_max < 0:
        raise DomainError("ladder cap must be nonnegative")
    if atom.relation not in structure.relations:
        raise DomainError(f"structure has no relation named {atom.relation!r}")
    budget = DEFAULT_SEARCH_NODES if budget_nodes is None else budget_nodes
    N = structure.universe_size
    x_space = list(itertools.product(range(N), repeat=len(atom.x_positions)))
    y_space = list(itertools.product(range(N), repeat=len(atom.y_positions)))

    cache = {}

    def holds(a, b) -> bool:
        key = (a, b)
        hit = cache.get(key)
        if hit is None:
            hit = atom.holds(structure, a, b)
            cache[key] = hit
        return hit

    best = ([], [])
    spent = 0
    truncated = False

    def dfs(a_seq: list, b_seq: list):
        nonlocal best, spent, truncated
        depth = len(a_seq)
        if depth > len(best[0]):
            best = (list(a_seq), list(b_seq))
        if depth == n_max or truncated:
            return
        for a in x_space:
            for b in y_space:
                spent += 1
                if spent > budget:
                    truncated = True
                    return
                if not holds(a, b):
                    continue
                if any(
                    not holds(a_seq[i], b) or holds(a, b_seq[i]) for i in range(depth)
                ):
                    continue
                a_seq.append(a)
                b_seq.append(b)
                dfs(a_seq, b_seq)
                a_seq.pop()
                b_seq.pop()
                if len(best[0]) == n_max or truncated:
                    return

    dfs([], [])
    a_seq, b_seq = best
    return LadderCertificate(
        structure=structure,
        atom=atom,
        a_tuples=tuple(a_seq),
        b_tuples=tuple(b_seq),
        n=len(a_seq),
        exact=not truncated,
    )


# ---------------------------------------------------------------------------
# Bipartite patterns
# ---------------------------------------------------------------------------

PATTERNS = ("=", "!=", "<=", ">=")

_PATTERN_TESTS = {
    "=": operator.eq,
    "!=": operator.ne,
    "<=": operator.le,
    ">=": operator.ge,
}


class PatternWitness(NamedTuple):
    pattern: str
    n: int
    a_seq: tuple
    b_seq: tuple


@dataclass(frozen=True)
class PatternReport:
    witnesses: tuple  # one PatternWitness per entry of PATTERNS, in order

    def witness(self, pattern: str) -> PatternWitness:
        for w in self.witnesses:
            if w.pattern == pattern:
                return w
        raise DomainError(f"unknown pattern {pattern!r}")

    @property
    def best(self) -> PatternWitness:
        return max(self.witnesses, key=lambda w: (w.n, -PATTERNS.index(w.pattern)))


def bipartite_pattern(
    structure: FiniteStructure,
    a_part,
    b_part,
    n_max: int,
    relation: Optional[str] = None,
    budget_nodes: Optional[int] = None,
) -> PatternReport:
    """Largest realization of each order pattern between two vertex parts.

    For each pattern ``~`` among ``=, !=, <=, >=`` this finds the longest
    sequences of distinct a's (from ``a_part``) and b's (from ``b_part``)
    with ``E(a_i, b_j)  iff  i ~ j``, capped at ``n_max``.  ``relation``
    names an ordered binary relation to use in place of the symmetric
    Gaifman adjacency.  The node budget is shared across the four
    searches and overrunning it raises.
    """
    if n_max < 0:
        raise DomainError("pattern cap must be nonnegative")
    N = structure.universe_size
    a_elems = sorted(set(a_part))
    b_elems = sorted(set(b_part))
    for v in a_elems + b_elems:
        if not isinstance(v, int) or not (0 <= v < N):
            raise DomainError(f"part element {v!r} outside the universe of size {N}")
    if relation is None:
        rows = gaifman(structure).gaifman_bits()

        def edge(a, b):
            return bool((rows[a] >> b) & 1)

    else:
        rel = structure.relations.get(relation)
        if rel is None:
            raise DomainError(f"structure has no relation named {relation!r}")
        if rel.arity != 2:
            raise DomainError(f"pattern relation must be binary, {relation!r} has arity {rel.arity}")

        def edge(a, b):
            return structure.has(relation, (a, b))

    budget = DEFAULT_SEARCH_NODES if budget_nodes is None else budget_nodes
    spent = 0
    witnesses = []
    for pattern in PATTERNS:
        cmp = _PATTERN_TESTS[pattern]
        best = ([], [])

        def dfs(a_seq: list, b_seq: list):
            nonlocal best, spent
            depth = len(a_seq)
            if depth > len(best[0]):
                best = (list(a_seq), list(b_seq))
            if depth == n_max:
                return
            for a in a_elems:
                if a in a_seq:
                    continue
                for b in b_elems:
                    if b in b_seq:
                        continue
                    spent += 1
                    if spent > budget:
                        raise BudgetExceeded(
                            f"pattern search explored more than {budget} nodes",
                            required=spent,
                            budget=budget,
                        )
                    if edge(a, b) != cmp(depth, depth):
                        continue
                    if any(
                        edge(a_seq[i], b) != cmp(i, depth)
                        or edge(a, b_seq[i]) != cmp(depth, i)
                        for i in range(depth)
                    ):
                        continue
                    a_seq.append(a)
                    b_seq.append(b)
                    dfs(a_seq, b_seq)
                    a_seq.pop()
                    b_seq.pop()
                    if len(best[0]) == n_max:
                        return

        dfs([], [])
        witnesses.append(
            PatternWitness(pattern, len(best[0]), tuple(best[0]), tuple(best[1]))
        )
    return PatternReport(tuple(witnesses))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def half_graph(n: int) -> FiniteStructure:
    """Half-graph of order n: sides 0..n-1 and n..2n-1, with an edge from
    the i-th left vertex to the j-th right vertex exactly when i <= j."""
    if n < 1:
        raise DomainError("half-graph order must be at least 1")
    edges = [(i, n + j) for i in range(n) for j in range(i, n)]
    return FiniteStructure.from_edges(2 * n, edges)


def star(n: int) -> FiniteStructure:
    """Star with center 0 and leaves 1..n."""
    if n < 1:
        raise DomainError("star needs at least one leaf")
    return FiniteStructure.from_edges(n + 1, [(0, i) for i in range(1, n + 1)])


def path(n: int) -> FiniteStructure:
    """Path on n vertices 0..n-1."""
    if n < 1:
        raise DomainError("path needs at least one vertex")
    return FiniteStructure.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def clique(n: int) -> FiniteStructure:
    """Complete graph on n vertices."""
    if n < 1:
        raise DomainError("clique needs at least one vertex")
    return FiniteStructure.from_edges(n, list(itertools.combinations(range(n), 2)))


def biclique(s: int, t: int) -> FiniteStructure:
    """Complete bipartite graph with sides 0..s-1 and s..s+t-1."""
    if s < 1 or t < 1:
        raise DomainError("biclique sides must both be nonempty")
    edges = [(i, s + j) for i in range(s) for j in range(t)]
    return FiniteStructure.from_edges(s + t, edges)

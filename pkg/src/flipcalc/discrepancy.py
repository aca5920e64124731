"""The discrepancy graph: where a structure's edges differ from the edges
its definable types predict, and the component structure that difference
induces.

For each vertex u outside the model, a synthesized definition predicts
u's neighborhood; evaluating it everywhere yields the expected relation.
The discrepancy edges are the symmetric difference with the actual edges
on outside pairs, and their transitive closure partitions the universe
(model vertices are always singletons).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .core import FiniteStructure, eval_qf, gaifman, set_distance
from .errors import DomainError
from .flips import apply_graph_flip, enumerate_s_definable_flips
from .separation import (
    DEFAULT_PARAMETER_CAP,
    ModelPair,
    synthesize_neighborhood_definition,
)

__all__ = [
    "ExpectedRelation",
    "expected_edges",
    "DiscrepancyReport",
    "discrepancy_graph",
    "Radius1Report",
    "radius1_equivalence_check",
    "SAvoidingComponents",
    "s_avoiding_components",
]


@dataclass(frozen=True)
class ExpectedRelation:
    strategy: str
    pairs: frozenset  # unordered (u, v) with u < v, over the whole universe
    self_loops: frozenset  # u with the expected relation at (u, u)
    asymmetries: tuple  # (u, v) pairs whose two predictions disagreed

    def holds(self, u: int, v: int) -> bool:
        if u == v:
            return u in self.self_loops
        return (min(u, v), max(u, v)) in self.pairs


def expected_edges(
    pair: ModelPair,
    strategy: str = "class_based",
    max_parameters: int = DEFAULT_PARAMETER_CAP,
    strict: bool = False,
) -> ExpectedRelation:
    """Evaluate every outside vertex's synthesized definition everywhere.

    Predictions are symmetrized by disjunction; pairs where the two
    directions disagree are recorded (and rejected under strict).  On model
    vertices the prediction coincides with actual adjacency by the
    exactness of the definitions, so model-model pairs keep their edges.
    """
    H = pair.structure
    if not H.graph:
        raise DomainError("expected edges require a graph")
    n = H.universe_size
    rows = H.gaifman_bits()
    outside = pair.outside()
    formulas = {}
    for u in outside:
        try:
            formulas[u] = synthesize_neighborhood_definition(
                pair, u, strategy, max_parameters
            ).formula
        except DomainError as exc:
            raise DomainError(f"definition synthesis failed for element {u}: {exc}")
    predicted = {
        u: {v for v in range(n) if eval_qf(H, formulas[u], (v,))} for u in outside
    }
    pairs = set()
    asymmetries = []
    for u in range(n):
        for v in range(u + 1, n):
            u_out, v_out = u in predicted, v in predicted
            if u_out and v_out:
                a, b = v in predicted[u], u in predicted[v]
                if a != b:
                    asymmetries.append((u, v))
                value = a or b
            elif u_out:
                value = v in predicted[u]
            elif v_out:
                value = u in predicted[v]
            else:
                value = bool((rows[u] >> v) & 1)
            if value:
                pairs.add((u, v))
    if strict and asymmetries:
        raise DomainError(
            f"asymmetric predictions under strict mode: {asymmetries[:5]}"
        )
    self_loops = frozenset(u for u in outside if u in predicted[u])
    return ExpectedRelation(strategy, frozenset(pairs), self_loops, tuple(asymmetries))


@dataclass(frozen=True)
class DiscrepancyReport:
    strategy: str
    expected: ExpectedRelation
    discrepancy_edges: frozenset  # (u, v) with u < v, both outside the model
    components: tuple  # frozensets partitioning the universe
    harrington_violations: tuple

    def same_component(self, u: int, v: int) -> bool:
        for comp in self.components:
            if u in comp:
                return v in comp
        raise DomainError(f"vertex {u} not in any component")


def discrepancy_graph(
    pair: ModelPair,
    strategy: str = "class_based",
    max_parameters: int = DEFAULT_PARAMETER_CAP,
    strict: bool = False,
) -> DiscrepancyReport:
    """Symmetric difference of actual and expected edges on outside pairs,
    plus the component partition of its transitive closure."""
    H = pair.structure
    expected = expected_edges(pair, strategy, max_parameters, strict)
    rows = H.gaifman_bits()
    edges = set()
    for u, v in itertools.combinations(pair.outside(), 2):
        actual = bool((rows[u] >> v) & 1)
        if actual != expected.holds(u, v):
            edges.add((u, v))
    for u, v in edges:
        if u in pair.model or v in pair.model:
            raise DomainError("discrepancy edge incident to the model")
    parent = list(range(H.universe_size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    groups = {}
    for x in range(H.universe_size):
        groups.setdefault(find(x), []).append(x)
    components = tuple(
        frozenset(members) for _, members in sorted((min(m), m) for m in groups.values())
    )
    return DiscrepancyReport(
        strategy, expected, frozenset(edges), components, expected.asymmetries
    )


@dataclass(frozen=True)
class Radius1Report:
    u: int
    v: int
    cond2: bool  # some flip leaves u detached from the model yet adjacent to v
    cond3: bool  # prediction and actual adjacency disagree at (u, v)

    @property
    def agree(self) -> bool:
        return self.cond2 == self.cond3


def radius1_equivalence_check(
    pair: ModelPair,
    u: int,
    v: int,
    strategy: str = "class_based",
    max_parameters: int = DEFAULT_PARAMETER_CAP,
    budget_bits: Optional[int] = None,
    max_subset_size: int = 4,
) -> Radius1Report:
    """Compare the flip-based and formula-based readings of radius-1
    dependence for one outside pair."""
    H = pair.structure
    if u in pair.model or v in pair.model:
        raise DomainError("both elements must lie outside the model")
    psi = synthesize_neighborhood_definition(pair, u, strategy, max_parameters)
    cond3 = eval_qf(H, psi.formula, (v,)) != bool((H.gaifman_bits()[u] >> v) & 1)
    cond2 = False
    pool = sorted(psi.parameters)
    for size in range(min(max_subset_size, len(pool)) + 1):
        for S in itertools.combinations(pool, size):
            for spec in enumerate_s_definable_flips(H, S, budget_bits):
                flipped = apply_graph_flip(H, spec)
                if not pair.model:
                    detached = True
                else:
                    detached = set_distance(flipped, {u}, pair.model, cutoff=1) > 1
                if detached and set_distance(flipped, {u}, {v}, cutoff=1) == 1:
                    cond2 = True
                    break
            if cond2:
                break
        if cond2:
            break
    return Radius1Report(u, v, cond2, cond3)


@dataclass(frozen=True)
class SAvoidingComponents:
    deleted: frozenset
    components: tuple  # frozensets partitioning universe minus deleted

    def query(self, u: int, v: int) -> bool:
        """True when an avoiding path connects u and v."""
        if u in self.deleted or v in self.deleted:
            raise DomainError("query endpoints must avoid the deleted set")
        for comp in self.components:
            if u in comp:
                return v in comp
        raise DomainError(f"vertex {u} not in any component")


def s_avoiding_components(structure: FiniteStructure, M) -> SAvoidingComponents:
    """Connected components of the Gaifman graph with the vertex set M
    deleted."""
    n = structure.universe_size
    M = frozenset(M)
    for x in M:
        if not isinstance(x, int) or not 0 <= x < n:
            raise DomainError(f"deleted vertex {x!r} outside universe of size {n}")
    rows = gaifman(structure).gaifman_bits()
    mask = 0
    for x in M:
        mask |= 1 << x
    seen = set(M)
    components = []
    for start in range(n):
        if start in seen:
            continue
        comp = []
        frontier = [start]
        seen.add(start)
        while frontier:
            x = frontier.pop()
            comp.append(x)
            m = rows[x] & ~mask
            while m:
                b = m & -m
                w = b.bit_length() - 1
                m ^= b
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        components.append(frozenset(comp))
    return SAvoidingComponents(M, tuple(components))

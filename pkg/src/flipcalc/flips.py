"""Flips of graphs and syntactic flips of relational structures.

Two flavours live here:

* graph flips: toggle adjacency between class pairs of a vertex partition
  (distinct endpoints only, so graphs stay simple graphs);
* syntactic flips: toggle satisfaction of one partitioned atom between class
  pairs of its two argument-group spaces, adding a fresh marker relation per
  flipped class.  These toggle tuples wholesale -- on a graph a single step
  touches only the ordered pairs of the flipped products, so symmetry is the
  caller's business (flip both orientations to stay symmetric).

Flip matrices are stored as flipped-pair sets; listing a pair via (A,B) and
(B,A) in a graph flip counts once.  Enumeration streams are canonical:
ascending matrix integer, identity first.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .core import (
    And,
    FiniteStructure,
    Not,
    Or,
    PartitionedAtom,
    QfFormula,
    RelAtom,
    Relation,
    TypeClass,
    TypePartition,
    Var,
    alpha_type_partition,
    atomic_type_partition,
    eval_qf,
    substitute_vars,
)
from .errors import BudgetExceeded, DomainError

__all__ = [
    "FlipSpec",
    "partition_from_classes",
    "apply_graph_flip",
    "enumerate_s_definable_flips",
    "compose_flips",
    "invert_flip",
    "SyntacticFlipStep",
    "make_syntactic_step",
    "apply_syntactic_flip",
    "invert_syntactic_flip",
    "definability_witness",
    "xor_formula",
    "GraphFlipStep",
    "FlipTrace",
    "enumerate_syntactic_traces",
    "default_budget_bits",
]


def default_budget_bits() -> int:
    """Matrix-bit budget for flip enumeration (env FLIPCALC_BUDGET_BITS)."""
    return int(os.environ.get("FLIPCALC_BUDGET_BITS", "24"))


def _iter_bits(mask: int):
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


# ---------------------------------------------------------------------------
# Graph flips
# ---------------------------------------------------------------------------


def partition_from_classes(universe_size: int, groups: Iterable[Iterable[int]]) -> TypePartition:
    """Build an explicit (atom-free) arity-1 partition from member groups."""
    seen = set()
    member_lists = []
    for g in groups:
        ms = sorted(set(g))
        if not ms:
            continue
        for v in ms:
            if not isinstance(v, int) or not 0 <= v < universe_size:
                raise DomainError(f"element id {v!r} outside universe of size {universe_size}")
            if v in seen:
                raise DomainError(f"element {v} appears in two partition classes")
            seen.add(v)
        member_lists.append(tuple((v,) for v in ms))
    member_lists.sort()
    classes = tuple(
        TypeClass(cid, f"class{cid:04d}", members) for cid, members in enumerate(member_lists)
    )
    return TypePartition((), 1, (), classes)


@dataclass(frozen=True)
class FlipSpec:
    """A P-flip of a graph: an arity-1 partition plus the set of class pairs
    whose adjacency gets inverted.  Pairs are kept upper-triangular
    (i <= j); the diagonal is allowed."""

    partition: TypePartition
    flipped_pairs: frozenset

    def __post_init__(self):
        count = len(self.partition.classes)
        if self.partition.arity != 1:
            raise DomainError("graph flips need an arity-1 partition")
        norm = set()
        for pair in self.flipped_pairs:
            i, j = pair
            if not (0 <= i < count and 0 <= j < count):
                raise DomainError(f"class pair {pair} out of range for {count} classes")
            norm.add((i, j) if i <= j else (j, i))
        object.__setattr__(self, "flipped_pairs", frozenset(norm))

    @property
    def is_identity(self) -> bool:
        return not self.flipped_pairs

    def pair_order(self):
        count = len(self.partition.classes)
        return [(i, j) for i in range(count) for j in range(i, count)]

    def matrix_bits(self) -> str:
        return "".join("1" if p in self.flipped_pairs else "0" for p in self.pair_order())

    @classmethod
    def from_bits(cls, partition: TypePartition, bits: str) -> "FlipSpec":
        count = len(partition.classes)
        order = [(i, j) for i in range(count) for j in range(i, count)]
        if len(bits) != len(order):
            raise DomainError(f"matrix bit string must have length {len(order)}, got {len(bits)}")
        return cls(partition, frozenset(p for p, b in zip(order, bits) if b == "1"))


def _class_masks(spec: FlipSpec, n: int):
    masks = []
    covered = 0
    total = 0
    for cls in spec.partition.classes:
        m = 0
        for t in cls.members:
            v = t[0]
            if not isinstance(v, int) or not 0 <= v < n:
                raise DomainError(f"partition member {v!r} outside universe of size {n}")
            m |= 1 << v
        masks.append(m)
        covered |= m
        total += len(cls.members)
    if covered != (1 << n) - 1 or total != n:
        raise DomainError("flip partition must cover the whole universe exactly once")
    return masks


def apply_graph_flip(graph: FiniteStructure, spec: FlipSpec) -> FiniteStructure:
    """Invert adjacency between distinct vertices of every flipped class
    pair; self-adjacency is never created."""
    if not graph.graph:
        raise DomainError("apply_graph_flip requires a graph-flagged structure")
    n = graph.universe_size
    masks = _class_masks(spec, n)
    rows = list(graph.gaifman_bits())
    for i, j in spec.flipped_pairs:
        a, b = masks[i], masks[j]
        for u in _iter_bits(a):
            rows[u] ^= b
        if i != j:
            for v in _iter_bits(b):
                rows[v] ^= a
    edges = []
    for u in range(n):
        rows[u] &= ~(1 << u)
        m = rows[u]
        while m:
            low = m & -m
            v = low.bit_length() - 1
            if u < v:
                edges.append((u, v))
            m ^= low
    return FiniteStructure.from_edges(n, edges, name=graph.graph_relation.name)


def enumerate_s_definable_flips(
    graph: FiniteStructure, S, budget_bits: Optional[int] = None
) -> Iterator[FlipSpec]:
    """All flips over the atomic-type partition over S, canonical order.

    Yields 2^(C(C+1)/2) specs for C classes, ascending by matrix integer,
    identity first.  Refuses with BudgetExceeded when the matrix needs more
    bits than the budget allows.
    """
    if not graph.graph:
        raise DomainError("S-definable flips are defined for graph-flagged structures")
    partition = atomic_type_partition(graph, S)
    count = len(partition.classes)
    n_bits = count * (count + 1) // 2
    budget = default_budget_bits() if budget_bits is None else budget_bits
    if n_bits > budget:
        raise BudgetExceeded(
            f"flip enumeration over {count} classes needs {n_bits} matrix bits, budget is {budget}",
            required=n_bits,
            budget=budget,
        )
    order = [(i, j) for i in range(count) for j in range(i, count)]
    for m in range(1 << n_bits):
        bits = format(m, f"0{n_bits}b") if n_bits else ""
        yield FlipSpec(partition, frozenset(p for p, b in zip(order, bits) if b == "1"))


def compose_flips(a: FlipSpec, b: FlipSpec) -> FlipSpec:
    """Entrywise XOR of flip matrices over a shared partition."""
    if a.partition.fingerprint() != b.partition.fingerprint():
        raise DomainError("cannot compose flips over different partitions")
    return FlipSpec(a.partition, a.flipped_pairs ^ b.flipped_pairs)


def invert_flip(a: FlipSpec) -> FlipSpec:
    """Every flip is an involution, so a flip is its own inverse."""
    return a


# ---------------------------------------------------------------------------
# Syntactic flips
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntacticFlipStep:
    """One syntactic flip step: toggle satisfaction of ``atom`` on the
    products of flipped (x-class, y-class) pairs and add a marker relation
    per flipped class.

    The partitions classify the *full* tuple spaces by alpha-type over
    ``params``; ``flipped_pairs`` is any subset of x-class-id x y-class-id
    (no symmetry is imposed -- the two sides are different spaces).
    """

    atom: PartitionedAtom
    params: tuple
    x_partition: TypePartition
    y_partition: TypePartition
    flipped_pairs: frozenset
    step_index: int = 0
    source_graph_flag: bool = False

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(sorted(set(self.params))))
        pairs = frozenset((int(i), int(j)) for i, j in self.flipped_pairs)
        for i, j in pairs:
            if not 0 <= i < len(self.x_partition.classes):
                raise DomainError(f"x-class id {i} out of range")
            if not 0 <= j < len(self.y_partition.classes):
                raise DomainError(f"y-class id {j} out of range")
        object.__setattr__(self, "flipped_pairs", pairs)

    @property
    def relation(self) -> str:
        return self.atom.relation

    def x_marker_name(self, class_id: int) -> str:
        return f"{self.relation}__flip{self.step_index}__x{class_id}"

    def y_marker_name(self, class_id: int) -> str:
        return f"{self.relation}__flip{self.step_index}__y{class_id}"

    def marker_relations(self) -> list:
        out = []
        for cid in sorted({i for i, _ in self.flipped_pairs}):
            cls = self.x_partition.classes[cid]
            out.append(
                Relation(self.x_marker_name(cid), len(self.atom.x_positions), frozenset(cls.members))
            )
        for cid in sorted({j for _, j in self.flipped_pairs}):
            cls = self.y_partition.classes[cid]
            out.append(
                Relation(self.y_marker_name(cid), len(self.atom.y_positions), frozenset(cls.members))
            )
        return out

    def toggled_tuples(self) -> frozenset:
        toggles = set()
        for ci, cj in self.flipped_pairs:
            for xt in self.x_partition.classes[ci].members:
                for yt in self.y_partition.classes[cj].members:
                    toggles.add(self.atom.assemble(xt, yt))
        return frozenset(toggles)


def make_syntactic_step(
    structure: FiniteStructure,
    atom: PartitionedAtom,
    params,
    flipped_pairs,
    step_index: int = 0,
) -> SyntacticFlipStep:
    """Build a step against a concrete structure (computes both alpha-type
    partitions and records the graph flag for exact inversion)."""
    rel = structure.relations.get(atom.relation)
    if rel is None:
        raise DomainError(f"unknown relation {atom.relation!r}")
    if rel.arity != atom.arity:
        raise DomainError(
            f"atom arity {atom.arity} does not match relation {atom.relation!r} arity {rel.arity}"
        )
    xp = alpha_type_partition(structure, atom, params, side="x")
    yp = alpha_type_partition(structure, atom, params, side="y")
    return SyntacticFlipStep(
        atom,
        tuple(sorted(set(params))),
        xp,
        yp,
        frozenset(flipped_pairs),
        step_index=step_index,
        source_graph_flag=structure.graph,
    )


def apply_syntactic_flip(structure: FiniteStructure, step: SyntacticFlipStep) -> FiniteStructure:
    """Toggle the flipped products and add marker relations.

    The step's stored partitions must describe this structure (checked by
    fingerprint), which is what makes traces replayable.
    """
    rel = structure.relations.get(step.relation)
    if rel is None:
        raise DomainError(f"unknown relation {step.relation!r}")
    if rel.arity != step.atom.arity:
        raise DomainError("atom arity does not match the relation")
    xp = alpha_type_partition(structure, step.atom, step.params, side="x")
    yp = alpha_type_partition(structure, step.atom, step.params, side="y")
    if (
        xp.fingerprint() != step.x_partition.fingerprint()
        or yp.fingerprint() != step.y_partition.fingerprint()
    ):
        raise DomainError("flip step partitions do not match the structure")
    if not step.flipped_pairs:
        return structure
    new_rel = rel.replace_tuples(rel.tuples ^ step.toggled_tuples())
    out = structure.replace_relation(new_rel, graph=False)
    for marker in step.marker_relations():
        out = out.add_relation(marker)
    return out


def invert_syntactic_flip(flipped: FiniteStructure, step: SyntacticFlipStep) -> FiniteStructure:
    """Exact inverse of apply_syntactic_flip: re-toggle, strip markers,
    restore the source graph flag."""
    rel = flipped.relations.get(step.relation)
    if rel is None:
        raise DomainError(f"unknown relation {step.relation!r}")
    markers = step.marker_relations()
    for marker in markers:
        have = flipped.relations.get(marker.name)
        if have is None:
            raise DomainError(f"missing marker relation {marker.name!r}")
        if have.arity != marker.arity or have.tuples != marker.tuples:
            raise DomainError(f"marker relation {marker.name!r} does not match its class")
    new_rel = rel.replace_tuples(rel.tuples ^ step.toggled_tuples())
    out = flipped.replace_relation(new_rel).drop_relations(
        [m.name for m in markers], graph=step.source_graph_flag
    )
    return out


def xor_formula(p: QfFormula, q: QfFormula) -> QfFormula:
    return Or((And((p, Not(q))), And((Not(p), q))))


def definability_witness(step: SyntacticFlipStep, structure: Optional[FiniteStructure] = None):
    """Quantifier-free definitions across one step: ``forward`` defines the
    flipped relation over the source structure, ``backward`` defines the
    source relation over the flipped structure (via the markers).

    When a structure is supplied, both are verified by exhaustive
    evaluation over its full tuple space.
    """
    alpha = RelAtom(step.relation, tuple(Var(i) for i in range(step.atom.arity)))
    if not step.flipped_pairs:
        fwd = bwd = alpha
    else:
        x_map = {slot: Var(pos) for slot, pos in enumerate(step.atom.x_positions)}
        y_map = {slot: Var(pos) for slot, pos in enumerate(step.atom.y_positions)}
        fwd_parts = []
        bwd_parts = []
        for ci, cj in sorted(step.flipped_pairs):
            dx = substitute_vars(step.x_partition.class_formula(ci), x_map)
            dy = substitute_vars(step.y_partition.class_formula(cj), y_map)
            fwd_parts.append(And((dx, dy)))
            mx = RelAtom(step.x_marker_name(ci), tuple(Var(p) for p in step.atom.x_positions))
            my = RelAtom(step.y_marker_name(cj), tuple(Var(p) for p in step.atom.y_positions))
            bwd_parts.append(And((mx, my)))
        fwd = xor_formula(alpha, Or(tuple(fwd_parts)))
        bwd = xor_formula(alpha, Or(tuple(bwd_parts)))
    if structure is not None:
        flipped = apply_syntactic_flip(structure, step)
        before = structure.relations[step.relation].tuples
        after = flipped.relations[step.relation].tuples
        for t in itertools.product(range(structure.universe_size), repeat=step.atom.arity):
            if eval_qf(structure, fwd, t) != (t in after):
                raise DomainError(f"forward witness disagrees with the flipped relation at {t}")
            if eval_qf(flipped, bwd, t) != (t in before):
                raise DomainError(f"backward witness disagrees with the source relation at {t}")
    return fwd, bwd


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphFlipStep:
    """A graph flip recorded with the parameter set that defined its
    partition, so replay can re-derive and cross-check it."""

    params: tuple
    spec: FlipSpec

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(sorted(set(self.params))))


@dataclass(frozen=True)
class FlipTrace:
    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def replay(self, structure: FiniteStructure) -> FiniteStructure:
        """Apply the steps in order, verifying at each step that the stored
        partition matches the structure it is applied to."""
        current = structure
        for idx, st in enumerate(self.steps):
            if isinstance(st, GraphFlipStep):
                part = atomic_type_partition(current, st.params)
                if part.fingerprint() != st.spec.partition.fingerprint():
                    raise DomainError(f"trace step {idx}: partition does not match the structure")
                current = apply_graph_flip(current, st.spec)
            elif isinstance(st, SyntacticFlipStep):
                current = apply_syntactic_flip(current, st)
            else:
                raise DomainError(f"trace step {idx}: unknown step type {type(st).__name__}")
        return current

    def __len__(self):
        return len(self.steps)


def _split_slots(structure: FiniteStructure):
    """The (relation, variable-split) family: every relation of arity >= 2,
    every nonempty proper position subset as the x-group, ordered by
    (relation name, subset size, lex)."""
    slots = []
    for name in sorted(structure.relations):
        rel = structure.relations[name]
        if rel.arity < 2:
            continue
        positions = tuple(range(rel.arity))
        for size in range(1, rel.arity):
            for xs in itertools.combinations(positions, size):
                ys = tuple(p for p in positions if p not in xs)
                slots.append(PartitionedAtom(name, rel.arity, xs, ys))
    return slots


def enumerate_syntactic_traces(
    structure: FiniteStructure, S, budget_bits: Optional[int] = None
) -> Iterator[tuple]:
    """Depth-first product over the per-(relation, split) step family.

    Each slot contributes one optional syntactic step whose matrix ranges
    over all subsets of (x-class, y-class) pairs; the zero matrix skips the
    slot.  Partitions are computed on the *current* structure, so later
    slots see earlier toggles.  Yields (trace, final_structure) pairs;
    the first yield is the empty trace with the input unchanged.

    The budget is checked against the total matrix bits of all slots on
    the input structure (an estimate -- class counts can drift as steps
    apply; any slot whose live matrix alone exceeds the budget aborts).
    """
    budget = default_budget_bits() if budget_bits is None else budget_bits
    S_sorted = tuple(sorted(set(S)))
    slots = _split_slots(structure)
    total_bits = 0
    for atom in slots:
        xp = alpha_type_partition(structure, atom, S_sorted, side="x")
        yp = alpha_type_partition(structure, atom, S_sorted, side="y")
        total_bits += len(xp.classes) * len(yp.classes)
    if total_bits > budget:
        raise BudgetExceeded(
            f"syntactic trace family needs {total_bits} matrix bits, budget is {budget}",
            required=total_bits,
            budget=budget,
        )

    def dfs(i: int, current: FiniteStructure, steps: list):
        if i == len(slots):
            yield FlipTrace(tuple(steps)), current
            return
        atom = slots[i]
        xp = alpha_type_partition(current, atom, S_sorted, side="x")
        yp = alpha_type_partition(current, atom, S_sorted, side="y")
        pairs = [(a, b) for a in range(len(xp.classes)) for b in range(len(yp.classes))]
        n_bits = len(pairs)
        if n_bits > budget:
            raise BudgetExceeded(
                f"slot {atom} needs {n_bits} matrix bits on the current structure, budget is {budget}",
                required=n_bits,
                budget=budget,
            )
        for m in range(1 << n_bits):
            if m == 0:
                yield from dfs(i + 1, current, steps)
                continue
            bits = format(m, f"0{n_bits}b")
            flipped = frozenset(p for p, b in zip(pairs, bits) if b == "1")
            step = SyntacticFlipStep(
                atom,
                S_sorted,
                xp,
                yp,
                flipped,
                step_index=len(steps),
                source_graph_flag=current.graph,
            )
            nxt = apply_syntactic_flip(current, step)
            yield from dfs(i + 1, nxt, steps + [step])

    yield from dfs(0, structure, [])

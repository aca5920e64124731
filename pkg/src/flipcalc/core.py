"""Finite relational structures, quantifier-free formulas, atomic-type
partitions, and Gaifman-distance primitives.

Everything downstream (flips, independence, separation constructions, games)
is built on the three data types here: :class:`FiniteStructure`,
:class:`QfFormula` (a small AST), and :class:`TypePartition`.  Elements of a
structure are dense integer ids ``0..n-1``; adjacency and BFS use Python-int
bitsets.

Structures are immutable by convention: every "mutator" returns a new
instance, which makes the lazily computed adjacency caches safe to share.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .errors import DomainError

__all__ = [
    "Relation",
    "FiniteStructure",
    "Var",
    "Const",
    "RelAtom",
    "Eq",
    "Not",
    "And",
    "Or",
    "TRUE",
    "FALSE",
    "QfFormula",
    "Term",
    "eval_qf",
    "free_vars",
    "is_positive",
    "substitute_vars",
    "shift_vars",
    "conj",
    "disj",
    "formula_to_str",
    "PartitionedAtom",
    "TypeClass",
    "TypePartition",
    "atomic_type_partition",
    "alpha_type_partition",
    "Ball",
    "ball",
    "dist",
    "set_distance",
    "gaifman",
    "incidence_graph",
    "validate",
]


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Relation:
    """A named relation: arity plus a set of tuples of element ids.

    The constructor normalizes ``tuples`` to a frozenset of tuples but does
    *not* check arity or id ranges -- see :func:`validate`, which reports
    those as diagnostics so that malformed input files can still be loaded
    and inspected.
    """

    name: str
    arity: int
    tuples: frozenset

    def __post_init__(self):
        if not isinstance(self.arity, int) or self.arity < 1:
            raise DomainError(f"relation {self.name!r}: arity must be a positive integer")
        object.__setattr__(self, "tuples", frozenset(tuple(t) for t in self.tuples))

    def sorted_tuples(self) -> list:
        return sorted(self.tuples)

    def replace_tuples(self, tuples: Iterable) -> "Relation":
        return Relation(self.name, self.arity, frozenset(tuple(t) for t in tuples))


class FiniteStructure:
    """A finite relational structure over elements ``0..universe_size-1``.

    ``graph=True`` flags the structure as a simple graph: exactly one
    relation, binary, symmetric and irreflexive (checked by
    :func:`validate`, assumed by the graph fast paths).
    """

    __slots__ = ("universe_size", "relations", "graph", "_gaifman_bits")

    def __init__(self, universe_size: int, relations=(), graph: bool = False):
        if not isinstance(universe_size, int) or universe_size < 0:
            raise DomainError("universe_size must be a non-negative integer")
        if isinstance(relations, Mapping):
            rels = {}
            for name, rel in relations.items():
                if name != rel.name:
                    raise DomainError(f"relation map key {name!r} != relation name {rel.name!r}")
                rels[name] = rel
        else:
            rels = {}
            for rel in relations:
                if rel.name in rels:
                    raise DomainError(f"duplicate relation name {rel.name!r}")
                rels[rel.name] = rel
        self.universe_size = universe_size
        self.relations = dict(sorted(rels.items()))
        self.graph = bool(graph)
        self._gaifman_bits = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, name: str = "E") -> "FiniteStructure":
        """Build a graph-flagged structure from undirected edge pairs."""
        tuples = set()
        for e in edges:
            u, v = e
            if u == v:
                raise DomainError(f"loop edge ({u},{u}) not allowed in a graph")
            tuples.add((u, v))
            tuples.add((v, u))
        return cls(n, [Relation(name, 2, frozenset(tuples))], graph=True)

    def replace_relation(self, rel: Relation, graph=None) -> "FiniteStructure":
        if rel.name not in self.relations:
            raise DomainError(f"no relation named {rel.name!r} to replace")
        rels = dict(self.relations)
        rels[rel.name] = rel
        return FiniteStructure(self.universe_size, rels, self.graph if graph is None else graph)

    def add_relation(self, rel: Relation, graph=None) -> "FiniteStructure":
        if rel.name in self.relations:
            raise DomainError(f"relation {rel.name!r} already present")
        rels = dict(self.relations)
        rels[rel.name] = rel
        return FiniteStructure(self.universe_size, rels, self.graph if graph is None else graph)

    def drop_relations(self, names: Iterable[str], graph=None) -> "FiniteStructure":
        names = set(names)
        rels = {k: v for k, v in self.relations.items() if k not in names}
        return FiniteStructure(self.universe_size, rels, self.graph if graph is None else graph)

    # -- queries -------------------------------------------------------------

    def has(self, name: str, tup) -> bool:
        rel = self.relations.get(name)
        if rel is None:
            raise DomainError(f"unknown relation {name!r}")
        return tuple(tup) in rel.tuples

    @property
    def graph_relation(self) -> Relation:
        if not self.graph:
            raise DomainError("structure is not flagged as a graph")
        (rel,) = self.relations.values()
        return rel

    def edge_set(self) -> set:
        """Undirected edges of a graph-flagged structure, as sorted pairs."""
        rel = self.graph_relation
        return {(u, v) for (u, v) in rel.tuples if u < v}

    def gaifman_bits(self) -> list:
        """Adjacency bitsets of the Gaifman graph (bit v of row u <=> u~v)."""
        if self._gaifman_bits is None:
            n = self.universe_size
            rows = [0] * n
            for rel in self.relations.values():
                if rel.arity < 2:
                    continue
                for t in rel.tuples:
                    distinct = set(t)
                    for u in distinct:
                        for v in distinct:
                            if u != v and 0 <= u < n and 0 <= v < n:
                                rows[u] |= 1 << v
            self._gaifman_bits = rows
        return self._gaifman_bits

    # -- value semantics -----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, FiniteStructure):
            return NotImplemented
        return (
            self.universe_size == other.universe_size
            and self.graph == other.graph
            and self.relations == other.relations
        )

    def __hash__(self):
        return hash((self.universe_size, self.graph, frozenset(self.relations.values())))

    def __repr__(self):
        shape = ", ".join(f"{r.name}/{r.arity}:{len(r.tuples)}" for r in self.relations.values())
        flag = ", graph" if self.graph else ""
        return f"FiniteStructure(n={self.universe_size}, [{shape}]{flag})"


def validate(structure: FiniteStructure) -> list:
    """Check the structure invariants; return a list of diagnostic strings.

    An empty list means the structure is well formed.  Diagnostics cover
    out-of-range ids, arity mismatches, and (for graph-flagged structures)
    the single-binary-symmetric-irreflexive requirement.
    """
    diags = []
    n = structure.universe_size
    for name in sorted(structure.relations):
        rel = structure.relations[name]
        for t in rel.sorted_tuples():
            if len(t) != rel.arity:
                diags.append(f"arity mismatch: relation {name!r} declared arity {rel.arity}, tuple {t}")
                continue
            for a in t:
                if not isinstance(a, int) or not 0 <= a < n:
                    diags.append(f"out-of-range id: relation {name!r} tuple {t} entry {a!r} (universe {n})")
    if structure.graph:
        rels = list(structure.relations.values())
        if len(rels) != 1 or rels[0].arity != 2:
            diags.append("graph flag requires exactly one binary relation")
        else:
            rel = rels[0]
            for t in rel.sorted_tuples():
                if len(t) != 2:
                    continue
                u, v = t
                if u == v:
                    diags.append(f"irreflexivity violated: loop ({u},{u}) in {rel.name!r}")
                elif (v, u) not in rel.tuples:
                    diags.append(f"asymmetric graph relation: ({u},{v}) in {rel.name!r} but not ({v},{u})")
    return diags


# ---------------------------------------------------------------------------
# Quantifier-free formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    value: int


Term = Union[Var, Const]


@dataclass(frozen=True)
class RelAtom:
    name: str
    args: tuple


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    inner: "QfFormula"


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


QfFormula = Union[RelAtom, Eq, Not, And, Or]

#: Empty conjunction / empty disjunction.
TRUE = And(())
FALSE = Or(())


def _term_value(structure: FiniteStructure, term: Term, assignment) -> int:
    if isinstance(term, Var):
        i = term.index
        if isinstance(assignment, Mapping):
            if i not in assignment:
                raise DomainError(f"unbound variable x{i}")
            v = assignment[i]
        else:
            if not 0 <= i < len(assignment):
                raise DomainError(f"unbound variable x{i}")
            v = assignment[i]
    elif isinstance(term, Const):
        v = term.value
    else:
        raise DomainError(f"not a term: {term!r}")
    if not isinstance(v, int) or not 0 <= v < structure.universe_size:
        raise DomainError(f"element id {v!r} outside universe of size {structure.universe_size}")
    return v


def eval_qf(structure: FiniteStructure, formula: QfFormula, assignment=()) -> bool:
    """Standard quantifier-free satisfaction.

    ``assignment`` maps variable indices to element ids; it may be a sequence
    (index = position) or a mapping.  Unbound variables, unknown relations,
    and out-of-range element ids raise :class:`DomainError`.
    """
    if isinstance(formula, RelAtom):
        rel = structure.relations.get(formula.name)
        if rel is None:
            raise DomainError(f"unknown relation {formula.name!r}")
        if len(formula.args) != rel.arity:
            raise DomainError(
                f"relation {formula.name!r} has arity {rel.arity}, got {len(formula.args)} arguments"
            )
        t = tuple(_term_value(structure, a, assignment) for a in formula.args)
        return t in rel.tuples
    if isinstance(formula, Eq):
        return _term_value(structure, formula.left, assignment) == _term_value(
            structure, formula.right, assignment
        )
    if isinstance(formula, Not):
        return not eval_qf(structure, formula.inner, assignment)
    if isinstance(formula, And):
        return all(eval_qf(structure, p, assignment) for p in formula.parts)
    if isinstance(formula, Or):
        return any(eval_qf(structure, p, assignment) for p in formula.parts)
    raise DomainError(f"not a formula: {formula!r}")


def free_vars(formula: QfFormula) -> tuple:
    """Sorted tuple of free variable indices."""
    out = set()

    def walk(f):
        if isinstance(f, RelAtom):
            for a in f.args:
                if isinstance(a, Var):
                    out.add(a.index)
        elif isinstance(f, Eq):
            for a in (f.left, f.right):
                if isinstance(a, Var):
                    out.add(a.index)
        elif isinstance(f, Not):
            walk(f.inner)
        elif isinstance(f, (And, Or)):
            for p in f.parts:
                walk(p)
        else:
            raise DomainError(f"not a formula: {f!r}")

    walk(formula)
    return tuple(sorted(out))


def is_positive(formula: QfFormula) -> bool:
    """True when the formula contains no NOT and no FALSE."""
    if isinstance(formula, Not):
        return False
    if isinstance(formula, Or):
        if not formula.parts:  # FALSE
            return False
        return all(is_positive(p) for p in formula.parts)
    if isinstance(formula, And):
        return all(is_positive(p) for p in formula.parts)
    return True


def substitute_vars(formula: QfFormula, mapping: Mapping) -> QfFormula:
    """Replace Var(i) by mapping[i] (a Term) wherever i is mapped."""

    def term(t):
        if isinstance(t, Var) and t.index in mapping:
            return mapping[t.index]
        return t

    if isinstance(formula, RelAtom):
        return RelAtom(formula.name, tuple(term(a) for a in formula.args))
    if isinstance(formula, Eq):
        return Eq(term(formula.left), term(formula.right))
    if isinstance(formula, Not):
        return Not(substitute_vars(formula.inner, mapping))
    if isinstance(formula, And):
        return And(tuple(substitute_vars(p, mapping) for p in formula.parts))
    if isinstance(formula, Or):
        return Or(tuple(substitute_vars(p, mapping) for p in formula.parts))
    raise DomainError(f"not a formula: {formula!r}")


def shift_vars(formula: QfFormula, offset: int) -> QfFormula:
    return substitute_vars(formula, {i: Var(i + offset) for i in free_vars(formula)})


def conj(parts) -> QfFormula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts) -> QfFormula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else Or(parts)


def formula_to_str(formula: QfFormula) -> str:
    def term(t):
        return f"x{t.index}" if isinstance(t, Var) else str(t.value)

    if isinstance(formula, RelAtom):
        return f"{formula.name}({', '.join(term(a) for a in formula.args)})"
    if isinstance(formula, Eq):
        return f"{term(formula.left)}={term(formula.right)}"
    if isinstance(formula, Not):
        return f"~{formula_to_str(formula.inner)}"
    if isinstance(formula, And):
        if not formula.parts:
            return "TRUE"
        return "(" + " & ".join(formula_to_str(p) for p in formula.parts) + ")"
    if isinstance(formula, Or):
        if not formula.parts:
            return "FALSE"
        return "(" + " | ".join(formula_to_str(p) for p in formula.parts) + ")"
    raise DomainError(f"not a formula: {formula!r}")


# ---------------------------------------------------------------------------
# Partitioned atoms and type partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionedAtom:
    """An atomic formula R(w) with its argument positions split into two
    groups x / y.  Positions are 0-based indices into R's argument list;
    the variable order within a group is ascending position order.
    """

    relation: str
    arity: int
    x_positions: tuple
    y_positions: tuple

    def __post_init__(self):
        xs = tuple(sorted(self.x_positions))
        ys = tuple(sorted(self.y_positions))
        object.__setattr__(self, "x_positions", xs)
        object.__setattr__(self, "y_positions", ys)
        if not xs or not ys:
            raise DomainError("both position groups of a partitioned atom must be nonempty")
        if set(xs) & set(ys):
            raise DomainError("position groups must be disjoint")
        if set(xs) | set(ys) != set(range(self.arity)):
            raise DomainError(f"position groups must cover 0..{self.arity - 1}")

    def swapped(self) -> "PartitionedAtom":
        return PartitionedAtom(self.relation, self.arity, self.y_positions, self.x_positions)

    def assemble(self, x_tuple, y_tuple) -> tuple:
        args = [None] * self.arity
        for slot, pos in enumerate(self.x_positions):
            args[pos] = x_tuple[slot]
        for slot, pos in enumerate(self.y_positions):
            args[pos] = y_tuple[slot]
        return tuple(args)

    def holds(self, structure: FiniteStructure, x_tuple, y_tuple) -> bool:
        return structure.has(self.relation, self.assemble(x_tuple, y_tuple))


@dataclass(frozen=True)
class TypeClass:
    class_id: int
    descriptor: str
    members: tuple  # sorted tuples

    @property
    def elements(self) -> tuple:
        """Members as bare ids (only meaningful for arity-1 partitions)."""
        return tuple(t[0] for t in self.members)


class TypePartition:
    """A partition of a tuple space by the truth pattern of a fixed atom list.

    ``atoms`` are QfFormulas in variables ``0..arity-1``; a tuple's class
    descriptor is the '0'/'1' string of their truth values.  Classes are
    sorted by descriptor, so class ids are canonical.
    """

    __slots__ = ("parameter_set", "arity", "atoms", "classes", "_index")

    def __init__(self, parameter_set, arity, atoms, classes):
        self.parameter_set = tuple(sorted(parameter_set))
        self.arity = arity
        self.atoms = tuple(atoms)
        self.classes = tuple(classes)
        self._index = {}
        for cls in self.classes:
            for t in cls.members:
                self._index[t] = cls.class_id

    def class_of(self, t) -> int:
        t = tuple(t)
        if t not in self._index:
            raise DomainError(f"tuple {t} is not in the classified space")
        return self._index[t]

    def class_formula(self, class_id: int) -> QfFormula:
        """The defining formula delta_T: conjunction of +/- atom literals,
        never simplified."""
        if not self.atoms and len(self.classes) > 1:
            raise DomainError("partition was given by explicit classes and has no defining atoms")
        cls = self.classes[class_id]
        lits = tuple(
            atom if bit == "1" else Not(atom) for atom, bit in zip(self.atoms, cls.descriptor)
        )
        return And(lits)

    def fingerprint(self) -> str:
        payload = {
            "parameters": list(self.parameter_set),
            "arity": self.arity,
            "classes": [[c.descriptor, [list(t) for t in c.members]] for c in self.classes],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def _value_key(self):
        # Same payload as fingerprint(): partitions that classify the same
        # space identically are interchangeable, whatever atoms derived them.
        return (
            self.parameter_set,
            self.arity,
            tuple((c.descriptor, c.members) for c in self.classes),
        )

    def __eq__(self, other):
        if not isinstance(other, TypePartition):
            return NotImplemented
        return self._value_key() == other._value_key()

    def __hash__(self):
        return hash(self._value_key())

    def __len__(self):
        return len(self.classes)

    def __repr__(self):
        sizes = ",".join(str(len(c.members)) for c in self.classes)
        return f"TypePartition(S={list(self.parameter_set)}, arity={self.arity}, sizes=[{sizes}])"


def _normalize_space(space, arity):
    out = []
    seen = set()
    for t in space:
        if isinstance(t, int):
            t = (t,)
        t = tuple(t)
        if len(t) != arity:
            raise DomainError(f"tuple {t} does not have arity {arity}")
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def _partition_by_atoms(structure, atoms, space, parameter_set, arity) -> TypePartition:
    groups = {}
    for t in space:
        desc = "".join("1" if eval_qf(structure, a, t) else "0" for a in atoms)
        groups.setdefault(desc, []).append(t)
    classes = tuple(
        TypeClass(cid, desc, tuple(sorted(groups[desc])))
        for cid, desc in enumerate(sorted(groups))
    )
    return TypePartition(parameter_set, arity, atoms, classes)


def _check_params(structure, S):
    S_sorted = tuple(sorted(set(S)))
    for s in S_sorted:
        if not isinstance(s, int) or not 0 <= s < structure.universe_size:
            raise DomainError(f"parameter {s!r} outside universe of size {structure.universe_size}")
    return S_sorted


def atomic_type_partition(
    structure: FiniteStructure, S, arity: int = 1, restrict_to=None
) -> TypePartition:
    """Partition the arity-tuples of the universe by atomic type over S.

    For graph-flagged structures with arity 1 the descriptor is the
    (equality-vector, adjacency-vector) pattern versus sorted S.  In general
    the atom list is: slot-slot equalities, slot-parameter equalities, and
    every relation atom instance over terms {vars} ∪ {parameters} with at
    least one variable slot, in a fixed deterministic order.
    """
    if arity < 1:
        raise DomainError("arity must be >= 1")
    S_sorted = _check_params(structure, S)
    if structure.graph and arity == 1:
        ename = structure.graph_relation.name
        atoms = [Eq(Var(0), Const(s)) for s in S_sorted]
        atoms += [RelAtom(ename, (Var(0), Const(s))) for s in S_sorted]
    else:
        atoms = []
        for i, j in itertools.combinations(range(arity), 2):
            atoms.append(Eq(Var(i), Var(j)))
        for i in range(arity):
            for s in S_sorted:
                atoms.append(Eq(Var(i), Const(s)))
        terms = [Var(i) for i in range(arity)] + [Const(s) for s in S_sorted]
        for name in sorted(structure.relations):
            rel = structure.relations[name]
            for args in itertools.product(terms, repeat=rel.arity):
                if any(isinstance(a, Var) for a in args):
                    atoms.append(RelAtom(name, tuple(args)))
    if restrict_to is None:
        space = list(itertools.product(range(structure.universe_size), repeat=arity))
    else:
        space = _normalize_space(restrict_to, arity)
    return _partition_by_atoms(structure, tuple(atoms), space, S_sorted, arity)


def alpha_type_partition(
    structure: FiniteStructure,
    atom: PartitionedAtom,
    S,
    side: str = "x",
    restrict_to=None,
) -> TypePartition:
    """Partition tuples for one group of a partitioned atom by their
    alpha-type over S: the truth pattern of the atom with the *other* group
    filled by each parameter tuple from S, in product order.

    ``side="x"`` classifies x-group tuples (other group = y), ``side="y"``
    the reverse.  Note this records satisfaction of the partitioned atom
    only -- no equalities -- which is coarser than the full atomic type.
    """
    if side == "x":
        pa = atom
    elif side == "y":
        pa = atom.swapped()
    else:
        raise DomainError(f"side must be 'x' or 'y', got {side!r}")
    S_sorted = _check_params(structure, S)
    k = len(pa.x_positions)
    atoms = []
    for s_bar in itertools.product(S_sorted, repeat=len(pa.y_positions)):
        args = [None] * pa.arity
        for slot, pos in enumerate(pa.x_positions):
            args[pos] = Var(slot)
        for slot, pos in enumerate(pa.y_positions):
            args[pos] = Const(s_bar[slot])
        atoms.append(RelAtom(pa.relation, tuple(args)))
    if restrict_to is None:
        space = list(itertools.product(range(structure.universe_size), repeat=k))
    else:
        space = _normalize_space(restrict_to, k)
    return _partition_by_atoms(structure, tuple(atoms), space, S_sorted, k)


# ---------------------------------------------------------------------------
# Gaifman graph, balls, distances
# ---------------------------------------------------------------------------


def gaifman(structure: FiniteStructure) -> FiniteStructure:
    """The Gaifman graph: u~w iff u != w and they co-occur in some tuple.

    Graph-flagged structures are their own Gaifman graph and are returned
    unchanged.
    """
    if structure.graph:
        return structure
    rows = structure.gaifman_bits()
    edges = []
    for u in range(structure.universe_size):
        m = rows[u]
        while m:
            b = m & -m
            v = b.bit_length() - 1
            if u < v:
                edges.append((u, v))
            m ^= b
    return FiniteStructure.from_edges(structure.universe_size, edges)


def incidence_graph(structure: FiniteStructure) -> FiniteStructure:
    """Bipartite incidence structure: elements plus one fresh node per
    (relation, tuple).

    Tuple nodes carry a unary label ``U_<R>``; the incidence edge between a
    tuple node and an element is recorded in a binary relation named after
    the (1-based) position set at which the element occurs, e.g.
    ``inc_1``, ``inc_1_2``.  Incidence tuples are (tuple-node, element).
    """
    next_id = structure.universe_size
    unary = {}
    inc = {}
    for name in sorted(structure.relations):
        rel = structure.relations[name]
        for t in rel.sorted_tuples():
            node = next_id
            next_id += 1
            unary.setdefault(f"U_{name}", set()).add((node,))
            for elem in sorted(set(t)):
                positions = tuple(i + 1 for i, a in enumerate(t) if a == elem)
                label = "inc_" + "_".join(str(p) for p in positions)
                inc.setdefault(label, set()).add((node, elem))
    relations = [Relation(nm, 1, frozenset(ts)) for nm, ts in unary.items()]
    relations += [Relation(nm, 2, frozenset(ts)) for nm, ts in inc.items()]
    return FiniteStructure(next_id, relations)


@dataclass(frozen=True)
class Ball:
    center: int
    radius: int
    members: frozenset


def _as_mask(ids, n) -> int:
    mask = 0
    for u in ids:
        if not isinstance(u, int) or not 0 <= u < n:
            raise DomainError(f"element id {u!r} outside universe of size {n}")
        mask |= 1 << u
    return mask


def _mask_to_ids(mask: int):
    out = []
    while mask:
        b = mask & -mask
        out.append(b.bit_length() - 1)
        mask ^= b
    return out


def _neighbors(rows, mask: int) -> int:
    out = 0
    while mask:
        b = mask & -mask
        out |= rows[b.bit_length() - 1]
        mask ^= b
    return out


def ball(structure: FiniteStructure, center: int, r: int) -> Ball:
    """Radius-r ball around ``center`` in the Gaifman graph (BFS semantics)."""
    n = structure.universe_size
    if not 0 <= center < n:
        raise DomainError(f"center {center} outside universe of size {n}")
    if r < 0:
        raise DomainError("radius must be >= 0")
    rows = structure.gaifman_bits()
    reached = 1 << center
    frontier = reached
    for _ in range(r):
        frontier = _neighbors(rows, frontier) & ~reached
        if not frontier:
            break
        reached |= frontier
    return Ball(center, r, frozenset(_mask_to_ids(reached)))


def set_distance(structure: FiniteStructure, sources, targets, cutoff=None):
    """Least Gaifman-graph distance from any source to any target.

    Returns 0 when the sets intersect, ``math.inf`` when unreachable (or
    when the distance would exceed ``cutoff``), and raises on empty input
    sets (distance to nothing is undefined).
    """
    n = structure.universe_size
    src = _as_mask(sources, n)
    tgt = _as_mask(targets, n)
    if not src or not tgt:
        raise DomainError("set_distance requires nonempty source and target sets")
    if src & tgt:
        return 0
    rows = structure.gaifman_bits()
    reached = src
    frontier = src
    d = 0
    while frontier:
        d += 1
        if cutoff is not None and d > cutoff:
            return math.inf
        frontier = _neighbors(rows, frontier) & ~reached
        if frontier & tgt:
            return d
        reached |= frontier
    return math.inf


def dist(structure: FiniteStructure, u: int, v: int, cutoff=None):
    """Gaifman-graph distance between two elements; ``math.inf`` when
    disconnected."""
    return set_distance(structure, (u,), (v,), cutoff=cutoff)

"""Constructive separation: build explicit flips that push a set of
elements Gaifman-far from a designated "model" subset.

A ModelPair is a finite surrogate for an elementary pair: the model is
just a distinguished id-set, and the elementary-substructure hypotheses
the constructions lean on are replaced by checkable saturation conditions
(every realized atomic-type class over the parameter sets used must meet
the model).  Reports grade each conclusion as verified, violated,
unverifiable (the saturation surrogate failed, so the hypothesis the
construction needs is absent), or not-applicable (the clause's gate
condition fails).

The graph construction isolates a vertex set U in one flip; the
higher-arity pipeline removes, split by split, every relation tuple mixing
a ball around an element with the model, enqueueing the marker relations
each syntactic step introduces.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Optional

from .core import (
    Const,
    Eq,
    FALSE,
    FiniteStructure,
    PartitionedAtom,
    QfFormula,
    TypePartition,
    Var,
    alpha_type_partition,
    atomic_type_partition,
    ball,
    disj,
    eval_qf,
    set_distance,
)
from .errors import BudgetExceeded, DomainError
from .flips import (
    FlipSpec,
    FlipTrace,
    GraphFlipStep,
    SyntacticFlipStep,
    apply_graph_flip,
    apply_syntactic_flip,
    make_syntactic_step,
)

__all__ = [
    "ModelPair",
    "EtypeCatalog",
    "etype_catalog",
    "SynthesizedDefinition",
    "synthesize_neighborhood_definition",
    "HarringtonCheck",
    "harrington_check",
    "ClauseReport",
    "SeparationReport",
    "SeparatingFlip",
    "build_separating_flip",
    "SeparationRun",
    "iterate_separation",
    "double_separation",
    "ThreeSplit",
    "TypesOfBallResult",
    "types_of_ball_count",
    "OneSeparationResult",
    "one_separation",
    "separate_element",
]

DEFAULT_PARAMETER_CAP = 4


# ---------------------------------------------------------------------------
# Model pairs and the saturation surrogate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelPair:
    """A structure together with a distinguished 'model' subset of ids."""

    structure: FiniteStructure
    model: frozenset

    def __post_init__(self):
        n = self.structure.universe_size
        vals = frozenset(self.model)
        for g in vals:
            if not isinstance(g, int) or not 0 <= g < n:
                raise DomainError(f"model element {g!r} outside universe of size {n}")
        object.__setattr__(self, "model", vals)

    def outside(self) -> tuple:
        return tuple(
            u for u in range(self.structure.universe_size) if u not in self.model
        )

    def saturated_for(self, S) -> bool:
        """True when every realized atomic 1-type class over S meets the model."""
        part = atomic_type_partition(self.structure, S, 1)
        return all(
            any(m[0] in self.model for m in cls.members) for cls in part.classes
        )

    def saturation_report(self, max_size: int = 2) -> dict:
        """For each k <= max_size: are all parameter sets drawn from the
        model with at most k elements saturated?"""
        pool = sorted(self.model)
        report = {}
        ok = True
        for k in range(max_size + 1):
            for S in itertools.combinations(pool, k):
                if not self.saturated_for(S):
                    ok = False
                    break
            report[k] = ok
        return report


def model_neighborhood(pair: ModelPair, u: int) -> frozenset:
    rows = pair.structure.gaifman_bits()
    return frozenset(g for g in pair.model if (rows[u] >> g) & 1)


def _complete_towards(rows, xs, ys) -> bool:
    """Every element of xs adjacent to every element of ys (false for empty ys)."""
    if not ys:
        return False
    return all(all((rows[x] >> y) & 1 for y in ys) for x in xs)


def complete_vertex_warnings(pair: ModelPair) -> tuple:
    """Warn when a vertex complete to the model coexists with one
    anti-complete to it; the distance-preservation arguments assume the
    configuration is absent."""
    if not pair.model:
        return ()
    rows = pair.structure.gaifman_bits()
    complete = [
        u for u in pair.outside() if all((rows[u] >> g) & 1 for g in pair.model)
    ]
    anti = [u for u in pair.outside() if not any((rows[u] >> g) & 1 for g in pair.model)]
    if complete and anti:
        return (
            f"vertex {complete[0]} is complete and vertex {anti[0]} is "
            "anti-complete towards the model",
        )
    return ()


def complete_tuple_warnings(pair: ModelPair) -> tuple:
    """Higher-arity analogue: a tuple outside the model complete towards
    the model on the complementary coordinates."""
    warnings = []
    H, model = pair.structure, pair.model
    n = H.universe_size
    if not model:
        return ()
    for name, rel in H.relations.items():
        if rel.arity < 2:
            continue
        positions = range(rel.arity)
        for size in range(1, rel.arity):
            for x_positions in itertools.combinations(positions, size):
                y_positions = tuple(p for p in positions if p not in x_positions)
                atom = PartitionedAtom(name, rel.arity, x_positions, y_positions)
                found = None
                for xt in itertools.product(range(n), repeat=size):
                    if all(c in model for c in xt):
                        continue
                    if all(
                        atom.assemble(xt, yt) in rel.tuples
                        for yt in itertools.product(sorted(model), repeat=len(y_positions))
                    ):
                        found = xt
                        break
                if found is not None:
                    warnings.append(
                        f"tuple {found} at positions {x_positions} of {name} is "
                        "complete towards the model"
                    )
    return tuple(warnings)


# ---------------------------------------------------------------------------
# Type catalogs over the model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EtypeCatalog:
    partition: TypePartition
    representatives: tuple

    @property
    def count(self) -> int:
        return len(self.partition.classes)

    @property
    def classes(self) -> tuple:
        return self.partition.classes


def etype_catalog(pair: ModelPair, U) -> EtypeCatalog:
    """Partition U (disjoint from the model) by atomic 1-type over the
    model; one lowest-id representative per class."""
    U = sorted(set(U))
    for u in U:
        if u in pair.model:
            raise DomainError(f"element {u} of U lies in the model")
    part = atomic_type_partition(pair.structure, pair.model, 1, restrict_to=U)
    reps = tuple(min(cls.elements) for cls in part.classes)
    return EtypeCatalog(part, reps)


# ---------------------------------------------------------------------------
# Defining a neighborhood over the model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SynthesizedDefinition:
    element: int
    strategy: str
    formula: QfFormula
    parameters: frozenset
    notes: tuple = ()


def _homogeneous_partition_formula(structure, params, target, model):
    """If every class of the atomic 1-type partition over params is, on its
    model part, entirely inside or outside the target, return the
    disjunction of the class formulas of the inside classes; else None."""
    part = atomic_type_partition(structure, params, 1)
    chosen = []
    for cls in part.classes:
        g_part = [m[0] for m in cls.members if m[0] in model]
        if not g_part:
            continue
        inside = [g in target for g in g_part]
        if any(inside) and not all(inside):
            return None
        if all(inside):
            chosen.append(part.class_formula(cls.class_id))
    return disj(chosen) if chosen else FALSE


def synthesize_neighborhood_definition(
    pair: ModelPair,
    u: int,
    strategy: str = "class_based",
    max_parameters: int = DEFAULT_PARAMETER_CAP,
) -> SynthesizedDefinition:
    """A formula in one variable agreeing with adjacency-to-u on the model.

    enumerative: a disjunction of equalities with u's model neighbors
    (false everywhere outside the model).  class_based: the smallest
    parameter set (size, then lexicographic; parameters within distance 2
    of u preferred) whose 1-type classes are homogeneous towards u; the
    formula is the disjunction of the neighbor-class formulas.
    """
    H = pair.structure
    if not H.graph:
        raise DomainError("neighborhood synthesis requires a graph")
    if u in pair.model:
        raise DomainError(f"element {u} lies in the model")
    nbhd = sorted(model_neighborhood(pair, u))
    if strategy == "enumerative":
        formula = disj([Eq(Var(0), Const(g)) for g in nbhd]) if nbhd else FALSE
        return SynthesizedDefinition(u, strategy, formula, frozenset(nbhd))
    if strategy != "class_based":
        raise DomainError(f"unknown synthesis strategy {strategy!r}")
    target = set(nbhd)
    local_pool = sorted(pair.model & ball(H, u, 2).members)
    full_pool = sorted(pair.model)
    for pool, notes in ((local_pool, ()), (full_pool, ("parameters beyond radius 2 of the element",))):
        if pool is full_pool and local_pool == full_pool:
            break
        for size in range(min(max_parameters, len(pool)) + 1):
            for params in itertools.combinations(pool, size):
                formula = _homogeneous_partition_formula(H, params, target, pair.model)
                if formula is None:
                    continue
                result = SynthesizedDefinition(u, strategy, formula, frozenset(params), notes)
                for g in pair.model:
                    if eval_qf(H, formula, (g,)) != (g in target):
                        raise DomainError(
                            "synthesized definition disagrees with adjacency on the model"
                        )
                return result
    if max_parameters < len(pair.model):
        raise BudgetExceeded(
            f"no homogeneous parameter set of size <= {max_parameters} for element {u}",
            budget=max_parameters,
        )
    raise DomainError(f"no parameter set over the model defines the neighborhood of {u}")


@dataclass(frozen=True)
class HarringtonCheck:
    u: int
    v: int
    psi_u_at_v: bool
    psi_v_at_u: bool

    @property
    def consistent(self) -> bool:
        return self.psi_u_at_v == self.psi_v_at_u

    @property
    def verdict(self) -> str:
        return "consistent" if self.consistent else "violated"


def harrington_check(
    pair: ModelPair,
    u: int,
    v: int,
    strategy: str = "class_based",
    max_parameters: int = DEFAULT_PARAMETER_CAP,
) -> HarringtonCheck:
    """Do u's definition at v and v's definition at u agree?"""
    psi_u = synthesize_neighborhood_definition(pair, u, strategy, max_parameters)
    psi_v = synthesize_neighborhood_definition(pair, v, strategy, max_parameters)
    return HarringtonCheck(
        u,
        v,
        eval_qf(pair.structure, psi_u.formula, (v,)),
        eval_qf(pair.structure, psi_v.formula, (u,)),
    )


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClauseReport:
    name: str
    status: str  # verified | violated | unverifiable | not-applicable
    details: str = ""


@dataclass(frozen=True)
class SeparationReport:
    saturated: bool
    parameter_set: frozenset
    clauses: tuple
    warnings: tuple = ()

    def clause(self, name: str) -> ClauseReport:
        for c in self.clauses:
            if c.name == name:
                return c
        raise DomainError(f"no clause named {name!r}")

    def as_dict(self) -> dict:
        return {
            "saturated": self.saturated,
            "parameter_set": sorted(self.parameter_set),
            "clauses": [
                {"name": c.name, "status": c.status, "details": c.details}
                for c in self.clauses
            ],
            "warnings": list(self.warnings),
        }


def _status(ok: bool, downgrade: bool) -> str:
    if ok:
        return "verified"
    return "unverifiable" if downgrade else "violated"


def _safe_set_distance(structure, xs, ys, cutoff=None):
    if not xs or not ys:
        return math.inf
    return set_distance(structure, xs, ys, cutoff=cutoff)


# ---------------------------------------------------------------------------
# The graph construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparatingFlip:
    S: frozenset
    spec: FlipSpec
    report: SeparationReport
    flipped: FiniteStructure


def build_separating_flip(
    pair: ModelPair, U, max_parameters: int = DEFAULT_PARAMETER_CAP
) -> SeparatingFlip:
    """One flip after which U has no neighbors in the model.

    Parameters: pairwise type distinguishers and one model-neighbor per
    representative, plus the parameters of each representative's
    class-based neighborhood definition.  A class pair is flipped when
    either side's U-part is nonempty and complete towards the other side's
    model part.
    """
    H = pair.structure
    if not H.graph:
        raise DomainError("the one-flip separation construction requires a graph")
    U = frozenset(U)
    catalog = etype_catalog(pair, U)
    reps = catalog.representatives
    rows = H.gaifman_bits()
    nbhds = {rep: model_neighborhood(pair, rep) for rep in reps}

    W0 = set()
    for i, j in itertools.combinations(range(len(reps)), 2):
        diff = sorted(nbhds[reps[i]] ^ nbhds[reps[j]])
        W0.add(diff[0])
    for rep in reps:
        if nbhds[rep]:
            W0.add(min(nbhds[rep]))

    notes = []
    S = set(W0)
    for rep in reps:
        psi = synthesize_neighborhood_definition(pair, rep, "class_based", max_parameters)
        S |= psi.parameters
        notes.extend(psi.notes)
    S = frozenset(S)

    partition = atomic_type_partition(H, S, 1)
    members = [frozenset(cls.elements) for cls in partition.classes]
    flipped_pairs = set()
    for i in range(len(members)):
        for j in range(i, len(members)):
            for a, b in ((i, j), (j, i)):
                ua = U & members[a]
                gb = pair.model & members[b]
                if ua and _complete_towards(rows, sorted(ua), sorted(gb)):
                    flipped_pairs.add((i, j))
                    break
    spec = FlipSpec(partition, frozenset(flipped_pairs))
    flipped = apply_graph_flip(H, spec)

    saturated = pair.saturated_for(S)
    warnings = tuple(notes) + complete_vertex_warnings(pair)
    downgrade = not saturated or bool(complete_vertex_warnings(pair))
    clauses = []

    d1 = _safe_set_distance(flipped, U, pair.model, cutoff=1)
    clauses.append(
        ClauseReport(
            "model_separation",
            _status(d1 > 1, not saturated),
            f"flipped distance from U to the model is {d1}",
        )
    )

    complete_u = [
        u for u in sorted(U) if pair.model and nbhds.get(u, model_neighborhood(pair, u)) == pair.model
    ]
    if complete_u:
        clauses.append(
            ClauseReport(
                "far_from_parameters_unchanged",
                "not-applicable",
                f"member {complete_u[0]} of U is complete towards the model",
            )
        )
    else:
        new_rows = flipped.gaifman_bits()
        bad = [
            w
            for w in range(H.universe_size)
            if _safe_set_distance(H, {w}, S) > 1 and rows[w] != new_rows[w]
        ]
        clauses.append(
            ClauseReport(
                "far_from_parameters_unchanged",
                _status(not bad, downgrade),
                f"changed far vertices: {bad}" if bad else "",
            )
        )

    outside = pair.outside()
    inst3 = []
    for v in outside:
        d = _safe_set_distance(H, {v}, U)
        if d >= 4:
            inst3.append((v, d, _safe_set_distance(flipped, {v}, U)))
    if not inst3:
        clauses.append(ClauseReport("distance_to_set_preserved", "not-applicable", "no qualifying vertex"))
    else:
        bad = [(v, d, dn) for v, d, dn in inst3 if dn < d - 2]
        clauses.append(
            ClauseReport(
                "distance_to_set_preserved",
                _status(not bad, downgrade),
                f"degraded: {bad}" if bad else "",
            )
        )

    inst4 = []
    for v in outside:
        d = _safe_set_distance(H, {v}, pair.model)
        if d >= 2:
            inst4.append((v, d, _safe_set_distance(flipped, {v}, pair.model)))
    if not inst4:
        clauses.append(ClauseReport("distance_to_model_preserved", "not-applicable", "no qualifying vertex"))
    else:
        bad = [(v, d, dn) for v, d, dn in inst4 if dn < d]
        clauses.append(
            ClauseReport(
                "distance_to_model_preserved",
                _status(not bad, downgrade),
                f"degraded: {bad}" if bad else "",
            )
        )

    report = SeparationReport(saturated, S, tuple(clauses), warnings)
    return SeparatingFlip(S, spec, report, flipped)


# ---------------------------------------------------------------------------
# Iterated separation runs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationRun:
    trace: FlipTrace
    final: FiniteStructure
    achieved_distance: object  # int | math.inf
    required_distance: int
    success: bool
    reports: tuple = ()
    notes: tuple = ()


def iterate_separation(
    pair: ModelPair, u: int, r: int, max_parameters: int = DEFAULT_PARAMETER_CAP
) -> SeparationRun:
    """Grow a ball around u, separating it from the model one flip per
    round; after r rounds the element should sit at distance > r."""
    if u in pair.model:
        raise DomainError(f"element {u} lies in the model")
    if r < 0:
        raise DomainError("radius must be >= 0")
    current = pair.structure
    U = frozenset({u})
    steps = []
    reports = []
    for _ in range(r):
        result = build_separating_flip(ModelPair(current, pair.model), U, max_parameters)
        steps.append(GraphFlipStep(frozenset(result.S), result.spec))
        reports.append(result.report)
        current = result.flipped
        U = frozenset().union(*(ball(current, x, 1).members for x in U))
    achieved = _safe_set_distance(current, {u}, pair.model)
    success = achieved > r
    notes = ()
    if not success:
        notes = (
            f"counterexample candidate: final distance {achieved} does not exceed {r}",
        )
    return SeparationRun(FlipTrace(tuple(steps)), current, achieved, r, success, tuple(reports), notes)


def double_separation(
    pair: ModelPair,
    u: int,
    v: int,
    r: int,
    budget_bits: Optional[int] = None,
    max_parameters: int = DEFAULT_PARAMETER_CAP,
) -> SeparationRun:
    """Separate u from model+v and v from model+u simultaneously.

    Requires an enumerated model-definable flip putting u at distance
    > 3r from model+v; from there, v is iteratively separated from
    model+u, and the pair of distance conditions is verified on the result.
    A single-flip scan is the fallback when the iterative route degrades.
    """
    from .flips import enumerate_s_definable_flips

    H = pair.structure
    if not H.graph:
        raise DomainError("double separation requires a graph")
    if u == v:
        raise DomainError("double separation needs two distinct elements")
    if u in pair.model or v in pair.model:
        raise DomainError("both elements must lie outside the model")
    model_v = pair.model | {v}
    model_u = pair.model | {u}

    hyp = None
    for spec in enumerate_s_definable_flips(H, pair.model, budget_bits):
        flipped = apply_graph_flip(H, spec)
        if _safe_set_distance(flipped, {u}, model_v, cutoff=3 * r) > 3 * r:
            hyp = (spec, flipped)
            break
    if hyp is None:
        raise DomainError(
            f"no enumerated flip over the model separates {u} from the model and {v} "
            f"at distance {3 * r}"
        )
    spec, flipped = hyp
    inner = iterate_separation(ModelPair(flipped, frozenset(model_u)), v, r, max_parameters)
    steps = (GraphFlipStep(frozenset(pair.model), spec),) + inner.trace.steps
    final = inner.final
    du = _safe_set_distance(final, {u}, model_v)
    dv = _safe_set_distance(final, {v}, model_u)
    if du > r and dv > r:
        return SeparationRun(
            FlipTrace(steps), final, min(du, dv), r, True, inner.reports
        )

    for spec2 in enumerate_s_definable_flips(H, pair.model, budget_bits):
        cand = apply_graph_flip(H, spec2)
        du = _safe_set_distance(cand, {u}, model_v)
        dv = _safe_set_distance(cand, {v}, model_u)
        if du > r and dv > r:
            return SeparationRun(
                FlipTrace((GraphFlipStep(frozenset(pair.model), spec2),)),
                cand,
                min(du, dv),
                r,
                True,
                (),
                ("iterative route degraded; single-flip scan succeeded",),
            )
    return SeparationRun(
        FlipTrace(steps),
        final,
        min(du, dv),
        r,
        False,
        inner.reports,
        ("counterexample candidate: no route achieved both distance conditions",),
    )


# ---------------------------------------------------------------------------
# Higher-arity separation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThreeSplit:
    """A relation's positions split into one distinguished position, a
    (possibly empty) outside group, and a nonempty parameter group."""

    relation: str
    arity: int
    x_position: int
    y_positions: tuple
    z_positions: tuple

    def __post_init__(self):
        object.__setattr__(self, "y_positions", tuple(sorted(self.y_positions)))
        object.__setattr__(self, "z_positions", tuple(sorted(self.z_positions)))
        groups = (self.x_position,) + self.y_positions + self.z_positions
        if sorted(groups) != list(range(self.arity)):
            raise DomainError("split groups must partition the relation's positions")
        if not self.z_positions:
            raise DomainError("the parameter group of a split must be nonempty")

    @property
    def own_positions(self) -> tuple:
        return tuple(sorted((self.x_position,) + self.y_positions))

    def atom(self) -> PartitionedAtom:
        return PartitionedAtom(self.relation, self.arity, self.own_positions, self.z_positions)


def _own_space(split: ThreeSplit, x_domain, y_domain):
    domains = [
        sorted(x_domain) if pos == split.x_position else sorted(y_domain)
        for pos in split.own_positions
    ]
    return [tuple(t) for t in itertools.product(*domains)]


@dataclass(frozen=True)
class TypesOfBallResult:
    count: int
    partition: TypePartition
    ball_members: frozenset


def types_of_ball_count(
    pair: ModelPair, split: ThreeSplit, a: int, r: int
) -> TypesOfBallResult:
    """How many types over model-tuples are realized by tuples drawing
    their distinguished coordinate from B_r(a) and the rest from outside
    the model."""
    H = pair.structure
    members = ball(H, a, r).members
    touching = members & pair.model
    if touching:
        raise DomainError(
            f"ball of radius {r} around {a} intersects the model at {sorted(touching)}"
        )
    space = _own_space(split, members, pair.outside())
    part = alpha_type_partition(H, split.atom(), pair.model, side="x", restrict_to=space)
    return TypesOfBallResult(len(part.classes), part, frozenset(members))


def _synthesize_connection_definition(
    structure: FiniteStructure,
    model: frozenset,
    split: ThreeSplit,
    rep: tuple,
    max_parameters: int,
):
    """Smallest parameter set whose parameter-side type classes are, on
    their model part, homogeneous towards the rep's connection set; returns
    (formula over the parameter-group variables, parameter set)."""
    atom = split.atom()
    pool = sorted(model)
    z_len = len(split.z_positions)
    target = {
        mz
        for mz in itertools.product(pool, repeat=z_len)
        if atom.holds(structure, rep, mz)
    }
    for size in range(min(max_parameters, len(pool)) + 1):
        for params in itertools.combinations(pool, size):
            part = alpha_type_partition(structure, atom, params, side="y")
            chosen = []
            ok = True
            for cls in part.classes:
                g_members = [m for m in cls.members if all(c in model for c in m)]
                if not g_members:
                    continue
                inside = [m in target for m in g_members]
                if any(inside) and not all(inside):
                    ok = False
                    break
                if all(inside):
                    chosen.append(part.class_formula(cls.class_id))
            if not ok:
                continue
            formula = disj(chosen) if chosen else FALSE
            for mz in itertools.product(pool, repeat=z_len):
                if eval_qf(structure, formula, mz) != (mz in target):
                    raise DomainError(
                        "synthesized connection definition disagrees on the model"
                    )
            return formula, frozenset(params)
    if max_parameters < len(model):
        raise BudgetExceeded(
            f"no homogeneous parameter set of size <= {max_parameters} for tuple {rep}",
            budget=max_parameters,
        )
    raise DomainError(
        f"no parameter set over the model defines the connection set of {rep}"
    )


@dataclass(frozen=True)
class OneSeparationResult:
    step: SyntacticFlipStep
    report: SeparationReport
    flipped: FiniteStructure


def _mixed_tuple_exists(structure, split: ThreeSplit, U, outside, model) -> bool:
    """Is some relation tuple assembled from U x outside^y x model^z present?"""
    atom = split.atom()
    for own in _own_space(split, U, outside):
        for mz in itertools.product(sorted(model), repeat=len(split.z_positions)):
            if atom.holds(structure, own, mz):
                return True
    return False


def one_separation(
    pair: ModelPair,
    split: ThreeSplit,
    U,
    step_index: int = 0,
    max_parameters: int = DEFAULT_PARAMETER_CAP,
) -> OneSeparationResult:
    """One syntactic flip step after which no tuple of the split's relation
    combines an element of U and outside elements with model parameters."""
    H = pair.structure
    if split.relation not in H.relations:
        raise DomainError(f"unknown relation {split.relation!r}")
    if H.relations[split.relation].arity != split.arity:
        raise DomainError(f"arity mismatch for relation {split.relation!r}")
    U = sorted(set(U))
    for x in U:
        if x in pair.model:
            raise DomainError(f"element {x} of U lies in the model")
    atom = split.atom()
    outside = pair.outside()
    model_sorted = sorted(pair.model)
    z_len = len(split.z_positions)
    m_tuples = [tuple(t) for t in itertools.product(model_sorted, repeat=z_len)]

    space = _own_space(split, U, outside)
    catalog = alpha_type_partition(H, atom, pair.model, side="x", restrict_to=space)
    reps = [cls.members[0] for cls in catalog.classes]
    descs = [cls.descriptor for cls in catalog.classes]

    S = set()
    notes = []
    for i, j in itertools.combinations(range(len(reps)), 2):
        idx = next(k for k in range(len(m_tuples)) if descs[i][k] != descs[j][k])
        S.update(m_tuples[idx])
    for i in range(len(reps)):
        if "1" in descs[i]:
            S.update(m_tuples[descs[i].index("1")])
    for rep in reps:
        _, params = _synthesize_connection_definition(
            H, pair.model, split, rep, max_parameters
        )
        S |= params
    S = frozenset(S)

    x_part = alpha_type_partition(H, atom, S, side="x")
    y_part = alpha_type_partition(H, atom, S, side="y")
    y_model_parts = {
        cls.class_id: [m for m in cls.members if all(c in pair.model for c in m)]
        for cls in y_part.classes
    }
    flipped_pairs = set()
    for rep in reps:
        a_id = x_part.class_of(rep)
        for cls in y_part.classes:
            g_members = y_model_parts[cls.class_id]
            if g_members and all(atom.holds(H, rep, m) for m in g_members):
                flipped_pairs.add((a_id, cls.class_id))

    step = make_syntactic_step(H, atom, S, frozenset(flipped_pairs), step_index)
    flipped = apply_syntactic_flip(H, step)

    saturated = pair.saturated_for(S)
    clauses = []

    bad = [
        (own, mz)
        for own in space
        for mz in m_tuples
        if atom.holds(flipped, own, mz)
    ]
    clauses.append(
        ClauseReport(
            "no_mixed_tuples",
            _status(not bad, not saturated),
            f"surviving mixed tuples: {bad[:5]}" if bad else "",
        )
    )

    empty_outside_tuple = None
    for own in itertools.product(range(H.universe_size), repeat=len(split.own_positions)):
        if all(c in pair.model for c in own):
            continue
        if not any(atom.holds(H, own, mz) for mz in m_tuples):
            empty_outside_tuple = own
            break
    if empty_outside_tuple is None:
        gate_details = "no outside tuple with empty type over the model"
        clauses.append(ClauseReport("empty_own_class_not_flipped", "not-applicable", gate_details))
        clauses.append(ClauseReport("empty_parameter_class_not_flipped", "not-applicable", gate_details))
    else:
        empty_x = [
            cls.class_id for cls in x_part.classes if "1" not in cls.descriptor
        ]
        ok_x = not any(a in empty_x for a, _ in flipped_pairs)
        clauses.append(
            ClauseReport(
                "empty_own_class_not_flipped",
                _status(ok_x, not saturated),
                "" if ok_x else "the empty-type class appears on the flipped side",
            )
        )
        empty_y = [
            cls.class_id for cls in y_part.classes if "1" not in cls.descriptor
        ]
        ok_y = not any(b in empty_y for _, b in flipped_pairs)
        ca = complete_tuple_warnings(pair)
        clauses.append(
            ClauseReport(
                "empty_parameter_class_not_flipped",
                _status(ok_y, not saturated or bool(ca)),
                "" if ok_y else "the empty-type parameter class is flipped",
            )
        )

    k = len(split.y_positions)
    positions = range(split.arity)
    hypothesis_holds = True
    for x_pos in positions:
        rest = [p for p in positions if p != x_pos]
        for y_sub in itertools.chain.from_iterable(
            itertools.combinations(rest, m) for m in range(k)
        ):
            z_sub = tuple(p for p in rest if p not in y_sub)
            sub = ThreeSplit(split.relation, split.arity, x_pos, y_sub, z_sub)
            if _mixed_tuple_exists(H, sub, U, outside, pair.model):
                hypothesis_holds = False
                break
        if not hypothesis_holds:
            break
    if not hypothesis_holds:
        clauses.append(
            ClauseReport(
                "smaller_splits_preserved",
                "not-applicable",
                "a smaller split already has a mixed tuple",
            )
        )
    else:
        bad_splits = []
        for x_pos in positions:
            rest = [p for p in positions if p != x_pos]
            for y_sub in itertools.chain.from_iterable(
                itertools.combinations(rest, m) for m in range(k + 1)
            ):
                z_sub = tuple(p for p in rest if p not in y_sub)
                if not z_sub:
                    continue
                sub = ThreeSplit(split.relation, split.arity, x_pos, y_sub, z_sub)
                if not _mixed_tuple_exists(H, sub, U, outside, pair.model) and _mixed_tuple_exists(
                    flipped, sub, U, outside, pair.model
                ):
                    bad_splits.append((x_pos, y_sub))
        clauses.append(
            ClauseReport(
                "smaller_splits_preserved",
                _status(not bad_splits, not saturated),
                f"splits gaining mixed tuples: {bad_splits}" if bad_splits else "",
            )
        )

    report = SeparationReport(saturated, S, tuple(clauses), tuple(notes))
    return OneSeparationResult(step, report, flipped)


def separate_element(
    pair: ModelPair, a: int, r: int, max_parameters: int = DEFAULT_PARAMETER_CAP
) -> SeparationRun:
    """Push a to Gaifman distance > r from the model by cleaning, radius
    stage by radius stage, every relation tuple that mixes the current ball
    with the model; marker relations introduced along the way are enqueued
    and cleaned too."""
    if a in pair.model:
        raise DomainError(f"element {a} lies in the model")
    if r < 0:
        raise DomainError("radius must be >= 0")
    current = pair.structure
    steps = []
    reports = []
    notes = list(complete_tuple_warnings(pair))

    achieved = _safe_set_distance(current, {a}, pair.model)
    if achieved > r:
        return SeparationRun(FlipTrace(()), current, achieved, r, True, (), tuple(notes))

    for stage in range(r):
        stage_ball = ball(current, a, stage).members
        if stage_ball & pair.model:
            notes.append(
                f"stage {stage} ball already touches the model; partial trace returned"
            )
            achieved = _safe_set_distance(current, {a}, pair.model)
            return SeparationRun(
                FlipTrace(tuple(steps)), current, achieved, r, False,
                tuple(reports), tuple(notes),
            )
        worklist = [
            (-rel.arity, name)
            for name, rel in current.relations.items()
            if rel.arity >= 2
        ]
        heapq.heapify(worklist)
        while worklist:
            _, name = heapq.heappop(worklist)
            arity = current.relations[name].arity
            positions = range(arity)
            for k in range(arity - 1):
                for x_pos in positions:
                    rest = [p for p in positions if p != x_pos]
                    for y_sub in itertools.combinations(rest, k):
                        z_sub = tuple(p for p in rest if p not in y_sub)
                        U = ball(current, a, stage).members
                        if U & pair.model:
                            notes.append(
                                f"stage {stage} ball grew into the model mid-stage"
                            )
                            achieved = _safe_set_distance(current, {a}, pair.model)
                            return SeparationRun(
                                FlipTrace(tuple(steps)), current, achieved, r, False,
                                tuple(reports), tuple(notes),
                            )
                        split = ThreeSplit(name, arity, x_pos, y_sub, z_sub)
                        result = one_separation(
                            ModelPair(current, pair.model),
                            split,
                            U,
                            step_index=len(steps),
                            max_parameters=max_parameters,
                        )
                        if not result.step.flipped_pairs:
                            continue
                        before = set(current.relations)
                        steps.append(result.step)
                        reports.append(result.report)
                        current = result.flipped
                        if ball(current, a, stage).members != U:
                            notes.append(
                                f"step {len(steps) - 1} changed the radius-{stage} ball"
                            )
                        for new_name in sorted(set(current.relations) - before):
                            if current.relations[new_name].arity >= 2:
                                heapq.heappush(
                                    worklist,
                                    (-current.relations[new_name].arity, new_name),
                                )

    achieved = _safe_set_distance(current, {a}, pair.model)
    success = achieved > r
    if not success:
        notes.append(
            f"counterexample candidate: final distance {achieved} does not exceed {r}"
        )
    return SeparationRun(
        FlipTrace(tuple(steps)), current, achieved, r, success, tuple(reports), tuple(notes)
    )

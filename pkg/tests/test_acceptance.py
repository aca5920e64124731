"""Acceptance gate: one test per release criterion, one pass/fail line each.

Every expected value is either checked against a brute-force oracle written
inside this file (sharing no code with the library), against fixed hand-sized
fixtures frozen after manual verification, or is an algebraic identity checked
exactly.  Time budgets are asserted where the criterion states one.
"""

import itertools
import math
import random
import time

from flipcalc.core import (
    FiniteStructure,
    PartitionedAtom,
    Relation,
    alpha_type_partition,
    eval_qf,
    gaifman,
    set_distance,
)
from flipcalc.discrepancy import (
    discrepancy_graph,
    radius1_equivalence_check,
    s_avoiding_components,
)
from flipcalc.errors import BudgetExceeded
from flipcalc.flatness_sparsity import (
    biclique,
    biclique_subgraph,
    bipartite_pattern,
    clique,
    edge_atom,
    flip_flatness_search,
    half_graph,
    ladder_index,
    path,
    star,
    subdivided_clique_search,
)
from flipcalc.flips import (
    apply_graph_flip,
    apply_syntactic_flip,
    compose_flips,
    definability_witness,
    enumerate_s_definable_flips,
    invert_syntactic_flip,
    make_syntactic_step,
)
from flipcalc.game import game_value, srk
from flipcalc.independence import flip_dist
from flipcalc.separation import (
    ModelPair,
    ThreeSplit,
    build_separating_flip,
    one_separation,
)


def cycle(n):
    return FiniteStructure.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def edgeless(n):
    return FiniteStructure.from_edges(n, [])


def random_graph(rng, n, p=0.5):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return FiniteStructure.from_edges(n, edges)


# --------------------------------------------------------------- criterion 1


def test_c01_enumerated_flips_are_involutions_and_compose():
    rng = random.Random(101)
    start = time.perf_counter()
    for _ in range(200):
        n = rng.randint(1, 10)
        g = random_graph(rng, n)
        S = tuple(rng.sample(range(n), rng.randint(0, min(2, n))))
        flips = list(itertools.islice(enumerate_s_definable_flips(g, S), 64))
        assert flips[0].is_identity
        for spec in flips:
            assert apply_graph_flip(apply_graph_flip(g, spec), spec) == g
        for a, b in itertools.product(flips[:4], flips[:4]):
            assert apply_graph_flip(g, compose_flips(a, b)) == apply_graph_flip(
                apply_graph_flip(g, a), b
            )
    assert time.perf_counter() - start < 10.0


# --------------------------------------------------------------- criterion 2


def _draw_within_budget(rng, structure, max_s):
    """A parameter set whose flip family fits the bit budget, shrinking the
    drawn set when the partition is too fine."""
    n = structure.universe_size
    S = tuple(rng.sample(range(n), rng.randint(0, min(max_s, n))))
    while True:
        try:
            flip_dist(structure, S, 0, 0, budget_bits=12)
            return S
        except BudgetExceeded:
            if not S:
                raise
            S = S[:-1]


def _assert_metric(structure, S):
    n = structure.universe_size
    d = [
        [flip_dist(structure, S, u, v, budget_bits=12) for v in range(n)]
        for u in range(n)
    ]
    for u in range(n):
        # parameters can always be flipped into isolation, so their rows
        # are uniformly infinite; everyone else is at distance 0 from
        # themselves
        assert d[u][u] == (math.inf if u in S else 0)
        for v in range(n):
            assert d[u][v] == d[v][u]
    for u, v, w in itertools.product(range(n), repeat=3):
        assert d[u][w] <= d[u][v] + d[v][w]


def test_c02_flip_distance_is_a_metric():
    rng = random.Random(202)
    start = time.perf_counter()
    for _ in range(100):
        n = rng.randint(2, 8)
        g = random_graph(rng, n)
        _assert_metric(g, _draw_within_budget(rng, g, 2))
    for _ in range(30):
        n = rng.randint(3, 6)
        tuples = {
            t for t in itertools.product(range(n), repeat=3) if rng.random() < 0.3
        }
        s = FiniteStructure(n, [Relation("R", 3, frozenset(tuples))])
        _assert_metric(s, _draw_within_budget(rng, s, 1))
    assert time.perf_counter() - start < 60.0


# --------------------------------------------------------------- criterion 3


def test_c03_syntactic_flips_invert_and_are_definable():
    rng = random.Random(303)
    start = time.perf_counter()
    for _ in range(100):
        n = rng.randint(2, 5)
        arity = rng.choice([2, 3])
        tuples = {
            t for t in itertools.product(range(n), repeat=arity) if rng.random() < 0.3
        }
        s = FiniteStructure(n, [Relation("R", arity, frozenset(tuples))])
        xs = tuple(sorted(rng.sample(range(arity), rng.randint(1, arity - 1))))
        ys = tuple(p for p in range(arity) if p not in xs)
        atom = PartitionedAtom("R", arity, xs, ys)
        S = set(rng.sample(range(n), rng.randint(0, min(2, n))))
        xp = alpha_type_partition(s, atom, S)
        yp = alpha_type_partition(s, atom, S, side="y")
        pairs = [(a, b) for a in range(len(xp.classes)) for b in range(len(yp.classes))]
        step = make_syntactic_step(
            s, atom, S, {p for p in pairs if rng.random() < 0.5}
        )
        flipped = apply_syntactic_flip(s, step)
        assert invert_syntactic_flip(flipped, step) == s
        forward, backward = definability_witness(step, s)
        for t in itertools.product(range(n), repeat=arity):
            assert eval_qf(s, forward, t) == flipped.has("R", t)
            assert eval_qf(flipped, backward, t) == s.has("R", t)
    assert time.perf_counter() - start < 30.0


# --------------------------------------------------------------- criterion 4

# (structure, model, U) configurations; the half-connected bipartite pattern
# is deliberately not in this battery: its classes are never homogeneous
# towards each other, the construction's report says "violated" there, and
# tests/test_separation.py pins that behaviour down separately.
SEPARATION_CONFIGS = (
    [(clique(n), frozenset(range(n - 1)), frozenset({n - 1})) for n in (3, 4, 5, 6)]
    + [
        (clique(n), frozenset(range(n - 2)), frozenset({n - 2, n - 1}))
        for n in (4, 5, 6)
    ]
    + [(star(n), frozenset({0, 1}), frozenset({n})) for n in (3, 4, 5)]
    + [(star(n), frozenset({0, 1}), frozenset(range(2, n + 1))) for n in (3, 4, 5)]
    + [(edgeless(n + 2), frozenset({0, 1}), frozenset({n})) for n in (2, 3, 4)]
    + [(path(n), frozenset({0, 1}), frozenset({n - 1})) for n in (4, 5, 6)]
    + [
        (cycle(4), frozenset({0, 1}), frozenset({2, 3})),
        (cycle(5), frozenset({0, 1}), frozenset({3})),
        (cycle(6), frozenset({0, 1, 2}), frozenset({4, 5})),
        (biclique(2, 3), frozenset({0, 2, 3}), frozenset({1, 4})),
    ]
)


def test_c04_separating_flip_isolates_u_from_the_model():
    saturated = 0
    for structure, model, U in SEPARATION_CONFIGS:
        run = build_separating_flip(ModelPair(structure, model), U)
        if not run.report.saturated:
            continue
        saturated += 1
        # conclusion (1), re-derived by breadth-first search, not read off
        # the report
        assert set_distance(run.flipped, U, model) > 1
        statuses = {c.name: c.status for c in run.report.clauses}
        assert statuses["model_separation"] == "verified"
        for name in (
            "far_from_parameters_unchanged",
            "distance_to_set_preserved",
            "distance_to_model_preserved",
        ):
            assert statuses[name] in ("verified", "not-applicable")
    assert saturated >= 20


# --------------------------------------------------------------- criterion 5

# Relational fixtures (arity <= 3, n <= 6).  Models mirror the outside
# connection patterns so that parameterized definitions exist.
ONE_SEPARATION_FIXTURES = [
    (
        FiniteStructure(
            6,
            [
                Relation(
                    "R",
                    3,
                    [(3, 4, 0), (3, 4, 1), (3, 5, 0), (1, 1, 0), (2, 2, 0), (2, 2, 1)],
                )
            ],
        ),
        frozenset({0, 1, 2}),
        ThreeSplit("R", 3, 0, (1,), (2,)),
        {3},
    ),
    (
        FiniteStructure(
            6,
            [
                Relation(
                    "R",
                    3,
                    [(3, 4, 0), (3, 4, 1), (3, 5, 0), (1, 1, 0), (2, 2, 0), (2, 2, 1)],
                )
            ],
        ),
        frozenset({0, 1, 2}),
        ThreeSplit("R", 3, 0, (1,), (2,)),
        {3, 4},
    ),
    (
        FiniteStructure(
            6,
            [
                Relation(
                    "R",
                    3,
                    [(3, 0, 1), (4, 0, 1), (3, 0, 2), (2, 0, 1), (2, 0, 2), (1, 0, 1)],
                )
            ],
        ),
        frozenset({0, 1, 2}),
        ThreeSplit("R", 3, 0, (), (1, 2)),
        {3, 4},
    ),
    (
        clique(4),
        frozenset({0, 1, 2}),
        ThreeSplit("E", 2, 0, (), (1,)),
        {3},
    ),
    (
        FiniteStructure.from_edges(6, [(0, i) for i in range(1, 6)]),
        frozenset({0, 1, 2}),
        ThreeSplit("E", 2, 0, (), (1,)),
        {4, 5},
    ),
    (
        FiniteStructure.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (3, 5)]),
        frozenset({0, 1, 2, 3, 5}),
        ThreeSplit("E", 2, 0, (), (1,)),
        {4},
    ),
    (
        FiniteStructure(
            5, [Relation("T", 2, [(3, 0), (3, 1), (4, 0), (2, 0), (2, 1), (1, 0)])]
        ),
        frozenset({0, 1, 2}),
        ThreeSplit("T", 2, 0, (), (1,)),
        {3, 4},
    ),
    (
        FiniteStructure(
            5, [Relation("T", 2, [(0, 3), (1, 3), (0, 4), (0, 2), (1, 2), (0, 1)])]
        ),
        frozenset({0, 1, 2}),
        ThreeSplit("T", 2, 1, (), (0,)),
        {3, 4},
    ),
    (
        FiniteStructure(
            6,
            [
                Relation(
                    "R",
                    3,
                    [(4, 5, 0), (4, 5, 1), (5, 4, 0), (1, 2, 0), (1, 2, 1), (2, 1, 0)],
                )
            ],
        ),
        frozenset({0, 1, 2, 3}),
        ThreeSplit("R", 3, 0, (1,), (2,)),
        {4, 5},
    ),
    (
        FiniteStructure(6, [Relation("R", 3, [(0, 1, 2)])]),
        frozenset({0, 1, 2}),
        ThreeSplit("R", 3, 0, (1,), (2,)),
        {5},
    ),
    (
        FiniteStructure(
            6,
            [
                Relation(
                    "R",
                    3,
                    [(3, 3, 0), (4, 4, 0), (4, 4, 1), (1, 1, 0), (2, 2, 0), (2, 2, 1)],
                )
            ],
        ),
        frozenset({0, 1, 2}),
        ThreeSplit("R", 3, 0, (1,), (2,)),
        {3, 4},
    ),
    (
        FiniteStructure(
            6,
            [
                Relation("E", 2, [(0, 1), (1, 0), (3, 4), (4, 3)]),
                Relation("R", 3, [(3, 4, 0), (1, 2, 0)]),
            ],
        ),
        frozenset({0, 1, 2}),
        ThreeSplit("R", 3, 0, (1,), (2,)),
        {3},
    ),
]


def test_c05_one_separation_clears_mixed_tuples():
    start = time.perf_counter()
    passed = 0
    for structure, model, split, U in ONE_SEPARATION_FIXTURES:
        result = one_separation(ModelPair(structure, model), split, U)
        outside = set(range(structure.universe_size)) - model
        # exhaustive scan of the flipped relation, independent of the report
        for t in result.flipped.relations[split.relation].tuples:
            assert not (
                t[split.x_position] in U
                and all(t[p] in outside for p in split.y_positions)
                and all(t[p] in model for p in split.z_positions)
            )
        for clause in result.report.clauses:
            assert clause.status != "violated"
        for name in ("empty_own_class_not_flipped", "empty_parameter_class_not_flipped"):
            assert result.report.clause(name).status in ("verified", "not-applicable")
        passed += 1
    assert passed >= 10
    assert time.perf_counter() - start < 60.0


# --------------------------------------------------------------- criterion 6


def test_c06_enumerative_discrepancy_strips_model_incident_edges():
    rng = random.Random(606)
    for _ in range(100):
        n = rng.randint(2, 12)
        g = random_graph(rng, n, 0.4)
        model = frozenset(rng.sample(range(n), rng.randint(0, n - 1)))
        report = discrepancy_graph(ModelPair(g, model), "enumerative")
        expected = {
            frozenset(e) for e in g.edge_set() if not set(e) & model
        }
        assert {frozenset(e) for e in report.discrepancy_edges} == expected
        avoiding = s_avoiding_components(g, model)
        outside_components = {c for c in report.components if not c & model}
        assert outside_components == set(avoiding.components)
        for x in model:
            assert frozenset({x}) in report.components


# --------------------------------------------------------------- criterion 7

RADIUS1_FAMILY = [
    (clique(4), {0, 1}),
    (clique(5), {0, 1, 2}),
    (clique(6), {0, 1}),
    (edgeless(4), {0, 1}),
    (edgeless(5), {0}),
    (edgeless(5), {0, 1}),
    (edgeless(6), {0, 1}),
    (path(4), {0}),
    (path(4), {0, 1}),
    (path(5), {2}),
    (path(6), {0, 1, 2}),
    (path(6), {0, 1, 2, 3}),
    (star(3), {0, 1}),
    (star(4), {0, 1, 2}),
    (cycle(4), {0, 1}),
    (cycle(5), {0, 1}),
    (cycle(6), {0, 1, 2}),
    (cycle(6), {0, 1, 2, 3}),
    (biclique(2, 4), {0, 1, 2, 3}),
    (FiniteStructure.from_edges(4, [(0, 2), (0, 3)]), {0, 1}),
]


def test_c07_radius1_readings_agree_on_saturated_pairs():
    saturated_fixtures = 0
    divergence_log = []
    for structure, model in RADIUS1_FAMILY:
        pair = ModelPair(structure, frozenset(model))
        saturated = all(pair.saturation_report(1).values())
        saturated_fixtures += saturated
        outside = sorted(pair.outside())
        for i, u in enumerate(outside):
            for v in outside[i + 1 :]:
                report = radius1_equivalence_check(
                    pair, u, v, "class_based", budget_bits=16
                )
                if saturated:
                    assert report.agree, (sorted(model), u, v)
                elif not report.agree:
                    divergence_log.append(
                        (sorted(structure.edge_set()), sorted(model), u, v)
                    )
    assert saturated_fixtures >= 10
    # the documented divergence path is actually exercised, and every
    # logged case sits on an unsaturated fixture by construction
    assert divergence_log
    for entry in divergence_log:
        print("radius-1 divergence on unsaturated fixture:", entry)


# --------------------------------------------------------------- criterion 8


def _oracle_srk(graph, r):
    """The rank recursion evaluated from scratch: own class partition, own
    flip enumeration, own breadth-first search.  Shares nothing with the
    library solver."""
    n = graph.universe_size
    adj = [[False] * n for _ in range(n)]
    for u, v in graph.edge_set():
        adj[u][v] = adj[v][u] = True
    ball_cache = {}

    def ball(T, v):
        key = (T, v)
        if key in ball_cache:
            return ball_cache[key]
        groups = {}
        for x in range(n):
            sig = (x if x in T else None, tuple(adj[x][t] for t in T))
            groups.setdefault(sig, []).append(x)
        index = {}
        for i, members in enumerate(groups.values()):
            for x in members:
                index[x] = i
        class_pairs = [
            (i, j) for i in range(len(groups)) for j in range(i, len(groups))
        ]
        dependent = set(range(n))
        for mask in range(2 ** len(class_pairs)):
            chosen = {
                class_pairs[k] for k in range(len(class_pairs)) if mask >> k & 1
            }
            reached = {v}
            frontier = [v]
            for _ in range(r):
                grown = []
                for a in frontier:
                    for b in range(n):
                        if b == a or b in reached:
                            continue
                        i, j = sorted((index[a], index[b]))
                        if adj[a][b] != ((i, j) in chosen):
                            reached.add(b)
                            grown.append(b)
                frontier = grown
            dependent &= reached
            if dependent == {v}:
                break
        ball_cache[key] = frozenset(dependent)
        return ball_cache[key]

    memo, active = {}, set()

    def rank(U, S):
        if U <= S:
            return 0
        key = (U, S)
        if key in memo:
            return memo[key]
        if key in active:
            return math.inf
        active.add(key)
        best = math.inf
        for s in range(n):
            Ss = S | {s}
            T = tuple(sorted(Ss))
            worst = 0
            for v in sorted(U):
                worst = max(worst, rank(U & ball(T, v), Ss))
                if worst >= best:
                    break
            best = min(best, worst)
        active.discard(key)
        memo[key] = 1 + best
        return memo[key]

    return rank(frozenset(range(n)), frozenset())


GAME_FIXTURES = [
    ("K1", clique(1)),
    ("K2", clique(2)),
    ("K3", clique(3)),
    ("K4", clique(4)),
    ("K5", clique(5)),
    ("K6", clique(6)),
    ("E2", edgeless(2)),
    ("E3", edgeless(3)),
    ("E6", edgeless(6)),
    ("P3", path(3)),
    ("P4", path(4)),
    ("P5", path(5)),
    ("P6", path(6)),
    ("C4", cycle(4)),
    ("C5", cycle(5)),
    ("C6", cycle(6)),
    ("star3", star(3)),
    ("star4", star(4)),
    ("star5", star(5)),
]


def test_c08_game_value_tracks_separation_rank():
    start = time.perf_counter()
    # anchor values, reproduced by the from-scratch recursion
    for r in (0, 1, 2):
        assert _oracle_srk(clique(1), r) == 1
        assert _oracle_srk(clique(2), r) == 2
    for name, g in [
        ("K1", clique(1)),
        ("K2", clique(2)),
        ("K3", clique(3)),
        ("E2", edgeless(2)),
        ("E3", edgeless(3)),
        ("P3", path(3)),
        ("star3", star(3)),
    ]:
        for r in (0, 1, 2):
            rank = srk(g, r)
            assert rank.exact
            assert _oracle_srk(g, r) == rank.value, (name, r)

    # a single fixed offset between minimax game value and the rank
    # recursion, across every fixture with n <= 6, r <= 2
    rows = []
    for name, g in GAME_FIXTURES:
        for r in (0, 1, 2):
            value = game_value(g, r)
            rank = srk(g, r)
            assert rank.exact
            rows.append((name, r, value, rank.value, value - rank.value))
    assert time.perf_counter() - start < 120.0
    offsets = {row[4] for row in rows}
    table = "\n".join(
        f"  {name:5s} r={r}: game={value} rank={rank} offset={offset:+d}"
        for name, r, value, rank, offset in rows
    )
    assert len(offsets) == 1, (
        "no single off-by-one convention relates the minimax game value to "
        f"the rank recursion; observed offsets {sorted(offsets)}:\n{table}"
    )


# --------------------------------------------------------------- criterion 9


def _pairwise_beyond(structure, points, r):
    """Every two of the points are at Gaifman distance > r (own BFS)."""
    edges = gaifman(structure).edge_set()
    neighbours = {}
    for u, v in edges:
        neighbours.setdefault(u, set()).add(v)
        neighbours.setdefault(v, set()).add(u)
    points = sorted(points)
    for source in points:
        reached = {source}
        frontier = [source]
        for _ in range(r):
            grown = []
            for a in frontier:
                for b in neighbours.get(a, ()):
                    if b not in reached:
                        reached.add(b)
                        grown.append(b)
            frontier = grown
        if any(other in reached for other in points if other != source):
            return False
    return True


def test_c09_stars_flatten_completely():
    for n in range(4, 11):
        leaves = frozenset(range(1, n + 1))
        for r in (1, 2, 3):
            cert = flip_flatness_search(star(n), leaves, r, 1)
            assert len(cert.Y) == n
            assert set(cert.Y) <= set(leaves)
            assert cert.exact and not cert.partial
            assert len(cert.S) <= 1
            flipped = cert.trace.replay(star(n))
            assert _pairwise_beyond(flipped, cert.Y, r)


# -------------------------------------------------------------- criterion 10


def _brute_biclique(structure, t):
    n = structure.universe_size
    adjacent = {frozenset(e) for e in structure.edge_set()}
    for left in itertools.combinations(range(n), t):
        rest = [v for v in range(n) if v not in left]
        for right in itertools.combinations(rest, t):
            if all(
                frozenset({a, b}) in adjacent for a in left for b in right
            ):
                return True
    return False


def _brute_subdivision(structure, t, r):
    n = structure.universe_size
    adjacent = {frozenset(e) for e in structure.edge_set()}

    def linked(a, b):
        return frozenset({a, b}) in adjacent

    if t == 3 and r == 2:
        return any(
            linked(a, b) and linked(a, c) and linked(b, c)
            for a, b, c in itertools.combinations(range(n), 3)
        )
    if t == 3 and r == 3:
        for principals in itertools.combinations(range(n), 3):
            rest = [v for v in range(n) if v not in principals]
            a, b, c = principals
            for mids in itertools.permutations(rest, 3):
                if (
                    linked(a, mids[0])
                    and linked(mids[0], b)
                    and linked(a, mids[1])
                    and linked(mids[1], c)
                    and linked(b, mids[2])
                    and linked(mids[2], c)
                ):
                    return True
        return False
    if t == 2 and r == 4:
        return any(
            linked(p, x) and linked(x, y) and linked(y, q)
            for p, x, y, q in itertools.permutations(range(n), 4)
        )
    raise NotImplementedError


def _order_holds(pattern, i, j):
    if pattern == "=":
        return i == j
    if pattern == "!=":
        return i != j
    if pattern == "<=":
        return i <= j
    return i >= j


def _brute_pattern(structure, a_part, b_part, pattern, n_max):
    adjacent = {frozenset(e) for e in structure.edge_set()}
    best = 0
    for n in range(n_max, 0, -1):
        for a_seq in itertools.permutations(sorted(a_part), n):
            for b_seq in itertools.permutations(sorted(b_part), n):
                if all(
                    (frozenset({a_seq[i], b_seq[j]}) in adjacent)
                    == _order_holds(pattern, i, j)
                    for i in range(n)
                    for j in range(n)
                ):
                    best = n
                    break
            if best:
                break
        if best:
            break
    return best


def _brute_ladder(structure, n_max):
    return _brute_pattern(
        structure, range(structure.universe_size), range(structure.universe_size),
        "<=", n_max,
    )


def _check_witness(structure, pattern, a_seq, b_seq):
    adjacent = {frozenset(e) for e in structure.edge_set()}
    return all(
        (frozenset({a_seq[i], b_seq[j]}) in adjacent) == _order_holds(pattern, i, j)
        for i in range(len(a_seq))
        for j in range(len(b_seq))
    )


def test_c10_sparsity_searches_match_brute_force():
    rng = random.Random(1010)
    start = time.perf_counter()
    graphs = [random_graph(rng, rng.randint(2, 10), rng.choice([0.3, 0.6]))
              for _ in range(40)]
    graphs += [clique(6), biclique(3, 3), star(5), path(7), half_graph(3), cycle(6)]

    for g in graphs:
        for t in (1, 2, 3):
            witness = biclique_subgraph(g, t)
            assert (witness is not None) == _brute_biclique(g, t)
            if witness is not None:
                assert len(witness.left) == len(witness.right) == t
                assert not set(witness.left) & set(witness.right)
                edges = {frozenset(e) for e in g.edge_set()}
                assert all(
                    frozenset({a, b}) in edges
                    for a in witness.left
                    for b in witness.right
                )
        for t, r in ((3, 2), (3, 3), (2, 4)):
            found = subdivided_clique_search(g, t, r)
            assert (found is not None) == _brute_subdivision(g, t, r), (t, r)

    small = [g for g in graphs if g.universe_size <= 8][:25]
    for g in small:
        cert = ladder_index(g, edge_atom(g), 3)
        assert cert.exact
        assert cert.n == _brute_ladder(g, 3)
        n = g.universe_size
        sides = rng.sample(range(n), min(n, 8))
        a_part, b_part = sides[: len(sides) // 2], sides[len(sides) // 2 :]
        if a_part and b_part:
            report = bipartite_pattern(g, a_part, b_part, 3)
            for witness in report.witnesses:
                assert witness.n == _brute_pattern(
                    g, a_part, b_part, witness.pattern, 3
                )
                if witness.n:
                    assert _check_witness(
                        g, witness.pattern, witness.a_seq, witness.b_seq
                    )

    for n in range(1, 7):
        hg = half_graph(n)
        cert = ladder_index(hg, edge_atom(hg), n)
        assert cert.n >= n
        edges = {frozenset(e) for e in hg.edge_set()}
        assert all(
            (frozenset({cert.a_tuples[i][0], cert.b_tuples[j][0]}) in edges)
            == (i <= j)
            for i in range(cert.n)
            for j in range(cert.n)
        )
    assert time.perf_counter() - start < 120.0

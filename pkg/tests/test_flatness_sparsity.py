import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flipcalc.core import FiniteStructure, PartitionedAtom, Relation
from flipcalc.errors import BudgetExceeded, DomainError
from flipcalc.flips import FlipTrace, apply_graph_flip, enumerate_s_definable_flips
from flipcalc.flatness_sparsity import (
    BicliqueWitness,
    FlatnessCertificate,
    LadderCertificate,
    bipartite_pattern,
    biclique,
    biclique_subgraph,
    clique,
    edge_atom,
    flip_flatness_search,
    half_graph,
    ladder_index,
    path,
    star,
    subdivided_clique_search,
)

C4 = FiniteStructure.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
C6 = FiniteStructure.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)])


def rnd_graph(seed, n, p=0.4):
    rng = random.Random(seed)
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
    ]
    return FiniteStructure.from_edges(n, edges)


def adjacent(g, u, v):
    es = g.edge_set()
    return (min(u, v), max(u, v)) in es


graphs = st.integers(2, 7).flatmap(
    lambda n: st.builds(
        lambda es: FiniteStructure.from_edges(n, es),
        st.sets(
            st.sampled_from([(i, j) for i in range(n) for j in range(i + 1, n)]),
            max_size=n * (n - 1) // 2,
        ),
    )
)


# -- generators ---------------------------------------------------------------


def test_half_graph_smallest_orders():
    assert half_graph(1).edge_set() == {(0, 1)}
    assert half_graph(2).edge_set() == {(0, 2), (0, 3), (1, 3)}


def test_half_graph_order_four_shape():
    hg = half_graph(4)
    assert len(hg.edge_set()) == 10
    for i in range(4):
        for j in range(4):
            assert adjacent(hg, i, 4 + j) == (i <= j)
    # no edges inside a side
    for u, v in itertools.combinations(range(4), 2):
        assert not adjacent(hg, u, v)
        assert not adjacent(hg, 4 + u, 4 + v)


def test_generator_shapes():
    assert star(4).edge_set() == {(0, 1), (0, 2), (0, 3), (0, 4)}
    assert path(5).edge_set() == {(0, 1), (1, 2), (2, 3), (3, 4)}
    assert len(clique(4).edge_set()) == 6
    assert biclique(2, 3).edge_set() == {
        (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)
    }


def test_generators_reject_empty_sizes():
    for bad in (lambda: half_graph(0), lambda: star(0), lambda: path(0),
                lambda: clique(0), lambda: biclique(0, 1)):
        with pytest.raises(DomainError):
            bad()


# -- flatness certificates ----------------------------------------------------


def test_certificate_rejects_close_pair():
    with pytest.raises(DomainError):
        FlatnessCertificate(
            structure=path(3), X=frozenset({0, 1}), r=1, k=0,
            S=frozenset(), trace=FlipTrace(()), Y=frozenset({0, 1}),
        )


def test_certificate_rejects_oversized_parameter_set():
    with pytest.raises(DomainError):
        FlatnessCertificate(
            structure=path(3), X=frozenset({0}), r=0, k=0,
            S=frozenset({1}), trace=FlipTrace(()), Y=frozenset({0}),
        )


def test_certificate_rejects_scattered_set_outside_input():
    with pytest.raises(DomainError):
        FlatnessCertificate(
            structure=path(5), X=frozenset({0, 1}), r=0, k=0,
            S=frozenset(), trace=FlipTrace(()), Y=frozenset({4}),
        )


def test_certificate_accepts_far_apart_pair():
    cert = FlatnessCertificate(
        structure=path(5), X=frozenset({0, 4}), r=3, k=0,
        S=frozenset(), trace=FlipTrace(()), Y=frozenset({0, 4}),
    )
    assert cert.flipped == path(5)


# -- flatness search ----------------------------------------------------------


def test_star_leaves_scatter_with_center_parameter():
    g = star(5)
    leaves = frozenset(range(1, 6))
    for r in (2, 3):
        cert = flip_flatness_search(g, leaves, r=r, k=1)
        assert cert.Y == leaves
        assert cert.S == frozenset({0})
        assert len(cert.trace) == 1
        assert cert.exact and not cert.partial


def test_star_leaves_already_scattered_at_radius_one():
    g = star(5)
    leaves = frozenset(range(1, 6))
    cert = flip_flatness_search(g, leaves, r=1, k=1)
    assert cert.Y == leaves
    assert cert.S == frozenset()
    assert len(cert.trace) == 0


def test_edgeless_input_needs_no_flip():
    g = FiniteStructure.from_edges(5, [])
    cert = flip_flatness_search(g, range(5), r=2, k=1)
    assert cert.Y == frozenset(range(5))
    assert cert.S == frozenset()
    assert len(cert.trace) == 0
    assert cert.exact


def test_clique_scatters_by_parameterless_complement():
    cert = flip_flatness_search(clique(5), range(5), r=1, k=0)
    assert cert.Y == frozenset(range(5))
    assert cert.S == frozenset()
    assert len(cert.trace) == 1
    assert cert.exact


@settings(max_examples=20, deadline=None)
@given(graphs, st.data())
def test_search_effort_is_monotone(g, data):
    n = g.universe_size
    X = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=5))
    r = data.draw(st.integers(0, 2))
    k = data.draw(st.integers(0, 1))
    low = flip_flatness_search(g, X, r=r, k=k, effort="greedy")
    high = flip_flatness_search(g, X, r=r, k=k, effort="exhaustive")
    assert len(low.Y) <= len(high.Y)


def _flatness_brute(g, X, r, k):
    """Best scattered size over the whole flip family, via shortest paths
    and subset enumeration."""
    n = g.universe_size
    xs = sorted(X)
    best = 0
    for size in range(k + 1):
        for S in itertools.combinations(range(n), size):
            for spec in enumerate_s_definable_flips(g, frozenset(S)):
                flipped = apply_graph_flip(g, spec)
                G = nx.Graph()
                G.add_nodes_from(range(n))
                G.add_edges_from(flipped.edge_set())
                near = dict(nx.all_pairs_shortest_path_length(G, cutoff=r))
                for t in range(len(xs), best, -1):
                    hit = False
                    for sub in itertools.combinations(xs, t):
                        if all(
                            v not in near[u]
                            for u, v in itertools.combinations(sub, 2)
                        ):
                            hit = True
                            break
                    if hit:
                        best = max(best, t)
                        break
    return best


def test_search_matches_exhaustive_enumeration():
    for seed in range(8):
        g = rnd_graph(seed, 5 + seed % 2)
        rng = random.Random(100 + seed)
        xs = rng.sample(range(g.universe_size), 4)
        r = 1 + seed % 2
        cert = flip_flatness_search(g, xs, r=r, k=1)
        assert len(cert.Y) == _flatness_brute(g, xs, r, 1)
        assert cert.exact


def test_zero_budget_falls_back_to_identity():
    g = star(4)
    cert = flip_flatness_search(g, range(1, 5), r=2, k=1, budget_bits=0)
    assert cert.partial
    assert cert.S == frozenset()
    assert len(cert.trace) == 0
    assert len(cert.Y) == 1


def test_tiny_budget_keeps_parameterless_flips():
    g = star(4)
    cert = flip_flatness_search(g, range(1, 5), r=2, k=1, budget_bits=1)
    assert cert.partial
    assert cert.S == frozenset()
    assert len(cert.Y) == 1


def test_search_validates_arguments():
    g = path(3)
    with pytest.raises(DomainError):
        flip_flatness_search(g, [0], r=1, k=1, effort="frantic")
    with pytest.raises(DomainError):
        flip_flatness_search(g, [0], r=-1, k=1)
    with pytest.raises(DomainError):
        flip_flatness_search(g, [7], r=1, k=1)


# -- bicliques ----------------------------------------------------------------


def test_four_cycle_is_a_biclique():
    assert biclique_subgraph(C4, 2) == BicliqueWitness(
        frozenset({0, 2}), frozenset({1, 3})
    )


def test_trees_have_no_biclique():
    assert biclique_subgraph(path(6), 2) is None
    assert biclique_subgraph(star(5), 2) is None


def test_complete_graph_contains_biclique():
    w = biclique_subgraph(clique(5), 2)
    assert w is not None
    assert len(w.left) == len(w.right) == 2
    assert not (w.left & w.right)
    for a in w.left:
        for b in w.right:
            assert adjacent(clique(5), a, b)


def test_biclique_generator_witnesses_itself():
    g = biclique(3, 3)
    assert biclique_subgraph(g, 3) is not None
    assert biclique_subgraph(g, 4) is None


def test_biclique_trivial_sizes():
    assert biclique_subgraph(path(2), 0) == BicliqueWitness(frozenset(), frozenset())
    with pytest.raises(DomainError):
        biclique_subgraph(path(2), -1)


def _biclique_brute(g, t):
    n = g.universe_size
    for A in itertools.combinations(range(n), t):
        rest = [v for v in range(n) if v not in A]
        for B in itertools.combinations(rest, t):
            if all(adjacent(g, a, b) for a in A for b in B):
                return True
    return False


def test_biclique_search_matches_brute_force():
    for seed in range(12):
        g = rnd_graph(seed, 6 + seed % 5, p=0.5)
        found = {}
        for t in (1, 2, 3):
            w = biclique_subgraph(g, t)
            found[t] = w is not None
            assert found[t] == _biclique_brute(g, t)
        # a missing K_{t,t} stays missing at larger t
        for t in (1, 2):
            if not found[t]:
                assert not found[t + 1]


# -- subdivided cliques -------------------------------------------------------


def test_six_cycle_is_a_subdivided_triangle():
    w = subdivided_clique_search(C6, 3, 3)
    assert w is not None
    assert w.principals == (0, 2, 4)
    assert w.paths == ((0, 1, 2), (0, 5, 4), (2, 3, 4))


def test_clique_is_its_own_trivial_subdivision():
    w = subdivided_clique_search(clique(4), 4, 2)
    assert w is not None
    assert w.principals == (0, 1, 2, 3)
    assert all(len(p) == 2 for p in w.paths)


def test_triangle_free_graph_has_no_trivial_triangle():
    assert subdivided_clique_search(C6, 3, 2) is None


def test_trees_have_no_subdivided_triangle():
    for r in (2, 3):
        assert subdivided_clique_search(path(7), 3, r) is None
        assert subdivided_clique_search(star(6), 3, r) is None


def test_subdivision_argument_validation():
    with pytest.raises(DomainError):
        subdivided_clique_search(C6, 0, 2)
    with pytest.raises(DomainError):
        subdivided_clique_search(C6, 3, 1)


def test_subdivision_budget():
    with pytest.raises(BudgetExceeded):
        subdivided_clique_search(C6, 3, 3, budget_nodes=2)


def _subdivided_triangle_brute(g):
    n = g.universe_size
    for p, q, s in itertools.combinations(range(n), 3):
        others = [v for v in range(n) if v not in (p, q, s)]
        for x, y, z in itertools.permutations(others, 3):
            if (
                adjacent(g, p, x) and adjacent(g, x, q)
                and adjacent(g, p, y) and adjacent(g, y, s)
                and adjacent(g, q, z) and adjacent(g, z, s)
            ):
                return True
    return False


def _triangle_brute(g):
    n = g.universe_size
    return any(
        adjacent(g, a, b) and adjacent(g, b, c) and adjacent(g, a, c)
        for a, b, c in itertools.combinations(range(n), 3)
    )


def test_subdivision_search_matches_brute_force():
    for seed in range(12):
        g = rnd_graph(seed, 6 + seed % 3, p=0.45)
        assert (subdivided_clique_search(g, 3, 3) is not None) == _subdivided_triangle_brute(g)
        assert (subdivided_clique_search(g, 3, 2) is not None) == _triangle_brute(g)


# -- ladders ------------------------------------------------------------------


def test_half_graph_ladder_reaches_its_order():
    for n in range(1, 7):
        hg = half_graph(n)
        cert = ladder_index(hg, edge_atom(hg), n_max=n)
        assert cert.n == n
        assert cert.exact


def test_edgeless_graph_has_no_ladder():
    g = FiniteStructure.from_edges(4, [])
    cert = ladder_index(g, edge_atom(g), n_max=3)
    assert cert.n == 0
    assert cert.a_tuples == () and cert.b_tuples == ()
    assert cert.exact


def test_triangle_ladder_is_two():
    g = clique(3)
    cert = ladder_index(g, edge_atom(g), n_max=3)
    assert cert.n == 2
    assert cert.exact


def test_ladder_certificate_reverifies():
    g = clique(2)
    with pytest.raises(DomainError):
        LadderCertificate(
            structure=g, atom=edge_atom(g),
            a_tuples=((0,),), b_tuples=((0,),), n=1,
        )
    with pytest.raises(DomainError):
        LadderCertificate(
            structure=g, atom=edge_atom(g),
            a_tuples=((0,),), b_tuples=(), n=1,
        )


def test_ladder_budget_flags_lower_bound():
    hg = half_graph(3)
    cert = ladder_index(hg, edge_atom(hg), n_max=3, budget_nodes=1)
    assert not cert.exact
    assert cert.n <= 1


def _ladder_brute(structure, atom, n_max):
    N = structure.universe_size
    xs = list(itertools.product(range(N), repeat=len(atom.x_positions)))
    ys = list(itertools.product(range(N), repeat=len(atom.y_positions)))
    best = 0
    for t in range(1, n_max + 1):
        ok = False
        for a_seq in itertools.product(xs, repeat=t):
            for b_seq in itertools.product(ys, repeat=t):
                if all(
                    atom.holds(structure, a_seq[i], b_seq[j]) == (i <= j)
                    for i in range(t)
                    for j in range(t)
                ):
                    ok = True
                    break
            if ok:
                break
        if ok:
            best = t
        else:
            break
    return best


def test_ladder_matches_brute_force():
    for seed in range(10):
        g = rnd_graph(seed, 4, p=0.5)
        cert = ladder_index(g, edge_atom(g), n_max=3)
        assert cert.n == _ladder_brute(g, edge_atom(g), 3)
        assert cert.exact


def test_ladder_on_ternary_relation():
    s = FiniteStructure(
        3, [Relation("R", 3, frozenset({(0, 1, 1), (0, 2, 2), (1, 2, 2)}))]
    )
    atom = PartitionedAtom("R", 3, (0,), (1, 2))
    cert = ladder_index(s, atom, n_max=3)
    assert cert.n == _ladder_brute(s, atom, 3) == 2


def test_ladder_unknown_relation():
    g = clique(3)
    with pytest.raises(DomainError):
        ladder_index(g, PartitionedAtom("Q", 2, (0,), (1,)), n_max=2)


# -- bipartite patterns -------------------------------------------------------


def test_matching_realizes_equality_pattern():
    g = FiniteStructure.from_edges(6, [(0, 3), (1, 4), (2, 5)])
    report = bipartite_pattern(g, [0, 1, 2], [3, 4, 5], n_max=3)
    w = report.witness("=")
    assert w.n == 3
    assert report.best.pattern == "="
    assert set(w.a_seq) <= {0, 1, 2} and set(w.b_seq) <= {3, 4, 5}
    assert len(set(w.a_seq)) == 3 and len(set(w.b_seq)) == 3


def test_half_graph_realizes_order_patterns():
    hg = half_graph(4)
    report = bipartite_pattern(hg, range(4), range(4, 8), n_max=4)
    assert report.witness("<=").n == 4
    assert report.witness(">=").n == 4
    assert report.witness("=").n == 1
    assert report.best.pattern == "<="


def test_complete_bipartite_pattern_maxima():
    g = biclique(3, 3)
    report = bipartite_pattern(g, range(3), range(3, 6), n_max=3)
    assert {w.pattern: w.n for w in report.witnesses} == {
        "=": 1, "!=": 0, "<=": 1, ">=": 1
    }
    assert report.best.pattern == "="


def test_pattern_respects_ordered_relation():
    s = FiniteStructure(2, [Relation("R", 2, frozenset({(0, 1)}))])
    forward = bipartite_pattern(s, [0], [1], n_max=1, relation="R")
    backward = bipartite_pattern(s, [1], [0], n_max=1, relation="R")
    assert forward.witness("=").n == 1
    assert backward.witness("=").n == 0
    assert backward.witness("!=").n == 1


def test_pattern_argument_validation():
    g = clique(3)
    with pytest.raises(DomainError):
        bipartite_pattern(g, [0], [1], n_max=1, relation="Q")
    with pytest.raises(DomainError):
        bipartite_pattern(g, [0], [9], n_max=1)
    with pytest.raises(DomainError):
        bipartite_pattern(g, [0], [1], n_max=-1)
    s = FiniteStructure(3, [Relation("R", 3, frozenset())])
    with pytest.raises(DomainError):
        bipartite_pattern(s, [0], [1], n_max=1, relation="R")


def test_pattern_budget():
    hg = half_graph(2)
    with pytest.raises(BudgetExceeded):
        bipartite_pattern(hg, range(2), range(2, 4), n_max=2, budget_nodes=1)


def _pattern_brute(g, a_part, b_part, pattern, n_max):
    import operator

    cmp = {"=": operator.eq, "!=": operator.ne,
           "<=": operator.le, ">=": operator.ge}[pattern]
    best = 0
    for t in range(1, n_max + 1):
        ok = False
        for a_seq in itertools.permutations(a_part, t):
            for b_seq in itertools.permutations(b_part, t):
                if all(
                    adjacent(g, a_seq[i], b_seq[j]) == cmp(i, j)
                    for i in range(t)
                    for j in range(t)
                ):
                    ok = True
                    break
            if ok:
                break
        if ok:
            best = t
        else:
            break
    return best


def test_pattern_search_matches_brute_force():
    for seed in range(10):
        rng = random.Random(40 + seed)
        edges = [
            (i, 3 + j) for i in range(3) for j in range(3) if rng.random() < 0.5
        ]
        g = FiniteStructure.from_edges(6, edges)
        report = bipartite_pattern(g, range(3), range(3, 6), n_max=3)
        for pattern in ("=", "!=", "<=", ">="):
            assert report.witness(pattern).n == _pattern_brute(
                g, range(3), range(3, 6), pattern, 3
            )

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from majorana_u35 import hsgraph
from majorana_u35.hsgraph import Graph, build_hs_graph, petersen_graph, verify_srg
from majorana_u35.permcore import Perm, enumerate_group


def brute_automorphism_count(g: Graph) -> int:
    """Count adjacency-preserving bijections by plain depth-first extension."""
    A, n = g.adjacency, g.n

    def extend(img):
        k = len(img)
        if k == n:
            return 1
        total = 0
        for c in range(n):
            if c not in img and all(A[k, j] == A[c, img[j]] for j in range(k)):
                total += extend(img + [c])
        return total

    return extend([])


def test_hs_graph_certificate():
    g = build_hs_graph()
    cert = verify_srg(g, 50, 7, 0, 1)
    assert cert.passed and cert.witness is None
    assert g.edge_count() == 50 * 7 // 2
    assert g.girth() == 5
    assert json.loads(g.to_json())["vertices"] == 50


def test_petersen_certificate():
    g = petersen_graph()
    assert verify_srg(g, 10, 3, 0, 1).passed
    assert g.girth() == 5


def test_edge_removed_fails_with_witness():
    g = build_hs_graph()
    u, v = 0, g.neighbours(0)[0]
    cert = verify_srg(g.without_edge(u, v), 50, 7, 0, 1)
    assert not cert.passed
    assert cert.witness[0] == "degree" and cert.witness[1] == u


def test_wrong_parameters_fail():
    cert = verify_srg(petersen_graph(), 10, 3, 1, 1)
    assert not cert.lambda_ok and cert.witness[0] == "lambda"


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(np.array([[0, 1], [0, 0]], dtype=bool))
    with pytest.raises(ValueError):
        Graph(np.eye(2, dtype=bool))


@pytest.mark.parametrize("g,order", [(Graph(np.zeros((3, 3), dtype=bool)), 6), (petersen_graph(), 120)])
def test_automorphism_orders_small(g, order):
    gens = hsgraph.automorphism_group(g)
    G = enumerate_group(gens, cap=10**6, degree=g.n)
    assert G.order == order
    assert all(g.is_automorphism(G.element(i)) for i in range(G.order))


def test_petersen_brute_force_count():
    assert brute_automorphism_count(petersen_graph()) == 120


@settings(max_examples=20, deadline=None)
@given(st.integers(4, 6), st.data())
def test_automorphisms_random_graphs(n, data):
    edges = data.draw(st.sets(st.sampled_from(list(itertools.combinations(range(n), 2)))))
    g = Graph.from_edges(n, edges)
    gens = hsgraph.automorphism_group(g)
    G = enumerate_group(gens, cap=10**4, degree=n) if gens else None
    order = G.order if G else 1
    assert order == brute_automorphism_count(g)


def test_derived_of_abelian_is_trivial():
    C = enumerate_group([Perm.from_cycles([(0, 1, 2, 3)], 4)], cap=10)
    assert hsgraph.derived_subgroup(C).order == 1


def test_hs_group_invariants(groups, G):
    g, aut, _ = groups
    assert all(g.is_automorphism(p) for p in aut.generators)
    assert aut.order == hsgraph.AUT_HS_ORDER == 2 * hsgraph.U35_ORDER
    orders = G.element_orders()
    assert (orders == 2).sum() == 525 and (orders == 3).sum() == 3500
    assert hsgraph.vertex_stabilizer(G, 0).size == 2520


def test_u35_is_perfect(G):
    assert hsgraph.derived_subgroup(G).order == G.order


def test_fixed_subgraphs_by_order(groups, G):
    g = groups[0]
    fix = (G.elements == np.arange(50, dtype=np.uint8)).sum(axis=1)
    orders = G.element_orders()
    counts = {int(o): sorted(set(fix[orders == o].tolist())) for o in np.unique(orders)}
    # identity fixes everything, involutions fix a Petersen graph
    assert counts[1] == [50] and counts[2] == [10]
    assert 0 in counts[5]
    free = int(np.flatnonzero((orders == 5) & (fix == 0))[0])
    assert fixed_sub_n(G.element(free), g) == 0
    assert fixed_sub_n(G.identity(), g) == 50


def fixed_sub_n(t, g):
    return hsgraph.fixed_subgraph(t, g).n

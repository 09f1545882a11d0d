"""Acceptance criteria 1-15, each at its stated tolerance.

Every test records a PASS/FAIL line that is printed in the terminal summary.
"""

import time
from fractions import Fraction

import numpy as np

from conftest import record
from majorana_u35 import gram, hsgraph, nortsak, permcore, shapes

T_RHO_COUNTS = [3, 18, 36, 108, 36, 108, 216]
RHO_SIGMA_COUNTS = [1, 12, 36, 144, 18, 72, 54, 9, 108, 216, 216, 216, 216, 432]


def test_c01_hs_graph():
    t0 = time.perf_counter()
    g = hsgraph.build_hs_graph()
    cert = hsgraph.verify_srg(g, 50, 7, 0, 1)
    dt = time.perf_counter() - t0
    ok = cert.passed and g.edge_count() == 175 and dt < 1.0
    record(1, "HS graph srg(50,7,0,1), 175 edges, < 1 s", ok, f"{dt:.3f} s")
    assert ok


def test_c02_group(groups, reg, timings):
    _, aut, G = groups
    orders = G.element_orders()
    dt = timings.seconds["groups"]
    ok = (aut.order == 252000 and G.order == 126000 and reg.n_involutions == 525
          and shapes.involution_classes(reg) == 1 and reg.n_sub3 == 1750
          and int((orders == 3).sum()) == 3500 and dt < 60)
    record(2, "Aut(HS) 252000, U3(5) 126000, 525 involutions, 1750 order-3 subgroups, < 1 min", ok,
           f"{dt:.1f} s")
    assert ok


def test_c03_suborbits(G, reg):
    tab = shapes.suborbit_table(G, reg)
    expected = sorted(zip((1, 20, 120, 120, 120, 48, 48, 48), (1, 2, 3, 4, 6, 5, 5, 5)))
    d6 = shapes.dihedral_count(G, 3, reg)
    ok = sorted(tab.pairs()) == expected and d6 == 10500 and shapes.d6_count_via_sub3(G, reg) == 10500
    record(3, "suborbits and D6 count 10500", ok)
    assert ok


def test_c04_petersen(groups, reg):
    g, _, G = groups
    bad = [i for i in range(reg.n_involutions)
           if not hsgraph.verify_srg(hsgraph.fixed_subgraph(reg.involution(i), g), 10, 3, 0, 1).passed]
    C = permcore.centralizer(reg.involution(0), G)
    invs = sum(1 for h in C if h.order() == 2)
    ok = not bad and C.order == 240 and invs == 21
    record(4, "Petersen fixed subgraphs, |C(t)| = 240, 21 involutions", ok)
    assert ok


def test_c05_norton_sakuma():
    nortsak.build_algebra.cache_clear()
    nortsak._EIGENBASIS_CACHE.clear()
    t0 = time.perf_counter()
    reports = [nortsak.verify_algebra(t) for t in nortsak.TYPES]
    dt = time.perf_counter() - t0
    failed = [r.tag for r in reports if not r.passed]
    ok = not failed and dt < 10
    record(5, "eight Norton-Sakuma algebras, < 10 s", ok, f"{dt:.1f} s {failed or ''}")
    assert ok


def test_c06_shape(shape):
    ok = shape.types == {2: "2A", 3: "3A", 4: "4B", 5: "5A", 6: "6A"}
    record(6, "shape {2A,3A,4B,5A,6A}, unique", ok)
    assert ok


def test_c07_censuses(reg):
    rng = np.random.default_rng(2024)
    bases = [int(b) for b in rng.choice(reg.n_sub3, size=5, replace=False)]
    tr = [shapes.t_rho_census(reg, b).counts() for b in bases]
    rs = [shapes.rho_sigma_census(reg, b).counts() for b in bases]
    ok = all(c == T_RHO_COUNTS for c in tr) and all(c == RHO_SIGMA_COUNTS for c in rs)
    record(7, "pair censuses at 5 random bases", ok, f"bases {bases}")
    assert ok


def test_c08_gram525(G, shape, reg, labels):
    M = gram.assemble_gram(G, shape, False, reg, labels)
    cert = gram.certified_rank(M)
    pd, exact = gram.positive_definite(M)
    ok = set(cert.ranks.values()) == {525} and exact == 525 and pd
    record(8, "525 Gram rank 525 mod 3 primes and exactly, positive definite", ok)
    assert ok


def test_c09_pasechnik(M, rels):
    norms = {gram.gram_norm(M, r.vector) for r in rels}
    ok = len(rels) > 0 and norms == {Fraction(0)} and gram.relations_vanish(M, rels)
    record(9, "Pasechnik vectors null and orthogonal to all 2275 columns", ok, f"{len(rels)} relations")
    assert ok


def test_c10_x(M, rels, reg, gamma_minus):
    x = gram.solve_x(M, rels)
    roots = []
    for orb in gamma_minus.orbits:
        sigma = int(orb[0])
        t, _ = gram.find_s3_s4_involution(reg.sub3_generator(gamma_minus.base), reg.sub3_generator(sigma), reg)
        roots.append(gram.resurrection_inner_check(gamma_minus.base, sigma, t, M, reg).x)
    ok = x == Fraction(4, 81) and len(roots) == 6 and all(r == Fraction(4, 81) for r in roots)
    record(10, "x = 4/81 from relations and from six resurrection checks", ok, f"x = {x}")
    assert ok


def test_c11_dimension(M):
    t0 = time.perf_counter()
    cert = gram.certified_rank(M, gram.DEFAULT_PRIMES)
    dt = time.perf_counter() - t0
    ok = len(set(gram.DEFAULT_PRIMES)) == 3 and set(cert.ranks.values()) == {798} and dt < 300
    record(11, "2275 Gram rank 798 mod 3 primes, kernel 1477", ok, f"{dt:.1f} s")
    assert ok


def test_c12_v_split(M, gamma_minus):
    vd = gram.v_decomposition(gamma_minus, M)
    plus = set(vd.v_plus_rank.values()) == {796}
    pairing = vd.orbit_pairing is not None and vd.complement_rank == 2
    ok = plus and pairing
    record(12, "V+ rank 796 and orbit pairing with F-rank 2", ok,
           f"V+ {sorted(vd.v_plus_rank.values())}, orbit pairing {vd.orbit_pairing}, "
           f"level-set combinations {vd.level_combinations}")
    assert plus, "V+ rank"
    assert pairing, "no pairing of the six N-orbits gives F-combinations orthogonal to V+"


def test_c13_gamma_minus(gamma_minus):
    od = gamma_minus
    ok = (od.gamma_minus.size == 432 and od.normalizer_order == 72 and od.regular
          and [o.size for o in od.orbits] == [72] * 6 and od.common_normalising == 0)
    record(13, "six regular N-orbits of 72, no common normalising involution", ok)
    assert ok


def test_c14_linking_involution(reg, gamma_minus):
    found = []
    for orb in gamma_minus.orbits:
        try:
            gram.find_s3_s4_involution(reg.sub3_generator(gamma_minus.base), reg.sub3_generator(int(orb[0])), reg)
            found.append(True)
        except gram.NotFound:
            found.append(False)
    ok = len(found) == 6 and all(found)
    record(14, "linking involution for six orbit representatives", ok)
    assert ok


def test_c15_a7(G, M, reg, rels):
    rep = gram.a7_restriction_rank(G, M, reg, rels)
    ok = (rep.rank == 196 and rep.kernel == 49 and rep.majorana_rank == 105 and rep.pasechnik_span == 35
          and rep.pasechnik_in_kernel)
    record(15, "A7 restriction rank 196, kernel 49, Majorana 105, Pasechnik span 35", ok)
    assert ok

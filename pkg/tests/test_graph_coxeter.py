import json
import math
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hecklab.coxeter import CapExceeded, CoxeterSystem, builtin_systems
from hecklab.graph import SimplicialGraph, SummandIndex, existing_indices, sigma_permutation, sigma_q, summand_indices
from hecklab.growth import growth_coefficients

from oracles import TitsGroup, conjugacy_oracle, lexmin_brute, sigma_q_brute, sigma_table

SYSTEMS = builtin_systems()
B2 = CoxeterSystem(("s", "t"), [[1, 4], [4, 1]], name="b2")
A3 = CoxeterSystem(("a", "b", "c"), [[1, 3, 2], [3, 1, 3], [2, 3, 1]], name="a3")
TRIANGLE = CoxeterSystem(("a", "b", "c"), [[1, 3, -1], [3, 1, 4], [-1, 4, 1]], name="mixed")
SMALL = [SYSTEMS["dihedral-inf"], SYSTEMS["free3"], SYSTEMS["a2"], B2, A3, TRIANGLE]


def word(system, text):
    return system.parse_word(text)


# reduce / multiply / descents


def test_reduce_examples():
    sq = CoxeterSystem.from_graph(SimplicialGraph(["s", "t"], [("s", "t")]))
    assert sq.reduce(()) == ()
    assert sq.reduce(word(sq, "sts")) == word(sq, "t")
    free3 = SYSTEMS["free3"]
    assert free3.reduce(word(free3, "abab")) == word(free3, "abab")
    assert free3.length(free3.reduce(word(free3, "abab"))) == 4


def test_multiply_examples():
    dih = SYSTEMS["dihedral-inf"]
    st_ = word(dih, "st")
    assert dih.multiply(st_, st_) == word(dih, "stst")
    assert dih.multiply(st_, ()) == st_
    s = word(dih, "s")
    assert dih.multiply(s, s) == ()
    for system in SMALL:
        for g in system.ball(3):
            assert system.multiply(g, system.inverse(g)) == ()


def test_starts_with_examples():
    sq = CoxeterSystem.from_graph(SimplicialGraph(["s", "t"], [("s", "t")]))
    s = sq.generator("s")
    assert not sq.starts_with((), s)
    assert sq.starts_with(sq.reduce(word(sq, "st")), s)
    assert sq.starts_with(sq.reduce(word(sq, "ts")), s)


@pytest.mark.parametrize("system", SMALL + [SYSTEMS["pentagon"]], ids=lambda s: s.name)
def test_normal_forms_against_tits_representation(system):
    tits = TitsGroup(system.to_dict()["exponents"])
    table = tits.lengths(5)
    ball = system.ball(5)
    assert len(ball) == len(table)
    keys = {tits.key(tits.matrix(g)) for g in ball}
    assert len(keys) == len(ball)
    for g in ball:
        assert len(g) == table[tits.key(tits.matrix(g))]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SMALL), st.lists(st.integers(0, 2), max_size=6), st.lists(st.integers(0, 2), max_size=6))
def test_reduce_is_a_homomorphism(system, u, v):
    u = tuple(x % system.rank for x in u)
    v = tuple(x % system.rank for x in v)
    ru, rv = system.reduce(u), system.reduce(v)
    assert system.reduce(ru) == ru
    assert system.reduce(u + v) == system.multiply(ru, rv)
    tits = TitsGroup(system.to_dict()["exponents"])
    assert tits.key(tits.matrix(system.reduce(u + v))) == tits.key(tits.matrix(u + v))


def test_reduce_exhaustive_short_words():
    for system in (SYSTEMS["free3"], SYSTEMS["a2"], B2):
        tits = TitsGroup(system.to_dict()["exponents"])
        table = tits.lengths(6)
        for n in range(7):
            for w in product(range(system.rank), repeat=n):
                g = system.reduce(w)
                assert len(g) == table[tits.key(tits.matrix(w))]
                assert tits.key(tits.matrix(g)) == tits.key(tits.matrix(w))


def test_length_subadditive_and_parity():
    for system in (SYSTEMS["free3"], A3, TRIANGLE):
        ball = system.ball(4 if system.rank <= 3 else 3)
        for g in ball:
            for h in ball:
                gh = system.multiply(g, h)
                assert len(gh) <= len(g) + len(h)
                assert (len(gh) - len(g) - len(h)) % 2 == 0


def test_exchange_condition():
    for system in (SYSTEMS["free3"], A3, TRIANGLE, SYSTEMS["pentagon"]):
        for g in system.ball(5 if system.rank <= 3 else 4):
            for s in range(system.rank):
                sg = system.left_mul(s, g)
                if len(sg) == len(g) + 1:
                    continue
                deletions = {system.reduce(g[:i] + g[i + 1 :]) for i in range(len(g))}
                assert sg in deletions


def test_ball_examples():
    assert SYSTEMS["free3"].ball(0) == [()]
    dih = SYSTEMS["dihedral-inf"]
    assert {dih.format_word(g) for g in dih.ball(2)} == {"", "s", "t", "st", "ts"}
    assert len(SYSTEMS["free3"].ball(3)) == 22


def test_ball_order_is_length_then_lex():
    for system in SMALL:
        ball = system.ball(4)
        assert ball == sorted(ball, key=lambda g: (len(g), g))
        assert len(set(ball)) == len(ball)


def test_ball_cap(monkeypatch):
    monkeypatch.setenv("HECKLAB_MAX_BALL", "50")
    with pytest.raises(CapExceeded):
        CoxeterSystem.free(4).ball(6)


def test_right_angled_normal_form_is_lexmin():
    pentagon = SYSTEMS["pentagon"]
    for g in pentagon.ball(5):
        assert tuple(g) == lexmin_brute(pentagon.graph, g)


# cliques, links, comm


def test_cliques_and_links():
    edgeless = SimplicialGraph.edgeless("abc")
    assert edgeless.clique_count() == 4
    k5f = SimplicialGraph.k5_plus_f()
    abc = k5f.vertex_set("abc")
    assert k5f.is_clique(abc)
    assert k5f.link(abc) == k5f.vertex_set("de")
    assert edgeless.link(frozenset()) == edgeless.vertex_set("abc")


def test_comm_of_empty_clique_on_edgeless_graph():
    g = SimplicialGraph.edgeless("abc")
    pairs = set(g.comm(frozenset()))
    a, b, c = (g.vertex_set(x) for x in "abc")
    empty = frozenset()
    assert (a, b) in pairs and (b, a) in pairs and (a, empty) in pairs and (empty, empty) in pairs
    # 4 * 4 ordered clique pairs minus the 3 with a shared vertex
    assert len(pairs) == 13


def test_clique_enumeration_against_subsets():
    for graph in (SimplicialGraph.k5_plus_f(), SimplicialGraph.cycle(5), SimplicialGraph.edgeless("abcd")):
        n = len(graph)
        brute = [frozenset(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)]
        brute = {c for c in brute if all(graph.commute(a, b) for a in c for b in c if a != b)}
        assert set(graph.all_cliques()) == brute


# sigma permutations


def test_sigma_worked_examples():
    g = SimplicialGraph.k5_plus_f()
    w = g.parse_word("abcdef")
    idx = SummandIndex(3, 2, g.vertex_set("abc"), g.vertex_set("de"), frozenset())
    assert sigma_permutation(g, w, idx) == (3, 4, 0, 1, 2, 5)
    idx2 = SummandIndex(2, 2, g.vertex_set("ab"), g.vertex_set("d"), g.vertex_set("c"))
    assert sigma_permutation(g, w, idx2) is None


def test_sigma_single_letter():
    g = SimplicialGraph.cycle(5)
    for v in range(5):
        idx = SummandIndex(0, 0, frozenset(), frozenset(), frozenset([v]))
        assert sigma_permutation(g, (v,), idx) == (0,)


@pytest.mark.parametrize("name,max_len", [("pentagon", 5), ("k5f", 4), ("free3", 5)])
def test_sigma_against_brute_force(name, max_len):
    system = SYSTEMS[name]
    graph = system.graph
    for d in range(1, max_len + 1):
        for w in system.sphere(d):
            table = sigma_table(graph, w)
            assert all(len(v) == 1 for v in table.values())
            expected = {key: next(iter(v)) for key, v in table.items()}
            got = {(i.l, i.k, i.clique, i.left, i.right): s for i, s in existing_indices(graph, w)}
            assert got == expected


def test_sigma_index_scan_matches_direct_enumeration():
    system = SYSTEMS["pentagon"]
    graph = system.graph
    for w in system.sphere(3):
        direct = dict(existing_indices(graph, w))
        for idx in summand_indices(graph, 3):
            assert sigma_permutation(graph, w, idx) == direct.get(idx)


def test_k5f_full_word_sigma_brute_force():
    g = SimplicialGraph.k5_plus_f()
    w = g.parse_word("abcdef")
    table = sigma_table(g, w)
    got = {(i.l, i.k, i.clique, i.left, i.right): s for i, s in existing_indices(g, w)}
    assert got == {key: next(iter(v)) for key, v in table.items()}


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_sigma_q_against_brute_force(data):
    system = SYSTEMS["pentagon"]
    graph = system.graph
    d = data.draw(st.integers(1, 5))
    w = data.draw(st.sampled_from(system.sphere(d)))
    idx = data.draw(st.sampled_from(summand_indices(graph, d)))
    brute = sigma_q_brute(graph, w, idx.l, idx.k, idx.clique, idx.left, idx.right)
    assert len(brute) <= 1
    got = sigma_q(graph, w, idx.l, idx.k, idx.clique, idx.left, idx.right)
    assert got == (next(iter(brute)) if brute else None)


# conjugacy and types


def test_conjugacy_classes_examples():
    assert SYSTEMS["pentagon"].conjugacy_classes() == [(i,) for i in range(5)]
    assert SYSTEMS["a2"].conjugacy_classes() == [(0, 1)]
    assert B2.conjugacy_classes() == [(0,), (1,)]


@pytest.mark.parametrize("system,radius", [(SYSTEMS["a2"], 4), (B2, 6), (A3, 4), (TRIANGLE, 4), (SYSTEMS["free3"], 4)], ids=lambda x: getattr(x, "name", str(x)))
def test_conjugacy_classes_against_search(system, radius):
    assert system.conjugacy_classes() == conjugacy_oracle(system, radius)


def test_classify_type_examples():
    kinds = lambda s: [c.kind for c in s.classify_type()]
    assert kinds(SYSTEMS["dihedral-inf"]) == ["affine"]
    assert kinds(SYSTEMS["a2"]) == ["spherical"]
    assert kinds(SYSTEMS["free3"]) == ["non-affine"]
    assert kinds(SYSTEMS["pentagon"]) == ["non-affine"]
    assert kinds(A3) == ["spherical"]
    assert kinds(CoxeterSystem.free(2)) == ["affine"]
    assert kinds(CoxeterSystem.free(3)) == ["non-affine"]
    affine_a2 = CoxeterSystem("abc", [[1, 3, 3], [3, 1, 3], [3, 3, 1]])
    assert kinds(affine_a2) == ["affine"]


def test_gram_eigenvalues_dihedral():
    (comp,) = SYSTEMS["dihedral-inf"].classify_type()
    assert comp.eigenvalues == pytest.approx((0.0, 2.0), abs=1e-12)


# growth


def test_growth_examples():
    assert growth_coefficients(SYSTEMS["dihedral-inf"], 4).single() == [1, 2, 2, 2, 2]
    assert growth_coefficients(SYSTEMS["free3"], 4).single() == [1, 3, 6, 12, 24]
    assert growth_coefficients(SYSTEMS["a2"], 0).single() == [1]


def test_multivariate_growth_for_a2_uses_class_representatives():
    series = growth_coefficients(SYSTEMS["a2"], 3)
    assert series.coefficients == {(0, 0): 1, (1, 0): 2, (2, 0): 2, (3, 0): 1}


# system files


def test_system_file_round_trip(tmp_path):
    for system in SMALL:
        path = tmp_path / "sys.json"
        path.write_text(json.dumps(system.to_dict()))
        loaded = CoxeterSystem.load(path)
        assert loaded.to_dict()["exponents"] == system.to_dict()["exponents"]
        assert loaded.ball(3) == system.ball(3)


def test_infinity_encoding():
    data = SYSTEMS["dihedral-inf"].to_dict()
    assert data["exponents"] == [[1, -1], [-1, 1]]
    assert CoxeterSystem.from_dict(data).m[0][1] == math.inf


@pytest.mark.parametrize("bad", [[[1, 1], [1, 1]], [[2, 3], [3, 1]], [[1, 3], [4, 1]], [[1, 0], [0, 1]]])
def test_invalid_exponents_rejected(bad):
    with pytest.raises(ValueError):
        CoxeterSystem(("s", "t"), bad)

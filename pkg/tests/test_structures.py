import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    all_graphs,
    brute_automorphism_count,
    brute_isomorphic,
    degree_sequence,
    random_structure,
)
from hspeed.errors import LanguageMismatch, MissingConstant, NotInjective
from hspeed.structures import (
    And,
    Atom,
    GRAPH,
    Interpretation,
    Language,
    Not,
    apply_bijection,
    apply_interpretation,
    automorphisms,
    canonical_form,
    graph,
    induced_substructure,
    is_isomorphic,
    make_structure,
    structure_from_json,
    structure_to_json,
    uniform_language,
)


def complete_graph(n):
    return graph(n, itertools.combinations(range(1, n + 1), 2))


class TestInducedSubstructure:
    def test_clique_restriction(self):
        sub, relabel = induced_substructure(complete_graph(4), {1, 2, 3})
        assert sub == complete_graph(3)
        assert relabel == {1: 1, 2: 2, 3: 3}

    def test_empty_graph(self):
        sub, relabel = induced_substructure(graph(5, []), {2, 4})
        assert sub == graph(2, [])
        assert relabel == {2: 1, 4: 2}

    def test_hyperedge_cut(self):
        # oracle: a tuple survives the restriction iff its support lies in X
        lang = uniform_language(3)
        m = make_structure(lang, 4, {"R": [(1, 2, 3)]})
        X = {1, 2, 4}
        expected = {t for t in m.tuples_of("R") if set(t) <= X}
        assert expected == set()
        sub, _ = induced_substructure(m, X)
        assert sub.tuples_of("R") == frozenset()

    def test_missing_constant(self):
        lang = Language((("E", 2),), ("c",))
        m = make_structure(lang, 3, {"E": []}, {"c": 3})
        with pytest.raises(MissingConstant):
            induced_substructure(m, {1, 2})


class TestApplyBijection:
    def test_identity(self):
        m = graph(4, [(1, 2), (3, 4)])
        assert apply_bijection(m, {1: 1, 2: 2, 3: 3, 4: 4}) == m

    def test_path_reversal(self):
        p = graph(3, [(1, 2), (2, 3)])
        assert apply_bijection(p, {1: 3, 2: 2, 3: 1}) == p

    def test_directed_edge(self):
        m = make_structure(Language((("R", 2),)), 2, {"R": [(1, 2)]})
        image = apply_bijection(m, {1: 2, 2: 1})
        assert image.tuples_of("R") == frozenset({(2, 1)})

    def test_not_injective(self):
        with pytest.raises(NotInjective):
            apply_bijection(graph(2, []), {1: 1, 2: 1})

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10**6), n=st.integers(1, 6))
    def test_round_trip(self, seed, n):
        import random

        m = random_structure(seed, n)
        perm = list(range(1, n + 1))
        random.Random(seed + 1).shuffle(perm)
        f = dict(zip(range(1, n + 1), perm))
        finv = {v: k for k, v in f.items()}
        assert apply_bijection(apply_bijection(m, f), finv) == m


class TestIsomorphism:
    def test_cycle_vs_star(self, structured_graphs):
        c4, k13 = structured_graphs["C4"], structured_graphs["K13"]
        assert degree_sequence(c4) != degree_sequence(k13)  # degree oracle
        ok, witness = is_isomorphic(c4, k13)
        assert not ok and witness is None

    def test_path_relabeling(self, structured_graphs):
        p4 = structured_graphs["P4"]
        other = graph(4, [(2, 4), (4, 1), (1, 3)])
        ok, witness = is_isomorphic(p4, other)
        assert ok
        assert apply_bijection(p4, witness) == other

    def test_single_hyperedges(self):
        lang = uniform_language(3)
        a = make_structure(lang, 4, {"R": list(itertools.permutations((1, 2, 3)))})
        b = make_structure(lang, 4, {"R": list(itertools.permutations((2, 3, 4)))})
        assert brute_isomorphic(a, b)  # oracle over all 24 bijections
        ok, witness = is_isomorphic(a, b)
        assert ok
        assert apply_bijection(a, witness) == b

    def test_language_mismatch(self):
        a = graph(2, [])
        b = make_structure(uniform_language(2), 2, {})
        with pytest.raises(LanguageMismatch):
            is_isomorphic(a, b)

    def test_equivalence_relation(self):
        corpus = [random_structure(s, 4) for s in range(8)]
        for a in corpus:
            ok, w = is_isomorphic(a, a)
            assert ok
        for a, b in itertools.combinations(corpus, 2):
            ab, _ = is_isomorphic(a, b)
            ba, _ = is_isomorphic(b, a)
            assert ab == ba == brute_isomorphic(a, b)


class TestCanonicalForm:
    def test_idempotent(self, structured_graphs):
        for m in structured_graphs.values():
            cf, _ = canonical_form(m)
            cf2, _ = canonical_form(cf)
            assert cf == cf2

    def test_all_relabelings_agree(self, structured_graphs):
        p4 = structured_graphs["P4"]
        forms = set()
        for perm in itertools.permutations(range(1, 5)):
            image = apply_bijection(p4, dict(zip(range(1, 5), perm)))
            forms.add(canonical_form(image)[0])
        assert len(forms) == 1

    def test_separates_nonisomorphic(self, structured_graphs):
        assert canonical_form(structured_graphs["C4"])[0] != canonical_form(structured_graphs["K13"])[0]

    def test_exhaustive_small_graphs(self):
        # unlabeled class counts 1, 2, 4, 11, 34 and labeled totals 2^C(n,2)
        expected_classes = {1: 1, 2: 2, 3: 4, 4: 11, 5: 34}
        for n in range(1, 6):
            forms = {}
            for g in all_graphs(n):
                forms.setdefault(canonical_form(g)[0], []).append(g)
            assert len(forms) == expected_classes[n]
            labeled = sum(math.factorial(n) // automorphisms(rep).order for rep in forms)
            assert labeled == 2 ** math.comb(n, 2)
            # within a class everything is isomorphic (oracle spot check)
            for rep, members in forms.items():
                assert brute_isomorphic(rep, members[0])


class TestAutomorphisms:
    def test_triangle(self, structured_graphs):
        assert automorphisms(structured_graphs["K3"]).order == 6

    def test_four_cycle_brute(self, structured_graphs):
        c4 = structured_graphs["C4"]
        assert brute_automorphism_count(c4) == 8  # oracle
        assert automorphisms(c4).order == 8

    def test_directed_edge(self):
        m = make_structure(Language((("R", 2),)), 2, {"R": [(1, 2)]})
        assert automorphisms(m).order == 1

    def test_orders_match_brute_force(self):
        for seed in range(10):
            m = random_structure(seed, 5)
            assert automorphisms(m).order == brute_automorphism_count(m)

    def test_orbit_stabilizer(self, structured_graphs):
        for name in ("M3", "C6", "star5"):
            m = structured_graphs[name]
            n = m.n
            distinct = {
                apply_bijection(m, dict(zip(range(1, n + 1), perm)))
                for perm in itertools.permutations(range(1, n + 1))
            }
            assert len(distinct) * automorphisms(m).order == math.factorial(n)

    def test_constants_pin_automorphisms(self):
        lang = Language((("E", 2),), ("c",))
        m = make_structure(lang, 3, {"E": []}, {"c": 1})
        assert automorphisms(m).order == 2  # only 2 and 3 may swap


class TestInterpretation:
    def test_identity(self, structured_graphs):
        c4 = structured_graphs["C4"]
        interp = Interpretation(GRAPH, GRAPH, (("E", Atom("E", (0, 1))),))
        assert apply_interpretation(interp, c4) == c4

    def test_complement(self, structured_graphs):
        c4 = structured_graphs["C4"]
        interp = Interpretation(GRAPH, GRAPH, (("E", Not(Atom("E", (0, 1)))),))
        image = apply_interpretation(interp, c4)
        # oracle: complement over all ordered pairs including the diagonal
        expected = {
            (a, b)
            for a in c4.elements()
            for b in c4.elements()
            if (a, b) not in c4.tuples_of("E")
        }
        assert image.tuples_of("E") == frozenset(expected)
        assert (1, 1) in image.tuples_of("E")
        assert {t for t in image.tuples_of("E") if t[0] != t[1]} == {(1, 3), (3, 1), (2, 4), (4, 2)}

    def test_symmetric_core(self):
        lang = Language((("R", 2),))
        m = make_structure(lang, 3, {"R": [(1, 2), (2, 1), (2, 3)]})
        interp = Interpretation(
            lang, lang, (("R", And((Atom("R", (0, 1)), Atom("R", (1, 0))))),)
        )
        image = apply_interpretation(interp, m)
        assert image.tuples_of("R") == frozenset({(1, 2), (2, 1)})

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10**6), n=st.integers(1, 5))
    def test_commutes_with_substructure(self, seed, n):
        import random

        m = random_structure(seed, n)
        lang = m.language
        interp = Interpretation(lang, lang, (("R", Not(Atom("R", (0, 1)))),))
        rng = random.Random(seed)
        size = rng.randint(1, n)
        X = rng.sample(range(1, n + 1), size)
        inner, _ = induced_substructure(apply_interpretation(interp, m), X)
        outer = apply_interpretation(interp, induced_substructure(m, X)[0])
        assert inner == outer


class TestJson:
    def test_round_trip(self, structured_graphs):
        for m in structured_graphs.values():
            assert structure_from_json(structure_to_json(m)) == m

    def test_constants_round_trip(self):
        lang = Language((("E", 2),), ("c", "d"))
        m = make_structure(lang, 3, {"E": [(1, 2), (2, 1)]}, {"c": 1, "d": 3})
        assert structure_from_json(structure_to_json(m)) == m


class TestLargeGroups:
    def test_edgeless_full_symmetric(self):
        g = graph(8, [])
        assert automorphisms(g).order == math.factorial(8)

    def test_complete_bipartite_group(self):
        from hspeed.corpus import complete_bipartite

        g = complete_bipartite(4, 4)
        assert automorphisms(g).order == 2 * math.factorial(4) ** 2

    def test_disjoint_cliques_wreath(self):
        g = graph(9, [(a, b) for base in (0, 3, 6) for a in range(base + 1, base + 4)
                      for b in range(a + 1, base + 4)])
        # three disjoint triangles: (3!)^3 * 3!
        assert automorphisms(g).order == 6 ** 3 * 6

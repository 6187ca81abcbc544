import random

import pytest
from hypothesis import given, settings

from constructible.acceptance import random_monotone_map
from constructible.exactlin import ChainComplex, RatMatrix, homology, is_quasi_isomorphism
from constructible.poset import FinPoset, MonotoneMap, product, product_map, projection
from constructible.simplicial import face_poset, sphere, standard_simplex
from constructible.shv import (PosetRep, PseudoFreeComplex, RepError, bar_resolution, check_locally_constant,
                               closed_pushforward, constant, derived_pushforward, evaluate,
                               extend_by_zero, holim, homology_dims_by_label, open_indicator, open_pushforward,
                               pseudo_free_resolve, pullback, realize, recollement_triangle, resolution_length,
                               resolve, restrict, shift, skyscraper, star_sheaf, tensor, twist_by_dualizing, zero_rep)
from constructible.shv.limits import coaugmentation
from constructible.shv.random import random_poset, random_rep
from constructible.stratify import Stratification

from conftest import rep_from_seed, seeds

C2 = FinPoset.chain(2)
EDGE = face_poset(standard_simplex(1))
S1 = face_poset(sphere(1))


def hom(F):
    return [homology(X) for X in F.stalks]


def by_label(F):
    return {p: {k: v for k, v in h.items() if v} for p, h in homology_dims_by_label(F).items()}


def two_chart_circle(sign: int) -> PosetRep:
    """Vertices a, b and edges e, f each above both; monodromy ``sign`` along a -> f."""
    P = FinPoset.from_covers(["a", "b", "e", "f"], [("a", "e"), ("b", "e"), ("a", "f"), ("b", "f")])
    one = ChainComplex.concentrated(1, 0)
    trans = {(p, q): {0: RatMatrix(1, 1, [[1]])} for p, q in P.covers()}
    trans[(P.index("a"), P.index("f"))] = {0: RatMatrix(1, 1, [[sign]])}
    return PosetRep(P, [one] * 4, trans)


# examples -----------------------------------------------------------------


def test_evaluate_examples():
    F = constant(S1)
    for p in S1:
        assert homology(evaluate(F, S1.up_closure([p]))) == homology(F.stalks[p])
    assert homology(evaluate(constant(face_poset(standard_simplex(2))), range(7))) == {0: 1}
    assert homology(evaluate(F, range(6))) == {0: 1, -1: 1}
    with pytest.raises(RepError):
        evaluate(constant(C2), [0])


def test_pullback_examples():
    F = rep_from_seed(3)
    assert hom(pullback(MonotoneMap.identity(F.base), F)) == hom(F)
    pt = constant(FinPoset.point())
    assert by_label(pullback(MonotoneMap.to_point(S1), pt)) == by_label(constant(S1))
    collapse = MonotoneMap(C2, C2, (0, 0))
    G = PosetRep(C2, [ChainComplex.concentrated(2, 0), ChainComplex.concentrated(1, 0)],
                 {(0, 1): {0: RatMatrix(1, 2, [[1, 0]])}})
    assert hom(pullback(collapse, G)) == [{0: 2}, {0: 2}]


def test_extend_by_zero_examples():
    F = constant(C2)
    assert hom(extend_by_zero(C2, [0, 1], F)) == hom(F)
    _, empty = restrict(F, [])
    assert all(X.is_zero() for X in extend_by_zero(C2, [], empty).stalks)
    _, top = restrict(F, [1])
    assert by_label(extend_by_zero(C2, [1], top)) == {"0": {}, "1": {0: 1}}


def test_closed_pushforward_examples():
    F = constant(C2)
    assert hom(closed_pushforward(C2, [0, 1], F)) == hom(F)
    _, bottom = restrict(F, [0])
    assert by_label(closed_pushforward(C2, [0], bottom)) == {"0": {0: 1}, "1": {}}
    _, empty = restrict(F, [])
    assert all(X.is_zero() for X in closed_pushforward(C2, [], empty).stalks)
    _, top = restrict(F, [1])
    assert by_label(open_pushforward(C2, [1], top)) == {"0": {0: 1}, "1": {0: 1}}


def test_recollement_examples():
    F = constant(C2)
    rec = recollement_triangle(C2, [1], F)
    assert by_label(rec.lower.A) == {"0": {}, "1": {0: 1}}
    assert by_label(rec.lower.C) == {"0": {0: 1}, "1": {}}
    assert rec.holds()
    whole = recollement_triangle(C2, [0, 1], F)
    assert all(X.is_zero() for X in whole.lower.C.stalks) and whole.holds()
    none = recollement_triangle(C2, [], F)
    assert all(X.is_zero() for X in none.lower.A.stalks) and none.holds()
    with pytest.raises(RepError):
        recollement_triangle(C2, [0], F)


def test_tensor_examples():
    U, V = C2.up_closure([0]), C2.up_closure([1])
    assert hom(tensor(open_indicator(C2, U), open_indicator(C2, V))) == hom(open_indicator(C2, U & V))
    F = rep_from_seed(5)
    assert hom(tensor(F, constant(F.base))) == hom(F)
    assert all(X.is_zero() for X in tensor(skyscraper(C2, 0), star_sheaf(C2, 1)).stalks)
    with pytest.raises(RepError):
        tensor(constant(C2), constant(S1))


def test_resolution_examples():
    C = pseudo_free_resolve(star_sheaf(C2, 1))
    assert C.gens == {0: (1,)} and resolution_length(star_sheaf(C2, 1), C) == 0
    C = pseudo_free_resolve(skyscraper(C2, 0))
    assert C.gens == {0: (0,), 1: (1,)} and C.d(1) == RatMatrix(1, 1, [[1]])
    C = pseudo_free_resolve(constant(EDGE))
    labels = {k: [EDGE.label(g) for g in v] for k, v in C.gens.items()}
    assert labels == {0: ["a", "b"], 1: ["ab"]}
    assert C.d(1) == RatMatrix(2, 1, [[1], [-1]])
    for F in (skyscraper(C2, 0), constant(EDGE)):
        assert hom(realize(pseudo_free_resolve(F))) == hom(F)


def test_realize_examples():
    single = PseudoFreeComplex(C2, {0: [1]}, {})
    assert hom(realize(single)) == hom(star_sheaf(C2, 1))
    assert all(X.is_zero() for X in realize(PseudoFreeComplex(C2, {}, {})).stalks)


def test_support_condition_enforced():
    # a target generator above its source cannot appear in the differential
    with pytest.raises(RepError):
        PseudoFreeComplex(C2, {0: [1], 1: [0]}, {1: RatMatrix(1, 1, [[1]])})


def test_derived_pushforward_examples():
    F = rep_from_seed(7)
    assert hom(derived_pushforward(MonotoneMap.identity(F.base), F)) == hom(F)
    pt = derived_pushforward(MonotoneMap.to_point(S1), constant(S1))
    assert homology(pt.stalks[0]) == {0: 1, 1: 1}
    tri = face_poset(standard_simplex(2))
    assert homology(derived_pushforward(MonotoneMap.to_point(tri), constant(tri)).stalks[0]) == {0: 1}


def test_twist_examples():
    F = constant(S1)
    triv = constant(S1)
    assert hom(twist_by_dualizing(F, 0, triv)) == hom(F)
    assert hom(twist_by_dualizing(F, 1, triv)) == hom(shift(F, 1))
    sign = two_chart_circle(-1)
    squared = tensor(sign, sign)
    assert all(m == {0: RatMatrix(1, 1, [[1]])} for m in squared.transitions.values())
    to_pt = MonotoneMap.to_point(sign.base)
    assert homology(derived_pushforward(to_pt, sign).stalks[0]) == {}
    assert homology(derived_pushforward(to_pt, squared).stalks[0]) == {0: 1, 1: 1}
    with pytest.raises(RepError):
        twist_by_dualizing(sign, 0, two_chart_circle(0))


def test_check_locally_constant_examples():
    one = Stratification.from_assignment(C2, FinPoset.point(), [0, 0])
    singles = Stratification(C2, C2, MonotoneMap.identity(C2))
    assert check_locally_constant(constant(C2), one)
    assert check_locally_constant(skyscraper(C2, 0), singles)
    assert not check_locally_constant(skyscraper(C2, 0), one)


def test_invalid_representations_rejected():
    one = ChainComplex.concentrated(1, 0)
    sq = FinPoset.from_covers(["b", "x", "y", "t"], [("b", "x"), ("b", "y"), ("x", "t"), ("y", "t")])
    trans = {c: {0: RatMatrix(1, 1, [[1]])} for c in sq.covers()}
    trans[(sq.index("x"), sq.index("t"))] = {0: RatMatrix(1, 1, [[2]])}
    with pytest.raises(RepError):
        PosetRep(sq, [one] * 4, trans)
    two = ChainComplex({0: 1, 1: 1}, {1: RatMatrix(1, 1, [[1]])})
    with pytest.raises(RepError):
        PosetRep(C2, [two, two], {(0, 1): {0: RatMatrix(1, 1, [[1]]), 1: RatMatrix(1, 1, [[2]])}})


# properties ---------------------------------------------------------------


@given(seeds)
def test_resolution_is_sound(seed):
    F = rep_from_seed(seed)
    C = pseudo_free_resolve(F)
    assert hom(realize(C)) == hom(F)
    assert resolution_length(F, C) <= 2 * len(F.base)
    assert resolve(F).augmentation_morphism(F).is_quasi_isomorphism()


@given(seeds)
def test_resolution_independence(seed):
    rng = random.Random(seed)
    F = rep_from_seed(seed)
    Q = random_poset(rng, rng.randint(1, 4), prefix="q")
    f = random_monotone_map(rng, F.base, Q) or MonotoneMap.to_point(F.base)
    bar = bar_resolution(F)
    assert bar.augmentation_morphism(F).is_quasi_isomorphism()
    assert hom(derived_pushforward(f, F)) == hom(derived_pushforward(f, F, bar.complex))


@given(seeds)
def test_recollement_sequences_exact(seed):
    rng = random.Random(seed)
    F = rep_from_seed(seed)
    U = rng.choice(F.base.up_sets())
    assert recollement_triangle(F.base, U, F).holds()


@given(seeds)
def test_extend_by_zero_is_exact(seed):
    rng = random.Random(seed)
    F = rep_from_seed(seed)
    U = sorted(rng.choice(F.base.up_sets()))
    _, FU = restrict(F, U)
    G = extend_by_zero(F.base, U, FU)
    for p in F.base:
        assert homology(G.stalks[p]) == (homology(F.stalks[p]) if p in U else {})


@given(seeds)
def test_star_sections_are_stalks(seed):
    F = rep_from_seed(seed)
    for p in F.base:
        H = holim(F, F.base.up_closure([p]))
        assert is_quasi_isomorphism(coaugmentation(F, p, H), F.stalks[p], H.complex)


@settings(max_examples=15)
@given(seeds)
def test_projection_formula_and_base_change(seed):
    rng = random.Random(seed)
    P = random_poset(rng, rng.randint(1, 3), prefix="p")
    R = random_poset(rng, rng.randint(1, 3), prefix="r")
    PR = product(P, R)
    f = projection(P, R, PR)
    F, G = random_rep(rng, PR, max_gens=2), random_rep(rng, P, max_gens=2)
    assert hom(derived_pushforward(f, tensor(F, pullback(f, G)))) == hom(tensor(derived_pushforward(f, F), G))
    P2 = random_poset(rng, rng.randint(1, 3), prefix="q")
    g = random_monotone_map(rng, P2, P)
    if g is not None:
        P2R = product(P2, R)
        gid = MonotoneMap(P2R, PR, product_map(g, MonotoneMap.identity(R)).assignment)
        lhs = pullback(g, derived_pushforward(f, F))
        rhs = derived_pushforward(projection(P2, R, P2R), pullback(gid, F))
        assert hom(lhs) == hom(rhs)


@given(seeds)
def test_documents_round_trip(seed):
    F = rep_from_seed(seed)
    G = PosetRep.from_doc(F.to_doc())
    assert G.to_doc() == F.to_doc() and hom(G) == hom(F)
    C = pseudo_free_resolve(F)
    assert PseudoFreeComplex.from_doc(C.to_doc()).to_doc() == C.to_doc()


def test_zero_rep_resolves_to_nothing():
    assert pseudo_free_resolve(zero_rep(C2)).gens == {}

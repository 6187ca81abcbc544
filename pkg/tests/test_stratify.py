import random

import pytest
from hypothesis import given

from constructible.poset import FinPoset, MonotoneMap
from constructible.simplicial import face_poset, sphere
from constructible.stratify import (Stratification, StratificationError, cover_stratification, in_good_position,
                                    is_proper, is_union_of_strata, proper_refine, refine_stratification)

from conftest import poset_from_seed, seeds

LINE = FinPoset.from_covers(["z", "u-", "u+"], [("z", "u-"), ("z", "u+")])


def idx(P, *labels):
    return [P.index(x) for x in labels]


def shape(s: Stratification):
    """Stratum sizes and order, independent of stratum labels."""
    parts = sorted((sorted(map(str, s.space.labels(S))) for S in s.nonempty_strata().values()))
    of = {x: i for i, part in enumerate(parts) for x in part}
    rel = sorted((of[str(s.space.label(a))], of[str(s.space.label(b))])
                 for a, b in s.space.covers() if s.map(a) != s.map(b))
    return parts, rel


def test_cover_stratification_examples():
    s = cover_stratification(LINE, [idx(LINE, "u+")])
    assert s.to_doc()["map"] == {"u+": "{1}", "u-": "{}", "z": "{}"}
    assert set(cover_stratification(LINE, []).to_doc()["map"].values()) == {"{}"}
    C = FinPoset.chain(3)
    assert cover_stratification(C, [[1, 2], [2]]).to_doc()["map"] == {"0": "{}", "1": "{1}", "2": "{1,2}"}
    with pytest.raises(StratificationError):
        cover_stratification(C, [[0]])


def test_sign_stratification_is_not_proper():
    s = Stratification.from_assignment(LINE, FinPoset.chain(2), [0, 0, 1])  # z, u-, u+
    ok, witness = is_proper(s)
    assert not ok and s.strata_poset.label(witness) == "1"
    beta, psi = refine_stratification(s)
    assert is_proper(beta)[0] and len(beta.strata_poset) == 3
    assert psi.compose(beta.map).assignment == s.map.assignment


def test_is_proper_examples():
    S1 = face_poset(sphere(1))
    assert is_proper(Stratification(S1, S1, MonotoneMap.identity(S1))) == (True, None)
    gap = Stratification.from_assignment(FinPoset.chain(2), FinPoset.chain(3), [0, 2])
    assert is_proper(gap) == (False, 1)


def test_proper_refine_examples():
    s = proper_refine(LINE, [idx(LINE, "u+")])
    parts, rel = shape(s)
    assert parts == [["u+"], ["u-"], ["z"]]
    z = parts.index(["z"])
    assert sorted(rel) == sorted([(z, parts.index(["u+"])), (z, parts.index(["u-"]))])
    assert is_proper(s)[0]
    empty = proper_refine(LINE, [])
    assert is_proper(empty)[0] and len(empty.nonempty_strata()) == 1
    assert shape(proper_refine(LINE, [[0, 1, 2]])) == shape(empty)
    with pytest.raises(StratificationError):
        proper_refine(FinPoset.from_covers(["a", "b", "c"], [("a", "b"), ("b", "c")]), [[0, 2]])


def test_refine_of_proper_input_keeps_structure():
    S1 = face_poset(sphere(1))
    s = Stratification(S1, S1, MonotoneMap.identity(S1))
    beta, _ = refine_stratification(s)
    assert shape(beta) == shape(s)


def test_constant_stratification_refines_to_proper():
    D = FinPoset.discrete(["a", "b"])
    s = Stratification.from_assignment(D, FinPoset.point(), [0, 0])
    beta, psi = refine_stratification(s)
    assert is_proper(beta)[0]
    assert psi.compose(beta.map).assignment == s.map.assignment


def test_good_position_examples():
    C = FinPoset.chain(3)
    assert in_good_position(C, [0, 1, 2], [[1, 2], [0]])
    assert in_good_position(FinPoset.chain(2), [1], [[1]])
    assert not in_good_position(C, [2], [[1, 2]])


def random_theta(rng, P):
    theta = []
    for _ in range(rng.randint(0, 4)):
        a, b = rng.randrange(len(P)), rng.randrange(len(P))
        S = P.up_closure([a]) & P.down_closure([b])
        if S:
            theta.append(S)
    return theta


@given(seeds)
def test_proper_refine_postconditions(seed):
    P = poset_from_seed(seed, max_n=10)
    theta = random_theta(random.Random(seed), P)
    s = proper_refine(P, theta)
    assert is_proper(s)[0]
    assert all(is_union_of_strata(s, S) for S in theta)


@given(seeds)
def test_refine_stratification_factors(seed):
    rng = random.Random(seed)
    P = poset_from_seed(seed, max_n=8)
    opens = [P.up_closure([rng.randrange(len(P))]) for _ in range(rng.randint(0, 3))]
    s = cover_stratification(P, opens)
    assert all(is_union_of_strata(s, U) for U in opens)
    beta, psi = refine_stratification(s)
    assert is_proper(beta)[0]
    assert psi.compose(beta.map).assignment == s.map.assignment
    # psi is monotone (checked by MonotoneMap) and goes to the input's strata poset
    assert psi.target == s.strata_poset


@given(seeds)
def test_stratification_doc_round_trip(seed):
    P = poset_from_seed(seed)
    s = proper_refine(P, random_theta(random.Random(seed), P))
    t = Stratification.from_doc(s.to_doc())
    assert t.to_doc() == s.to_doc()

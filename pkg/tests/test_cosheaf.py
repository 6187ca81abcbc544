import copy
import random
from fractions import Fraction

import pytest
from hypothesis import given

from constructible.acceptance import random_combinatorial_map
from constructible.cosheaf import (ClosedImageCertificate, CombinatorialMap, CosheafError, _strata,
                                   certify_closed_image, global_sections_homology_presentation,
                                   presentation_from_resolution, star_sections_homology, verify_certificate)
from constructible.exactlin import RatMatrix, homology
from constructible.poset import FinPoset
from constructible.simplicial import face_poset, sphere, standard_simplex
from constructible.shv import PseudoFreeComplex, constant, pseudo_free_resolve, skyscraper, star_sheaf

from conftest import rep_from_seed, seeds

C2 = FinPoset.chain(2)
EDGE = face_poset(standard_simplex(1))


def edge_map() -> CombinatorialMap:
    pres = global_sections_homology_presentation(constant(EDGE))
    return pres.d(1)


def labels(P, sets):
    return [sorted(map(str, P.labels(S))) for S in sets]


def test_presentation_examples():
    single = presentation_from_resolution(PseudoFreeComplex(C2, {0: [1]}, {}))
    assert labels(C2, single.terms[0]) == [["1"]] and not single.maps
    sky = global_sections_homology_presentation(skyscraper(C2, 0))
    m = sky.d(1)
    assert labels(C2, m.sources) == [["1"]] and labels(C2, m.targets) == [["0", "1"]]
    assert m.matrix == RatMatrix(1, 1, [[1]])
    e = edge_map()
    assert labels(EDGE, e.sources) == [["ab"]]
    assert labels(EDGE, e.targets) == [["a", "ab"], ["ab", "b"]]
    assert e.matrix == RatMatrix(2, 1, [[1], [-1]])
    assert len(global_sections_homology_presentation(star_sheaf(C2, 0)).terms[0]) == 1


def test_circle_presentation_has_one_slot_per_vertex_and_edge():
    S1 = face_poset(sphere(1))
    pres = global_sections_homology_presentation(constant(S1))
    assert {k: len(v) for k, v in pres.terms.items()} == {0: 3, 1: 3}


def test_support_condition_rejected():
    with pytest.raises(CosheafError):
        CombinatorialMap(C2, [[0, 1]], [[1]], RatMatrix(1, 1, [[1]]))
    with pytest.raises(CosheafError):
        CombinatorialMap(C2, [[0]], [[0, 1]], RatMatrix(1, 1, [[1]]))  # {0} is not open
    bad = CombinatorialMap(C2, [[0, 1]], [[1]], RatMatrix(1, 1, [[1]]), check=False)
    with pytest.raises(CosheafError):
        certify_closed_image(bad)
    assert not verify_certificate(bad, ClosedImageCertificate())


def test_certificate_examples():
    P = FinPoset.point()
    m = CombinatorialMap(P, [[0]], [[0]], RatMatrix(1, 1, [[2]]))
    c = certify_closed_image(m)
    assert len(c.steps) == 1 and c.steps[0].Nbar == RatMatrix(1, 1, [[Fraction(1, 2)]])
    z = CombinatorialMap(C2, [[1], [0, 1]], [[0, 1]], RatMatrix(1, 2))
    cz = certify_closed_image(z)
    assert verify_certificate(z, cz)
    assert all(st.Nbar.is_zero() and st.Mbar.is_zero() for st in cz.steps)
    e = edge_map()
    ce = certify_closed_image(e)
    assert [sorted(map(str, EDGE.labels(st.stratum))) for st in ce.steps] == [["a"], ["b"], ["ab"]]
    assert all(st.Mbar @ st.Nbar @ st.Mbar == st.Mbar for st in ce.steps)
    assert verify_certificate(e, ce)


def test_corrupted_pseudo_inverse_is_located():
    e = edge_map()
    c = certify_closed_image(e)
    bad = copy.deepcopy(c)
    bad.steps[2].Nbar = RatMatrix(1, 2, [[1, 1]])
    v = verify_certificate(e, bad)
    assert not v and v.step == 2 and "Mbar Nbar Mbar" in v.reason


def test_misordered_steps_rejected():
    e = edge_map()
    c = certify_closed_image(e)
    bad = ClosedImageCertificate([c.steps[2], c.steps[0], c.steps[1]])
    v = verify_certificate(e, bad)
    assert not v and v.step == 0 and "closed" in v.reason


def test_incomplete_and_wrong_submatrix_rejected():
    e = edge_map()
    c = certify_closed_image(e)
    short = ClosedImageCertificate(c.steps[:2])
    assert verify_certificate(e, short).step == 2
    bad = copy.deepcopy(c)
    bad.steps[2].Mbar = RatMatrix(2, 1, [[1], [1]])
    bad.steps[2].Nbar = RatMatrix(1, 2, [[Fraction(1, 2), Fraction(1, 2)]])
    assert "submatrix" in verify_certificate(e, bad).reason


def test_certificate_document_round_trip():
    e = edge_map()
    c = certify_closed_image(e)
    doc = c.to_doc(e.space)
    c2 = ClosedImageCertificate.from_doc(doc, e.space)
    assert c2.to_doc(e.space) == doc and verify_certificate(e, c2)
    assert CombinatorialMap.from_doc(e.to_doc()).to_doc() == e.to_doc()


@given(seeds)
def test_random_maps_certify(seed):
    m = random_combinatorial_map(random.Random(seed))
    c = certify_closed_image(m)
    assert verify_certificate(m, c)
    nstrata = len(_strata(frozenset(range(len(m.space))), list(m.sources) + list(m.targets)))
    assert len(c.steps) <= nstrata


@given(seeds)
def test_presentations_satisfy_support_and_certify(seed):
    F = rep_from_seed(seed)
    pres = presentation_from_resolution(pseudo_free_resolve(F))
    for m in pres.maps.values():
        assert m.support_violation() is None
        assert verify_certificate(m, certify_closed_image(m))


@given(seeds)
def test_substitution_matches_star_sections(seed):
    F = rep_from_seed(seed)
    pres = global_sections_homology_presentation(F)
    got = {k: v for k, v in homology(pres.substitute()).items() if v}
    assert got == star_sections_homology(F)

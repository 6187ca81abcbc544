import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from constructible.acceptance import derham_families
from constructible.derham import (DerhamError, GridFunction, GridRegion, betti_crosscheck, betti_crosscheck_family,
                                  combinatorial_h0, combinatorial_h0_family, convex_hull_of_section,
                                  fiber_derivative, fiber_integrate, integration_section, poincare_homotopy,
                                  verify_region)

FULL = GridRegion()
UNIT = GridRegion.from_predicate(lambda y, t: np.abs(t) < 1)


def gauss(y, t):
    return np.exp(-t * t)


def test_default_grid():
    assert FULL.h == pytest.approx(5e-3) and FULL.ts[(FULL.n - 1) // 2] == 0.0


def test_fiber_derivative_examples():
    assert fiber_derivative(GridFunction(FULL, np.zeros((1, FULL.n)))).sup() == 0
    f = GridFunction.sample(FULL, gauss)
    want = -2 * FULL.ts * np.exp(-FULL.ts ** 2)
    assert np.max(np.abs(fiber_derivative(f).values[0] - want)) <= 1e-6


def test_decay_proxy_rejects_non_decaying_functions():
    with pytest.raises(DerhamError, match="decay proxy"):
        GridFunction.sample(UNIT, lambda y, t: np.ones_like(t))


def test_fiber_integrate_examples():
    f = GridFunction.sample(FULL, gauss)
    assert abs(fiber_integrate(f).values[0] - math.sqrt(math.pi)) <= 1e-8
    assert abs(fiber_integrate(fiber_derivative(f)).values[0]) <= 1e-8
    assert fiber_integrate(GridFunction(FULL, np.zeros((1, FULL.n)))).sup() == 0


def test_poincare_homotopy_examples():
    f = GridFunction.sample(FULL, lambda y, t: t * np.exp(-t * t))
    H = poincare_homotopy(f)
    assert np.max(np.abs(H.values[0] + 0.5 * np.exp(-FULL.ts ** 2))) <= 1e-6
    assert poincare_homotopy(GridFunction(FULL, np.zeros((1, FULL.n)))).sup() == 0
    g = GridFunction.sample(FULL, gauss)
    assert np.max(np.abs(poincare_homotopy(fiber_derivative(g)).values - g.values)) <= 1e-6


def test_poincare_homotopy_rejects_kernel_violation():
    with pytest.raises(DerhamError, match="kernel"):
        poincare_homotopy(GridFunction.sample(FULL, gauss))


def test_kernel_condition_is_per_component():
    # integrates to zero overall but not on each of the two components
    two = GridRegion.from_predicate(lambda y, t: np.abs(np.abs(t) - 3) < 2)
    f = GridFunction.sample(two, lambda y, t: np.sign(t) * np.exp(-16 * (np.abs(t) - 3) ** 2))
    assert abs(fiber_integrate(f).values[0]) < 1e-12
    with pytest.raises(DerhamError, match="component"):
        poincare_homotopy(f)


def test_integration_section_examples():
    assert integration_section([0.0], UNIT).sup() == 0
    s = integration_section([1.0], UNIT)
    assert s.edge_values() <= 1e-12
    assert abs(fiber_integrate(s).values[0] - 1.0) <= 1e-8
    empty = GridRegion(mask=np.zeros((1, FULL.n), dtype=bool))
    with pytest.raises(DerhamError, match="empty fiber"):
        integration_section([1.0], empty)


def test_convex_hull_examples():
    strip = lambda y, t: np.abs(t) < 2 + 0 * y
    R = convex_hull_of_section(strip, 0.5, base=(-0.5, 0.5))
    assert np.array_equal(R.mask, GridRegion.from_predicate(strip, base=(-0.5, 0.5)).mask)
    full = convex_hull_of_section(lambda y, t: np.ones_like(t + y, dtype=bool), 0.0, base=(-0.5, 0.5))
    assert full.mask.all()
    cut = convex_hull_of_section(lambda y, t: ~((t == 0) & (y > 0)), 1.0, base=(-0.5, 0.5))
    want = GridRegion.from_predicate(lambda y, t: (y <= 0) | (t > 0), base=(-0.5, 0.5))
    assert np.array_equal(cut.mask, want.mask)
    with pytest.raises(DerhamError, match="leaves U"):
        convex_hull_of_section(lambda y, t: np.abs(t) < 1 + 0 * y, 3.0)


def test_betti_crosscheck_examples():
    assert betti_crosscheck(UNIT) == combinatorial_h0(UNIT) == 1
    two = GridRegion.from_predicate(lambda y, t: (np.abs(t) < 2) & (t != 0))
    assert betti_crosscheck(two) == combinatorial_h0(two) == 2
    empty = GridRegion(mask=np.zeros((1, FULL.n), dtype=bool))
    assert betti_crosscheck(empty) == combinatorial_h0(empty) == 0
    with pytest.raises(DerhamError):
        betti_crosscheck(GridRegion(base=(0.0, 1.0)))


def test_fiber_splitting_family():
    split = dict(derham_families())["fiber splitting"]
    numeric = betti_crosscheck_family(split)
    assert numeric == combinatorial_h0_family(split)
    assert numeric == [1 if y <= 0 else 2 for y in split.ys]


def test_region_document_round_trip_and_errors():
    split = dict(derham_families())["fiber splitting"]
    again = GridRegion.from_doc(split.to_doc())
    assert np.array_equal(again.mask, split.mask) and again.to_doc() == split.to_doc()
    bad = split.to_doc()
    bad["mask"][0] = [[4000, 5]]
    with pytest.raises(DerhamError, match="outside the fiber window"):
        GridRegion.from_doc(bad)
    with pytest.raises(DerhamError, match="odd"):
        GridRegion(n=4000)


@pytest.mark.parametrize("name,region", derham_families(), ids=[n for n, _ in derham_families()])
def test_verify_region_on_families(name, region):
    report = verify_region(region)
    assert len(report["checks"]) == 4
    assert all(c["pass"] for c in report["checks"]), report


@settings(max_examples=25)
@given(st.floats(-3, 3), st.floats(0.4, 1.5), st.floats(0.5, 2.0))
def test_poincare_identities_on_gaussians(center, width, amp):
    g = GridFunction.sample(FULL, lambda y, t: amp * np.exp(-((t - center) / width) ** 2))
    dg = fiber_derivative(g)
    assert abs(fiber_integrate(dg).values[0]) <= 1e-8
    assert np.max(np.abs(poincare_homotopy(dg).values - g.values)) <= 1e-6
    H = poincare_homotopy(dg)
    assert np.max(np.abs(fiber_derivative(H).values - dg.values)) <= 1e-6


@settings(max_examples=25)
@given(st.lists(st.tuples(st.integers(0, 3999), st.integers(1, 400)), max_size=5))
def test_betti_crosscheck_counts_components(runs):
    mask = np.zeros((1, FULL.n), dtype=bool)
    for a, length in runs:
        mask[0, a:a + length] = True
    R = GridRegion(mask=mask)
    assert betti_crosscheck(R) == len(R.runs(0)) == combinatorial_h0(R)

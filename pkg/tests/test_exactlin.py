from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from constructible.exactlin import (ChainComplex, InvariantError, RatMatrix, cone, homology, homology_dims,
                                    identity_map, is_quasi_isomorphism, rank_factorize, right_pseudo_inverse, rref,
                                    solve, tensor_complex)

small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def matrices(draw, max_dim=5):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    rows = draw(st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r))
    return RatMatrix(r, c, rows)


def np_rank(m: RatMatrix) -> int:
    if not m.rows or not m.cols:
        return 0
    return int(np.linalg.matrix_rank(np.array([[float(x) for x in row] for row in m.tolist()])))


def test_rank_factorize_examples():
    C, R = rank_factorize(RatMatrix(2, 2))
    assert C.shape == (2, 0) and R.shape == (0, 2)
    C, R = rank_factorize(RatMatrix.identity(3))
    assert (C @ R) == RatMatrix.identity(3) and C.rank() == 3
    C, R = rank_factorize(RatMatrix(2, 2, [[1, 2], [2, 4]]))
    assert C == RatMatrix(2, 1, [[1], [2]]) and R == RatMatrix(1, 2, [[1, 2]])


def test_pseudo_inverse_examples():
    assert right_pseudo_inverse(RatMatrix(1, 1, [[2]])) == RatMatrix(1, 1, [[Fraction(1, 2)]])
    assert right_pseudo_inverse(RatMatrix(2, 3)).is_zero()
    M = RatMatrix(2, 2, [[1, 0], [0, 0]])
    N = right_pseudo_inverse(M)
    assert M @ N @ M == M


@given(matrices())
def test_rank_matches_float_oracle(m):
    assert m.rank() == np_rank(m)


@given(matrices())
def test_rank_factorization_reconstructs(m):
    C, R = rank_factorize(m)
    assert C @ R == m
    assert C.cols == R.rows == m.rank()


@given(matrices())
def test_pseudo_inverse_identity(m):
    N = right_pseudo_inverse(m)
    assert N.shape == (m.cols, m.rows)
    assert m @ N @ m == m


@given(matrices())
def test_rref_pivots_and_kernel(m):
    E, piv = rref(m)
    assert len(piv) == m.rank()
    for v in m.kernel_basis():
        assert all(x == 0 for x in m.apply(v))
    assert len(m.kernel_basis()) == m.cols - m.rank()


@given(matrices(), st.lists(small_ints, min_size=5, max_size=5))
def test_solve_consistent_systems(m, x):
    x = x[:m.cols]
    b = m.apply(x)
    y = solve(m, b)
    assert y is not None and m.apply(y) == b


def test_homology_examples():
    assert homology_dims(ChainComplex.zero()) == []
    acyclic = ChainComplex({0: 1, 1: 1}, {1: RatMatrix.identity(1)})
    assert homology_dims(acyclic, 0, 1) == [0, 0]
    # simplicial boundary of the triangle boundary: edges ab, ac, bc over vertices a, b, c
    d1 = RatMatrix(3, 3, [[-1, -1, 0], [1, 0, -1], [0, 1, 1]])
    assert homology_dims(ChainComplex({0: 3, 1: 3}, {1: d1})) == [1, 1]


def test_dd_nonzero_rejected():
    with pytest.raises(InvariantError):
        ChainComplex({0: 1, 1: 1, 2: 1}, {1: RatMatrix.identity(1), 2: RatMatrix.identity(1)})


def test_tensor_examples():
    unit = ChainComplex.concentrated(1, 0)
    X = ChainComplex({0: 2, 1: 1}, {1: RatMatrix(2, 1, [[1], [0]])})
    assert homology(tensor_complex(X, unit)) == homology(X)
    assert homology(tensor_complex(unit, ChainComplex.concentrated(1, 1))) == {1: 1}
    zero_map = ChainComplex({0: 1, 1: 1}, {1: RatMatrix(1, 1)})
    assert homology_dims(tensor_complex(zero_map, zero_map)) == [1, 2, 1]


@st.composite
def complexes(draw):
    """Random two- or three-term complexes built as d2 = 0-composable products."""
    a, b, c = (draw(st.integers(0, 3)) for _ in range(3))
    d1 = draw(matrices_shape(a, b))
    # choose d2 inside the kernel of d1
    K = d1.kernel_basis()
    coeffs = draw(st.lists(st.lists(small_ints, min_size=len(K), max_size=len(K)), min_size=c, max_size=c))
    cols = [[sum((co * v[i] for co, v in zip(cs, K)), Fraction(0)) for i in range(b)] for cs in coeffs]
    d2 = RatMatrix.from_columns(cols, b) if c else RatMatrix(b, 0)
    return ChainComplex({0: a, 1: b, 2: c}, {1: d1, 2: d2})


@st.composite
def matrices_shape(draw, r, c):
    rows = draw(st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r))
    return RatMatrix(r, c, rows)


@given(complexes())
def test_euler_characteristic(X):
    chi_h = sum((-1) ** k * h for k, h in homology(X).items())
    assert X.euler_characteristic() == chi_h


@given(complexes(), st.randoms(use_true_random=False))
def test_homology_invariant_under_basis_change(X, rnd):
    def inv(n):
        while True:
            m = RatMatrix(n, n, [[rnd.randint(-2, 2) for _ in range(n)] for _ in range(n)])
            if m.rank() == n:
                return m
    M = {k: inv(X.dim(k)) for k in (0, 1, 2)}
    diffs = {k: M[k - 1] @ X.d(k) @ M[k].inverse() for k in (1, 2)}
    dims = {k: X.dim(k) for k in (0, 1, 2)}
    assert homology(ChainComplex(dims, diffs)) == homology(X)


@given(complexes())
def test_cone_of_identity_is_acyclic(X):
    assert sum(homology(cone(identity_map(X), X, X)).values()) == 0
    assert is_quasi_isomorphism(identity_map(X), X, X)

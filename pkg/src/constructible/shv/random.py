"""Seeded random posets and representations for property tests and the self-test."""

from __future__ import annotations

import random as _random

from ..exactlin import ChainComplex, RatMatrix, right_pseudo_inverse
from ..poset import FinPoset
from .rep import PosetRep, PseudoFreeComplex, direct_sum_reps, indicator, realize


def random_poset(rng: _random.Random, n: int, edge_prob: float = 0.35, prefix: str = "p") -> FinPoset:
    """Random order on n elements: i < j (i < j as integers) with probability edge_prob, then closed."""
    rel = [(f"{prefix}{i}", f"{prefix}{j}") for i in range(n) for j in range(i + 1, n) if rng.random() < edge_prob]
    return FinPoset([f"{prefix}{i}" for i in range(n)], relations=rel)


def _small(rng: _random.Random) -> int:
    return rng.choice([-2, -1, -1, 1, 1, 2, 3])


def random_pseudo_free(rng: _random.Random, P: FinPoset, max_gens: int = 3, degree: int = 0
                       ) -> PseudoFreeComplex:
    """Two-term complex P_{degree+1} -> P_degree with random supported entries."""
    g0 = [rng.randrange(len(P)) for _ in range(rng.randint(1, max_gens))]
    g1 = [rng.randrange(len(P)) for _ in range(rng.randint(1, max_gens))]
    rows = [[(_small(rng) if P.le(h, g) and rng.random() < 0.7 else 0) for g in g1] for h in g0]
    d = RatMatrix(len(g0), len(g1), rows) if g0 and g1 else RatMatrix(len(g0), len(g1))
    return PseudoFreeComplex(P, {degree: g0, degree + 1: g1}, {degree + 1: d})


def _left_kernel(m: RatMatrix) -> RatMatrix:
    rows = m.T.kernel_basis()
    return RatMatrix(len(rows), m.rows, rows) if rows else RatMatrix(0, m.rows)


def cokernel_module(C: PseudoFreeComplex, degree: int = 0) -> PosetRep:
    """Stalkwise cokernel of the top differential into ``degree``, as a module in that degree."""
    R = realize(C)
    P = C.base
    L, S = [], []
    for x in P:
        X = R.stalks[x]
        Lx = _left_kernel(X.d(degree + 1))
        L.append(Lx)
        S.append(right_pseudo_inverse(Lx) if Lx.rows else RatMatrix(X.dim(degree), 0))
    stalks = [ChainComplex.concentrated(L[x].rows, degree) for x in P]
    trans = {}
    for x, y in P.covers():
        T = R.cover_map(x, y).get(degree)
        if T is None or not L[x].rows or not L[y].rows:
            continue
        trans[(x, y)] = {degree: L[y] @ T @ S[x]}
    return PosetRep(P, stalks, trans)


def _random_invertible(rng: _random.Random, n: int) -> RatMatrix:
    while True:
        m = RatMatrix(n, n, [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
        if m.rank() == n:
            return m


def change_basis(rng: _random.Random, F: PosetRep) -> PosetRep:
    """Conjugate every stalk by random invertible matrices (an isomorphic representation)."""
    P = F.base
    M = [{k: _random_invertible(rng, n) for k, n in X.dims.items()} for X in F.stalks]
    Minv = [{k: m.inverse() for k, m in Mp.items()} for Mp in M]
    stalks = []
    for p, X in enumerate(F.stalks):
        diffs = {k: M[p][k - 1] @ d @ Minv[p][k] for k, d in X.diffs.items()}
        stalks.append(ChainComplex(X.dims, diffs))
    trans = {}
    for (p, q), f in F.transitions.items():
        trans[(p, q)] = {k: M[q][k] @ m @ Minv[p][k] for k, m in f.items()}
    return PosetRep(P, stalks, trans)


def random_locally_closed(rng: _random.Random, P: FinPoset) -> frozenset[int]:
    """Intersection of a random up-set and a random down-set (non-empty)."""
    while True:
        U = P.up_closure(rng.sample(range(len(P)), rng.randint(1, min(2, len(P)))))
        Z = P.down_closure(rng.sample(range(len(P)), rng.randint(1, min(2, len(P)))))
        if U & Z:
            return U & Z


def random_rep(rng: _random.Random, P: FinPoset, max_gens: int = 3) -> PosetRep:
    """A realized two-term pseudo-free complex, a cokernel module, or a sum of interval modules,
    presented in a random basis."""
    degree = rng.choice([0, 0, 1])
    kind = rng.randrange(3)
    if kind == 2:
        pieces = [indicator(P, random_locally_closed(rng, P), degree + rng.choice([0, 0, 1]))
                  for _ in range(rng.randint(1, max_gens))]
        F = direct_sum_reps(pieces)
    else:
        C = random_pseudo_free(rng, P, max_gens, degree)
        F = realize(C) if kind == 0 else cokernel_module(C, degree)
    return change_basis(rng, F)

"""
Sections over open sets as homotopy limits, and the pushforwards built
from them (j_* for an open inclusion, i_* for a closed one).

Sections of F over a subset U are modelled by the cochain complex of
chains σ = (p_0 < ... < p_n) in U with values in F(p_n), placed in
total degree k - n for a value of stalk degree k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..exactlin import ChainComplex, RatMatrix, chain_map_component
from ..poset import FinPoset
from .rep import PosetRep, RepError, RepMorphism, restrict


@dataclass
class HolimComplex:
    """Total complex plus the block layout needed to write maps into and out of it."""

    complex: ChainComplex
    chains: list[tuple[int, ...]]
    # total degree -> list of (chain position, stalk degree, offset)
    layout: dict[int, list[tuple[int, int, int]]]

    def __post_init__(self):
        self._where = {c: i for i, c in enumerate(self.chains)}
        self._blocks = {}
        for n, blocks in self.layout.items():
            for c, k, off in blocks:
                self._blocks[(c, k)] = (n, off)

    def offset(self, chain: tuple[int, ...], k: int) -> tuple[int, int] | None:
        """(total degree, offset) of the block for ``chain`` in stalk degree k."""
        pos = self._where.get(chain)
        return None if pos is None else self._blocks.get((pos, k))


def _sparse(rows: int, cols: int, entries: dict[tuple[int, int], object]) -> RatMatrix:
    data = [[0] * cols for _ in range(rows)]
    for (i, j), x in entries.items():
        data[i][j] = x
    return RatMatrix(rows, cols, data)


def holim(F: PosetRep, U: Iterable[int]) -> HolimComplex:
    P = F.base
    chains = P.chains(U)
    layout: dict[int, list[tuple[int, int, int]]] = {}
    sizes: dict[int, int] = {}
    for pos, ch in enumerate(chains):
        n = len(ch) - 1
        X = F.stalks[ch[-1]]
        for k in sorted(X.dims):
            t = k - n
            layout.setdefault(t, []).append((pos, k, sizes.get(t, 0)))
            sizes[t] = sizes.get(t, 0) + X.dim(k)
    H = HolimComplex(ChainComplex({}), chains, layout)
    entries: dict[int, dict[tuple[int, int], object]] = {t: {} for t in sizes}

    def put(t, r0, c0, m: RatMatrix, sign=1):
        e = entries[t]
        for i, row in enumerate(m.data):
            for j, x in enumerate(row):
                if x:
                    key = (r0 + i, c0 + j)
                    e[key] = e.get(key, 0) + (x if sign == 1 else -x)

    where = H._where
    for pos, ch in enumerate(chains):
        n = len(ch) - 1
        X = F.stalks[ch[-1]]
        for k in X.dims:
            t, c0 = H._blocks[(pos, k)]
            if t - 1 not in sizes:
                continue
            # internal differential, sign (-1)^n
            if X.dim(k - 1):
                _, r0 = H._blocks[(pos, k - 1)]
                put(t, r0, c0, X.d(k), -1 if n % 2 else 1)
    # coboundary: (δc)(τ) = Σ_i (-1)^i c(τ minus τ_i), the last face pushed along T
    for pos_tau, tau in enumerate(chains):
        m = len(tau) - 1
        if m == 0:
            continue
        top = tau[-1]
        Y = F.stalks[top]
        for i in range(m + 1):
            face = tau[:i] + tau[i + 1:]
            pos = where[face]
            sign = -1 if i % 2 else 1
            if i == m:
                T = F.transition(face[-1], top)
                src = F.stalks[face[-1]]
            else:
                T = None
                src = Y
            for k in src.dims:
                if not Y.dim(k):
                    continue
                t, c0 = H._blocks[(pos, k)]
                _, r0 = H._blocks[(pos_tau, k)]
                mat = chain_map_component(T, src, Y, k) if T is not None else RatMatrix.identity(Y.dim(k))
                put(t, r0, c0, mat, sign)
    diffs = {t: _sparse(sizes[t - 1], sizes[t], e) for t, e in entries.items() if t - 1 in sizes and e}
    H.complex = ChainComplex(sizes, diffs)
    return H


def evaluate(F: PosetRep, U: Iterable[int]) -> ChainComplex:
    """Derived sections of F over the open set U."""
    U = frozenset(U)
    if not F.base.is_up_set(U):
        raise RepError(f"{F.base.labels(U)} is not open")
    return holim(F, U).complex


def restriction_map(F: PosetRep, big: HolimComplex, small: HolimComplex) -> dict[int, RatMatrix]:
    """Projection onto chains lying in the smaller set; a chain map."""
    out = {}
    for t, n_small in small.complex.dims.items():
        n_big = big.complex.dim(t)
        entries = {}
        for pos, k, off in small.layout[t]:
            ch = small.chains[pos]
            tt, boff = big.offset(ch, k)
            for a in range(F.stalks[ch[-1]].dim(k)):
                entries[(off + a, boff + a)] = 1
        out[t] = _sparse(n_small, n_big, entries)
    return out


def coaugmentation(F: PosetRep, p: int, H: HolimComplex) -> dict[int, RatMatrix]:
    """F(p) -> holim over a set above p: x ↦ (T_{p→q} x) on each 0-chain (q)."""
    X = F.stalks[p]
    out = {}
    for t in H.complex.dims:
        if not X.dim(t):
            continue
        entries = {}
        for pos, k, off in H.layout[t]:
            ch = H.chains[pos]
            if len(ch) != 1:
                continue
            T = chain_map_component(F.transition(p, ch[0]), X, F.stalks[ch[0]], k)
            for (i, row) in enumerate(T.data):
                for j, x in enumerate(row):
                    if x:
                        entries[(off + i, j)] = x
        out[t] = _sparse(H.complex.dim(t), X.dim(t), entries)
    return out


def point_projection(F: PosetRep, p: int, H: HolimComplex) -> dict[int, RatMatrix]:
    """holim -> F(p), reading off the 0-chain (p); p must lie in the indexing set."""
    X = F.stalks[p]
    out = {}
    for t, n in X.dims.items():
        if not H.complex.dim(t):
            continue
        _, off = H.offset((p,), t)
        out[t] = _sparse(n, H.complex.dim(t), {(a, off + a): 1 for a in range(n)})
    return out


@dataclass
class PushforwardData:
    rep: PosetRep
    holims: list[HolimComplex]


def _holim_pushforward(P: FinPoset, G: PosetRep, inside: Sequence[int]) -> PushforwardData:
    """Stalk at p: holim of G over p⋆ ∩ inside (G lives on the induced subposet)."""
    inside = sorted(inside)
    if list(G.base.elements) != [P.label(i) for i in inside]:
        raise RepError("representation base must be the induced subposet")
    local = {p: i for i, p in enumerate(inside)}
    hs = []
    for p in P:
        star = [local[q] for q in P.up_closure([p]) if q in local]
        hs.append(holim(G, star))
    trans = {(p, q): restriction_map(G, hs[p], hs[q]) for p, q in P.covers()}
    return PushforwardData(PosetRep(P, [h.complex for h in hs], trans, check=False), hs)


def open_pushforward(P: FinPoset, U: Iterable[int], G: PosetRep) -> PosetRep:
    """j_* for the inclusion of the up-set U."""
    U = sorted(U)
    if not P.is_up_set(U):
        raise RepError(f"{P.labels(U)} is not open")
    return _holim_pushforward(P, G, U).rep


def closed_pushforward(P: FinPoset, Z: Iterable[int], G: PosetRep) -> PosetRep:
    """i_* for the inclusion of the down-set Z; the stalk vanishes off Z."""
    Z = sorted(Z)
    if not P.is_down_set(Z):
        raise RepError(f"{P.labels(Z)} is not closed")
    return _holim_pushforward(P, G, Z).rep


def unit_to_pushforward(F: PosetRep, S: Iterable[int]) -> tuple[PosetRep, RepMorphism]:
    """F -> (inclusion)_* (inclusion)^* F for an open or closed subset S."""
    P = F.base
    S = sorted(S)
    _, G = restrict(F, S)
    data = _holim_pushforward(P, G, S)
    comps = []
    for p in P:
        H = data.holims[p]
        X = F.stalks[p]
        out = {}
        for t in H.complex.dims:
            if not X.dim(t):
                continue
            entries = {}
            for pos, k, off in H.layout[t]:
                ch = H.chains[pos]
                if len(ch) != 1:
                    continue
                q = S[ch[0]]
                T = chain_map_component(F.transition(p, q), X, F.stalks[q], k)
                for i, row in enumerate(T.data):
                    for j, x in enumerate(row):
                        if x:
                            entries[(off + i, j)] = x
            out[t] = _sparse(H.complex.dim(t), X.dim(t), entries)
        comps.append(out)
    return data.rep, RepMorphism(F, data.rep, comps, check=False)

"""
Poset representations (the combinatorial model of constructible sheaves)
and pseudo-free complexes.

A representation assigns a bounded complex to each element and a chain
map to each cover p ⋖ q.  The stalk at p stands for the sections over the
open star p⋆, so maps go up the order.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from ..exactlin import (ChainComplex, InvariantError, RatMatrix, chain_map_component, compose,
                        complex_from_doc, complex_to_doc, direct_sum, homology, identity_map,
                        is_chain_map, is_quasi_isomorphism, matrix_from_doc, matrix_to_doc, block_diag,
                        tensor_complex, tensor_map)
from ..poset import FinPoset, MonotoneMap, PosetError
from ..stratify import Stratification


class RepError(ValueError):
    pass


class PosetRep:
    """Covariant functor from a finite poset to bounded rational chain complexes."""

    def __init__(self, base: FinPoset, stalks: Sequence[ChainComplex],
                 transitions: Mapping[tuple[int, int], Mapping[int, RatMatrix]], check: bool = True):
        if len(stalks) != len(base):
            raise RepError("one stalk per element is required")
        self.base = base
        self.stalks = tuple(stalks)
        covers = set(base.covers())
        self.transitions: dict[tuple[int, int], dict[int, RatMatrix]] = {}
        for (p, q), f in transitions.items():
            if (p, q) not in covers:
                raise RepError(f"transition given for non-cover {base.label(p)!r} -> {base.label(q)!r}")
            self.transitions[(p, q)] = {k: m for k, m in f.items()
                                        if self.stalks[p].dim(k) and self.stalks[q].dim(k)}
        self._cache: dict[tuple[int, int], dict[int, RatMatrix]] = {}
        if check:
            self.validate()

    # structure ----------------------------------------------------------
    def cover_map(self, p: int, q: int) -> dict[int, RatMatrix]:
        f = self.transitions.get((p, q), {})
        X, Y = self.stalks[p], self.stalks[q]
        return {k: chain_map_component(f, X, Y, k) for k in X.dims if Y.dim(k)}

    def transition(self, p: int, q: int) -> dict[int, RatMatrix]:
        """The chain map stalk(p) -> stalk(q) for p <= q."""
        if (p, q) in self._cache:
            return self._cache[(p, q)]
        P = self.base
        if not P.le(p, q):
            raise RepError(f"{P.label(p)!r} is not below {P.label(q)!r}")
        if p == q:
            out = identity_map(self.stalks[p])
        else:
            r = next(r for r in P.upper_covers(p) if P.le(r, q))
            out = compose(self.transition(r, q), self.cover_map(p, r),
                          self.stalks[p], self.stalks[r], self.stalks[q])
        self._cache[(p, q)] = out
        return out

    def validate(self):
        P = self.base
        for (p, q) in P.covers():
            if not is_chain_map(self.cover_map(p, q), self.stalks[p], self.stalks[q]):
                raise RepError(f"transition {P.label(p)!r} -> {P.label(q)!r} is not a chain map")
        for p in P:
            for q in P:
                if not P.lt(p, q):
                    continue
                ways = [compose(self.transition(r, q), self.cover_map(p, r),
                                self.stalks[p], self.stalks[r], self.stalks[q])
                        for r in P.upper_covers(p) if P.le(r, q)]
                for w in ways[1:]:
                    for k in self.stalks[p].dims:
                        if chain_map_component(w, self.stalks[p], self.stalks[q], k) != \
                                chain_map_component(ways[0], self.stalks[p], self.stalks[q], k):
                            raise RepError(f"not functorial between {P.label(p)!r} and {P.label(q)!r}")

    def stalk(self, label) -> ChainComplex:
        return self.stalks[self.base.index(label)]

    def degree_range(self) -> tuple[int, int] | None:
        degs = [k for X in self.stalks for k in X.dims]
        return (min(degs), max(degs)) if degs else None

    def is_zero(self) -> bool:
        return all(X.is_zero() for X in self.stalks)

    def stalk_homology(self) -> list[dict[int, int]]:
        return [homology(X) for X in self.stalks]

    def __repr__(self):
        return f"PosetRep(base={list(self.base.elements)!r}, dims={[dict(sorted(X.dims.items())) for X in self.stalks]})"

    # documents ------------------------------------------------------------
    def to_doc(self) -> dict:
        P = self.base
        stalks = {str(P.label(p)): complex_to_doc(self.stalks[p]) for p in P}
        trans = {}
        for (p, q) in sorted(P.covers(), key=lambda e: (str(P.label(e[0])), str(P.label(e[1])))):
            f = self.cover_map(p, q)
            if f:
                trans[f"{P.label(p)}->{P.label(q)}"] = {str(k): matrix_to_doc(m) for k, m in sorted(f.items())}
        return {"base": P.to_doc(), "stalks": dict(sorted(stalks.items())), "transitions": trans}

    @classmethod
    def from_doc(cls, doc: Mapping) -> "PosetRep":
        try:
            P = FinPoset.from_doc(doc["base"])
            stalks = [complex_from_doc(doc["stalks"].get(str(e), {})) for e in P.elements]
            trans = {}
            for key, f in doc.get("transitions", {}).items():
                a, b = key.split("->")
                p, q = P.index(a.strip()), P.index(b.strip())
                trans[(p, q)] = {int(k): matrix_from_doc(m, stalks[q].dim(int(k)), stalks[p].dim(int(k)))
                                 for k, m in f.items()}
        except (KeyError, ValueError, AttributeError) as exc:
            raise RepError(f"malformed representation document: {exc}") from None
        return cls(P, stalks, trans)


class RepMorphism:
    """Natural chain map between two representations over the same base."""

    def __init__(self, source: PosetRep, target: PosetRep, components: Sequence[Mapping[int, RatMatrix]],
                 check: bool = True):
        if source.base != target.base:
            raise RepError("morphism between representations on different bases")
        self.source, self.target = source, target
        self.components = tuple(dict(c) for c in components)
        if check:
            self.validate()

    def at(self, p: int) -> dict[int, RatMatrix]:
        return self.components[p]

    def validate(self):
        S, T = self.source, self.target
        for p in S.base:
            if not is_chain_map(self.components[p], S.stalks[p], T.stalks[p]):
                raise RepError(f"component at {S.base.label(p)!r} is not a chain map")
        for p, q in S.base.covers():
            lhs = compose(T.cover_map(p, q), self.components[p], S.stalks[p], T.stalks[p], T.stalks[q])
            rhs = compose(self.components[q], S.cover_map(p, q), S.stalks[p], S.stalks[q], T.stalks[q])
            for k in S.stalks[p].dims:
                if chain_map_component(lhs, S.stalks[p], T.stalks[q], k) != \
                        chain_map_component(rhs, S.stalks[p], T.stalks[q], k):
                    raise RepError(f"morphism is not natural on {S.base.label(p)!r} -> {S.base.label(q)!r}")

    def is_quasi_isomorphism(self) -> bool:
        return all(is_quasi_isomorphism(self.components[p], self.source.stalks[p], self.target.stalks[p])
                   for p in self.source.base)


# constructors ---------------------------------------------------------------


def constant(P: FinPoset, dim: int = 1, degree: int = 0) -> PosetRep:
    X = ChainComplex.concentrated(dim, degree)
    return PosetRep(P, [X] * len(P), {c: {degree: RatMatrix.identity(dim)} for c in P.covers()}, check=False)


def zero_rep(P: FinPoset) -> PosetRep:
    return PosetRep(P, [ChainComplex.zero()] * len(P), {}, check=False)


def indicator(P: FinPoset, S: Iterable[int], degree: int = 0) -> PosetRep:
    """ℚ on a locally closed set S, identity maps inside S, zero elsewhere."""
    S = frozenset(S)
    if not P.is_locally_closed(S):
        raise RepError(f"{P.labels(S)} is not locally closed")
    one = ChainComplex.concentrated(1, degree)
    stalks = [one if p in S else ChainComplex.zero() for p in P]
    trans = {(p, q): {degree: RatMatrix.identity(1)} for p, q in P.covers() if p in S and q in S}
    return PosetRep(P, stalks, trans, check=False)


def open_indicator(P: FinPoset, U: Iterable[int], degree: int = 0) -> PosetRep:
    """ℝ_U for an up-set U."""
    U = frozenset(U)
    if not P.is_up_set(U):
        raise RepError(f"{P.labels(U)} is not open")
    return indicator(P, U, degree)


def star_sheaf(P: FinPoset, p: int, degree: int = 0) -> PosetRep:
    """ℝ_{p⋆}."""
    return indicator(P, P.up_closure([p]), degree)


def skyscraper(P: FinPoset, p: int, dim: int = 1, degree: int = 0) -> PosetRep:
    X = ChainComplex.concentrated(dim, degree)
    return PosetRep(P, [X if q == p else ChainComplex.zero() for q in P], {}, check=False)


def shift(F: PosetRep, n: int) -> PosetRep:
    stalks = [X.shift(n) for X in F.stalks]
    trans = {c: {k + n: m for k, m in f.items()} for c, f in F.transitions.items()}
    return PosetRep(F.base, stalks, trans, check=False)


def direct_sum_reps(Fs: Sequence[PosetRep]) -> PosetRep:
    P = Fs[0].base
    stalks = [direct_sum([F.stalks[p] for F in Fs]) for p in P]
    trans = {}
    for (p, q) in P.covers():
        f = {}
        for k in stalks[p].dims:
            if stalks[q].dim(k):
                f[k] = block_diag([chain_map_component(F.cover_map(p, q), F.stalks[p], F.stalks[q], k)
                                   for F in Fs])
        trans[(p, q)] = f
    return PosetRep(P, stalks, trans, check=False)


# pseudo-free complexes -------------------------------------------------------


class PseudoFreeComplex:
    """Bounded complex of sums of open-star sheaves ℝ_{p⋆}.

    ``gens[k]`` lists the generator elements in degree k.  ``diffs[k]`` has
    rows indexed by ``gens[k-1]`` and columns by ``gens[k]``; an entry may
    be non-zero only when the target generator lies below the source
    generator (source star inside target star).
    """

    def __init__(self, base: FinPoset, gens: Mapping[int, Sequence[int]],
                 diffs: Mapping[int, RatMatrix] | None = None, check: bool = True):
        self.base = base
        self.gens = {int(k): tuple(v) for k, v in gens.items() if len(v)}
        self.diffs = {}
        for k, d in (diffs or {}).items():
            want = (len(self.gens.get(k - 1, ())), len(self.gens.get(k, ())))
            if d.shape != want:
                raise RepError(f"differential d_{k} has shape {d.shape}, expected {want}")
            if want[0] and want[1] and not d.is_zero():
                self.diffs[k] = d
        if check:
            self.validate()

    def d(self, k: int) -> RatMatrix:
        m = self.diffs.get(k)
        return m if m is not None else RatMatrix(len(self.gens.get(k - 1, ())), len(self.gens.get(k, ())))

    def validate(self):
        P = self.base
        for k, d in self.diffs.items():
            src, tgt = self.gens[k], self.gens[k - 1]
            for i, h in enumerate(tgt):
                for j, g in enumerate(src):
                    if d[i, j] and not P.le(h, g):
                        raise RepError(f"support condition fails: {P.label(g)!r} -> {P.label(h)!r} in degree {k}")
            if (k - 1) in self.diffs and not (self.diffs[k - 1] @ d).is_zero():
                raise InvariantError(f"d_{k - 1} d_{k} != 0")

    @property
    def degrees(self) -> list[int]:
        return sorted(self.gens)

    def length(self) -> int:
        if not self.gens:
            return 0
        return max(self.gens) - min(self.gens)

    def num_generators(self) -> int:
        return sum(len(v) for v in self.gens.values())

    def push(self, f: MonotoneMap) -> "PseudoFreeComplex":
        """Relabel each generator p as f(p), keeping all matrices."""
        if f.source != self.base:
            raise RepError("map source differs from the complex base")
        return PseudoFreeComplex(f.target, {k: tuple(f(g) for g in v) for k, v in self.gens.items()},
                                 self.diffs, check=False)

    def to_doc(self) -> dict:
        P = self.base
        return {"base": P.to_doc(),
                "terms": {str(k): [str(P.label(g)) for g in v] for k, v in sorted(self.gens.items())},
                "differentials": {str(k): matrix_to_doc(d) for k, d in sorted(self.diffs.items())}}

    @classmethod
    def from_doc(cls, doc: Mapping, base: FinPoset | None = None) -> "PseudoFreeComplex":
        try:
            P = base or FinPoset.from_doc(doc["base"])
            gens = {int(k): tuple(P.index(str(x)) for x in v) for k, v in doc.get("terms", {}).items()}
            diffs = {int(k): matrix_from_doc(m, len(gens.get(int(k) - 1, ())), len(gens.get(int(k), ())))
                     for k, m in doc.get("differentials", {}).items()}
        except (KeyError, ValueError) as exc:
            raise RepError(f"malformed pseudo-free complex document: {exc}") from None
        return cls(P, gens, diffs)


def realize(C: PseudoFreeComplex) -> PosetRep:
    """Stalk at x: one coordinate per generator g <= x; transitions are coordinate inclusions."""
    P = C.base
    positions = {x: {k: [i for i, g in enumerate(v) if P.le(g, x)] for k, v in C.gens.items()} for x in P}
    stalks = []
    for x in P:
        pos = positions[x]
        dims = {k: len(v) for k, v in pos.items()}
        diffs = {k: C.d(k).submatrix(pos.get(k - 1, []), pos[k]) for k in pos if pos.get(k - 1)}
        stalks.append(ChainComplex(dims, diffs, check=False))
    trans = {}
    for (x, y) in P.covers():
        f = {}
        for k, src in positions[x].items():
            if not src:
                continue
            tgt = positions[y][k]
            where = {g: r for r, g in enumerate(tgt)}
            rows = [[0] * len(src) for _ in tgt]
            for c, g in enumerate(src):
                rows[where[g]][c] = 1
            f[k] = RatMatrix(len(tgt), len(src), rows)
        trans[(x, y)] = f
    return PosetRep(P, stalks, trans, check=False)


# six-operation fragment on the poset model ----------------------------------


def pullback(f: MonotoneMap, G: PosetRep) -> PosetRep:
    """Precomposition: stalk at p is G's stalk at f(p)."""
    if f.target != G.base:
        raise RepError("map target differs from the representation base")
    P = f.source
    stalks = [G.stalks[f(p)] for p in P]
    trans = {(p, q): G.transition(f(p), f(q)) for p, q in P.covers()}
    return PosetRep(P, stalks, trans, check=False)


def restrict(F: PosetRep, S: Iterable[int]) -> tuple[FinPoset, PosetRep]:
    """Restriction to an induced subposet (pullback along the inclusion)."""
    idx = sorted(S)
    Q = F.base.subposet(idx)
    incl = MonotoneMap(Q, F.base, tuple(idx))
    return Q, pullback(incl, F)


def extend_by_zero(P: FinPoset, U: Iterable[int], F: PosetRep) -> PosetRep:
    """j_! for the open inclusion of the up-set U; F lives on the induced subposet on U."""
    U = sorted(U)
    if not P.is_up_set(U):
        raise RepError(f"{P.labels(U)} is not open")
    if list(F.base.elements) != [P.label(i) for i in U]:
        raise RepError("representation base must be the induced subposet on U")
    local = {p: i for i, p in enumerate(U)}
    stalks = [F.stalks[local[p]] if p in local else ChainComplex.zero() for p in P]
    trans = {(p, q): F.transition(local[p], local[q]) for p, q in P.covers() if p in local and q in local}
    return PosetRep(P, stalks, trans, check=False)


def tensor(F: PosetRep, G: PosetRep) -> PosetRep:
    if F.base != G.base:
        raise RepError("tensor of representations on different bases")
    P = F.base
    stalks = [tensor_complex(F.stalks[p], G.stalks[p]) for p in P]
    trans = {(p, q): tensor_map(F.cover_map(p, q), G.cover_map(p, q), F.stalks[p], F.stalks[q],
                                G.stalks[p], G.stalks[q]) for p, q in P.covers()}
    return PosetRep(P, stalks, trans, check=False)


def twist_by_dualizing(F: PosetRep, n: int, orientation: PosetRep) -> PosetRep:
    """F ⊗ Or, shifted up by n.  Or must have invertible 1-dimensional stalks in degree 0."""
    for p, X in enumerate(orientation.stalks):
        if X.dims != {0: 1}:
            raise RepError(f"orientation stalk at {orientation.base.label(p)!r} is not 1-dimensional in degree 0")
    for (p, q) in orientation.base.covers():
        m = orientation.cover_map(p, q).get(0)
        if m is None or m[0, 0] == 0:
            raise RepError(f"orientation transition {orientation.base.label(p)!r} -> "
                           f"{orientation.base.label(q)!r} is not invertible")
    return shift(tensor(F, orientation), n)


def check_locally_constant(F: PosetRep, s: Stratification) -> bool:
    """All transitions between comparable points of one stratum are quasi-isomorphisms."""
    P = F.base
    if s.space != P:
        raise RepError("stratification is of a different space")
    for p in P:
        for q in P:
            if P.lt(p, q) and s.map(p) == s.map(q):
                if not is_quasi_isomorphism(F.transition(p, q), F.stalks[p], F.stalks[q]):
                    return False
    return True


def homology_dims_by_label(F: PosetRep) -> dict:
    return {str(F.base.label(p)): dict(sorted(h.items())) for p, h in enumerate(F.stalk_homology())}

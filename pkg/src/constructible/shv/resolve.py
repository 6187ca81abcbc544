"""
Pseudo-free resolutions and derived pushforward on the poset model.

Two independent constructions are provided.  ``pseudo_free_resolve``
builds a minimal resolution from the bottom degree up: at each step it
takes a projective cover of the cycles of the cone of the partial
resolution, choosing generators along a linear extension.  ``bar_resolution``
is the (much larger) simplicial bar construction and serves as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..exactlin import ChainComplex, RatMatrix, block, chain_map_component, column_space_basis
from ..poset import FinPoset, MonotoneMap
from .rep import PosetRep, PseudoFreeComplex, RepError, RepMorphism, realize


class ResolutionError(RuntimeError):
    pass


@dataclass
class Resolution:
    complex: PseudoFreeComplex
    # degree -> one F-stalk vector per generator (the augmentation on the generator)
    augmentation: dict[int, list[list]]

    def augmentation_morphism(self, F: PosetRep) -> RepMorphism:
        """realize(complex) -> F, sending generator (g, v) at x to T_{g→x} v."""
        R = realize(self.complex)
        P = F.base
        comps = []
        for x in P:
            out = {}
            for k, gens in self.complex.gens.items():
                X = F.stalks[x]
                if not X.dim(k):
                    continue
                cols = []
                for g, v in zip(gens, self.augmentation[k]):
                    if P.le(g, x):
                        T = chain_map_component(F.transition(g, x), F.stalks[g], X, k)
                        cols.append(T.apply(v))
                out[k] = RatMatrix.from_columns(cols, X.dim(k)) if cols else RatMatrix(X.dim(k), 0)
            comps.append(out)
        return RepMorphism(R, F, comps)


def _positions(P: FinPoset, gens, x: int) -> list[int]:
    return [i for i, g in enumerate(gens) if P.le(g, x)]


def resolve(F: PosetRep) -> Resolution:
    P = F.base
    rng = F.degree_range()
    if rng is None:
        return Resolution(PseudoFreeComplex(P, {}, {}), {})
    lo, hi = rng
    order = P.linear_extension()
    gens: dict[int, list[int]] = {}
    eps: dict[int, list[list]] = {}
    dcols: dict[int, list[list]] = {}
    k = lo
    while True:
        prev = gens.get(k - 1, [])
        prev2 = gens.get(k - 2, [])
        kernels: dict[int, list[list]] = {}
        new_gens: list[int] = []
        new_eps: list[list] = []
        new_d: list[list] = []
        for x in order:
            px = _positions(P, prev, x)
            p2x = _positions(P, prev2, x)
            X = F.stalks[x]
            a, b = len(px), X.dim(k)
            # D(c, y) = (d c, ε c - d_F y) on P_{k-1}(x) ⊕ F_k(x)
            dP = RatMatrix.from_columns([[dcols[k - 1][i][j] for j in p2x] for i in px], len(p2x)) \
                if px else RatMatrix(len(p2x), 0)
            eP = RatMatrix.from_columns(
                [chain_map_component(F.transition(prev[i], x), F.stalks[prev[i]], X, k - 1).apply(eps[k - 1][i])
                 for i in px], X.dim(k - 1)) if px else RatMatrix(X.dim(k - 1), 0)
            D = block([[dP, RatMatrix(len(p2x), b)], [eP, -X.d(k)]])
            K = D.kernel_basis() if a + b else []
            kernels[x] = K
            if not K:
                continue
            # images from the lower covers
            image = []
            for q in P.lower_covers(x):
                pq = _positions(P, prev, q)
                where = {i: r for r, i in enumerate(px)}
                Tq = chain_map_component(F.transition(q, x), F.stalks[q], X, k)
                for v in kernels[q]:
                    w = [0] * a
                    for r, i in enumerate(pq):
                        w[where[i]] = v[r]
                    image.append(w + Tq.apply(v[len(pq):]))
            span = column_space_basis(image, a + b) if image else []
            for v in K:
                # sign normalization: first non-zero coordinate positive
                if next(x for x in v if x) < 0:
                    v = [-x for x in v]
                trial = column_space_basis(span + [v], a + b)
                if len(trial) > len(span):
                    span = trial
                    new_gens.append(x)
                    full = [0] * len(prev)
                    for r, i in enumerate(px):
                        full[i] = v[r]
                    new_d.append(full)
                    new_eps.append(list(v[a:]))
        if new_gens:
            gens[k], eps[k], dcols[k] = new_gens, new_eps, new_d
        elif k > hi:
            break
        if k - hi > 2 * len(P) + 1:
            raise ResolutionError("resolution did not terminate within the expected length")
        k += 1
    diffs = {}
    for k, cols in dcols.items():
        if k - 1 in gens:
            diffs[k] = RatMatrix.from_columns(cols, len(gens[k - 1]))
    C = PseudoFreeComplex(P, {k: tuple(v) for k, v in gens.items()}, diffs)
    return Resolution(C, eps)


def pseudo_free_resolve(F: PosetRep) -> PseudoFreeComplex:
    return resolve(F).complex


def resolution_length(F: PosetRep, C: PseudoFreeComplex) -> int:
    """Top generator degree minus top degree of F."""
    rng = F.degree_range()
    if rng is None or not C.gens:
        return 0
    return max(C.gens) - rng[1]


def bar_resolution(F: PosetRep) -> Resolution:
    """Generator per chain (p_0 < ... < p_n) and basis vector of F_k(p_0), at p_n in degree n + k."""
    P = F.base
    chains = P.chains()
    gens: dict[int, list[int]] = {}
    labels: dict[int, list[tuple]] = {}
    eps: dict[int, list[list]] = {}
    for ch in chains:
        n = len(ch) - 1
        X = F.stalks[ch[0]]
        for k in sorted(X.dims):
            for e in range(X.dim(k)):
                gens.setdefault(n + k, []).append(ch[-1])
                labels.setdefault(n + k, []).append((ch, k, e))
                v = [0] * X.dim(k)
                v[e] = 1
                eps.setdefault(n + k, []).append(v if n == 0 else [0] * F.stalks[ch[-1]].dim(n + k))
    index = {t: {lab: i for i, lab in enumerate(v)} for t, v in labels.items()}
    diffs = {}
    for t, labs in labels.items():
        if t - 1 not in labels:
            continue
        rows = [[0] * len(labs) for _ in labels[t - 1]]
        tgt = index[t - 1]
        for j, (ch, k, e) in enumerate(labs):
            n = len(ch) - 1
            X = F.stalks[ch[0]]
            sign_f = -1 if n % 2 else 1
            for r in range(X.dim(k - 1)):
                c = X.d(k)[r, e]
                if c:
                    rows[tgt[(ch, k - 1, r)]][j] += sign_f * c
            if n == 0:
                continue
            T = chain_map_component(F.transition(ch[0], ch[1]), X, F.stalks[ch[1]], k)
            for r in range(F.stalks[ch[1]].dim(k)):
                c = T[r, e]
                if c:
                    rows[tgt[(ch[1:], k, r)]][j] += c
            for i in range(1, n + 1):
                face = ch[:i] + ch[i + 1:]
                rows[tgt[(face, k, e)]][j] += -1 if i % 2 else 1
        diffs[t] = RatMatrix(len(labels[t - 1]), len(labs), rows)
    C = PseudoFreeComplex(P, {t: tuple(v) for t, v in gens.items()}, diffs)
    return Resolution(C, eps)


def derived_pushforward(f: MonotoneMap, F: PosetRep, resolution: PseudoFreeComplex | None = None) -> PosetRep:
    """Left Kan extension along f, computed on a pseudo-free resolution."""
    if f.source != F.base:
        raise RepError("map source differs from the representation base")
    C = resolution if resolution is not None else pseudo_free_resolve(F)
    return realize(C.push(f))


def global_sections_complex(f_target_point: PosetRep) -> ChainComplex:
    """Stalk of a representation on a one-point poset."""
    if len(f_target_point.base) != 1:
        raise RepError("expected a representation on a point")
    return f_target_point.stalks[0]

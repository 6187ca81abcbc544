"""
Stratifications of finite posets: cover stratifications, the properness
check, and refinement to a proper stratification.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .poset import FinPoset, MonotoneMap, PosetError


class StratificationError(ValueError):
    pass


@dataclass(frozen=True)
class Stratification:
    space: FinPoset
    strata_poset: FinPoset
    map: MonotoneMap

    def __post_init__(self):
        if self.map.source != self.space or self.map.target != self.strata_poset:
            raise StratificationError("map does not go from space to strata poset")

    @classmethod
    def from_assignment(cls, space: FinPoset, strata: FinPoset, assignment: Sequence[int]):
        return cls(space, strata, MonotoneMap(space, strata, tuple(assignment)))

    def stratum(self, p: int) -> frozenset[int]:
        return self.map.fiber(p)

    def strata(self) -> dict[int, frozenset[int]]:
        return {p: self.stratum(p) for p in self.strata_poset}

    def nonempty_strata(self) -> dict[int, frozenset[int]]:
        return {p: s for p, s in self.strata().items() if s}

    def to_doc(self) -> dict:
        return {"space": self.space.to_doc(), "strata": self.strata_poset.to_doc(),
                "map": dict(sorted(self.map.to_doc().items()))}

    @classmethod
    def from_doc(cls, doc: Mapping) -> "Stratification":
        try:
            X = FinPoset.from_doc(doc["space"])
            P = FinPoset.from_doc(doc["strata"])
            m = MonotoneMap.from_labels(X, P, {str(k): str(v) for k, v in doc["map"].items()})
        except KeyError as exc:
            raise StratificationError(f"stratification document lacks {exc.args[0]!r}") from None
        return cls(X, P, m)


def powerset_poset(names: Sequence[str]) -> FinPoset:
    """Subsets of ``names`` ordered by inclusion, labelled "{a,b}"; index = bitmask."""
    n = len(names)
    labels = ["{" + ",".join(names[i] for i in range(n) if mask >> i & 1) + "}" for mask in range(1 << n)]
    N = 1 << n
    return FinPoset(labels, [[(a & b) == a for b in range(N)] for a in range(N)], check=False)


def cover_stratification(X: FinPoset, cover: Sequence[Iterable[int]], names: Sequence[str] | None = None
                         ) -> Stratification:
    """x ↦ {i : x ∈ U_i}, into the power set of the index set."""
    cover = [frozenset(U) for U in cover]
    for U in cover:
        if not X.is_up_set(U):
            raise StratificationError(f"{X.labels(U)} is not open")
    names = list(names) if names is not None else [str(i + 1) for i in range(len(cover))]
    P = powerset_poset(names)
    assignment = tuple(sum(1 << i for i, U in enumerate(cover) if x in U) for x in X)
    return Stratification(X, P, MonotoneMap(X, P, assignment))


def is_proper(s: Stratification) -> tuple[bool, int | None]:
    """(True, None) or (False, witness p) per the frontier condition."""
    X, P = s.space, s.strata_poset
    for p in P:
        Xp = s.stratum(p)
        if not Xp:
            return False, p
        below = frozenset().union(*(s.stratum(q) for q in P if P.le(q, p)))
        if X.down_closure(Xp) != below:
            return False, p
    return True, None


def _closed_pieces(X: FinPoset, theta: Sequence[frozenset[int]]) -> list[frozenset[int]]:
    """Replace each locally closed S by its closure and its boundary, both closed."""
    out: list[frozenset[int]] = []
    for S in theta:
        for T in (X.down_closure(S), X.boundary(S)):
            if T and T not in out:
                out.append(T)
    return out


def _refine_closed(X: FinPoset, region: frozenset[int], theta: list[frozenset[int]], path: str,
                   out: list[tuple[str, frozenset[int]]]):
    """Partition ``region`` (a locally closed subspace of X) compatibly with closed subsets ``theta``.

    Closures are taken in X, intersected with the region; all members of
    ``theta`` are closed in ``region``.
    """
    theta = [S & region for S in theta]
    theta = [S for i, S in enumerate(theta) if S and S not in theta[:i]]
    if not region:
        return
    if not theta:
        out.append((path, region))
        return
    S0 = theta[0]

    def closure(A):
        return X.down_closure(A) & region

    U = region - closure(S0)
    V = region - closure(U)
    Z = closure(U) - U
    rest = theta[1:]
    before = len(out)
    _refine_closed(X, U, rest, path + ".U", out)
    pieces_u = [S for _, S in out[before:]]
    mid = len(out)
    _refine_closed(X, V, rest, path + ".V", out)
    pieces_v = [S for _, S in out[mid:]]
    theta_z = [closure(S) & Z for S in pieces_u + pieces_v] + [closure(S0) & Z] + [S & Z for S in theta]
    _refine_closed(X, Z, theta_z, path + ".Z", out)


def _frontier_stratification(X: FinPoset, pieces: list[tuple[str, frozenset[int]]]) -> Stratification:
    """Order the pieces by S <= S' iff S ⊆ closure(S') and map each point to its piece."""
    pieces = sorted(pieces, key=lambda t: t[0])
    labels = [p for p, _ in pieces]
    sets = [S for _, S in pieces]
    closures = [X.down_closure(S) for S in sets]
    n = len(sets)
    try:
        Q = FinPoset(labels, [[sets[a] <= closures[b] for b in range(n)] for a in range(n)])
    except PosetError as exc:
        raise StratificationError(f"pieces do not satisfy the frontier condition: {exc}") from None
    where = {}
    for k, S in enumerate(sets):
        for x in S:
            if x in where:
                raise StratificationError("pieces overlap")
            where[x] = k
    if len(where) != len(X):
        raise StratificationError("pieces do not cover the space")
    return Stratification(X, Q, MonotoneMap(X, Q, tuple(where[x] for x in X)))


def proper_refine(X: FinPoset, theta: Sequence[Iterable[int]]) -> Stratification:
    """A proper stratification in which every member of ``theta`` is a union of strata.

    Each locally closed S is first traded for the closed pair (closure, boundary),
    then the space is split recursively into U = X - cl(S0), V = X - cl(U) and
    Z = ∂U: U and V recurse on the remaining sets, Z on the closures of what
    came back plus cl(S0) and the traces of the sets.  Stratum labels record
    the recursion path ("X.U.V.Z", ...).
    """
    theta = [frozenset(S) for S in theta]
    for S in theta:
        if not X.is_locally_closed(S):
            raise StratificationError(f"{X.labels(S)} is not locally closed")
    pieces: list[tuple[str, frozenset[int]]] = []
    _refine_closed(X, frozenset(range(len(X))), _closed_pieces(X, theta), "X", pieces)
    s = _frontier_stratification(X, pieces)
    ok, witness = is_proper(s)
    if not ok:
        raise StratificationError(f"refinement is not proper at {s.strata_poset.label(witness)!r}")
    return s


def refine_stratification(s: Stratification) -> tuple[Stratification, MonotoneMap]:
    """Proper refinement β of s together with ψ : Q -> P such that α = ψ ∘ β."""
    X, P = s.space, s.strata_poset
    theta = [S for S in s.nonempty_strata().values()]
    beta = proper_refine(X, theta)
    Q = beta.strata_poset
    psi = []
    for q in Q:
        S = beta.stratum(q)
        ps = {s.map(x) for x in S}
        if len(ps) != 1:
            raise StratificationError("refinement stratum straddles two strata")
        psi.append(ps.pop())
    psi_map = MonotoneMap(Q, P, tuple(psi))
    assert psi_map.compose(beta.map).assignment == s.map.assignment
    return beta, psi_map


def is_union_of_strata(s: Stratification, S: Iterable[int]) -> bool:
    S = frozenset(S)
    return all(s.stratum(p) <= S or not (s.stratum(p) & S) for p in s.strata_poset)


def in_good_position(X: FinPoset, V: Iterable[int], sets: Sequence[Iterable[int]]) -> bool:
    """Every U_t satisfies U_t ⊆ V or U_t ∪ V = X."""
    V = frozenset(V)
    everything = frozenset(range(len(X)))
    return all(frozenset(U) <= V or (frozenset(U) | V) == everything for U in sets)

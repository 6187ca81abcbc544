"""Almost simplicial complexes, face posets and a chain-complex Betti oracle."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Mapping

from .exactlin import ChainComplex, RatMatrix, homology_dims
from .poset import FinPoset


class ComplexError(ValueError):
    pass


def simplex_label(s: Iterable) -> str:
    return "".join(sorted(map(str, s))) if all(len(str(v)) == 1 for v in s) else ",".join(sorted(map(str, s)))


class AlmostSimplicialComplex:
    """A set of non-empty simplices on a vertex set, with no closure requirement."""

    def __init__(self, vertices: Iterable, simplices: Iterable[Iterable]):
        self.vertices = tuple(sorted(set(map(str, vertices))))
        vs = set(self.vertices)
        simp = set()
        for s in simplices:
            s = frozenset(map(str, s))
            if not s:
                raise ComplexError("simplices must be non-empty")
            if not s <= vs:
                raise ComplexError(f"simplex {sorted(s)} uses unknown vertices")
            simp.add(s)
        self.simplices = tuple(sorted(simp, key=lambda s: (len(s), sorted(s))))

    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable]) -> "AlmostSimplicialComplex":
        simplices = [tuple(s) for s in simplices]
        return cls({v for s in simplices for v in s}, simplices)

    def __eq__(self, other):
        return isinstance(other, AlmostSimplicialComplex) and set(self.simplices) == set(other.simplices) \
            and self.vertices == other.vertices

    def __len__(self):
        return len(self.simplices)

    def __repr__(self):
        return f"AlmostSimplicialComplex({[sorted(s) for s in self.simplices]})"

    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def is_closed(self) -> bool:
        return simplicial_closure(self) == self

    def to_doc(self) -> dict:
        return {"vertices": list(self.vertices), "simplices": [sorted(s) for s in self.simplices]}

    @classmethod
    def from_doc(cls, doc: Mapping) -> "AlmostSimplicialComplex":
        try:
            return cls(doc["vertices"], doc["simplices"])
        except (KeyError, TypeError) as exc:
            raise ComplexError(f"malformed complex document: {exc}") from None


def simplicial_closure(K: AlmostSimplicialComplex) -> AlmostSimplicialComplex:
    faces = set()
    for s in K.simplices:
        for r in range(1, len(s) + 1):
            faces.update(frozenset(c) for c in combinations(sorted(s), r))
    return AlmostSimplicialComplex(K.vertices, faces)


def is_locally_closed(K: AlmostSimplicialComplex) -> bool:
    members = set(K.simplices)
    for lo in K.simplices:
        for hi in K.simplices:
            if lo < hi:
                extra = sorted(hi - lo)
                for r in range(1, len(extra)):
                    for c in combinations(extra, r):
                        if lo | frozenset(c) not in members:
                            return False
    return True


def face_poset(K: AlmostSimplicialComplex) -> FinPoset:
    """Simplices ordered by inclusion; labels are concatenated sorted vertex names."""
    S = K.simplices
    labels = [simplex_label(s) for s in S]
    return FinPoset(labels, [[a <= b for b in S] for a in S], check=False)


def boundary_complex(K: AlmostSimplicialComplex) -> ChainComplex:
    """One generator per simplex of K, alternating-sign boundary restricted to faces in K.

    Degree of a simplex is its dimension; vertices inside each simplex are
    ordered lexicographically.
    """
    by_dim: dict[int, list[frozenset]] = {}
    for s in K.simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    index = {k: {s: i for i, s in enumerate(v)} for k, v in by_dim.items()}
    dims = {k: len(v) for k, v in by_dim.items()}
    diffs = {}
    for k, simplices in by_dim.items():
        if k - 1 not in by_dim:
            continue
        rows = [[0] * len(simplices) for _ in by_dim[k - 1]]
        for j, s in enumerate(simplices):
            verts = sorted(s)
            for i, v in enumerate(verts):
                face = s - {v}
                r = index[k - 1].get(face)
                if r is not None:
                    rows[r][j] += -1 if i % 2 else 1
        diffs[k] = RatMatrix(len(by_dim[k - 1]), len(simplices), rows)
    return ChainComplex(dims, diffs)


def simplicial_betti(K: AlmostSimplicialComplex) -> list[int]:
    """Betti numbers b_0..b_dim of the restricted boundary complex of a locally closed K."""
    if not is_locally_closed(K):
        raise ComplexError("simplicial_betti needs a locally closed complex")
    C = boundary_complex(K)
    return homology_dims(C, 0, K.dimension())


def standard_simplex(n: int, labels: str = "abcdefghijklmnopqrstuvwxyz") -> AlmostSimplicialComplex:
    """Closed n-simplex on the first n + 1 labels."""
    return simplicial_closure(AlmostSimplicialComplex.from_simplices([labels[: n + 1]]))


def sphere(n: int, labels: str = "abcdefghijklmnopqrstuvwxyz") -> AlmostSimplicialComplex:
    """Boundary of the (n + 1)-simplex."""
    full = standard_simplex(n + 1, labels)
    return AlmostSimplicialComplex(full.vertices, [s for s in full.simplices if len(s) <= n + 1])

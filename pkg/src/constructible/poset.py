"""
Finite posets with the Alexandrov (up-set) topology.

Open sets are up-sets, closed sets are down-sets, the closure of a set is
its down-closure.  Elements carry opaque string labels; everything
internal works on integer indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as _iproduct
from typing import Callable, Hashable, Iterable, Mapping, Sequence


class PosetError(ValueError):
    """Malformed poset, unknown label, or non-monotone map."""


class FinPoset:
    """A finite partial order stored as a dense boolean matrix ``leq[i][j]``."""

    __slots__ = ("elements", "leq", "_index", "_covers", "_hash")

    def __init__(self, elements: Sequence[Hashable], leq: Sequence[Sequence[bool]] | None = None,
                 relations: Iterable[tuple] = (), check: bool = True):
        elements = tuple(elements)
        n = len(elements)
        if len(set(elements)) != n:
            raise PosetError("element labels must be pairwise distinct")
        self.elements = elements
        self._index = {e: i for i, e in enumerate(elements)}
        if leq is None:
            m = [[i == j for j in range(n)] for i in range(n)]
            for a, b in relations:
                m[self.index(a)][self.index(b)] = True
            _close(m)
            leq = m
        self.leq = tuple(tuple(bool(x) for x in row) for row in leq)
        if check:
            self._validate()
        self._covers = None
        self._hash = None

    @classmethod
    def from_covers(cls, elements: Sequence[Hashable], covers: Iterable[tuple]) -> "FinPoset":
        return cls(elements, relations=covers)

    @classmethod
    def chain(cls, n: int) -> "FinPoset":
        return cls([str(i) for i in range(n)], [[i <= j for j in range(n)] for i in range(n)], check=False)

    @classmethod
    def discrete(cls, labels: Sequence[Hashable]) -> "FinPoset":
        n = len(labels)
        return cls(labels, [[i == j for j in range(n)] for i in range(n)], check=False)

    @classmethod
    def point(cls, label: Hashable = "*") -> "FinPoset":
        return cls([label], [[True]], check=False)

    def _validate(self):
        n = len(self)
        if len(self.leq) != n or any(len(r) != n for r in self.leq):
            raise PosetError("order matrix has the wrong shape")
        for i in range(n):
            if not self.leq[i][i]:
                raise PosetError(f"order is not reflexive at {self.elements[i]!r}")
            for j in range(n):
                if i != j and self.leq[i][j] and self.leq[j][i]:
                    raise PosetError(f"order is not antisymmetric: {self.elements[i]!r}, {self.elements[j]!r}")
                if self.leq[i][j]:
                    for k in range(n):
                        if self.leq[j][k] and not self.leq[i][k]:
                            raise PosetError("order is not transitive")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(range(len(self.elements)))

    def __eq__(self, other):
        if not isinstance(other, FinPoset):
            return NotImplemented
        return self.elements == other.elements and self.leq == other.leq

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.elements, self.leq))
        return self._hash

    def __repr__(self):
        return f"FinPoset({list(self.elements)!r}, covers={[(self.elements[a], self.elements[b]) for a, b in self.covers()]!r})"

    def index(self, label) -> int:
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise PosetError(f"unknown element {label!r}") from None

    def label(self, i: int):
        return self.elements[i]

    def labels(self, idx: Iterable[int]) -> list:
        return [self.elements[i] for i in sorted(idx)]

    def le(self, i: int, j: int) -> bool:
        return self.leq[i][j]

    def lt(self, i: int, j: int) -> bool:
        return i != j and self.leq[i][j]

    def covers(self) -> list[tuple[int, int]]:
        """Hasse diagram edges (i, j) with i < j and nothing strictly between."""
        if self._covers is None:
            n = len(self)
            out = []
            for i in range(n):
                for j in range(n):
                    if self.lt(i, j) and not any(self.lt(i, k) and self.lt(k, j) for k in range(n)):
                        out.append((i, j))
            self._covers = tuple(out)
        return list(self._covers)

    def upper_covers(self, i: int) -> list[int]:
        return [b for a, b in self.covers() if a == i]

    def lower_covers(self, i: int) -> list[int]:
        return [a for a, b in self.covers() if b == i]

    def linear_extension(self) -> list[int]:
        """Elements sorted so that i < j in the order implies i comes first; ties by label."""
        remaining = set(range(len(self)))
        out = []
        while remaining:
            mins = [i for i in remaining if not any(self.lt(j, i) for j in remaining)]
            mins.sort(key=lambda i: str(self.elements[i]))
            out.append(mins[0])
            remaining.remove(mins[0])
        return out

    def minimal(self, subset: Iterable[int] | None = None) -> list[int]:
        s = set(range(len(self))) if subset is None else set(subset)
        return sorted(i for i in s if not any(self.lt(j, i) for j in s))

    def is_up_set(self, s: Iterable[int]) -> bool:
        s = set(s)
        return all(j in s for i in s for j in range(len(self)) if self.leq[i][j])

    def is_down_set(self, s: Iterable[int]) -> bool:
        s = set(s)
        return all(j in s for i in s for j in range(len(self)) if self.leq[j][i])

    def is_locally_closed(self, s: Iterable[int]) -> bool:
        """Convexity: a <= b <= c with a, c in s forces b in s."""
        s = set(s)
        return all(b in s for a in s for c in s if self.leq[a][c]
                   for b in range(len(self)) if self.leq[a][b] and self.leq[b][c])

    def up_closure(self, s: Iterable[int]) -> frozenset[int]:
        s = list(s)
        return frozenset(j for j in range(len(self)) if any(self.leq[i][j] for i in s))

    def down_closure(self, s: Iterable[int]) -> frozenset[int]:
        s = list(s)
        return frozenset(j for j in range(len(self)) if any(self.leq[j][i] for i in s))

    def boundary(self, s: Iterable[int]) -> frozenset[int]:
        s = frozenset(s)
        return self.down_closure(s) - s

    def subposet(self, idx: Iterable[int]) -> "FinPoset":
        """Induced subposet; elements keep their labels and the order of ``idx``."""
        idx = sorted(idx)
        return FinPoset([self.elements[i] for i in idx],
                        [[self.leq[i][j] for j in idx] for i in idx], check=False)

    def up_sets(self) -> list[frozenset[int]]:
        """All up-sets, enumerated as down-set complements."""
        return _up_sets(self)

    def longest_chain_length(self) -> int:
        """Number of strict steps in the longest chain; -1 for the empty poset."""
        n = len(self)
        if n == 0:
            return -1
        best = [0] * n
        for i in self.linear_extension():
            for j in range(n):
                if self.lt(j, i):
                    best[i] = max(best[i], best[j] + 1)
        return max(best)

    def chains(self, subset: Iterable[int] | None = None) -> list[tuple[int, ...]]:
        """Non-empty strictly increasing chains inside ``subset``, in lexicographic index order."""
        s = sorted(range(len(self)) if subset is None else set(subset))
        out = []

        def grow(ch):
            out.append(tuple(ch))
            last = ch[-1]
            for j in s:
                if self.lt(last, j):
                    ch.append(j)
                    grow(ch)
                    ch.pop()

        for i in s:
            grow([i])
        out.sort(key=lambda c: (len(c), c))
        return out

    def to_doc(self) -> dict:
        labels = [str(e) for e in self.elements]
        order = sorted(range(len(self)), key=lambda i: labels[i])
        covers = sorted([labels[a], labels[b]] for a, b in self.covers())
        return {"elements": [labels[i] for i in order], "covers": covers}

    @classmethod
    def from_doc(cls, doc: Mapping) -> "FinPoset":
        try:
            elements = [str(e) for e in doc["elements"]]
            covers = [tuple(map(str, c)) for c in doc.get("covers", [])]
        except (KeyError, TypeError) as exc:
            raise PosetError(f"malformed poset document: {exc}") from None
        for c in covers:
            if len(c) != 2:
                raise PosetError(f"cover must be a pair, got {list(c)}")
        return cls(elements, relations=covers)


def _close(m: list[list[bool]]):
    n = len(m)
    for k in range(n):
        mk = m[k]
        for i in range(n):
            if m[i][k]:
                mi = m[i]
                for j in range(n):
                    if mk[j]:
                        mi[j] = True


def _up_sets(P: FinPoset) -> list[frozenset[int]]:
    n = len(P)
    order = P.linear_extension()[::-1]
    out: list[frozenset[int]] = []

    # Decide membership from the top down; an element may join only if all its successors did.
    def rec(k, chosen):
        if k == n:
            out.append(frozenset(chosen))
            return
        i = order[k]
        rec(k + 1, chosen)
        if all(j in chosen for j in range(n) if P.lt(i, j)):
            chosen.add(i)
            rec(k + 1, chosen)
            chosen.remove(i)

    rec(0, set())
    return out


@dataclass(frozen=True)
class UpSet:
    parent: FinPoset
    members: frozenset[int]

    def __post_init__(self):
        if not self.parent.is_up_set(self.members):
            raise PosetError(f"{self.parent.labels(self.members)} is not an up-set")

    @classmethod
    def from_labels(cls, P: FinPoset, labels: Iterable) -> "UpSet":
        return cls(P, frozenset(P.index(x) for x in labels))

    def labels(self) -> list:
        return self.parent.labels(self.members)

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class MonotoneMap:
    source: FinPoset
    target: FinPoset
    assignment: tuple[int, ...]

    def __post_init__(self):
        a = tuple(self.assignment)
        object.__setattr__(self, "assignment", a)
        if len(a) != len(self.source):
            raise PosetError("assignment must cover every source element")
        for i, j in self.source.covers():
            if not self.target.le(a[i], a[j]):
                raise PosetError(f"map is not monotone on {self.source.label(i)!r} <= {self.source.label(j)!r}")

    @classmethod
    def from_labels(cls, source: FinPoset, target: FinPoset, mapping: Mapping) -> "MonotoneMap":
        try:
            return cls(source, target, tuple(target.index(mapping[x]) for x in source.elements))
        except KeyError as exc:
            raise PosetError(f"map has no value for {exc.args[0]!r}") from None

    @classmethod
    def identity(cls, P: FinPoset) -> "MonotoneMap":
        return cls(P, P, tuple(range(len(P))))

    @classmethod
    def to_point(cls, P: FinPoset, point: FinPoset | None = None) -> "MonotoneMap":
        point = point or FinPoset.point()
        return cls(P, point, (0,) * len(P))

    def __call__(self, i: int) -> int:
        return self.assignment[i]

    def fiber(self, q: int) -> frozenset[int]:
        return frozenset(i for i, v in enumerate(self.assignment) if v == q)

    def preimage(self, s: Iterable[int]) -> frozenset[int]:
        s = set(s)
        return frozenset(i for i, v in enumerate(self.assignment) if v in s)

    def compose(self, other: "MonotoneMap") -> "MonotoneMap":
        """self ∘ other."""
        return MonotoneMap(other.source, self.target, tuple(self.assignment[other(i)] for i in range(len(other.source))))

    def to_doc(self) -> dict:
        return {str(self.source.label(i)): str(self.target.label(v)) for i, v in enumerate(self.assignment)}


def open_star(P: FinPoset, p) -> UpSet:
    """{q : q >= p} for a label ``p``."""
    i = P.index(p)
    return UpSet(P, frozenset(j for j in P if P.le(i, j)))


def down_closure(P: FinPoset, labels: Iterable) -> frozenset:
    return frozenset(P.labels(P.down_closure(P.index(x) for x in labels)))


def boundary(P: FinPoset, labels: Iterable) -> frozenset:
    return frozenset(P.labels(P.boundary(P.index(x) for x in labels)))


def product(P: FinPoset, Q: FinPoset) -> FinPoset:
    """Componentwise order on pairs; labels are (p, q) tuples in row-major order."""
    elems = [(p, q) for p in P.elements for q in Q.elements]
    n, m = len(P), len(Q)
    leq = [[P.le(i // m, j // m) and Q.le(i % m, j % m) for j in range(n * m)] for i in range(n * m)]
    return FinPoset(elems, leq, check=False)


def projection(P: FinPoset, Q: FinPoset, PQ: FinPoset | None = None) -> MonotoneMap:
    """First-factor projection P × Q -> P."""
    PQ = PQ or product(P, Q)
    m = len(Q)
    return MonotoneMap(PQ, P, tuple(i // m for i in range(len(PQ))))


def product_map(f: MonotoneMap, g: MonotoneMap) -> MonotoneMap:
    src = product(f.source, g.source)
    tgt = product(f.target, g.target)
    m, mt = len(g.source), len(g.target)
    return MonotoneMap(src, tgt, tuple(f(i // m) * mt + g(i % m) for i in range(len(src))))


def amalgamate(alpha: MonotoneMap, betas: Mapping[int, MonotoneMap]) -> tuple[FinPoset, MonotoneMap]:
    """Glue stratifications of the fibres of ``alpha`` into one.

    ``betas[p]`` stratifies the fibre of ``alpha`` over ``p``; its source must
    be the induced subposet on that fibre.  The result orders pairs by
    (p, q) <= (p', q') iff p < p', or p = p' and q <= q'.
    """
    X, P = alpha.source, alpha.target
    pairs = []
    for p in P:
        fib = alpha.fiber(p)
        if not fib:
            continue
        if p not in betas:
            raise PosetError(f"no stratification given for the non-empty stratum {P.label(p)!r}")
        beta = betas[p]
        if beta.source.elements != tuple(X.label(i) for i in sorted(fib)):
            raise PosetError(f"stratification of {P.label(p)!r} has the wrong source")
        for q in beta.target:
            pairs.append((p, q))
    for p in betas:
        if not alpha.fiber(p):
            raise PosetError(f"stratification given for empty stratum {P.label(p)!r}")
    labels = [(P.label(p), betas[p].target.label(q)) for p, q in pairs]

    def le(a, b):
        (p, q), (p2, q2) = a, b
        return P.lt(p, p2) or (p == p2 and betas[p].target.le(q, q2))

    R = FinPoset(labels, [[le(a, b) for b in pairs] for a in pairs])
    pos = {pq: k for k, pq in enumerate(pairs)}
    assignment = []
    for x in X:
        p = alpha(x)
        local = sorted(alpha.fiber(p)).index(x)
        assignment.append(pos[(p, betas[p](local))])
    return R, MonotoneMap(X, R, tuple(assignment))


def inductive_dimension(P: FinPoset) -> int:
    """Inductive dimension from the recursive definition over all up-sets.

    dim(empty) = -1; dim <= d iff every up-set has boundary of dim <= d - 1.
    Subspaces are induced subposets, memoised on their element sets.
    """
    memo: dict[frozenset[int], int] = {}

    def dim(S: frozenset[int]) -> int:
        if not S:
            return -1
        if S in memo:
            return memo[S]
        sub = P.subposet(S)
        idx = sorted(S)
        worst = -1
        for U in sub.up_sets():
            B = sub.boundary(U)
            worst = max(worst, dim(frozenset(idx[i] for i in B)))
        memo[S] = worst + 1
        return worst + 1

    return dim(frozenset(range(len(P))))

"""
Exact linear algebra over the rationals.

Matrices are dense and immutable, entries are ``fractions.Fraction``.
Bounded chain complexes use homological grading: ``d_k`` maps degree
``k`` to degree ``k - 1``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rational = Fraction


class InvariantError(ValueError):
    """A structural identity (d∘d = 0, MNM = M, ...) failed."""


def rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x).limit_denominator()
    return Fraction(x)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


_ZERO = Fraction(0)
_ONE = Fraction(1)


class RatMatrix:
    """Dense rational matrix. Treat as immutable."""

    __slots__ = ("rows", "cols", "data", "_hash")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = tuple((_ZERO,) * cols for _ in range(rows))
        else:
            if len(data) != rows or any(len(r) != cols for r in data):
                raise ValueError(f"entries do not match shape {rows}x{cols}")
            self.data = tuple(tuple(rational(x) for x in r) for r in data)
        self._hash = None

    # construction helpers
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "RatMatrix":
        return cls(rows, len(columns), [[c[i] for c in columns] for i in range(rows)])

    @classmethod
    def _raw(cls, rows: int, cols: int, data) -> "RatMatrix":
        m = cls.__new__(cls)
        m.rows, m.cols, m.data, m._hash = rows, cols, data, None
        return m

    # basic protocol
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.data))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self.data)
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.data]

    def column(self, j: int) -> list[Fraction]:
        return [r[j] for r in self.data]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    # arithmetic
    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        _check_same(self, other)
        return RatMatrix._raw(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        _check_same(self, other)
        return RatMatrix._raw(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self) -> "RatMatrix":
        return self.scale(-1)

    def scale(self, c) -> "RatMatrix":
        c = rational(c)
        return RatMatrix._raw(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.data))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        n = other.cols
        ocols = [[(k, x) for k, x in enumerate(other.column(j)) if x] for j in range(n)] if n else []
        out = []
        for r in self.data:
            nz = {k: a for k, a in enumerate(r) if a}
            if not nz:
                out.append((_ZERO,) * n)
                continue
            row = []
            for col in ocols:
                s = _ZERO
                for k, b in col:
                    a = nz.get(k)
                    if a is not None:
                        s += a * b
                row.append(s)
            out.append(tuple(row))
        return RatMatrix._raw(self.rows, n, tuple(out))

    def apply(self, v: Sequence) -> list[Fraction]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum((a * b for a, b in zip(r, v) if a and b), _ZERO) for r in self.data]

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix._raw(self.cols, self.rows, tuple(zip(*self.data)) if self.rows else
                              tuple(() for _ in range(self.cols)))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        return RatMatrix._raw(len(rows), len(cols), tuple(
            tuple(self.data[i][j] for j in cols) for i in rows))

    # elimination-based queries
    def rank(self) -> int:
        return len(rref(self)[1])

    def kernel_basis(self) -> list[list[Fraction]]:
        """Basis of {x : Mx = 0} as column vectors, one per free column of the RREF."""
        r, pivots = rref(self)
        pivset = set(pivots)
        basis = []
        for free in range(self.cols):
            if free in pivset:
                continue
            v = [_ZERO] * self.cols
            v[free] = _ONE
            for i, p in enumerate(pivots):
                v[p] = -r.data[i][free]
            basis.append(v)
        return basis

    def inverse(self) -> "RatMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        aug = hstack([self, RatMatrix.identity(n)])
        r, pivots = rref(aug)
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return r.submatrix(range(n), range(n, 2 * n))


def _check_same(a: RatMatrix, b: RatMatrix):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def hstack(ms: Sequence[RatMatrix], rows: int | None = None) -> RatMatrix:
    if not ms:
        return RatMatrix(rows or 0, 0)
    n = ms[0].rows
    if any(m.rows != n for m in ms):
        raise ValueError("hstack row mismatch")
    return RatMatrix._raw(n, sum(m.cols for m in ms),
                          tuple(tuple(x for m in ms for x in m.data[i]) for i in range(n)))


def vstack(ms: Sequence[RatMatrix], cols: int | None = None) -> RatMatrix:
    if not ms:
        return RatMatrix(0, cols or 0)
    n = ms[0].cols
    if any(m.cols != n for m in ms):
        raise ValueError("vstack column mismatch")
    return RatMatrix._raw(sum(m.rows for m in ms), n, tuple(r for m in ms for r in m.data))


def block(blocks: Sequence[Sequence[RatMatrix]]) -> RatMatrix:
    return vstack([hstack(row) for row in blocks])


def block_diag(ms: Sequence[RatMatrix]) -> RatMatrix:
    R = sum(m.rows for m in ms)
    C = sum(m.cols for m in ms)
    out = []
    off = 0
    for m in ms:
        for r in m.data:
            out.append((_ZERO,) * off + r + (_ZERO,) * (C - off - m.cols))
        off += m.cols
    return RatMatrix._raw(R, C, tuple(out))


def kron(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    return RatMatrix._raw(a.rows * b.rows, a.cols * b.cols, tuple(
        tuple(x * y for x in ra for y in rb) for ra in a.data for rb in b.data))


def _height(x: Fraction) -> int:
    return abs(x.numerator) * x.denominator


def rref(m: RatMatrix) -> tuple[RatMatrix, list[int]]:
    """Reduced row echelon form and pivot columns.

    Rows are kept sparse during elimination; among candidate pivots in a
    column the entry of smallest height |num|*den is chosen to keep
    intermediate sizes down.
    """
    rows = [{j: x for j, x in enumerate(r) if x} for r in m.data]
    rows = [r for r in rows if r]
    pivots: list[int] = []
    done: list[dict] = []
    for col in range(m.cols):
        if not rows:
            break
        best = None
        for idx, r in enumerate(rows):
            x = r.get(col)
            if x is not None and (best is None or _height(x) < best[0]):
                best = (_height(x), idx)
        if best is None:
            continue
        prow = rows.pop(best[1])
        inv = 1 / prow[col]
        prow = {j: x * inv for j, x in prow.items()}
        nxt = []
        for r in rows:
            f = r.get(col)
            if f is not None:
                for j, x in prow.items():
                    y = r.get(j, _ZERO) - f * x
                    if y:
                        r[j] = y
                    else:
                        r.pop(j, None)
            if r:
                nxt.append(r)
        rows = nxt
        for r in done:
            f = r.get(col)
            if f is not None:
                for j, x in prow.items():
                    y = r.get(j, _ZERO) - f * x
                    if y:
                        r[j] = y
                    else:
                        r.pop(j, None)
        done.append(prow)
        pivots.append(col)
    data = [tuple(r.get(j, _ZERO) for j in range(m.cols)) for r in done]
    data += [(_ZERO,) * m.cols] * (m.rows - len(done))
    return RatMatrix._raw(m.rows, m.cols, tuple(data)), pivots


def rank_factorize(m: RatMatrix) -> tuple[RatMatrix, RatMatrix]:
    """M = C @ R with C (rows x r) of full column rank and R (r x cols) of full row rank."""
    r, pivots = rref(m)
    k = len(pivots)
    C = m.submatrix(range(m.rows), pivots)
    R = r.submatrix(range(k), range(m.cols))
    return C, R


def right_pseudo_inverse(m: RatMatrix) -> RatMatrix:
    """N with M N M = M, built as R^t (R R^t)^-1 (C^t C)^-1 C^t."""
    C, R = rank_factorize(m)
    if C.cols == 0:
        return RatMatrix(m.cols, m.rows)
    Rt, Ct = R.T, C.T
    N = Rt @ (R @ Rt).inverse() @ (Ct @ C).inverse() @ Ct
    if m @ N @ m != m:
        raise InvariantError("pseudo-inverse identity MNM = M failed")
    return N


def solve(m: RatMatrix, b: Sequence) -> list[Fraction] | None:
    """Some x with m x = b, or None when b is not in the column space."""
    aug = hstack([m, RatMatrix(m.rows, 1, [[x] for x in b])])
    r, pivots = rref(aug)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [_ZERO] * m.cols
    for i, p in enumerate(pivots):
        x[p] = r.data[i][m.cols]
    return x


def column_space_basis(vectors: Iterable[Sequence], dim: int) -> list[list[Fraction]]:
    """Linearly independent subset spanning the same space, chosen greedily in order."""
    basis: list[list[Fraction]] = []
    reduced: list[tuple[int, list[Fraction]]] = []
    for v in vectors:
        w = [rational(x) for x in v]
        for p, b in reduced:
            if w[p]:
                f = w[p]
                w = [x - f * y for x, y in zip(w, b)]
        piv = next((i for i, x in enumerate(w) if x), None)
        if piv is None:
            continue
        inv = 1 / w[piv]
        w = [x * inv for x in w]
        reduced = [(p, [x - b[piv] * y for x, y in zip(b, w)]) for p, b in reduced]
        reduced.append((piv, w))
        basis.append([rational(x) for x in v])
    return basis


# chain complexes ----------------------------------------------------------


class ChainComplex:
    """Bounded complex of finite-dimensional rational spaces.

    ``dims`` maps degree to dimension; ``diffs[k]`` is the matrix of
    d_k: C_k -> C_{k-1}.  Missing degrees are zero.
    """

    __slots__ = ("dims", "diffs")

    def __init__(self, dims: Mapping[int, int], diffs: Mapping[int, RatMatrix] | None = None,
                 check: bool = True):
        self.dims = {int(k): int(v) for k, v in dims.items() if v}
        diffs = diffs or {}
        self.diffs = {}
        for k, d in diffs.items():
            k = int(k)
            want = (self.dim(k - 1), self.dim(k))
            if d.shape != want:
                raise ValueError(f"d_{k} has shape {d.shape}, expected {want}")
            if want[0] and want[1] and not d.is_zero():
                self.diffs[k] = d
        if check:
            for k in self.diffs:
                if (k - 1) in self.diffs and not (self.diffs[k - 1] @ self.diffs[k]).is_zero():
                    raise InvariantError(f"d_{k - 1} d_{k} != 0")

    @classmethod
    def zero(cls) -> "ChainComplex":
        return cls({})

    @classmethod
    def concentrated(cls, dim: int, degree: int = 0) -> "ChainComplex":
        return cls({degree: dim})

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def d(self, k: int) -> RatMatrix:
        m = self.diffs.get(k)
        return m if m is not None else RatMatrix(self.dim(k - 1), self.dim(k))

    @property
    def degrees(self) -> list[int]:
        return sorted(self.dims)

    @property
    def lo(self) -> int | None:
        return min(self.dims) if self.dims else None

    @property
    def hi(self) -> int | None:
        return max(self.dims) if self.dims else None

    def is_zero(self) -> bool:
        return not self.dims

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** (k % 2) * v for k, v in self.dims.items())

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self.dims == other.dims and self.diffs == other.diffs

    def __repr__(self):
        return f"ChainComplex(dims={dict(sorted(self.dims.items()))})"

    def shift(self, n: int) -> "ChainComplex":
        """X[n]: degree k moves to k + n, differentials pick up (-1)^n."""
        s = -1 if n % 2 else 1
        return ChainComplex({k + n: v for k, v in self.dims.items()},
                            {k + n: (d if s == 1 else -d) for k, d in self.diffs.items()},
                            check=False)


def homology(X: ChainComplex) -> dict[int, int]:
    """Nonzero homology dimensions by degree."""
    out = {}
    ranks = {k: d.rank() for k, d in X.diffs.items()}
    for k, n in X.dims.items():
        h = n - ranks.get(k, 0) - ranks.get(k + 1, 0)
        if h:
            out[k] = h
    return out


def homology_dims(X: ChainComplex, lo: int | None = None, hi: int | None = None) -> list[int]:
    """dim H_k for k = lo..hi (defaults to the support of X)."""
    for k in X.diffs:
        if (k - 1) in X.diffs and not (X.diffs[k - 1] @ X.diffs[k]).is_zero():
            raise InvariantError(f"d_{k - 1} d_{k} != 0")
    H = homology(X)
    if lo is None:
        lo = X.lo if X.lo is not None else 0
    if hi is None:
        hi = X.hi if X.hi is not None else lo - 1
    return [H.get(k, 0) for k in range(lo, hi + 1)]


def is_acyclic(X: ChainComplex) -> bool:
    return not homology(X)


ChainMap = dict  # degree -> RatMatrix of shape (dim Y_k, dim X_k)


def chain_map_component(f: Mapping[int, RatMatrix], X: ChainComplex, Y: ChainComplex, k: int) -> RatMatrix:
    m = f.get(k)
    return m if m is not None else RatMatrix(Y.dim(k), X.dim(k))


def compose(g: Mapping[int, RatMatrix], f: Mapping[int, RatMatrix], X: ChainComplex,
            Y: ChainComplex, Z: ChainComplex) -> dict[int, RatMatrix]:
    out = {}
    for k in X.dims:
        if Z.dim(k):
            out[k] = chain_map_component(g, Y, Z, k) @ chain_map_component(f, X, Y, k)
    return out


def identity_map(X: ChainComplex) -> dict[int, RatMatrix]:
    return {k: RatMatrix.identity(n) for k, n in X.dims.items()}


def maps_equal(f, g, X: ChainComplex, Y: ChainComplex) -> bool:
    return all(chain_map_component(f, X, Y, k) == chain_map_component(g, X, Y, k) for k in X.dims)


def is_chain_map(f: Mapping[int, RatMatrix], X: ChainComplex, Y: ChainComplex) -> bool:
    for k in set(X.dims) | {k + 1 for k in X.dims}:
        lhs = Y.d(k) @ chain_map_component(f, X, Y, k)
        rhs = chain_map_component(f, X, Y, k - 1) @ X.d(k)
        if lhs != rhs:
            return False
    return True


def cone(f: Mapping[int, RatMatrix], X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """Mapping cone: C_k = X_{k-1} ⊕ Y_k, D(x, y) = (-dx, f x + dy)."""
    dims = {}
    degs = {k + 1 for k in X.dims} | set(Y.dims)
    for k in degs:
        dims[k] = X.dim(k - 1) + Y.dim(k)
    diffs = {}
    for k in degs:
        if not dims.get(k - 1):
            continue
        diffs[k] = block([[-X.d(k - 1), RatMatrix(X.dim(k - 2), Y.dim(k))],
                          [chain_map_component(f, X, Y, k - 1), Y.d(k)]])
    return ChainComplex(dims, diffs, check=False)


def is_quasi_isomorphism(f, X: ChainComplex, Y: ChainComplex) -> bool:
    return is_acyclic(cone(f, X, Y))


def direct_sum(Xs: Sequence[ChainComplex]) -> ChainComplex:
    degs = sorted({k for X in Xs for k in X.dims})
    dims = {k: sum(X.dim(k) for X in Xs) for k in degs}
    diffs = {k: block_diag([X.d(k) for X in Xs]) for k in degs if dims.get(k - 1)}
    return ChainComplex(dims, diffs, check=False)


def tensor_complex(X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """Total complex of X ⊗ Y with Koszul sign: d(x⊗y) = dx⊗y + (-1)^|x| x⊗dy.

    Basis of degree n is ordered by (i, then basis of X_i ⊗ Y_{n-i}) with i
    increasing, and within a block x-major (Kronecker order).
    """
    layout = tensor_layout(X, Y)
    dims = {n: sum(X.dim(i) * Y.dim(j) for i, j in parts) for n, parts in layout.items()}
    diffs = {}
    for n, parts in layout.items():
        if not dims.get(n - 1):
            continue
        tgt = layout.get(n - 1, [])
        rows = []
        for (i2, j2) in tgt:
            row = []
            for (i, j) in parts:
                if i2 == i - 1 and j2 == j:
                    row.append(kron(X.d(i), RatMatrix.identity(Y.dim(j))))
                elif i2 == i and j2 == j - 1:
                    m = kron(RatMatrix.identity(X.dim(i)), Y.d(j))
                    row.append(-m if i % 2 else m)
                else:
                    row.append(RatMatrix(X.dim(i2) * Y.dim(j2), X.dim(i) * Y.dim(j)))
            rows.append(row)
        diffs[n] = block(rows)
    out = ChainComplex(dims, diffs, check=False)
    for k in out.diffs:
        if (k - 1) in out.diffs and not (out.diffs[k - 1] @ out.diffs[k]).is_zero():
            raise InvariantError("tensor complex failed d∘d = 0")
    return out


def tensor_layout(X: ChainComplex, Y: ChainComplex) -> dict[int, list[tuple[int, int]]]:
    layout: dict[int, list[tuple[int, int]]] = {}
    for i in sorted(X.dims):
        for j in sorted(Y.dims):
            layout.setdefault(i + j, []).append((i, j))
    return layout


def tensor_map(f, g, X1, X2, Y1, Y2) -> dict[int, RatMatrix]:
    """f ⊗ g : X1 ⊗ Y1 -> X2 ⊗ Y2 (degree-0 chain maps, no sign)."""
    src = tensor_layout(X1, Y1)
    tgt = tensor_layout(X2, Y2)
    out = {}
    for n, parts in src.items():
        tparts = tgt.get(n, [])
        if not tparts:
            continue
        rows = []
        for (i2, j2) in tparts:
            row = []
            for (i, j) in parts:
                if (i, j) == (i2, j2):
                    row.append(kron(chain_map_component(f, X1, X2, i), chain_map_component(g, Y1, Y2, j)))
                else:
                    row.append(RatMatrix(X2.dim(i2) * Y2.dim(j2), X1.dim(i) * Y1.dim(j)))
            rows.append(row)
        out[n] = block(rows)
    return out


def matrix_to_doc(m: RatMatrix) -> list[list[str]]:
    return [[format_rational(x) for x in r] for r in m.data]


def matrix_from_doc(doc, rows: int | None = None, cols: int | None = None) -> RatMatrix:
    data = [[rational(x) for x in r] for r in doc]
    if rows is None:
        rows = len(data)
    if cols is None:
        cols = len(data[0]) if data else 0
    if not data:
        return RatMatrix(rows, cols)
    return RatMatrix(rows, cols, data)


def complex_to_doc(X: ChainComplex) -> dict:
    return {"dims": {str(k): v for k, v in sorted(X.dims.items())},
            "differentials": {str(k): matrix_to_doc(d) for k, d in sorted(X.diffs.items())}}


def complex_from_doc(doc: Mapping) -> ChainComplex:
    dims = {int(k): int(v) for k, v in doc.get("dims", {}).items()}
    diffs = {}
    for k, m in doc.get("differentials", {}).items():
        k = int(k)
        diffs[k] = matrix_from_doc(m, dims.get(k - 1, 0), dims.get(k, 0))
    return ChainComplex(dims, diffs)

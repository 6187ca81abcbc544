"""
Grid models for relative dimension one: an open X ⊆ Y × ℝ sampled on a
rectangular grid, functions on it, the fiber derivative, fiber
integration, the Poincaré homotopy and a bump section of integration.

Rows of every array are base nodes, columns are fiber nodes.  A point
base is a single row.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .exactlin import homology
from .poset import FinPoset, MonotoneMap
from .shv import constant, derived_pushforward

DEFAULT_L = 10.0
DEFAULT_N = 4001            # fiber step 5e-3 on [-10, 10]
DEFAULT_BASE_STEP = 1e-2
BOUNDARY_TOL = 1e-12
KERNEL_TOL = 1e-10
SVD_TOL = 1e-8


class DerhamError(ValueError):
    pass


def _runs(row: np.ndarray) -> list[tuple[int, int]]:
    """Maximal True runs of a boolean row as (start, stop) with stop exclusive."""
    padded = np.concatenate(([False], row, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return [(int(a), int(b)) for a, b in zip(edges[::2], edges[1::2])]


class GridRegion:
    """Sampled open subset of (base) × [-L, L]."""

    def __init__(self, base="point", L: float = DEFAULT_L, m: int | None = None, n: int = DEFAULT_N,
                 mask: np.ndarray | None = None):
        if base == "point":
            self.base = "point"
            m = 1
            self.ys = np.zeros(1)
        else:
            a, b = map(float, base)
            if not b > a:
                raise DerhamError("base interval must have b > a")
            self.base = (a, b)
            if m is None:
                m = int(round((b - a) / DEFAULT_BASE_STEP)) + 1
            if m < 2:
                raise DerhamError("an interval base needs at least two nodes")
            self.ys = np.round(np.linspace(a, b, m), 12)
        if n < 3 or n % 2 == 0:
            raise DerhamError("fiber node count must be odd and at least 3")
        self.L = float(L)
        self.m, self.n = m, n
        self.h = 2 * self.L / (n - 1)
        self.ts = (np.arange(n) - (n - 1) // 2) * self.h
        if mask is None:
            mask = np.ones((m, n), dtype=bool)
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (m, n):
            raise DerhamError(f"mask shape {mask.shape} differs from grid {(m, n)}")
        self.mask = mask
        self.mask.setflags(write=False)
        self._runs = [_runs(r) for r in mask]

    @classmethod
    def from_predicate(cls, pred: Callable[[np.ndarray, np.ndarray], np.ndarray], base="point",
                       L: float = DEFAULT_L, m: int | None = None, n: int = DEFAULT_N) -> "GridRegion":
        """Mask from a vectorized membership predicate pred(y, t)."""
        shell = cls(base, L, m, n)
        Y, T = np.meshgrid(shell.ys, shell.ts, indexing="ij")
        return cls(base, L, shell.m, n, np.broadcast_to(pred(Y, T), Y.shape))

    def runs(self, i: int) -> list[tuple[int, int]]:
        """Fiber components over base node i; each is an interval of grid nodes."""
        return self._runs[i]

    def components(self) -> list[int]:
        return [len(r) for r in self._runs]

    def with_mask(self, mask: np.ndarray) -> "GridRegion":
        return GridRegion(self.base, self.L, self.m, self.n, mask)

    def base_shape(self) -> "GridRegion":
        """The base as a region with a one-node fiber (used to carry base functions)."""
        return GridRegion(self.base, self.L, self.m, 3, np.ones((self.m, 3), dtype=bool))

    def to_doc(self) -> dict:
        return {"base": "point" if self.base == "point" else list(self.base), "window": self.L,
                "steps": [self.m, self.n],
                "mask": [[[a, b - a] for a, b in r] for r in self._runs]}

    @classmethod
    def from_doc(cls, doc: Mapping) -> "GridRegion":
        try:
            base = doc["base"]
            m, n = (int(x) for x in doc["steps"])
            L = float(doc.get("window", DEFAULT_L))
            mask = np.zeros((1 if base == "point" else m, n), dtype=bool)
            rows = doc["mask"]
            if len(rows) != mask.shape[0]:
                raise DerhamError(f"mask has {len(rows)} rows, expected {mask.shape[0]}")
            for i, row in enumerate(rows):
                for start, length in row:
                    if start < 0 or length < 1 or start + length > n:
                        raise DerhamError(f"run {[start, length]} of row {i} is outside the fiber window")
                    mask[i, start:start + length] = True
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DerhamError):
                raise
            raise DerhamError(f"malformed region document: {exc}") from None
        return cls(base, L, mask.shape[0], n, mask)


class GridFunction:
    """Values on the grid, zero off the mask, and flat at every mask edge (the decay proxy)."""

    def __init__(self, region: GridRegion, values, boundary_tol: float = BOUNDARY_TOL, check: bool = True):
        v = np.array(values, dtype=float)
        if v.shape != region.mask.shape:
            raise DerhamError(f"values shape {v.shape} differs from grid {region.mask.shape}")
        v[~region.mask] = 0.0
        self.region = region
        self.values = v
        self.values.setflags(write=False)
        self.boundary_tol = boundary_tol
        if check:
            err = self.edge_values()
            if err > boundary_tol:
                raise DerhamError(f"decay proxy violated: |value| = {err:.3e} at a mask edge "
                                  f"exceeds {boundary_tol:.0e}")

    @classmethod
    def sample(cls, region: GridRegion, fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
               boundary_tol: float = BOUNDARY_TOL, check: bool = True) -> "GridFunction":
        Y, T = np.meshgrid(region.ys, region.ts, indexing="ij")
        return cls(region, np.broadcast_to(fn(Y, T), Y.shape), boundary_tol, check)

    def edge_values(self) -> float:
        worst = 0.0
        for i in range(self.region.m):
            for a, b in self.region.runs(i):
                worst = max(worst, abs(self.values[i, a]), abs(self.values[i, b - 1]))
        return worst

    def sup(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def __sub__(self, other: "GridFunction") -> np.ndarray:
        return self.values - other.values


@dataclass(frozen=True)
class BaseFunction:
    """A function of the base variable only."""

    ys: np.ndarray
    values: np.ndarray

    def sup(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


# finite differences ------------------------------------------------------------


def _fd_weights(offsets: Sequence[int]) -> np.ndarray:
    """Weights w with Σ w_j f(t + o_j h) ≈ h f'(t), exact for polynomials of degree < len(offsets)."""
    k = len(offsets)
    V = np.vander(np.asarray(offsets, dtype=float), k, increasing=True).T
    rhs = np.zeros(k)
    rhs[1] = 1.0
    return np.linalg.solve(V, rhs)


_WEIGHTS: dict[tuple[int, ...], np.ndarray] = {}


def _weights(offsets: tuple[int, ...]) -> np.ndarray:
    w = _WEIGHTS.get(offsets)
    if w is None:
        w = _WEIGHTS[offsets] = _fd_weights(offsets)
    return w


def _derivative_run(v: np.ndarray, h: float, width: int = 9) -> np.ndarray:
    """d/dt on one run: centred 9-point stencil inside, one-sided stencils near the run edges."""
    N = len(v)
    out = np.zeros(N)
    if N < 2:
        return out
    w = min(width, N)
    half = w // 2
    if N >= w:
        c = _weights(tuple(range(-half, half + 1)))
        inner = slice(half, N - half)
        out[inner] = sum(c[j] * v[j: N - w + 1 + j] for j in range(w))
    for i in list(range(min(half, N))) + list(range(max(N - half, half), N)):
        start = min(max(i - half, 0), N - w)
        offs = tuple(range(start - i, start - i + w))
        out[i] = float(np.dot(_weights(offs), v[start:start + w]))
    return out / h


def fiber_derivative(f: GridFunction) -> GridFunction:
    """∂_t on each mask run; the result is masked."""
    R = f.region
    out = np.zeros_like(f.values)
    for i in range(R.m):
        for a, b in R.runs(i):
            out[i, a:b] = _derivative_run(f.values[i, a:b], R.h)
    return GridFunction(R, out, f.boundary_tol, check=False)


def _trapezoid(v: np.ndarray, h: float) -> float:
    if len(v) < 2:
        return 0.0
    return h * (float(np.sum(v)) - 0.5 * (v[0] + v[-1]))


def fiber_integrate(f: GridFunction) -> BaseFunction:
    """Trapezoid rule over the fiber mask at every base node."""
    R = f.region
    vals = np.array([sum(_trapezoid(f.values[i, a:b], R.h) for a, b in R.runs(i)) for i in range(R.m)])
    return BaseFunction(R.ys, vals)


def _component_integrals(f: GridFunction) -> list[list[float]]:
    R = f.region
    return [[_trapezoid(f.values[i, a:b], R.h) for a, b in R.runs(i)] for i in range(R.m)]


def poincare_homotopy(f: GridFunction, kernel_tol: float = KERNEL_TOL) -> GridFunction:
    """H(f)(y, t) = ∫ f(y, τ) dτ from the lower end of the fiber component up to t.

    Requires f to integrate to zero over every fiber component.  The
    cumulative trapezoid carries the Euler-Maclaurin end corrections in h²
    and h⁴ (built from f' and f'''), so ∂_t H(f) = f holds to sixth order.
    """
    R = f.region
    for i, ints in enumerate(_component_integrals(f)):
        for j, s in enumerate(ints):
            if abs(s) > kernel_tol:
                raise DerhamError(f"f is not in the kernel of fiber integration: component {j} over base "
                                  f"node {i} integrates to {s:.3e}")
    d1 = fiber_derivative(f)
    d3 = fiber_derivative(fiber_derivative(d1))
    df, df3 = d1.values, d3.values
    out = np.zeros_like(f.values)
    h = R.h
    for i in range(R.m):
        for a, b in R.runs(i):
            v = f.values[i, a:b]
            cum = np.concatenate(([0.0], np.cumsum(0.5 * h * (v[1:] + v[:-1]))))
            cum -= (h ** 2 / 12.0) * (df[i, a:b] - df[i, a])
            cum += (h ** 4 / 720.0) * (df3[i, a:b] - df3[i, a])
            out[i, a:b] = cum
    return GridFunction(R, out, max(f.boundary_tol, kernel_tol))


def _bump(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def bump_profile(region: GridRegion, i: int, run: tuple[int, int]) -> np.ndarray:
    """e^{-1/(1-s²)} rescaled to a run padded by half a step, unnormalized, on the run's nodes."""
    a, b = run
    t0 = region.ts[a] - 0.5 * region.h
    t1 = region.ts[b - 1] + 0.5 * region.h
    c, w = 0.5 * (t0 + t1), 0.5 * (t1 - t0)
    return _bump((region.ts[a:b] - c) / w)


def integration_section(g: BaseFunction | Sequence[float], region: GridRegion) -> GridFunction:
    """g(y) ρ_y(t) with ρ_y a unit-integral bump on the largest fiber component over y."""
    vals = np.asarray(g.values if isinstance(g, BaseFunction) else g, dtype=float)
    if vals.shape != (region.m,):
        raise DerhamError(f"base function has {vals.shape} values, expected {region.m}")
    out = np.zeros((region.m, region.n))
    for i in range(region.m):
        if vals[i] == 0:
            continue
        runs = region.runs(i)
        if not runs:
            raise DerhamError(f"empty fiber over base node {i} where g = {vals[i]:g}")
        a, b = max(runs, key=lambda r: (r[1] - r[0], -r[0]))
        rho = bump_profile(region, i, (a, b))
        mass = _trapezoid(rho, region.h)
        if mass <= 0:
            raise DerhamError(f"fiber component over base node {i} is too short for a bump")
        out[i, a:b] = vals[i] * rho / mass
    return GridFunction(region, out, check=False)


def convex_hull_of_section(U: Callable[[np.ndarray, np.ndarray], np.ndarray], nu: Sequence[float] | float,
                           base="point", L: float = DEFAULT_L, m: int | None = None, n: int = DEFAULT_N
                           ) -> GridRegion:
    """Nodes (y, a) whose vertical segment to (y, ν(y)) stays in U, checked on grid nodes."""
    shell = GridRegion.from_predicate(U, base, L, m, n)
    nu = np.broadcast_to(np.asarray(nu, dtype=float), (shell.m,))
    inside_graph = np.asarray(U(shell.ys, nu), dtype=bool)
    if not np.all(inside_graph):
        bad = int(np.flatnonzero(~inside_graph)[0])
        raise DerhamError(f"section leaves U over base node {bad} (y = {shell.ys[bad]:g})")
    mask = np.zeros_like(shell.mask)
    for i in range(shell.m):
        row = shell.mask[i]
        lo = int(np.searchsorted(shell.ts, nu[i], side="right")) - 1   # last node <= ν
        hi = lo + 1                                                      # first node > ν
        j = lo
        while j >= 0 and row[j]:
            mask[i, j] = True
            j -= 1
        j = hi
        while j < shell.n and row[j]:
            mask[i, j] = True
            j += 1
    out = shell.with_mask(mask)
    for i in range(out.m):
        if len(out.runs(i)) > 1:
            raise DerhamError(f"fiber over base node {i} is not a single interval")
        if not out.runs(i):
            raise DerhamError(f"fiber over base node {i} misses the section")
    return out


# homology cross-check ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _run_corank(N: int, tol: float = SVD_TOL) -> int:
    """Corank of the staggered difference node -> cell on a run of N nodes, with zero padding.

    With quadrature weights folded in, the (N+1) x N matrix D has ±1 entries;
    its singular values are the square roots of the eigenvalues of the
    tridiagonal DᵀD = tridiag(-1, 2, -1).
    """
    if N == 0:
        return 0
    ev = eigvalsh_tridiagonal(np.full(N, 2.0), np.full(N - 1, -1.0))
    sv = np.sqrt(np.clip(ev, 0.0, None))
    return (N + 1) - int(np.sum(sv > tol))


def betti_crosscheck_family(region: GridRegion, tol: float = SVD_TOL) -> list[int]:
    """Numeric dim of the cokernel of ∂_t over every base node."""
    return [sum(_run_corank(b - a, tol) for a, b in region.runs(i)) for i in range(region.m)]


def betti_crosscheck(region: GridRegion, tol: float = SVD_TOL) -> int:
    if region.base != "point":
        raise DerhamError("betti_crosscheck needs a point base; use betti_crosscheck_family")
    return betti_crosscheck_family(region, tol)[0]


# verification harness ----------------------------------------------------------


def region_test_functions(region: GridRegion) -> tuple[GridFunction, GridFunction]:
    """A flat function g (a Gaussian centred on every fiber component) and its exact t-derivative.

    The width is a fixed fraction of the component, small enough that g is
    below the decay tolerance at the component's edge nodes.
    """
    g = np.zeros((region.m, region.n))
    dg = np.zeros_like(g)
    for i in range(region.m):
        for k, (a, b) in enumerate(region.runs(i)):
            t0 = region.ts[a] - 0.5 * region.h
            t1 = region.ts[b - 1] + 0.5 * region.h
            c, w = 0.5 * (t0 + t1), 0.5 * (t1 - t0)
            sigma = min(w / 8.5, 1.0)
            s = (region.ts[a:b] - c) / sigma
            amp = 1.0 + 0.25 * k + 0.1 * np.sin(region.ys[i])
            e = np.exp(-0.5 * s * s)
            g[i, a:b] = amp * e
            dg[i, a:b] = -amp * s * e / sigma
    return GridFunction(region, g), GridFunction(region, dg)


def verify_region(region: GridRegion) -> dict:
    """The four numeric identities on one region, as a report."""
    checks = []
    g, dg = region_test_functions(region)
    if region.mask.any():
        H = poincare_homotopy(dg)
        err = float(np.max(np.abs(fiber_derivative(H).values - dg.values)))
        checks.append({"name": "d_t H = id on the kernel", "max_error": err, "tolerance": 1e-6, "pass": err <= 1e-6})
        err = float(np.max(np.abs(poincare_homotopy(fiber_derivative(g)).values - g.values)))
        checks.append({"name": "H d_t = id", "max_error": err, "tolerance": 1e-6, "pass": err <= 1e-6})
        err = fiber_integrate(fiber_derivative(g)).sup()
        checks.append({"name": "Stokes", "max_error": err, "tolerance": 1e-8, "pass": err <= 1e-8})
        base = np.array([1.0 + 0.5 * np.cos(y) if region.runs(i) else 0.0 for i, y in enumerate(region.ys)])
        err = float(np.max(np.abs(fiber_integrate(integration_section(base, region)).values - base)))
        checks.append({"name": "integrate after section = id", "max_error": err, "tolerance": 1e-8,
                       "pass": err <= 1e-8})
    else:
        for name, tol in (("d_t H = id on the kernel", 1e-6), ("H d_t = id", 1e-6), ("Stokes", 1e-8),
                          ("integrate after section = id", 1e-8)):
            checks.append({"name": name, "max_error": 0.0, "tolerance": tol, "pass": True})
    return {"region": {"base": region.to_doc()["base"], "window": region.L, "steps": [region.m, region.n]},
            "boundary_tol": BOUNDARY_TOL, "checks": checks}


# combinatorial side ---------------------------------------------------------------


def fiber_model(components: int):
    """Face poset of a disjoint union of open intervals, each cut at one vertex: e0 > v < e1."""
    labels, rel = [], []
    for c in range(components):
        e0, v, e1 = f"e{c}.0", f"v{c}", f"e{c}.1"
        labels += [e0, v, e1]
        rel += [(v, e0), (v, e1)]
    return FinPoset(labels, relations=rel)


def combinatorial_h0_family(region: GridRegion) -> list[int]:
    """dim H₀ of the pushforward of the constant sheaf, over every base node.

    Over each base node the stalk is computed by base change to the fiber:
    the constant sheaf on the fiber model is pushed forward to a point.
    """
    cache: dict[int, int] = {}
    out = []
    for k in region.components():
        if k not in cache:
            if k == 0:
                cache[k] = 0
            else:
                Q = fiber_model(k)
                pushed = derived_pushforward(MonotoneMap.to_point(Q), constant(Q))
                cache[k] = homology(pushed.stalks[0]).get(0, 0)
        out.append(cache[k])
    return out


def combinatorial_h0(region: GridRegion) -> int:
    if region.base != "point":
        raise DerhamError("combinatorial_h0 needs a point base; use combinatorial_h0_family")
    return combinatorial_h0_family(region)[0]

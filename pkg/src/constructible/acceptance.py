"""
The nine acceptance checks, runnable from tests and from ``selftest``.

Each check takes a seed and returns a CheckResult; randomized parts draw
from ``random.Random(seed + offset)`` so that every check is reproducible
on its own.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import derham
from .cosheaf import certify_closed_image, CombinatorialMap, presentation_from_resolution, verify_certificate, \
    _strata
from .exactlin import RatMatrix, homology
from .poset import FinPoset, MonotoneMap, product, projection, product_map
from .shv import (constant, derived_pushforward, pullback, pseudo_free_resolve, realize, recollement_triangle,
                  tensor)
from .shv.random import random_poset, random_rep
from .simplicial import AlmostSimplicialComplex, face_poset, simplicial_betti, simplicial_closure, sphere, \
    standard_simplex
from .stratify import (Stratification, is_proper, is_union_of_strata, proper_refine, refine_stratification)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.name}: {self.detail}"


def _stalk_homology(F) -> list[dict[int, int]]:
    return [homology(X) for X in F.stalks]


def _point_betti(K: AlmostSimplicialComplex) -> list[int]:
    Q = face_poset(K)
    pushed = derived_pushforward(MonotoneMap.to_point(Q), constant(Q))
    h = homology(pushed.stalks[0])
    return [h.get(k, 0) for k in range(K.dimension() + 1)]


def random_closed_complex(rng: random.Random, max_vertices: int = 8) -> AlmostSimplicialComplex:
    nv = rng.randint(1, max_vertices)
    verts = "abcdefgh"[:nv]
    tops = [rng.sample(verts, rng.randint(1, min(4, nv))) for _ in range(rng.randint(1, 5))]
    return simplicial_closure(AlmostSimplicialComplex(verts, tops))


def check_pushforward_shape(seed: int = 0) -> tuple[bool, str]:
    fixed = [("solid triangle", standard_simplex(2), [1, 0, 0]),
             ("triangle boundary", sphere(1), [1, 1]),
             ("tetrahedron boundary", sphere(2), [1, 0, 1]),
             ("two disjoint edges", AlmostSimplicialComplex.from_simplices(["a", "b", "ab", "c", "d", "cd"]), [2, 0])]
    for name, K, want in fixed:
        got = _point_betti(K)
        if got != want or simplicial_betti(K) != want:
            return False, f"{name}: pushforward {got}, oracle {simplicial_betti(K)}, expected {want}"
    rng = random.Random(seed + 1)
    for i in range(20):
        K = random_closed_complex(rng)
        got, want = _point_betti(K), simplicial_betti(K)
        if got != want:
            return False, f"random complex {i}: pushforward {got} vs oracle {want}"
    return True, "4 named complexes and 20 random complexes agree exactly"


def _random_reps(seed: int, count: int = 100):
    rng = random.Random(seed + 2)
    for _ in range(count):
        P = random_poset(rng, rng.randint(1, 8))
        yield P, random_rep(rng, P)


def check_resolution(seed: int = 0) -> tuple[bool, str]:
    worst = 0
    for i, (P, F) in enumerate(_random_reps(seed)):
        C = pseudo_free_resolve(F)
        if _stalk_homology(realize(C)) != _stalk_homology(F):
            return False, f"instance {i}: realized resolution has different stalk homology"
        hi = F.degree_range()[1] if F.degree_range() else 0
        length = (max(C.gens) - hi) if C.gens else 0
        if length > 2 * len(P):
            return False, f"instance {i}: length {length} exceeds 2|P| = {2 * len(P)}"
        worst = max(worst, length)
    return True, f"100 instances, stalk homology equal, longest resolution {worst}"


def check_recollement(seed: int = 0) -> tuple[bool, str]:
    rng = random.Random(seed + 3)
    for i in range(100):
        P = random_poset(rng, rng.randint(1, 8))
        F = random_rep(rng, P)
        U = rng.choice(P.up_sets())
        rec = recollement_triangle(P, U, F)
        for seq in (rec.lower, rec.upper):
            for r in seq.verify():
                if not (r.exact and r.comparison_quasi_iso):
                    return False, f"instance {i}, {seq.name}, stalk {r.element}: not exact"
        if not rec.identification.is_quasi_isomorphism():
            return False, f"instance {i}: fiber is not identified with i_* i^! F"
    return True, "100 instances, both sequences exact at every stalk"


def random_monotone_map(rng: random.Random, source: FinPoset, target: FinPoset) -> MonotoneMap | None:
    """Assign values along a linear extension, each above the values of everything below."""
    for _ in range(50):
        value: dict[int, int] = {}
        ok = True
        for x in source.linear_extension():
            below = [value[y] for y in range(len(source)) if source.lt(y, x)]
            choices = [q for q in target if all(target.le(b, q) for b in below)]
            if not choices:
                ok = False
                break
            value[x] = rng.choice(choices)
        if ok:
            return MonotoneMap(source, target, tuple(value[x] for x in source))
    return None


def check_projection_base_change(seed: int = 0) -> tuple[bool, str]:
    rng = random.Random(seed + 4)
    done = 0
    while done < 50:
        P = random_poset(rng, rng.randint(1, 4), prefix="p")
        R = random_poset(rng, rng.randint(1, 3), prefix="r")
        PR = product(P, R)
        f = projection(P, R, PR)
        F = random_rep(rng, PR, max_gens=2)
        G = random_rep(rng, P, max_gens=2)
        lhs = derived_pushforward(f, tensor(F, pullback(f, G)))
        rhs = tensor(derived_pushforward(f, F), G)
        if _stalk_homology(lhs) != _stalk_homology(rhs):
            return False, f"instance {done}: projection formula fails"
        P2 = random_poset(rng, rng.randint(1, 4), prefix="q")
        g = random_monotone_map(rng, P2, P)
        if g is None:
            continue
        P2R = product(P2, R)
        f2 = projection(P2, R, P2R)
        gid = product_map(g, MonotoneMap.identity(R))
        gid = MonotoneMap(P2R, PR, gid.assignment)
        a = pullback(g, derived_pushforward(f, F))
        b = derived_pushforward(f2, pullback(gid, F))
        if _stalk_homology(a) != _stalk_homology(b):
            return False, f"instance {done}: base change fails"
        done += 1
    return True, "50 product instances: projection formula and base change hold"


def _product_pushforward(B: FinPoset, fiber: FinPoset):
    BF = product(B, fiber)
    return _stalk_homology(derived_pushforward(projection(B, fiber, BF), constant(BF)))


def check_homology_invariance(seed: int = 0) -> tuple[bool, str]:
    rng = random.Random(seed + 5)
    pairs = [("interval", face_poset(standard_simplex(1)), "solid triangle", face_poset(standard_simplex(2))),
             ("circle", face_poset(sphere(1)), "square boundary",
              face_poset(simplicial_closure(AlmostSimplicialComplex.from_simplices(["ab", "bc", "cd", "ad"])))),
             ("point", FinPoset.point(), "tetrahedron", face_poset(standard_simplex(3)))]
    bases = [FinPoset.chain(2), face_poset(sphere(1)), random_poset(rng, 4, prefix="b")]
    for B in bases:
        for n1, F1, n2, F2 in pairs:
            if _product_pushforward(B, F1) != _product_pushforward(B, F2):
                return False, f"{n1} vs {n2} over a base of {len(B)} elements differ"
    return True, f"{len(pairs)} fiber pairs over {len(bases)} bases give equal stalk homology"


def _check_certificate(m: CombinatorialMap) -> str | None:
    c = certify_closed_image(m)
    v = verify_certificate(m, c)
    if not v:
        return f"verification failed at step {v.step}: {v.reason}"
    nstrata = len(_strata(frozenset(range(len(m.space))), list(m.sources) + list(m.targets)))
    if len(c.steps) > nstrata:
        return f"{len(c.steps)} steps exceed {nstrata} strata"
    for st in c.steps:
        if st.Mbar @ st.Nbar @ st.Mbar != st.Mbar:
            return "MNM != M"
    return None


def random_combinatorial_map(rng: random.Random, max_elements: int = 12, max_sets: int = 6) -> CombinatorialMap:
    P = random_poset(rng, rng.randint(1, max_elements))
    n_sets = rng.randint(1, max_sets)
    nt = rng.randint(0, n_sets)
    opens = [P.up_closure(rng.sample(range(len(P)), rng.randint(1, min(2, len(P))))) for _ in range(n_sets)]
    src, tgt = opens[:nt], opens[nt:]
    rows = [[(rng.randint(-3, 3) if U <= V else 0) for U in src] for V in tgt]
    M = RatMatrix(len(tgt), len(src), rows) if src and tgt else RatMatrix(len(tgt), len(src))
    return CombinatorialMap(P, src, tgt, M)


def check_certificates(seed: int = 0) -> tuple[bool, str]:
    n_pres = 0
    for i, (P, F) in enumerate(_random_reps(seed)):
        pres = presentation_from_resolution(pseudo_free_resolve(F))
        for k, m in pres.maps.items():
            err = _check_certificate(m)
            if err:
                return False, f"presentation {i}, degree {k}: {err}"
            n_pres += 1
    rng = random.Random(seed + 6)
    for i in range(100):
        err = _check_certificate(random_combinatorial_map(rng))
        if err:
            return False, f"random map {i}: {err}"
    return True, f"{n_pres} presentation differentials and 100 random maps certified and verified"


def poincare_battery() -> list[tuple[str, Callable]]:
    e = np.exp
    return [
        ("t e^-t^2", lambda y, t: t * e(-t * t)),
        ("(1-2t^2) e^-t^2", lambda y, t: (1 - 2 * t * t) * e(-t * t)),
        ("e^-(t-1)^2 - e^-(t+1)^2", lambda y, t: e(-(t - 1) ** 2) - e(-(t + 1) ** 2)),
        ("t^3 e^-t^2/2", lambda y, t: t ** 3 * e(-t * t / 2)),
        ("sin(3t) e^-t^2", lambda y, t: np.sin(3 * t) * e(-t * t)),
        ("(t^2-1/2) e^-t^2", lambda y, t: (t * t - 0.5) * e(-t * t)),
        ("t e^-(1+y^2)t^2", lambda y, t: t * e(-(1 + y * y) * t * t)),
        ("-2(t-y) e^-(t-y)^2", lambda y, t: -2 * (t - y) * e(-(t - y) ** 2)),
        ("sqrt2 e^-2(t-2)^2 - e^-(t+1)^2", lambda y, t: np.sqrt(2) * e(-2 * (t - 2) ** 2) - e(-(t + 1) ** 2)),
        ("-4t^3 e^-t^4", lambda y, t: -4 * t ** 3 * e(-t ** 4)),
    ]


def check_poincare(seed: int = 0) -> tuple[bool, str]:
    start = time.perf_counter()
    R = derham.GridRegion(base=(0.0, 1.0))
    worst = 0.0
    for name, fn in poincare_battery():
        f = derham.GridFunction.sample(R, fn)
        H = derham.poincare_homotopy(f)
        err = float(np.max(np.abs(derham.fiber_derivative(H).values - f.values)))
        worst = max(worst, err)
        if err > 1e-6:
            return False, f"{name}: |d_t H(f) - f| = {err:.2e} > 1e-6"
    stokes = 0.0
    for fn in (lambda y, t: np.exp(-t * t), lambda y, t: np.exp(-(t - y) ** 2) * np.cos(t),
               lambda y, t: 1 / np.cosh(2 * t) ** 12):
        g = derham.GridFunction.sample(R, fn)
        stokes = max(stokes, derham.fiber_integrate(derham.fiber_derivative(g)).sup())
    if stokes > 1e-8:
        return False, f"Stokes error {stokes:.2e} > 1e-8"
    base = 1.0 + R.ys ** 2
    sec = float(np.max(np.abs(derham.fiber_integrate(derham.integration_section(base, R)).values - base)))
    if sec > 1e-8:
        return False, f"section error {sec:.2e} > 1e-8"
    elapsed = time.perf_counter() - start
    if elapsed >= 30:
        return False, f"took {elapsed:.1f} s"
    return True, f"worst |d_t H(f) - f| = {worst:.1e}, Stokes {stokes:.1e}, section {sec:.1e}"


def derham_families() -> list[tuple[str, derham.GridRegion]]:
    G = derham.GridRegion
    return [
        ("one interval", G.from_predicate(lambda y, t: np.abs(t) < 1)),
        ("two intervals", G.from_predicate(lambda y, t: (np.abs(t) < 2) & (t != 0))),
        ("three intervals", G.from_predicate(lambda y, t: (np.abs(t) < 3) & (np.abs(np.abs(t) - 1) > 0.2))),
        ("empty", G.from_predicate(lambda y, t: np.zeros_like(t, dtype=bool))),
        ("widening intervals", G.from_predicate(lambda y, t: np.abs(t) < 1 + y * y, base=(-1.0, 1.0))),
        ("fiber splitting", G.from_predicate(lambda y, t: (np.abs(t) < 1) & ((t != 0) | (y <= 0)),
                                             base=(-0.5, 0.5))),
        ("convex hull of a section", derham.convex_hull_of_section(lambda y, t: ~((t == 0) & (y > 0)), 1.0,
                                                                   base=(-0.5, 0.5))),
    ]


def check_betti_crosscheck(seed: int = 0) -> tuple[bool, str]:
    for name, R in derham_families():
        numeric = derham.betti_crosscheck_family(R)
        comb = derham.combinatorial_h0_family(R)
        if numeric != comb:
            return False, f"{name}: numeric {sorted(set(numeric))} vs combinatorial {sorted(set(comb))}"
    split = dict(derham_families())["fiber splitting"]
    numeric = derham.betti_crosscheck_family(split)
    want = [1 if y <= 0 else 2 for y in split.ys]
    if numeric != want:
        return False, "fiber-splitting region does not give 1 for y <= 0 and 2 for y > 0"
    return True, f"{len(derham_families())} families agree; fiber splitting gives 1 (y <= 0) and 2 (y > 0)"


def check_stratification(seed: int = 0) -> tuple[bool, str]:
    X = FinPoset.from_covers(["z", "u-", "u+"], [("z", "u-"), ("z", "u+")])
    s = Stratification.from_assignment(X, FinPoset.chain(2), [0, 0, 1])
    ok, witness = is_proper(s)
    if ok or s.strata_poset.label(witness) != "1":
        return False, f"sign stratification: is_proper returned {(ok, witness)}"
    beta, psi = refine_stratification(s)
    if not is_proper(beta)[0] or psi.compose(beta.map).assignment != s.map.assignment:
        return False, "refinement of the sign stratification is not a proper refinement"
    rng = random.Random(seed + 9)
    for i in range(100):
        P = random_poset(rng, rng.randint(1, 10))
        theta = []
        for _ in range(rng.randint(0, 4)):
            a, b = rng.randrange(len(P)), rng.randrange(len(P))
            S = P.up_closure([a]) & P.down_closure([b])
            if S:
                theta.append(S)
        st = proper_refine(P, theta)
        if not is_proper(st)[0] or not all(is_union_of_strata(st, S) for S in theta):
            return False, f"random instance {i}: postconditions fail"
    return True, f"sign example witness '1', refined to {len(beta.strata_poset)} strata; 100 random collections"


CHECKS: list[tuple[int, str, Callable[[int], tuple[bool, str]]]] = [
    (1, "pushforward-shape agreement", check_pushforward_shape),
    (2, "resolution soundness", check_resolution),
    (3, "recollement exactness", check_recollement),
    (4, "projection formula and base change", check_projection_base_change),
    (5, "homology invariance", check_homology_invariance),
    (6, "closed-image certificates", check_certificates),
    (7, "Poincare lemma numerics", check_poincare),
    (8, "de Rham Betti cross-check", check_betti_crosscheck),
    (9, "stratification suite", check_stratification),
]


def run_check(number: int, seed: int = 0) -> CheckResult:
    num, name, fn = CHECKS[number - 1]
    start = time.perf_counter()
    try:
        passed, detail = fn(seed)
    except Exception as exc:  # a crash is a failure of the criterion, reported as such
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CheckResult(num, name, passed, detail, time.perf_counter() - start)


def run_all(seed: int = 0) -> list[CheckResult]:
    return [run_check(n, seed) for n, _, _ in CHECKS]

"""
Combinatorial maps between sums of cosheaves Sc(U) over open sets, the
presentation of a sheaf by such maps, and the closed-image certificate.

A combinatorial map has one column per source open U_t and one row per
target open V_s; the entry M[s][t] may be non-zero only when U_t ⊆ V_s.
The Schwartz cosheaf itself stays abstract: every slot is just a labelled
open set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .exactlin import ChainComplex, InvariantError, RatMatrix, homology, matrix_from_doc, matrix_to_doc, \
    right_pseudo_inverse
from .poset import FinPoset
from .shv.limits import evaluate
from .shv.rep import PosetRep, PseudoFreeComplex
from .shv.resolve import pseudo_free_resolve


class CosheafError(ValueError):
    pass


def _opens(P: FinPoset, sets) -> tuple[frozenset[int], ...]:
    out = []
    for S in sets:
        S = frozenset(S)
        if not P.is_up_set(S):
            raise CosheafError(f"{P.labels(S)} is not open")
        out.append(S)
    return tuple(out)


class CombinatorialMap:
    """⊕_t Sc(U_t) -> ⊕_s Sc(V_s) with constant coefficients."""

    def __init__(self, space: FinPoset, sources, targets, matrix: RatMatrix, check: bool = True):
        self.space = space
        self.sources = _opens(space, sources)
        self.targets = _opens(space, targets)
        if matrix.shape != (len(self.targets), len(self.sources)):
            raise CosheafError(f"matrix shape {matrix.shape} does not match "
                               f"{len(self.targets)} targets x {len(self.sources)} sources")
        self.matrix = matrix
        if check:
            bad = self.support_violation()
            if bad is not None:
                s, t = bad
                raise CosheafError(f"support condition fails at row {s}, column {t}")

    def support_violation(self) -> tuple[int, int] | None:
        for s, V in enumerate(self.targets):
            for t, U in enumerate(self.sources):
                if self.matrix[s, t] and not U <= V:
                    return s, t
        return None

    def to_doc(self) -> dict:
        P = self.space
        return {"space": P.to_doc(),
                "sources": [sorted(map(str, P.labels(U))) for U in self.sources],
                "targets": [sorted(map(str, P.labels(V))) for V in self.targets],
                "matrix": matrix_to_doc(self.matrix)}

    @classmethod
    def from_doc(cls, doc: Mapping) -> "CombinatorialMap":
        try:
            P = FinPoset.from_doc(doc["space"])
            src = [[P.index(str(x)) for x in U] for U in doc["sources"]]
            tgt = [[P.index(str(x)) for x in V] for V in doc["targets"]]
            M = matrix_from_doc(doc.get("matrix", []), len(tgt), len(src))
        except (KeyError, TypeError) as exc:
            raise CosheafError(f"malformed combinatorial map document: {exc}") from None
        return cls(P, src, tgt, M)


class CombinatorialComplex:
    """Per degree a list of open sets; d_k is a combinatorial map from degree k to k - 1."""

    def __init__(self, space: FinPoset, terms: Mapping[int, Sequence], diffs: Mapping[int, RatMatrix]):
        self.space = space
        self.terms = {int(k): _opens(space, v) for k, v in terms.items() if len(v)}
        self.maps: dict[int, CombinatorialMap] = {}
        for k, m in diffs.items():
            if k in self.terms and k - 1 in self.terms:
                self.maps[k] = CombinatorialMap(space, self.terms[k], self.terms[k - 1], m)
        for k in self.maps:
            if k - 1 in self.maps and not (self.maps[k - 1].matrix @ self.maps[k].matrix).is_zero():
                raise InvariantError(f"d_{k - 1} d_{k} != 0")

    def d(self, k: int) -> CombinatorialMap | None:
        return self.maps.get(k)

    def substitute(self) -> ChainComplex:
        """Plug in Sc(U) := ℚ^U, with extension by zero U -> V as structure map."""
        layout = {k: [(t, sorted(U)) for t, U in enumerate(v)] for k, v in self.terms.items()}
        sizes = {k: sum(len(u) for _, u in v) for k, v in layout.items()}
        diffs = {}
        for k, cm in self.maps.items():
            rows = [[0] * sizes[k] for _ in range(sizes[k - 1])]
            roff, r = {}, 0
            for s, V in layout[k - 1]:
                roff[s] = {x: r + i for i, x in enumerate(V)}
                r += len(V)
            c = 0
            for t, U in layout[k]:
                for x in U:
                    for s in range(len(self.terms[k - 1])):
                        a = cm.matrix[s, t]
                        if a:
                            rows[roff[s][x]][c] = a
                    c += 1
            diffs[k] = RatMatrix(sizes[k - 1], sizes[k], rows)
        return ChainComplex(sizes, diffs)

    def to_doc(self) -> dict:
        P = self.space
        return {"space": P.to_doc(),
                "terms": {str(k): [sorted(map(str, P.labels(U))) for U in v] for k, v in sorted(self.terms.items())},
                "differentials": {str(k): matrix_to_doc(m.matrix) for k, m in sorted(self.maps.items())}}


def presentation_from_resolution(C: PseudoFreeComplex) -> CombinatorialComplex:
    """Generator p becomes the slot Sc(p⋆); matrices are copied verbatim."""
    P = C.base
    terms = {k: [P.up_closure([g]) for g in v] for k, v in C.gens.items()}
    return CombinatorialComplex(P, terms, C.diffs)


def global_sections_homology_presentation(F: PosetRep) -> CombinatorialComplex:
    return presentation_from_resolution(pseudo_free_resolve(F))


def star_sections_homology(F: PosetRep) -> dict[int, int]:
    """Σ over points x of the homology of F's sections over x⋆ (the oracle for ``substitute``)."""
    total: dict[int, int] = {}
    for x in F.base:
        for k, h in homology(evaluate(F, F.base.up_closure([x]))).items():
            total[k] = total.get(k, 0) + h
    return {k: v for k, v in sorted(total.items()) if v}


# closed-image certificate ------------------------------------------------------


@dataclass
class CertificateStep:
    stratum: frozenset[int]
    T1: tuple[int, ...]
    S1: tuple[int, ...]
    Mbar: RatMatrix
    Nbar: RatMatrix


@dataclass
class ClosedImageCertificate:
    steps: list[CertificateStep] = field(default_factory=list)

    def to_doc(self, P: FinPoset) -> dict:
        return {"steps": [{"stratum": sorted(map(str, P.labels(s.stratum))), "T1": list(s.T1), "S1": list(s.S1),
                           "Mbar": matrix_to_doc(s.Mbar), "Nbar": matrix_to_doc(s.Nbar)} for s in self.steps]}

    @classmethod
    def from_doc(cls, doc: Mapping, P: FinPoset) -> "ClosedImageCertificate":
        steps = []
        for st in doc.get("steps", []):
            T1, S1 = tuple(st["T1"]), tuple(st["S1"])
            steps.append(CertificateStep(frozenset(P.index(str(x)) for x in st["stratum"]), T1, S1,
                                         matrix_from_doc(st["Mbar"], len(S1), len(T1)),
                                         matrix_from_doc(st["Nbar"], len(T1), len(S1))))
        return cls(steps)


def _signature(x: int, sets: Sequence[frozenset[int]]) -> frozenset[int]:
    return frozenset(i for i, S in enumerate(sets) if x in S)


def _strata(remaining: frozenset[int], sets: Sequence[frozenset[int]]) -> dict[frozenset[int], frozenset[int]]:
    out: dict[frozenset[int], set[int]] = {}
    for x in remaining:
        out.setdefault(_signature(x, sets), set()).add(x)
    return {k: frozenset(v) for k, v in out.items()}


def _stratum_label(sig: frozenset[int], m: CombinatorialMap) -> str:
    nt = len(m.sources)
    names = [f"U{i}" for i in range(nt)] + [f"V{i}" for i in range(len(m.targets))]
    return "{" + ",".join(names[i] for i in sorted(sig)) + "}"


def _is_closed_in(P: FinPoset, Z: frozenset[int], remaining: frozenset[int]) -> bool:
    return (P.down_closure(Z) & remaining) == Z


def _good_position(remaining: frozenset[int], V: frozenset[int], sets: Sequence[frozenset[int]]) -> bool:
    return all((S & remaining) <= V or ((S & remaining) | V) == remaining for S in sets)


def certify_closed_image(m: CombinatorialMap) -> ClosedImageCertificate:
    """Peel off closed strata of the cover stratification, recording a pseudo-inverse at each step."""
    bad = m.support_violation()
    if bad is not None:
        raise CosheafError(f"support condition fails at row {bad[0]}, column {bad[1]}")
    P = m.space
    sets = list(m.sources) + list(m.targets)
    nt = len(m.sources)
    remaining = frozenset(range(len(P)))
    cert = ClosedImageCertificate()
    limit = len(_strata(remaining, sets))
    while remaining:
        strata = _strata(remaining, sets)
        sigs = list(strata)
        minimal = [a for a in sigs if not any(b < a for b in sigs)]
        sig = min(minimal, key=lambda a: _stratum_label(a, m))
        Z = strata[sig]
        V = remaining - Z
        if not _is_closed_in(P, Z, remaining) or not _good_position(remaining, V, sets):
            raise InvariantError("chosen stratum is not closed or its complement is not in good position")
        T1 = tuple(t for t in range(nt) if t in sig)
        S1 = tuple(s for s in range(len(m.targets)) if nt + s in sig)
        Mbar = m.matrix.submatrix(S1, T1)
        Nbar = right_pseudo_inverse(Mbar)
        cert.steps.append(CertificateStep(Z, T1, S1, Mbar, Nbar))
        remaining = V
        if len(cert.steps) > limit:
            raise InvariantError("certificate exceeded the number of strata")
    return cert


@dataclass
class VerificationResult:
    ok: bool
    step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def verify_certificate(m: CombinatorialMap, c: ClosedImageCertificate) -> VerificationResult:
    """Replay the certificate, re-deriving every step invariant from scratch."""
    P = m.space
    if m.support_violation() is not None:
        return VerificationResult(False, None, "support condition fails")
    sources, targets = list(m.sources), list(m.targets)
    remaining = frozenset(range(len(P)))
    for i, st in enumerate(c.steps):
        Z = frozenset(st.stratum)
        if not Z or not Z <= remaining:
            return VerificationResult(False, i, "stratum is empty or already eliminated")
        sig_u = {frozenset(t for t, U in enumerate(sources) if x in U) for x in Z}
        sig_v = {frozenset(s for s, V in enumerate(targets) if x in V) for x in Z}
        if len(sig_u) != 1 or len(sig_v) != 1:
            return VerificationResult(False, i, "stratum mixes points of different cover type")
        tu, sv = sig_u.pop(), sig_v.pop()
        whole = frozenset(x for x in remaining
                          if frozenset(t for t, U in enumerate(sources) if x in U) == tu
                          and frozenset(s for s, V in enumerate(targets) if x in V) == sv)
        if whole != Z:
            return VerificationResult(False, i, "stratum is not a full stratum of the remaining space")
        if P.down_closure(Z) & remaining != Z:
            return VerificationResult(False, i, "stratum is not closed in the remaining space")
        V = remaining - Z
        for S in sources + targets:
            S = S & remaining
            if not (S <= V or (S | V) == remaining):
                return VerificationResult(False, i, "complement is not in good position")
        if tuple(sorted(tu)) != tuple(st.T1) or tuple(sorted(sv)) != tuple(st.S1):
            return VerificationResult(False, i, "index sets T1/S1 do not match the stratum")
        if st.Mbar != m.matrix.submatrix(st.S1, st.T1):
            return VerificationResult(False, i, "Mbar is not the extracted submatrix")
        if st.Nbar.shape != (len(st.T1), len(st.S1)):
            return VerificationResult(False, i, "Nbar has the wrong shape")
        if st.Mbar @ st.Nbar @ st.Mbar != st.Mbar:
            return VerificationResult(False, i, "Mbar Nbar Mbar != Mbar")
        remaining = V
    if remaining:
        return VerificationResult(False, len(c.steps), "certificate does not exhaust the space")
    return VerificationResult(True)

"""Command-line front door.

Every verb reads JSON documents, calls one library entry point and writes a
canonical JSON report (sorted keys) carrying a "checks" array.  Exit status:
0 on success, 1 when a verification fails, 2 when an input cannot be parsed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from . import acceptance
from .cosheaf import (ClosedImageCertificate, CombinatorialMap, certify_closed_image,
                      presentation_from_resolution, verify_certificate)
from .derham import GridRegion, verify_region
from .poset import FinPoset, MonotoneMap
from .shv import (PosetRep, derived_pushforward, homology_dims_by_label, pseudo_free_resolve, realize,
                  resolution_length)
from .stratify import Stratification, is_proper, is_union_of_strata, proper_refine, refine_stratification


class InputError(Exception):
    """A document could not be read or does not match its schema."""


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def _parse(path: str, what: str, parser: Callable[[Any], Any]) -> Any:
    doc = _read_json(path)
    if not isinstance(doc, dict) and what != "sets":
        raise InputError(f"{path}: {what} document must be a JSON object, got {type(doc).__name__}")
    try:
        return parser(doc)
    except (ValueError, KeyError, TypeError, AttributeError, IndexError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        if isinstance(exc, KeyError):
            msg = f"missing key {msg!r}"
        raise InputError(f"{path}: {what}: {msg}") from None


def _map_parser(source: FinPoset):
    def parse(doc):
        target = FinPoset.from_doc(doc["target"])
        assignment = doc["map"]
        if not isinstance(assignment, dict):
            raise TypeError("'map' must be an object from source labels to target labels")
        return MonotoneMap.from_labels(source, target, {str(k): str(v) for k, v in assignment.items()})
    return parse


def _sets_parser(space: FinPoset):
    def parse(doc):
        sets = doc["sets"] if isinstance(doc, dict) else doc
        if not isinstance(sets, list):
            raise TypeError("expected a list of label lists")
        out = []
        for i, S in enumerate(sets):
            try:
                out.append(frozenset(space.index(str(x)) for x in S))
            except (ValueError, KeyError) as exc:
                raise ValueError(f"sets[{i}]: {exc}") from None
        return out
    return parse


def _check(name: str, passed: bool, **extra) -> dict:
    return {"name": name, "pass": bool(passed), **extra}


def _load_sheaf_and_map(args) -> tuple[PosetRep, MonotoneMap]:
    F = _parse(args.sheaf, "representation", PosetRep.from_doc)
    f = _parse(args.map, "map", _map_parser(F.base)) if args.map else MonotoneMap.to_point(F.base)
    return F, f


def _same_stalk_homology(F: PosetRep, C) -> bool:
    return realize(C).stalk_homology() == F.stalk_homology()


def cmd_homology(args) -> tuple[dict, int]:
    F, f = _load_sheaf_and_map(args)
    C = pseudo_free_resolve(F)
    G = derived_pushforward(f, F, C)
    hom = homology_dims_by_label(G)
    report = {"homology": {p: {str(k): v for k, v in h.items() if v} for p, h in hom.items()}}
    if len(f.target) == 1:
        h = next(iter(hom.values()))
        top = max((k for k, v in h.items() if v), default=-1)
        report["betti"] = [h.get(k, 0) for k in range(top + 1)]
    report["checks"] = [_check("resolution has the stalk homology of the input", _same_stalk_homology(F, C))]
    return report, 0 if all(c["pass"] for c in report["checks"]) else 1


def cmd_pushforward(args) -> tuple[dict, int]:
    F, f = _load_sheaf_and_map(args)
    C = pseudo_free_resolve(F)
    G = derived_pushforward(f, F, C)
    report = {"pushforward": G.to_doc(),
              "checks": [_check("resolution has the stalk homology of the input", _same_stalk_homology(F, C))]}
    return report, 0 if report["checks"][0]["pass"] else 1


def cmd_resolve(args) -> tuple[dict, int]:
    F = _parse(args.sheaf, "representation", PosetRep.from_doc)
    C = pseudo_free_resolve(F)
    length = resolution_length(F, C)
    checks = [_check("resolution has the stalk homology of the input", _same_stalk_homology(F, C)),
              _check("length at most 2|P|", length <= 2 * len(F.base), length=length)]
    report = {"resolution": C.to_doc(), "presentation": presentation_from_resolution(C).to_doc(),
              "checks": checks}
    return report, 0 if all(c["pass"] for c in checks) else 1


def cmd_refine(args) -> tuple[dict, int]:
    if args.stratification:
        if args.space or args.sets:
            raise InputError("--stratification cannot be combined with --space/--sets")
        s = _parse(args.stratification, "stratification", Stratification.from_doc)
        ok, witness = is_proper(s)
        beta, psi = refine_stratification(s)
        good = is_proper(beta)[0]
        factors = psi.compose(beta.map).assignment == s.map.assignment
        report = {"input_is_proper": ok,
                  "witness": None if witness is None else str(s.strata_poset.label(witness)),
                  "stratification": beta.to_doc(), "is_proper": good,
                  "refinement_map": dict(sorted(psi.to_doc().items())),
                  "checks": [_check("refinement is proper", good),
                             _check("refinement factors the input stratification", factors)]}
    else:
        if not (args.space and args.sets):
            raise InputError("refine needs --space and --sets, or --stratification")
        X = _parse(args.space, "poset", FinPoset.from_doc)
        theta = _parse(args.sets, "sets", _sets_parser(X))
        s = proper_refine(X, theta)
        good = is_proper(s)[0]
        report = {"stratification": s.to_doc(), "is_proper": good,
                  "checks": [_check("refinement is proper", good),
                             _check("every input set is a union of strata",
                                    all(is_union_of_strata(s, S) for S in theta))]}
    return report, 0 if all(c["pass"] for c in report["checks"]) else 1


def cmd_certify(args) -> tuple[dict, int]:
    m = _parse(args.map, "combinatorial map", CombinatorialMap.from_doc)
    if args.certificate:
        cert = _parse(args.certificate, "certificate", lambda d: ClosedImageCertificate.from_doc(d, m.space))
    else:
        cert = certify_closed_image(m)
    v = verify_certificate(m, cert)
    report = {"certificate": cert.to_doc(m.space),
              "verification": {"ok": v.ok, "step": v.step, "reason": v.reason},
              "checks": [_check("certificate verifies", v.ok, steps=len(cert.steps))]}
    return report, 0 if v.ok else 1


def cmd_derham(args) -> tuple[dict, int]:
    region = _parse(args.region, "region", GridRegion.from_doc)
    report = verify_region(region)
    return report, 0 if all(c["pass"] for c in report["checks"]) else 1


def cmd_selftest(args) -> tuple[dict, int]:
    numbers = args.only or [n for n, _, _ in acceptance.CHECKS]
    for n in numbers:
        if not 1 <= n <= len(acceptance.CHECKS):
            raise InputError(f"--only: no criterion {n}")
    results = []
    for n in numbers:
        r = acceptance.run_check(n, args.seed)
        print(r.line(), file=sys.stderr)
        results.append(r)
    # detail strings are deterministic; timings are left out of the document
    report = {"seed": args.seed,
              "checks": [_check(f"{r.number}. {r.name}", r.passed, detail=r.detail) for r in results]}
    return report, 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="constructible", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized parts (default 0)")
        p.set_defaults(fn=fn)
        return p

    for name, fn, help in (("homology", cmd_homology, "stalk homology of a derived pushforward"),
                           ("pushforward", cmd_pushforward, "derived pushforward along a monotone map")):
        p = verb(name, fn, help)
        p.add_argument("--sheaf", required=True, help="representation document")
        p.add_argument("--map", help="map document {target, map}; default: to a point")
    p = verb("resolve", cmd_resolve, "pseudo-free resolution and its combinatorial presentation")
    p.add_argument("--sheaf", required=True)
    p = verb("refine", cmd_refine, "proper refinement of a set collection or a stratification")
    p.add_argument("--space", help="poset document")
    p.add_argument("--sets", help="list of label lists, or {\"sets\": [...]}")
    p.add_argument("--stratification", help="stratification document")
    p = verb("certify-closed-image", cmd_certify, "closed-image certificate for a combinatorial map")
    p.add_argument("--map", required=True, help="combinatorial map document")
    p.add_argument("--certificate", help="verify this certificate instead of building one")
    p = verb("derham-verify", cmd_derham, "numeric Poincare lemma checks on a sampled region")
    p.add_argument("--region", required=True)
    p = verb("selftest", cmd_selftest, "run the acceptance suite")
    p.add_argument("--only", type=int, nargs="+", metavar="N", help="run only these criteria")
    return ap


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, status = args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {"verb": args.verb, **report}
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())

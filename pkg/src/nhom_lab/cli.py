"""Command-line entry point: ``nhom-lab {analyze,verify,generate}``.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 on malformed input.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import generators as gen
from .algebra import AlgebraDescriptor, DEFAULT_TOL, random_element
from .exceptions import InvalidInput, NhomLabError, ToleranceExceeded
from .harness import THEOREMS, HarnessConfig, harness_document, run_harness
from .io import dumps, element_to_dict, map_from_dict, map_to_dict, read_json
from .nhom import (
    is_n_homomorphism,
    split_involutive,
    star_defect,
    is_star_linear,
    unital_decompose,
)
from .positivity import choi_matrix, contractivity_check, is_completely_positive
from .validation import check_n, check_tol

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _blocks(text: str) -> list:
    try:
        blocks = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise InvalidInput(f"block sizes must be comma-separated integers: {text!r}") from exc
    if not blocks or min(blocks) < 1:
        raise InvalidInput(f"block sizes must be positive: {text!r}")
    return blocks


def _emit(obj, out: str | None, pretty: bool) -> None:
    text = dumps(obj, pretty)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def analyze(phi, n: int, tol: float = DEFAULT_TOL, trials: int = 1000, seed: int = 0) -> dict:
    """Consolidated report for a map read from disk."""
    n, tol = check_n(n), check_tol(tol)
    star_worst, star_label = star_defect(phi)
    star = is_star_linear(phi, tol)
    rep = is_n_homomorphism(phi, n, tol, seed=seed)
    report = {
        "n": n,
        "tol": tol,
        "domain": phi.domain.to_dict(),
        "codomain": phi.codomain.to_dict(),
        "star_linear": {"pass": star, "max_residual": star_worst if np.isfinite(star_worst) else None,
                        "witness": None if star else star_label},
        "n_homomorphism": rep.to_dict(),
    }
    ok = star and rep.passed
    if ok:
        try:
            report["decomposition"] = unital_decompose(phi, n, tol).to_dict()
            report["split"] = split_involutive(phi, n, tol, check=False).to_dict()
        except ToleranceExceeded as exc:
            report["decomposition_error"] = {"message": str(exc), "residuals": exc.residuals}
            report["pass"] = False
            return report
        choi = choi_matrix(phi)
        report["completely_positive"] = is_completely_positive(phi, tol)
        report["choi_min_eigenvalue"] = choi.min_eigenvalue()
        contr = contractivity_check(phi, n, trials, tol, seed)
        report["contractivity"] = contr.to_dict()
        ok = contr.passed
    report["pass"] = bool(ok)
    return report


def cmd_analyze(args) -> int:
    phi = map_from_dict(read_json(args.map))
    report = analyze(phi, args.n, args.tol, args.trials, args.seed)
    _emit(report, args.out, args.pretty)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def cmd_verify(args) -> int:
    data = read_json(args.config) if args.config else {}
    if args.seed is not None:
        data["seed"] = args.seed
    if args.trials is not None:
        data["trials"] = args.trials
    if args.theorems:
        data["theorems"] = [t for t in args.theorems.split(",") if t]
    if args.tol is not None:
        data["tol"] = args.tol
    cfg = HarnessConfig.from_dict(data)
    reports = run_harness(cfg)
    doc = harness_document(cfg, reports, timings=not args.no_timings)
    _emit(doc, args.out, args.pretty)
    return EXIT_PASS if doc["all_pass"] else EXIT_FAIL


def generate(kind: str, n: int = 3, blocks=(2,), codomain_dim: int | None = None,
             codomain_blocks=None, involutive: bool = True, selfadjoint: bool = False,
             nilpotent: int | None = None, seed: int = 0) -> dict:
    """A JSON-ready instance reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    if kind == "npotent":
        domain = AlgebraDescriptor.direct_sum(*blocks)
        style = "selfadjoint-npotent" if selfadjoint else "npotent"
        return element_to_dict(random_element(domain, style, rng, n=check_n(n)))
    if kind == "nhom":
        domain = AlgebraDescriptor.direct_sum(*blocks)
        size = codomain_dim if codomain_dim is not None else domain.dim
        return map_to_dict(gen.random_nhom(domain, size, check_n(n), rng, involutive=involutive))
    if kind == "map":
        if nilpotent is not None:
            domain = codomain = AlgebraDescriptor.nilpotent(nilpotent)
        else:
            domain = AlgebraDescriptor.direct_sum(*blocks)
            codomain = AlgebraDescriptor.direct_sum(*(codomain_blocks or blocks))
        return map_to_dict(gen.random_linear_map(domain, codomain, rng))
    raise InvalidInput(f"unknown generator kind {kind!r}")


def cmd_generate(args) -> int:
    obj = generate(
        args.kind, n=args.n, blocks=_blocks(args.blocks),
        codomain_dim=args.codomain_dim,
        codomain_blocks=_blocks(args.codomain_blocks) if args.codomain_blocks else None,
        involutive=args.involutive, selfadjoint=args.selfadjoint,
        nilpotent=args.nilpotent, seed=args.seed,
    )
    _emit(obj, args.out, args.pretty)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nhom-lab",
                                description="Verify and decompose n-homomorphisms of matrix algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="check and decompose a map stored as JSON")
    a.add_argument("map")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--tol", type=float, default=DEFAULT_TOL)
    a.add_argument("--trials", type=int, default=1000, help="contractivity samples")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out")
    a.add_argument("--pretty", action="store_true")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run the theorem-verification harness")
    v.add_argument("config", nargs="?")
    v.add_argument("--seed", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--tol", type=float)
    v.add_argument("--theorems", help="comma-separated subset of: " + ", ".join(THEOREMS))
    v.add_argument("--out")
    v.add_argument("--pretty", action="store_true")
    v.add_argument("--no-timings", action="store_true", help="omit wall times for byte-stable output")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("generate", help="write a random instance as JSON")
    g.add_argument("kind", choices=("nhom", "npotent", "map"))
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--blocks", default="2", help="domain block sizes, e.g. 2,2")
    g.add_argument("--codomain-dim", type=int)
    g.add_argument("--codomain-blocks")
    g.add_argument("--nilpotent", type=int, metavar="M",
                   help="map kind only: strictly upper-triangular M x M algebras on both sides")
    g.add_argument("--involutive", action=argparse.BooleanOptionalAction, default=True)
    g.add_argument("--selfadjoint", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.add_argument("--pretty", action="store_true")
    g.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NhomLabError, OSError, json.JSONDecodeError) as exc:
        print(f"nhom-lab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

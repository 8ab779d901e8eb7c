"""Command-line front end.

Exit codes: 0 = verdict/construction succeeded, 1 = property or
verification failed (a report is still written), 2 = input or size error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    DimensionMismatchError,
    ExhaustiveCheckInfeasibleError,
    KernelTriError,
    PreconditionError,
    TheoremViolationError,
)
from .increasing import check_increasing_spectrum, radius_profile
from .jsonio import canonical_dumps, operator_from_dict
from .cycles import find_nondegenerate_cycle, moment_identities, support_digraph
from .operators import Operator, factor
from .spaces import StandardSet, nested_chain
from .spectral import eigenvalues
from .triangular import (
    TriangularizationCertificate,
    increasing_spectrum_block_form,
    nilpotent_block_form,
    scc_triangularize,
    verify_certificate,
)


class InputError(Exception):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _load_operator(path: str) -> tuple[Operator, dict]:
    data = _load_json(path)
    payload = data["operator"] if "operator" in data else data
    try:
        return operator_from_dict(payload), data
    except KeyError as exc:
        raise InputError(f"missing field in operator descriptor: {exc}") from exc


def _write(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_spectrum(args) -> int:
    K, _ = _load_operator(args.infile)
    report = eigenvalues(K, tol=args.tol)
    _write(canonical_dumps(report.to_dict()), args.out)
    return 0


def _cmd_check_increasing(args) -> int:
    K, _ = _load_operator(args.infile)
    report = check_increasing_spectrum(
        K, tol=args.tol, max_points=args.max_points, samples=args.samples, seed=args.seed
    )
    _write(canonical_dumps(report.to_dict()), args.out)
    return 0 if report.verdict else 1


def _cmd_cycles(args) -> int:
    K, _ = _load_operator(args.infile)
    dg = support_digraph(K, args.threshold)
    cycle = find_nondegenerate_cycle(K, args.threshold)
    report = {
        "threshold": dg.threshold,
        "arcs": sum(len(s) for s in dg.successors),
        "cycle": None if cycle is None else list(cycle),
    }
    _write(canonical_dumps(report), args.out)
    return 0 if cycle is None else 1


def _cmd_moments(args) -> int:
    K, data = _load_operator(args.infile)
    if "sets" not in data:
        raise InputError("moments needs a top-level \"sets\" list of index lists")
    kfr = factor(K)
    sets = [StandardSet.from_indices(K.space, idx) for idx in data["sets"]]
    report = moment_identities(kfr, sets, tol=args.tol)
    _write(canonical_dumps(report.to_dict()), args.out)
    return 0 if report.passed else 1


def _cmd_triangularize(args) -> int:
    K, _ = _load_operator(args.infile)
    try:
        if args.kind == "scc":
            cert = scc_triangularize(K)
        elif args.kind == "nilpotent":
            cert = nilpotent_block_form(factor(K), tol=args.tol)
        else:
            cert = increasing_spectrum_block_form(K, tol=args.tol)
    except TheoremViolationError as exc:
        _write(canonical_dumps({"error": str(exc)}), args.out)
        return 1
    _write(canonical_dumps(cert.to_dict()), args.out)
    return 0


def _cmd_verify(args) -> int:
    K, _ = _load_operator(args.infile)
    cert = TriangularizationCertificate.from_dict(_load_json(args.cert))
    report = verify_certificate(K, cert, tol=args.tol)
    _write(canonical_dumps(report.to_dict()), args.out)
    return 0 if report.passed else 1


def _cmd_radius_profile(args) -> int:
    K, _ = _load_operator(args.infile)
    chain = nested_chain(K.space, args.steps)
    profile = radius_profile(K, chain)
    report = {
        "steps": args.steps,
        "profile": profile,
        "set_sizes": [s.size for s in chain],
    }
    _write(canonical_dumps(report), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerneltri",
        description="Spectrum-inclusion checks and triangularization "
        "certificates for discretized kernel operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--in", dest="infile", required=True, help="operator JSON file")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("spectrum", help="eigenvalue report")
    common(p)
    p.set_defaults(fn=_cmd_spectrum)

    p = sub.add_parser("check-increasing", help="increasing-spectrum verdict")
    common(p)
    p.add_argument("--max-points", type=int, default=12)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_check_increasing)

    p = sub.add_parser("cycles", help="support digraph and non-degenerate cycle search")
    common(p)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(fn=_cmd_cycles)

    p = sub.add_parser("moments", help="moment-matrix trace identities")
    common(p)
    p.set_defaults(fn=_cmd_moments)

    p = sub.add_parser("triangularize", help="construct a certificate")
    common(p)
    p.add_argument("--kind", choices=("scc", "nilpotent", "increasing"), required=True)
    p.set_defaults(fn=_cmd_triangularize)

    p = sub.add_parser("verify", help="re-verify a certificate")
    common(p)
    p.add_argument("--cert", required=True, help="certificate JSON file")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("radius-profile", help="spectral radius along the nested chain")
    common(p)
    p.add_argument("--steps", type=int, default=16)
    p.set_defaults(fn=_cmd_radius_profile)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (
        InputError,
        PreconditionError,
        DimensionMismatchError,
        ExhaustiveCheckInfeasibleError,
        KeyError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KernelTriError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

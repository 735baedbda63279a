"""Command line front end.

upkit verify all        run every catalog check at one parameter set
upkit verify lemma ID   run a single catalog check
upkit classify          factor a serialized map into standard pieces
upkit selftest          quick confidence run over a fast subset

Exit codes: 0 all checks passed, 1 a verification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .errors import (
    BadParams,
    MismatchAtCoefficient,
    ResidualNotCentral,
    StepPostconditionFailed,
    TauNotAutomorphism,
    UpkitError,
    VerificationMismatch,
)
from .harness import DEFAULT_PARAMS, catalog, run_all, run_lemma

# failures of these kinds mean "the claim is false", not "bad invocation"
_VERIFICATION_ERRORS = (
    VerificationMismatch,
    ResidualNotCentral,
    StepPostconditionFailed,
    TauNotAutomorphism,
    MismatchAtCoefficient,
)

_SELFTEST_IDS = (
    "steinberg_relations",
    "structure_constants",
    "root_subgroups",
    "normal_form_roundtrip",
    "center",
    "extract_from_u1",
    "extract_middle",
    "standard_central_map",
)


def _add_param_args(p):
    p.add_argument("--n", type=int, default=DEFAULT_PARAMS["n"],
                   help="rank (matrix size is 2n)")
    p.add_argument("--p", type=int, default=DEFAULT_PARAMS["p"],
                   help="field characteristic, a prime >= 5")
    p.add_argument("--k", type=int, default=DEFAULT_PARAMS["k"],
                   help="field extension degree")
    p.add_argument("--trials", type=int, default=DEFAULT_PARAMS["trials"],
                   help="sample count for the non-exhaustive portions")
    p.add_argument("--seed", type=int, default=DEFAULT_PARAMS["seed"],
                   help="seed for all derived random streams")


def _add_output_args(p):
    p.add_argument("--json", metavar="FILE", help="write the full report as JSON")
    p.add_argument("--csv", metavar="FILE",
                   help="write one delimited row per check")
    p.add_argument("--figdir", metavar="DIR",
                   help="render summary figures into this directory")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="upkit",
        description="verification and classification for unitriangular "
                    "symplectic groups")
    sub = ap.add_subparsers(dest="command", required=True)

    ver = sub.add_parser("verify", help="replay verification checks")
    vsub = ver.add_subparsers(dest="mode", required=True)
    va = vsub.add_parser("all", help="run the full catalog")
    _add_param_args(va)
    _add_output_args(va)
    vl = vsub.add_parser("lemma", help="run one catalog entry")
    vl.add_argument("id", help="catalog id; see 'upkit verify lemma list'")
    _add_param_args(vl)
    _add_output_args(vl)
    vl.add_argument("--reading", type=int, choices=(1, 2),
                    help="for extract_from_u1: probe with the full constant "
                         "(2) or with its bare sign (1, recorded as failing)")

    cl = sub.add_parser("classify",
                        help="factor a serialized map into standard pieces")
    cl.add_argument("--map", required=True, dest="map_file", metavar="FILE",
                    help="JSON descriptor or list of descriptors")
    cl.add_argument("--n", type=int, default=4)
    cl.add_argument("--p", type=int, default=5)
    cl.add_argument("--k", type=int, default=1)
    cl.add_argument("--points", type=int, default=200,
                    help="random matching points for the final verification")
    cl.add_argument("--seed", type=int, default=42)
    cl.add_argument("--out", metavar="FILE",
                    help="write the factor list as JSON (default: stdout)")

    sub.add_parser("selftest", help="fast fixed-parameter confidence run")
    return ap


def _params_of(args):
    return {"n": args.n, "p": args.p, "k": args.k,
            "trials": args.trials, "seed": args.seed}


def _print_line(report):
    print(f"{report['status']:4s} {report['lemma_id']:32s} "
          f"{report['elapsed']:8.3f}s  ({len(report['failures'])} witnesses)")


def _write_outputs(args, payload, reports):
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lemma_id", "status", "n", "p", "k", "trials", "seed",
                        "failures", "elapsed"])
            for r in reports:
                pr = r["params"]
                w.writerow([r["lemma_id"], r["status"], pr["n"], pr["p"],
                            pr["k"], pr["trials"], pr["seed"],
                            len(r["failures"]), r["elapsed"]])
    if args.figdir:
        from .figures import render_report_figures

        for path in render_report_figures(reports, args.figdir):
            print(f"figure: {path}")


def _cmd_verify_all(args):
    rep = run_all(_params_of(args))
    for r in rep["lemmas"]:
        _print_line(r)
    print(f"{rep['counts']['pass']}/{len(rep['lemmas'])} checks passed "
          f"in {rep['elapsed']:.1f}s")
    _write_outputs(args, rep, rep["lemmas"])
    return 0 if rep["status"] == "pass" else 1


def _cmd_verify_lemma(args):
    if args.id == "list":
        for lemma_id in catalog():
            print(lemma_id)
        return 0
    params = _params_of(args)
    if args.reading is not None:
        params["reading"] = args.reading
    rep = run_lemma(args.id, params)
    _print_line(rep)
    for item in rep["failures"][:4]:
        print(f"  witness: {json.dumps(item['witness'], sort_keys=True)[:200]}")
    _write_outputs(args, rep, [rep])
    return 0 if rep["status"] == "pass" else 1


def _cmd_classify(args):
    from .classify import classify
    from .field import Field
    from .group import group
    from .pcmaps import composition_from_json

    if args.n < 4:
        raise BadParams("classification needs rank >= 4")
    with open(args.map_file) as fh:
        data = json.load(fh)
    G = group(args.n, Field(args.p, args.k))
    comp = composition_from_json(G, data)
    fact = classify(comp, trials=args.points, seed=args.seed)
    for slot, factor in zip(fact.slots, fact.factors):
        print(f"{slot:12s} {factor.kind}")
    out = json.dumps(fact.to_json(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
        print(f"factors written to {args.out}")
    else:
        print(out)
    return 0


def _cmd_selftest(args):
    params = {"trials": 60}
    bad = 0
    for lemma_id in _SELFTEST_IDS:
        rep = run_lemma(lemma_id, params)
        _print_line(rep)
        bad += rep["status"] != "pass"
    print(f"selftest: {len(_SELFTEST_IDS) - bad}/{len(_SELFTEST_IDS)} passed")
    return 0 if bad == 0 else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            if args.mode == "all":
                return _cmd_verify_all(args)
            return _cmd_verify_lemma(args)
        if args.command == "classify":
            return _cmd_classify(args)
        return _cmd_selftest(args)
    except _VERIFICATION_ERRORS as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except UpkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

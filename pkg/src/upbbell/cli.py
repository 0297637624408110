"""Command-line front end: JSON pipelines over the library modules.

Machine-readable JSON goes to stdout; diagnostics and --verbose summaries
go to stderr.  Exit codes: 0 success, 1 check failed, 2 usage error,
3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .bounds import (
    BoundsReport,
    classical_bound,
    ns_bound,
    projectors_from_partition,
    quantum_spectral_bound,
    seesaw_quantum_bound,
    upb_witness,
)
from .errors import CapacityError
from .families import LocalPairChoice, gyni_upb, recursive_extend, shifts_upb
from .inequalities import (
    BellInequality,
    canonical_key,
    gyni_inequality,
    inequality_from_set,
    relabel_canonical,
    CANONICAL_ORBIT_CAP,
    _orbit_size,
)
from .product_sets import (
    MeasurementPartition,
    check_property_p,
    gram_orthogonality_check,
)
from .serialize import (
    behavior_to_json,
    bounds_report_to_json,
    dump,
    extendibility_report_to_json,
    frac_from_str,
    frac_to_str,
    inequality_from_json,
    inequality_to_json,
    set_from_json,
    set_to_json,
    tightness_report_to_json,
    witness_report_to_json,
)
from .tightness import is_tight
from .unextendibility import (
    STATUS_EXTENDIBLE,
    numeric_extendibility,
    unextendible_general,
    unextendible_qubit,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3


class CheckFailed(Exception):
    """A requested property check did not hold (exit code 1)."""


def _thread_cap() -> int:
    raw = os.environ.get("UPBBELL_THREADS")
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"UPBBELL_THREADS must be an integer, got {raw!r}")
    if cap < 1:
        raise ValueError("UPBBELL_THREADS must be >= 1")
    return cap


def _parse_e(spec: str) -> np.ndarray:
    parts = [float(p) for p in spec.split(",")]
    if len(parts) != 4:
        raise ValueError("--e expects RE,IM,RE,IM")
    v = np.array([complex(parts[0], parts[1]), complex(parts[2], parts[3])])
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise ValueError("--e must be a nonzero qubit ket")
    return v / n


def _read_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _emit(doc, args, path: str | None = None):
    text = dump(doc, pretty=(args.format == "pretty"))
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _note(args, message: str):
    if args.verbose:
        print(message, file=sys.stderr)


def _load_set(path: str):
    return set_from_json(_read_json(path))


def _load_ineq(path: str):
    return inequality_from_json(_read_json(path))


def _partition_or_fail(pset) -> MeasurementPartition:
    result = check_property_p(pset)
    if not isinstance(result, MeasurementPartition):
        raise CheckFailed(f"measurement partition does not exist: {result}")
    return result


# --- subcommand implementations -------------------------------------------

def cmd_gen(args) -> int:
    pairs = None
    if args.e is not None:
        e = _parse_e(args.e)
        n = 3 if args.family == "shifts" else args.n
        pairs = LocalPairChoice.uniform(n, e)
    if args.family == "shifts":
        pset = shifts_upb(pairs)
    else:
        if args.n is None:
            raise ValueError("gen gyni requires --n")
        pset = gyni_upb(args.n, pairs)
    _note(args, f"generated {pset.size} members on {pset.n} qubits")
    _emit(set_to_json(pset), args, args.output)
    return EXIT_OK


def cmd_extend(args) -> int:
    pset = _load_set(args.input)
    e = _parse_e(args.e) if args.e is not None else None
    out = recursive_extend(pset, e)
    _note(args, f"extended {pset.n} -> {out.n} parties, {out.size} members")
    _emit(set_to_json(out), args, args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    pset = _load_set(args.input)
    if args.what == "orth":
        ok, pair, worst = gram_orthogonality_check(pset)
        _emit({"orthogonal": ok, "worst_pair": list(pair) if pair else None,
               "worst_value": worst}, args)
        if not ok:
            raise CheckFailed(f"members {pair} overlap by {worst:.3e}")
        return EXIT_OK
    if args.what == "property-p":
        result = check_property_p(pset)
        if isinstance(result, MeasurementPartition):
            _emit({"property_p": True,
                   "inputs": [result.input_count(i) for i in range(pset.n)],
                   "outputs": [[result.output_count(i, k)
                                for k in range(result.input_count(i))]
                               for i in range(pset.n)]}, args)
            return EXIT_OK
        _emit({"property_p": False, "party": result.party,
               "rays": [result.ray_u, result.ray_v],
               "overlap": result.overlap_modulus}, args)
        raise CheckFailed(str(result))
    # upb check
    if all(d == 2 for d in pset.dims):
        report = unextendible_qubit(pset)
    else:
        report = unextendible_general(pset)
    numeric = numeric_extendibility(pset, restarts=args.restarts, seed=args.seed)
    doc = extendibility_report_to_json(report)
    doc["numeric_product_minimum"] = numeric
    doc["seed"] = args.seed
    _emit(doc, args)
    if report.status != "unextendible":
        raise CheckFailed(f"set is not an unextendible basis: {report.status}")
    return EXIT_OK


def cmd_ineq(args) -> int:
    if args.source == "gyni":
        if args.n is None:
            raise ValueError("ineq gyni requires --n")
        ineq = gyni_inequality(args.n)
    else:
        pset = _load_set(args.input)
        partition = _partition_or_fail(pset)
        weights = None
        if args.weights:
            weights = [frac_from_str(w) if "/" in w else Fraction(int(w))
                       for w in args.weights.split(",")]
        ineq = inequality_from_set(pset, partition, weights)
    _emit(inequality_to_json(ineq), args, args.output)
    return EXIT_OK


def cmd_bounds(args) -> int:
    ineq = _load_ineq(args.input)
    pset = _load_set(args.set) if args.set else None
    doc: dict = {"seed": args.seed, "restarts": args.restarts}

    def run_classical():
        res = classical_bound(ineq)
        doc["beta_c"] = frac_to_str(res.value)
        doc["optimal_strategy"] = [list(m) for m in res.strategy]
        return res.value

    def run_spectral():
        if pset is None:
            doc["beta_q_spectral"] = None
            doc["skipped_spectral"] = "needs --set for measurement projectors"
            return None
        partition = _partition_or_fail(pset)
        value = quantum_spectral_bound(ineq, projectors_from_partition(partition))
        doc["beta_q_spectral"] = value
        return value

    def run_seesaw():
        dims = (tuple(pset.dims) if pset is not None
                else tuple(max(ineq.scenario.outputs[i]) for i in range(ineq.n)))
        value = seesaw_quantum_bound(ineq, dims, restarts=args.restarts,
                                     seed=args.seed)
        doc["beta_q_seesaw"] = value
        return value

    def run_ns():
        res = ns_bound(ineq)
        doc["beta_n"] = frac_to_str(res.value)
        doc["ns_behavior"] = behavior_to_json(ineq, res.behavior)
        return res.value

    which = args.which
    if which == "classical":
        run_classical()
    elif which == "spectral":
        if pset is None:
            raise ValueError("bounds spectral requires --set")
        run_spectral()
    elif which == "seesaw":
        run_seesaw()
    elif which == "ns":
        run_ns()
    else:  # all
        beta_c = run_classical()
        spectral = run_spectral()
        seesaw = run_seesaw()
        beta_n = run_ns()
        BoundsReport(beta_c=beta_c, beta_q_spectral=spectral,
                     beta_q_seesaw=seesaw, beta_n=beta_n,
                     seed=args.seed, restarts=args.restarts)
    _emit(doc, args)
    return EXIT_OK


def cmd_witness(args) -> int:
    pset = _load_set(args.input)
    try:
        report = upb_witness(pset, restarts=args.restarts, seed=args.seed)
    except ValueError as exc:
        raise CheckFailed(str(exc))
    _emit(witness_report_to_json(report, include_matrices=not args.no_matrices), args)
    return EXIT_OK


def cmd_tight(args) -> int:
    ineq = _load_ineq(args.input)
    report = is_tight(ineq, allow_large=args.allow_large)
    _emit(tightness_report_to_json(report), args)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    n = args.n
    seed = args.seed
    report: dict = {
        "tool": {"name": "upbbell", "version": __version__},
        "input": {"family": "gyni", "n": n, "e": "default"},
        "seed": seed,
        "threads_cap": _thread_cap(),
    }
    pset = gyni_upb(n)
    report["set"] = {"members": pset.size, "dims": list(pset.dims)}

    ok, pair, worst = gram_orthogonality_check(pset)
    report["orthogonality"] = {"ok": ok, "worst_value": worst}
    if not ok:
        raise CheckFailed("generated set is not orthogonal")

    partition = _partition_or_fail(pset)
    report["property_p"] = {
        "ok": True,
        "inputs": [partition.input_count(i) for i in range(pset.n)],
    }

    ineq = inequality_from_set(pset, partition)
    if _orbit_size(ineq.scenario) <= CANONICAL_ORBIT_CAP:
        canonical = relabel_canonical(ineq)
        report["inequality"] = inequality_to_json(canonical)
        report["inequality_canonical"] = True
    else:
        report["inequality"] = inequality_to_json(ineq)
        report["inequality_canonical"] = False
    report["matches_flip_family_inequality"] = (
        canonical_key(ineq) == canonical_key(gyni_inequality(n)))

    beta_c = classical_bound(ineq)
    spectral = quantum_spectral_bound(ineq, projectors_from_partition(partition))
    seesaw = seesaw_quantum_bound(ineq, pset.dims, restarts=args.restarts, seed=seed)
    bounds_doc = {
        "beta_c": frac_to_str(beta_c.value),
        "beta_q_spectral": spectral,
        "beta_q_seesaw": seesaw,
        "seed": seed,
        "restarts": args.restarts,
    }
    if n <= 3:
        ns = ns_bound(ineq)
        bounds_doc["beta_n"] = frac_to_str(ns.value)
        beta_n = ns.value
    else:
        bounds_doc["beta_n"] = None
        bounds_doc["skipped_ns"] = "exact LP runs long beyond 3 parties; use `bounds ns`"
        beta_n = None
    BoundsReport(beta_c=beta_c.value, beta_q_spectral=spectral,
                 beta_q_seesaw=seesaw, beta_n=beta_n,
                 seed=seed, restarts=args.restarts)
    report["bounds"] = bounds_doc

    wit = upb_witness(pset, restarts=args.restarts_epsilon, seed=seed)
    report["witness"] = witness_report_to_json(wit, include_matrices=False)

    ext = unextendible_qubit(pset)
    ext_doc = extendibility_report_to_json(ext)
    ext_doc["numeric_product_minimum"] = numeric_extendibility(
        pset, restarts=args.restarts_epsilon, seed=seed)
    ext_doc["seed"] = seed
    report["extendibility"] = ext_doc
    if ext.status != "unextendible":
        raise CheckFailed(f"family set failed the unextendibility check: {ext.status}")

    if n <= 5:
        tight = is_tight(ineq)
        report["tightness"] = tightness_report_to_json(tight)
    else:
        report["tightness"] = {
            "skipped": "exact ranks run long beyond 5 parties; use `tight` directly"}

    _emit(report, args)
    return EXIT_OK


# --- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # global flags hang off a SUPPRESS-default parent so they can be given
    # either before or after the subcommand without clobbering each other
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("pretty", "compact"),
                        default=argparse.SUPPRESS,
                        help="JSON output format (default pretty)")
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS,
                        help="human-readable summary on stderr")

    parser = argparse.ArgumentParser(
        prog="upbbell",
        description="Bell inequalities without quantum violation from "
                    "unextendible product bases: generators, bounds, witnesses, "
                    "tightness.")
    parser.add_argument("--version", action="version", version=f"upbbell {__version__}")
    parser.set_defaults(format="pretty", verbose=False)
    parser.add_argument("--format", choices=("pretty", "compact"), dest="format",
                        help="JSON output format (default pretty)")
    parser.add_argument("--verbose", action="store_true", dest="verbose",
                        help="human-readable summary on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a product-vector set", parents=[common])
    p.add_argument("family", choices=("shifts", "gyni"))
    p.add_argument("--n", type=int, default=None, help="party count (gyni)")
    p.add_argument("--e", default=None, help="rotated ray as RE,IM,RE,IM")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("extend", help="extend a family set by one party", parents=[common])
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--e", default=None, help="new party's rotated ray")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("check", help="check a set property", parents=[common])
    p.add_argument("what", choices=("orth", "property-p", "upb"))
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=64)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("ineq", help="produce a Bell inequality", parents=[common])
    p.add_argument("source", choices=("from-set", "gyni"))
    p.add_argument("-i", "--input", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--weights", default=None, help="CSV of rational weights")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_ineq)

    p = sub.add_parser("bounds", help="compute inequality bounds", parents=[common])
    p.add_argument("which", choices=("classical", "spectral", "seesaw", "ns", "all"))
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--set", default=None, help="product-set file for measurements")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=8)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("witness", help="witness/state pipeline for a set", parents=[common])
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--no-matrices", action="store_true",
                   help="omit dense operator entries from the report")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("tight", help="facet test for an inequality", parents=[common])
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_tight)

    p = sub.add_parser("pipeline", help="full reproduction run for one family size", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=8, help="see-saw restarts")
    p.add_argument("--restarts-epsilon", type=int, default=64,
                   help="product-minimum restarts")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _thread_cap()
        return args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

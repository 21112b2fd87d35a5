"""Command-line interface: ``triteleport {teleport,verify,cost,sweep}``.

Exit codes: 0 success, 2 verification failure, 64 usage error, 65 input
parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from . import circuit as circ
from .errors import CircuitParseError, ImpossibleBranchError, QubitIndexError
from .protocols import (SCHEMES, bell_outcome, check_outcome_uniformity,
                        run_scheme, verify_tables)
from .states import (VARIANTS, TripartiteSpec, check_variant_relations,
                     entanglement_spectrum, make_joint_basis)

log = logging.getLogger("triteleport")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARSE = 0, 2, 64, 65
FIDELITY_PASS = 1 - 1e-9
AUTO_NORMALIZE_TOL = 1e-6

SWEEP_COLUMNS = (["scheme", "variant", "trials", "min_fidelity", "mean_fidelity",
                  "qubit1_ones", "chi2", "max_abs_z"] + [f"count_{k}" for k in range(16)])

# Expected (QC, GC, CB) for the builtin circuits.
EXPECTED_COSTS = {
    "pp1-A": (12, 17, 5), "pp1-B": (13, 18, 5), "pp1-C": (12, 17, 5), "pp1-D": (13, 18, 5),
    "pp2-A": (10, 15, 5), "pp2-B": (11, 16, 5), "pp2-C": (10, 15, 5), "pp2-D": (11, 16, 5),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_coeffs(values) -> list[complex]:
    """Four bare reals, or eight numbers read as interleaved (re, im) pairs."""
    if len(values) == 4:
        coeffs = [complex(v, 0) for v in values]
    elif len(values) == 8:
        coeffs = [complex(values[2 * k], values[2 * k + 1]) for k in range(4)]
    else:
        raise UsageError(f"--coeffs takes 4 reals or 8 interleaved re,im values, got {len(values)}")
    norm = float(np.sqrt(sum(abs(c) ** 2 for c in coeffs)))
    if abs(norm - 1) > AUTO_NORMALIZE_TOL:
        raise UsageError(f"coefficients have norm {norm:.9g}; expected 1")
    if abs(norm - 1) > 1e-15:
        if abs(norm - 1) > 1e-12:
            log.warning("coefficients have norm %.12g, renormalising", norm)
        coeffs = [c / norm for c in coeffs]
    return coeffs


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _forced_outcome(scheme, values):
    if values is None:
        return None, None
    if len(values) == 2:
        bit, outcome = values
    elif len(values) == 3 and scheme == 2:
        bit, outcome = values[0], bell_outcome(values[1], values[2])
    else:
        raise UsageError("--force-outcome takes BIT OUTCOME (scheme 2 also BIT BELL25 BELL34)")
    if bit not in (0, 1) or not 0 <= outcome < 16:
        raise UsageError(f"forced outcome out of range: bit {bit}, outcome {outcome}")
    return bit, outcome


def cmd_teleport(args) -> int:
    if args.scheme not in SCHEMES:
        raise UsageError(f"--scheme must be 1 or 2, got {args.scheme}")
    bit, outcome = _forced_outcome(args.scheme, args.force_outcome)
    if args.coeffs is not None:
        specs = [TripartiteSpec(args.variant, *parse_coeffs(args.coeffs))]
    else:
        if args.random < 1:
            raise UsageError("--random needs N >= 1")
        rng = np.random.default_rng(args.seed)
        specs = [TripartiteSpec.random(args.variant, rng) for _ in range(args.random)]
    rng = np.random.default_rng(None if args.seed is None else args.seed + 1)
    transcripts = [run_scheme(args.scheme, s, bit, outcome, rng) for s in specs]
    records = [t.to_dict() for t in transcripts]
    if args.format == "json":
        payload = records[0] if len(records) == 1 else records
        text = json.dumps(payload, indent=2) + "\n"
    elif args.format == "csv":
        rows = [{**r, "coeffs": json.dumps(r["coeffs"]), "outcome": json.dumps(r["outcome"]),
                 "corrections": " ".join(r["corrections"])} for r in records]
        text = _csv(rows, list(records[0]))
    else:
        lines = []
        for t in transcripts:
            b = t.bell_outcome
            what = f"phi{t.outcome + 1}" if b is None else f"{b[0].ascii}(25) {b[1].ascii}(34)"
            lines.append(f"scheme {t.scheme} variant {t.spec.variant}: qubit1={t.qubit1_bit} "
                         f"outcome={what} p={t.probability:.6g} "
                         f"UO={t.corrections.op6}x{t.corrections.op7} fidelity={t.fidelity:.12f}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if all(t.fidelity >= FIDELITY_PASS for t in transcripts) else EXIT_FAIL


def _basis_checks(tol=1e-10):
    jb = make_joint_basis()
    gram_err = float(np.max(np.abs(jb.basis.gram() - np.eye(16))))
    bad = [] if gram_err <= tol else [("gram", gram_err)]
    for k in range(16):
        ev = entanglement_spectrum(jb.vector(k), (2, 3))
        if np.max(np.abs(ev - 0.25)) > tol:
            bad.append((f"phi{k + 1} spectrum", ev.tolist()))
    return 17, bad


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    selected = bool(args.tables or args.relations or args.basis or args.probabilities)
    run_all = args.all or not selected
    tables = ["scheme1", "scheme2"] if run_all else (args.tables or [])
    rng = np.random.default_rng(args.seed)
    results = []
    lines = []
    for name in tables:
        rep = verify_tables(int(name[-1]), args.trials, rng)
        results.append((f"tables {name}", rep.checks, len(rep.mismatches)))
        if not run_all:
            for bit, outcome, label, ok in rep.rows():
                lines.append(f"  {name} qubit1={bit} {label:<18} {'pass' if ok else 'FAIL'}")
    if run_all or args.relations:
        rep = check_variant_relations(args.trials, rng)
        results.append(("variant relations", rep.checks, len(rep.failures)))
    if run_all or args.basis:
        checks, bad = _basis_checks()
        results.append(("joint basis", checks, len(bad)))
    if run_all or args.probabilities:
        rep = check_outcome_uniformity(args.trials, rng)
        results.append(("outcome probabilities", rep.checks, len(rep.failures)))
    total_checks = sum(r[1] for r in results)
    total_bad = sum(r[2] for r in results)
    if args.format == "json":
        text = json.dumps({"suites": [{"name": n, "checks": c, "mismatches": m} for n, c, m in results],
                           "checks": total_checks, "mismatches": total_bad}, indent=2) + "\n"
    elif args.format == "csv":
        text = _csv([{"suite": n, "checks": c, "mismatches": m} for n, c, m in results],
                    ["suite", "checks", "mismatches"])
    else:
        out = [f"{n}: {m} mismatches / {c} checks" for n, c, m in results]
        out += lines
        out.append(f"{total_bad} mismatches / {total_checks} checks")
        text = "\n".join(out) + "\n"
    _emit(text, args.out)
    return EXIT_OK if total_bad == 0 else EXIT_FAIL


def cmd_cost(args) -> int:
    rows = []
    if args.table5:
        for name, expected in EXPECTED_COSTS.items():
            got = circ.metrics(circ.builtin_by_name(name)).as_tuple()
            rows.append({"circuit": name, "qc": got[0], "gc": got[1], "cb": got[2],
                         "expected": "{} {} {}".format(*expected), "match": got == expected})
    if args.builtin:
        try:
            c = circ.builtin_by_name(args.builtin)
        except ValueError as e:
            raise UsageError(str(e)) from None
        rows.append({"circuit": args.builtin, **circ.metrics(c).__dict__})
    if args.file:
        try:
            with open(args.file) as fh:
                c = circ.parse_circuit(fh.read())
        except OSError as e:
            raise UsageError(f"cannot read {args.file}: {e}") from None
        except CircuitParseError as e:
            print(f"{args.file}: {e}", file=sys.stderr)
            return EXIT_PARSE
        rows.append({"circuit": args.file, **circ.metrics(c).__dict__})
    if not rows:
        raise UsageError("cost needs --builtin NAME, --file PATH or --table5")
    if args.format == "json":
        text = json.dumps(rows if len(rows) > 1 else rows[0], indent=2) + "\n"
    elif args.format == "csv":
        columns = list(dict.fromkeys(k for r in rows for k in r))
        text = _csv(rows, columns)
    else:
        out = []
        for r in rows:
            line = f"{r['circuit']}: qc {r['qc']} gc {r['gc']} cb {r['cb']}"
            if "expected" in r:
                line += f"  (expected {r['expected']}: {'match' if r['match'] else 'MISMATCH'})"
            out.append(line)
        text = "\n".join(out) + "\n"
    _emit(text, args.out)
    if args.table5 and not all(r["match"] for r in rows if "match" in r):
        return EXIT_FAIL
    return EXIT_OK


def sweep_stats(scheme: int, variant: str, trials: int, seed: int) -> dict:
    """Sampled runs; trial ``i`` draws coefficients and outcomes from ``default_rng(seed + i)``."""
    counts = np.zeros(16, dtype=np.int64)
    fids = np.empty(trials)
    ones = 0
    for i in range(trials):
        rng = np.random.default_rng(seed + i)
        tr = run_scheme(scheme, TripartiteSpec.random(variant, rng), rng=rng)
        fids[i] = tr.fidelity
        counts[tr.outcome] += 1
        ones += tr.qubit1_bit
    expected = trials / 16
    sigma = np.sqrt(trials * (1 / 16) * (15 / 16))
    row = {"scheme": scheme, "variant": variant, "trials": trials,
           "min_fidelity": float(fids.min()), "mean_fidelity": float(fids.mean()),
           "qubit1_ones": ones,
           "chi2": float(np.sum((counts - expected) ** 2 / expected)),
           "max_abs_z": float(np.max(np.abs(counts - expected)) / sigma)}
    row.update({f"count_{k}": int(counts[k]) for k in range(16)})
    return row


def cmd_sweep(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    seed = 0 if args.seed is None else args.seed
    schemes = [args.scheme] if args.scheme else list(SCHEMES)
    variants = [args.variant] if args.variant else list(VARIANTS)
    rows = [sweep_stats(s, v, args.trials, seed) for s in schemes for v in variants]
    if args.format == "csv":
        text = _csv(rows, SWEEP_COLUMNS)
    elif args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        text = "".join(f"scheme {r['scheme']} variant {r['variant']}: min fidelity {r['min_fidelity']:.12f} "
                       f"mean {r['mean_fidelity']:.12f} chi2 {r['chi2']:.3f} max|z| {r['max_abs_z']:.3f}\n"
                       for r in rows)
    _emit(text, args.out)
    return EXIT_OK if all(r["min_fidelity"] >= FIDELITY_PASS for r in rows) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for the random source")
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    p = _Parser(prog="triteleport", description="Teleportation of four-term tripartite states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("teleport", parents=[common], help="run one scheme and print its transcript")
    t.add_argument("--scheme", type=int, required=True, help="1 (cluster channel) or 2 (two Bell pairs)")
    t.add_argument("--variant", choices=VARIANTS, required=True)
    g = t.add_mutually_exclusive_group(required=True)
    g.add_argument("--coeffs", type=float, nargs="+", metavar="X",
                   help="a b c d as 4 reals, or 8 interleaved re im values")
    g.add_argument("--random", type=int, metavar="N", help="N random coefficient sets")
    t.add_argument("--force-outcome", type=int, nargs="+", metavar="K",
                   help="BIT OUTCOME (0-15); scheme 2 also accepts BIT BELL25 BELL34")
    t.set_defaults(func=cmd_teleport, default_format="json")

    v = sub.add_parser("verify", parents=[common], help="run the verification suites")
    v.add_argument("--all", action="store_true", help="every suite (default when none is selected)")
    v.add_argument("--tables", choices=("scheme1", "scheme2"), action="append",
                   help="collapse/correction tables, with a per-row report")
    v.add_argument("--relations", action="store_true", help="unitary relations between variants")
    v.add_argument("--basis", action="store_true", help="joint-basis orthonormality and entanglement")
    v.add_argument("--probabilities", action="store_true", help="uniform outcome probabilities")
    v.add_argument("--trials", type=int, default=100, help="random payloads per suite (default 100)")
    v.set_defaults(func=cmd_verify, default_format="text")

    c = sub.add_parser("cost", parents=[common], help="quantum cost, gate count and classical bits")
    c.add_argument("--builtin", metavar="NAME", help=f"one of {', '.join(circ.BUILTIN_NAMES)}")
    c.add_argument("--file", metavar="PATH", help="circuit in the line-oriented text format")
    c.add_argument("--table5", action="store_true", help="all builtins next to their expected values")
    c.set_defaults(func=cmd_cost, default_format="text")

    s = sub.add_parser("sweep", parents=[common],
                       help="random-coefficient statistics per (scheme, variant)",
                       description="CSV columns: " + ",".join(SWEEP_COLUMNS))
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--scheme", type=int, choices=SCHEMES)
    s.add_argument("--variant", choices=VARIANTS)
    s.set_defaults(func=cmd_sweep, default_format="csv")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"triteleport: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ImpossibleBranchError, QubitIndexError, ValueError) as e:
        print(f"triteleport: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

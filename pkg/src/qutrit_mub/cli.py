"""Command-line entry point: ``qutrit-mub <subcommand> ...``.

Data goes to --out files or stdout; diagnostics go to stderr.  The exit
status is 0 exactly when the subcommand's check succeeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import ent, gates, mub, tomo


def _shots(text: str):
    if text == "exact":
        return None
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("shots must be >= 1 or 'exact'")
    return n


def _qutrits(text: str) -> int:
    n = int(text)
    if n not in (1, 2, 3):
        raise argparse.ArgumentTypeError("--qutrits must be 1, 2 or 3")
    return n


def _write_json(data, out: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _err(msg: str) -> None:
    print(f"qutrit-mub: {msg}", file=sys.stderr)


def cmd_mub_gen(args) -> int:
    mubs = mub.build_field_mubs(3**args.qutrits)
    rep = mub.verify_unbiased(mubs)
    if args.out:
        mub.save(mubs, args.out)
    print(f"{len(mubs)} bases, dim {mubs.dim}, max deviation {rep.max_deviation:.3e}, "
          f"{'unbiased' if rep.passed else 'NOT unbiased'}")
    return 0 if rep.passed else 1


def cmd_verify_table(args) -> int:
    table = gates.load_table(args.table)
    report = gates.verify_table(table, args.convention, args.phase_gate)
    sweep = gates.sweep_table(table)
    data = report.to_dict()
    data["sweep"] = [
        {"convention": r.convention_used, "phase_variant": r.phase_variant,
         "pairs_passed": r.pairs_passed, "pairs_checked": r.pairs_checked,
         "failing_rows": [v.label for v in r.per_row if not v.unbiased_vs_all]}
        for r in sweep
    ]
    if args.out:
        _write_json(data, args.out)
    failing = [v.label for v in report.per_row if not v.unbiased_vs_all]
    print(f"table {table.table_id}: {len(report.per_row)} bases, {report.pairs_passed}/"
          f"{report.pairs_checked} pairs unbiased (convention {report.convention_used}, "
          f"phase gate {report.phase_variant})")
    if failing:
        print(f"rows failing: {', '.join(failing)}")
    return 0 if report.all_passed else 1


def cmd_complexity(args) -> int:
    table = gates.load_table(args.table)
    for label, word in table.rows:
        print(f"{label}: {word.count_nonlocal()}  {word.render()}")
    print(f"total nonlocal gates: {table.count_nonlocal()}")
    return 0


def cmd_tomo(args) -> int:
    try:
        rho = tomo.load_state(args.state)
    except (OSError, ValueError, KeyError) as e:
        _err(f"invalid state file {args.state}: {e}")
        return 2
    d = rho.dim
    n = {3: 1, 9: 2, 27: 3}.get(d)
    if n is None:
        _err(f"state dimension {d} is not 3, 9 or 27")
        return 2
    if args.method == "gellmann":
        if args.shots is not None:
            _err("the Gell-Mann baseline only runs with exact expectations")
            return 2
        result = tomo.reconstruct_gellmann(rho, n)
    else:
        result = tomo.run_experiment(rho, mub.build_field_mubs(d), args.shots, args.seed,
                                     args.project)
    if args.out:
        _write_json(result.to_json(), args.out)
    shots = "exact" if args.shots is None else args.shots
    line = (f"method {result.method}, {result.measurement_count} measurements, shots {shots}, "
            f"frobenius error {result.frobenius_error:.3e}")
    if result.pure_state_fidelity is not None:
        line += f", fidelity {result.pure_state_fidelity:.6f}"
    print(line)
    print(f"{tomo.mub_measurement_count(n)} vs {tomo.gellmann_measurement_count(n)} measurements "
          f"(mub vs gellmann)")
    return 0


def cmd_census(args) -> int:
    if args.table:
        table = gates.load_table(args.table)
        n = table.n_qutrits
        if n < 2:
            _err("census needs two or three qutrits; a single qutrit has no bipartition")
            return 2
        conv = args.convention
        if conv == "auto":
            conv = gates.verify_table(table, "auto", args.phase_gate).convention_used
        bases = gates.table_bases(table, conv, args.phase_gate)
        readings = {"rows": ent.census(bases, n)}
        if not table.includes_standard:
            std = mub.standard_basis(3**n, "std")
            readings["rows+standard"] = ent.census([std] + bases, n)
    else:
        n = args.qutrits
        if n < 2:
            _err("census needs two or three qutrits; a single qutrit has no bipartition")
            return 2
        readings = {"field": ent.census(mub.build_field_mubs(3**n), n)}
    out = {name: c.to_json() for name, c in readings.items()}
    for name, c in readings.items():
        tup = ",".join(map(str, c.paper_tuple))
        extra = ""
        if n == 3:
            known = c.paper_tuple in ent.THREE_QUTRIT_STRUCTURES
            extra = f" ({'one of the five known structures' if known else 'not a known structure'}"
            extra += ", matches (0,12,16))" if c.paper_tuple == (0, 12, 16) else ")"
        print(f"{name}: ({tup}){extra}")
    if args.out:
        _write_json(out, args.out)
    return 0


def cmd_random_state(args) -> int:
    rng = np.random.default_rng(args.seed)
    rho = tomo.random_density_matrix(3**args.qutrits, rng)
    _write_json(rho.to_json(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qutrit-mub", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, table=False):
        sp.add_argument("--out", help="output file (stdout when omitted, where applicable)")
        if table:
            sp.add_argument("--table", choices=["1", "2", "3", "I", "II", "III"], required=True)

    sp = sub.add_parser("mub-gen", help="build and verify the field MUB set")
    sp.add_argument("--qutrits", type=_qutrits, required=True)
    common(sp)
    sp.set_defaults(func=cmd_mub_gen)

    sp = sub.add_parser("verify-table", help="check a decomposition table for unbiasedness")
    common(sp, table=True)
    sp.add_argument("--convention", choices=["auto", *gates.CONVENTIONS], default="auto")
    sp.add_argument("--phase-gate", choices=gates.PHASE_VARIANTS, default="paper")
    sp.set_defaults(func=cmd_verify_table)

    sp = sub.add_parser("complexity", help="count nonlocal gates in a table")
    common(sp, table=True)
    sp.set_defaults(func=cmd_complexity)

    sp = sub.add_parser("tomo", help="simulate tomography of a state file")
    sp.add_argument("--state", required=True)
    sp.add_argument("--method", choices=["mub", "gellmann"], default="mub")
    sp.add_argument("--shots", type=_shots, default=None, help="N per basis, or 'exact'")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--project", action="store_true", help="also project onto physical states")
    common(sp)
    sp.set_defaults(func=cmd_tomo)

    sp = sub.add_parser("census", help="entanglement structure of a MUB set")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--qutrits", type=_qutrits)
    src.add_argument("--table", choices=["1", "2", "3", "I", "II", "III"])
    sp.add_argument("--convention", choices=["auto", *gates.CONVENTIONS], default="auto")
    sp.add_argument("--phase-gate", choices=gates.PHASE_VARIANTS, default="paper")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("random-state", help="write a seeded Ginibre density matrix")
    sp.add_argument("--qutrits", type=_qutrits, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_random_state)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as e:
        _err(str(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())

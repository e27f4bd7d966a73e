"""Command-line front end: verify, parity, scan, classical.

Human-readable tables go to stdout; machine-readable output goes to the
file named by --out, never mixed into the stream.  Every command is
deterministic for a fixed flag set (including --seed).

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .counting import (
    FringeFitError,
    MarkedPhase,
    NoiseParams,
    SourceParams,
    fit_fringe,
    majority_parity,
    marked_phase_reports,
    scan_fringe,
)
from .optics import black_box_unitary, config_for
from .oracle import (
    OracleHandle,
    box,
    box_number,
    classical_parity,
    parity,
    permutation_matrix,
    quantum_parity_single_query,
    single_query_ambiguity_witness,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

VERIFY_TOL = 1e-12

# Machine-readable output contract shared by all commands (see README).
RESULT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["box"],
    "properties": {
        "box": {"type": "integer", "minimum": 1, "maximum": 8},
        "parity": {"enum": ["even", "odd", None]},
        "measured_index": {"type": "integer", "minimum": 1, "maximum": 4},
        "queries": {"type": "integer", "minimum": 0},
        "eta": {"type": ["number", "null"]},
        "visibility_fit": {"type": ["number", "null"]},
        "witness_even": {"type": "integer", "minimum": 1, "maximum": 8},
        "witness_odd": {"type": "integer", "minimum": 1, "maximum": 8},
        "seed": {"type": "integer"},
        "volts_per_2pi": {"type": "number"},
        "eta_points": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "phase", "eta", "stderr"],
                "properties": {
                    "kind": {"enum": ["psi2", "psi4"]},
                    "phase": {"type": "number"},
                    "eta": {"type": "number"},
                    "stderr": {"type": "number"},
                },
            },
        },
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["voltage", "phase", "counts_d1", "counts_d2"],
                "properties": {
                    "voltage": {"type": "number"},
                    "phase": {"type": "number"},
                    "counts_d1": {"type": "number"},
                    "counts_d2": {"type": "number"},
                },
            },
        },
    },
}


def _int_arg(value: str) -> int:
    # accepts 1e6-style exponents for count-like flags
    return int(float(value))


def _box_or_all(value: str):
    if value == "all":
        return "all"
    k = int(value)
    if not 1 <= k <= 8:
        raise argparse.ArgumentTypeError(f"box must be 1..8 or 'all', got {value!r}")
    return k


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ququart-parity",
        description="Simulate the one-query permutation-parity experiment on a photonic ququart.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser(
        "verify",
        help="check that all 8 optical configurations compose to their permutation unitaries",
    )
    p_verify.add_argument("--flip-dp", type=int, choices=range(1, 9), default=None, help=argparse.SUPPRESS)
    p_verify.set_defaults(func=cmd_verify)

    p_parity = sub.add_parser("parity", help="run the one-query quantum parity measurement")
    p_parity.add_argument("--box", type=int, choices=range(1, 9), required=True, help="box number 1..8")
    p_parity.add_argument("--probe", type=int, choices=(2, 4), default=2, help="Fourier probe index (default 2)")
    p_parity.add_argument("--out", type=Path, default=None, help="write a JSON result to this path")
    p_parity.set_defaults(func=cmd_parity)

    p_scan = sub.add_parser("scan", help="scan the piezo voltage and record fringe counts")
    p_scan.add_argument("--box", type=_box_or_all, required=True, help="box number 1..8, or 'all'")
    p_scan.add_argument("--visibility", type=float, default=1.0)
    p_scan.add_argument("--phase-offset", type=float, default=0.0, help="per-box systematic phase shift (rad)")
    p_scan.add_argument("--alpha", type=float, default=0.1, help="coherent amplitude of the attenuated source")
    p_scan.add_argument("--pulses", type=_int_arg, default=1_000_000, help="pulses per scan step")
    p_scan.add_argument("--efficiency", type=float, default=1.0, help="detector efficiency in (0, 1]")
    p_scan.add_argument("--v-start", type=float, default=0.0)
    p_scan.add_argument("--v-end", type=float, default=20.0)
    p_scan.add_argument("--v-step", type=float, default=0.5)
    p_scan.add_argument("--volts-per-2pi", type=float, default=10.0)
    p_scan.add_argument("--seed", type=_int_arg, default=1)
    p_scan.add_argument("--out", type=Path, required=True, help="output path (per-box suffix added for 'all')")
    p_scan.add_argument("--format", choices=("csv", "json"), default="csv")
    p_scan.add_argument("--expected-value", action="store_true", help="record Poisson means instead of sampling")
    p_scan.set_defaults(func=cmd_scan)

    p_classical = sub.add_parser("classical", help="run the two-query classical baseline")
    p_classical.add_argument("--box", type=int, choices=range(1, 9), required=True, help="box number 1..8")
    p_classical.add_argument("--out", type=Path, default=None, help="write a JSON result to this path")
    p_classical.set_defaults(func=cmd_classical)

    return parser


def _fit_deviation(composed: np.ndarray, reference: np.ndarray) -> tuple[complex, float]:
    # best global phase from the largest entry of the reference, then the
    # worst-case entry deviation under that phase
    idx = np.argmax(np.abs(reference))
    c = composed.flat[idx] / reference.flat[idx]
    if c == 0:
        c = 1.0
    c = c / abs(c)
    return complex(c), float(np.max(np.abs(composed - c * reference)))


def cmd_verify(args) -> int:
    print("box  DP   HWP1  HWP2  max|dU|      global phase        parity")
    failures = []
    for k in range(1, 9):
        cfg = config_for(k)
        if args.flip_dp == k:
            cfg = dataclasses.replace(cfg, dp=not cfg.dp)
        composed = black_box_unitary(cfg)
        reference = permutation_matrix(box(k))
        phase, deviation = _fit_deviation(composed.entries, reference.entries)
        if deviation >= VERIFY_TOL:
            failures.append(k)
        flags = ["Yes" if f else "No " for f in (cfg.dp, cfg.hwp1, cfg.hwp2)]
        print(
            f"f{k}   {flags[0]}  {flags[1]}   {flags[2]}   {deviation:<11.3e}  "
            f"{phase.real:+.3f}{phase.imag:+.3f}j      {parity(box(k)).value}"
        )
    if failures:
        for k in failures:
            print(f"FAIL: f{k} composed unitary deviates from its permutation matrix")
        print(f"verification: {8 - len(failures)}/8 configurations match")
        return EXIT_VERIFY_FAILED
    print("verification: 8/8 configurations match")
    return EXIT_OK


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def cmd_parity(args) -> int:
    handle = OracleHandle(box(args.box))
    par, measured = quantum_parity_single_query(handle, args.probe)
    print(f"f{args.box}: {par.value}, measured |{measured}>, queries: {handle.query_count}")
    if args.out is not None:
        payload = {
            "box": args.box,
            "parity": par.value,
            "measured_index": measured,
            "queries": handle.query_count,
        }
        try:
            _write_json(args.out, payload)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def cmd_classical(args) -> int:
    handle = OracleHandle(box(args.box))
    par, queries = classical_parity(handle)
    y1, y2 = handle.perm(1), handle.perm(2)
    witness = single_query_ambiguity_witness(1, y1)
    even_k, odd_k = box_number(witness[0]), box_number(witness[1])
    print(f"f{args.box}: queries (1->{y1}, 2->{y2}), parity {par.value}, queries used: {queries}")
    print(f"one-query ambiguity for (1,{y1}): even f{even_k}, odd f{odd_k}")
    if args.out is not None:
        payload = {
            "box": args.box,
            "parity": par.value,
            "queries": queries,
            "witness_even": even_k,
            "witness_odd": odd_k,
        }
        try:
            _write_json(args.out, payload)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def _scan_out_path(base: Path, k: int, all_boxes: bool) -> Path:
    if not all_boxes:
        return base
    return base.with_name(f"{base.stem}_f{k}{base.suffix}")


def _scan_payload(scan, reports, vis_fit, volts_per_2pi) -> dict:
    try:
        par = majority_parity(scan).value
    except ValueError:
        par = None
    eta = next(
        (rep.eta for kind, rep in reports if kind is MarkedPhase.PSI2),
        reports[0][1].eta if reports else None,
    )
    return {
        "box": scan.box,
        "parity": par,
        "eta": eta,
        "visibility_fit": vis_fit,
        "seed": scan.seed,
        "volts_per_2pi": volts_per_2pi,
        "eta_points": [
            {"kind": kind.value, "phase": rep.phase_at_eval, "eta": rep.eta, "stderr": rep.stderr}
            for kind, rep in reports
        ],
        "steps": [
            {"voltage": v, "phase": ph, "counts_d1": c1, "counts_d2": c2}
            for v, ph, c1, c2 in scan.steps
        ],
    }


def cmd_scan(args) -> int:
    all_boxes = args.box == "all"
    boxes = list(range(1, 9)) if all_boxes else [args.box]
    try:
        source = SourceParams(
            alpha=args.alpha,
            pulses_per_step=args.pulses,
            detector_efficiency=args.efficiency,
        )
        noise = NoiseParams(visibility=args.visibility, phase_offset=args.phase_offset)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    summary = []
    for k in boxes:
        seed_k = (
            int(np.random.SeedSequence((args.seed, k)).generate_state(1)[0])
            if all_boxes
            else args.seed
        )
        try:
            scan = scan_fringe(
                k,
                v_start=args.v_start,
                v_end=args.v_end,
                v_step=args.v_step,
                volts_per_2pi=args.volts_per_2pi,
                source=source,
                noise=noise,
                seed=seed_k,
                expected_value=args.expected_value,
            )
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE

        try:
            vis_fit = float(np.mean([fit_fringe(scan, d).visibility for d in (1, 2)]))
        except FringeFitError:
            vis_fit = None
        reports = marked_phase_reports(scan)

        out_path = _scan_out_path(args.out, k, all_boxes)
        try:
            if args.format == "csv":
                scan.write_csv(out_path)
            else:
                _write_json(out_path, _scan_payload(scan, reports, vis_fit, args.volts_per_2pi))
        except OSError as exc:
            print(f"error: cannot write {out_path}: {exc}", file=sys.stderr)
            return EXIT_IO

        print(
            f"f{k}: {scan.n_steps} steps, {scan.voltages[0]:g}..{scan.voltages[-1]:g} V "
            f"({args.volts_per_2pi:g} V per 2pi), seed {seed_k}"
        )
        if vis_fit is not None:
            print(f"  fitted visibility: {vis_fit:.6f}")
        for kind, rep in reports:
            print(
                f"  eta @ phase {rep.phase_at_eval:.4f} ({kind.value} point): "
                f"{rep.eta:.6f} +- {rep.stderr:.6f}"
            )
        print(f"  wrote {out_path}")
        etas = [rep.eta for kind, rep in reports if kind is MarkedPhase.PSI2]
        summary.append((k, parity(box(k)).value, etas[0] if etas else float("nan")))

    if all_boxes:
        mean_eta = float(np.mean([eta for _, _, eta in summary]))
        print(f"summary: 8 boxes, mean eta at psi2 points {mean_eta:.6f}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse signals usage errors with code 2
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

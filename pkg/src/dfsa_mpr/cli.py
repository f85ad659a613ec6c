"""Command-line front end: simulate sweeps, tabulate closed forms, run the estimator.

Exit codes: 0 on success, 1 on bad configuration or arguments, 2 on a runtime
diagnostic (e.g. the non-termination safety cap). Progress goes to stderr;
data goes to the output file or stdout.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import yaml

from .estimator import (
    FrameObservation,
    map_estimate,
    posterior_curve,
    search_lower_bound,
)
from .harness import (
    ExperimentSpec,
    analyze_curves,
    efficiency_curve,
    emit_results,
    optimal_length_table,
    render_csv,
    render_json,
    run_experiment,
)
from .prob_model import MprOrder
from .protocol import NonTerminationError, Variant


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_int_list(text: str) -> list[int]:
    """Parse '100,200,300' or 'start:stop:step' (stop inclusive) into a list."""
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) == 2:
            start, stop, step = parts[0], parts[1], 1
        elif len(parts) == 3:
            start, stop, step = parts
        else:
            raise ValueError(f"bad range syntax: {text!r}")
        if step < 1:
            raise ValueError(f"range step must be >= 1 in {text!r}")
        return list(range(start, stop + 1, step))
    return [int(p) for p in text.split(",") if p.strip()]


def _build_parser() -> _Parser:
    parser = _Parser(prog="dfsa-mpr")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[], help="run a Monte Carlo sweep")
    sim.add_argument("--config", help="YAML experiment spec")
    sim.add_argument("--tag-counts", help="override: list or start:stop:step")
    sim.add_argument("--mpr-orders", help="override: list of M values")
    sim.add_argument("--initial-frame-lengths", help="override: list of L0 values")
    sim.add_argument("--variants", help="override: comma list of fsa/dfsa")
    sim.add_argument("--trials", type=int, help="override: trials per cell")
    sim.add_argument("--seed", type=int, help="override: master seed")
    sim.add_argument("--out", help="output file (default stdout)")
    sim.add_argument("--format", choices=["csv", "json"], default="csv")
    sim.add_argument("--parallel", type=int, default=1, help="worker processes")

    ana = sub.add_parser("analyze", help="closed-form tables and curves")
    mode = ana.add_mutually_exclusive_group(required=True)
    mode.add_argument("--optimal-length", action="store_true")
    mode.add_argument("--efficiency-curve", action="store_true")
    ana.add_argument("--tag-counts", default="100", help="list or start:stop:step")
    ana.add_argument("--mpr-orders", default="1,2,3,4")
    ana.add_argument("--max-length", type=int, help="curve: largest L (default 4n)")
    ana.add_argument("--out", help="output file (default stdout)")

    est = sub.add_parser("estimate", help="MAP population estimate for one frame")
    est.add_argument("--L", type=int, required=True)
    est.add_argument("--E", type=int, required=True)
    est.add_argument("--S", type=int, required=True)
    est.add_argument("--C", type=int, required=True)
    est.add_argument("--M", type=int, required=True)
    est.add_argument(
        "--identified",
        type=int,
        help="tags decoded across the S success slots (default S)",
    )
    est.add_argument("--curve-out", help="write the normalized posterior as CSV")
    est.add_argument("--curve-k-max", type=int, help="largest k in the emitted curve")
    return parser


def _load_spec(args) -> ExperimentSpec:
    raw: dict = {}
    if args.config:
        with open(args.config) as handle:
            loaded = yaml.safe_load(handle)
        if not isinstance(loaded, dict):
            raise ValueError(f"config {args.config} must be a mapping")
        raw.update(loaded)
    if args.tag_counts:
        raw["tag_counts"] = parse_int_list(args.tag_counts)
    if args.mpr_orders:
        raw["mpr_orders"] = parse_int_list(args.mpr_orders)
    if args.initial_frame_lengths:
        raw["initial_frame_lengths"] = parse_int_list(args.initial_frame_lengths)
    if args.variants:
        raw["variants"] = [v.strip() for v in args.variants.split(",") if v.strip()]
    if args.trials is not None:
        raw["trials"] = args.trials
    if args.seed is not None:
        raw["master_seed"] = args.seed
    return ExperimentSpec.from_dict(raw)


def _cmd_simulate(args) -> int:
    try:
        spec = _load_spec(args)
    except (ValueError, TypeError, OSError, yaml.YAMLError) as exc:
        print(f"dfsa-mpr: bad config: {exc}", file=sys.stderr)
        return 1
    try:
        table = run_experiment(spec, parallel=max(1, args.parallel), progress=True)
    except NonTerminationError as exc:
        print(f"dfsa-mpr: {exc}", file=sys.stderr)
        return 2
    if args.out:
        emit_results(table, format=args.format, path=args.out)
    else:
        renderer = render_csv if args.format == "csv" else render_json
        sys.stdout.write(renderer(table))
    return 0


def _cmd_analyze(args) -> int:
    try:
        tag_counts = parse_int_list(args.tag_counts)
        mpr_orders = parse_int_list(args.mpr_orders)
        if args.optimal_length:
            text = optimal_length_table(tag_counts, mpr_orders)
        else:
            if len(tag_counts) != 1 or len(mpr_orders) != 1:
                raise ValueError("--efficiency-curve takes a single n and a single M")
            text = efficiency_curve(
                tag_counts[0], MprOrder(mpr_orders[0]), args.max_length
            )
    except ValueError as exc:
        print(f"dfsa-mpr: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_estimate(args) -> int:
    identified = args.identified if args.identified is not None else args.S
    try:
        obs = FrameObservation(
            L=args.L, E=args.E, S=args.S, C=args.C, identified=identified
        )
        mpr = MprOrder(args.M)
        estimate = map_estimate(obs, mpr)
    except ValueError as exc:
        print(f"dfsa-mpr: {exc}", file=sys.stderr)
        return 1
    # a collision-free frame identifies every transmitting tag exactly
    n_hat = identified if obs.C == 0 else estimate.n_hat
    print(n_hat)
    if args.curve_out:
        k_min = search_lower_bound(obs, mpr)
        k_max = args.curve_k_max
        if k_max is None:
            k_max = max(2 * n_hat + 10, k_min + 100)
        if k_max < k_min:
            print(f"dfsa-mpr: curve k max {k_max} below lower bound {k_min}", file=sys.stderr)
            return 1
        curve = posterior_curve(obs, mpr, range(k_min, k_max + 1))
        with open(args.curve_out, "w", newline="") as handle:
            handle.write("k,probability\n")
            for k, prob in curve:
                handle.write(f"{k},{prob:.6g}\n")
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "analyze":
        return _cmd_analyze(args)
    return _cmd_estimate(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

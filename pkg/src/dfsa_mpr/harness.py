"""Monte Carlo sweep runner and result emission.

Runs repeated interrogations over a grid of (variant, n, M, L0) cells,
aggregates read rate, identification delay and first-frame estimation error,
and writes the table as CSV or JSON. Per-trial RNG streams are derived from
the master seed and the cell key, so results are reproducible and independent
of execution order.
"""

from __future__ import annotations

import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional

import numpy as np

from .estimator import map_estimate
from .frame_optimizer import optimal_frame_length
from .prob_model import Load, MprOrder, channel_efficiency
from .protocol import ProtocolConfig, Variant, run_interrogation

CSV_COLUMNS = [
    "variant",
    "n",
    "M",
    "L0",
    "trials",
    "read_rate_mean",
    "read_rate_std",
    "delay_mean",
    "delay_std",
    "est_err_pct_mean",
    "est_err_pct_std",
]

#: cell key: (variant value, n, M, L0)
CellKey = tuple[str, int, int, int]


@dataclass(frozen=True)
class ExperimentSpec:
    tag_counts: list[int]
    mpr_orders: list[int]
    initial_frame_lengths: list[int]
    variants: list[Variant] = field(default_factory=lambda: [Variant.DFSA])
    trials: int = 500
    master_seed: int = 1

    def __post_init__(self) -> None:
        for name in ("tag_counts", "mpr_orders", "initial_frame_lengths", "variants"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")

    @classmethod
    def from_dict(cls, raw: Mapping) -> "ExperimentSpec":
        known = {
            "tag_counts",
            "mpr_orders",
            "initial_frame_lengths",
            "variants",
            "trials",
            "master_seed",
        }
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(raw)
        if "variants" in kwargs:
            kwargs["variants"] = [Variant(str(v).lower()) for v in kwargs["variants"]]
        return cls(**kwargs)

    def cells(self) -> list[CellKey]:
        keys = [
            (variant.value, n, m, l0)
            for variant in self.variants
            for n in self.tag_counts
            for m in self.mpr_orders
            for l0 in self.initial_frame_lengths
        ]
        return sorted(set(keys))


@dataclass(frozen=True)
class AggregateMetrics:
    trials: int
    read_rate_mean: float
    read_rate_std: float
    delay_mean: float
    delay_std: float
    est_err_pct_mean: float
    est_err_pct_std: float


def _trial_rng(master_seed: int, key: CellKey, trial: int) -> np.random.Generator:
    variant_code = 0 if key[0] == Variant.FSA.value else 1
    seq = np.random.SeedSequence(
        entropy=master_seed, spawn_key=(variant_code, key[1], key[2], key[3], trial)
    )
    return np.random.default_rng(seq)


def _first_frame_estimate(result, mpr: MprOrder) -> int:
    """Population estimate from the first frame's tallies.

    Uses the recorded MAP estimate where the protocol produced one; a frame
    without collisions identifies every transmitting tag, so the exact count
    is preferred there. FSA records no estimate, so the MAP step is applied
    to its observation directly for the accuracy metric.
    """
    first = result.frames[0]
    if first.observation.C == 0:
        return first.observation.identified
    if first.estimate is not None:
        return first.estimate.n_hat
    return map_estimate(first.observation, mpr).n_hat


def _std(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1))


def _run_cell(args: tuple[CellKey, int, int]) -> tuple[CellKey, AggregateMetrics]:
    key, trials, master_seed = args
    variant_value, n, m, l0 = key
    mpr = MprOrder(m)
    config = ProtocolConfig(
        n=n, mpr=mpr, initial_frame_length=l0, variant=Variant(variant_value)
    )
    read_rates = np.empty(trials)
    delays = np.empty(trials)
    errors = np.empty(trials)
    for trial in range(trials):
        rng = _trial_rng(master_seed, key, trial)
        result = run_interrogation(config, rng)
        read_rates[trial] = n / result.total_slots
        delays[trial] = result.total_slots
        if n > 0:
            errors[trial] = abs(_first_frame_estimate(result, mpr) - n) / n * 100.0
        else:
            errors[trial] = math.nan
    metrics = AggregateMetrics(
        trials=trials,
        read_rate_mean=float(read_rates.mean()),
        read_rate_std=_std(read_rates),
        delay_mean=float(delays.mean()),
        delay_std=_std(delays),
        est_err_pct_mean=float(errors.mean()),
        est_err_pct_std=_std(errors),
    )
    return key, metrics


def run_experiment(
    spec: ExperimentSpec, parallel: int = 1, progress: bool = False
) -> dict[CellKey, AggregateMetrics]:
    """Run every cell of the sweep; rows come back sorted by cell key."""
    cells = spec.cells()
    jobs = [(key, spec.trials, spec.master_seed) for key in cells]
    results: dict[CellKey, AggregateMetrics] = {}
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            for i, (key, metrics) in enumerate(pool.map(_run_cell, jobs), 1):
                results[key] = metrics
                if progress:
                    print(f"[{i}/{len(cells)}] {key} done", file=sys.stderr)
    else:
        for i, job in enumerate(jobs, 1):
            key, metrics = _run_cell(job)
            results[key] = metrics
            if progress:
                print(f"[{i}/{len(cells)}] {key} done", file=sys.stderr)
    return {key: results[key] for key in cells}


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _rows(table: Mapping[CellKey, AggregateMetrics]) -> list[dict]:
    rows = []
    for key in sorted(table):
        variant, n, m, l0 = key
        record = {"variant": variant, "n": n, "M": m, "L0": l0}
        record.update(asdict(table[key]))
        rows.append(record)
    return rows


def render_csv(table: Mapping[CellKey, AggregateMetrics]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in _rows(table):
        lines.append(",".join(_format_value(row[col]) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def render_json(table: Mapping[CellKey, AggregateMetrics]) -> str:
    rows = _rows(table)
    for row in rows:
        for col, value in row.items():
            if isinstance(value, float):
                row[col] = float(f"{value:.6g}")
    return json.dumps(rows, indent=2) + "\n"


def emit_results(
    table: Mapping[CellKey, AggregateMetrics], format: str = "csv", path: str = ""
) -> None:
    """Write the aggregated table to ``path`` as CSV or JSON."""
    if not table:
        raise ValueError("result table is empty, nothing to write")
    if format == "csv":
        text = render_csv(table)
    elif format == "json":
        text = render_json(table)
    else:
        raise ValueError(f"unknown output format {format!r}")
    with open(path, "w", newline="") as handle:
        handle.write(text)


def optimal_length_table(tag_counts: list[int], mpr_orders: list[int]) -> str:
    """CSV table of the optimal frame length and its efficiency over an (n, M) grid."""
    lines = ["n,M,raw_optimum,length,efficiency"]
    for n in tag_counts:
        for m in mpr_orders:
            mpr = MprOrder(m)
            plan = optimal_frame_length(n, mpr)
            eff = channel_efficiency(Load(n=n, L=plan.length), mpr)
            lines.append(f"{n},{m},{plan.raw_optimum:.6g},{plan.length},{eff:.6g}")
    return "\n".join(lines) + "\n"


def efficiency_curve(n: int, mpr: MprOrder, max_length: Optional[int] = None) -> str:
    """CSV of channel efficiency versus integer frame length, for one (n, M)."""
    if max_length is None:
        max_length = max(4 * n, 1)
    lines = ["L,efficiency"]
    for length in range(1, max_length + 1):
        eff = channel_efficiency(Load(n=n, L=length), mpr)
        lines.append(f"{length},{eff:.6g}")
    return "\n".join(lines) + "\n"


def analyze_curves(
    tag_counts: list[int], mpr_orders: list[int], path: str = ""
) -> str:
    """Write the closed-form L*(n, M) table (plot data backing the simulations)."""
    if not tag_counts:
        raise ValueError("tag_counts must be non-empty")
    text = optimal_length_table(tag_counts, mpr_orders)
    if path:
        with open(path, "w", newline="") as handle:
            handle.write(text)
    return text

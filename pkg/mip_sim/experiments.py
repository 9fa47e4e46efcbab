"""
Scenario execution: the varying-source-count and varying-aggregation-ratio
sweeps over every configured planner and seed.

A trial is one seed. Its deployment is drawn once and shared by every sweep
point and planner of that trial; each sweep point draws its own source set,
which all planners then plan over.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from itertools import repeat
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from .config import ExperimentConfig
from .errors import CellError, SimulationError
from .logger import SimLogger
from .metrics import MetricsRow, measure
from .network import deploy_connected, select_sources
from .planners import PlannerName, plan
from .simulator import simulate_mission

logger = logging.getLogger("MipSim.Experiments")

SweepPoint = Tuple[int, float]


class Scenario(str, Enum):
    SOURCES = "sources"
    AGGREGATION = "aggregation"
    BOTH = "both"


def cell_seed(seed: int, source_count: int) -> int:
    """Source-selection and k-means seed of one sweep point.

    Derived from (seed, source_count) through a SeedSequence, so it never
    reuses the plain integer seeds that draw trial deployments.
    """
    return int(np.random.SeedSequence([seed, source_count]).generate_state(1)[0])


def row_sort_key(row: MetricsRow):
    return (row.planner_name, row.source_count, row.aggregation_ratio, row.seed)


def run_trial(config: ExperimentConfig, seed: int, points: Sequence[SweepPoint]) -> List[MetricsRow]:
    """Every sweep point and planner of one seed"""
    deployment, topology = deploy_connected(config.network, seed, config.deploy_attempts)
    rows: List[MetricsRow] = []

    for source_count, ratio in points:
        cell = cell_seed(seed, source_count)
        params = config.agent.model_copy(update={"aggregation_ratio": ratio})
        try:
            selected = select_sources(deployment, source_count, cell)
        except SimulationError as e:
            raise CellError(e, "all", source_count, ratio, seed) from e

        for planner in config.planners:
            try:
                itineraries = plan(
                    planner,
                    selected,
                    topology,
                    K=config.partition_count,
                    ma_dpt=config.payload_threshold,
                    rng_seed=cell,
                    params=params,
                    clmip_radius_m=config.clmip_radius_m,
                    cmip_ma_dpt=config.cmip_ma_dpt,
                )
                mission = simulate_mission(itineraries, topology, params, config.energy)
                rows.append(measure(mission, planner.value, source_count, ratio, seed))
            except SimulationError as e:
                raise CellError(e, planner.value, source_count, ratio, seed) from e

    logger.info("Trial %d finished: %d rows", seed, len(rows))
    return rows


class ExperimentRunner:
    """
    Runs reproduction sweeps and keeps run statistics.
    Trials are independent and may run on a process pool; rows are sorted
    before they are returned so results never depend on scheduling.
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.sim_logger = SimLogger("MipSim.Experiments")
        self.total_rows = 0
        self.total_trials = 0
        self.last_run_duration = 0.0

    def _run_points(self, scenario: Scenario, points: List[SweepPoint]) -> List[MetricsRow]:
        seeds = list(self.config.seeds)
        workers = min(self.config.worker_count, len(seeds))
        self.sim_logger.log_activity("scenario_started", {
            "scenario": scenario.value,
            "planners": [p.value for p in self.config.planners],
            "points": len(points),
            "seeds": len(seeds),
            "workers": workers,
        })

        start = time.perf_counter()
        try:
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as executor:
                    batches = list(executor.map(run_trial, repeat(self.config), seeds, repeat(points)))
            else:
                batches = [run_trial(self.config, seed, points) for seed in seeds]
        except CellError as e:
            self.sim_logger.log_error_with_context(e, dict(e.context, scenario=scenario.value))
            raise

        rows = sorted((row for batch in batches for row in batch), key=row_sort_key)
        self.last_run_duration = time.perf_counter() - start
        self.total_rows += len(rows)
        self.total_trials += len(seeds)
        self.sim_logger.log_performance(
            f"scenario {scenario.value}", self.last_run_duration, {"rows": len(rows)}
        )
        return rows

    def run_vary_sources(self) -> List[MetricsRow]:
        ratio = self.config.agent.aggregation_ratio
        return self._run_points(Scenario.SOURCES, [(n, ratio) for n in self.config.source_counts])

    def run_vary_aggregation(self) -> List[MetricsRow]:
        count = self.config.aggregation_source_count
        return self._run_points(Scenario.AGGREGATION, [(count, f) for f in self.config.aggregation_ratios])

    def run(self, scenario: Scenario) -> Dict[Scenario, List[MetricsRow]]:
        scenario = Scenario(scenario)
        results: Dict[Scenario, List[MetricsRow]] = {}
        if scenario in (Scenario.SOURCES, Scenario.BOTH):
            results[Scenario.SOURCES] = self.run_vary_sources()
        if scenario in (Scenario.AGGREGATION, Scenario.BOTH):
            results[Scenario.AGGREGATION] = self.run_vary_aggregation()
        return results

    def get_status(self) -> Dict[str, Any]:
        return {
            "total_rows": self.total_rows,
            "total_trials": self.total_trials,
            "last_run_duration": self.last_run_duration,
            "log_summary": self.sim_logger.get_log_summary(),
            "recent_logs": self.sim_logger.get_recent_logs(5),
        }


def run_vary_sources(config: ExperimentConfig) -> List[MetricsRow]:
    return ExperimentRunner(config).run_vary_sources()


def run_vary_aggregation(config: ExperimentConfig) -> List[MetricsRow]:
    return ExperimentRunner(config).run_vary_aggregation()


def rows_frame(rows: Sequence[MetricsRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows])


def summarize(rows: Sequence[MetricsRow]) -> pd.DataFrame:
    """Mean of each metric over seeds, one line per (planner, sources, f)"""
    frame = rows_frame(rows)
    means = (
        frame.groupby(["planner_name", "source_count", "aggregation_ratio"], sort=True)
        .agg(
            task_duration_s=("task_duration_s", "mean"),
            throughput_bps=("throughput_bps", "mean"),
            energy_j=("energy_j", "mean"),
            seeds=("seed", "count"),
        )
        .reset_index()
        .rename(columns={"planner_name": "planner"})
    )
    return means


def _ordered(values: Dict[str, float], names: Sequence[str], ascending: bool) -> bool:
    pairs = zip(names, names[1:])
    if ascending:
        return all(values[a] < values[b] for a, b in pairs)
    return all(values[a] > values[b] for a, b in pairs)


def trend_report(source_rows: Sequence[MetricsRow] = (),
                 aggregation_rows: Sequence[MetricsRow] = ()) -> Dict[str, Dict[str, Any]]:
    """Directional checks on per-point means.

    Duration and throughput orderings between the three planners and between
    CMIP and GIGM-MIP alone, the energy crossover between CMIP and GIGM-MIP,
    and the CMIP duration reduction against CL-MIP at the largest source count.
    """
    cmip, gigm, clmip = PlannerName.CMIP.value, PlannerName.GIGM.value, PlannerName.CLMIP.value
    report: Dict[str, Dict[str, Any]] = {}

    def pivot(rows, index, metric):
        means = summarize(rows)
        return means.pivot_table(index=index, columns="planner", values=metric)

    def has(table, *names):
        return all(name in table.columns for name in names)

    def cmip_behind_gigm(duration, throughput, points):
        """Points where CMIP is not both faster and higher-throughput than GIGM-MIP"""
        return [
            p for p in points
            if not (duration.loc[p, cmip] < duration.loc[p, gigm]
                    and throughput.loc[p, cmip] > throughput.loc[p, gigm])
        ]

    if source_rows:
        duration = pivot(source_rows, "source_count", "task_duration_s")
        throughput = pivot(source_rows, "source_count", "throughput_bps")
        energy = pivot(source_rows, "source_count", "energy_j")
        counts = [int(n) for n in duration.index if n >= 25]

        if has(duration, cmip, gigm):
            failing = cmip_behind_gigm(duration, throughput, counts)
            report["cmip_beats_gigm_by_sources"] = {"passed": not failing, "failing_counts": failing}

        if has(duration, cmip, gigm, clmip):
            failing = [n for n in counts if not _ordered(duration.loc[n], [cmip, gigm, clmip], ascending=True)]
            report["duration_order_by_sources"] = {"passed": not failing, "failing_counts": failing}

            largest = max(duration.index)
            reduction = 1.0 - duration.loc[largest, cmip] / duration.loc[largest, clmip]
            report["cmip_reduction_vs_clmip"] = {
                "passed": bool(0.30 <= reduction <= 0.80),
                "source_count": int(largest),
                "reduction": float(reduction),
            }

            failing = [n for n in counts if not _ordered(throughput.loc[n], [cmip, gigm, clmip], ascending=False)]
            report["throughput_order_by_sources"] = {"passed": not failing, "failing_counts": failing}

        if has(energy, cmip, gigm):
            ratio = energy[cmip] / energy[gigm]
            small = ratio[(ratio.index >= 10) & (ratio.index <= 20)]
            large = ratio[ratio.index >= 40]
            report["energy_parity_small"] = {
                "passed": bool(((small - 1.0).abs() <= 0.10).all()),
                "ratios": {int(k): float(v) for k, v in small.items()},
            }
            report["energy_excess_large"] = {
                "passed": bool((large > 1.0).all()),
                "ratios": {int(k): float(v) for k, v in large.items()},
            }

    if aggregation_rows:
        duration = pivot(aggregation_rows, "aggregation_ratio", "task_duration_s")
        throughput = pivot(aggregation_rows, "aggregation_ratio", "throughput_bps")
        if has(duration, cmip, gigm):
            failing = cmip_behind_gigm(duration, throughput, [float(f) for f in duration.index])
            report["cmip_beats_gigm_by_aggregation"] = {"passed": not failing, "failing_ratios": failing}
        if has(duration, cmip):
            failing = [
                float(f) for f in duration.index
                if duration.loc[f].idxmin() != cmip or throughput.loc[f].idxmax() != cmip
            ]
            report["cmip_best_by_aggregation"] = {"passed": not failing, "failing_ratios": failing}

    for name, check in report.items():
        logger.info("Trend %s: %s", name, "ok" if check["passed"] else "FAILED")
    return report

import logging
import os
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Union

import pandas as pd
from jinja2 import Environment, StrictUndefined

from .experiments import Scenario, summarize
from .metrics import CSV_COLUMNS, MetricsRow

logger = logging.getLogger("MipSim.Reporter")

PathLike = Union[str, os.PathLike]
ResultsLike = Union[Sequence[MetricsRow], Mapping[Scenario, Sequence[MetricsRow]]]

SORT_COLUMNS = ["planner", "source_count", "aggregation_ratio", "seed"]
FLOAT_FORMAT = "%.9g"

# columns of the means table, 1-based for gnuplot
MEANS_COLUMNS = {
    "planner": 1,
    "source_count": 2,
    "aggregation_ratio": 3,
    "task_duration_s": 4,
    "throughput_bps": 5,
    "energy_j": 6,
}

METRICS = [
    ("task_duration_s", "Task duration", "Task duration (s)"),
    ("throughput_bps", "Event-to-sink throughput", "Throughput (bit/s)"),
    ("energy_j", "Energy consumption", "Energy (J)"),
]

AXES = {
    Scenario.SOURCES: ("source_count", "Number of source nodes"),
    Scenario.AGGREGATION: ("aggregation_ratio", "Aggregation ratio f"),
}

PLOT_TEMPLATE = """\
# gnuplot script; reads the means tables written next to it
# run from this directory: gnuplot {{ script_name }}
set datafile separator ","
set terminal pngcairo size 900,600 enhanced
set grid
set key top left
{% for figure in figures %}
set output "{{ figure.output }}"
set title "{{ figure.title }}"
set xlabel "{{ figure.xlabel }}"
set ylabel "{{ figure.ylabel }}"
plot {% for planner in figure.planners -%}
"{{ figure.data }}" every ::1 using {{ figure.x }}:(strcol(1) eq "{{ planner }}" ? ${{ figure.y }} : 1/0) with linespoints title "{{ planner }}"
{%- if not loop.last %}, \\
     {% endif %}{% endfor %}
{% endfor %}
unset output
"""


def means_file_name(scenario: Scenario) -> str:
    return f"{Scenario(scenario).value}_means.csv"


def emit_csv(rows: Sequence[MetricsRow], path: PathLike) -> Path:
    """Per-seed rows, sorted, 9 significant digits"""
    if not rows:
        raise ValueError("no rows to write")
    frame = pd.DataFrame([row.csv_record() for row in rows], columns=CSV_COLUMNS)
    frame = frame.sort_values(SORT_COLUMNS, kind="mergesort")
    path = Path(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("Wrote %d rows to %s", len(frame), path)
    return path


def emit_means_csv(rows: Sequence[MetricsRow], path: PathLike) -> Path:
    if not rows:
        raise ValueError("no rows to summarize")
    path = Path(path)
    summarize(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def infer_scenario(rows: Sequence[MetricsRow]) -> Scenario:
    """A sweep over several aggregation ratios is scenario B, anything else scenario A"""
    return Scenario.AGGREGATION if len({row.aggregation_ratio for row in rows}) > 1 else Scenario.SOURCES


def as_results(rows_or_results: ResultsLike) -> Dict[Scenario, Sequence[MetricsRow]]:
    if isinstance(rows_or_results, Mapping):
        return {Scenario(scenario): rows for scenario, rows in rows_or_results.items()}
    rows = list(rows_or_results)
    return {infer_scenario(rows): rows} if rows else {}


def render_plot_script(rows_or_results: ResultsLike, script_name: str = "plots.gp") -> str:
    figures: List[Dict[str, object]] = []
    for scenario, rows in as_results(rows_or_results).items():
        scenario = Scenario(scenario)
        if not rows or scenario not in AXES:
            continue
        x_name, x_label = AXES[scenario]
        planners = sorted({row.planner_name for row in rows})
        for metric, title, y_label in METRICS:
            figures.append({
                "output": f"{scenario.value}_{metric}.png",
                "title": f"{title} vs {x_label.lower()}",
                "xlabel": x_label,
                "ylabel": y_label,
                "data": means_file_name(scenario),
                "x": MEANS_COLUMNS[x_name],
                "y": MEANS_COLUMNS[metric],
                "planners": planners,
            })
    template = Environment(undefined=StrictUndefined, keep_trailing_newline=True).from_string(PLOT_TEMPLATE)
    return template.render(figures=figures, script_name=script_name)


def emit_plot_script(rows_or_results: ResultsLike, path: PathLike) -> Path:
    """gnuplot script drawing duration, throughput and energy for each scenario present.

    Takes either one scenario's rows or a mapping of scenario to rows.
    """
    results = as_results(rows_or_results)
    if not any(results.values()):
        raise ValueError("no rows to plot")
    path = Path(path)
    path.write_text(render_plot_script(results, path.name), encoding="utf-8")
    logger.info("Wrote plot script %s", path)
    return path


class Reporter:
    """Writes one run's tables and plot script into an output directory"""

    def __init__(self, output_dir: PathLike):
        self.output_dir = Path(output_dir)
        self.written: List[Path] = []

    def write(self, results: Mapping[Scenario, Sequence[MetricsRow]]) -> List[Path]:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        for scenario, rows in results.items():
            scenario = Scenario(scenario)
            self.written.append(emit_csv(rows, self.output_dir / f"{scenario.value}.csv"))
            self.written.append(emit_means_csv(rows, self.output_dir / means_file_name(scenario)))
        self.written.append(emit_plot_script(results, self.output_dir / "plots.gp"))
        return self.written

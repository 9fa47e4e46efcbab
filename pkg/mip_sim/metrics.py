"""
Headline measures of a data-gathering task: task duration, Event-to-sink
throughput and total energy.
"""

from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, NonNegativeInt

from .errors import MetricsError
from .simulator import MissionResult

# CSV schema, in column order
CSV_COLUMNS = [
    "planner",
    "source_count",
    "aggregation_ratio",
    "seed",
    "task_duration_s",
    "throughput_bps",
    "energy_j",
]


class MetricsRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    planner_name: str
    source_count: NonNegativeInt
    aggregation_ratio: float = Field(ge=0, le=1)
    task_duration_s: NonNegativeFloat
    throughput_bps: NonNegativeFloat
    energy_j: NonNegativeFloat
    seed: int
    delivered_bits: NonNegativeFloat = 0.0
    agent_count: NonNegativeInt = 0

    def csv_record(self) -> dict:
        return {
            "planner": self.planner_name,
            "source_count": self.source_count,
            "aggregation_ratio": self.aggregation_ratio,
            "seed": self.seed,
            "task_duration_s": self.task_duration_s,
            "throughput_bps": self.throughput_bps,
            "energy_j": self.energy_j,
        }


def task_duration(mission: MissionResult) -> float:
    """Completion time of the last agent back at the sink"""
    if not mission.traces:
        raise MetricsError("mission has no agents")
    return max(trace.completion_time_s for trace in mission.traces)


def event_to_sink_throughput(mission: MissionResult) -> float:
    """Delivered bits per second of task duration"""
    duration = task_duration(mission)
    if duration <= 0:
        raise MetricsError("task duration is zero", delivered_bits=mission.delivered_bits)
    return mission.delivered_bits / duration


def total_energy(mission: MissionResult) -> float:
    return sum(trace.total_energy_j for trace in mission.traces)


def measure(mission: MissionResult, planner_name: str, source_count: int,
            aggregation_ratio: float, seed: int) -> MetricsRow:
    return MetricsRow(
        planner_name=planner_name,
        source_count=source_count,
        aggregation_ratio=aggregation_ratio,
        task_duration_s=task_duration(mission),
        throughput_bps=event_to_sink_throughput(mission),
        energy_j=total_energy(mission),
        seed=seed,
        delivered_bits=mission.delivered_bits,
        agent_count=len(mission.traces),
    )

"""
Error hierarchy for the itinerary simulator.
Library code raises these; main.py maps them to exit codes.
"""

from typing import Any, Dict, Optional


def _restore_error(cls, args, state):
    error = cls.__new__(cls)
    Exception.__init__(error, *args)
    error.__dict__.update(state)
    return error


class SimulationError(Exception):
    """Base class for every failure raised by the simulator"""

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    # subclasses take their own constructor arguments; rebuild from state when
    # an error crosses a process boundary
    def __reduce__(self):
        return (_restore_error, (self.__class__, self.args, self.__dict__))

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.message} ({details})"


class InsufficientNodesError(SimulationError):
    def __init__(self, requested: int, available: int):
        super().__init__("insufficient nodes", requested=requested, available=available)
        self.requested = requested
        self.available = available


class NetworkPartitionedError(SimulationError):
    def __init__(self, node_id: int, unreachable: int = 1):
        super().__init__(
            f"network partitioned: node {node_id} cannot reach the sink",
            unreachable=unreachable,
        )
        self.node_id = node_id
        self.unreachable = unreachable


class NoPathError(SimulationError):
    def __init__(self, source: int, target: int):
        super().__init__(f"no path from {source} to {target}")
        self.source = source
        self.target = target


class PlanningError(SimulationError):
    """Planner precondition violated"""


class MetricsError(SimulationError):
    """A mission cannot be measured"""


class CellError(SimulationError):
    """Failure inside one experiment cell, with the cell coordinates attached"""

    def __init__(self, cause: Exception, planner: str, source_count: int,
                 aggregation_ratio: float, seed: int):
        super().__init__(
            f"cell failed: {cause}",
            planner=planner,
            source_count=source_count,
            aggregation_ratio=aggregation_ratio,
            seed=seed,
        )
        self.cause = cause


class ConfigError(Exception):
    """Experiment configuration could not be parsed or validated"""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field is not None:
            prefix.append(f"field '{field}'")
        full = f"{': '.join(prefix)}: {message}" if prefix else message
        super().__init__(full)
        self.line = line
        self.field = field

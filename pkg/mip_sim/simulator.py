"""
Agent simulation: walks itineraries over the topology and accounts hop
delay, per-source processing, payload growth and radio energy.

Delay of one agent is T_p + T_roam + T_back: the dispatch leg from the sink
carries only the processing code, every roam leg carries the code plus the
payload collected so far, and the return leg carries the full payload. A
cloned agent starts at its clone point once the main agent has reached it.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import SimulationError
from .network import Point, Topology, hop_path
from .params import AgentParams, EnergyParams, payload_after, per_source_payload
from .planners import AgentKind, Itinerary, ItinerarySet

logger = logging.getLogger("MipSim.Simulator")

__all__ = [
    "LegPhase", "Leg", "AgentTrace", "MissionResult",
    "payload_after", "per_source_payload", "leg_delay", "source_processing_delay",
    "leg_energy", "simulate_agent", "simulate_mission", "size_weighted_hop_cost",
]


class LegPhase(str, Enum):
    DISPATCH = "dispatch"   # sink -> first source
    HANDOFF = "handoff"     # clone point -> first source of a CMA
    ROAM = "roam"           # source -> source
    RETURN = "return"       # last source -> sink


@dataclass(frozen=True)
class Leg:
    source: int
    target: int
    phase: LegPhase
    hops: int
    ma_size_bits: float
    leg_delay_s: float
    leg_energy_j: float


@dataclass(frozen=True)
class AgentTrace:
    agent_kind: AgentKind
    legs: Tuple[Leg, ...]
    visits: int
    processing_delay_s: float
    total_delay_s: float
    total_energy_j: float
    delivered_payload_bits: float
    clone_point: Optional[int] = None
    # time between the mission dispatch and this agent's own first leg
    start_offset_s: float = 0.0

    @property
    def completion_time_s(self) -> float:
        return self.start_offset_s + self.total_delay_s

    def _phase_delay(self, *phases: LegPhase) -> float:
        return sum(leg.leg_delay_s for leg in self.legs if leg.phase in phases)

    @property
    def t_p(self) -> float:
        return self._phase_delay(LegPhase.DISPATCH, LegPhase.HANDOFF)

    @property
    def t_roam(self) -> float:
        return self._phase_delay(LegPhase.ROAM) + self.processing_delay_s

    @property
    def t_back(self) -> float:
        return self._phase_delay(LegPhase.RETURN)


@dataclass(frozen=True)
class MissionResult:
    traces: Tuple[AgentTrace, ...]
    task_duration_s: float
    total_energy_j: float
    delivered_bits: float


def leg_delay(ma_size_bits: float, hops: int, params: AgentParams) -> float:
    """(size / D_r + t_ctrl) per hop"""
    if hops < 0:
        raise ValueError("hop count cannot be negative")
    return (ma_size_bits / params.data_rate_bps + params.control_delay_s) * hops


def source_processing_delay(params: AgentParams) -> float:
    """Access delay plus local processing of the raw sensed data"""
    return params.access_delay_s + params.raw_data_bits / params.processing_rate_bps


def leg_energy(ma_size_bits: float, path: Sequence[int], positions: Mapping[int, Point],
               energy: EnergyParams) -> float:
    """First-order radio cost of carrying ma_size_bits along path.

    Each hop pays transmit (elec + amp * d^2) at the sender and elec at the
    receiver.
    """
    if len(path) < 2:
        return 0.0
    coords = np.array([(positions[n].x, positions[n].y) for n in path], dtype=float)
    squared = np.sum(np.diff(coords, axis=0) ** 2, axis=1)
    per_bit = 2.0 * energy.elec_j_per_bit * len(squared) + energy.amp_j_per_bit_m2 * float(squared.sum())
    return ma_size_bits * per_bit


def _leg(topology: Topology, source: int, target: int, phase: LegPhase, size: float,
         params: AgentParams, energy: EnergyParams) -> Leg:
    path = hop_path(topology, source, target)
    hops = len(path) - 1
    return Leg(
        source=source,
        target=target,
        phase=phase,
        hops=hops,
        ma_size_bits=size,
        leg_delay_s=leg_delay(size, hops, params),
        leg_energy_j=leg_energy(size, path, topology.positions, energy),
    )


def simulate_agent(itinerary: Itinerary, topology: Topology, params: AgentParams,
                   energy: EnergyParams) -> AgentTrace:
    """Trace one agent from its anchor through its sources and back to the sink.

    A CMA's own walk starts at the clone point with the processing code only;
    its wait for the MMA is applied by simulate_mission.
    """
    pc = params.processing_code_bits
    order = itinerary.visit_order
    sink = topology.sink_id
    legs: List[Leg] = []

    if itinerary.agent_kind is AgentKind.CMA:
        anchor, first_phase = itinerary.clone_point, LegPhase.HANDOFF
    else:
        anchor, first_phase = itinerary.start_anchor, LegPhase.DISPATCH

    if order:
        legs.append(_leg(topology, anchor, order[0], first_phase, pc, params, energy))
        for visited, (u, v) in enumerate(zip(order, order[1:]), start=1):
            size = pc + payload_after(visited, params)
            legs.append(_leg(topology, u, v, LegPhase.ROAM, size, params, energy))
        size = pc + payload_after(len(order), params)
        legs.append(_leg(topology, order[-1], sink, LegPhase.RETURN, size, params, energy))
    elif itinerary.agent_kind is AgentKind.CMA:
        # a clone with nothing to collect still has to come home
        legs.append(_leg(topology, anchor, sink, LegPhase.RETURN, pc, params, energy))

    processing = len(order) * source_processing_delay(params)
    trace = AgentTrace(
        agent_kind=itinerary.agent_kind,
        legs=tuple(legs),
        visits=len(order),
        processing_delay_s=processing,
        total_delay_s=sum(leg.leg_delay_s for leg in legs) + processing,
        total_energy_j=sum(leg.leg_energy_j for leg in legs),
        delivered_payload_bits=payload_after(len(order), params),
        clone_point=itinerary.clone_point,
    )
    logger.debug(
        "Agent %s: %d visits, %d legs, %.6f s, %.6e J",
        itinerary.agent_kind.value, trace.visits, len(legs), trace.total_delay_s, trace.total_energy_j,
    )
    return trace


def simulate_mission(itineraries: ItinerarySet, topology: Topology, params: AgentParams,
                     energy: EnergyParams) -> MissionResult:
    """Simulate every agent, offset each clone by its main agent's dispatch, reduce"""
    traces = [simulate_agent(it, topology, params, energy) for it in itineraries.itineraries]

    dispatch_by_clone_point: Dict[int, float] = {
        trace.clone_point: trace.t_p
        for trace in traces
        if trace.agent_kind is AgentKind.MMA
    }
    for index, trace in enumerate(traces):
        if trace.agent_kind is not AgentKind.CMA:
            continue
        if trace.clone_point not in dispatch_by_clone_point:
            raise SimulationError("CMA has no main agent", clone_point=trace.clone_point)
        offset = dispatch_by_clone_point[trace.clone_point] + params.cloning_delay_s
        traces[index] = replace(trace, start_offset_s=offset)

    return MissionResult(
        traces=tuple(traces),
        task_duration_s=max((t.completion_time_s for t in traces), default=0.0),
        total_energy_j=sum(t.total_energy_j for t in traces),
        delivered_bits=sum(t.delivered_payload_bits for t in traces),
    )


def size_weighted_hop_cost(visit_order: Sequence[int], hops: Callable[[int, int], int], sink: int,
                           initial_size: float = 1, growth: float = 1) -> float:
    """Itinerary cost as agent size times hops, summed over every leg.

    The agent leaves the sink at initial_size and grows by `growth` after
    each visit; the return leg is included.
    """
    if not visit_order:
        return 0
    cost = initial_size * hops(sink, visit_order[0])
    size = initial_size
    for u, v in zip(visit_order, visit_order[1:]):
        size += growth
        cost += size * hops(u, v)
    size += growth
    cost += size * hops(visit_order[-1], sink)
    return cost

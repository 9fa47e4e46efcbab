"""
Itinerary planners: LCF ordering, reversal, FSN splitting, the clone-based
CMIP planner and the CL-MIP / GIGM-MIP baselines.

All planners are static: visiting orders are computed at the sink before any
agent is dispatched.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from .clustering import kmeans_partition
from .errors import PlanningError
from .network import Deployment, Point, Topology, farthest_source_node
from .params import AgentParams, payload_after, per_source_payload

logger = logging.getLogger("MipSim.Planners")

# sources per partition targeted by the automatic K
SOURCES_PER_PARTITION = 20
# default GIGM-MIP payload threshold, in per-source payload units
DEFAULT_MA_DPT_SOURCES = 10

ImpactKernel = Callable[[np.ndarray, float], np.ndarray]


class AgentKind(str, Enum):
    MMA = "MMA"
    CMA = "CMA"
    PLAIN = "PLAIN"


class PlannerName(str, Enum):
    CMIP = "CMIP"
    CLMIP = "CL-MIP"
    GIGM = "GIGM-MIP"
    SIP = "LCF-SIP"


@dataclass(frozen=True)
class Itinerary:
    agent_kind: AgentKind
    visit_order: Tuple[int, ...]
    # sink for PLAIN and MMA dispatch, the FSN for a CMA
    start_anchor: int
    clone_point: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "visit_order", tuple(self.visit_order))
        if len(set(self.visit_order)) != len(self.visit_order):
            raise ValueError("visit_order contains duplicates")
        if self.agent_kind in (AgentKind.MMA, AgentKind.CMA) and self.clone_point is None:
            raise ValueError(f"{self.agent_kind.value} itinerary needs a clone point")


@dataclass(frozen=True)
class ItinerarySet:
    itineraries: Tuple[Itinerary, ...]
    covered_sources: FrozenSet[int]

    def __post_init__(self):
        visited = [s for it in self.itineraries for s in it.visit_order]
        if len(visited) != len(set(visited)):
            raise ValueError("a source is assigned to more than one agent")
        if set(visited) != set(self.covered_sources):
            raise ValueError("itineraries do not cover exactly the source set")
        mma_points = {it.clone_point for it in self.itineraries if it.agent_kind is AgentKind.MMA}
        for it in self.itineraries:
            if it.agent_kind is AgentKind.CMA and it.clone_point not in mma_points:
                raise ValueError(f"CMA cloned at {it.clone_point} has no matching MMA")

    @classmethod
    def from_itineraries(cls, itineraries: Iterable[Itinerary]) -> "ItinerarySet":
        itineraries = tuple(itineraries)
        covered = frozenset(s for it in itineraries for s in it.visit_order)
        return cls(itineraries=itineraries, covered_sources=covered)

    def __len__(self) -> int:
        return len(self.itineraries)


def lcf_order(sources: Iterable[int], start: Point, positions: Mapping[int, Point]) -> List[int]:
    """Local Closest First: repeatedly hop to the nearest unvisited source"""
    remaining = sorted(sources)
    if not remaining:
        raise PlanningError("LCF needs at least one source")
    order = []
    current = start
    while remaining:
        # min() keeps the first minimum, the lowest id among equal distances
        nearest = min(remaining, key=lambda s: current.distance_to(positions[s]))
        order.append(nearest)
        remaining.remove(nearest)
        current = positions[nearest]
    return order


def reverse_itinerary(itinerary: Itinerary) -> Itinerary:
    return replace(itinerary, visit_order=tuple(reversed(itinerary.visit_order)))


def split_at_fsn(itinerary: Itinerary, fsn: int) -> Tuple[Itinerary, Itinerary]:
    """Cut an LCF itinerary at the farthest source.

    The MMA takes the prefix up to the FSN reversed, so it starts at the FSN
    and works back toward the sink. The CMA keeps the suffix after the FSN in
    its original order.
    """
    order = itinerary.visit_order
    if fsn not in order:
        raise PlanningError("FSN is not on the itinerary", fsn=fsn)
    index = order.index(fsn)
    if index == len(order) - 1:
        raise PlanningError("no split needed", fsn=fsn)

    mma = Itinerary(
        agent_kind=AgentKind.MMA,
        visit_order=tuple(reversed(order[: index + 1])),
        start_anchor=itinerary.start_anchor,
        clone_point=fsn,
    )
    cma = Itinerary(
        agent_kind=AgentKind.CMA,
        visit_order=order[index + 1:],
        start_anchor=fsn,
        clone_point=fsn,
    )
    return mma, cma


def auto_partition_count(source_count: int) -> int:
    return max(1, math.ceil(source_count / SOURCES_PER_PARTITION))


def default_ma_dpt(params: AgentParams) -> float:
    return DEFAULT_MA_DPT_SOURCES * per_source_payload(params)


def segment_by_payload(order: Sequence[int], ma_dpt: float, params: AgentParams) -> List[List[int]]:
    """Cut an order into consecutive runs whose payload stays within ma_dpt"""
    if ma_dpt < per_source_payload(params):
        raise PlanningError(
            "payload threshold is below one source's contribution",
            ma_dpt=ma_dpt,
            per_source=per_source_payload(params),
        )
    segments: List[List[int]] = []
    current: List[int] = []
    for source in order:
        if current and payload_after(len(current) + 1, params) > ma_dpt:
            segments.append(current)
            current = []
        current.append(source)
    if current:
        segments.append(current)
    return segments


def exponential_impact(distances: np.ndarray, transmission_range: float) -> np.ndarray:
    """Impact of one source on another: exp(-d / range)"""
    return np.exp(-distances / transmission_range)


def _check_sources(deployment: Deployment, topology: Topology) -> List[int]:
    if not deployment.sources:
        raise PlanningError("no sources selected")
    for source in deployment.sources:
        if source not in topology.adjacency:
            raise PlanningError("source is not in the topology", source=source)
    return sorted(deployment.sources)


def _clone_or_reverse(order: Sequence[int], deployment: Deployment) -> List[Itinerary]:
    base = Itinerary(AgentKind.PLAIN, tuple(order), start_anchor=deployment.sink_id)
    fsn = farthest_source_node(order, deployment.positions, deployment.sink_position)
    if order[-1] == fsn:
        return [reverse_itinerary(base)]
    return list(split_at_fsn(base, fsn))


def plan_cmip(deployment: Deployment, topology: Topology, K: int, rng_seed: int,
              ma_dpt: Optional[float] = None,
              params: Optional[AgentParams] = None) -> ItinerarySet:
    """Clone-based planning.

    Each k-means partition is cut along its LCF order into payload-bounded
    segments, one per main agent (ma_dpt defaults to the GIGM-MIP threshold;
    math.inf keeps one segment per partition). Every segment is re-ordered by
    LCF from the sink and then either split at its FSN into an MMA/CMA pair
    or, when the FSN already closes the order, reversed whole.
    """
    sources = _check_sources(deployment, topology)
    positions = deployment.positions
    sink = deployment.sink_position
    params = params or AgentParams()
    threshold = default_ma_dpt(params) if ma_dpt is None else ma_dpt

    itineraries: List[Itinerary] = []
    for partition in kmeans_partition(sources, K, positions, rng_seed):
        order = lcf_order(partition.members, sink, positions)
        for segment in segment_by_payload(order, threshold, params):
            itineraries.extend(_clone_or_reverse(lcf_order(segment, sink, positions), deployment))

    plan = ItinerarySet.from_itineraries(itineraries)
    logger.debug(
        "CMIP plan: %d sources, %d agents (%d clones)",
        len(sources), len(plan),
        sum(1 for it in itineraries if it.agent_kind is AgentKind.CMA),
    )
    return plan


def plan_clmip(deployment: Deployment, topology: Topology,
               radius_m: Optional[float] = None,
               impact: ImpactKernel = exponential_impact) -> ItinerarySet:
    """Central-location grouping.

    Each round, every unassigned source accumulates the impact of all
    unassigned sources (itself included); the maximum becomes the visiting
    central location and every unassigned source within radius_m of it forms
    one group, visited in LCF order from the sink.
    """
    remaining = _check_sources(deployment, topology)
    positions = deployment.positions
    sink = deployment.sink_position
    radius = topology.transmission_range if radius_m is None else radius_m

    itineraries: List[Itinerary] = []
    while remaining:
        coords = np.array([(positions[s].x, positions[s].y) for s in remaining])
        distances = cdist(coords, coords)
        accumulated = impact(distances, topology.transmission_range).sum(axis=1)
        # remaining is sorted, argmax keeps the lowest id on ties
        center = int(np.argmax(accumulated))
        grouped = {remaining[i] for i in np.flatnonzero(distances[center] <= radius)}
        order = lcf_order(grouped, sink, positions)
        itineraries.append(Itinerary(AgentKind.PLAIN, tuple(order), start_anchor=deployment.sink_id))
        remaining = [s for s in remaining if s not in grouped]

    logger.debug("CL-MIP plan: %d groups", len(itineraries))
    return ItinerarySet.from_itineraries(itineraries)


def plan_gigm(deployment: Deployment, topology: Topology, K: int, ma_dpt: float,
              rng_seed: int, params: Optional[AgentParams] = None) -> ItinerarySet:
    """k-means partitions, each cut along its LCF order into agents with free payload"""
    sources = _check_sources(deployment, topology)
    positions = deployment.positions
    sink = deployment.sink_position
    params = params or AgentParams()

    itineraries: List[Itinerary] = []
    for partition in kmeans_partition(sources, K, positions, rng_seed):
        order = lcf_order(partition.members, sink, positions)
        for segment in segment_by_payload(order, ma_dpt, params):
            itineraries.append(Itinerary(AgentKind.PLAIN, tuple(segment), start_anchor=deployment.sink_id))

    logger.debug("GIGM-MIP plan: %d agents over %d sources", len(itineraries), len(sources))
    return ItinerarySet.from_itineraries(itineraries)


def plan_lcf_sip(deployment: Deployment, topology: Topology) -> ItinerarySet:
    """Single itinerary: one agent visits every source in LCF order"""
    sources = _check_sources(deployment, topology)
    order = lcf_order(sources, deployment.sink_position, deployment.positions)
    return ItinerarySet.from_itineraries(
        [Itinerary(AgentKind.PLAIN, tuple(order), start_anchor=deployment.sink_id)]
    )


def plan(planner: PlannerName, deployment: Deployment, topology: Topology, *,
         K: Optional[int] = None, ma_dpt: Optional[float] = None, rng_seed: int = 0,
         params: Optional[AgentParams] = None, clmip_radius_m: Optional[float] = None,
         cmip_ma_dpt: Optional[float] = None) -> ItinerarySet:
    """Dispatch to a planner; K and ma_dpt default to their automatic values.

    CMIP shares ma_dpt with GIGM-MIP unless cmip_ma_dpt is given.
    """
    params = params or AgentParams()
    planner = PlannerName(planner)
    partitions = K if K is not None else auto_partition_count(len(deployment.sources))
    threshold = ma_dpt if ma_dpt is not None else default_ma_dpt(params)

    if planner is PlannerName.CMIP:
        cmip_threshold = cmip_ma_dpt if cmip_ma_dpt is not None else threshold
        return plan_cmip(deployment, topology, partitions, rng_seed, ma_dpt=cmip_threshold, params=params)
    if planner is PlannerName.CLMIP:
        return plan_clmip(deployment, topology, radius_m=clmip_radius_m)
    if planner is PlannerName.GIGM:
        return plan_gigm(deployment, topology, partitions, threshold, rng_seed, params=params)
    return plan_lcf_sip(deployment, topology)

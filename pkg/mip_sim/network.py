"""
Network substrate: node deployment, unit-disk connectivity, minimum-hop
routing and farthest-source selection.
Every planner and the simulator operate on the values built here.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.spatial import cKDTree

from .errors import (
    InsufficientNodesError,
    NetworkPartitionedError,
    NoPathError,
    PlanningError,
)

logger = logging.getLogger("MipSim.Network")

# Stride between redraw seeds in deploy_connected
REDRAW_SEED_STRIDE = 7919


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def distance_to(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class NetworkConfig(BaseModel):
    """Field geometry and radio range; defaults are the reference 1000 x 500 m setup"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    field_width: float = Field(1000.0, gt=0)
    field_height: float = Field(500.0, gt=0)
    node_count: int = Field(800, ge=1)
    transmission_range: float = Field(60.0, gt=0)
    sink_position: Point = None  # type: ignore[assignment]
    rng_seed: int = 0

    @model_validator(mode="before")
    @classmethod
    def _center_sink(cls, data):
        if isinstance(data, dict) and data.get("sink_position") is None:
            data = dict(data)
            width = data.get("field_width", 1000.0)
            height = data.get("field_height", 500.0)
            data["sink_position"] = Point(float(width) / 2.0, float(height) / 2.0)
        return data

    @model_validator(mode="after")
    def _sink_inside_field(self):
        sink = self.sink_position
        if not (0 <= sink.x <= self.field_width and 0 <= sink.y <= self.field_height):
            raise ValueError("sink_position must lie inside the field")
        return self


@dataclass(frozen=True)
class Deployment:
    """Node positions, the sink and the selected sources of one trial.

    Regular nodes are numbered 0..n-1; the sink gets id n.
    """

    nodes: Tuple[Tuple[int, Point], ...]
    sink_id: int
    sink_position: Point
    sources: Tuple[int, ...] = ()

    def __post_init__(self):
        ids = [node_id for node_id, _ in self.nodes]
        if ids != list(range(len(ids))):
            raise ValueError("node ids must be dense and ordered from 0")
        if self.sink_id in ids:
            raise ValueError("sink id collides with a regular node id")
        if len(set(self.sources)) != len(self.sources):
            raise ValueError("sources must be distinct")
        if self.sink_id in self.sources:
            raise ValueError("the sink cannot be a source")
        for source in self.sources:
            if not 0 <= source < len(ids):
                raise ValueError(f"source {source} is not a deployed node")

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @cached_property
    def positions(self) -> Dict[int, Point]:
        """All positions, sink included"""
        positions = {node_id: point for node_id, point in self.nodes}
        positions[self.sink_id] = self.sink_position
        return positions

    def coordinates(self) -> np.ndarray:
        """(n + 1) x 2 array indexed by node id, sink in the last row"""
        coords = np.empty((self.node_count + 1, 2), dtype=float)
        for node_id, point in self.nodes:
            coords[node_id] = (point.x, point.y)
        coords[self.sink_id] = (self.sink_position.x, self.sink_position.y)
        return coords


@dataclass(frozen=True)
class Topology:
    adjacency: Mapping[int, FrozenSet[int]]
    positions: Mapping[int, Point]
    sink_id: int
    transmission_range: float
    # memoized BFS parent maps, one per origin; filled lazily, never changed once
    # stored, and handed out read-only
    _trees: Dict[int, Dict[int, Optional[int]]] = field(
        default_factory=dict, repr=False, compare=False
    )
    _sorted_neighbors: Dict[int, Tuple[int, ...]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self):
        for node, neighbors in self.adjacency.items():
            self._sorted_neighbors[node] = tuple(sorted(neighbors))

    def neighbors(self, node_id: int) -> Tuple[int, ...]:
        return self._sorted_neighbors[node_id]

    def bfs_tree(self, origin: int) -> Mapping[int, Optional[int]]:
        """Parent map of the minimum-hop tree rooted at origin.

        Frontiers are expanded in ascending id order, so every node's parent
        is its lowest-id neighbour in the previous layer.
        """
        tree = self._trees.get(origin)
        if tree is not None:
            return MappingProxyType(tree)
        if origin not in self.adjacency:
            raise KeyError(f"unknown node {origin}")
        parents: Dict[int, Optional[int]] = {origin: None}
        frontier = [origin]
        while frontier:
            next_layer = []
            for node in frontier:
                for neighbor in self._sorted_neighbors[node]:
                    if neighbor not in parents:
                        parents[neighbor] = node
                        next_layer.append(neighbor)
            next_layer.sort()
            frontier = next_layer
        self._trees[origin] = parents
        return MappingProxyType(parents)

    def hop_count(self, source: int, target: int) -> int:
        return len(hop_path(self, source, target)) - 1


def deploy_nodes(config: NetworkConfig) -> Deployment:
    """Uniform random placement over the field, seeded by config.rng_seed"""
    rng = np.random.default_rng(config.rng_seed)
    xs = rng.uniform(0.0, config.field_width, size=config.node_count)
    ys = rng.uniform(0.0, config.field_height, size=config.node_count)
    nodes = tuple(
        (node_id, Point(float(x), float(y)))
        for node_id, (x, y) in enumerate(zip(xs, ys))
    )
    return Deployment(
        nodes=nodes,
        sink_id=config.node_count,
        sink_position=config.sink_position,
    )


def deployment_from_positions(positions: Sequence[Point], sink_position: Point,
                              sources: Iterable[int] = ()) -> Deployment:
    """Hand-placed deployment; node i sits at positions[i]"""
    nodes = tuple((node_id, point) for node_id, point in enumerate(positions))
    return Deployment(
        nodes=nodes,
        sink_id=len(nodes),
        sink_position=sink_position,
        sources=tuple(sources),
    )


def select_sources(deployment: Deployment, count: int, rng_seed: int) -> Deployment:
    """Sample `count` distinct non-sink nodes without replacement"""
    if count < 1:
        raise PlanningError("source count must be at least 1", count=count)
    if count > deployment.node_count:
        raise InsufficientNodesError(count, deployment.node_count)
    rng = np.random.default_rng(rng_seed)
    chosen = rng.choice(deployment.node_count, size=count, replace=False)
    return Deployment(
        nodes=deployment.nodes,
        sink_id=deployment.sink_id,
        sink_position=deployment.sink_position,
        sources=tuple(int(node_id) for node_id in chosen),
    )


def build_topology(deployment: Deployment, transmission_range: float,
                   require_connected: bool = True) -> Topology:
    """Unit-disk graph: an edge joins every pair at distance <= range"""
    if deployment.node_count == 0:
        raise PlanningError("deployment has no nodes")
    coords = deployment.coordinates()
    adjacency: Dict[int, set] = {node_id: set() for node_id in range(len(coords))}
    # query_pairs keeps pairs with distance <= r
    for u, v in cKDTree(coords).query_pairs(r=transmission_range):
        adjacency[int(u)].add(int(v))
        adjacency[int(v)].add(int(u))

    topology = Topology(
        adjacency={node: frozenset(neigh) for node, neigh in adjacency.items()},
        positions=deployment.positions,
        sink_id=deployment.sink_id,
        transmission_range=transmission_range,
    )

    if require_connected:
        reached = topology.bfs_tree(deployment.sink_id)
        if len(reached) < len(coords):
            missing = sorted(set(adjacency) - set(reached))
            raise NetworkPartitionedError(missing[0], unreachable=len(missing))

    logger.debug(
        "Topology built: %d nodes, %d edges",
        len(coords),
        sum(len(n) for n in adjacency.values()) // 2,
    )
    return topology


def deploy_connected(config: NetworkConfig, rng_seed: int,
                     max_attempts: int = 20) -> Tuple[Deployment, Topology]:
    """Redraw the deployment until its unit-disk graph reaches the sink"""
    last_error: Optional[NetworkPartitionedError] = None
    for attempt in range(max_attempts):
        seed = rng_seed + attempt * REDRAW_SEED_STRIDE
        deployment = deploy_nodes(config.model_copy(update={"rng_seed": seed}))
        try:
            return deployment, build_topology(deployment, config.transmission_range)
        except NetworkPartitionedError as e:
            last_error = e
            logger.warning(
                "Deployment redraw: seed %d partitioned at node %d (attempt %d/%d)",
                seed, e.node_id, attempt + 1, max_attempts,
            )
    assert last_error is not None
    raise last_error


def hop_path(topology: Topology, source: int, target: int) -> List[int]:
    """Minimum-hop path including both endpoints"""
    if source not in topology.adjacency:
        raise KeyError(f"unknown node {source}")
    if target not in topology.adjacency:
        raise KeyError(f"unknown node {target}")
    parents = topology.bfs_tree(source)
    if target not in parents:
        raise NoPathError(source, target)
    path = [target]
    while path[-1] != source:
        path.append(parents[path[-1]])
    path.reverse()
    return path


def farthest_source_node(sources: Iterable[int], positions: Mapping[int, Point],
                         sink: Point) -> int:
    """Source at maximum Euclidean distance from the sink, lowest id on ties"""
    ordered = sorted(sources)
    if not ordered:
        raise PlanningError("cannot pick a farthest source from an empty set")
    # max() keeps the first maximum, which is the lowest id
    return max(ordered, key=lambda node_id: positions[node_id].distance_to(sink))

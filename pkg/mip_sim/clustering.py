"""
Geometric partitioning of source nodes with Lloyd's k-means.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Mapping

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from .errors import PlanningError
from .network import Point

logger = logging.getLogger("MipSim.Clustering")

MAX_ITERATIONS = 100


@dataclass(frozen=True)
class Partition:
    members: FrozenSet[int]
    centroid: Point

    def __post_init__(self):
        if not self.members:
            raise ValueError("a partition needs at least one member")


def kmeans_partition(sources: Iterable[int], K: int, positions: Mapping[int, Point],
                     rng_seed: int) -> List[Partition]:
    """Split sources into K partitions by position.

    Initial centroids are K distinct sources drawn with rng_seed. Lloyd
    iterations stop once assignments are stable (tol=0) or after
    MAX_ITERATIONS. Nearest-centroid ties go to the lower partition index and
    an emptied cluster takes over the point farthest from its own centroid.
    """
    ordered = sorted(sources)
    if not 1 <= K <= len(ordered):
        raise PlanningError("partition count out of range", K=K, sources=len(ordered))

    coords = np.array([(positions[s].x, positions[s].y) for s in ordered], dtype=float)
    rng = np.random.default_rng(rng_seed)
    seeds = rng.choice(len(ordered), size=K, replace=False)

    if K == 1:
        labels = np.zeros(len(ordered), dtype=int)
    else:
        model = KMeans(
            n_clusters=K,
            init=coords[seeds],
            n_init=1,
            max_iter=MAX_ITERATIONS,
            tol=0.0,
            algorithm="lloyd",
        )
        with warnings.catch_warnings():
            # coincident sources can leave fewer distinct clusters than K
            warnings.simplefilter("ignore", ConvergenceWarning)
            labels = model.fit_predict(coords)

    partitions = []
    for label in range(K):
        mask = labels == label
        if not mask.any():
            continue
        members = frozenset(ordered[i] for i in np.flatnonzero(mask))
        center = coords[mask].mean(axis=0)
        partitions.append(Partition(members=members, centroid=Point(float(center[0]), float(center[1]))))

    logger.debug("k-means: %d sources into %d partitions", len(ordered), len(partitions))
    return partitions

import numpy as np
import pytest

from mip_sim.clustering import kmeans_partition
from mip_sim.errors import PlanningError
from mip_sim.network import Point


def blobs():
    rng = np.random.default_rng(4)
    positions = {}
    for i, (x, y) in enumerate(rng.uniform(-10.0, 10.0, size=(10, 2))):
        positions[i] = Point(100.0 + x, 100.0 + y)
    for i, (x, y) in enumerate(rng.uniform(-10.0, 10.0, size=(10, 2)), start=10):
        positions[i] = Point(400.0 + x, 100.0 + y)
    return positions


def test_single_partition_holds_everything():
    positions = blobs()
    (partition,) = kmeans_partition(positions, 1, positions, rng_seed=0)
    assert partition.members == frozenset(positions)
    assert partition.centroid.x == pytest.approx(np.mean([p.x for p in positions.values()]))
    assert partition.centroid.y == pytest.approx(np.mean([p.y for p in positions.values()]))


def test_one_partition_per_source():
    positions = {i: Point(float(i * 50), 0.0) for i in range(6)}
    partitions = kmeans_partition(positions, 6, positions, rng_seed=1)
    assert sorted(len(p.members) for p in partitions) == [1] * 6


@pytest.mark.parametrize("seed", range(5))
def test_separated_blobs_are_recovered(seed):
    positions = blobs()
    partitions = kmeans_partition(positions, 2, positions, rng_seed=seed)
    assert {p.members for p in partitions} == {frozenset(range(10)), frozenset(range(10, 20))}


def test_partitions_cover_the_sources_once():
    positions = blobs()
    partitions = kmeans_partition(positions, 4, positions, rng_seed=2)
    members = [s for p in partitions for s in p.members]
    assert sorted(members) == sorted(positions)


@pytest.mark.parametrize("K", [0, 21])
def test_out_of_range_partition_count(K):
    positions = blobs()
    with pytest.raises(PlanningError):
        kmeans_partition(positions, K, positions, rng_seed=0)


def test_same_seed_same_partitions():
    positions = blobs()
    assert kmeans_partition(positions, 3, positions, 8) == kmeans_partition(positions, 3, positions, 8)

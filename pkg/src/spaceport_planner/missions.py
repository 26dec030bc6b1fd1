"""Mission typing: k-means over (semi-major axis, inclination) pairs,
silhouette scoring, and apportionment of total demand into per-type demands.

Clustering runs in raw units (km, degrees) by default; an optional
standardization switch rescales both features to unit variance first.
Cluster labels are canonicalized by ascending semi-major axis so results are
order-stable across seeds that find the same partition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MissionType",
    "ClusterModel",
    "kmeans",
    "silhouette_score",
    "apportion_demand",
    "mission_types_from_clusters",
]

DEFAULT_CLUSTER_COUNT = 5
DEFAULT_SEED = 42
MAX_LLOYD_ITERATIONS = 300


@dataclass(frozen=True)
class MissionType:
    index: int
    orbit_radius_km: float
    inclination_deg: float
    weight: float
    demand: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"weight out of [0, 1]: {self.weight}")
        if self.demand < 0:
            raise ValueError(f"negative demand: {self.demand}")


@dataclass(frozen=True)
class ClusterModel:
    centroids: np.ndarray  # (m, 2): semi-major axis km, inclination deg
    assignment: np.ndarray  # (n,) cluster index per point
    inertia: float

    @property
    def m(self) -> int:
        return len(self.centroids)


def _plus_plus_seed(points: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ initialization: spread starting centroids out proportionally
    to squared distance from those already chosen."""
    n = len(points)
    centroids = np.empty((m, 2))
    centroids[0] = points[rng.integers(n)]
    d2 = np.sum((points - centroids[0]) ** 2, axis=1)
    for k in range(1, m):
        total = d2.sum()
        if total <= 0:
            centroids[k] = points[rng.integers(n)]
        else:
            centroids[k] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((points - centroids[k]) ** 2, axis=1))
    return centroids


def kmeans(
    points: np.ndarray,
    m: int = DEFAULT_CLUSTER_COUNT,
    seed: int = DEFAULT_SEED,
    standardize: bool = False,
) -> ClusterModel:
    """Lloyd's algorithm with k-means++ seeding; deterministic for a fixed seed."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError(f"expected (n, 2) points, got shape {points.shape}")
    if m < 1:
        raise ValueError(f"cluster count must be >= 1: {m}")
    n = len(points)
    if n < m:
        raise ValueError(f"need at least m={m} points, got {n}")
    if len(np.unique(points, axis=0)) < m:
        raise ValueError(f"fewer than m={m} distinct points")

    work = points.copy()
    scale = np.ones(2)
    if standardize:
        scale = work.std(axis=0)
        scale[scale == 0] = 1.0
        work = work / scale

    rng = np.random.default_rng(seed)
    centroids = _plus_plus_seed(work, m, rng)
    assignment = np.full(n, -1)
    for _ in range(MAX_LLOYD_ITERATIONS):
        d2 = np.sum((work[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        new_assignment = d2.argmin(axis=1)
        if np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
        for k in range(m):
            members = work[assignment == k]
            if len(members):
                centroids[k] = members.mean(axis=0)
            else:
                # re-seed an empty cluster at the point farthest from its centroid
                worst = np.argmax(d2[np.arange(n), assignment])
                centroids[k] = work[worst]

    # canonicalize labels by ascending semi-major axis
    order = np.argsort(centroids[:, 0], kind="stable")
    relabel = np.empty(m, dtype=int)
    relabel[order] = np.arange(m)
    centroids = centroids[order] * scale
    assignment = relabel[assignment]
    d2 = np.sum((points - centroids[assignment]) ** 2, axis=1) if not standardize else np.sum(
        (work - (centroids / scale)[assignment]) ** 2, axis=1
    )
    return ClusterModel(centroids=centroids, assignment=assignment, inertia=float(d2.sum()))


def silhouette_score(points: np.ndarray, model: ClusterModel) -> float:
    """Mean silhouette (b - a) / max(a, b) over all points.

    Singleton-cluster points contribute 0, matching the usual convention.
    """
    if model.m < 2:
        raise ValueError("silhouette requires at least 2 clusters")
    points = np.asarray(points, dtype=float)
    n = len(points)
    labels = model.assignment
    dist = np.sqrt(np.sum((points[:, None, :] - points[None, :, :]) ** 2, axis=2))
    scores = np.zeros(n)
    sizes = np.array([(labels == k).sum() for k in range(model.m)])
    for i in range(n):
        k = labels[i]
        if sizes[k] <= 1:
            continue
        a = dist[i][labels == k].sum() / (sizes[k] - 1)
        b = min(
            dist[i][labels == other].mean()
            for other in range(model.m)
            if other != k and sizes[other] > 0
        )
        scores[i] = (b - a) / max(a, b)
    return float(scores.mean())


def apportion_demand(total: int, weights: list[float], tol: float = 1e-9) -> list[int]:
    """Largest-remainder apportionment; the outputs always sum to `total`."""
    if total < 0:
        raise ValueError(f"total demand must be non-negative: {total}")
    if any(w < 0 for w in weights):
        raise ValueError("negative weight")
    if abs(sum(weights) - 1.0) > tol:
        raise ValueError(f"weights must sum to 1, got {sum(weights)}")
    quotas = [total * w for w in weights]
    floors = [int(q) for q in quotas]
    shortfall = total - sum(floors)
    remainders = sorted(
        range(len(weights)), key=lambda j: (quotas[j] - floors[j], -j), reverse=True
    )
    for j in remainders[:shortfall]:
        floors[j] += 1
    return floors


def mission_types_from_clusters(model: ClusterModel, total_demand: int) -> list[MissionType]:
    """Turn a cluster model into mission types with weights and demands.

    Weight = cluster share of the data; orbital radius is approximated by the
    cluster-mean semi-major axis.
    """
    n = len(model.assignment)
    if n == 0:
        raise ValueError("empty cluster model")
    weights = [(model.assignment == k).sum() / n for k in range(model.m)]
    demands = apportion_demand(total_demand, weights)
    return [
        MissionType(
            index=k,
            orbit_radius_km=float(model.centroids[k, 0]),
            inclination_deg=float(model.centroids[k, 1]),
            weight=weights[k],
            demand=demands[k],
        )
        for k in range(model.m)
    ]

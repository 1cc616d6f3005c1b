"""Clustering over feature vectors: standardization, k-means, DBSCAN.

Both algorithms are implemented here rather than delegated, because their
outputs are part of the package's reproducibility contract: identical
(matrix, params, seed) must give identical bits on every platform, and the
tie-breaking rules below are fixed:

- k-means: k-means++ seeding from the package xorshift64* stream, nearest
  centroid ties to the lowest centroid index, empty clusters repaired by
  seizing the point currently farthest from its assigned centroid, restarts
  use seeds seed, seed+1, ... and ties in final inertia keep the lowest seed.
- DBSCAN: eps-neighborhoods include the point itself; cluster ids are
  assigned in order of first core point by ascending row index; border
  points join the cluster of the first core point (ascending index) that
  reaches them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BadK, BadParam, UnknownMethod
from .rng import Xorshift64Star

NOISE = -1


@dataclass
class PointMatrix:
    """n points x d features plus the measurement id of each row."""

    ids: list[str]
    rows: np.ndarray

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2:
            raise ValueError("rows must be a 2-D matrix")
        if len(self.ids) != self.rows.shape[0]:
            raise ValueError("one id per row required")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("ids must be unique")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("all entries must be finite")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


@dataclass
class ClusterAssignment:
    labels: list[int]
    centroids: np.ndarray | None = None
    inertia: float | None = None
    iterations: int | None = None


def standardize(m: PointMatrix) -> PointMatrix:
    """Per-column z-score with population standard deviation.

    Zero-variance columns map to all-zeros instead of dividing by zero.
    """
    if m.n < 1:
        raise ValueError("standardize needs at least one point")
    mu = m.rows.mean(axis=0)
    sd = m.rows.std(axis=0)
    out = np.zeros_like(m.rows)
    nz = sd > 0
    out[:, nz] = (m.rows[:, nz] - mu[nz]) / sd[nz]
    return PointMatrix(ids=list(m.ids), rows=out)


def _sq_dists(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = points - center
    return np.einsum("ij,ij->i", diff, diff)


def _kmeans_pp_init(points: np.ndarray, k: int, rng: Xorshift64Star) -> list[int]:
    """k-means++ seeding: first index uniform, then D^2-weighted choices."""
    n = points.shape[0]
    chosen = [rng.randrange(n)]
    d2 = _sq_dists(points, points[chosen[0]])
    while len(chosen) < k:
        total = float(d2.sum())
        if total <= 0.0:
            remaining = sorted(set(range(n)) - set(chosen))
            pick = remaining[rng.randrange(len(remaining))] if remaining else rng.randrange(n)
        else:
            r = rng.random() * total
            cum = np.cumsum(d2)
            pick = int(np.searchsorted(cum, r, side="right"))
            pick = min(pick, n - 1)
        chosen.append(pick)
        d2 = np.minimum(d2, _sq_dists(points, points[pick]))
    return chosen


def kmeans_single(
    m: PointMatrix,
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-9,
    init_indices: Sequence[int] | None = None,
) -> tuple[ClusterAssignment, list[float]]:
    """One Lloyd run; returns the assignment and the per-iteration inertia trace.

    init_indices bypasses k-means++ (used to pin initialization in tests and
    to compare runs across row permutations).
    """
    _check_kmeans_params(m, k, tol)
    points = m.rows
    n = m.n
    if init_indices is not None:
        if len(init_indices) != k:
            raise BadK(f"init_indices must have length k={k}")
        chosen = list(init_indices)
    else:
        chosen = _kmeans_pp_init(points, k, Xorshift64Star(seed))
    centroids = points[chosen].copy()

    history: list[float] = []
    labels = np.zeros(n, dtype=int)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        dists = _pairwise_sq(points, centroids)
        labels = np.argmin(dists, axis=1)  # ties -> lowest centroid index

        # repair empty clusters: seize the point farthest from its centroid,
        # never draining another cluster to zero
        assigned_d = dists[np.arange(n), labels].copy()
        sizes = np.bincount(labels, minlength=k)
        for j in range(k):
            if sizes[j] == 0:
                candidates = np.flatnonzero(sizes[labels] > 1)
                far = int(candidates[np.argmax(assigned_d[candidates])])
                sizes[labels[far]] -= 1
                labels[far] = j
                sizes[j] = 1
                centroids[j] = points[far]
                assigned_d[far] = 0.0

        new_centroids = np.vstack([points[labels == j].mean(axis=0) for j in range(k)])
        history.append(_inertia(points, labels, new_centroids))
        displacement = float(np.sqrt(np.max(np.sum((new_centroids - centroids) ** 2, axis=1))))
        centroids = new_centroids
        if displacement < tol:
            break

    # final assignment against the converged centroids, so labels are argmin
    dists = _pairwise_sq(points, centroids)
    labels = np.argmin(dists, axis=1)
    inertia = _inertia(points, labels, centroids)
    return (
        ClusterAssignment(
            labels=[int(x) for x in labels],
            centroids=centroids,
            inertia=inertia,
            iterations=iterations,
        ),
        history,
    )


def kmeans(
    m: PointMatrix,
    k: int,
    seed: int = 0,
    restarts: int = 10,
    max_iter: int = 300,
    tol: float = 1e-9,
) -> ClusterAssignment:
    """Best of `restarts` Lloyd runs (seeds seed..seed+restarts-1) by inertia."""
    _check_kmeans_params(m, k, tol)
    if restarts < 1:
        raise BadParam("restarts must be >= 1")
    best: ClusterAssignment | None = None
    for s in range(seed, seed + restarts):
        run, _ = kmeans_single(m, k, seed=s, max_iter=max_iter, tol=tol)
        if best is None or run.inertia < best.inertia:
            best = run
    return best


def _check_kmeans_params(m: PointMatrix, k: int, tol: float) -> None:
    if not 1 <= k <= m.n:
        raise BadK(f"k={k} out of range [1, {m.n}]")
    if tol <= 0:
        raise BadParam("tol must be > 0")


def _pairwise_sq(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _inertia(points: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    diff = points - centroids[labels]
    return float(np.einsum("ij,ij->", diff, diff))


def dbscan(m: PointMatrix, eps: float, min_pts: int) -> ClusterAssignment:
    """Density clustering with Euclidean eps-neighborhoods (self included)."""
    if eps <= 0:
        raise BadParam("eps must be > 0")
    if min_pts < 1:
        raise BadParam("min_pts must be >= 1")
    points = m.rows
    n = m.n
    diff = points[:, None, :] - points[None, :, :]
    within = np.einsum("ijd,ijd->ij", diff, diff) <= eps * eps
    neighbor_count = within.sum(axis=1)
    core = neighbor_count >= min_pts

    labels = [NOISE] * n
    cluster_id = 0
    for i in range(n):
        if not core[i] or labels[i] != NOISE:
            continue
        # flood the connected component of core points reachable from i
        labels[i] = cluster_id
        stack = [i]
        while stack:
            p = stack.pop()
            for q in np.flatnonzero(within[p]):
                q = int(q)
                if core[q] and labels[q] == NOISE:
                    labels[q] = cluster_id
                    stack.append(q)
        cluster_id += 1

    # border points: first reaching core point by ascending index
    for i in range(n):
        if core[i] or labels[i] != NOISE:
            continue
        for q in np.flatnonzero(within[i]):
            if core[int(q)]:
                labels[i] = labels[int(q)]
                break
    return ClusterAssignment(labels=labels)


_ANALYSERS: dict[str, Callable[..., ClusterAssignment]] = {}


def register_analyser(method: str, fn: Callable[..., ClusterAssignment]) -> None:
    """Plug in an additional analyser reachable through `analyse`."""
    _ANALYSERS[method] = fn


def analyse(m: PointMatrix, spec: dict) -> ClusterAssignment:
    """Dispatch on an analyser descriptor {"method": ..., "params": {...}}.

    Parameters may also be given flat next to "method".
    """
    if "method" not in spec:
        raise UnknownMethod("descriptor lacks a method")
    method = spec["method"]
    fn = _ANALYSERS.get(method)
    if fn is None:
        raise UnknownMethod(method)
    params = dict(spec.get("params", {k: v for k, v in spec.items() if k != "method"}))
    return fn(m, **params)


register_analyser("kmeans", kmeans)
register_analyser("dbscan", dbscan)

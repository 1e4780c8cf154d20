"""Shared geometric kernels: kNN graphs, Chamfer distance, mesh sampling.

The distance kernels are the hot loops of evaluation (pairwise Chamfer over
whole shape sets is O(|A|*|B|*N^2)), so they live in a compiled extension
with a pure-NumPy fallback. The backend is picked once at import; set
SPHEREGEN_PURE_PYTHON=1 to force the fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _numpy_impl

if os.environ.get("SPHEREGEN_PURE_PYTHON") == "1":
    _impl = _numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _numpy_impl
        BACKEND = "numpy"


@dataclass
class PointCloud:
    """N x 3 coordinates, optionally carrying one small-integer label per point."""

    points: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError(f"points must be (n, 3), got {points.shape}")
        if not np.all(np.isfinite(points)):
            raise ValueError("point coordinates must be finite")
        self.points = points
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.uint16).reshape(-1)
            if labels.shape[0] != points.shape[0]:
                raise ValueError("labels length must match point count")
            self.labels = labels

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass
class NeighborGraph:
    """Row i lists the k nearest neighbors of point/feature i (self excluded)."""

    indices: np.ndarray
    k: int


@dataclass
class TriangleMesh:
    vertices: np.ndarray  # (V, 3)
    faces: np.ndarray  # (F, 3) int vertex indices

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64)
        self.faces = np.asarray(self.faces, dtype=np.int64)
        if self.faces.size and (
            self.faces.min() < 0 or self.faces.max() >= len(self.vertices)
        ):
            raise ValueError("face indices out of range")

    def face_areas(self) -> np.ndarray:
        v0 = self.vertices[self.faces[:, 0]]
        v1 = self.vertices[self.faces[:, 1]]
        v2 = self.vertices[self.faces[:, 2]]
        return 0.5 * np.linalg.norm(np.cross(v1 - v0, v2 - v0), axis=1)


def knn(query_features: np.ndarray, k: int) -> NeighborGraph:
    """Exact kNN graph in feature space; self excluded, ties by lower index."""
    f = np.asarray(query_features, dtype=np.float64)
    if f.ndim != 2:
        raise ValueError(f"features must be 2-D, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("features must be finite")
    n = f.shape[0]
    if k < 1 or k >= n:
        raise ValueError(f"k must satisfy 1 <= k < n (k={k}, n={n})")
    return NeighborGraph(indices=np.asarray(_impl.knn_indices(f, k)), k=k)


def _cloud_array(c) -> np.ndarray:
    return c.points if isinstance(c, PointCloud) else np.asarray(c, dtype=np.float64)


def chamfer(a, b) -> float:
    """Symmetric squared-distance Chamfer: mean over a of the squared distance
    to the nearest point of b, plus the same with a and b swapped."""
    pa, pb = _cloud_array(a), _cloud_array(b)
    if pa.shape[0] == 0 or pb.shape[0] == 0:
        raise ValueError("chamfer requires non-empty clouds")
    return float(_impl.chamfer(pa, pb))


def pairwise_chamfer(set_a: Sequence, set_b: Sequence) -> np.ndarray:
    """Chamfer matrix between two shape sets, shape (len_a, len_b)."""
    la = [np.ascontiguousarray(_cloud_array(a)) for a in set_a]
    lb = [np.ascontiguousarray(_cloud_array(b)) for b in set_b]
    if not la or not lb:
        raise ValueError("pairwise_chamfer requires non-empty sets")
    return np.asarray(_impl.pairwise_chamfer(la, lb))


def sample_mesh(mesh: TriangleMesh, n: int, rng: np.random.Generator) -> PointCloud:
    """Area-weighted triangle pick + uniform barycentric sample, n points."""
    if n < 1:
        raise ValueError("n must be >= 1")
    areas = mesh.face_areas()
    total = areas.sum()
    if total <= 0.0:
        raise ValueError("mesh has no non-degenerate face")
    prob = areas / total
    tri = rng.choice(len(mesh.faces), size=n, p=prob)
    u = rng.random((n, 1))
    v = rng.random((n, 1))
    flip = (u + v) > 1.0
    u[flip] = 1.0 - u[flip]
    v[flip] = 1.0 - v[flip]
    w = 1.0 - u - v
    f = mesh.faces[tri]
    pts = (
        w * mesh.vertices[f[:, 0]]
        + u * mesh.vertices[f[:, 1]]
        + v * mesh.vertices[f[:, 2]]
    )
    return PointCloud(points=pts)


def normalize_unit_ball(cloud: PointCloud) -> PointCloud:
    """Center on the centroid and scale so the farthest point sits at norm 1."""
    pts = cloud.points
    if pts.shape[0] == 0:
        raise ValueError("cannot normalize an empty cloud")
    centered = pts - pts.mean(axis=0)
    r = np.linalg.norm(centered, axis=1).max()
    if r > 0.0:
        centered = centered / r
    labels = None if cloud.labels is None else cloud.labels.copy()
    return PointCloud(points=centered, labels=labels)


def load_obj(path) -> TriangleMesh:
    """Wavefront OBJ subset: v/f lines, 1-based indices; polygons fan-triangulated."""
    verts: list = []
    faces: list = []
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                if len(parts) < 4:
                    raise ValueError(f"malformed vertex line: {line.rstrip()}")
                verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
            elif parts[0] == "f":
                idx = []
                for tok in parts[1:]:
                    raw = tok.split("/")[0]
                    i = int(raw)
                    # negative indices are relative to the current vertex count
                    idx.append(i - 1 if i > 0 else len(verts) + i)
                if len(idx) < 3:
                    raise ValueError(f"face with fewer than 3 vertices: {line.rstrip()}")
                for a in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[a], idx[a + 1]])
    if not verts or not faces:
        raise ValueError(f"no usable geometry in {path}")
    return TriangleMesh(vertices=np.array(verts), faces=np.array(faces))

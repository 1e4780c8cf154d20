"""Repository management: mesh ingestion, the binary point-cloud file format,
and procedural toy shapes for desk-scale experiments.

SPPC file layout (all little-endian):
    "SPPC" | u32 version=1 | u32 n | u32 dims | n*dims float32
optionally followed by a label chunk:
    "LBLS" | u32 n | n * u16
"""
from __future__ import annotations

import hashlib
import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence

import numpy as np

from .geometry import PointCloud, TriangleMesh, load_obj, normalize_unit_ball, sample_mesh

log = logging.getLogger(__name__)

SPPC_MAGIC = b"SPPC"
LABEL_MAGIC = b"LBLS"
SPPC_VERSION = 1


class CloudFormatError(Exception):
    """File is not a readable SPPC cloud (bad magic, version, or truncation)."""


def _quantize_f32(cloud: PointCloud) -> PointCloud:
    # repositories are stored as float32; quantizing up front keeps every
    # in-memory cloud bit-identical to its on-disk form
    return PointCloud(
        points=cloud.points.astype(np.float32).astype(np.float64),
        labels=cloud.labels,
    )


@dataclass
class RepositoryEntry:
    id: str
    cloud: PointCloud
    label: str = ""
    source: str = ""
    seed: int = 0


@dataclass
class ShapeRepository:
    category: str
    entries: List[RepositoryEntry] = field(default_factory=list)

    def __post_init__(self):
        if self.entries:
            n = self.entries[0].cloud.n
            for e in self.entries:
                if e.cloud.n != n:
                    raise ValueError(
                        f"entry {e.id!r} has {e.cloud.n} points, expected {n}"
                    )
                r = np.linalg.norm(e.cloud.points, axis=1).max()
                if abs(r - 1.0) > 1e-5:
                    raise ValueError(
                        f"entry {e.id!r} is not unit-ball normalized (max norm {r})"
                    )

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def n_points(self) -> int:
        return self.entries[0].cloud.n if self.entries else 0

    def clouds(self) -> List[PointCloud]:
        return [e.cloud for e in self.entries]

    def ids(self) -> List[str]:
        return [e.id for e in self.entries]


def cloud_to_bytes(cloud: PointCloud) -> bytes:
    pts = np.ascontiguousarray(cloud.points, dtype="<f4")
    parts = [SPPC_MAGIC, struct.pack("<III", SPPC_VERSION, cloud.n, 3), pts.tobytes()]
    if cloud.labels is not None:
        parts.append(LABEL_MAGIC)
        parts.append(struct.pack("<I", cloud.n))
        parts.append(np.ascontiguousarray(cloud.labels, dtype="<u2").tobytes())
    return b"".join(parts)


def save_cloud(cloud: PointCloud, path) -> None:
    with open(path, "wb") as fh:
        fh.write(cloud_to_bytes(cloud))


def load_cloud(path) -> PointCloud:
    with open(path, "rb") as fh:
        data = fh.read()
    pos = 0

    def take(n: int, what: str) -> bytes:
        nonlocal pos
        if pos + n > len(data):
            raise CloudFormatError(f"truncated file while reading {what}: {path}")
        chunk = data[pos:pos + n]
        pos += n
        return chunk

    if take(4, "magic") != SPPC_MAGIC:
        raise CloudFormatError(f"bad magic, not an SPPC file: {path}")
    version, n, dims = struct.unpack("<III", take(12, "header"))
    if version != SPPC_VERSION:
        raise CloudFormatError(f"unsupported SPPC version {version}: {path}")
    if dims != 3:
        raise CloudFormatError(f"expected 3 dims, got {dims}: {path}")
    pts = np.frombuffer(take(4 * n * dims, "points"), dtype="<f4")
    pts = pts.reshape(n, dims).astype(np.float64)
    labels = None
    if pos < len(data):
        if take(4, "label magic") != LABEL_MAGIC:
            raise CloudFormatError(f"unrecognized trailing chunk: {path}")
        (ln,) = struct.unpack("<I", take(4, "label count"))
        if ln != n:
            raise CloudFormatError(f"label count {ln} != point count {n}: {path}")
        labels = np.frombuffer(take(2 * ln, "labels"), dtype="<u2").copy()
    return PointCloud(points=pts, labels=labels)


def _entry_seed(master_seed: int, entry_id: str) -> int:
    # hash the id so adding a mesh never perturbs the other samples
    h = hashlib.sha256(f"{master_seed}:{entry_id}".encode()).digest()
    return int.from_bytes(h[:8], "little")


def ingest(mesh_dir, n: int, seed: int = 0, category: str = "") -> ShapeRepository:
    """Sample every mesh under mesh_dir to n points, normalized to the unit
    ball. Unreadable or degenerate meshes are skipped with a warning."""
    root = Path(mesh_dir)
    paths = sorted(root.rglob("*.obj"))
    if not paths:
        raise ValueError(f"no .obj meshes under {root}")
    entries = []
    for p in paths:
        entry_id = p.relative_to(root).with_suffix("").as_posix()
        try:
            mesh = load_obj(p)
            eseed = _entry_seed(seed, entry_id)
            cloud = _quantize_f32(normalize_unit_ball(
                sample_mesh(mesh, n, np.random.default_rng(eseed))
            ))
        except (ValueError, OSError) as exc:
            log.warning("skipping %s: %s", p, exc)
            continue
        entries.append(RepositoryEntry(
            id=entry_id, cloud=cloud, label=category or root.name,
            source=str(p), seed=_entry_seed(seed, entry_id),
        ))
    if not entries:
        raise ValueError(f"no usable meshes under {root}")
    return ShapeRepository(category=category or root.name, entries=entries)


def save_repository(repo: ShapeRepository, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"category": repo.category, "n_points": repo.n_points, "entries": []}
    for e in repo.entries:
        fname = e.id.replace("/", "__") + ".sppc"
        save_cloud(e.cloud, out / fname)
        digest = hashlib.sha256((out / fname).read_bytes()).hexdigest()
        manifest["entries"].append({
            "id": e.id, "file": fname, "label": e.label,
            "source": e.source, "seed": e.seed, "sha256": digest,
        })
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=1, sort_keys=True), encoding="utf-8"
    )
    return out / "manifest.json"


def load_repository(path) -> ShapeRepository:
    root = Path(path)
    manifest_path = root / "manifest.json" if root.is_dir() else root
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    base = manifest_path.parent
    entries = []
    for rec in manifest["entries"]:
        cloud = load_cloud(base / rec["file"])
        entries.append(RepositoryEntry(
            id=rec["id"], cloud=cloud, label=rec.get("label", ""),
            source=rec.get("source", ""), seed=rec.get("seed", 0),
        ))
    return ShapeRepository(category=manifest.get("category", ""), entries=entries)


def load_cloud_dir(path) -> List[PointCloud]:
    """All SPPC files in a directory, sorted by filename."""
    files = sorted(Path(path).glob("*.sppc"))
    if not files:
        raise ValueError(f"no .sppc files under {path}")
    return [load_cloud(f) for f in files]


# ---------------------------------------------------------------------------
# procedural toy shapes: two visually distinct families whose parameters vary
# enough that nearest-neighbor Chamfer within the repository is meaningful


def _uv_sphere_mesh(radii, rings: int = 12, segs: int = 18) -> TriangleMesh:
    rx, ry, rz = radii
    verts = [(0.0, 0.0, rz), (0.0, 0.0, -rz)]
    for i in range(1, rings):
        theta = np.pi * i / rings
        for j in range(segs):
            phi = 2.0 * np.pi * j / segs
            verts.append((
                rx * np.sin(theta) * np.cos(phi),
                ry * np.sin(theta) * np.sin(phi),
                rz * np.cos(theta),
            ))
    faces = []
    ring = lambda i, j: 2 + (i - 1) * segs + (j % segs)
    for j in range(segs):
        faces.append([0, ring(1, j), ring(1, j + 1)])
        faces.append([1, ring(rings - 1, j + 1), ring(rings - 1, j)])
    for i in range(1, rings - 1):
        for j in range(segs):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j), ring(i + 1, j + 1)
            faces.append([a, b, d])
            faces.append([a, d, c])
    return TriangleMesh(vertices=np.array(verts), faces=np.array(faces))


def _box_tris(cx, cy, cz, hx, hy, hz, base: int):
    v = []
    for sx in (-1, 1):
        for sy in (-1, 1):
            for sz in (-1, 1):
                v.append((cx + sx * hx, cy + sy * hy, cz + sz * hz))
    quads = [
        (0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1),
        (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3),
    ]
    f = []
    for a, b, c, d in quads:
        f.append([base + a, base + b, base + c])
        f.append([base + a, base + c, base + d])
    return v, f


def _table_mesh(top_hw, top_hd, top_t, leg_h, leg_w) -> TriangleMesh:
    verts: list = []
    faces: list = []
    parts = [(0.0, 0.0, leg_h + top_t / 2, top_hw, top_hd, top_t / 2)]
    for sx in (-1, 1):
        for sy in (-1, 1):
            parts.append((
                sx * (top_hw - leg_w), sy * (top_hd - leg_w), leg_h / 2,
                leg_w, leg_w, leg_h / 2,
            ))
    for cx, cy, cz, hx, hy, hz in parts:
        v, f = _box_tris(cx, cy, cz, hx, hy, hz, len(verts))
        verts.extend(v)
        faces.extend(f)
    return TriangleMesh(vertices=np.array(verts), faces=np.array(faces))


def toy_mesh(family: str, rng: np.random.Generator) -> TriangleMesh:
    if family == "ellipsoid":
        radii = rng.uniform([0.5, 0.35, 0.25], [1.0, 0.8, 0.6])
        return _uv_sphere_mesh(radii)
    if family == "table":
        top_hw = rng.uniform(0.55, 0.9)
        top_hd = rng.uniform(0.45, 0.8)
        leg_h = rng.uniform(0.45, 0.8)
        leg_w = rng.uniform(0.12, 0.2)
        return _table_mesh(top_hw, top_hd, 0.16, leg_h, leg_w)
    raise ValueError(f"unknown toy family {family!r}")


def make_toy_repository(families: Sequence[str] = ("ellipsoid", "table"),
                        count: int = 8, n: int = 512,
                        seed: int = 0) -> ShapeRepository:
    """Deterministic procedural repository: `count` shapes drawn round-robin
    from the families, each sampled to n points and unit-ball normalized."""
    if count < 1:
        raise ValueError("count must be >= 1")
    entries = []
    for i in range(count):
        family = families[i % len(families)]
        entry_id = f"{family}_{i:03d}"
        rng = np.random.default_rng(_entry_seed(seed, entry_id))
        mesh = toy_mesh(family, rng)
        cloud = _quantize_f32(normalize_unit_ball(sample_mesh(mesh, n, rng)))
        entries.append(RepositoryEntry(
            id=entry_id, cloud=cloud, label=family, source="procedural",
            seed=_entry_seed(seed, entry_id),
        ))
    return ShapeRepository(category="toy", entries=entries)

"""Checkpoint container: one zip archive, bit-exact round trips.

Archive members:
  manifest.json   UTF-8 JSON: format tag, version, iteration, full training
                  config (incl. sphere seed/n, prior kind, every architecture
                  width), and the tensor name lists.
  tensors.bin     concatenated records, little-endian:
                    u32 name_len | name (UTF-8) | u32 ndim | ndim * u32 dims |
                    float32 values (C order)
                  Generator tensors are prefixed "g/", discriminator "d/".
"""
from __future__ import annotations

import hashlib
import io
import json
import struct
import zipfile
from typing import Dict, Optional

import numpy as np
import torch

from .geometry import PointCloud
from .nets import DiscriminatorNet, DiscriminatorScores, GeneratorNet
from .sphere import PriorLatentMatrix, sample_prior
from .training import TrainingConfig

FORMAT_TAG = "spheregen-checkpoint"
FORMAT_VERSION = 1


class CheckpointFormatError(Exception):
    """Archive is not a readable checkpoint (bad magic, version, or layout)."""


class CheckpointMismatchError(Exception):
    """Input prior does not match the prior the checkpoint was trained with."""


class Checkpoint:
    def __init__(self, config: TrainingConfig,
                 generator_state: Dict[str, np.ndarray],
                 discriminator_state: Dict[str, np.ndarray],
                 iteration: int = 0):
        self.config = config
        self.generator_state = generator_state
        self.discriminator_state = discriminator_state
        self.iteration = iteration
        self._gen: Optional[GeneratorNet] = None
        self._disc: Optional[DiscriminatorNet] = None

    @classmethod
    def from_nets(cls, config: TrainingConfig, gen: GeneratorNet,
                  disc: DiscriminatorNet, iteration: int) -> "Checkpoint":
        return cls(
            config,
            {k: v.detach().cpu().numpy().astype(np.float32, copy=True)
             for k, v in gen.state_dict().items()},
            {k: v.detach().cpu().numpy().astype(np.float32, copy=True)
             for k, v in disc.state_dict().items()},
            iteration,
        )

    def build_generator(self) -> GeneratorNet:
        if self._gen is None:
            gen = GeneratorNet(self.config.generator_config())
            gen.load_state_dict(
                {k: torch.from_numpy(v) for k, v in self.generator_state.items()}
            )
            gen.eval()
            self._gen = gen
        return self._gen

    def build_discriminator(self) -> DiscriminatorNet:
        if self._disc is None:
            disc = DiscriminatorNet(self.config.discriminator_config())
            disc.load_state_dict(
                {k: torch.from_numpy(v) for k, v in self.discriminator_state.items()}
            )
            disc.eval()
            self._disc = disc
        return self._disc

    def sphere(self):
        return sample_prior(self.config.prior_kind, self.config.n_points,
                            self.config.sphere_seed)

    def param_hash(self) -> str:
        h = hashlib.sha256()
        for name in sorted(self.generator_state):
            h.update(name.encode())
            h.update(self.generator_state[name].tobytes())
        for name in sorted(self.discriminator_state):
            h.update(name.encode())
            h.update(self.discriminator_state[name].tobytes())
        return h.hexdigest()


def _write_tensors(buf: io.BytesIO, prefix: str, state: Dict[str, np.ndarray]):
    for name in sorted(state):
        arr = np.ascontiguousarray(state[name], dtype=np.float32)
        full = (prefix + name).encode("utf-8")
        buf.write(struct.pack("<I", len(full)))
        buf.write(full)
        buf.write(struct.pack("<I", arr.ndim))
        buf.write(struct.pack(f"<{arr.ndim}I", *arr.shape) if arr.ndim else b"")
        if "<" != arr.dtype.byteorder and arr.dtype.byteorder != "=":
            arr = arr.astype("<f4")
        buf.write(arr.tobytes())


def _read_tensors(data: bytes) -> Dict[str, np.ndarray]:
    out: Dict[str, np.ndarray] = {}
    pos = 0
    total = len(data)

    def take(n: int) -> bytes:
        nonlocal pos
        if pos + n > total:
            raise CheckpointFormatError("tensors.bin truncated")
        chunk = data[pos:pos + n]
        pos += n
        return chunk

    while pos < total:
        (name_len,) = struct.unpack("<I", take(4))
        name = take(name_len).decode("utf-8")
        (ndim,) = struct.unpack("<I", take(4))
        shape = struct.unpack(f"<{ndim}I", take(4 * ndim)) if ndim else ()
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(take(4 * count), dtype="<f4").reshape(shape)
        out[name] = arr.copy()
    return out


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    manifest = {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "iteration": ckpt.iteration,
        "config": ckpt.config.to_dict(),
        "sphere": {
            "kind": ckpt.config.prior_kind,
            "n": ckpt.config.n_points,
            "seed": ckpt.config.sphere_seed,
        },
        "tensors": {
            "generator": sorted(ckpt.generator_state),
            "discriminator": sorted(ckpt.discriminator_state),
        },
    }
    buf = io.BytesIO()
    _write_tensors(buf, "g/", ckpt.generator_state)
    _write_tensors(buf, "d/", ckpt.discriminator_state)
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("manifest.json", json.dumps(manifest, indent=1, sort_keys=True))
        zf.writestr("tensors.bin", buf.getvalue())


def load_checkpoint(path) -> Checkpoint:
    try:
        with zipfile.ZipFile(path, "r") as zf:
            names = set(zf.namelist())
            if "manifest.json" not in names or "tensors.bin" not in names:
                raise CheckpointFormatError("archive missing manifest.json/tensors.bin")
            try:
                manifest = json.loads(zf.read("manifest.json").decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise CheckpointFormatError(f"corrupt manifest: {exc}") from exc
            raw = zf.read("tensors.bin")
    except zipfile.BadZipFile as exc:
        raise CheckpointFormatError(f"not a checkpoint archive: {exc}") from exc

    if manifest.get("format") != FORMAT_TAG:
        raise CheckpointFormatError("unrecognized checkpoint format tag")
    if manifest.get("version") != FORMAT_VERSION:
        raise CheckpointFormatError(
            f"unsupported checkpoint version {manifest.get('version')!r}"
        )
    config = TrainingConfig.from_dict(manifest["config"])
    tensors = _read_tensors(raw)
    gen_state = {n[2:]: t for n, t in tensors.items() if n.startswith("g/")}
    disc_state = {n[2:]: t for n, t in tensors.items() if n.startswith("d/")}
    expect_g = set(manifest["tensors"]["generator"])
    expect_d = set(manifest["tensors"]["discriminator"])
    if set(gen_state) != expect_g or set(disc_state) != expect_d:
        raise CheckpointFormatError("tensor names do not match manifest")
    return Checkpoint(config, gen_state, disc_state, manifest.get("iteration", 0))


def generate(ckpt: Checkpoint, m: PriorLatentMatrix) -> PointCloud:
    """Run the generator on a prior latent matrix; deterministic in (ckpt, m).

    The matrix must be packed on the checkpoint's own training prior:
    correspondence is index-based, so a different prior silently breaks it.
    """
    cfg = ckpt.config
    if m.sphere.n != cfg.n_points or m.sphere.seed != cfg.sphere_seed:
        raise CheckpointMismatchError(
            f"prior (n={m.sphere.n}, seed={m.sphere.seed}) does not match "
            f"checkpoint (n={cfg.n_points}, seed={cfg.sphere_seed})"
        )
    if m.d != cfg.latent_dim:
        raise CheckpointMismatchError(
            f"latent dim {m.d} does not match checkpoint {cfg.latent_dim}"
        )
    gen = ckpt.build_generator()
    with torch.no_grad():
        sph = torch.as_tensor(m.sphere.coords, dtype=torch.float32).unsqueeze(0)
        codes = torch.as_tensor(m.codes, dtype=torch.float32).unsqueeze(0)
        pts = gen(sph, codes)[0].numpy()
    return PointCloud(points=pts.astype(np.float64))


def discriminate(ckpt: Checkpoint, cloud: PointCloud):
    """Score one cloud with the stored discriminator; returns (shape, points)."""
    disc = ckpt.build_discriminator()
    with torch.no_grad():
        t = torch.as_tensor(cloud.points, dtype=torch.float32).unsqueeze(0)
        scores: DiscriminatorScores = disc(t)
    return float(scores.shape_score[0]), scores.point_scores[0].numpy()

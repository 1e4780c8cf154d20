"""Correspondence-based editing of prior latent matrices.

A part is a set of prior-point indices (SelectionMask). Because every
generated shape shares the same prior, one mask addresses "the same part"
in every shape; all the operations below act on latent rows by index and
never renormalize untouched rows.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import PointCloud
from .sphere import LatentCode, SpherePoints


@dataclass(frozen=True)
class SelectionMask:
    """Sorted, duplicate-free prior-point indices naming one part."""

    indices: np.ndarray
    n_total: int

    def __post_init__(self):
        idx = np.unique(np.asarray(self.indices, dtype=np.int64))
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_total):
            raise ValueError(
                f"mask index out of range for n={self.n_total}: "
                f"[{idx.min()}, {idx.max()}]"
            )
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return int(self.indices.size)

    def complement(self) -> np.ndarray:
        keep = np.ones(self.n_total, dtype=bool)
        keep[self.indices] = False
        return np.nonzero(keep)[0]


def edit_part(codes: np.ndarray, mask: SelectionMask,
              new_code: LatentCode,
              per_point: Optional[np.ndarray] = None) -> np.ndarray:
    """Replace the masked rows with new_code; everything else is untouched.

    per_point, if given, must be (len(mask), d) and overrides the shared
    new_code with one fresh code per selected point.
    """
    codes = np.asarray(codes, dtype=np.float64)
    _check_mask(codes, mask)
    out = codes.copy()
    if per_point is not None:
        per_point = np.asarray(per_point, dtype=np.float64)
        if per_point.shape != (len(mask), codes.shape[1]):
            raise ValueError(
                f"per_point must be ({len(mask)}, {codes.shape[1]}), "
                f"got {per_point.shape}"
            )
        out[mask.indices] = per_point
    else:
        if new_code.d != codes.shape[1]:
            raise ValueError(
                f"new code dim {new_code.d} != codes dim {codes.shape[1]}"
            )
        out[mask.indices] = new_code.values
    return out


def interp_shape(z_a: LatentCode, z_b: LatentCode, alpha: float) -> LatentCode:
    """Convex combination (1 - alpha) * z_a + alpha * z_b."""
    if z_a.d != z_b.d:
        raise ValueError(f"latent dims differ: {z_a.d} vs {z_b.d}")
    _check_alpha(alpha)
    return LatentCode(values=(1.0 - alpha) * z_a.values + alpha * z_b.values)


def interp_part(codes_a: np.ndarray, codes_b: np.ndarray,
                mask: SelectionMask, alpha: float) -> np.ndarray:
    """Blend only the masked rows toward codes_b; unmasked rows stay codes_a."""
    codes_a = np.asarray(codes_a, dtype=np.float64)
    codes_b = np.asarray(codes_b, dtype=np.float64)
    if codes_a.shape != codes_b.shape:
        raise ValueError(f"code shapes differ: {codes_a.shape} vs {codes_b.shape}")
    _check_mask(codes_a, mask)
    _check_alpha(alpha)
    out = codes_a.copy()
    sel = mask.indices
    out[sel] = (1.0 - alpha) * codes_a[sel] + alpha * codes_b[sel]
    return out


def compose_parts(sources: Sequence[Tuple[np.ndarray, SelectionMask]]) -> np.ndarray:
    """Assemble one code matrix from several shapes' masked rows.

    Masks must be pairwise disjoint; indices no mask covers default to the
    first source's rows.
    """
    if not sources:
        raise ValueError("compose_parts needs at least one source")
    first = np.asarray(sources[0][0], dtype=np.float64)
    seen = np.full(first.shape[0], -1, dtype=np.int64)
    for si, (codes, mask) in enumerate(sources):
        codes = np.asarray(codes, dtype=np.float64)
        if codes.shape != first.shape:
            raise ValueError("all source code matrices must share one shape")
        _check_mask(codes, mask)
        dup = seen[mask.indices] >= 0
        if dup.any():
            bad = int(mask.indices[dup][0])
            raise ValueError(f"masks overlap at index {bad}")
        seen[mask.indices] = si
    out = first.copy()
    for si, (codes, mask) in enumerate(sources):
        if si == 0:
            continue
        out[mask.indices] = np.asarray(codes, dtype=np.float64)[mask.indices]
    return out


def transfer_labels(labeled: PointCloud, targets: Sequence[PointCloud]) -> List[PointCloud]:
    """Propagate per-point labels through the index correspondence.

    All clouds must come from the same checkpoint, so point i of every cloud
    answers to prior point i; the label simply rides along the index.
    """
    if labeled.labels is None:
        raise ValueError("source cloud carries no labels")
    out = []
    for t in targets:
        if t.n != labeled.n:
            raise ValueError(
                f"target has {t.n} points, labeled source has {labeled.n}"
            )
        out.append(PointCloud(points=t.points.copy(), labels=labeled.labels.copy()))
    return out


def correspondence_colors(sphere: SpherePoints) -> np.ndarray:
    """Deterministic RGB per prior index: unit coords remapped by x/2 + 0.5.

    The same index gets the same color in every generated shape, which is
    exactly what makes the correspondence visible.
    """
    return sphere.coords * 0.5 + 0.5


def _check_mask(codes: np.ndarray, mask: SelectionMask) -> None:
    if mask.n_total != codes.shape[0]:
        raise ValueError(
            f"mask is for n={mask.n_total}, codes have {codes.shape[0]} rows"
        )


def _check_alpha(alpha: float) -> None:
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")

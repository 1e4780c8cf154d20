"""Generation-quality metrics: fidelity (MMD), diversity (COV), feature-space
distribution distance (FPD), plus nearest-shape retrieval.

Conventions are fixed and tagged in every report: Chamfer is symmetric
mean-of-squared (see geometry.chamfer), MMD is reported both raw and
scaled by 1e3, and FPD values are comparable only across reports carrying
the same extractor hash.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import torch
import torch.nn as nn
import torch.nn.functional as F

from .geometry import PointCloud, chamfer, pairwise_chamfer

CHAMFER_CONVENTION = "chamfer=sym-mean-squared"
FPD_RIDGE = 1e-6


def mmd(gen: Sequence[PointCloud], ref: Sequence[PointCloud]) -> float:
    """Mean over reference shapes of the Chamfer distance to the closest
    generated shape (lower = generated set hugs the repository better)."""
    _check_sets(gen, ref)
    d = pairwise_chamfer(ref, gen)  # (|ref|, |gen|)
    return float(d.min(axis=1).mean())


def cov(gen: Sequence[PointCloud], ref: Sequence[PointCloud]) -> float:
    """Fraction of reference shapes that are the Chamfer-nearest reference of
    at least one generated shape (a ref matched twice still counts once)."""
    _check_sets(gen, ref)
    d = pairwise_chamfer(gen, ref)  # (|gen|, |ref|)
    matched = np.unique(d.argmin(axis=1))
    return float(matched.size / len(ref))


def frechet_from_features(feat_a: np.ndarray, feat_b: np.ndarray,
                          ridge: float = FPD_RIDGE) -> float:
    """2-Wasserstein distance between Gaussian fits of two feature sets:
    ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)).

    A ridge keeps the covariances well-conditioned for small sets; tiny
    negative results from sqrtm round-off are clamped to 0.
    """
    fa = np.atleast_2d(np.asarray(feat_a, dtype=np.float64))
    fb = np.atleast_2d(np.asarray(feat_b, dtype=np.float64))
    if fa.shape[0] < 2 or fb.shape[0] < 2:
        raise ValueError("each feature set needs at least 2 samples")
    mu1, mu2 = fa.mean(axis=0), fb.mean(axis=0)
    s1 = np.atleast_2d(np.cov(fa, rowvar=False)) + ridge * np.eye(fa.shape[1])
    s2 = np.atleast_2d(np.cov(fb, rowvar=False)) + ridge * np.eye(fb.shape[1])
    covmean = scipy.linalg.sqrtm(s1 @ s2)
    if np.iscomplexobj(covmean):
        covmean = covmean.real
    dist = float(np.sum((mu1 - mu2) ** 2) + np.trace(s1 + s2 - 2.0 * covmean))
    return max(dist, 0.0)


class FeatureExtractor(nn.Module):
    """Small frozen point-cloud encoder used for FPD.

    Per-point MLP + channel-wise max pool + linear projection. It is fitted
    once with a classification proxy on the local repository, then frozen;
    identity_hash() stamps reports so FPD values are only compared within
    one extractor.
    """

    def __init__(self, feature_dim: int = 32, n_classes: int = 2):
        super().__init__()
        self.feature_dim = feature_dim
        self.fc1 = nn.Linear(3, 64)
        self.fc2 = nn.Linear(64, 128)
        self.proj = nn.Linear(128, feature_dim)
        self.classifier = nn.Linear(feature_dim, n_classes)

    def forward(self, clouds: torch.Tensor) -> torch.Tensor:
        h = F.relu(self.fc1(clouds))
        h = F.relu(self.fc2(h))
        pooled = h.max(dim=1).values
        return self.proj(pooled)

    def features(self, clouds: Sequence[PointCloud]) -> np.ndarray:
        self.eval()
        with torch.no_grad():
            batch = torch.as_tensor(
                np.stack([c.points for c in clouds]), dtype=torch.float32
            )
            return self(batch).numpy().astype(np.float64)

    def identity_hash(self) -> str:
        h = hashlib.sha256()
        for name, t in sorted(self.state_dict().items()):
            h.update(name.encode())
            h.update(t.numpy().astype(np.float32).tobytes())
        return h.hexdigest()[:16]


def train_feature_extractor(repository, seed: int = 0, steps: int = 300,
                            feature_dim: int = 32) -> FeatureExtractor:
    """Fit the FPD encoder with a classification proxy on the repository.

    Labels come from entry labels (shape families); a single-class
    repository falls back to instance discrimination so the proxy always
    has something to separate.
    """
    labels = [e.label for e in repository.entries]
    classes = sorted(set(labels))
    if len(classes) < 2:
        classes = [e.id for e in repository.entries]
        labels = list(classes)
    class_idx = {c: i for i, c in enumerate(classes)}
    y = torch.as_tensor([class_idx[l] for l in labels], dtype=torch.long)
    x = torch.as_tensor(
        np.stack([e.cloud.points for e in repository.entries]), dtype=torch.float32
    )
    torch.manual_seed(seed)
    fx = FeatureExtractor(feature_dim=feature_dim, n_classes=len(classes))
    opt = torch.optim.Adam(fx.parameters(), lr=1e-3)
    fx.train()
    for _ in range(steps):
        opt.zero_grad(set_to_none=True)
        logits = fx.classifier(fx(x))
        loss = F.cross_entropy(logits, y)
        loss.backward()
        opt.step()
    fx.eval()
    for p in fx.parameters():
        p.requires_grad_(False)
    return fx


def fpd(gen: Sequence[PointCloud], ref: Sequence[PointCloud],
        fx: FeatureExtractor) -> float:
    """Fréchet distance between Gaussian fits of encoder features."""
    if len(gen) < 2 or len(ref) < 2:
        raise ValueError("fpd needs at least 2 clouds per set")
    return frechet_from_features(fx.features(gen), fx.features(ref))


def retrieve_nearest(query: PointCloud, repo: Sequence[Tuple[str, PointCloud]],
                     k: int = 5) -> List[Tuple[str, float]]:
    """The k repository shapes closest to the query by Chamfer distance,
    ascending; ties break on id."""
    items = list(repo)
    if k < 1 or k > len(items):
        raise ValueError(f"k must satisfy 1 <= k <= |repo| (k={k}, |repo|={len(items)})")
    scored = [(sid, chamfer(query, cloud)) for sid, cloud in items]
    scored.sort(key=lambda t: (t[1], t[0]))
    return scored[:k]


@dataclass
class MetricsReport:
    n_gen: int
    n_ref: int
    mmd_raw: Optional[float] = None
    cov: Optional[float] = None
    fpd: Optional[float] = None
    extractor_hash: Optional[str] = None
    convention: str = CHAMFER_CONVENTION

    @property
    def mmd_scaled(self) -> Optional[float]:
        # display parity with the usual tables (MMD unit 1e-3)
        return None if self.mmd_raw is None else self.mmd_raw * 1e3

    def to_dict(self) -> dict:
        return {
            "n_gen": self.n_gen,
            "n_ref": self.n_ref,
            "convention": self.convention,
            "mmd_raw": self.mmd_raw,
            "mmd_x1e3": self.mmd_scaled,
            "cov": self.cov,
            "fpd": self.fpd,
            "extractor_hash": self.extractor_hash,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def to_row(self) -> str:
        """One machine-readable TSV row: n_gen, n_ref, mmd_x1e3, cov, fpd, hash."""
        def fmt(v):
            return "" if v is None else f"{v:.6g}" if isinstance(v, float) else str(v)

        cells = [self.n_gen, self.n_ref, self.mmd_scaled, self.cov, self.fpd,
                 self.extractor_hash or ""]
        return "\t".join(fmt(c) for c in cells)


def evaluate_sets(gen: Sequence[PointCloud], ref: Sequence[PointCloud],
                  metrics: Sequence[str] = ("mmd", "cov", "fpd"),
                  fx: Optional[FeatureExtractor] = None) -> MetricsReport:
    unknown = set(metrics) - {"mmd", "cov", "fpd"}
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}")
    report = MetricsReport(n_gen=len(gen), n_ref=len(ref))
    if "mmd" in metrics:
        report.mmd_raw = mmd(gen, ref)
    if "cov" in metrics:
        report.cov = cov(gen, ref)
    if "fpd" in metrics:
        if fx is None:
            raise ValueError("fpd requested but no feature extractor supplied")
        report.fpd = fpd(gen, ref, fx)
        report.extractor_hash = fx.identity_hash()
    return report


def _check_sets(gen, ref) -> None:
    if len(gen) == 0 or len(ref) == 0:
        raise ValueError("metric sets must be non-empty")

"""Dual-head discriminator: one realism score per shape plus one per point.

PointNet-style backbone; no output squashing, the least-squares objectives
operate on raw confidences.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from .generator import LEAKY_SLOPE


@dataclass
class DiscriminatorConfig:
    n_points: int = 2048
    backbone_widths: Tuple[int, ...] = (64, 128, 256)
    shape_head_widths: Tuple[int, ...] = (128, 64)
    point_head_widths: Tuple[int, ...] = (256, 64)


@dataclass
class DiscriminatorScores:
    shape_score: torch.Tensor  # (B,)
    point_scores: torch.Tensor  # (B, N)


def _mlp(widths: Tuple[int, ...]) -> nn.ModuleList:
    return nn.ModuleList(
        nn.Linear(widths[i], widths[i + 1]) for i in range(len(widths) - 1)
    )


def _run(layers: nn.ModuleList, x: torch.Tensor) -> torch.Tensor:
    for layer in layers:
        x = F.leaky_relu(layer(x), LEAKY_SLOPE)
    return x


class DiscriminatorNet(nn.Module):
    def __init__(self, cfg: DiscriminatorConfig):
        super().__init__()
        self.cfg = cfg
        self.backbone = _mlp((3,) + tuple(cfg.backbone_widths))
        feat = cfg.backbone_widths[-1]
        self.shape_head = _mlp((feat,) + tuple(cfg.shape_head_widths))
        self.shape_out = nn.Linear(cfg.shape_head_widths[-1], 1)
        # the point head judges each point in shape context: its own feature
        # concatenated with the duplicated global vector
        self.point_head = _mlp((2 * feat,) + tuple(cfg.point_head_widths))
        self.point_out = nn.Linear(cfg.point_head_widths[-1], 1)

    def forward(self, cloud: torch.Tensor) -> DiscriminatorScores:
        """cloud (B, N, 3) -> per-shape scores (B,) and per-point scores (B, N)."""
        if cloud.shape[1] != self.cfg.n_points:
            raise ValueError(
                f"expected {self.cfg.n_points} points, got {cloud.shape[1]}"
            )
        per_point = _run(self.backbone, cloud)  # (B, N, feat)
        global_vec = per_point.max(dim=1).values  # (B, feat)
        shape_score = self.shape_out(_run(self.shape_head, global_vec)).squeeze(-1)
        tiled = global_vec.unsqueeze(1).expand_as(per_point)
        point_in = torch.cat([per_point, tiled], dim=-1)
        point_scores = self.point_out(_run(self.point_head, point_in)).squeeze(-1)
        return DiscriminatorScores(shape_score=shape_score, point_scores=point_scores)

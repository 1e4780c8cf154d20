"""Generator: graph attention feature extraction, per-point style injection
via adaptive instance normalization, and coordinate regression.

All modules are permutation-equivariant over the point axis; the only
cross-point interactions are kNN gathers and the global max pool.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

LEAKY_SLOPE = 0.2
ADAIN_EPS = 1e-8


@dataclass
class GeneratorConfig:
    n_points: int = 2048
    latent_dim: int = 128
    k: int = 20
    embed_width: int = 128
    gam1_width: int = 64
    gam2_width: int = 128
    lift_width: int = 512
    head_widths: Tuple[int, ...] = (512, 256, 64)
    use_attention: bool = True
    use_adain: bool = True


def knn_idx(f: torch.Tensor, k: int) -> torch.Tensor:
    """Indices (B, N, k) of the k nearest rows per row, self excluded.

    Selection is a constant w.r.t. autograd: gradients flow through the
    gathered features, not the graph.
    """
    n = f.shape[1]
    if k >= n:
        raise ValueError(f"k must be < n (k={k}, n={n})")
    with torch.no_grad():
        x2 = (f * f).sum(-1)
        d = x2.unsqueeze(2) + x2.unsqueeze(1) - 2.0 * torch.bmm(f, f.transpose(1, 2))
        ar = torch.arange(n, device=f.device)
        d[:, ar, ar] = float("inf")
        nbr = torch.topk(d, k, dim=2, largest=False, sorted=True).indices
    return nbr


def gather_neighbors(f: torch.Tensor, nbr: torch.Tensor) -> torch.Tensor:
    """Gather rows of f (B, N, C) by nbr (B, N, K) into (B, N, K, C)."""
    b, n, c = f.shape
    k = nbr.shape[2]
    flat = f.reshape(b * n, c)
    base = (torch.arange(b, device=f.device) * n).view(b, 1, 1)
    return flat[(nbr + base).reshape(-1)].view(b, n, k, c)


def adain(f: torch.Tensor, scale: torch.Tensor, bias: torch.Tensor,
          eps: float = ADAIN_EPS) -> torch.Tensor:
    """Per-point adaptive instance normalization.

    Each point's feature vector is standardized over its channels (mean and
    population std of that single vector), then modulated by the per-point
    learned scale and bias. eps keeps constant vectors (std 0) finite.
    """
    mu = f.mean(dim=-1, keepdim=True)
    var = ((f - mu) ** 2).mean(dim=-1, keepdim=True)
    normalized = (f - mu) / (torch.sqrt(var) + eps)
    return scale * normalized + bias


class GraphAttention(nn.Module):
    """Neighborhood convolution with regressed per-edge, per-channel weights.

    Edge features (f_i, f_j - f_i) go through a shared two-layer perceptron;
    a parallel branch regresses logits that are softmax-normalized over the
    K neighbors, the weighted features are then mixed by a learned 1xK
    aggregation over the neighbor axis. With use_attention=False this
    degrades to plain edge convolution (max over neighbors).
    """

    def __init__(self, c_in: int, c_out: int, k: int, use_attention: bool = True):
        super().__init__()
        self.c_in = c_in
        self.c_out = c_out
        self.k = k
        self.use_attention = use_attention
        self.edge1 = nn.Linear(2 * c_in, c_out)
        self.edge2 = nn.Linear(c_out, c_out)
        if use_attention:
            self.attn1 = nn.Linear(2 * c_in, c_out)
            self.attn2 = nn.Linear(c_out, c_out)
            self.agg_weight = nn.Parameter(torch.empty(c_out, c_out, k))
            self.agg_bias = nn.Parameter(torch.zeros(c_out))
            bound = 1.0 / math.sqrt(c_out * k)
            nn.init.uniform_(self.agg_weight, -bound, bound)

    def _edge_features(self, f: torch.Tensor) -> torch.Tensor:
        nbr = knn_idx(f, self.k)
        fj = gather_neighbors(f, nbr)
        fi = f.unsqueeze(2).expand_as(fj)
        return torch.cat([fi, fj - fi], dim=-1)

    def forward(self, f: torch.Tensor, return_weights: bool = False):
        edge = self._edge_features(f)
        h = self.edge2(F.leaky_relu(self.edge1(edge), LEAKY_SLOPE))
        if self.use_attention:
            logits = self.attn2(F.leaky_relu(self.attn1(edge), LEAKY_SLOPE))
            w = torch.softmax(logits, dim=2)  # normalize over the K neighbors
            weighted = h * w
            out = torch.einsum("bnkc,ock->bno", weighted, self.agg_weight)
            out = out + self.agg_bias
        else:
            w = None
            out = h.max(dim=2).values
        out = F.leaky_relu(out, LEAKY_SLOPE)
        if return_weights:
            return out, w
        return out


class FeatureEmbed(nn.Module):
    """Shared per-point MLP lifting (prior coord, latent code) rows."""

    def __init__(self, in_dim: int, width: int = 128):
        super().__init__()
        self.fc1 = nn.Linear(in_dim, width)
        self.fc2 = nn.Linear(width, width)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = F.leaky_relu(self.fc1(x), LEAKY_SLOPE)
        return F.leaky_relu(self.fc2(h), LEAKY_SLOPE)


class StyleEmbed(nn.Module):
    """Specialize embedded features into a per-point (scale, bias) pair.

    The scale half starts at 1 (identity modulation) so the normalization
    passes features through untouched at init and the latent code perturbs
    around identity instead of crushing the activations.
    """

    def __init__(self, in_dim: int, target_width: int):
        super().__init__()
        self.target_width = target_width
        self.fc1 = nn.Linear(in_dim, in_dim)
        self.fc2 = nn.Linear(in_dim, 2 * target_width)
        with torch.no_grad():
            self.fc2.bias[:target_width] += 1.0

    def forward(self, fe: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        h = self.fc2(F.leaky_relu(self.fc1(fe), LEAKY_SLOPE))
        return h[..., : self.target_width], h[..., self.target_width:]


class CoordRegressor(nn.Module):
    """PointNet-style head: lift, max-pool to a global vector, concatenate it
    back onto every per-point feature, regress coordinates through tanh."""

    def __init__(self, c_in: int, lift_width: int = 512,
                 head_widths: Tuple[int, ...] = (512, 256, 64)):
        super().__init__()
        self.lift = nn.Linear(c_in, lift_width)
        widths = (c_in + lift_width,) + tuple(head_widths)
        self.head = nn.ModuleList(
            nn.Linear(widths[i], widths[i + 1]) for i in range(len(widths) - 1)
        )
        self.out = nn.Linear(widths[-1], 3)

    def forward(self, fa: torch.Tensor) -> torch.Tensor:
        lifted = F.leaky_relu(self.lift(fa), LEAKY_SLOPE)
        global_vec = lifted.max(dim=1).values  # (B, lift_width)
        tiled = global_vec.unsqueeze(1).expand(-1, fa.shape[1], -1)
        h = torch.cat([fa, tiled], dim=-1)
        for layer in self.head:
            h = F.leaky_relu(layer(h), LEAKY_SLOPE)
        return torch.tanh(self.out(h))


class GeneratorNet(nn.Module):
    """Full pipeline: graph attention -> AdaIN -> graph attention -> AdaIN ->
    coordinate regression. With use_adain=False the latent matrix enters only
    through the feature embedding, which then feeds the trunk directly."""

    def __init__(self, cfg: GeneratorConfig):
        super().__init__()
        self.cfg = cfg
        in_embed = 3 + cfg.latent_dim
        self.embed = FeatureEmbed(in_embed, cfg.embed_width)
        gam1_in = 3 if cfg.use_adain else cfg.embed_width
        self.gam1 = GraphAttention(gam1_in, cfg.gam1_width, cfg.k, cfg.use_attention)
        self.gam2 = GraphAttention(cfg.gam1_width, cfg.gam2_width, cfg.k,
                                   cfg.use_attention)
        if cfg.use_adain:
            self.style1 = StyleEmbed(cfg.embed_width, cfg.gam1_width)
            self.style2 = StyleEmbed(cfg.embed_width, cfg.gam2_width)
        self.regress = CoordRegressor(cfg.gam2_width, cfg.lift_width,
                                      cfg.head_widths)
        self._init_weights()

    def _init_weights(self):
        # He init matched to the LeakyReLU slope: the default torch init
        # shrinks activations (and the latent signal) by an order of
        # magnitude over this depth
        for m in self.modules():
            if isinstance(m, nn.Linear):
                nn.init.kaiming_normal_(m.weight, a=LEAKY_SLOPE)
        # keep the pre-tanh activations in the linear regime at init
        with torch.no_grad():
            self.regress.out.weight.mul_(0.1)
        if self.cfg.use_adain:
            for style in (self.style1, self.style2):
                with torch.no_grad():
                    style.fc2.bias.zero_()
                    style.fc2.bias[:style.target_width] = 1.0

    def forward(self, sphere: torch.Tensor, codes: torch.Tensor) -> torch.Tensor:
        """sphere (B, N, 3), codes (B, N, d) -> coordinates (B, N, 3) in [-1,1]."""
        fe = self.embed(torch.cat([sphere, codes], dim=-1))
        if self.cfg.use_adain:
            fg1 = self.gam1(sphere)
            ys1, yb1 = self.style1(fe)
            fa1 = adain(fg1, ys1, yb1)
            fg2 = self.gam2(fa1)
            ys2, yb2 = self.style2(fe)
            fa2 = adain(fg2, ys2, yb2)
        else:
            fa2 = self.gam2(self.gam1(fe))
        return self.regress(fa2)

"""Least-squares adversarial objectives and the alternating training loop.

Discriminator loss:  L_D = L_shape + lambda * L_point with
    L_shape = 1/2 [(D(P) - 0)^2 + (D(Phat) - 1)^2]
    L_point = 1/(2N) sum_i [(D(p_i) - 0)^2 + (D(phat_i) - 1)^2]
Generator loss:      L_G = 1/2 [D(P) - 1]^2 + beta * 1/(2N) sum_i [D(p_i) - 1]^2
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields
from typing import Callable, Optional, Tuple

import numpy as np
import torch

from .nets import (
    DiscriminatorConfig,
    DiscriminatorNet,
    DiscriminatorScores,
    GeneratorConfig,
    GeneratorNet,
)
from .sphere import sample_prior

log = logging.getLogger(__name__)


@dataclass
class TrainingConfig:
    n_points: int = 2048
    latent_dim: int = 128
    k: int = 20
    lambda_point: float = 1.0
    beta_point: float = 1.0
    learning_rate: float = 1e-4
    epochs: int = 300
    batch_size: int = 32
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    sphere_seed: int = 0
    prior_kind: str = "sphere"
    use_attention: bool = True
    use_adain: bool = True
    use_point_score: bool = True
    seed: int = 0
    checkpoint_every: int = 0  # iterations between snapshots; 0 = final only
    # architecture widths (recorded in every checkpoint manifest)
    embed_width: int = 128
    gam1_width: int = 64
    gam2_width: int = 128
    lift_width: int = 512
    head_widths: Tuple[int, ...] = (512, 256, 64)
    disc_backbone_widths: Tuple[int, ...] = (64, 128, 256)
    disc_shape_head_widths: Tuple[int, ...] = (128, 64)
    disc_point_head_widths: Tuple[int, ...] = (256, 64)

    def __post_init__(self):
        if self.lambda_point < 0 or self.beta_point < 0:
            raise ValueError("lambda/beta must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.prior_kind not in ("sphere", "cube"):
            raise ValueError(f"prior_kind must be sphere or cube, got {self.prior_kind!r}")

    def generator_config(self) -> GeneratorConfig:
        return GeneratorConfig(
            n_points=self.n_points,
            latent_dim=self.latent_dim,
            k=self.k,
            embed_width=self.embed_width,
            gam1_width=self.gam1_width,
            gam2_width=self.gam2_width,
            lift_width=self.lift_width,
            head_widths=tuple(self.head_widths),
            use_attention=self.use_attention,
            use_adain=self.use_adain,
        )

    def discriminator_config(self) -> DiscriminatorConfig:
        return DiscriminatorConfig(
            n_points=self.n_points,
            backbone_widths=tuple(self.disc_backbone_widths),
            shape_head_widths=tuple(self.disc_shape_head_widths),
            point_head_widths=tuple(self.disc_point_head_widths),
        )

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "TrainingConfig":
        kwargs = {}
        for f in fields(cls):
            if f.name in d:
                v = d[f.name]
                kwargs[f.name] = tuple(v) if isinstance(v, list) else v
        return cls(**kwargs)


def loss_discriminator(fake: DiscriminatorScores, real: DiscriminatorScores,
                       lam: float) -> torch.Tensor:
    """Shape loss plus lambda-weighted per-point loss (batch mean)."""
    if fake.point_scores.shape != real.point_scores.shape:
        raise ValueError("fake/real point score shapes differ")
    shape = 0.5 * (fake.shape_score ** 2 + (real.shape_score - 1.0) ** 2)
    point = 0.5 * (fake.point_scores ** 2 + (real.point_scores - 1.0) ** 2).mean(dim=-1)
    return (shape + lam * point).mean()


def loss_generator(fake: DiscriminatorScores, beta: float) -> torch.Tensor:
    """Least-squares loss pushing fake scores toward 1 (batch mean)."""
    shape = 0.5 * (fake.shape_score - 1.0) ** 2
    point = 0.5 * ((fake.point_scores - 1.0) ** 2).mean(dim=-1)
    return (shape + beta * point).mean()


@dataclass
class TrainEvent:
    iteration: int
    epoch: int
    d_loss: float
    g_loss: float


IterationCallback = Callable[[TrainEvent], None]


def train(
    config: TrainingConfig,
    repository,
    rng: Optional[np.random.Generator] = None,
    on_iteration: Optional[IterationCallback] = None,
    on_checkpoint: Optional[Callable[[int, "Checkpoint"], None]] = None,
    max_iterations: Optional[int] = None,
):
    """Alternating optimization: one discriminator step, one generator step.

    The prior stays fixed for the whole run; a fresh latent batch is drawn
    every iteration. Real batches come from shuffled passes over the
    repository. Returns the final Checkpoint.
    """
    from .checkpoint import Checkpoint  # local import to avoid a cycle

    clouds = [e.cloud for e in repository.entries]
    if not clouds:
        raise ValueError("repository is empty")
    for e in repository.entries:
        if e.cloud.n != config.n_points:
            raise ValueError(
                f"repository cloud {e.id!r} has {e.cloud.n} points, "
                f"config expects {config.n_points}"
            )
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    torch.manual_seed(config.seed)

    device = _device()
    prior = sample_prior(config.prior_kind, config.n_points, config.sphere_seed)
    sphere_t = torch.as_tensor(prior.coords, dtype=torch.float32, device=device)

    gen = GeneratorNet(config.generator_config()).to(device)
    disc = DiscriminatorNet(config.discriminator_config()).to(device)
    opt_g = torch.optim.Adam(gen.parameters(), lr=config.learning_rate,
                             betas=(config.adam_beta1, config.adam_beta2))
    opt_d = torch.optim.Adam(disc.parameters(), lr=config.learning_rate,
                             betas=(config.adam_beta1, config.adam_beta2))

    real_all = torch.as_tensor(
        np.stack([c.points for c in clouds]), dtype=torch.float32, device=device
    )
    batch = min(config.batch_size, len(clouds))
    lam = config.lambda_point if config.use_point_score else 0.0
    beta = config.beta_point if config.use_point_score else 0.0

    iteration = 0
    done = False
    for epoch in range(config.epochs):
        order = rng.permutation(len(clouds))
        for start in range(0, len(clouds), batch):
            idx = order[start:start + batch]
            if len(idx) < batch:  # drop ragged tail to keep batch shapes fixed
                if len(clouds) >= batch:
                    break
            real = real_all[idx]
            b = real.shape[0]

            z = rng.standard_normal((b, config.latent_dim)).astype(np.float32)
            codes = torch.as_tensor(z, device=device).unsqueeze(1).expand(
                -1, config.n_points, -1
            )
            sph = sphere_t.unsqueeze(0).expand(b, -1, -1)
            fake = gen(sph, codes)

            opt_d.zero_grad(set_to_none=True)
            d_loss = loss_discriminator(disc(fake.detach()), disc(real), lam)
            d_loss.backward()
            opt_d.step()

            opt_g.zero_grad(set_to_none=True)
            g_loss = loss_generator(disc(fake), beta)
            g_loss.backward()
            opt_g.step()

            iteration += 1
            if on_iteration is not None:
                on_iteration(TrainEvent(iteration, epoch,
                                        d_loss.detach().item(),
                                        g_loss.detach().item()))
            if (config.checkpoint_every and on_checkpoint is not None
                    and iteration % config.checkpoint_every == 0):
                on_checkpoint(iteration, Checkpoint.from_nets(config, gen, disc, iteration))
            if max_iterations is not None and iteration >= max_iterations:
                done = True
                break
        if done:
            break

    return Checkpoint.from_nets(config, gen, disc, iteration)


def _device() -> torch.device:
    import os

    return torch.device(os.environ.get("SPHEREGEN_DEVICE", "cpu"))

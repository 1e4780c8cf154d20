"""Third sweep: discriminator/generator capacity and point-loss weights,
with diversity diagnostics (generated-set spread, per-ref nearest distance)."""
import time

import numpy as np

from spheregen.checkpoint import generate
from spheregen.dataset import make_toy_repository
from spheregen.evaluation import cov, mmd
from spheregen.geometry import pairwise_chamfer
from spheregen.sphere import pack_uniform, sample_code
from spheregen.training import TrainingConfig, train

repo = make_toy_repository(count=8, n=512, seed=0)
pts = [e.cloud.points for e in repo.entries]
dmat = pairwise_chamfer(pts, pts)
np.fill_diagonal(dmat, np.inf)
internal = dmat.min(axis=1).mean()
print(f"threshold 1.5x internal = {1.5 * internal:.5f}", flush=True)

BASE = dict(
    n_points=512, latent_dim=32, k=10, batch_size=8, epochs=10_000,
    embed_width=64, gam1_width=32, gam2_width=64, lift_width=128,
    head_widths=(128, 64), disc_backbone_widths=(32, 64, 128),
    disc_shape_head_widths=(64,), disc_point_head_widths=(64,), seed=0,
)

SETTINGS = [
    ("fullD_lr1e-4", dict(disc_backbone_widths=(64, 128, 256),
                          disc_shape_head_widths=(128, 64),
                          disc_point_head_widths=(256, 64))),
    ("fullD_lr2e-4_b0.5", dict(disc_backbone_widths=(64, 128, 256),
                               disc_shape_head_widths=(128, 64),
                               disc_point_head_widths=(256, 64),
                               learning_rate=2e-4, adam_beta1=0.5)),
    ("fullD_bigG_lr1e-4", dict(disc_backbone_widths=(64, 128, 256),
                               disc_shape_head_widths=(128, 64),
                               disc_point_head_widths=(256, 64),
                               gam2_width=128, lift_width=256,
                               head_widths=(256, 128, 64))),
    ("smallD_lambda2", dict(lambda_point=2.0, beta_point=2.0)),
]

for name, overrides in SETTINGS:
    cfg = TrainingConfig(**{**BASE, **overrides})
    losses = []
    t0 = time.time()
    ckpt = train(cfg, repo, max_iterations=1000,
                 on_iteration=lambda ev: losses.append((ev.d_loss, ev.g_loss)))
    arr = np.array(losses)
    rng = np.random.default_rng(123)
    sphere = ckpt.sphere()
    gen_clouds = [generate(ckpt, pack_uniform(sphere, sample_code(32, rng)))
                  for _ in range(32)]
    m = mmd(gen_clouds, repo.clouds())
    c = cov(gen_clouds, repo.clouds())
    gp = [g.points for g in gen_clouds]
    gg = pairwise_chamfer(gp[:16], gp[:16])
    spread = gg[np.triu_indices(16, 1)].mean()
    ref_near = pairwise_chamfer([e.cloud.points for e in repo.entries], gp).min(axis=1)
    tail = arr[-100:]
    print(f"{name}: {time.time()-t0:.0f}s | d {tail[:,0].mean():.3f} "
          f"g {tail[:,1].mean():.3f} | MMD {m:.4f} COV {c:.2f} | "
          f"gen spread {spread:.4f} | per-ref near "
          f"{np.array2string(ref_near, precision=3)}", flush=True)

"""Short sweep over toy-scale training balance settings."""
import itertools
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

SETTINGS = [
    # (name, lr, disc_widths, batch, iters)
    ("lr1e-4", 1e-4, (32, 64, 128), 8, 700),
    ("lr2e-4_smallD", 2e-4, (16, 32, 64), 8, 700),
    ("lr3e-4_smallD_b4", 3e-4, (16, 32, 64), 4, 700),
]

for name, lr, dw, batch, iters in SETTINGS:
    cfg = TrainingConfig(
        n_points=512, latent_dim=32, k=10, batch_size=batch, epochs=10_000,
        learning_rate=lr,
        embed_width=64, gam1_width=32, gam2_width=64, lift_width=128,
        head_widths=(128, 64), disc_backbone_widths=dw,
        disc_shape_head_widths=(64,), disc_point_head_widths=(64,),
        seed=0,
    )
    losses = []
    t0 = time.time()
    ckpt = train(cfg, repo, max_iterations=iters,
                 on_iteration=lambda ev: losses.append((ev.d_loss, ev.g_loss)))
    arr = np.array(losses)
    rng = np.random.default_rng(123)
    sphere = ckpt.sphere()
    gen_clouds = [generate(ckpt, pack_uniform(sphere, sample_code(32, rng)))
                  for _ in range(16)]
    m = mmd(gen_clouds, repo.clouds())
    c = cov(gen_clouds, repo.clouds())
    tail = arr[-100:]
    print(f"{name}: {iters} it {time.time()-t0:.0f}s | "
          f"d_tail {tail[:,0].mean():.4f} g_tail {tail[:,1].mean():.4f} | "
          f"MMD {m:.5f} COV {c:.2f}", flush=True)

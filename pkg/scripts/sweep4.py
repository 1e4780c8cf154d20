"""Full-horizon (2000 iteration) runs on the best candidates with the
reshaped toy tables."""
import sys
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
print(f"internal {internal:.5f} threshold {1.5 * internal:.5f}", flush=True)

BASE = dict(
    n_points=512, latent_dim=32, k=10, batch_size=8, epochs=10_000,
    embed_width=64, gam1_width=32, gam2_width=64, lift_width=128,
    head_widths=(128, 64),
    disc_backbone_widths=(64, 128, 256), disc_shape_head_widths=(128, 64),
    disc_point_head_widths=(256, 64), seed=0,
)

SETTINGS = {
    "A_lr2e-4_b0.5": dict(learning_rate=2e-4, adam_beta1=0.5),
    "B_lr1e-4_b0.9": dict(learning_rate=1e-4, adam_beta1=0.9),
    "C_lr3e-4_b0.5_batch4": dict(learning_rate=3e-4, adam_beta1=0.5,
                                 batch_size=4),
}

chosen = sys.argv[1:] or list(SETTINGS)
for name in chosen:
    cfg = TrainingConfig(**{**BASE, **SETTINGS[name]})
    losses = []
    t0 = time.time()

    def on_iter(ev, losses=losses, t0=t0):
        losses.append((ev.d_loss, ev.g_loss))
        if ev.iteration % 500 == 0:
            print(f"  {ev.iteration}: d {ev.d_loss:.3f} g {ev.g_loss:.3f} "
                  f"({time.time() - t0:.0f}s)", flush=True)

    ckpt = train(cfg, repo, max_iterations=2000, on_iteration=on_iter)
    rng = np.random.default_rng(123)
    sphere = ckpt.sphere()
    gen_clouds = [generate(ckpt, pack_uniform(sphere, sample_code(32, rng)))
                  for _ in range(64)]
    m = mmd(gen_clouds, repo.clouds())
    c = cov(gen_clouds, repo.clouds())
    gp = [g.points for g in gen_clouds]
    gg = pairwise_chamfer(gp[:16], gp[:16])
    spread = gg[np.triu_indices(16, 1)].mean()
    ref_near = pairwise_chamfer(pts, gp).min(axis=1)
    arr = np.array(losses)
    tail = arr[-100:]
    print(f"{name}: {(time.time()-t0)/60:.1f} min | d {tail[:,0].mean():.3f} "
          f"g {tail[:,1].mean():.3f} | MMD {m:.4f} "
          f"({'OK' if m <= 1.5*internal else 'X'}) COV {c:.2f} "
          f"({'OK' if c >= 0.5 else 'X'}) | spread {spread:.4f} | "
          f"near {np.array2string(ref_near, precision=3)}", flush=True)

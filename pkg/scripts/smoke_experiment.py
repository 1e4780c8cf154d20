"""Dry run of the overfit smoke setup; prints the metrics the acceptance
criterion asserts. Used to tune the toy configuration before freezing it."""
import sys
import time

import numpy as np

from spheregen.checkpoint import generate
from spheregen.dataset import make_toy_repository
from spheregen.evaluation import cov, mmd
from spheregen.geometry import pairwise_chamfer
from spheregen.sphere import pack_uniform, sample_code
from spheregen.training import TrainingConfig, train


def toy_config(**overrides):
    base = dict(
        n_points=512, latent_dim=32, k=10, batch_size=8, epochs=250,
        learning_rate=1e-3,
        embed_width=64, gam1_width=32, gam2_width=64, lift_width=128,
        head_widths=(128, 64), disc_backbone_widths=(32, 64, 128),
        disc_shape_head_widths=(64,), disc_point_head_widths=(64,),
        seed=0,
    )
    base.update(overrides)
    return TrainingConfig(**base)


def main():
    iters = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    lr = float(sys.argv[2]) if len(sys.argv) > 2 else 1e-3
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 0
    repo = make_toy_repository(count=8, n=512, seed=0)
    pts = [e.cloud.points for e in repo.entries]
    dmat = pairwise_chamfer(pts, pts)
    np.fill_diagonal(dmat, np.inf)
    internal = dmat.min(axis=1).mean()
    print(f"internal mean NN chamfer: {internal:.5f} "
          f"(threshold {1.5 * internal:.5f})", flush=True)

    cfg = toy_config(epochs=(iters + 7) // 1, learning_rate=lr, seed=seed)
    losses = []
    t0 = time.time()

    def on_iter(ev):
        losses.append((ev.d_loss, ev.g_loss))
        if ev.iteration % 100 == 0:
            print(f"iter {ev.iteration} d {ev.d_loss:.4f} g {ev.g_loss:.4f} "
                  f"({time.time() - t0:.0f}s)", flush=True)

    ckpt = train(cfg, repo, on_iteration=on_iter, max_iterations=iters)
    train_time = time.time() - t0
    print(f"trained {len(losses)} iterations in {train_time / 60:.1f} min")
    arr = np.array(losses)
    print(f"losses finite: {np.isfinite(arr).all()}")

    sphere = ckpt.sphere()
    rng = np.random.default_rng(123)
    gen_clouds = [generate(ckpt, pack_uniform(sphere, sample_code(32, rng)))
                  for _ in range(64)]
    coords = np.stack([c.points for c in gen_clouds])
    print(f"coords in range: {coords.min():.4f} {coords.max():.4f}")
    m = mmd(gen_clouds, repo.clouds())
    c = cov(gen_clouds, repo.clouds())
    print(f"MMD {m:.5f} (<= {1.5 * internal:.5f}? {m <= 1.5 * internal}) "
          f"COV {c:.3f} (>= 0.5? {c >= 0.5})")


if __name__ == "__main__":
    main()

"""Batch entry points: ingest, train, generate, interpolate, evaluate,
retrieve, serve, toy-data.

Training flags are generated straight from the TrainingConfig dataclass so
the CLI and the config cannot drift apart. Device selection is via the
SPHEREGEN_DEVICE environment variable (default cpu).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import MISSING, fields
from pathlib import Path

import numpy as np

from . import __version__
from .training import TrainingConfig

# flags whose spelling differs from the field name
FLAG_NAMES = {
    "n_points": "n",
    "learning_rate": "lr",
    "prior_kind": "prior",
    "lambda_point": "lambda",
    "beta_point": "beta",
    "use_attention": "attention",
    "use_adain": "adain",
    "use_point_score": "point-score",
}

FIELD_HELP = {
    "n_points": "points per cloud",
    "latent_dim": "latent code dimension d",
    "k": "kNN neighborhood size",
    "lambda_point": "discriminator per-point loss weight",
    "beta_point": "generator per-point loss weight",
    "learning_rate": "Adam learning rate for both networks",
    "epochs": "shuffled passes over the repository",
    "batch_size": "clouds per alternating step",
    "sphere_seed": "seed of the fixed prior lattice",
    "prior_kind": "prior surface: sphere, or cube for the ablation",
    "use_attention": "graph attention (disable: plain edge convolution)",
    "use_adain": "style injection via AdaIN (disable: latent enters the trunk)",
    "use_point_score": "per-point discriminator scores in the losses",
    "seed": "training RNG seed (init, shuffling, latent draws)",
    "checkpoint_every": "iterations between checkpoint snapshots (0 = final only)",
}


def add_config_flags(parser: argparse.ArgumentParser) -> None:
    for f in fields(TrainingConfig):
        flag = FLAG_NAMES.get(f.name, f.name.replace("_", "-"))
        default = f.default if f.default is not MISSING else f.default_factory()
        help_text = FIELD_HELP.get(f.name, f.name.replace("_", " "))
        if isinstance(default, bool):
            if default:
                parser.add_argument(f"--no-{flag}", dest=f.name,
                                    action="store_false",
                                    help=f"disable {help_text}")
            else:
                parser.add_argument(f"--{flag}", dest=f.name, action="store_true",
                                    help=f"enable {help_text}")
        elif isinstance(default, tuple):
            parser.add_argument(
                f"--{flag}", dest=f.name, metavar="W,W,...",
                type=lambda s: tuple(int(x) for x in s.split(",")),
                default=default, help=f"{help_text} (default {','.join(map(str, default))})")
        elif f.name == "prior_kind":
            parser.add_argument(f"--{flag}", dest=f.name, choices=["sphere", "cube"],
                                default=default, help=f"{help_text} (default {default})")
        else:
            parser.add_argument(f"--{flag}", dest=f.name, type=type(default),
                                default=default,
                                help=f"{help_text} (default {default})")


def config_from_args(args: argparse.Namespace) -> TrainingConfig:
    return TrainingConfig(**{f.name: getattr(args, f.name)
                             for f in fields(TrainingConfig)})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spheregen",
                                description="sphere-guided point cloud generation")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("toy-data", help="write a procedural toy repository")
    sp.add_argument("--out", required=True)
    sp.add_argument("--count", type=int, default=8)
    sp.add_argument("--n", type=int, default=512)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--families", default="ellipsoid,table")

    sp = sub.add_parser("ingest", help="sample meshes into a repository")
    sp.add_argument("--meshes", required=True)
    sp.add_argument("--n", type=int, default=2048)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--category", default="")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("train", help="train on a repository")
    sp.add_argument("--data", required=True, help="repository directory")
    sp.add_argument("--out", required=True, help="checkpoint output path")
    sp.add_argument("--max-iterations", type=int, default=None,
                    help="stop after this many alternating steps")
    sp.add_argument("--log-every", type=int, default=50)
    add_config_flags(sp)

    sp = sub.add_parser("generate", help="sample shapes from a checkpoint")
    sp.add_argument("--ckpt", required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("interpolate", help="latent interpolation sequence")
    sp.add_argument("--ckpt", required=True)
    sp.add_argument("--seed-a", type=int, required=True)
    sp.add_argument("--seed-b", type=int, required=True)
    sp.add_argument("--steps", type=int, default=5)
    sp.add_argument("--mask", default=None,
                    help="JSON file with prior indices for part-wise blending")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("evaluate", help="metrics between generated and reference sets")
    sp.add_argument("--gen", required=True)
    sp.add_argument("--ref", required=True)
    sp.add_argument("--metrics", default="mmd,cov,fpd")
    sp.add_argument("--out", default="metrics.json")
    sp.add_argument("--extractor-seed", type=int, default=0)
    sp.add_argument("--extractor-steps", type=int, default=300)

    sp = sub.add_parser("retrieve", help="nearest repository shapes for a query")
    sp.add_argument("--query", required=True)
    sp.add_argument("--repo", required=True)
    sp.add_argument("--k", type=int, default=5)

    sp = sub.add_parser("serve", help="run the studio HTTP service")
    sp.add_argument("--ckpt", required=True, action="append",
                    help="checkpoint path (repeatable)")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8041)
    sp.add_argument("--frontend", default=None,
                    help="static studio directory to mount at /studio")
    return p


def cmd_toy_data(args) -> int:
    from .dataset import make_toy_repository, save_repository

    repo = make_toy_repository(
        families=tuple(args.families.split(",")), count=args.count,
        n=args.n, seed=args.seed)
    manifest = save_repository(repo, args.out)
    print(f"wrote {len(repo)} clouds to {args.out} ({manifest})")
    return 0


def cmd_ingest(args) -> int:
    from .dataset import ingest, save_repository

    repo = ingest(args.meshes, n=args.n, seed=args.seed, category=args.category)
    manifest = save_repository(repo, args.out)
    print(f"ingested {len(repo)} meshes into {args.out} ({manifest})")
    return 0


def cmd_train(args) -> int:
    from .checkpoint import save_checkpoint
    from .dataset import load_repository
    from .training import train

    config = config_from_args(args)
    repo = load_repository(args.data)
    out = Path(args.out)
    ckpt_path = out / "checkpoint.spgck" if (out.is_dir() or not out.suffix) else out
    ckpt_path.parent.mkdir(parents=True, exist_ok=True)
    log_path = ckpt_path.with_suffix(".log.tsv")
    print(json.dumps({"config": config.to_dict()}, sort_keys=True))

    with open(log_path, "w", encoding="utf-8") as lf:
        lf.write("iteration\tepoch\td_loss\tg_loss\n")

        def on_iter(ev):
            lf.write(f"{ev.iteration}\t{ev.epoch}\t{ev.d_loss:.6g}\t{ev.g_loss:.6g}\n")
            if ev.iteration % args.log_every == 0:
                print(f"iter {ev.iteration} d_loss {ev.d_loss:.4f} "
                      f"g_loss {ev.g_loss:.4f}")

        ckpt = train(config, repo, max_iterations=args.max_iterations,
                     on_iteration=on_iter)
    save_checkpoint(ckpt, ckpt_path)
    print(f"saved checkpoint to {ckpt_path} (iteration {ckpt.iteration})")
    return 0


def cmd_generate(args) -> int:
    from .checkpoint import generate, load_checkpoint
    from .dataset import save_cloud
    from .sphere import pack_uniform, sample_code

    ckpt = load_checkpoint(_resolve_ckpt(args.ckpt))
    sphere = ckpt.sphere()
    rng = np.random.default_rng(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        z = sample_code(ckpt.config.latent_dim, rng)
        cloud = generate(ckpt, pack_uniform(sphere, z))
        save_cloud(cloud, out / f"gen_{i:04d}.sppc")
    print(f"wrote {args.count} clouds to {out}")
    return 0


def cmd_interpolate(args) -> int:
    from .checkpoint import generate, load_checkpoint
    from .dataset import save_cloud
    from .manipulation import SelectionMask, interp_part
    from .sphere import pack_perpoint, pack_uniform, sample_code

    ckpt = load_checkpoint(_resolve_ckpt(args.ckpt))
    sphere = ckpt.sphere()
    d = ckpt.config.latent_dim
    za = sample_code(d, np.random.default_rng(args.seed_a))
    zb = sample_code(d, np.random.default_rng(args.seed_b))
    codes_a = pack_uniform(sphere, za).codes
    codes_b = pack_uniform(sphere, zb).codes
    if args.mask is not None:
        idx = json.loads(Path(args.mask).read_text())
        mask = SelectionMask(indices=np.asarray(idx, dtype=np.int64),
                             n_total=sphere.n)
    else:
        mask = SelectionMask(indices=np.arange(sphere.n), n_total=sphere.n)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    steps = max(args.steps, 2)
    for i in range(steps):
        alpha = i / (steps - 1)
        codes = interp_part(codes_a, codes_b, mask, alpha)
        cloud = generate(ckpt, pack_perpoint(sphere, codes))
        save_cloud(cloud, out / f"interp_{i:02d}.sppc")
    print(f"wrote {steps} interpolation frames to {out}")
    return 0


def _load_set(path):
    from .dataset import load_cloud_dir, load_repository

    p = Path(path)
    if (p / "manifest.json").exists():
        return load_repository(p)
    return load_cloud_dir(p)


def cmd_evaluate(args) -> int:
    from .dataset import ShapeRepository
    from .evaluation import evaluate_sets, train_feature_extractor

    metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    gen_set = _load_set(args.gen)
    ref_set = _load_set(args.ref)
    gen_clouds = gen_set.clouds() if isinstance(gen_set, ShapeRepository) else gen_set
    ref_clouds = ref_set.clouds() if isinstance(ref_set, ShapeRepository) else ref_set
    fx = None
    if "fpd" in metrics:
        fit_on = ref_set
        if not isinstance(ref_set, ShapeRepository):
            # plain SPPC directory: clouds may be unnormalized, so skip the
            # repository invariants and fit on instance labels directly
            from types import SimpleNamespace

            from .dataset import RepositoryEntry
            fit_on = SimpleNamespace(entries=[
                RepositoryEntry(id=f"ref_{i:04d}", cloud=c, label=f"ref_{i:04d}")
                for i, c in enumerate(ref_clouds)])
        fx = train_feature_extractor(fit_on, seed=args.extractor_seed,
                                     steps=args.extractor_steps)
    report = evaluate_sets(gen_clouds, ref_clouds, metrics=metrics, fx=fx)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json() + "\n", encoding="utf-8")
    out.with_suffix(".tsv").write_text(
        "n_gen\tn_ref\tmmd_x1e3\tcov\tfpd\textractor_hash\n"
        + report.to_row() + "\n", encoding="utf-8")
    print(report.to_json())
    return 0


def cmd_retrieve(args) -> int:
    from .dataset import load_cloud, load_repository
    from .evaluation import retrieve_nearest

    repo = load_repository(args.repo)
    query = load_cloud(args.query)
    hits = retrieve_nearest(query, [(e.id, e.cloud) for e in repo.entries],
                            k=args.k)
    for rank, (sid, dist) in enumerate(hits, 1):
        print(f"{rank}\t{sid}\t{dist:.6g}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .checkpoint import load_checkpoint
    from .service import create_app

    checkpoints = {}
    for path in args.ckpt:
        p = _resolve_ckpt(path)
        checkpoints[Path(p).stem] = load_checkpoint(p)
    app = create_app(checkpoints)
    if args.frontend:
        from fastapi.staticfiles import StaticFiles

        app.mount("/studio", StaticFiles(directory=args.frontend, html=True),
                  name="studio")
    print(f"serving checkpoints {sorted(checkpoints)} on "
          f"http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _resolve_ckpt(path) -> Path:
    p = Path(path)
    if p.is_dir():
        candidates = sorted(p.glob("*.spgck"))
        if not candidates:
            raise FileNotFoundError(f"no .spgck checkpoint under {p}")
        return candidates[0]
    return p


COMMANDS = {
    "toy-data": cmd_toy_data,
    "ingest": cmd_ingest,
    "train": cmd_train,
    "generate": cmd_generate,
    "interpolate": cmd_interpolate,
    "evaluate": cmd_evaluate,
    "retrieve": cmd_retrieve,
    "serve": cmd_serve,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - single CLI error surface
        line = json.dumps({"error": type(exc).__name__, "message": str(exc)})
        print(f"error {line}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

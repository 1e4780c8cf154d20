"""Independent reference implementations used as test oracles.

Everything here is deliberately written as straight-line loops or exhaustive
scans, sharing no code with the package paths it checks.
"""
import math

import numpy as np
import torch


def brute_knn(features: np.ndarray, k: int) -> np.ndarray:
    """Exhaustive kNN: sort every candidate by (distance, index)."""
    n = len(features)
    out = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        cands = []
        for j in range(n):
            if j == i:
                continue
            d = float(np.sum((features[i] - features[j]) ** 2))
            cands.append((d, j))
        cands.sort()
        out[i] = [j for _, j in cands[:k]]
    return out


def brute_chamfer(a: np.ndarray, b: np.ndarray) -> float:
    def one_sided(x, y):
        total = 0.0
        for p in x:
            best = math.inf
            for q in y:
                best = min(best, float(np.sum((p - q) ** 2)))
            total += best
        return total / len(x)

    return one_sided(a, b) + one_sided(b, a)


def brute_mmd(gen_sets, ref_sets) -> float:
    total = 0.0
    for r in ref_sets:
        best = math.inf
        for g in gen_sets:
            best = min(best, brute_chamfer(g, r))
        total += best
    return total / len(ref_sets)


def brute_cov(gen_sets, ref_sets) -> float:
    matched = set()
    for g in gen_sets:
        best, best_j = math.inf, -1
        for j, r in enumerate(ref_sets):
            d = brute_chamfer(g, r)
            if d < best:
                best, best_j = d, j
        matched.add(best_j)
    return len(matched) / len(ref_sets)


def min_great_circle(coords: np.ndarray) -> float:
    """Smallest pairwise great-circle distance on the unit sphere, O(n^2)."""
    best = math.inf
    n = len(coords)
    for i in range(n):
        for j in range(i + 1, n):
            c = float(np.clip(np.dot(coords[i], coords[j]), -1.0, 1.0))
            best = min(best, math.acos(c))
    return best


def nn_spacing_ratio(coords: np.ndarray) -> float:
    """max/min nearest-neighbor Euclidean spacing, brute force."""
    n = len(coords)
    nearest = np.full(n, math.inf)
    for i in range(n):
        for j in range(n):
            if i != j:
                nearest[i] = min(nearest[i], float(np.linalg.norm(coords[i] - coords[j])))
    return float(nearest.max() / nearest.min())


def _lrelu(x, slope=0.2):
    return np.where(x >= 0, x, slope * x)


def adain_loop(f: np.ndarray, ys: np.ndarray, yb: np.ndarray,
               eps: float = 1e-8) -> np.ndarray:
    """Scalar-loop per-point instance normalization with style scale/bias."""
    n, c = f.shape
    out = np.empty_like(f)
    for i in range(n):
        mu = sum(f[i, j] for j in range(c)) / c
        var = sum((f[i, j] - mu) ** 2 for j in range(c)) / c
        sigma = math.sqrt(var)
        for j in range(c):
            out[i, j] = ys[i, j] * (f[i, j] - mu) / (sigma + eps) + yb[i, j]
    return out


def _linear(w, b, x):
    return w @ x + b


def graph_attention_loop(module, f: np.ndarray) -> np.ndarray:
    """Explicit loops over points/neighbors/channels using module weights."""
    w_e1 = module.edge1.weight.detach().numpy()
    b_e1 = module.edge1.bias.detach().numpy()
    w_e2 = module.edge2.weight.detach().numpy()
    b_e2 = module.edge2.bias.detach().numpy()
    k, c_out = module.k, module.c_out
    n = len(f)
    nbr = brute_knn(f, k)

    h = np.empty((n, k, c_out))
    logits = np.empty((n, k, c_out))
    for i in range(n):
        for kk in range(k):
            j = nbr[i, kk]
            edge = np.concatenate([f[i], f[j] - f[i]])
            h[i, kk] = _linear(w_e2, b_e2, _lrelu(_linear(w_e1, b_e1, edge)))
            if module.use_attention:
                w_a1 = module.attn1.weight.detach().numpy()
                b_a1 = module.attn1.bias.detach().numpy()
                w_a2 = module.attn2.weight.detach().numpy()
                b_a2 = module.attn2.bias.detach().numpy()
                logits[i, kk] = _linear(w_a2, b_a2, _lrelu(_linear(w_a1, b_a1, edge)))

    out = np.empty((n, c_out))
    if module.use_attention:
        agg = module.agg_weight.detach().numpy()
        agg_b = module.agg_bias.detach().numpy()
        for i in range(n):
            for co in range(c_out):
                acc = agg_b[co]
                for ci in range(c_out):
                    ex = np.exp(logits[i, :, ci] - logits[i, :, ci].max())
                    w = ex / ex.sum()
                    for kk in range(k):
                        acc += agg[co, ci, kk] * h[i, kk, ci] * w[kk]
                out[i, co] = acc
    else:
        for i in range(n):
            for co in range(c_out):
                out[i, co] = max(h[i, kk, co] for kk in range(k))
    return _lrelu(out)


def style_embed_loop(module, fe: np.ndarray):
    w1 = module.fc1.weight.detach().numpy()
    b1 = module.fc1.bias.detach().numpy()
    w2 = module.fc2.weight.detach().numpy()
    b2 = module.fc2.bias.detach().numpy()
    c = module.target_width
    ys = np.empty((len(fe), c))
    yb = np.empty((len(fe), c))
    for i in range(len(fe)):
        h = _linear(w2, b2, _lrelu(_linear(w1, b1, fe[i])))
        ys[i] = h[:c]
        yb[i] = h[c:]
    return ys, yb


def regress_loop(module, fa: np.ndarray) -> np.ndarray:
    wl = module.lift.weight.detach().numpy()
    bl = module.lift.bias.detach().numpy()
    n = len(fa)
    lifted = np.stack([_lrelu(_linear(wl, bl, fa[i])) for i in range(n)])
    global_vec = lifted.max(axis=0)
    out = np.empty((n, 3))
    for i in range(n):
        h = np.concatenate([fa[i], global_vec])
        for layer in module.head:
            h = _lrelu(_linear(layer.weight.detach().numpy(),
                               layer.bias.detach().numpy(), h))
        out[i] = np.tanh(_linear(module.out.weight.detach().numpy(),
                                 module.out.bias.detach().numpy(), h))
    return out


def discriminator_loop(module, cloud: np.ndarray):
    def run(layers, x):
        for layer in layers:
            x = _lrelu(_linear(layer.weight.detach().numpy(),
                               layer.bias.detach().numpy(), x))
        return x

    n = len(cloud)
    per_point = np.stack([run(module.backbone, cloud[i]) for i in range(n)])
    g = per_point.max(axis=0)
    shape = _linear(module.shape_out.weight.detach().numpy(),
                    module.shape_out.bias.detach().numpy(),
                    run(module.shape_head, g))[0]
    points = np.empty(n)
    for i in range(n):
        h = run(module.point_head, np.concatenate([per_point[i], g]))
        points[i] = _linear(module.point_out.weight.detach().numpy(),
                            module.point_out.bias.detach().numpy(), h)[0]
    return shape, points


def max_rel_error_fd(tensors, loss_fn, h_scale: float = 1e-6) -> float:
    """Max relative error between autograd and central finite differences.

    tensors: leaf double-precision tensors with requires_grad=True; loss_fn
    re-evaluates the scalar loss from the current tensor values. The
    relative-error denominator is floored at 1e-6 so zero-gradient entries
    compare absolutely.
    """
    loss = loss_fn()
    analytic = torch.autograd.grad(loss, tensors, allow_unused=False)
    worst = 0.0
    with torch.no_grad():
        for t, g in zip(tensors, analytic):
            flat = t.view(-1)
            gflat = g.reshape(-1)
            for i in range(flat.numel()):
                orig = flat[i].item()
                h = h_scale * max(1.0, abs(orig))
                flat[i] = orig + h
                lp = loss_fn().item()
                flat[i] = orig - h
                lm = loss_fn().item()
                flat[i] = orig
                fd = (lp - lm) / (2.0 * h)
                a = gflat[i].item()
                rel = abs(a - fd) / max(abs(a), abs(fd), 1e-6)
                worst = max(worst, rel)
    return worst

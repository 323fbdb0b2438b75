"""Brute-force reference implementations.

Everything here is written as plain loops, independent of the package
internals, so the fast vectorized code has something honest to be checked
against. Keep inputs small; nothing in this module tries to be quick.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def splat_oracle(image, flow, eps=1e-4):
    """Forward-warp by average splatting, one source pixel at a time.

    Returns (warped, coverage) like the fast path: bilinear weights into
    the four integer neighbors of each target position, out-of-bounds
    corners dropped, normalization only where coverage >= eps, holes 0,
    output clipped to [0, 1].
    """
    img = np.asarray(image, dtype=np.float64)
    flat = img[..., None] if img.ndim == 2 else img
    h, w, c = flat.shape
    acc = np.zeros((h, w, c))
    cov = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            tx = x + flow[y, x, 0]
            ty = y + flow[y, x, 1]
            x0, y0 = math.floor(tx), math.floor(ty)
            fx, fy = tx - x0, ty - y0
            for (cy, cx, wgt) in (
                (y0, x0, (1 - fy) * (1 - fx)),
                (y0, x0 + 1, (1 - fy) * fx),
                (y0 + 1, x0, fy * (1 - fx)),
                (y0 + 1, x0 + 1, fy * fx),
            ):
                if 0 <= cy < h and 0 <= cx < w:
                    cov[cy, cx] += wgt
                    acc[cy, cx] += wgt * flat[y, x]
    out = np.zeros_like(acc)
    for y in range(h):
        for x in range(w):
            if cov[y, x] >= eps:
                out[y, x] = np.clip(acc[y, x] / cov[y, x], 0.0, 1.0)
    if img.ndim == 2:
        out = out[..., 0]
    return out, cov


def resize_oracle(arr, out_h, out_w):
    """Align-corners bilinear resize with clamped scalar gathers."""
    a = np.asarray(arr, dtype=np.float64)
    flat = a[..., None] if a.ndim == 2 else a
    h, w, c = flat.shape

    def coords(n_out, n_in):
        if n_out == 1:
            return [(n_in - 1) / 2.0]
        return [i * (n_in - 1) / (n_out - 1) for i in range(n_out)]

    ys, xs = coords(out_h, h), coords(out_w, w)
    out = np.zeros((out_h, out_w, c))
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            y0 = min(max(math.floor(y), 0), h - 1)
            x0 = min(max(math.floor(x), 0), w - 1)
            y1, x1 = min(y0 + 1, h - 1), min(x0 + 1, w - 1)
            fy, fx = y - y0, x - x0
            out[i, j] = ((1 - fy) * (1 - fx) * flat[y0, x0]
                         + (1 - fy) * fx * flat[y0, x1]
                         + fy * (1 - fx) * flat[y1, x0]
                         + fy * fx * flat[y1, x1])
    return out[..., 0] if a.ndim == 2 else out


def downsample_oracle(arr):
    a = np.asarray(arr, dtype=np.float64)
    h, w = a.shape[0] // 2, a.shape[1] // 2
    shape = (h, w) if a.ndim == 2 else (h, w, a.shape[2])
    out = np.zeros(shape)
    for y in range(h):
        for x in range(w):
            block = a[2 * y : 2 * y + 2, 2 * x : 2 * x + 2]
            out[y, x] = block.mean(axis=(0, 1)) if a.ndim == 3 else block.mean()
    return out


def weights_oracle(t):
    """Temporal fusion weights computed in exact rational arithmetic."""
    tq = Fraction(t)
    if 0 <= tq <= 1:
        return float(1 - tq), float(tq)
    d = 1 - 2 * tq
    return float((1 - tq) / d), float(-tq / d)


def fuse_oracle(i0t, i1t, m0, m1, w0, w1, residual=None):
    a = np.asarray(i0t, dtype=np.float64)
    b = np.asarray(i1t, dtype=np.float64)
    fa = a[..., None] if a.ndim == 2 else a
    fb = b[..., None] if b.ndim == 2 else b
    h, w, c = fa.shape
    out = np.zeros((h, w, c))
    for y in range(h):
        for x in range(w):
            den = w0 * m0[y, x] + w1 * m1[y, x]
            if den > 0:
                out[y, x] = (w0 * m0[y, x] * fa[y, x] + w1 * m1[y, x] * fb[y, x]) / den
    if residual is not None:
        out = out + np.asarray(residual, dtype=np.float64).reshape(out.shape)
    out = np.clip(out, 0.0, 1.0)
    return out[..., 0] if a.ndim == 2 else out


def charbonnier_oracle(a, b, eps=1e-6, alpha=0.5):
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    total = 0.0
    for v in d.ravel():
        total += (v * v + eps * eps) ** alpha
    return total / d.size


def _gray255(img):
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 3 and a.shape[2] == 3:
        a = 0.299 * a[..., 0] + 0.587 * a[..., 1] + 0.114 * a[..., 2]
    elif a.ndim == 3:
        a = a[..., 0]
    return a * 255.0


def census_oracle(a, b, patch=7, eps=0.81):
    ga, gb = _gray255(a), _gray255(b)
    h, w = ga.shape
    r = patch // 2
    total = 0.0
    count = 0
    for y in range(r, h - r):
        for x in range(r, w - r):
            acc = 0.0
            n = 0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    if dy == 0 and dx == 0:
                        continue
                    da = ga[y + dy, x + dx] - ga[y, x]
                    db = gb[y + dy, x + dx] - gb[y, x]
                    sa = da / math.sqrt(da * da + eps)
                    sb = db / math.sqrt(db * db + eps)
                    half = (sb - sa) / 2.0
                    acc += half * half
                    n += 1
            total += acc / n
            count += 1
    return total / count


def psnr_oracle(a, b, mask=None):
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    if mask is not None:
        d = d[np.asarray(mask, dtype=bool)]
    mse = float(np.mean(d * d))
    if mse == 0.0:
        return 99.0
    return min(10.0 * math.log10(1.0 / mse), 99.0)


def _gaussian_kernel(size=11, sigma=1.5):
    r = size // 2
    k = np.array([[math.exp(-(y * y + x * x) / (2 * sigma * sigma))
                   for x in range(-r, r + 1)] for y in range(-r, r + 1)])
    return k / k.sum()


def ssim_oracle(a, b, size=11, sigma=1.5, k1=0.01, k2=0.03):
    """Windowed SSIM by explicit per-window loops, valid positions only."""
    fa = np.asarray(a, dtype=np.float64)
    fb = np.asarray(b, dtype=np.float64)
    if fa.ndim == 2:
        fa, fb = fa[..., None], fb[..., None]
    kern = _gaussian_kernel(size, sigma)
    c1, c2 = k1 * k1, k2 * k2
    h, w, nc = fa.shape
    vals = []
    for c in range(nc):
        pa, pb = fa[..., c], fb[..., c]
        scores = []
        for y in range(h - size + 1):
            for x in range(w - size + 1):
                wa = pa[y : y + size, x : x + size]
                wb = pb[y : y + size, x : x + size]
                mu_a = (kern * wa).sum()
                mu_b = (kern * wb).sum()
                var_a = (kern * wa * wa).sum() - mu_a * mu_a
                var_b = (kern * wb * wb).sum() - mu_b * mu_b
                cov = (kern * wa * wb).sum() - mu_a * mu_b
                num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
                den = (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
                scores.append(num / den)
        vals.append(np.mean(scores))
    return float(np.mean(vals))


def gather_oracle(plane, ys, xs):
    """Bilinear gather with edge clamping, one coordinate at a time."""
    p = np.asarray(plane, dtype=np.float64)
    h, w = p.shape[:2]
    out = np.zeros(np.shape(ys) + (() if p.ndim == 2 else (p.shape[2],)))
    it = np.nditer(np.zeros(np.shape(ys)), flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        y = min(max(float(np.asarray(ys)[idx]), 0.0), h - 1.0)
        x = min(max(float(np.asarray(xs)[idx]), 0.0), w - 1.0)
        y0, x0 = math.floor(y), math.floor(x)
        y1, x1 = min(y0 + 1, h - 1), min(x0 + 1, w - 1)
        fy, fx = y - y0, x - x0
        out[idx] = ((1 - fy) * (1 - fx) * p[y0, x0] + (1 - fy) * fx * p[y0, x1]
                    + fy * (1 - fx) * p[y1, x0] + fy * fx * p[y1, x1])
    return out

"""Time-weighted fusion of two forward-warped frames.

The fused frame is a per-pixel weighted average of the two warped inputs,
where each input's contribution is gated by its coverage and scaled by a
time-dependent factor, plus an optional residual correction:

    out = (w0 * m0 * i0t + w1 * m1 * i1t) / (w0 * m0 + w1 * m1) + residual

Pixels neither input reached are unfillable; they are diffused in from
surrounding valid pixels as a final step at full resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFusionError, DegenerateInputError, InvalidInputError
from .images import like_input, validate_image, with_channels
from .tasking import TaskKind
from .warp import COVERAGE_EPSILON

DENOM_EPSILON = 1e-8
FILL_TOLERANCE = 1e-4
FILL_MAX_ITERS = 500


@dataclass(frozen=True)
class TemporalWeights:
    """Fusion factors for the frame-0 and frame-1 contributions."""

    w0: float
    w1: float


def temporal_weights(t: float) -> TemporalWeights:
    """Time-dependent fusion factors, valid for any real t.

    Between the inputs the factors are the familiar linear ones, favoring
    the nearer frame. Outside [0, 1] that choice would leave the range
    [0, 1] or lose normalization, so a rescaled form is used instead:

        0 <= t <= 1:  (1 - t, t)
        otherwise:    ((1 - t) / (1 - 2t), -t / (1 - 2t))

    Both branches agree exactly at t = 0 and t = 1, always sum to 1, and
    are non-negative everywhere.
    """
    if not math.isfinite(t):
        raise InvalidInputError(f"time step {t!r} is not finite")
    if 0.0 <= t <= 1.0:
        return TemporalWeights(1.0 - t, t)
    d = 1.0 - 2.0 * t
    return TemporalWeights((1.0 - t) / d, -t / d)


@dataclass
class FusionMaps:
    """Coverage gates for fusion.

    m0/m1 are (H, W) planes holding 1.0 where the corresponding warped
    frame covers the pixel and 0.0 where it left a hole; `unfillable`
    marks pixels both frames missed.
    """

    m0: np.ndarray
    m1: np.ndarray
    unfillable: np.ndarray


def coverage_fusion_maps(
    c0: np.ndarray,
    c1: np.ndarray,
    task: TaskKind,
    coverage_epsilon: float = COVERAGE_EPSILON,
) -> FusionMaps:
    """Turn raw splat coverage into hard fusion gates.

    A pixel is gated fully in (weight 1) when its accumulated splat weight
    clears `coverage_epsilon` and fully out (weight 0) otherwise; both
    tasks currently share this policy, with `task` kept in the signature
    as the selection hook and for diagnostics.
    """
    if not isinstance(task, TaskKind):
        raise InvalidInputError(f"expected TaskKind, got {task!r}")
    c0 = np.asarray(c0, dtype=np.float64)
    c1 = np.asarray(c1, dtype=np.float64)
    if c0.ndim != 2 or c0.shape != c1.shape:
        raise InvalidInputError(
            f"coverage planes must be matching 2D arrays, got {c0.shape} vs {c1.shape}"
        )
    m0 = np.where(c0 >= coverage_epsilon, 1.0, 0.0)
    m1 = np.where(c1 >= coverage_epsilon, 1.0, 0.0)
    unfillable = (m0 == 0.0) & (m1 == 0.0)
    return FusionMaps(m0=m0, m1=m1, unfillable=unfillable)


def fuse(
    i0t: np.ndarray,
    i1t: np.ndarray,
    maps: FusionMaps,
    weights: TemporalWeights,
    residual: np.ndarray | None = None,
    denom_epsilon: float = DENOM_EPSILON,
) -> np.ndarray:
    """Blend two warped frames under coverage gates and temporal factors.

    Unfillable pixels come out as 0 plus the residual; every other pixel
    is the gated weighted average. A pixel whose denominator vanishes
    without being flagged unfillable raises DegenerateFusionError naming
    the offending coordinates. Output is clamped to [0, 1] after the
    residual is added.
    """
    i0t = validate_image(i0t, "i0t")
    i1t = validate_image(i1t, "i1t")
    if i0t.shape != i1t.shape:
        raise InvalidInputError(f"warped frames differ in shape: {i0t.shape} vs {i1t.shape}")
    if weights.w0 < 0 or weights.w1 < 0 or not math.isfinite(weights.w0 + weights.w1):
        raise InvalidInputError(f"temporal weights {weights} must be finite and non-negative")
    h, w = i0t.shape[:2]
    if maps.m0.shape != (h, w) or maps.m1.shape != (h, w) or maps.unfillable.shape != (h, w):
        raise InvalidInputError("fusion maps do not match image dims")

    denom = weights.w0 * maps.m0 + weights.w1 * maps.m1
    bad = (denom < denom_epsilon) & ~maps.unfillable
    if np.any(bad):
        raise DegenerateFusionError(np.argwhere(bad))

    p0 = with_channels(i0t)
    p1 = with_channels(i1t)
    numer = weights.w0 * maps.m0[..., None] * p0 + weights.w1 * maps.m1[..., None] * p1
    out = np.zeros_like(numer)
    ok = ~maps.unfillable
    np.divide(numer, denom[..., None], out=out, where=ok[..., None])

    if residual is not None:
        residual = np.asarray(residual, dtype=np.float64)
        if residual.shape != i0t.shape:
            raise InvalidInputError(
                f"residual shape {residual.shape} does not match frames {i0t.shape}"
            )
        if not np.all(np.isfinite(residual)):
            raise InvalidInputError("residual contains non-finite values")
        out = out + with_channels(residual)
    np.clip(out, 0.0, 1.0, out=out)
    return like_input(out, i0t)


def fill_unfillable(
    image: np.ndarray,
    unfillable: np.ndarray,
    tol: float = FILL_TOLERANCE,
    max_iters: int = FILL_MAX_ITERS,
) -> np.ndarray:
    """Diffuse valid pixels into unfillable ones.

    Runs Jacobi iterations of 4-neighbor averaging over the unfillable
    set, with all other pixels held fixed, until the largest per-pixel
    change drops below `tol` or `max_iters` is reached. Pixels outside
    the unfillable set are returned untouched.
    """
    image = validate_image(image)
    mask = np.asarray(unfillable, dtype=bool)
    if mask.shape != image.shape[:2]:
        raise InvalidInputError(
            f"unfillable mask {mask.shape} does not match image {image.shape[:2]}"
        )
    if not mask.any():
        return image.copy()
    if mask.all():
        raise DegenerateInputError("every pixel is unfillable; nothing to diffuse from")

    planes = with_channels(image).copy()
    known_mean = planes[~mask].mean(axis=0)

    # Work on the hole bounding box (plus a 1px rim of fixed neighbors).
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    r0, r1 = max(rows[0] - 1, 0), min(rows[-1] + 2, mask.shape[0])
    c0, c1 = max(cols[0] - 1, 0), min(cols[-1] + 2, mask.shape[1])
    u = planes[r0:r1, c0:c1].copy()
    m = mask[r0:r1, c0:c1]
    u[m] = known_mean

    for _ in range(max_iters):
        s = np.zeros_like(u)
        n = np.zeros(u.shape[:2], dtype=np.float64)
        s[1:] += u[:-1]
        n[1:] += 1.0
        s[:-1] += u[1:]
        n[:-1] += 1.0
        s[:, 1:] += u[:, :-1]
        n[:, 1:] += 1.0
        s[:, :-1] += u[:, 1:]
        n[:, :-1] += 1.0
        new = s[m] / n[m][:, None]
        delta = np.max(np.abs(new - u[m])) if new.size else 0.0
        u[m] = new
        if delta < tol:
            break

    planes[r0:r1, c0:c1][m] = u[m]
    return like_input(planes, image)

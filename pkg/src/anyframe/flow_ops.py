"""Dense flow field primitives.

A flow field is a float array of shape (H, W, 2) holding per-pixel
displacements (dx, dy) in pixels, x growing rightward and y downward.
Flows are motion fields: a pixel occluded at the target time still
carries the motion of its source layer.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError
from .resample import resize_bilinear


def validate_flow(flow: np.ndarray, name: str = "flow") -> np.ndarray:
    """Check shape and finiteness, returning the array as float64."""
    arr = np.asarray(flow, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InvalidInputError(f"{name} must have shape (H, W, 2), got {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} has empty spatial dims {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def approximate_flow_pair(
    f01: np.ndarray, f10: np.ndarray, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Approximate flows toward an arbitrary time from the frame pair flows.

    Under a locally constant-velocity assumption the flow from frame 0 to
    time t is t * F01, and from frame 1 it is (1 - t) * F10. The formulas
    hold for any real t, including t < 0 and t > 1.

    Args:
        f01: flow from frame 0 to frame 1, shape (H, W, 2).
        f10: flow from frame 1 to frame 0, same shape.
        t: target time on the axis where frame 0 sits at 0 and frame 1 at 1.

    Returns:
        (f0t, f1t): flows from frame 0 and frame 1 toward time t.
    """
    f01 = validate_flow(f01, "f01")
    f10 = validate_flow(f10, "f10")
    if f01.shape != f10.shape:
        raise InvalidInputError(f"flow shapes differ: {f01.shape} vs {f10.shape}")
    if not math.isfinite(t):
        raise InvalidInputError(f"time step {t!r} is not finite")
    f0t = t * f01
    f1t = (1.0 - t) * f10
    return f0t, f1t


def rescale_flow(flow: np.ndarray, factor: float) -> np.ndarray:
    """Resize a flow field spatially and scale its displacements to match.

    Spatial dims are scaled by `factor` (rounded to nearest, ties up) via
    bilinear resampling; both displacement components are multiplied by
    `factor` so motion keeps its meaning at the new resolution.
    """
    flow = validate_flow(flow)
    if not math.isfinite(factor) or factor <= 0:
        raise InvalidInputError(f"scale factor {factor!r} must be positive")
    h, w = flow.shape[:2]
    if factor == 1.0:
        return flow.copy()
    out_h = max(1, int(math.floor(h * factor + 0.5)))
    out_w = max(1, int(math.floor(w * factor + 0.5)))
    return resize_bilinear(flow, out_h, out_w) * factor


def fit_flow_to(flow: np.ndarray, h: int, w: int) -> np.ndarray:
    """Resize a flow to exact target dims, scaling each component to match.

    Unlike rescale_flow this allows the two axes to scale unevenly (the
    off-by-one case when pyramid levels of odd sizes are reassembled);
    dx scales with the width ratio and dy with the height ratio.
    """
    flow = validate_flow(flow)
    if h < 1 or w < 1:
        raise InvalidInputError(f"target size {h}x{w} must be positive")
    src_h, src_w = flow.shape[:2]
    if (src_h, src_w) == (h, w):
        return flow.copy()
    out = resize_bilinear(flow, h, w)
    out[..., 0] *= w / src_w
    out[..., 1] *= h / src_h
    return out


def endpoint_error(fa: np.ndarray, fb: np.ndarray) -> float:
    """Mean Euclidean distance between two flow fields, in pixels."""
    fa = validate_flow(fa, "fa")
    fb = validate_flow(fb, "fb")
    if fa.shape != fb.shape:
        raise InvalidInputError(f"flow shapes differ: {fa.shape} vs {fb.shape}")
    d = fa - fb
    return float(np.mean(np.sqrt(d[..., 0] ** 2 + d[..., 1] ** 2)))

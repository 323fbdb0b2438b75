"""Forward warping by weighted bilinear splatting.

Each source pixel is thrown along its flow vector and deposited onto the
four destination pixels surrounding its landing point, weighted bilinearly.
Accumulated values are normalized by accumulated weight, which doubles as
a coverage map: destinations nothing landed on are holes.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .flow_ops import validate_flow
from .images import like_input, validate_image, with_channels

COVERAGE_EPSILON = 1e-4


def forward_warp(
    image: np.ndarray, flow: np.ndarray, coverage_epsilon: float = COVERAGE_EPSILON
) -> tuple[np.ndarray, np.ndarray]:
    """Splat an image forward along a flow field.

    Args:
        image: (H, W) or (H, W, C) array with values in [0, 1].
        flow: (H, W, 2) displacement field applied to source pixels.
        coverage_epsilon: weight below which a destination counts as a hole.

    Returns:
        (warped, coverage): the warped image, shaped like the input, with
        values normalized by accumulated weight and clamped to [0, 1]
        (holes set to 0); and the raw accumulated weight plane (H, W).

    Contributions landing outside the grid are dropped. Sequential splat
    order is source raster order, so results are bit-reproducible.
    """
    image = validate_image(image)
    flow = validate_flow(flow)
    if image.shape[:2] != flow.shape[:2]:
        raise InvalidInputError(
            f"image {image.shape[:2]} and flow {flow.shape[:2]} dims differ"
        )
    planes = with_channels(image)
    h, w = planes.shape[:2]

    ys, xs = np.mgrid[0:h, 0:w]
    xt = (xs + flow[..., 0]).ravel()
    yt = (ys + flow[..., 1]).ravel()
    x0 = np.floor(xt)
    y0 = np.floor(yt)
    fx = xt - x0
    fy = yt - y0

    # Four corner contributions per source pixel, kept adjacent so that
    # per-destination accumulation order follows source raster order.
    cx = np.stack([x0, x0 + 1.0, x0, x0 + 1.0], axis=1).astype(np.int64)
    cy = np.stack([y0, y0, y0 + 1.0, y0 + 1.0], axis=1).astype(np.int64)
    cw = np.stack(
        [(1 - fy) * (1 - fx), (1 - fy) * fx, fy * (1 - fx), fy * fx], axis=1
    )
    keep = ((cx >= 0) & (cx < w) & (cy >= 0) & (cy < h)).ravel()
    lin = (cy * w + cx).ravel()[keep]
    wgt = cw.ravel()[keep]

    coverage = np.bincount(lin, weights=wgt, minlength=h * w).reshape(h, w)
    out = np.zeros_like(planes)
    src = planes.reshape(-1, planes.shape[2])
    src_idx = np.repeat(np.arange(h * w), 4)[keep]
    for c in range(planes.shape[2]):
        acc = np.bincount(lin, weights=wgt * src[src_idx, c], minlength=h * w)
        out[..., c] = acc.reshape(h, w)

    covered = coverage >= coverage_epsilon
    np.divide(out, coverage[..., None], out=out, where=covered[..., None])
    out[~covered] = 0.0
    np.clip(out, 0.0, 1.0, out=out)
    return like_input(out, image), coverage


def hole_mask(
    coverage: np.ndarray, coverage_epsilon: float = COVERAGE_EPSILON
) -> np.ndarray:
    """Boolean plane marking destinations that received too little weight."""
    coverage = np.asarray(coverage, dtype=np.float64)
    if coverage.ndim != 2:
        raise InvalidInputError(f"coverage must be 2D, got {coverage.shape}")
    return coverage < coverage_epsilon


def hole_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection-over-union of two hole masks; 1.0 when both are empty."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise InvalidInputError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = np.count_nonzero(a | b)
    if union == 0:
        return 1.0
    return np.count_nonzero(a & b) / union

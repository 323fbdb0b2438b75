"""Shared bilinear sampling and downsampling helpers.

All samplers use edge-clamped (nearest) boundary handling and the
align-corners grid convention: resizing maps source corner samples onto
destination corner samples, so linear ramps survive a resize exactly.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError


def sample_bilinear(plane: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Sample a 2D plane (or HxWxC stack) at real-valued coordinates.

    Args:
        plane: array of shape (H, W) or (H, W, C).
        ys, xs: broadcastable arrays of row/column coordinates in pixels.

    Returns:
        Sampled values with the broadcast shape of ys/xs (plus a trailing
        channel axis when the input had one). Coordinates outside the grid
        clamp to the nearest edge sample.
    """
    if plane.ndim == 2:
        return ndimage.map_coordinates(plane, [ys, xs], order=1, mode="nearest")
    out = [
        ndimage.map_coordinates(plane[..., c], [ys, xs], order=1, mode="nearest")
        for c in range(plane.shape[-1])
    ]
    return np.stack(out, axis=-1)


def _axis_coords(n_out: int, n_in: int) -> np.ndarray:
    # Align corners; a single-sample output reads the source center.
    if n_out == 1:
        return np.full(1, (n_in - 1) / 2.0)
    return np.arange(n_out, dtype=np.float64) * ((n_in - 1) / (n_out - 1))


def resize_bilinear(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize a (H, W[, C]) array to (out_h, out_w[, C]) bilinearly."""
    if out_h < 1 or out_w < 1:
        raise InvalidInputError(f"target size {out_h}x{out_w} must be positive")
    h, w = arr.shape[:2]
    if (out_h, out_w) == (h, w):
        return arr.copy()
    ys = _axis_coords(out_h, h)[:, None]
    xs = _axis_coords(out_w, w)[None, :]
    ys, xs = np.broadcast_arrays(ys, xs)
    return sample_bilinear(arr, ys, xs)


def downsample2x(arr: np.ndarray) -> np.ndarray:
    """Halve spatial resolution by 2x2 area averaging.

    Odd trailing rows/columns are dropped so every output sample is the
    mean of a full 2x2 block.
    """
    h, w = arr.shape[:2]
    if h < 2 or w < 2:
        raise InvalidInputError(f"cannot halve a {h}x{w} array")
    h2, w2 = h // 2, w // 2
    a = arr[: 2 * h2, : 2 * w2]
    if arr.ndim == 2:
        blocks = a.reshape(h2, 2, w2, 2)
        return blocks.mean(axis=(1, 3))
    blocks = a.reshape(h2, 2, w2, 2, arr.shape[2])
    return blocks.mean(axis=(1, 3))

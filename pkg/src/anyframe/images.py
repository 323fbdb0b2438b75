"""Image array conventions and validation.

Images are float arrays shaped (H, W) or (H, W, C) with C in {1, 3} and
values in [0, 1]. Functions in this package accept either shape; helpers
here normalize to a channel-explicit view and back.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError


def validate_image(image: np.ndarray, name: str = "image") -> np.ndarray:
    """Check image conventions, returning the array as float64."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        pass
    elif arr.ndim == 3 and arr.shape[2] in (1, 3):
        pass
    else:
        raise InvalidInputError(
            f"{name} must be (H, W) or (H, W, C) with C in {{1, 3}}, got {arr.shape}"
        )
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} has empty spatial dims {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def with_channels(image: np.ndarray) -> np.ndarray:
    """View a validated image as (H, W, C), adding a C=1 axis if needed."""
    return image[..., None] if image.ndim == 2 else image


def like_input(planes: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Collapse a (H, W, 1) result back to (H, W) when the input was 2D."""
    if reference.ndim == 2 and planes.ndim == 3 and planes.shape[2] == 1:
        return planes[..., 0]
    return planes


def grayscale(image: np.ndarray) -> np.ndarray:
    """Reduce an image to a single luminance plane (Rec. 601 weights)."""
    if image.ndim == 2:
        return image
    if image.shape[2] == 1:
        return image[..., 0]
    return 0.299 * image[..., 0] + 0.587 * image[..., 1] + 0.114 * image[..., 2]

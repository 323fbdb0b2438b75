"""Task classification and the task-identity input channel.

The synthesis engine handles two tasks with one code path: interpolation
(target time between the input frames, inclusive) and prediction (target
time outside that range). A constant extra channel announces the task to
downstream consumers; backward prediction is rewritten as forward
prediction on swapped inputs.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .errors import InvalidInputError


class TaskKind(Enum):
    INTERPOLATION = "interpolation"
    PREDICTION = "prediction"


def classify_task(t: float) -> TaskKind:
    """Interpolation for t in [0, 1] inclusive, prediction otherwise."""
    if not math.isfinite(t):
        raise InvalidInputError(f"time step {t!r} is not finite")
    return TaskKind.INTERPOLATION if 0.0 <= t <= 1.0 else TaskKind.PREDICTION


def make_task_channel(kind: TaskKind, h: int, w: int) -> np.ndarray:
    """Constant (H, W) plane: zeros for interpolation, ones for prediction."""
    if not isinstance(kind, TaskKind):
        raise InvalidInputError(f"expected TaskKind, got {kind!r}")
    if h < 1 or w < 1:
        raise InvalidInputError(f"task channel dims {h}x{w} must be positive")
    fill = 0.0 if kind is TaskKind.INTERPOLATION else 1.0
    return np.full((h, w), fill, dtype=np.float64)


def convert_prediction(
    i0: np.ndarray, i1: np.ndarray, t: float
) -> tuple[np.ndarray, np.ndarray, float, bool]:
    """Rewrite a backward prediction as a forward one.

    For t < 0 the frame order is reversed and the target becomes 1 - t,
    which lies beyond the (new) second frame; the returned flag records
    that the rewrite happened. Any other t passes through untouched.
    """
    if not math.isfinite(t):
        raise InvalidInputError(f"time step {t!r} is not finite")
    if t < 0.0:
        return i1, i0, 1.0 - t, True
    return i0, i1, t, False

"""Reconstruction losses and image quality metrics.

Losses operate on images in [0, 1]; accumulations run in float64. The
census term compares local rank structure rather than raw intensity, so
it is exactly invariant to uniform brightness shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import InvalidInputError
from .images import grayscale, validate_image, with_channels

PSNR_CAP_DB = 99.0

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


@dataclass(frozen=True)
class LossParams:
    """Knobs for the reconstruction losses.

    census_soft_epsilon is in squared-intensity units on the 0..255 scale
    used internally by the census transform; census_patch is the odd side
    length of the comparison neighborhood.
    """

    charbonnier_epsilon: float = 1e-6
    charbonnier_alpha: float = 0.5
    census_patch: int = 7
    census_soft_epsilon: float = 0.81


def _check_pair(pred: np.ndarray, gt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pred = validate_image(pred, "pred")
    gt = validate_image(gt, "gt")
    if pred.shape != gt.shape:
        raise InvalidInputError(f"image shapes differ: {pred.shape} vs {gt.shape}")
    return pred, gt


def charbonnier(pred: np.ndarray, gt: np.ndarray, params: LossParams = LossParams()) -> float:
    """Smooth L1-like penalty: mean((d^2 + eps^2)^alpha).

    Identical inputs return the additive floor eps^(2*alpha) rather
    than 0, which keeps gradients finite in the learned counterpart.
    """
    pred, gt = _check_pair(pred, gt)
    d = pred - gt
    eps_sq = params.charbonnier_epsilon * params.charbonnier_epsilon
    return float(np.mean((d * d + eps_sq) ** params.charbonnier_alpha))


def census_loss(pred: np.ndarray, gt: np.ndarray, params: LossParams = LossParams()) -> float:
    """Mean soft-Hamming distance between local census descriptors.

    Each pixel is described by soft signs of its differences to every
    neighbor in a census_patch x census_patch window (center excluded),
    computed on a 0..255 intensity scale with the soft sign
    x / sqrt(x^2 + census_soft_epsilon). The per-pixel distance is the
    mean squared half-difference of descriptors, and the loss averages
    it over pixels far enough from the border to own a full window.
    """
    pred, gt = _check_pair(pred, gt)
    patch = params.census_patch
    if patch < 1 or patch % 2 == 0:
        raise InvalidInputError(f"census_patch must be odd and positive, got {patch}")
    r = patch // 2
    h, w = pred.shape[:2]
    if h < patch or w < patch:
        raise InvalidInputError(
            f"images {h}x{w} are smaller than the census patch {patch}"
        )
    gp = grayscale(pred) * 255.0
    gg = grayscale(gt) * 255.0
    center_p = gp[r : h - r, r : w - r]
    center_g = gg[r : h - r, r : w - r]
    acc = np.zeros_like(center_p)
    count = 0
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dy == 0 and dx == 0:
                continue
            np_ = gp[r + dy : h - r + dy, r + dx : w - r + dx]
            ng = gg[r + dy : h - r + dy, r + dx : w - r + dx]
            dp = center_p - np_
            dg = center_g - ng
            sp = dp / np.sqrt(dp * dp + params.census_soft_epsilon)
            sg = dg / np.sqrt(dg * dg + params.census_soft_epsilon)
            half = (sp - sg) / 2.0
            acc += half * half
            count += 1
    return float(np.mean(acc / count))


def reconstruction_loss(
    pred: np.ndarray, gt: np.ndarray, params: LossParams = LossParams()
) -> float:
    """Charbonnier plus census, the per-frame synthesis objective."""
    return charbonnier(pred, gt, params) + census_loss(pred, gt, params)


def combined_task_loss(interp_term: float, pred_term: float) -> float:
    """Sum of the interpolation and prediction objectives."""
    for name, v in (("interp_term", interp_term), ("pred_term", pred_term)):
        if not math.isfinite(v):
            raise InvalidInputError(f"{name} {v!r} is not finite")
        if v < 0:
            raise InvalidInputError(f"{name} {v!r} is negative")
    return interp_term + pred_term


def psnr(a: np.ndarray, b: np.ndarray, mask: np.ndarray | None = None) -> float:
    """Peak signal-to-noise ratio in dB for unit-range images.

    Args:
        a, b: images of identical shape with values in [0, 1].
        mask: optional (H, W) boolean plane restricting the comparison.

    Returns:
        10 * log10(1 / MSE), capped at 99.0 dB (the cap also stands in
        for the infinite ratio of identical images).
    """
    a, b = _check_pair(a, b)
    d = with_channels(a) - with_channels(b)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != a.shape[:2]:
            raise InvalidInputError(f"mask {mask.shape} does not match images {a.shape[:2]}")
        if not mask.any():
            raise InvalidInputError("mask selects no pixels")
        d = d[mask]
    mse = float(np.mean(d * d))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * math.log10(1.0 / mse), PSNR_CAP_DB)


def _ssim_plane(x: np.ndarray, y: np.ndarray) -> float:
    ax = np.arange(_SSIM_WINDOW, dtype=np.float64) - (_SSIM_WINDOW - 1) / 2.0
    g = np.exp(-(ax * ax) / (2.0 * _SSIM_SIGMA * _SSIM_SIGMA))
    kernel = np.outer(g, g)
    kernel /= kernel.sum()

    def win(p: np.ndarray) -> np.ndarray:
        return fftconvolve(p, kernel, mode="valid")

    c1 = _SSIM_K1 * _SSIM_K1
    c2 = _SSIM_K2 * _SSIM_K2
    mx = win(x)
    my = win(y)
    sxx = win(x * x) - mx * mx
    syy = win(y * y) - my * my
    sxy = win(x * y) - mx * my
    num = (2.0 * mx * my + c1) * (2.0 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean structural similarity over Gaussian-weighted local windows.

    Uses an 11x11 window with sigma 1.5, stabilizers K1=0.01 / K2=0.03 on
    a unit dynamic range, and only windows fully inside the image. Color
    images average the per-channel scores.
    """
    a, b = _check_pair(a, b)
    if a.shape[0] < _SSIM_WINDOW or a.shape[1] < _SSIM_WINDOW:
        raise InvalidInputError(
            f"images {a.shape[:2]} are smaller than the {_SSIM_WINDOW}x{_SSIM_WINDOW} window"
        )
    pa = with_channels(a)
    pb = with_channels(b)
    scores = [_ssim_plane(pa[..., c], pb[..., c]) for c in range(pa.shape[2])]
    return float(np.mean(scores))

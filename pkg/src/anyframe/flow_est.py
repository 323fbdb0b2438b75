"""Bi-directional flow estimation.

Two interchangeable estimators sit behind one entry point: a ground-truth
provider that reads exact motion off an attached oracle (a synthetic
scene or precomputed flow fields), and a classical iterative
least-squares estimator that works purely from pixels. The engine calls
the entry point once per pyramid level, passing upscaled coarser flows
as initialization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import EstimatorError, InvalidConfigurationError, InvalidInputError
from .flow_ops import fit_flow_to, rescale_flow, validate_flow
from .images import grayscale, validate_image
from .resample import downsample2x, sample_bilinear
from .scenegen import SyntheticScene, analytic_flow_at

_DAMPING = 1e-4  # in mean-squared-gradient units; pins flat regions at zero


@dataclass(frozen=True)
class ClassicalParams:
    """Tuning for the classical estimator.

    window is the odd side length of the least-squares neighborhood,
    iterations the warp-and-solve count per resolution, smoothing an
    extra quadratic penalty on update magnitude (0 disables it).
    """

    window: int = 9
    iterations: int = 5
    smoothing: float = 0.0


@dataclass(frozen=True)
class SceneFlows:
    """Oracle binding: the inputs are scene renders at two known times."""

    scene: SyntheticScene
    time0: float = 0.0
    time1: float = 1.0

    def swapped(self) -> "SceneFlows":
        return SceneFlows(self.scene, self.time1, self.time0)


@dataclass(frozen=True)
class FixedFlows:
    """Oracle binding: full-resolution flow fields supplied directly."""

    f01: np.ndarray
    f10: np.ndarray

    def swapped(self) -> "FixedFlows":
        return FixedFlows(self.f10, self.f01)


@dataclass(frozen=True)
class EstimatorSpec:
    """Which estimator to run and what it may rely on.

    kind "gt" serves flows from `truth` (required); kind "classical"
    estimates from pixels with `params`.
    """

    kind: str = "classical"
    params: ClassicalParams = ClassicalParams()
    truth: SceneFlows | FixedFlows | None = None


def truth_flows_at(
    truth: SceneFlows | FixedFlows, h: int, w: int
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate an oracle binding at the given grid size."""
    if isinstance(truth, SceneFlows):
        f01 = analytic_flow_at(truth.scene, truth.time0, truth.time1, h, w)
        f10 = analytic_flow_at(truth.scene, truth.time1, truth.time0, h, w)
        return f01, f10
    if isinstance(truth, FixedFlows):
        return fit_flow_to(truth.f01, h, w), fit_flow_to(truth.f10, h, w)
    raise InvalidConfigurationError(f"unknown truth binding {truth!r}")


def estimate_bidirectional(
    i0: np.ndarray,
    i1: np.ndarray,
    init01: np.ndarray | None = None,
    init10: np.ndarray | None = None,
    spec: EstimatorSpec = EstimatorSpec(),
) -> tuple[np.ndarray, np.ndarray]:
    """Estimate flows between a frame pair, in both directions.

    Args:
        i0, i1: images of identical shape.
        init01, init10: optional warm starts at the same resolution; pass
            both or neither. The ground-truth estimator ignores them.
        spec: estimator selection; see EstimatorSpec.

    Returns:
        (f01, f10) flow fields shaped (H, W, 2).

    Without initialization the classical estimator runs its own
    coarse-to-fine schedule; with initialization it refines at the given
    resolution only, which is how the synthesis engine drives it.
    """
    i0 = validate_image(i0, "i0")
    i1 = validate_image(i1, "i1")
    if i0.shape != i1.shape:
        raise InvalidInputError(f"frame shapes differ: {i0.shape} vs {i1.shape}")
    if (init01 is None) != (init10 is None):
        raise InvalidInputError("pass both warm starts or neither")
    h, w = i0.shape[:2]

    if spec.kind == "gt":
        if spec.truth is None:
            raise InvalidConfigurationError(
                "ground-truth estimator requires a truth binding; set EstimatorSpec.truth"
            )
        return truth_flows_at(spec.truth, h, w)
    if spec.kind != "classical":
        raise InvalidConfigurationError(f"unknown estimator kind {spec.kind!r}")

    p = spec.params
    if p.window < 3 or p.window % 2 == 0:
        raise InvalidConfigurationError(f"window must be odd and >= 3, got {p.window}")
    if p.iterations < 1:
        raise InvalidConfigurationError(f"iterations must be >= 1, got {p.iterations}")

    g0 = grayscale(i0)
    g1 = grayscale(i1)
    if init01 is not None:
        init01 = validate_flow(init01, "init01")
        init10 = validate_flow(init10, "init10")
        if init01.shape[:2] != (h, w) or init10.shape[:2] != (h, w):
            raise InvalidInputError("warm starts must match the frame resolution")
        return _refine(g0, g1, init01, p), _refine(g1, g0, init10, p)
    return _coarse_to_fine(g0, g1, p), _coarse_to_fine(g1, g0, p)


def _refine(g0: np.ndarray, g1: np.ndarray, flow: np.ndarray, p: ClassicalParams) -> np.ndarray:
    """Iterative windowed least-squares refinement at one resolution."""
    h, w = g0.shape
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    lam = p.smoothing + _DAMPING
    for _ in range(p.iterations):
        warped = sample_bilinear(g1, ys + flow[..., 1], xs + flow[..., 0])
        it = warped - g0
        iy, ix = np.gradient(0.5 * (g0 + warped))
        sxx = ndimage.uniform_filter(ix * ix, p.window) + lam
        syy = ndimage.uniform_filter(iy * iy, p.window) + lam
        sxy = ndimage.uniform_filter(ix * iy, p.window)
        sxt = ndimage.uniform_filter(ix * it, p.window)
        syt = ndimage.uniform_filter(iy * it, p.window)
        det = sxx * syy - sxy * sxy
        du = (-sxt * syy + sxy * syt) / det
        dv = (sxy * sxt - sxx * syt) / det
        limit = float(p.window)
        np.clip(du, -limit, limit, out=du)
        np.clip(dv, -limit, limit, out=dv)
        flow = flow + np.stack([du, dv], axis=-1)
    if not np.all(np.isfinite(flow)):
        raise EstimatorError(f"classical refinement diverged at {h}x{w}")
    return flow


def _level_count(h: int, w: int) -> int:
    m = min(h, w)
    n = 1
    while m >= 32:
        m //= 2
        n += 1
    return n


def _coarse_to_fine(g0: np.ndarray, g1: np.ndarray, p: ClassicalParams) -> np.ndarray:
    levels = [(g0, g1)]
    for _ in range(_level_count(*g0.shape) - 1):
        a, b = levels[-1]
        levels.append((downsample2x(a), downsample2x(b)))
    flow = np.zeros(levels[-1][0].shape + (2,), dtype=np.float64)
    for a, b in reversed(levels):
        if flow.shape[:2] != a.shape:
            flow = fit_flow_to(rescale_flow(flow, 2.0), *a.shape)
        flow = _refine(a, b, flow, p)
    return flow

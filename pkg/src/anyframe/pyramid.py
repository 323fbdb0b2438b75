"""Coarse-to-fine synthesis engine.

Given two frames and a target time, the engine estimates bi-directional
flow over an image pyramid, projects it toward the target time at every
level, forward-warps both frames, and fuses them under coverage gates
and temporal factors. The finest level's fused frame, with holes
diffused in, is the synthesized output.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import InvalidConfigurationError, InvalidInputError
from .flow_ops import approximate_flow_pair, endpoint_error, fit_flow_to, rescale_flow
from .flow_est import EstimatorSpec, FixedFlows, SceneFlows, estimate_bidirectional, truth_flows_at
from .fusion import (
    DENOM_EPSILON,
    TemporalWeights,
    coverage_fusion_maps,
    fill_unfillable,
    fuse,
    temporal_weights,
)
from .images import validate_image
from .resample import downsample2x
from .tasking import TaskKind, classify_task, convert_prediction, make_task_channel
from .warp import COVERAGE_EPSILON, forward_warp, hole_mask, hole_overlap

_MIN_DIM_AUTO = 16
_MIN_DIM_COARSEST = 8

ResidualFn = Callable[[int, int, int, int], "np.ndarray | None"]


def choose_levels(h: int, w: int) -> int:
    """Pyramid depth such that the coarsest min dimension lands in [16, 32).

    Images whose min dimension is already below 16 are too small to
    pyramid and are rejected.
    """
    m = min(h, w)
    if m < _MIN_DIM_AUTO:
        raise InvalidInputError(f"min dimension {m} is below {_MIN_DIM_AUTO}")
    n = 1
    while m >= 2 * _MIN_DIM_AUTO:
        m //= 2
        n += 1
    return n


@dataclass(frozen=True)
class SynthesisOptions:
    coverage_epsilon: float = COVERAGE_EPSILON
    denom_epsilon: float = DENOM_EPSILON
    fill_holes: bool = True
    convert_backward: bool = True
    temporal_factor: bool = True


@dataclass(frozen=True)
class SynthesisRequest:
    """One synthesis job.

    levels=None picks the pyramid depth automatically; an explicit depth
    must keep the coarsest level at least 8 pixels on its short side.
    residual_fn, when set, is called per level as (level, h, w, channels)
    and may return a correction added to the fused frame before clamping
    (level 0 is the finest; channels is 0 for planar (H, W) frames, so the
    returned array must be (h, w) then and (h, w, channels) otherwise).
    """

    i0: np.ndarray
    i1: np.ndarray
    t: float
    estimator: EstimatorSpec = EstimatorSpec()
    levels: int | None = None
    options: SynthesisOptions = SynthesisOptions()
    residual_fn: ResidualFn | None = None
    epe_reference: SceneFlows | FixedFlows | None = None


@dataclass
class LevelDiagnostics:
    """Per-level record, in processing order (coarsest first).

    level counts down to 0 at the finest resolution. epe01 is the mean
    endpoint error of the estimated forward flow against the attached
    truth, when one is available. millis is wall-clock and is the one
    field exempt from bit-identical reproducibility.
    """

    level: int
    h: int
    w: int
    hole_iou: float
    task_value: float
    epe01: float | None = None
    millis: float = 0.0


@dataclass
class SynthesisResult:
    """Output frame plus everything needed to audit it.

    All planes are at the finest resolution. `t` is the effective time
    actually synthesized (after any backward-prediction rewrite of
    `requested_t`); flows and warped artifacts follow that convention.
    """

    image: np.ndarray
    t: float
    requested_t: float
    converted: bool
    task: TaskKind
    weights: TemporalWeights
    f01: np.ndarray
    f10: np.ndarray
    f0t: np.ndarray
    f1t: np.ndarray
    coverage0: np.ndarray
    coverage1: np.ndarray
    holes0: np.ndarray
    holes1: np.ndarray
    unfillable: np.ndarray
    task_channel: np.ndarray
    levels: list[LevelDiagnostics] = field(default_factory=list)


def _build_pyramid(image: np.ndarray, n_levels: int) -> list[np.ndarray]:
    """Finest-first list of area-averaged images."""
    levels = [image]
    for _ in range(n_levels - 1):
        levels.append(downsample2x(levels[-1]))
    return levels


def synthesize(req: SynthesisRequest) -> SynthesisResult:
    """Run the full coarse-to-fine synthesis pipeline for one request."""
    i0 = validate_image(req.i0, "i0")
    i1 = validate_image(req.i1, "i1")
    if i0.shape != i1.shape:
        raise InvalidInputError(f"frame shapes differ: {i0.shape} vs {i1.shape}")
    if float(min(i0.min(), i1.min())) < 0.0 or float(max(i0.max(), i1.max())) > 1.0:
        raise InvalidInputError("frame values must lie in [0, 1]")
    opts = req.options

    estimator = req.estimator
    epe_ref = req.epe_reference
    if opts.convert_backward:
        i0, i1, t, converted = convert_prediction(i0, i1, req.t)
        if converted:
            if estimator.truth is not None:
                estimator = replace(estimator, truth=estimator.truth.swapped())
            if epe_ref is not None:
                epe_ref = epe_ref.swapped()
    else:
        t, converted = req.t, False
        if not np.isfinite(t):
            raise InvalidInputError(f"time step {t!r} is not finite")

    task = classify_task(t)
    weights = temporal_weights(t) if opts.temporal_factor else TemporalWeights(0.5, 0.5)

    h, w = i0.shape[:2]
    if req.levels is None:
        n_levels = choose_levels(h, w)
    else:
        n_levels = int(req.levels)
        if n_levels < 1:
            raise InvalidConfigurationError(f"levels must be >= 1, got {req.levels}")
        if min(h, w) // (1 << (n_levels - 1)) < _MIN_DIM_COARSEST:
            raise InvalidConfigurationError(
                f"{n_levels} levels would take {h}x{w} below "
                f"{_MIN_DIM_COARSEST} pixels at the coarsest level"
            )

    pyr0 = _build_pyramid(i0, n_levels)
    pyr1 = _build_pyramid(i1, n_levels)
    channels = 0 if i0.ndim == 2 else i0.shape[2]

    truth = estimator.truth if estimator.kind == "gt" else epe_ref
    diags: list[LevelDiagnostics] = []
    f01 = f10 = None
    finest = None
    for level in range(n_levels - 1, -1, -1):
        started = time.perf_counter()
        a, b = pyr0[level], pyr1[level]
        lh, lw = a.shape[:2]
        if f01 is None:
            init01 = init10 = None
        else:
            init01 = fit_flow_to(rescale_flow(f01, 2.0), lh, lw)
            init10 = fit_flow_to(rescale_flow(f10, 2.0), lh, lw)
        f01, f10 = estimate_bidirectional(a, b, init01, init10, estimator)
        f0t, f1t = approximate_flow_pair(f01, f10, t)
        i0t, c0 = forward_warp(a, f0t, opts.coverage_epsilon)
        i1t, c1 = forward_warp(b, f1t, opts.coverage_epsilon)
        h0 = hole_mask(c0, opts.coverage_epsilon)
        h1 = hole_mask(c1, opts.coverage_epsilon)
        maps = coverage_fusion_maps(c0, c1, task, opts.coverage_epsilon)
        chan = make_task_channel(task, lh, lw)
        residual = None
        if req.residual_fn is not None:
            residual = req.residual_fn(level, lh, lw, channels)
        fused = fuse(i0t, i1t, maps, weights, residual, opts.denom_epsilon)
        if level == 0 and opts.fill_holes and maps.unfillable.any():
            fused = fill_unfillable(fused, maps.unfillable)

        epe01 = None
        if truth is not None:
            epe01 = endpoint_error(f01, truth_flows_at(truth, lh, lw)[0])
        diags.append(
            LevelDiagnostics(
                level=level,
                h=lh,
                w=lw,
                hole_iou=hole_overlap(h0, h1),
                task_value=float(chan[0, 0]),
                epe01=epe01,
                millis=(time.perf_counter() - started) * 1000.0,
            )
        )
        if level == 0:
            finest = (fused, f0t, f1t, c0, c1, h0, h1, maps.unfillable, chan)

    fused, f0t, f1t, c0, c1, h0, h1, unfillable, chan = finest
    return SynthesisResult(
        image=fused,
        t=t,
        requested_t=req.t,
        converted=converted,
        task=task,
        weights=weights,
        f01=f01,
        f10=f10,
        f0t=f0t,
        f1t=f1t,
        coverage0=c0,
        coverage1=c1,
        holes0=h0,
        holes1=h1,
        unfillable=unfillable,
        task_channel=chan,
        levels=diags,
    )

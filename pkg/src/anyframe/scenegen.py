"""Synthetic scenes with closed-form motion.

Scenes are textured sprites translating at constant velocity over a
textured background. Because motion is constant, the flow between any
two scene times is known in closed form, which makes these scenes exact
oracles for flow approximation and warping: rendering is analytic in t,
no frame is ever resampled from another frame.

Textures are seeded value noise: random lattice values interpolated
bilinearly, with lattice spacing an integer number of pixels. Sprites
keep their texture in local coordinates, so it rides along rigidly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError

ROLES = ("interp", "next-pred", "prev-pred")
ROLE_TIMES = {"interp": 0.5, "next-pred": 2.0, "prev-pred": -1.0}

_TEXTURE_LO = 0.2
_TEXTURE_HI = 0.8


@dataclass(frozen=True)
class Sprite:
    """A translating textured shape.

    center is the shape center at scene time 0 in (x, y) pixels; depth
    orders compositing, larger values drawing on top.
    """

    shape: str  # "rect" | "disk"
    size: float  # side length / diameter in pixels
    center: tuple[float, float]
    velocity: tuple[float, float]  # pixels per unit time
    depth: int
    texture_seed: int
    texture_cell: int = 4

    def center_at(self, t: float) -> tuple[float, float]:
        return (
            self.center[0] + self.velocity[0] * t,
            self.center[1] + self.velocity[1] * t,
        )


@dataclass(frozen=True)
class SyntheticScene:
    width: int
    height: int
    background_seed: int
    sprites: tuple[Sprite, ...] = ()
    background_velocity: tuple[float, float] = (0.0, 0.0)
    background_cell: int = 8

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise InvalidInputError(f"scene dims {self.width}x{self.height} invalid")
        depths = [s.depth for s in self.sprites]
        if len(set(depths)) != len(depths):
            raise InvalidInputError(f"sprite depths must be unique, got {depths}")
        for s in self.sprites:
            if s.shape not in ("rect", "disk"):
                raise InvalidInputError(f"unknown sprite shape {s.shape!r}")
            if s.size <= 0 or s.texture_cell < 1:
                raise InvalidInputError(f"bad sprite geometry: {s}")


class _ValueNoise:
    """Periodic value noise on an integer lattice, stretched to [0.2, 0.8]."""

    def __init__(self, seed: int, nodes_y: int, nodes_x: int, cell: int):
        rng = np.random.default_rng(seed)
        lat = rng.uniform(0.0, 1.0, size=(nodes_y, nodes_x))
        lo, hi = lat.min(), lat.max()
        span = hi - lo
        if span <= 0:  # degenerate draw; keep values legal
            lat = np.full_like(lat, 0.5)
        else:
            lat = _TEXTURE_LO + (lat - lo) * ((_TEXTURE_HI - _TEXTURE_LO) / span)
        self.lattice = lat
        self.cell = cell

    def sample(self, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
        gh, gw = self.lattice.shape
        u = np.asarray(ys, dtype=np.float64) / self.cell
        v = np.asarray(xs, dtype=np.float64) / self.cell
        u0 = np.floor(u)
        v0 = np.floor(v)
        fu = u - u0
        fv = v - v0
        i0 = u0.astype(np.int64) % gh
        j0 = v0.astype(np.int64) % gw
        i1 = (i0 + 1) % gh
        j1 = (j0 + 1) % gw
        lat = self.lattice
        return (
            lat[i0, j0] * (1 - fu) * (1 - fv)
            + lat[i0, j1] * (1 - fu) * fv
            + lat[i1, j0] * fu * (1 - fv)
            + lat[i1, j1] * fu * fv
        )


def _background_noise(scene: SyntheticScene) -> _ValueNoise:
    ny = max(2, -(-scene.height // scene.background_cell))
    nx = max(2, -(-scene.width // scene.background_cell))
    return _ValueNoise(scene.background_seed, ny, nx, scene.background_cell)


def _sprite_noise(sprite: Sprite) -> _ValueNoise:
    n = max(2, int(math.ceil(sprite.size / sprite.texture_cell)) + 1)
    return _ValueNoise(sprite.texture_seed, n, n, sprite.texture_cell)


def _sprite_alpha(sprite: Sprite, t: float, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Fractional pixel coverage of the sprite at time t (0..1 per pixel)."""
    cx, cy = sprite.center_at(t)
    half = sprite.size / 2.0
    if sprite.shape == "rect":
        ox = np.clip(np.minimum(xs + 0.5, cx + half) - np.maximum(xs - 0.5, cx - half), 0.0, 1.0)
        oy = np.clip(np.minimum(ys + 0.5, cy + half) - np.maximum(ys - 0.5, cy - half), 0.0, 1.0)
        return ox * oy
    dist = np.sqrt((xs - cx) ** 2 + (ys - cy) ** 2)
    return np.clip(half - dist + 0.5, 0.0, 1.0)


def _sprite_inside(sprite: Sprite, t: float, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Hard pixel-center membership, the basis of the analytic flow."""
    cx, cy = sprite.center_at(t)
    half = sprite.size / 2.0
    if sprite.shape == "rect":
        return (np.abs(xs - cx) <= half) & (np.abs(ys - cy) <= half)
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= half * half


def _grids(scene: SyntheticScene) -> tuple[np.ndarray, np.ndarray]:
    ys, xs = np.mgrid[0 : scene.height, 0 : scene.width]
    return ys.astype(np.float64), xs.astype(np.float64)


def render(scene: SyntheticScene, t: float) -> np.ndarray:
    """Render the scene at time t as a (H, W) image in [0, 1].

    Sprites are composited back to front over the background with
    fractional edge coverage, placing them at sub-pixel positions
    without ever resampling a rendered frame.
    """
    if not math.isfinite(t):
        raise InvalidInputError(f"scene time {t!r} is not finite")
    ys, xs = _grids(scene)
    vbx, vby = scene.background_velocity
    img = _background_noise(scene).sample(ys - vby * t, xs - vbx * t)
    for sprite in sorted(scene.sprites, key=lambda s: s.depth):
        cx, cy = sprite.center_at(t)
        tex = _sprite_noise(sprite).sample(ys - cy, xs - cx)
        alpha = _sprite_alpha(sprite, t, ys, xs)
        img = img * (1.0 - alpha) + tex * alpha
    return img


def layer_ids(scene: SyntheticScene, t: float, h: int | None = None, w: int | None = None) -> np.ndarray:
    """Integer plane of the topmost layer per pixel center: 0 is background,
    sprites are 1 + their index in scene.sprites."""
    if h is None or w is None:
        h, w = scene.height, scene.width
        ys, xs = _grids(scene)
    else:
        ys, xs = _scaled_grids(scene, h, w)
    ids = np.zeros((h, w), dtype=np.int64)
    order = sorted(range(len(scene.sprites)), key=lambda k: scene.sprites[k].depth)
    for k in order:
        inside = _sprite_inside(scene.sprites[k], t, ys, xs)
        ids[inside] = k + 1
    return ids


def _scaled_grids(scene: SyntheticScene, h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    # Pixel (i, j) at a reduced resolution stands for the area its block
    # covers at full resolution; use the block center as its position.
    by = scene.height / h
    bx = scene.width / w
    ys = (np.arange(h, dtype=np.float64)[:, None] + 0.5) * by - 0.5
    xs = (np.arange(w, dtype=np.float64)[None, :] + 0.5) * bx - 0.5
    return np.broadcast_arrays(ys, xs)


def analytic_flow(scene: SyntheticScene, ta: float, tb: float) -> np.ndarray:
    """Exact flow field from scene time ta to tb at full resolution.

    Each pixel carries the velocity of the layer visible at its center at
    time ta, times (tb - ta); occluded-at-tb pixels still carry their
    layer's motion. Shape (H, W, 2) holding (dx, dy).
    """
    return analytic_flow_at(scene, ta, tb, scene.height, scene.width)


def analytic_flow_at(
    scene: SyntheticScene, ta: float, tb: float, h: int, w: int
) -> np.ndarray:
    """Exact flow between scene times on a (h, w) grid.

    Geometry is evaluated at the full-resolution centers of the reduced
    pixels and displacements are expressed in reduced-resolution pixels,
    so the result is the true motion of the downsampled frames rather
    than a resampled full-resolution flow.
    """
    if not (math.isfinite(ta) and math.isfinite(tb)):
        raise InvalidInputError(f"scene times ({ta!r}, {tb!r}) must be finite")
    if h < 1 or w < 1:
        raise InvalidInputError(f"flow grid {h}x{w} invalid")
    ys, xs = (_grids(scene) if (h, w) == (scene.height, scene.width)
              else _scaled_grids(scene, h, w))
    sy = h / scene.height
    sx = w / scene.width
    dt = tb - ta
    vx = np.full((h, w), scene.background_velocity[0] * sx)
    vy = np.full((h, w), scene.background_velocity[1] * sy)
    for k in sorted(range(len(scene.sprites)), key=lambda i: scene.sprites[i].depth):
        sp = scene.sprites[k]
        inside = _sprite_inside(sp, ta, ys, xs)
        vx[inside] = sp.velocity[0] * sx
        vy[inside] = sp.velocity[1] * sy
    return np.stack([vx * dt, vy * dt], axis=-1)


def sprite_interior_mask(scene: SyntheticScene, t: float, erode: int = 1) -> np.ndarray:
    """Pixels strictly inside some sprite at time t, eroded away from edges."""
    ids = layer_ids(scene, t)
    out = np.zeros(ids.shape, dtype=bool)
    for k in range(len(scene.sprites)):
        m = ids == k + 1
        if erode > 0:
            m = ndimage.binary_erosion(m, structure=np.ones((3, 3)), iterations=erode)
        out |= m
    return out


def consistency_exclusion_mask(
    scene: SyntheticScene, ta: float, tb: float, dilate: int = 2
) -> np.ndarray:
    """Pixels where forward warping legitimately disagrees with rendering.

    Covers visibility changes between ta and tb (dis/occlusions) and
    fractional-coverage sprite edges at either time, dilated to absorb
    bilinear splat spill. Everything outside this mask must match.
    """
    ys, xs = _grids(scene)
    changed = layer_ids(scene, ta) != layer_ids(scene, tb)
    soft = np.zeros(changed.shape, dtype=bool)
    for sprite in scene.sprites:
        for tt in (ta, tb):
            alpha = _sprite_alpha(sprite, tt, ys, xs)
            soft |= (alpha > 0.0) & (alpha < 1.0)
    mask = changed | soft
    if dilate > 0:
        mask = ndimage.binary_dilation(mask, structure=np.ones((3, 3)), iterations=dilate)
    return mask


def make_triplet(
    scene: SyntheticScene, role: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Render the (i0, i1, target, t) tuple for a task role.

    The inputs are always the frames at scene times 0 and 1; the target
    sits at the role's time: 0.5 between them, 2 one step ahead, -1 one
    step behind.
    """
    if role not in ROLES:
        raise InvalidInputError(f"unknown role {role!r}; expected one of {ROLES}")
    t = ROLE_TIMES[role]
    return render(scene, 0.0), render(scene, 1.0), render(scene, t), t


def make_scene(
    seed: int,
    width: int = 96,
    height: int = 96,
    n_sprites: int = 1,
    speed_range: tuple[float, float] = (4.0, 8.0),
    size_range: tuple[int, int] = (10, 16),
    time_span: tuple[float, float] = (-3.0, 4.0),
) -> SyntheticScene:
    """Seeded scene factory keeping sprites in frame over a time span.

    The dominant velocity axis gets a magnitude in speed_range (so every
    sprite moves at least that much per unit step); the cross axis stays
    small. Initial centers are integers chosen so the whole trajectory
    over time_span stays inside the frame, and sprite trajectories do
    not intersect each other.
    """
    rng = np.random.default_rng(seed)
    bg_seed = int(rng.integers(0, 2**31))
    sprites = []
    boxes: list[tuple[float, float, float, float]] = []
    t_lo, t_hi = time_span
    for k in range(n_sprites):
        for _ in range(200):
            size = int(rng.integers(size_range[0], size_range[1] + 1))
            speed = float(rng.uniform(*speed_range))
            sign = 1.0 if rng.uniform() < 0.5 else -1.0
            cross = float(rng.uniform(-2.0, 2.0))
            if rng.uniform() < 0.5:
                vx, vy = sign * speed, cross
            else:
                vx, vy = cross, sign * speed
            half = size / 2.0
            margin = 2.0
            x_lo = margin + half + max(-vx * t_lo, 0.0, -vx * t_hi)
            x_hi = width - 1 - margin - half - max(vx * t_hi, 0.0, vx * t_lo)
            y_lo = margin + half + max(-vy * t_lo, 0.0, -vy * t_hi)
            y_hi = height - 1 - margin - half - max(vy * t_hi, 0.0, vy * t_lo)
            if x_hi < x_lo or y_hi < y_lo:
                continue
            cx = float(rng.integers(int(math.ceil(x_lo)), int(math.floor(x_hi)) + 1))
            cy = float(rng.integers(int(math.ceil(y_lo)), int(math.floor(y_hi)) + 1))
            box = (
                cx + min(vx * t_lo, vx * t_hi) - half - 2,
                cx + max(vx * t_lo, vx * t_hi) + half + 2,
                cy + min(vy * t_lo, vy * t_hi) - half - 2,
                cy + max(vy * t_lo, vy * t_hi) + half + 2,
            )
            clash = any(
                box[0] < b[1] and b[0] < box[1] and box[2] < b[3] and b[2] < box[3]
                for b in boxes
            )
            if clash:
                continue
            boxes.append(box)
            sprites.append(
                Sprite(
                    shape="rect" if rng.uniform() < 0.5 else "disk",
                    size=size,
                    center=(cx, cy),
                    velocity=(vx, vy),
                    depth=k,
                    texture_seed=int(rng.integers(0, 2**31)),
                    texture_cell=int(rng.integers(3, 6)),
                )
            )
            break
        else:
            raise InvalidInputError(
                f"could not place sprite {k} in a {width}x{height} scene"
            )
    return SyntheticScene(
        width=width,
        height=height,
        background_seed=bg_seed,
        sprites=tuple(sprites),
    )


def make_translating_scene(seed: int, **kwargs) -> SyntheticScene:
    """Single moving sprite over a static background; the standard oracle."""
    return make_scene(seed, n_sprites=1, **kwargs)

"""File formats and dataset layout.

Images travel as 8-bit non-interlaced PNG (gray or RGB); reading maps
sample values to v/255 and writing rounds half-up, so a write/read trip
moves any pixel by at most 1/510. Flow fields travel in the common
little-endian .flo layout: a float32 magic, int32 width and height, then
row-major interleaved (dx, dy) float32 pairs — byte-exact round trips.

A dataset is a directory of triplet folders, each holding im1/im2/im3
plus optional f01.flo / f10.flo between the two input frames; which
frame is the target is a property of the task role, not of the files.
A manifest is JSON-lines, one record per triplet.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PilImage

from .errors import (
    InvalidInputError,
    MalformedHeaderError,
    MissingFileError,
    TruncatedFileError,
    UnsupportedImageError,
    WrongMagicError,
)
from .flow_ops import validate_flow
from .images import validate_image
from .scenegen import ROLE_TIMES, ROLES

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_FLO_MAGIC = 202021.25

ROLE_FILES = {
    # (i0, i1, target) filenames per role
    "interp": ("im1.png", "im3.png", "im2.png"),
    "next-pred": ("im1.png", "im2.png", "im3.png"),
    "prev-pred": ("im2.png", "im3.png", "im1.png"),
}
FLOW_FILES = ("f01.flo", "f10.flo")


def _png_header(path: Path) -> tuple[int, int, int, int, int]:
    """Parse (width, height, bit_depth, color_type, interlace) from IHDR."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(33)
    except FileNotFoundError:
        raise MissingFileError(f"no such file: {path}") from None
    if len(head) < 33 or head[:8] != _PNG_SIGNATURE or head[12:16] != b"IHDR":
        raise MalformedHeaderError(f"{path} is not a PNG (bad signature or IHDR)")
    w, h = struct.unpack(">II", head[16:24])
    bit_depth, color_type, _, _, interlace = struct.unpack("BBBBB", head[24:29])
    return w, h, bit_depth, color_type, interlace


def _check_png_variant(path: Path) -> tuple[int, int]:
    w, h, bit_depth, color_type, interlace = _png_header(path)
    if bit_depth != 8:
        raise UnsupportedImageError(f"{path}: {bit_depth}-bit PNG; only 8-bit is supported")
    if interlace != 0:
        raise UnsupportedImageError(f"{path}: interlaced PNG is not supported")
    if color_type not in (0, 2):
        raise UnsupportedImageError(
            f"{path}: PNG color type {color_type}; only grayscale (0) and RGB (2) are supported"
        )
    return w, h


def read_image(path: str | Path) -> np.ndarray:
    """Load a PNG as float64 in [0, 1], shaped (H, W) or (H, W, 3)."""
    path = Path(path)
    _check_png_variant(path)
    with PilImage.open(path) as im:
        arr = np.asarray(im)
    return arr.astype(np.float64) / 255.0


def write_image(path: str | Path, image: np.ndarray) -> None:
    """Store an image as 8-bit PNG, rounding half-up to sample values."""
    image = validate_image(image)
    if float(image.min()) < 0.0 or float(image.max()) > 1.0:
        raise InvalidInputError("image values must lie in [0, 1] to be written")
    quant = np.floor(image * 255.0 + 0.5).astype(np.uint8)
    if quant.ndim == 3 and quant.shape[2] == 1:
        quant = quant[..., 0]
    mode = "L" if quant.ndim == 2 else "RGB"
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    PilImage.fromarray(quant, mode=mode).save(path, format="PNG")


def read_flo(path: str | Path) -> np.ndarray:
    """Load a .flo flow field as float64, shape (H, W, 2)."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise MissingFileError(f"no such file: {path}") from None
    if len(data) < 12:
        raise MalformedHeaderError(f"{path}: too short for a flow header")
    (magic,) = struct.unpack("<f", data[:4])
    if magic != _FLO_MAGIC:
        raise WrongMagicError(f"{path}: magic {magic!r} != {_FLO_MAGIC}")
    w, h = struct.unpack("<ii", data[4:12])
    if w < 1 or h < 1 or w > 10**5 or h > 10**5:
        raise MalformedHeaderError(f"{path}: implausible dims {w}x{h}")
    expected = 12 + w * h * 2 * 4
    if len(data) < expected:
        raise TruncatedFileError(
            f"{path}: payload holds {len(data) - 12} bytes, header promises {expected - 12}"
        )
    if len(data) > expected:
        raise MalformedHeaderError(f"{path}: {len(data) - expected} trailing bytes")
    flow = np.frombuffer(data, dtype="<f4", count=w * h * 2, offset=12)
    return flow.reshape(h, w, 2).astype(np.float64)


def write_flo(path: str | Path, flow: np.ndarray) -> None:
    """Store a flow field as .flo (float32; values are cast if needed)."""
    flow = validate_flow(flow)
    h, w = flow.shape[:2]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<f", _FLO_MAGIC))
        fh.write(struct.pack("<ii", w, h))
        fh.write(flow.astype("<f4").tobytes())


@dataclass(frozen=True)
class TripletRecord:
    """One evaluation item: where its frames live and what to synthesize."""

    directory: Path
    role: str
    i0_path: Path
    i1_path: Path
    target_path: Path
    t: float
    flow01_path: Path | None = None
    flow10_path: Path | None = None


@dataclass
class ScanResult:
    records: list[TripletRecord]
    warnings: list[str]


def _triplet_record(directory: Path, role: str, t: float | None = None) -> TripletRecord:
    if role not in ROLES:
        raise InvalidInputError(f"unknown role {role!r}; expected one of {ROLES}")
    n0, n1, nt = ROLE_FILES[role]
    f01 = directory / FLOW_FILES[0]
    f10 = directory / FLOW_FILES[1]
    has_flows = f01.is_file() and f10.is_file()
    return TripletRecord(
        directory=directory,
        role=role,
        i0_path=directory / n0,
        i1_path=directory / n1,
        target_path=directory / nt,
        t=ROLE_TIMES[role] if t is None else float(t),
        flow01_path=f01 if has_flows else None,
        flow10_path=f10 if has_flows else None,
    )


def _validate_triplet(record: TripletRecord) -> None:
    dims = set()
    for p in (record.i0_path, record.i1_path, record.target_path):
        if not p.is_file():
            raise MissingFileError(f"no such file: {p}")
        dims.add(_check_png_variant(p))
    if len(dims) != 1:
        raise InvalidInputError(f"{record.directory}: frame dimensions differ: {sorted(dims)}")
    if record.flow01_path is not None:
        w, h = dims.pop()
        for p in (record.flow01_path, record.flow10_path):
            flow = read_flo(p)
            if flow.shape[:2] != (h, w):
                raise InvalidInputError(
                    f"{p}: flow dims {flow.shape[1]}x{flow.shape[0]} != frames {w}x{h}"
                )


def scan_dataset(root: str | Path, role: str) -> ScanResult:
    """Collect triplet folders under a root, lexicographically ordered.

    Folders that do not form a valid triplet (missing frames, rejected
    PNG variants, mismatched dimensions, broken flow files) are skipped,
    one warning string each.
    """
    root = Path(root)
    if role not in ROLES:
        raise InvalidInputError(f"unknown role {role!r}; expected one of {ROLES}")
    if not root.is_dir():
        raise MissingFileError(f"no such directory: {root}")
    records: list[TripletRecord] = []
    warnings: list[str] = []
    for directory in sorted(p for p in root.iterdir() if p.is_dir()):
        record = _triplet_record(directory, role)
        try:
            _validate_triplet(record)
        except (InvalidInputError, MissingFileError, MalformedHeaderError,
                UnsupportedImageError, WrongMagicError, TruncatedFileError) as exc:
            warnings.append(f"{directory.name}: {exc}")
            continue
        records.append(record)
    return ScanResult(records=records, warnings=warnings)


def write_manifest(path: str | Path, records: list[TripletRecord]) -> None:
    """Write records as JSON lines with directories relative to the manifest."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    base = path.parent.resolve()
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            entry = {
                "dir": _relative_or_absolute(rec.directory, base),
                "role": rec.role,
            }
            if rec.t != ROLE_TIMES[rec.role]:
                entry["t"] = rec.t
            fh.write(json.dumps(entry) + "\n")


def _relative_or_absolute(directory: Path, base: Path) -> str:
    try:
        return str(directory.resolve().relative_to(base))
    except ValueError:
        return str(directory.resolve())


def read_manifest(path: str | Path) -> list[TripletRecord]:
    """Parse a JSON-lines manifest into triplet records.

    Each line needs "dir" and "role"; "t" optionally overrides the
    role's default target time. Directories resolve relative to the
    manifest's folder. File existence is checked at use, not here.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise MissingFileError(f"no such file: {path}") from None
    base = path.parent
    records = []
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedHeaderError(f"{path}:{ln}: not valid JSON ({exc})") from None
        if not isinstance(entry, dict) or "dir" not in entry or "role" not in entry:
            raise MalformedHeaderError(f'{path}:{ln}: record needs "dir" and "role"')
        role = entry["role"]
        if role not in ROLES:
            raise MalformedHeaderError(f"{path}:{ln}: unknown role {role!r}")
        t = entry.get("t")
        if t is not None and not isinstance(t, (int, float)):
            raise MalformedHeaderError(f"{path}:{ln}: t must be a number")
        directory = Path(entry["dir"])
        if not directory.is_absolute():
            directory = base / directory
        records.append(_triplet_record(directory, role, t))
    return records

"""Command-line front end.

Thin shell over the library: every behavior reachable here is reachable
through the Python API. Subcommands: synth (one frame), sweep (a list of
target times), eval (a manifest of triplets), gen-scenes (synthetic
datasets), bench (timing).

Exit codes: 0 success, 2 invalid arguments or configuration, 3 file I/O
failure, 4 engine failure. Failures emit one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    DatasetIoError,
    FrameSynthError,
    InvalidConfigurationError,
    InvalidInputError,
)
from .flow_est import ClassicalParams, EstimatorSpec, FixedFlows
from .io import (
    FLOW_FILES,
    ROLE_FILES,
    TripletRecord,
    read_flo,
    read_image,
    read_manifest,
    write_flo,
    write_image,
    write_manifest,
)
from .metrics import psnr, ssim
from .pyramid import SynthesisOptions, SynthesisRequest, SynthesisResult, synthesize
from .scenegen import ROLES, analytic_flow, make_scene, make_triplet, render

SEED_ENV_VAR = "UNIVIP_SEED"
REPORT_SCHEMA = "anyframe-report/1"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep argparse from exiting on its own
        raise _UsageError(message)


def _fail(code: int, kind: str, detail: str) -> int:
    print(json.dumps({"error": kind, "detail": detail}), file=sys.stderr)
    return code


def parse_times(text: str) -> list[Decimal]:
    """Expand a time list: comma-separated scalars and start:stop:step
    ranges, all parsed as exact decimals; range endpoints are inclusive."""
    out: list[Decimal] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            raise _UsageError(f"empty time token in {text!r}")
        parts = token.split(":")
        try:
            if len(parts) == 1:
                out.append(Decimal(parts[0]))
                continue
            if len(parts) != 3:
                raise _UsageError(f"time range {token!r} is not start:stop:step")
            start, stop, step = (Decimal(p) for p in parts)
        except InvalidOperation:
            raise _UsageError(f"cannot parse {token!r} as decimal times") from None
        if step == 0:
            raise _UsageError(f"time range {token!r} has zero step")
        span = stop - start
        if (span > 0 and step < 0) or (span < 0 and step > 0):
            raise _UsageError(f"time range {token!r} steps away from its stop")
        v = start
        if step > 0:
            while v <= stop:
                out.append(v)
                v += step
        else:
            while v >= stop:
                out.append(v)
                v += step
    if not out:
        raise _UsageError(f"time list {text!r} expands to nothing")
    return out


def format_time_tag(t: Decimal) -> str:
    """Canonical file tag for a target time: t_2.5, t_-0.25, t_4."""
    return "t_" + format(t.normalize(), "f")


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w_s, h_s = text.lower().split("x")
        w, h = int(w_s), int(h_s)
    except ValueError:
        raise _UsageError(f"size {text!r} is not WxH") from None
    if w < 1 or h < 1:
        raise _UsageError(f"size {text!r} must be positive")
    return w, h


def _seed_from_env(default: int) -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"{SEED_ENV_VAR}={raw!r} is not an integer") from None


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--estimator", choices=["gt", "classical"], default="classical",
                   help="flow source: ground-truth files or classical estimation")
    p.add_argument("--window", type=int, default=9,
                   help="classical estimator window size (odd)")
    p.add_argument("--iters", type=int, default=5,
                   help="classical estimator iterations per level")
    p.add_argument("--levels", type=int, default=None,
                   help="pyramid depth override (default: automatic)")
    p.add_argument("--no-convert", action="store_true",
                   help="synthesize t < 0 directly instead of swapping inputs")
    p.add_argument("--no-temporal-factor", action="store_true",
                   help="fuse with constant 0.5/0.5 weights")
    p.add_argument("--no-fill", action="store_true",
                   help="leave unfillable pixels at 0 instead of diffusing")


def _options_from(args) -> SynthesisOptions:
    return SynthesisOptions(
        fill_holes=not args.no_fill,
        convert_backward=not args.no_convert,
        temporal_factor=not args.no_temporal_factor,
    )


def _estimator_from(args, flows: FixedFlows | None) -> EstimatorSpec:
    params = ClassicalParams(window=args.window, iterations=args.iters)
    if args.estimator == "gt":
        if flows is None:
            raise InvalidConfigurationError(
                "gt estimator needs flow files (--flow01/--flow10 or f01.flo/f10.flo "
                "next to the first input)"
            )
        return EstimatorSpec(kind="gt", params=params, truth=flows)
    return EstimatorSpec(kind="classical", params=params)


def _load_flow_pair(args, i0_path: Path) -> FixedFlows | None:
    p01 = Path(args.flow01) if getattr(args, "flow01", None) else i0_path.parent / FLOW_FILES[0]
    p10 = Path(args.flow10) if getattr(args, "flow10", None) else i0_path.parent / FLOW_FILES[1]
    explicit = getattr(args, "flow01", None) or getattr(args, "flow10", None)
    if not explicit and not (p01.is_file() and p10.is_file()):
        return None
    return FixedFlows(read_flo(p01), read_flo(p10))


def _dump_diagnostics(outdir: Path, res: SynthesisResult) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    write_flo(outdir / "f0t.flo", res.f0t)
    write_flo(outdir / "f1t.flo", res.f1t)
    write_flo(outdir / "f01.flo", res.f01)
    write_flo(outdir / "f10.flo", res.f10)
    write_image(outdir / "coverage0.png", np.clip(res.coverage0, 0.0, 1.0))
    write_image(outdir / "coverage1.png", np.clip(res.coverage1, 0.0, 1.0))
    write_image(outdir / "holes0.png", res.holes0.astype(np.float64))
    write_image(outdir / "holes1.png", res.holes1.astype(np.float64))
    write_image(outdir / "unfillable.png", res.unfillable.astype(np.float64))
    write_image(outdir / "task_channel.png", res.task_channel)
    with open(outdir / "levels.jsonl", "w", encoding="utf-8") as fh:
        for d in res.levels:
            fh.write(json.dumps({
                "level": d.level, "h": d.h, "w": d.w, "hole_iou": d.hole_iou,
                "task_value": d.task_value, "epe01": d.epe01, "millis": d.millis,
            }) + "\n")


def _report_header(command: str, extra: dict) -> dict:
    return {"schema": REPORT_SCHEMA, "version": __version__, "command": command, **extra}


_AGG_FIELDS = ("psnr_db", "psnr_valid_db", "ssim", "epe01", "hole_iou", "millis")


def _aggregate(items: list[dict]) -> dict:
    agg: dict = {"count": len(items)}
    for f in _AGG_FIELDS:
        vals = [it[f] for it in items if it.get(f) is not None]
        agg[f] = float(np.mean(vals)) if vals else None
    return agg


def _write_report(path: str | None, header: dict, items: list[dict], footer: dict) -> None:
    if path is None:
        return
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for it in items:
            fh.write(json.dumps(it) + "\n")
        fh.write(json.dumps(footer) + "\n")


def _cmd_synth(args) -> int:
    i0_path = Path(args.i0)
    i0 = read_image(i0_path)
    i1 = read_image(args.i1)
    times = parse_times(args.t)
    if len(times) != 1:
        raise _UsageError("--t takes a single time; use the sweep command for lists")
    flows = _load_flow_pair(args, i0_path)
    req = SynthesisRequest(
        i0=i0, i1=i1, t=float(times[0]),
        estimator=_estimator_from(args, flows),
        levels=args.levels,
        options=_options_from(args),
        epe_reference=flows,
    )
    res = synthesize(req)
    write_image(args.out, res.image)
    if args.dump_diagnostics:
        _dump_diagnostics(Path(args.dump_diagnostics), res)
    finest = res.levels[-1]
    print(f"synth: t={res.requested_t:g} task={res.task.value} "
          f"levels={len(res.levels)} hole_iou={finest.hole_iou:.4f} -> {args.out}")
    return 0


def _sweep_item(args, i0, i1, flows, idx: int, t: Decimal, outdir: Path,
                truth_dir: Path | None) -> dict:
    req = SynthesisRequest(
        i0=i0, i1=i1, t=float(t),
        estimator=_estimator_from(args, flows),
        levels=args.levels,
        options=_options_from(args),
        epe_reference=flows,
    )
    started = time.perf_counter()
    res = synthesize(req)
    millis = (time.perf_counter() - started) * 1000.0
    tag = format_time_tag(t)
    out_path = outdir / f"{tag}.png"
    write_image(out_path, res.image)
    item = {
        "item": idx, "t": str(t), "out": out_path.name,
        "task": res.task.value, "hole_iou": res.levels[-1].hole_iou,
        "epe01": res.levels[-1].epe01, "millis": millis,
        "psnr_db": None, "psnr_valid_db": None, "ssim": None,
    }
    if truth_dir is not None:
        truth = read_image(truth_dir / f"{tag}.png")
        item["psnr_db"] = psnr(res.image, truth)
        item["psnr_valid_db"] = psnr(res.image, truth, ~res.unfillable)
        item["ssim"] = ssim(res.image, truth)
    return item


def _cmd_sweep(args) -> int:
    i0_path = Path(args.i0)
    i0 = read_image(i0_path)
    i1 = read_image(args.i1)
    times = parse_times(args.times)
    flows = _load_flow_pair(args, i0_path)
    if args.estimator == "gt":
        _estimator_from(args, flows)  # fail fast before writing anything
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    truth_dir = Path(args.truth_dir) if args.truth_dir else None
    items = [
        _sweep_item(args, i0, i1, flows, idx, t, outdir, truth_dir)
        for idx, t in enumerate(times)
    ]
    agg = _aggregate(items)
    _write_report(args.report, _report_header("sweep", {
        "i0": str(args.i0), "i1": str(args.i1), "times": args.times,
        "estimator": args.estimator,
    }), items, {"aggregate": agg})
    mean_psnr = agg["psnr_db"]
    psnr_note = f" mean_psnr={mean_psnr:.2f}dB" if mean_psnr is not None else ""
    print(f"sweep: {len(items)} frames -> {outdir}{psnr_note}")
    return 0


def _eval_record(args, idx: int, rec: TripletRecord) -> dict:
    i0 = read_image(rec.i0_path)
    i1 = read_image(rec.i1_path)
    target = read_image(rec.target_path)
    flows = None
    if rec.flow01_path is not None:
        flows = FixedFlows(read_flo(rec.flow01_path), read_flo(rec.flow10_path))
    req = SynthesisRequest(
        i0=i0, i1=i1, t=rec.t,
        estimator=_estimator_from(args, flows),
        levels=args.levels,
        options=_options_from(args),
        epe_reference=flows,
    )
    started = time.perf_counter()
    res = synthesize(req)
    millis = (time.perf_counter() - started) * 1000.0
    return {
        "item": idx,
        "dir": rec.directory.name,
        "role": rec.role,
        "t": rec.t,
        "psnr_db": psnr(res.image, target),
        "psnr_valid_db": psnr(res.image, target, ~res.unfillable),
        "ssim": ssim(res.image, target),
        "epe01": res.levels[-1].epe01,
        "hole_iou": res.levels[-1].hole_iou,
        "millis": millis,
    }


def _cmd_eval(args) -> int:
    records = read_manifest(args.manifest)
    if not records:
        raise _UsageError(f"manifest {args.manifest} has no records")
    if args.jobs < 1:
        raise _UsageError(f"--jobs must be >= 1, got {args.jobs}")
    if args.jobs == 1:
        items = [_eval_record(args, i, r) for i, r in enumerate(records)]
    else:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            items = list(pool.map(
                lambda ir: _eval_record(args, *ir), enumerate(records)
            ))
    agg = _aggregate(items)
    per_role: dict[str, dict] = {}
    for role in sorted({it["role"] for it in items}):
        per_role[role] = _aggregate([it for it in items if it["role"] == role])
    _write_report(args.report, _report_header("eval", {
        "manifest": str(args.manifest), "estimator": args.estimator, "jobs": args.jobs,
    }), items, {"aggregate": agg, "per_role": per_role})
    print(f"eval: {agg['count']} items mean_psnr={agg['psnr_db']:.2f}dB "
          f"mean_ssim={agg['ssim']:.4f}" )
    return 0


def _cmd_gen_scenes(args) -> int:
    seed = _seed_from_env(args.seed)
    roles = [r.strip() for r in args.roles.split(",")] if args.roles else list(ROLES)
    for role in roles:
        if role not in ROLES:
            raise _UsageError(f"unknown role {role!r}; expected from {ROLES}")
    w, h = _parse_size(args.size)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    sweep_times = parse_times(args.sweep_times) if args.sweep_times else None
    records = []
    for i in range(args.count):
        scene = make_scene([seed, i], width=w, height=h, n_sprites=args.sprites)
        f01 = analytic_flow(scene, 0.0, 1.0)
        f10 = analytic_flow(scene, 1.0, 0.0)
        for role in roles:
            d = outdir / f"scene_{i:04d}_{role}"
            i0, i1, target, t = make_triplet(scene, role)
            n0, n1, nt = ROLE_FILES[role]
            write_image(d / n0, i0)
            write_image(d / n1, i1)
            write_image(d / nt, target)
            write_flo(d / FLOW_FILES[0], f01)
            write_flo(d / FLOW_FILES[1], f10)
            records.append(TripletRecord(
                directory=d, role=role, i0_path=d / n0, i1_path=d / n1,
                target_path=d / nt, t=t,
                flow01_path=d / FLOW_FILES[0], flow10_path=d / FLOW_FILES[1],
            ))
        if sweep_times is not None:
            sweep_dir = outdir / f"scene_{i:04d}_sweep"
            for t in sweep_times:
                write_image(sweep_dir / f"{format_time_tag(t)}.png", render(scene, float(t)))
    write_manifest(outdir / "manifest.jsonl", records)
    print(f"gen-scenes: {args.count} scenes x {len(roles)} roles -> {outdir} "
          f"(seed {seed})")
    return 0


def _cmd_bench(args) -> int:
    seed = _seed_from_env(args.seed)
    w, h = _parse_size(args.size)
    scene = make_scene([seed], width=w, height=h)
    i0 = render(scene, 0.0)
    i1 = render(scene, 1.0)
    times = parse_times(args.t)
    if len(times) != 1:
        raise _UsageError("--t takes a single time for bench")
    t = float(times[0])
    flows = FixedFlows(analytic_flow(scene, 0.0, 1.0), analytic_flow(scene, 1.0, 0.0))
    spec = _estimator_from(args, flows)
    items = []
    for i in range(args.iters_bench):
        started = time.perf_counter()
        synthesize(SynthesisRequest(
            i0=i0, i1=i1, t=t, estimator=spec,
            levels=args.levels, options=_options_from(args),
        ))
        items.append({"iter": i, "millis": (time.perf_counter() - started) * 1000.0})
    vals = [it["millis"] for it in items]
    mean = statistics.fmean(vals)
    stddev = statistics.stdev(vals) if len(vals) > 1 else 0.0
    footer = {"aggregate": {"count": len(vals), "mean_millis": mean,
                            "stddev_millis": stddev, "size": f"{w}x{h}"}}
    _write_report(args.report, _report_header("bench", {
        "size": f"{w}x{h}", "estimator": args.estimator, "t": args.t,
    }), items, footer)
    print(f"bench: {w}x{h} {args.estimator} mean={mean:.1f}ms stddev={stddev:.1f}ms "
          f"over {len(vals)} runs")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="anyframe",
                     description="Synthesize video frames at arbitrary target times.")
    parser.add_argument("--version", action="version", version=f"anyframe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize one frame",
                       description="Synthesize the frame at one target time.")
    p.add_argument("--i0", required=True, help="first input frame (PNG)")
    p.add_argument("--i1", required=True, help="second input frame (PNG)")
    p.add_argument("--t", required=True, help="target time (0 and 1 are the inputs)")
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--flow01", help=".flo file with the 0->1 flow (gt estimator)")
    p.add_argument("--flow10", help=".flo file with the 1->0 flow (gt estimator)")
    p.add_argument("--dump-diagnostics", metavar="DIR",
                   help="write flows, coverage, and masks next to the output")
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("sweep", help="synthesize a list of times",
                       description="Synthesize frames over a list of target times.")
    p.add_argument("--i0", required=True)
    p.add_argument("--i1", required=True)
    p.add_argument("--times", required=True,
                   help="comma list of times and inclusive start:stop:step ranges")
    p.add_argument("--outdir", required=True)
    p.add_argument("--flow01")
    p.add_argument("--flow10")
    p.add_argument("--truth-dir", help="directory of t_<time>.png reference renders")
    p.add_argument("--report", help="write a JSON-lines report here")
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("eval", help="evaluate triplets from a manifest",
                       description="Synthesize and score every manifest record.")
    p.add_argument("--manifest", required=True)
    p.add_argument("--report", help="write a JSON-lines report here")
    p.add_argument("--jobs", type=int, default=1, help="concurrent records")
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("gen-scenes", help="generate synthetic triplet datasets",
                       description="Write synthetic scenes as triplet folders "
                                   "with analytic flows and a manifest.")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--size", default="96x96", help="scene size WxH")
    p.add_argument("--sprites", type=int, default=1)
    p.add_argument("--seed", type=int, default=0,
                   help=f"base seed ({SEED_ENV_VAR} env var overrides)")
    p.add_argument("--roles", help=f"comma list from {','.join(ROLES)} (default all)")
    p.add_argument("--sweep-times",
                   help="also render truth frames at these times per scene")
    p.set_defaults(func=_cmd_gen_scenes)

    p = sub.add_parser("bench", help="time the synthesis pipeline",
                       description="Repeatedly synthesize one frame of a seeded "
                                   "scene and report wall time.")
    p.add_argument("--size", default="640x480")
    p.add_argument("--iters-bench", type=int, default=5, metavar="N",
                   dest="iters_bench", help="benchmark repetitions")
    p.add_argument("--t", default="0.5")
    p.add_argument("--seed", type=int, default=0,
                   help=f"scene seed ({SEED_ENV_VAR} env var overrides)")
    p.add_argument("--report", help="write a JSON-lines report here")
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        return _fail(2, "invalid-arguments", str(exc))
    except (InvalidInputError, InvalidConfigurationError) as exc:
        return _fail(2, "invalid-input", str(exc))
    except DatasetIoError as exc:
        return _fail(3, "io-failure", str(exc))
    except FrameSynthError as exc:
        return _fail(4, "engine-failure", str(exc))
    except OSError as exc:
        return _fail(3, "io-failure", str(exc))


if __name__ == "__main__":
    sys.exit(main())

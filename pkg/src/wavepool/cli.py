"""Command-line entry point.

Subcommands: transform, train, eval, count, alias, consistency.  Every
command writes a MetricsReport as CSV + JSON into the output directory,
with the config hash embedded in the file names; reruns overwrite rather
than append, so a command is idempotent for fixed inputs.  Dataset paths
in configs may be relative to ``--data-dir`` or the ``WAVEPOOL_DATA_DIR``
environment variable.  Any domain error prints to standard error and
exits nonzero.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys

import numpy as np

from . import backbone as bb
from .analysis import (
    MetricsReport,
    alias_energy_sweep,
    evaluate,
    load_dataset,
    build_model_from_config,
    run_experiment,
    shift_consistency,
)
from .config import config_hash, load_config
from .errors import WavepoolError
from .filterbank import parse_wavelet
from .imageio import read_image, write_pgm
from .pooling import parse_pool
from .transforms import dwt2d, reconstruct_lowpass


def _data_dir(args) -> str:
    return args.data_dir or os.environ.get("WAVEPOOL_DATA_DIR", "")


# ---------------------------------------------------------------------------
# transform


def cmd_transform(args) -> int:
    image = read_image(args.input)
    if image.ndim == 3:
        image = image.mean(axis=0)  # PPM: transform the channel mean
    spec = parse_wavelet(args.wavelet)
    bands = dwt2d(image, spec)
    os.makedirs(args.outdir, exist_ok=True)

    summary = {"wavelet": spec.name, "input": list(image.shape), "subbands": {}}
    total = 0.0
    named = {"ll": bands.ll, "lh": bands.lh, "hl": bands.hl, "hh": bands.hh}
    for name, band in named.items():
        total += float(np.sum(band**2))
    for name, band in named.items():
        lo, hi = float(band.min()), float(band.max())
        scale = hi - lo
        normalized = (band - lo) / scale if scale > 0 else np.zeros_like(band)
        write_pgm(os.path.join(args.outdir, f"{name}.pgm"), normalized, maxval=65535)
        energy = float(np.sum(band**2))
        summary["subbands"][name] = {
            "min": lo,
            "max": hi,
            "energy": energy,
            "energy_fraction": energy / total if total > 0 else 0.0,
        }
    lowpass = reconstruct_lowpass(image, spec)
    write_pgm(os.path.join(args.outdir, "lowpass.pgm"), np.clip(lowpass, 0, 1))
    with open(os.path.join(args.outdir, "energy.json"), "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote ll/lh/hl/hh.pgm, lowpass.pgm, energy.json to {args.outdir}")
    return 0


# ---------------------------------------------------------------------------
# train / eval


def _train_one(config_path: str, data_dir: str) -> str:
    cfg = load_config(config_path)
    digest = config_hash(cfg)
    outdir = cfg.output.dir
    ckpt_dir = os.path.join(outdir, f"run_{digest}", "checkpoints")
    report = run_experiment(cfg, data_dir=data_dir, checkpoint_dir=ckpt_dir)
    csv_path, _ = report.write(outdir, f"metrics_{digest}")
    return csv_path


def cmd_train(args) -> int:
    data_dir = _data_dir(args)
    if args.jobs > 1 and len(args.configs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_train_one, c, data_dir) for c in args.configs]
            for future in futures:
                print(f"wrote {future.result()}")
    else:
        for config_path in args.configs:
            print(f"wrote {_train_one(config_path, data_dir)}")
    return 0


def cmd_eval(args) -> int:
    cfg = load_config(args.config)
    data_dir = _data_dir(args)
    train_set = load_dataset(cfg, "train", data_dir)
    test_set = load_dataset(cfg, "test", data_dir)
    model = build_model_from_config(cfg, train_set.class_count, train_set)
    bb.load_checkpoint(model, args.checkpoint)
    loss, acc = evaluate(model, test_set)
    report = MetricsReport(
        metadata={"config_hash": config_hash(cfg), "checkpoint": args.checkpoint}
    )
    report.add("test_loss", loss, "nats")
    report.add("test_accuracy", acc, "fraction")
    csv_path, _ = report.write(cfg.output.dir, f"eval_{config_hash(cfg)}")
    print(f"wrote {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# count / alias / consistency


def cmd_count(args) -> int:
    cfg = load_config(args.config)
    model = build_model_from_config(cfg, num_classes=max(cfg.dataset.classes, 2))
    h = args.height or cfg.dataset.image_size
    w = args.width or cfg.dataset.image_size
    report = MetricsReport(metadata={"config_hash": config_hash(cfg)})
    report.add("param_count", bb.count_params(model), "params")
    report.add("flop_count", bb.count_flops(model, h, w), f"flops@{h}x{w}")
    csv_path, _ = report.write(cfg.output.dir, f"count_{config_hash(cfg)}")
    print(f"wrote {csv_path}")
    return 0


def _parse_freqs(text: str) -> list[float]:
    return [float(tok) * np.pi for tok in text.split(",") if tok.strip()]


def cmd_alias(args) -> int:
    kind = parse_pool(args.pool)
    report = alias_energy_sweep(kind, _parse_freqs(args.freqs))
    slug = kind.config_string().replace(":", "_").replace(".", "p")
    csv_path, _ = report.write(args.outdir, f"alias_{slug}")
    print(f"wrote {csv_path}")
    return 0


def cmd_consistency(args) -> int:
    cfg = load_config(args.config)
    data_dir = _data_dir(args)
    train_set = load_dataset(cfg, "train", data_dir)
    test_set = load_dataset(cfg, "test", data_dir)
    model = build_model_from_config(cfg, train_set.class_count, train_set)
    bb.load_checkpoint(model, args.checkpoint)
    report = shift_consistency(model, test_set, args.max_shift, args.samples)
    report.metadata["config_hash"] = config_hash(cfg)
    report.metadata["pool"] = cfg.model.pool
    csv_path, _ = report.write(cfg.output.dir, f"consistency_{config_hash(cfg)}")
    print(f"wrote {csv_path}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavepool",
        description="Wavelet-based anti-aliased down-sampling: transforms, "
        "training experiments, and aliasing reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="decompose an image into subbands")
    p.add_argument("input", help="binary PGM/PPM file")
    p.add_argument("--wavelet", default="haar")
    p.add_argument("--outdir", default="transform_out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("train", help="train models from config files")
    p.add_argument("configs", nargs="+", help="experiment config file(s)")
    p.add_argument("--jobs", type=int, default=1, help="parallel configs")
    p.add_argument("--data-dir", default="", help="dataset root override")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on the test split")
    p.add_argument("config")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data-dir", default="")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("count", help="parameter and FLOP counters")
    p.add_argument("config")
    p.add_argument("--height", type=int, default=0)
    p.add_argument("--width", type=int, default=0)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("alias", help="alias energy sweep for one pool kind")
    p.add_argument("pool", help='pool string, e.g. "wavelet:haar" or "max"')
    p.add_argument("--freqs", default="0.25,0.5,0.75,1.0",
                   help="comma list in units of pi")
    p.add_argument("--outdir", default="alias_out")
    p.set_defaults(func=cmd_alias)

    p = sub.add_parser("consistency", help="shift-consistency of a checkpoint")
    p.add_argument("config")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--max-shift", type=int, default=4)
    p.add_argument("--samples", type=int, default=0, help="0 = full test set")
    p.add_argument("--data-dir", default="")
    p.set_defaults(func=cmd_consistency)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except WavepoolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

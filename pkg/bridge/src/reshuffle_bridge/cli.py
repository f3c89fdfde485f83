"""Bridge CLI: corpus generation, extraction, decoder training, and the
decode verb that implements the engine's external decoder protocol."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import torch

from .corpus import save_image, write_corpus
from .decoder import MissingStageError, decode_span, train_stage
from .extract import ExtractionSpec, extract
from .vgg import DEFAULT_SEED, load_or_init_encoder


def cmd_make_corpus(args) -> int:
    paths = write_corpus(args.out_dir, count=args.count, size=args.size, seed=args.seed)
    print(f"wrote {len(paths)} images to {args.out_dir}")
    return 0


def cmd_init_encoder(args) -> int:
    load_or_init_encoder(args.ckpt_dir, seed=args.seed)
    print(f"encoder ready in {args.ckpt_dir}")
    return 0


def cmd_extract(args) -> int:
    manifest = extract(ExtractionSpec(image_path=args.image, manifest_path=args.manifest,
                                      ckpt_dir=args.ckpt))
    print(str(manifest))
    return 0


def cmd_train(args) -> int:
    log: list[float] = []
    path = train_stage(args.corpus, args.stage, args.ckpt, steps=args.steps,
                       batch_size=args.batch_size, lr=args.lr, seed=args.seed,
                       limit=args.limit, log=log)
    first = sum(log[:10]) / max(1, len(log[:10]))
    last = sum(log[-10:]) / max(1, len(log[-10:]))
    print(f"stage {args.stage}: loss {first:.5f} -> {last:.5f}, saved {path}")
    return 0


def cmd_decode(args) -> int:
    features = np.load(args.infile)
    if features.ndim != 3:
        raise ValueError(f"{args.infile}: expected a 3-axis feature tensor, got {features.shape}")
    out = decode_span(args.ckpt, torch.from_numpy(features.astype(np.float32))[None],
                      args.from_layer, args.to_layer)
    result = out[0].numpy()
    if not np.isfinite(result).all():
        raise ValueError("decoded output is not finite")
    if args.to_layer == 0:
        save_image(result, args.outfile)
    else:
        np.save(args.outfile, result.astype(np.float32))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reshuffle-bridge")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-corpus", help="generate a synthetic training corpus")
    p.add_argument("out_dir")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--size", type=int, default=48)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_make_corpus)

    p = sub.add_parser("init-encoder", help="create the fixed-seed encoder checkpoint")
    p.add_argument("ckpt_dir")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_init_encoder)

    p = sub.add_parser("extract", help="extract a feature pyramid from an image")
    p.add_argument("image")
    p.add_argument("--manifest", required=True)
    p.add_argument("--ckpt", default="checkpoints")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train one decoder stage (lower stages must exist)")
    p.add_argument("corpus")
    p.add_argument("--stage", type=int, required=True, choices=[1, 2, 3, 4])
    p.add_argument("--ckpt", default="checkpoints")
    p.add_argument("--steps", type=int, default=300)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limit", type=int, default=None,
                   help="cap the number of corpus images loaded")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("decode", help="decoder protocol: features down to a layer or image")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--from", dest="from_layer", type=int, required=True)
    p.add_argument("--to", dest="to_layer", type=int, required=True)
    p.add_argument("--ckpt", default="checkpoints")
    p.set_defaults(func=cmd_decode)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MissingStageError as exc:
        print(f"missing stage: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

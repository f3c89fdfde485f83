"""Mirrored decoder stages and their stagewise training.

Stage l learns to map the layer-l feature tap back to layer l-1 (stage 1
maps to the image). Training is bottom-up: while stage l trains, every
stage below is loaded frozen, and the loss is the sum of the image
reconstruction error through the frozen prefix and the feature
reconstruction error at layer l-1.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .corpus import load_folder
from .vgg import LAYER_CHANNELS, load_or_init_encoder


class MissingStageError(Exception):
    """A required decoder stage has not been trained yet."""


def _reflect_conv(in_ch: int, out_ch: int) -> nn.Conv2d:
    return nn.Conv2d(in_ch, out_ch, 3, padding=1, padding_mode="reflect")


def build_stage(l: int) -> nn.Module:
    """Decoder stage l: layer-l features to layer-(l-1) features (or the image)."""
    if l == 1:
        return nn.Sequential(
            _reflect_conv(64, 64), nn.ReLU(inplace=True),
            _reflect_conv(64, 3))
    in_ch = LAYER_CHANNELS[l]
    out_ch = LAYER_CHANNELS[l - 1]
    # targets are ReLU taps, so each feature head ends in a ReLU
    return nn.Sequential(
        nn.Upsample(scale_factor=2, mode="nearest"),
        _reflect_conv(in_ch, in_ch), nn.ReLU(inplace=True),
        _reflect_conv(in_ch, out_ch), nn.ReLU(inplace=True),
        _reflect_conv(out_ch, out_ch), nn.ReLU(inplace=True))


def stage_path(ckpt_dir, l: int) -> Path:
    return Path(ckpt_dir) / f"stage{l}.pt"


def load_stage(ckpt_dir, l: int, trainable: bool = False) -> nn.Module:
    path = stage_path(ckpt_dir, l)
    if not path.exists():
        raise MissingStageError(f"decoder stage {l} not trained (no {path})")
    stage = build_stage(l)
    stage.load_state_dict(torch.load(path, map_location="cpu", weights_only=True))
    stage.train(trainable)
    for p in stage.parameters():
        p.requires_grad_(trainable)
    return stage


def decode_span(ckpt_dir, features: torch.Tensor, from_layer: int, to_layer: int) -> torch.Tensor:
    """Apply stages from_layer, from_layer-1, ..., to_layer+1 (to_layer 0 = image)."""
    if not 0 <= to_layer < from_layer <= 4:
        raise ValueError(f"bad decode span {from_layer} -> {to_layer}")
    want = LAYER_CHANNELS[from_layer]
    if features.shape[1] != want:
        raise ValueError(f"layer {from_layer} features must have {want} channels, "
                         f"got {features.shape[1]}")
    out = features
    with torch.no_grad():
        for l in range(from_layer, to_layer, -1):
            out = load_stage(ckpt_dir, l)(out)
    return out


def train_stage(corpus_dir, stage: int, ckpt_dir, steps: int = 300, batch_size: int = 8,
                lr: float = 1e-3, seed: int = 0, limit: int | None = None,
                log: list | None = None) -> Path:
    """Train decoder stage `stage` on a PNG folder; stages below must exist.

    Only the new stage's parameters move; the frozen prefix is byte-stable
    on disk and in memory. Returns the checkpoint path. Per-step losses
    are appended to `log` when given.
    """
    ckpt_dir = Path(ckpt_dir)
    for l in range(1, stage):
        if not stage_path(ckpt_dir, l).exists():
            raise MissingStageError(f"train stage {l} before stage {stage}")
    encoder = load_or_init_encoder(ckpt_dir)
    prefix = [load_stage(ckpt_dir, l, trainable=False) for l in range(stage - 1, 0, -1)]

    torch.manual_seed(seed + 17 * stage)
    model = build_stage(stage)
    for m in model.modules():
        if isinstance(m, nn.Conv2d):
            nn.init.kaiming_normal_(m.weight, nonlinearity="relu")
            nn.init.zeros_(m.bias)
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    scheduler = torch.optim.lr_scheduler.StepLR(
        optimizer, step_size=max(1, int(steps * 0.4)), gamma=0.4)

    images = torch.from_numpy(load_folder(corpus_dir, limit=limit))
    rng = np.random.default_rng(seed)

    for step in range(steps):
        idx = rng.integers(0, images.shape[0], size=batch_size)
        batch = images[idx]
        with torch.no_grad():
            f_lower = batch if stage == 1 else encoder.features_to(batch, stage - 1)
            f_upper = encoder.stage(stage)(f_lower)
        recon_lower = model(f_upper)
        feat_loss = torch.mean((recon_lower - f_lower) ** 2)
        recon_image = recon_lower
        for frozen in prefix:
            recon_image = frozen(recon_image)
        img_loss = torch.mean((recon_image - batch) ** 2)
        loss = img_loss + feat_loss
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        scheduler.step()
        if log is not None:
            log.append(float(loss.detach()))

    path = stage_path(ckpt_dir, stage)
    torch.save(model.state_dict(), path)
    meta_path = ckpt_dir / "meta.json"
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    meta[f"stage{stage}"] = {"steps": steps, "batch_size": batch_size, "lr": lr, "seed": seed}
    meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    return path


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB for [0, 1] images."""
    mse = float(np.mean((np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)) ** 2))
    if mse == 0:
        return float("inf")
    return 10.0 * float(np.log10(1.0 / mse))

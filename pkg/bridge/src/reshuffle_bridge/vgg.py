"""VGG-19-shaped encoder producing the layer 1..4 feature taps.

The architecture is the VGG-19 convolutional prefix through relu4_1,
split into per-layer stages so decoder training can freeze everything
below the stage being learned. Weights come from a fixed-seed random
initialization persisted to a checkpoint; pretrained ImageNet weights
are a drop-in replacement when a weights file is available.
"""

from __future__ import annotations

from pathlib import Path

import torch
from torch import nn

LAYER_CHANNELS = {1: 64, 2: 128, 3: 256, 4: 512}
LAYER_STRIDE = {1: 1, 2: 2, 3: 4, 4: 8}
DEFAULT_SEED = 2000


def _conv(in_ch: int, out_ch: int) -> nn.Conv2d:
    return nn.Conv2d(in_ch, out_ch, kernel_size=3, padding=1)


class Encoder(nn.Module):
    """Stagewise VGG-19 prefix; stage l maps the layer-(l-1) tap to layer l."""

    def __init__(self):
        super().__init__()
        self.stage1 = nn.Sequential(_conv(3, 64), nn.ReLU(inplace=True))
        self.stage2 = nn.Sequential(
            _conv(64, 64), nn.ReLU(inplace=True), nn.MaxPool2d(2),
            _conv(64, 128), nn.ReLU(inplace=True))
        self.stage3 = nn.Sequential(
            _conv(128, 128), nn.ReLU(inplace=True), nn.MaxPool2d(2),
            _conv(128, 256), nn.ReLU(inplace=True))
        self.stage4 = nn.Sequential(
            _conv(256, 256), nn.ReLU(inplace=True),
            _conv(256, 256), nn.ReLU(inplace=True),
            _conv(256, 256), nn.ReLU(inplace=True), nn.MaxPool2d(2),
            _conv(256, 512), nn.ReLU(inplace=True))

    def stage(self, l: int) -> nn.Module:
        return getattr(self, f"stage{l}")

    def features_to(self, images: torch.Tensor, layer: int) -> torch.Tensor:
        """Run stages 1..layer on a (n, 3, h, w) batch in [0, 1]."""
        out = images
        for l in range(1, layer + 1):
            out = self.stage(l)(out)
        return out

    def taps(self, images: torch.Tensor, layers=(2, 3, 4)) -> dict[int, torch.Tensor]:
        out = images
        taps = {}
        for l in range(1, max(layers) + 1):
            out = self.stage(l)(out)
            if l in layers:
                taps[l] = out
        return taps


def _init_weights(module: nn.Module) -> None:
    for m in module.modules():
        if isinstance(m, nn.Conv2d):
            nn.init.kaiming_normal_(m.weight, nonlinearity="relu")
            nn.init.zeros_(m.bias)


def build_encoder(seed: int = DEFAULT_SEED) -> Encoder:
    torch.manual_seed(seed)
    enc = Encoder()
    _init_weights(enc)
    enc.eval()
    for p in enc.parameters():
        p.requires_grad_(False)
    return enc


def load_or_init_encoder(ckpt_dir: Path, seed: int = DEFAULT_SEED) -> Encoder:
    """Load the persisted encoder, creating and saving it on first use."""
    ckpt_dir = Path(ckpt_dir)
    path = ckpt_dir / "encoder.pt"
    enc = build_encoder(seed)
    if path.exists():
        enc.load_state_dict(torch.load(path, map_location="cpu", weights_only=True))
    else:
        ckpt_dir.mkdir(parents=True, exist_ok=True)
        torch.save(enc.state_dict(), path)
    enc.eval()
    for p in enc.parameters():
        p.requires_grad_(False)
    return enc

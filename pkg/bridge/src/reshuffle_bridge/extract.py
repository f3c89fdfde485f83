"""Image to feature-pyramid extraction, emitting the engine's file formats."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .corpus import load_image
from .vgg import DEFAULT_SEED, load_or_init_encoder


@dataclass
class ExtractionSpec:
    image_path: str
    manifest_path: str
    layers: tuple[int, ...] = (2, 3, 4)
    ckpt_dir: str = "checkpoints"


def extract(spec: ExtractionSpec) -> Path:
    """Run the encoder and write one NPY per layer plus the pyramid manifest.

    Tensors are float32 NPY v1.0 files of shape (channels, height, width),
    the format the engine's tensor loader expects; paths in the manifest
    are relative to the manifest file.
    """
    image = load_image(spec.image_path)
    encoder = load_or_init_encoder(spec.ckpt_dir)
    with torch.no_grad():
        taps = encoder.taps(torch.from_numpy(image[None]), layers=spec.layers)
    manifest_path = Path(spec.manifest_path)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    stem = manifest_path.stem
    entries = {}
    for l in spec.layers:
        arr = taps[l][0].numpy().astype(np.float32)
        if not np.isfinite(arr).all():
            raise ValueError(f"layer {l} features are not finite")
        name = f"{stem}_layer{l}.npy"
        np.save(manifest_path.parent / name, arr)
        entries[str(l)] = name
    doc = {
        "layers": entries,
        "source": str(spec.image_path),
        "extractor": f"vgg19-arch-random-init-seed{DEFAULT_SEED}",
    }
    manifest_path.write_text(json.dumps(doc, indent=2) + "\n")
    return manifest_path

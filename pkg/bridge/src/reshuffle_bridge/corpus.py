"""Synthetic desk-scale image corpus for decoder training.

Images mix smooth color gradients, soft gaussian blobs, and a few hard
shapes plus mild noise: varied enough to train an inverter, smooth
enough that training converges quickly on a CPU.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image


def _gradient(rng, size):
    y, x = np.mgrid[0:size, 0:size] / (size - 1)
    angle = rng.uniform(0, 2 * np.pi)
    ramp = np.cos(angle) * x + np.sin(angle) * y
    ramp = (ramp - ramp.min()) / (np.ptp(ramp) + 1e-9)
    lo = rng.uniform(0, 0.5, size=3)
    hi = rng.uniform(0.5, 1.0, size=3)
    return lo[:, None, None] + (hi - lo)[:, None, None] * ramp[None]


def _blobs(rng, size, count):
    y, x = np.mgrid[0:size, 0:size]
    img = np.zeros((3, size, size))
    for _ in range(count):
        cy, cx = rng.uniform(0, size, 2)
        sigma = rng.uniform(size / 12, size / 4)
        blob = np.exp(-((y - cy) ** 2 + (x - cx) ** 2) / (2 * sigma ** 2))
        color = rng.uniform(-0.5, 0.5, size=3)
        img += color[:, None, None] * blob[None]
    return img


def _shapes(rng, size, count):
    img = np.zeros((3, size, size))
    for _ in range(count):
        color = rng.uniform(-0.4, 0.4, size=3)
        if rng.random() < 0.5:
            y0, x0 = rng.integers(0, size - 8, 2)
            h, w = rng.integers(6, size // 2, 2)
            img[:, y0:y0 + h, x0:x0 + w] += color[:, None, None]
        else:
            cy, cx = rng.uniform(8, size - 8, 2)
            radius = rng.uniform(4, size / 4)
            y, x = np.mgrid[0:size, 0:size]
            mask = (y - cy) ** 2 + (x - cx) ** 2 <= radius ** 2
            img[:, mask] += color[:, None]
    return img


def synth_image(rng: np.random.Generator, size: int) -> np.ndarray:
    """One (3, size, size) float32 image in [0, 1]."""
    img = _gradient(rng, size)
    img += _blobs(rng, size, int(rng.integers(1, 4)))
    if rng.random() < 0.7:
        img += _shapes(rng, size, int(rng.integers(1, 3)))
    img += rng.normal(0, 0.01, img.shape)
    return np.clip(img, 0.0, 1.0).astype(np.float32)


def textured_image(rng: np.random.Generator, size: int) -> np.ndarray:
    """A strongly textured (3, size, size) image: colored stripes over a checker."""
    y, x = np.mgrid[0:size, 0:size]
    freq = rng.uniform(0.4, 0.9)
    angle = rng.uniform(0, np.pi)
    stripes = 0.5 + 0.5 * np.sign(np.sin(freq * (np.cos(angle) * x + np.sin(angle) * y)))
    checker = ((x // 4 + y // 4) % 2).astype(float)
    img = np.zeros((3, size, size))
    c1, c2, c3 = (rng.uniform(0, 1, 3) for _ in range(3))
    img += c1[:, None, None] * stripes
    img += c2[:, None, None] * (1 - stripes) * checker
    img += c3[:, None, None] * (1 - stripes) * (1 - checker)
    img += rng.normal(0, 0.05, img.shape)
    return np.clip(img, 0.0, 1.0).astype(np.float32)


def write_corpus(out_dir, count: int = 1000, size: int = 48, seed: int = 0) -> list[Path]:
    """Generate `count` PNGs under out_dir; deterministic for a given seed."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for k in range(count):
        img = synth_image(rng, size)
        path = out_dir / f"img{k:05d}.png"
        Image.fromarray((img.transpose(1, 2, 0) * 255).round().astype(np.uint8)).save(path)
        paths.append(path)
    return paths


def load_image(path, multiple_of: int = 8) -> np.ndarray:
    """Load an RGB image as (3, h, w) float32 in [0, 1], cropped to a stride multiple."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float32) / 255.0
    h, w = arr.shape[:2]
    h -= h % multiple_of
    w -= w % multiple_of
    if h == 0 or w == 0:
        raise ValueError(f"{path}: image too small for stride {multiple_of}")
    return arr[:h, :w].transpose(2, 0, 1).copy()


def save_image(img: np.ndarray, path) -> None:
    """Write a (3, h, w) float array as PNG, clamping to [0, 1]."""
    arr = np.clip(img, 0.0, 1.0)
    Image.fromarray((arr.transpose(1, 2, 0) * 255).round().astype(np.uint8)).save(path)


def load_folder(folder, limit: int | None = None) -> np.ndarray:
    """Stack every PNG in a folder into one (n, 3, h, w) float32 array."""
    paths = sorted(Path(folder).glob("*.png"))
    if limit is not None:
        paths = paths[:limit]
    if not paths:
        raise ValueError(f"no PNG images under {folder}")
    return np.stack([load_image(p) for p in paths])

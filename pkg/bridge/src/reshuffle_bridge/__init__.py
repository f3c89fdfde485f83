"""Image-side bridge for the feature-reshuffle engine."""

from .corpus import load_image, save_image, synth_image, textured_image, write_corpus
from .decoder import (
    MissingStageError,
    build_stage,
    decode_span,
    file_digest,
    load_stage,
    psnr,
    stage_path,
    train_stage,
)
from .extract import ExtractionSpec, extract
from .vgg import DEFAULT_SEED, LAYER_CHANNELS, Encoder, build_encoder, load_or_init_encoder

__all__ = [
    "DEFAULT_SEED", "Encoder", "ExtractionSpec", "LAYER_CHANNELS", "MissingStageError",
    "build_encoder", "build_stage", "decode_span", "extract", "file_digest", "load_image",
    "load_or_init_encoder", "load_stage", "psnr", "save_image", "stage_path", "synth_image",
    "textured_image", "train_stage", "write_corpus",
]

__version__ = "0.1.0"

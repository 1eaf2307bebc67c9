"""Text and image preprocessing applied before encoding."""

from __future__ import annotations

import re

import numpy as np
from PIL import Image

IMAGE_SIZE = 256

# http(s)://... and www.... tokens, removed wholesale (trailing punctuation
# attached to the token goes with it)
URL_PATTERN = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)


class ExtractError(Exception):
    """Raised when an input file cannot be read or decoded."""


def strip_urls(text: str) -> str:
    """Remove URL tokens, collapsing the spaces left behind."""
    cleaned = URL_PATTERN.sub(" ", text)
    cleaned = re.sub(r"[ \t]{2,}", " ", cleaned)
    return cleaned.strip()


def preprocess_image(path) -> np.ndarray:
    """Decode to a (256, 256, 3) float array in [0, 1].

    Resizing uses bilinear interpolation; pixel values are divided by 255.
    """
    try:
        with Image.open(path) as img:
            resized = img.convert("RGB").resize((IMAGE_SIZE, IMAGE_SIZE), Image.BILINEAR)
    except FileNotFoundError:
        raise ExtractError(f"image file not found: {path}") from None
    except (OSError, ValueError) as exc:
        raise ExtractError(f"cannot decode image {path}: {exc}") from None
    return np.asarray(resized, dtype=np.float64) / 255.0

"""Embedding extraction: raw manifest text and images to EVEC stores.

Texts are URL-stripped and encoded to 384-dim vectors; images are resized
to 256x256 RGB with bilinear interpolation, scaled to [0, 1] and encoded
to 2048-dim pooled features.  Output files use the EVEC wire format the
mmentail pipeline consumes.
"""

from mmextract.preprocess import preprocess_image, strip_urls

__version__ = "0.1.0"

__all__ = ["preprocess_image", "strip_urls", "__version__"]

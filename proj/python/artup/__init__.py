"""Scanning-robust aesthetic QR codes."""

from ._artup import (
    Error,
    beautify,
    decode,
    encode,
    hybrid_binarize,
    perturb,
    render,
    scan,
)

__all__ = [
    "Error",
    "beautify",
    "decode",
    "encode",
    "hybrid_binarize",
    "perturb",
    "render",
    "scan",
]

"""Mixing-based augmentation for wireless point clouds.

Frames are dicts with keys ``seq`` (str), ``t`` (float), ``points``
(N x 3 or N x 5 float array: x, y, z[, doppler, intensity]) and ``label``
(J x 3 keypoint array or length-C probability vector). Config mappings use
the same keys as the command-line config files.
"""

from ._wixup import (
    __version__,
    augment,
    cli,
    generate,
    mix,
    read_jsonl,
    run_uda,
    write_jsonl,
)

__all__ = [
    "__version__",
    "augment",
    "cli",
    "generate",
    "mix",
    "read_jsonl",
    "run_uda",
    "write_jsonl",
]

#!/usr/bin/env python3
"""Regenerates data/reference.pgm, the synthetic texture shipped as the
default reference image for shifted-corpus encoders.

The image is value noise (uniform random field, one pass of 3x3 cyclic box
smoothing), quantized to 16-bit. It carries a broad spatial spectrum, so a
corpus of cyclic shifts has plenty of usable rank, and it is generated from
scratch here - no external image, nothing to license.

Usage: python scripts/make_reference.py [out.pgm]
"""

import sys

import numpy as np


def make_texture(width=256, height=256, seed=20240915):
    rng = np.random.default_rng(seed)
    raw = rng.uniform(256.0, 1256.0, size=(height, width))
    smooth = np.zeros_like(raw)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            smooth += np.roll(np.roll(raw, dy, axis=0), dx, axis=1)
    return np.floor(smooth / 9.0).astype(np.uint16)


def write_pgm(path, image):
    with open(path, "wb") as f:
        f.write(b"P5\n# synthetic value-noise texture\n")
        f.write(f"{image.shape[1]} {image.shape[0]}\n65535\n".encode())
        f.write(image.astype(">u2").tobytes())


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "data/reference.pgm"
    write_pgm(out, make_texture())
    print(f"wrote {out}")

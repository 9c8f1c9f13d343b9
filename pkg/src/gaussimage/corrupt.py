"""Seeded corruption generators: patch occlusion, additive Gaussian noise, salt-and-pepper.

Every generator returns the corrupted surface and a report whose ``observed``
mask is True where the pixel still carries the clean value (or, for additive
noise, everywhere).  Random streams come from numpy's PCG64 generator seeded
with the caller's integer, so identical inputs give bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gaussimage.raster import Surface


@dataclass(frozen=True)
class CorruptionReport:
    kind: str
    params: dict
    seed: int
    observed: np.ndarray = field(repr=False)

    @property
    def affected(self) -> np.ndarray:
        return ~self.observed


def occlude(surface: Surface, patch_h: int, patch_w: int, seed: int, fill: float = 0.0):
    """Blank one axis-aligned patch at a uniformly random position."""
    H, W = surface.shape
    if patch_h < 1 or patch_w < 1:
        raise ValueError("patch dimensions must be positive")
    if patch_h > H or patch_w > W:
        raise ValueError(f"patch {patch_h}x{patch_w} does not fit in {H}x{W} image")
    if not 0.0 <= fill <= 1.0:
        raise ValueError("fill value must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    top = int(rng.integers(0, H - patch_h + 1))
    left = int(rng.integers(0, W - patch_w + 1))
    data = surface.data.copy()
    data[top : top + patch_h, left : left + patch_w] = fill
    observed = np.ones((H, W), dtype=bool)
    observed[top : top + patch_h, left : left + patch_w] = False
    params = {"patch_h": patch_h, "patch_w": patch_w, "top": top, "left": left, "fill": fill}
    return Surface(data), CorruptionReport("occlusion", params, seed, observed)


def awgn(surface: Surface, sigma_8bit: float, seed: int):
    """Add N(0, (sigma_8bit/255)^2) noise per pixel, then clamp to [0, 1]."""
    if not sigma_8bit >= 0:
        raise ValueError(f"sigma must be non-negative, got {sigma_8bit}")
    observed = np.ones(surface.shape, dtype=bool)
    params = {"sigma_8bit": sigma_8bit}
    if sigma_8bit == 0:
        return Surface(surface.data.copy()), CorruptionReport("awgn", params, seed, observed)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma_8bit / 255.0, size=surface.shape)
    data = np.clip(surface.data + noise, 0.0, 1.0)
    return Surface(data), CorruptionReport("awgn", params, seed, observed)


def dropped_count(ratio: float, n_pixels: int) -> int:
    # half-up rounding; ratio * n is non-negative
    return int(np.floor(ratio * n_pixels + 0.5))


def salt_pepper(surface: Surface, drop_ratio: float, seed: int):
    """Set exactly round(ratio * H * W) random pixels to 0 or 1 (fair coin each)."""
    if not 0.0 <= drop_ratio <= 1.0:
        raise ValueError(f"drop ratio must lie in [0, 1], got {drop_ratio}")
    H, W = surface.shape
    count = dropped_count(drop_ratio, H * W)
    rng = np.random.default_rng(seed)
    idx = rng.permutation(H * W)[:count]
    values = rng.integers(0, 2, size=count).astype(np.float64)
    data = surface.data.copy().ravel()
    data[idx] = values
    observed = np.ones(H * W, dtype=bool)
    observed[idx] = False
    report = CorruptionReport("salt-pepper", {"drop_ratio": drop_ratio, "count": count}, seed, observed.reshape(H, W))
    return Surface(data.reshape(H, W)), report

"""Reconstruction metrics on [0, 1]-normalized intensities."""

from __future__ import annotations

import math

import numpy as np

from gaussimage.model import ShapeError
from gaussimage.raster import Surface


def _diff(a, b, mask):
    a = np.asarray(a.data if isinstance(a, Surface) else a, dtype=np.float64)
    b = np.asarray(b.data if isinstance(b, Surface) else b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    d = a - b
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != d.shape:
            raise ShapeError(f"mask shape {mask.shape} does not match {d.shape}")
        d = d[mask]
    if d.size == 0:
        raise ValueError("no pixels selected")
    return d


def mse(a, b, mask=None) -> float:
    d = _diff(a, b, mask)
    return float(np.mean(d * d))


def pae(a, b, mask=None) -> float:
    return float(np.max(np.abs(_diff(a, b, mask))))


def mse_ratio(baseline_mse: float, ours_mse: float) -> float:
    """How many times larger the baseline error is than ours."""
    if ours_mse == 0:
        raise ZeroDivisionError("reference MSE is zero")
    return baseline_mse / ours_mse


def psnr(a, b, mask=None) -> float:
    """Peak signal-to-noise ratio in dB for unit peak; ``inf`` for identical inputs."""
    m = mse(a, b, mask)
    if m == 0:
        return math.inf
    return 10.0 * math.log10(1.0 / m)

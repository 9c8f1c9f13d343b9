"""Closed-form geometric transforms acting on model parameters only.

Each function returns a new model ``out`` with ``out(x) == model(T^-1 x)``:

* translate: ``out(x) = model(x - xbar)``
* scale:     ``out(x) = model(k x)``
* rotate:    ``out(x) = model(R (x - xbar) + xbar)``, ``R = [[cos, sin], [-sin, cos]]``

No pixels are resampled.  Angles are in radians here (the CLI takes degrees).
"""

from __future__ import annotations

import math

import numpy as np

from gaussimage.model import MixtureModel


def _rebuild(model: MixtureModel, mu, A) -> MixtureModel:
    w, _, _ = model.arrays()
    return MixtureModel.from_arrays(w, mu, A, source_dims=model.source_dims)


def translate(model: MixtureModel, xbar) -> MixtureModel:
    w, mu, A = model.arrays()
    return _rebuild(model, mu + np.asarray(xbar, dtype=np.float64).reshape(1, 2), A)


def scale(model: MixtureModel, k: float) -> MixtureModel:
    k = float(k)
    if k == 0.0 or not math.isfinite(k):
        raise ValueError(f"scale factor must be finite and nonzero, got {k}")
    _, mu, A = model.arrays()
    return _rebuild(model, mu / k, A * (k * k))


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def rotate(model: MixtureModel, theta: float, xbar=(0.5, 0.5)) -> MixtureModel:
    R = rotation_matrix(theta)
    xbar = np.asarray(xbar, dtype=np.float64).reshape(2)
    _, mu, A = model.arrays()
    shift = R @ xbar - xbar
    # R is orthogonal, so R^-1 = R^T; applied row-wise: (R^T v)^T = v^T R
    new_mu = (mu + shift) @ R
    new_A = np.einsum("ji,njk,kl->nil", R, A, R)
    new_A = 0.5 * (new_A + np.swapaxes(new_A, 1, 2))
    return _rebuild(model, new_mu, new_A)

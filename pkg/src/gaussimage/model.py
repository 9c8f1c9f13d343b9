"""Explicit image function: a weighted sum of anisotropic 2D Gaussians.

Each element is ``w * exp(-(x - mu)^T A (x - mu))`` where ``A`` is a symmetric
precision (inverse covariance) matrix.  The optimizer never touches ``A``
directly; it works on an unconstrained vector of 6 reals per element,

    (pre-sigmoid mu1, pre-sigmoid mu2, t1, t2, pre-tanh rho, pre-tanh w)

which :func:`decode` squashes into valid parameters, with
``A = [[t1^2, rho t1 t2], [rho t1 t2, t2^2]]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from gaussimage import _kernels

PARAMS_PER_ELEMENT = 6


class ConstraintViolation(ValueError):
    """A parameter lies outside its admissible range."""


class ShapeError(ValueError):
    """An array or vector has the wrong size."""


@dataclass(frozen=True)
class GaussianElement:
    w: float
    mu: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=np.float64).reshape(2)
        A = np.array(self.A, dtype=np.float64).reshape(2, 2)
        if A[0, 1] != A[1, 0]:
            raise ConstraintViolation(f"precision matrix is not symmetric: {A.tolist()}")
        mu.flags.writeable = False
        A.flags.writeable = False
        object.__setattr__(self, "w", float(self.w))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "A", A)


@dataclass(frozen=True)
class MixtureModel:
    elements: tuple[GaussianElement, ...]
    source_dims: tuple[int, int] | None = None
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        if not elements:
            raise ShapeError("a mixture needs at least one element")
        object.__setattr__(self, "elements", elements)
        if self.source_dims is not None:
            object.__setattr__(self, "source_dims", tuple(int(v) for v in self.source_dims))

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @classmethod
    def from_arrays(cls, w, mu, A, source_dims=None, provenance=None) -> "MixtureModel":
        """Build from stacked arrays: w (N,), mu (N, 2), A (N, 2, 2)."""
        w = np.asarray(w, dtype=np.float64)
        mu = np.asarray(mu, dtype=np.float64)
        A = np.asarray(A, dtype=np.float64)
        elements = tuple(GaussianElement(w[i], mu[i], A[i]) for i in range(w.shape[0]))
        return cls(elements, source_dims, dict(provenance or {}))

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        w = np.array([e.w for e in self.elements])
        mu = np.stack([e.mu for e in self.elements])
        A = np.stack([e.A for e in self.elements])
        return w, mu, A

    def concat(self, other: "MixtureModel") -> "MixtureModel":
        return MixtureModel(self.elements + other.elements)


@dataclass(frozen=True)
class RawParameterVector:
    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=np.float64).ravel()
        if theta.size == 0 or theta.size % PARAMS_PER_ELEMENT:
            raise ShapeError(f"raw vector length {theta.size} is not a positive multiple of 6")
        theta.flags.writeable = False
        object.__setattr__(self, "theta", theta)

    @property
    def n_elements(self) -> int:
        return self.theta.size // PARAMS_PER_ELEMENT

    def blocks(self) -> np.ndarray:
        """View as (N, 6)."""
        return self.theta.reshape(-1, PARAMS_PER_ELEMENT)


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    # split by sign so neither branch overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logit(p):
    p = np.asarray(p, dtype=np.float64)
    return np.log(p) - np.log1p(-p)


def build_precision(t: Sequence[float], rho: float) -> tuple[np.ndarray, bool]:
    """Positive-definite precision matrix from scales ``t`` and correlation ``rho``.

    Returns ``(A, degenerate)``; ``degenerate`` is True when ``t1 * t2 == 0``,
    in which case ``A`` is only positive semidefinite.
    """
    t1, t2 = (float(v) for v in t)
    rho = float(rho)
    if not abs(rho) < 1.0:
        raise ConstraintViolation(f"|rho| must be < 1, got {rho}")
    off = rho * t1 * t2
    A = np.array([[t1 * t1, off], [off, t2 * t2]])
    return A, t1 * t2 == 0.0


def decode_arrays(theta: np.ndarray):
    """Vectorized decode: returns (w, mu, A, t, rho) for a (6N,) raw vector."""
    blocks = np.asarray(theta, dtype=np.float64).reshape(-1, PARAMS_PER_ELEMENT)
    mu = sigmoid(blocks[:, 0:2])
    t = blocks[:, 2:4].copy()
    rho = np.tanh(blocks[:, 4])
    w = np.tanh(blocks[:, 5])
    A = np.empty((blocks.shape[0], 2, 2))
    A[:, 0, 0] = t[:, 0] * t[:, 0]
    A[:, 1, 1] = t[:, 1] * t[:, 1]
    A[:, 0, 1] = rho * t[:, 0] * t[:, 1]
    A[:, 1, 0] = A[:, 0, 1]
    return w, mu, A, t, rho


def decode(raw: RawParameterVector | Sequence[float], source_dims=None) -> MixtureModel:
    if not isinstance(raw, RawParameterVector):
        raw = RawParameterVector(raw)
    w, mu, A, _, _ = decode_arrays(raw.theta)
    return MixtureModel.from_arrays(w, mu, A, source_dims=source_dims)


def encode(mu, t, rho, w) -> RawParameterVector:
    """Inverse of :func:`decode` for factorized parameters (mu in (0,1), |rho|, |w| < 1)."""
    mu = np.asarray(mu, dtype=np.float64).reshape(-1, 2)
    t = np.asarray(t, dtype=np.float64).reshape(-1, 2)
    rho = np.asarray(rho, dtype=np.float64).reshape(-1)
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    blocks = np.column_stack([logit(mu), t, np.arctanh(rho), np.arctanh(w)])
    return RawParameterVector(blocks.ravel())


def eval_element(elem: GaussianElement, x: Sequence[float]) -> float:
    d = np.asarray(x, dtype=np.float64) - elem.mu
    A = elem.A
    q = A[0, 0] * d[0] * d[0] + 2.0 * A[0, 1] * d[0] * d[1] + A[1, 1] * d[1] * d[1]
    return float(np.exp(-q))


def evaluate_grid(model: MixtureModel, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Evaluate on the separable grid x1 (rows) by x2 (columns)."""
    w, mu, A = model.arrays()
    x1 = np.ascontiguousarray(x1, dtype=np.float64)
    x2 = np.ascontiguousarray(x2, dtype=np.float64)
    f = _kernels.responses(mu, A, x1, x2)
    out = np.empty((x1.shape[0], x2.shape[0]))
    _kernels.weighted_sum(w, f, out)
    return out


def eval_mixture(model: MixtureModel, x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=np.float64).reshape(2)
    return float(evaluate_grid(model, x[:1], x[1:])[0, 0])


def validate(model: MixtureModel, tol: float = 0.0) -> list[str]:
    """Return human-readable problems (degenerate or indefinite precisions)."""
    problems = []
    for i, e in enumerate(model.elements):
        A = e.A
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        if A[0, 0] <= tol or A[1, 1] <= tol or det <= tol:
            problems.append(f"element {i}: precision not positive definite (det={det:g})")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(e.mu)) and np.isfinite(e.w)):
            problems.append(f"element {i}: non-finite parameter")
    return problems


def concat_models(models: Iterable[MixtureModel]) -> MixtureModel:
    elements: tuple[GaussianElement, ...] = ()
    for m in models:
        elements += m.elements
    return MixtureModel(elements)

"""Direct per-image fitting of the mixture by Adam on the raw parameter vector.

The objective is ``mse + alpha * pae`` over the observed (masked) pixels.  The
gradient is analytic: the residual is pushed through the Gaussian derivatives
and then through the sigmoid/tanh squashing and the ``t, rho -> A`` map.  The
PAE term is a subgradient routed to the single worst pixel (first in row-major
order on ties).
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from gaussimage import _kernels
from gaussimage.model import (
    PARAMS_PER_ELEMENT,
    MixtureModel,
    RawParameterVector,
    ShapeError,
    decode,
    decode_arrays,
    encode,
)
from gaussimage.raster import Surface, axes

log = logging.getLogger(__name__)


class EmptyMaskError(ValueError):
    """The mask selects no pixels, so there is nothing to fit."""


@dataclass(frozen=True)
class FitConfig:
    n_elements: int = 80
    alpha: float = 0.001
    learning_rate: float = 0.05
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    max_iters: int = 5000
    seed: int = 0
    convergence_tol: float = 1e-7
    convergence_window: int = 50

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError("n_elements must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not self.learning_rate > 0 or not self.adam_epsilon > 0:
            raise ValueError("learning_rate and adam_epsilon must be positive")
        if not (0 <= self.adam_beta1 < 1 and 0 <= self.adam_beta2 < 1):
            raise ValueError("Adam betas must lie in [0, 1)")
        if self.max_iters < 0 or self.convergence_window < 1:
            raise ValueError("max_iters must be >= 0 and convergence_window >= 1")
        if self.convergence_tol < 0:
            raise ValueError("convergence_tol must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FitTrace:
    iteration: np.ndarray
    l2: np.ndarray
    pae: np.ndarray
    total: np.ndarray
    model: MixtureModel
    raw: RawParameterVector
    iterations: int
    termination: str
    best_iteration: int

    @property
    def best_total(self) -> float:
        return float(self.total[self.best_iteration])

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.total)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("iteration,l2,pae,total\n")
            for k, a, b, c in zip(self.iteration, self.l2, self.pae, self.total):
                fh.write(f"{int(k)},{float(a)!r},{float(b)!r},{float(c)!r}\n")


# --- masks and losses -------------------------------------------------------


def _target_array(target) -> np.ndarray:
    return target.data if isinstance(target, Surface) else np.asarray(target, dtype=np.float64)


def as_mask(mask, shape) -> np.ndarray:
    """None means every pixel is observed."""
    if mask is None:
        m = np.ones(shape, dtype=bool)
    else:
        m = np.asarray(mask, dtype=bool)
        if m.shape != tuple(shape):
            raise ShapeError(f"mask shape {m.shape} does not match {tuple(shape)}")
    if not m.any():
        raise EmptyMaskError("mask has no observed pixels")
    return m


def _masked_residual(pred, target, mask) -> np.ndarray:
    pred = np.asarray(pred, dtype=np.float64)
    target = _target_array(target)
    if pred.shape != target.shape:
        raise ShapeError(f"prediction shape {pred.shape} does not match target {target.shape}")
    mask = as_mask(mask, pred.shape)
    return (pred - target)[mask]


def loss_l2(pred, target, mask=None) -> float:
    """Mean squared error over observed pixels."""
    r = _masked_residual(pred, target, mask)
    return float(np.mean(r * r))


def loss_pae(pred, target, mask=None) -> float:
    """Peak absolute error over observed pixels."""
    r = _masked_residual(pred, target, mask)
    return float(np.max(np.abs(r)))


def total_loss(pred, target, mask=None, alpha: float = 0.1) -> float:
    return loss_l2(pred, target, mask) + alpha * loss_pae(pred, target, mask)


def extreme_pixel_mask(target) -> np.ndarray:
    """Observe only pixels that are not exactly 0 or 1 (salt-and-pepper suspects)."""
    t = _target_array(target)
    return (t != 0.0) & (t != 1.0)


# --- objective and analytic gradient ----------------------------------------


class Objective:
    """Loss and gradient for one (target, mask, alpha, N), with reusable buffers."""

    def __init__(self, target, mask, alpha: float, n_elements: int):
        self.target = _target_array(target)
        H, W = self.target.shape
        self.mask = as_mask(mask, (H, W))
        self.alpha = float(alpha)
        self.count = int(self.mask.sum())
        self.flat_mask = self.mask.ravel()
        self.x1, self.x2 = axes(H, W)
        self._f = np.empty((n_elements, H, W))
        self._pred = np.empty((H, W))
        self._mom = np.empty((n_elements, 6))
        self.n_elements = n_elements

    def __call__(self, theta: np.ndarray, with_grad: bool = True):
        """Returns (l2, pae, grad); grad is None when ``with_grad`` is False."""
        theta = np.asarray(theta, dtype=np.float64)
        if theta.size != self.n_elements * PARAMS_PER_ELEMENT:
            raise ShapeError(f"expected {self.n_elements * PARAMS_PER_ELEMENT} parameters, got {theta.size}")
        w, mu, A, t, rho = decode_arrays(theta)
        f = _kernels.responses(mu, A, self.x1, self.x2, self._f)
        _kernels.weighted_sum(w, f, self._pred)

        res = self._pred - self.target
        r = res[self.mask]
        l2 = float(np.mean(r * r))
        pae = float(np.max(np.abs(r)))
        if not with_grad:
            return l2, pae, None

        g = np.where(self.mask, res * (2.0 / self.count), 0.0)
        if self.alpha != 0.0:
            # first masked pixel (row-major) attaining the peak
            abs_res = np.where(self.mask, np.abs(res), -1.0)
            peak = int(np.argmax(abs_res))
            g.flat[peak] += self.alpha * np.sign(res.flat[peak])

        mom = self._mom
        _kernels.weighted_moments(mu, f, g, self.x1, self.x2, mom)
        s0, s1, s2, s11, s12, s22 = mom.T
        a11 = A[:, 0, 0]
        a12 = A[:, 0, 1]
        a22 = A[:, 1, 1]

        d_mu1 = 2.0 * w * (a11 * s1 + a12 * s2)
        d_mu2 = 2.0 * w * (a12 * s1 + a22 * s2)
        d_a11 = -w * s11
        d_a22 = -w * s22
        d_off = -2.0 * w * s12
        t1, t2 = t[:, 0], t[:, 1]

        grad = np.empty((self.n_elements, PARAMS_PER_ELEMENT))
        grad[:, 0] = d_mu1 * mu[:, 0] * (1.0 - mu[:, 0])
        grad[:, 1] = d_mu2 * mu[:, 1] * (1.0 - mu[:, 1])
        grad[:, 2] = 2.0 * t1 * d_a11 + rho * t2 * d_off
        grad[:, 3] = 2.0 * t2 * d_a22 + rho * t1 * d_off
        grad[:, 4] = t1 * t2 * d_off * (1.0 - rho * rho)
        grad[:, 5] = s0 * (1.0 - w * w)
        return l2, pae, grad.ravel()

    def prediction(self) -> np.ndarray:
        """Prediction from the most recent call."""
        return self._pred.copy()


def gradient(raw, target, mask=None, alpha: float = 0.1) -> np.ndarray:
    """Analytic gradient of ``total_loss`` with respect to the raw 6N vector."""
    if not isinstance(raw, RawParameterVector):
        raw = RawParameterVector(raw)
    obj = Objective(target, mask, alpha, raw.n_elements)
    return obj(raw.theta)[2]


def objective_value(raw, target, mask=None, alpha: float = 0.1) -> float:
    if not isinstance(raw, RawParameterVector):
        raw = RawParameterVector(raw)
    l2, pae, _ = Objective(target, mask, alpha, raw.n_elements)(raw.theta, with_grad=False)
    return l2 + alpha * pae


# --- Adam --------------------------------------------------------------------


@dataclass(frozen=True)
class AdamState:
    theta: np.ndarray
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def start(cls, theta) -> "AdamState":
        theta = np.array(theta, dtype=np.float64).ravel()
        return cls(theta, np.zeros_like(theta), np.zeros_like(theta), 0)


def adam_step(state: AdamState, grad, config: FitConfig) -> AdamState:
    g = np.asarray(grad, dtype=np.float64).ravel()
    if g.shape != state.theta.shape:
        raise ShapeError(f"gradient has {g.size} entries, state has {state.theta.size}")
    b1, b2 = config.adam_beta1, config.adam_beta2
    step = state.step + 1
    m = b1 * state.m + (1.0 - b1) * g
    v = b2 * state.v + (1.0 - b2) * (g * g)
    m_hat = m / (1.0 - b1**step)
    v_hat = v / (1.0 - b2**step)
    theta = state.theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_epsilon)
    return AdamState(theta, m, v, step)


# --- initialization and driver -------------------------------------------------

INIT_WIDTH = 1.5


def init_params(n_elements: int, target, seed: int, mask=None) -> RawParameterVector:
    """Jittered-grid start: one element per grid cell, weights matched to the mean intensity."""
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    target_arr = _target_array(target)
    mask = as_mask(mask, target_arr.shape)
    rng = np.random.default_rng(seed)

    side = math.ceil(math.sqrt(n_elements))
    slots = np.sort(rng.choice(side * side, size=n_elements, replace=False))
    rows, cols = np.divmod(slots, side)
    centers = np.column_stack([(rows + 0.5) / side, (cols + 0.5) / side])
    jitter = 0.25 / math.sqrt(n_elements)
    centers = centers + rng.uniform(-jitter, jitter, size=centers.shape)
    centers = np.clip(centers, 0.01, 0.99)

    t = np.full((n_elements, 2), math.sqrt(n_elements) * INIT_WIDTH)
    rho = np.zeros(n_elements)

    # scale unit-weight coverage so the initial render matches the mean intensity
    unit = encode(centers, t, rho, np.zeros(n_elements)).theta.reshape(-1, PARAMS_PER_ELEMENT)
    _, mu, A, _, _ = decode_arrays(unit)
    x1, x2 = axes(*target_arr.shape)
    coverage = _kernels.responses(mu, A, x1, x2).sum(axis=0)
    mean_target = float(np.mean(target_arr[mask]))
    mean_cover = float(np.mean(coverage[mask]))
    w0 = np.clip(mean_target / mean_cover if mean_cover > 0 else 0.0, -0.999, 0.999)
    return encode(centers, t, rho, np.full(n_elements, w0))


def fit(target, mask=None, config: FitConfig | None = None, init: RawParameterVector | None = None, callback=None):
    """Fit a mixture to ``target``; returns (best model, trace).

    ``callback(k, theta)``, if given, sees every evaluated iterate.
    """
    config = config or FitConfig()
    target_arr = _target_array(target)
    mask = as_mask(mask, target_arr.shape)
    if init is None:
        init = init_params(config.n_elements, target_arr, config.seed, mask)
    elif init.n_elements != config.n_elements:
        raise ShapeError("initial vector does not match n_elements")
    obj = Objective(target_arr, mask, config.alpha, config.n_elements)

    n_rows = config.max_iters + 1
    l2s = np.empty(n_rows)
    paes = np.empty(n_rows)
    totals = np.empty(n_rows)

    state = AdamState.start(init.theta)
    best_total = math.inf
    best_theta = state.theta
    best_k = 0
    termination = "max-iters"
    k = 0
    while True:
        l2, pae, grad = obj(state.theta, with_grad=k < config.max_iters)
        total = l2 + config.alpha * pae
        l2s[k], paes[k], totals[k] = l2, pae, total
        if callback is not None:
            callback(k, state.theta)
        if total < best_total:
            best_total, best_theta, best_k = total, state.theta, k
        if k % 500 == 0:
            log.debug("iter %d l2=%.3e pae=%.3e best=%.3e", k, l2, pae, best_total)
        win = config.convergence_window
        if k + 1 >= 2 * win:
            # compare mean loss of the last two windows; robust to Adam's oscillation
            recent = math.fsum(totals[k + 1 - win : k + 1]) / win
            before = math.fsum(totals[k + 1 - 2 * win : k + 1 - win]) / win
            if abs(before - recent) <= config.convergence_tol * abs(before):
                termination = "converged"
                break
        if k >= config.max_iters:
            break
        if not np.all(np.isfinite(grad)):
            raise FloatingPointError(f"non-finite gradient at iteration {k}")
        state = adam_step(state, grad, config)
        k += 1

    raw = RawParameterVector(best_theta)
    H, W = target_arr.shape
    model = decode(raw, source_dims=(H, W))
    trace = FitTrace(
        iteration=np.arange(k + 1),
        l2=l2s[: k + 1].copy(),
        pae=paes[: k + 1].copy(),
        total=totals[: k + 1].copy(),
        model=model,
        raw=raw,
        iterations=k,
        termination=termination,
        best_iteration=best_k,
    )
    return model, trace

import math

import numpy as np
import pytest

from gaussimage.model import eval_mixture
from gaussimage.raster import render
from gaussimage.transform import rotate, rotation_matrix, scale, translate

from test_model import random_model


def params(m):
    return m.arrays()


def assert_same_params(a, b, tol):
    for x, y in zip(params(a), params(b)):
        np.testing.assert_allclose(x, y, rtol=0, atol=tol)


@pytest.fixture
def model():
    return random_model(np.random.default_rng(21), 7, spread=2)


def test_translate_identity(model):
    assert_same_params(translate(model, (0, 0)), model, 0)


def test_translate_inverse_pair(model):
    back = translate(translate(model, (0, 0.2)), (0, -0.2))
    _, mu0, _ = model.arrays()
    _, mu1, _ = back.arrays()
    np.testing.assert_allclose(mu1, mu0, rtol=0, atol=1e-15)


def test_translate_composes(model):
    a = translate(translate(model, (0.1, -0.3)), (0.05, 0.2))
    b = translate(model, (0.15, -0.1))
    assert_same_params(a, b, 1e-12)


@pytest.mark.parametrize("xbar", [(0, 0.2), (0, -0.2), (0.2, 0), (-0.2, 0)])
def test_translate_moves_content(model, xbar):
    # content at x moves to x + xbar: pixel offsets of 0.2 * 60 = 12 on a 60x60 grid
    H = W = 60
    img = render(model, H, W)
    moved = render(translate(model, xbar), H, W)
    dr, dc = round(xbar[0] * H), round(xbar[1] * W)
    src = img[max(0, -dr) : H - max(0, dr), max(0, -dc) : W - max(0, dc)]
    dst = moved[max(0, dr) : H - max(0, -dr), max(0, dc) : W - max(0, -dc)]
    np.testing.assert_allclose(dst, src, rtol=0, atol=1e-12)


def test_scale_identity_and_inverse(model):
    assert_same_params(scale(model, 1), model, 0)
    for k in (2.0, 0.5, 3.7):
        assert_same_params(scale(scale(model, k), 1 / k), model, 1e-12)


def test_scale_rejects_zero(model):
    with pytest.raises(ValueError):
        scale(model, 0)


@pytest.mark.parametrize("k", [2.0, 0.5])
def test_scale_identity_on_points(model, k):
    out = scale(model, k)
    for x in np.random.default_rng(0).uniform(0, 1, (20, 2)):
        assert abs(eval_mixture(out, x) - eval_mixture(model, k * x)) <= 1e-12


def test_rotate_zero(model):
    assert_same_params(rotate(model, 0.0, (0.5, 0.5)), model, 0)


def test_rotate_four_quarter_turns(model):
    m = model
    for _ in range(4):
        m = rotate(m, math.pi / 2, (0.5, 0.5))
    assert_same_params(m, model, 1e-9)


@pytest.mark.parametrize("deg", [30, 45, 60, 90])
def test_rotate_identity_on_points(model, deg):
    theta = math.radians(deg)
    xbar = np.array([0.5, 0.5])
    R = rotation_matrix(theta)
    out = rotate(model, theta, xbar)
    for x in np.random.default_rng(deg).uniform(0, 1, (20, 2)):
        assert abs(eval_mixture(out, x) - eval_mixture(model, R @ (x - xbar) + xbar)) <= 1e-12


def test_rotate_preserves_spectra_and_symmetry(model):
    out = rotate(model, 0.7, (0.3, 0.6))
    for a, b in zip(model.elements, out.elements):
        assert b.A[0, 1] == b.A[1, 0]
        np.testing.assert_allclose(np.linalg.eigvalsh(b.A), np.linalg.eigvalsh(a.A), rtol=0, atol=1e-12)
        assert b.w == a.w


def test_quarter_turn_render_is_grid_rotation():
    # on the (r/H, c/W) grid a 90-degree turn about (0.5, 0.5) is not an exact pixel permutation
    # (the grid is offset by half a pixel), but about the grid's own center it is
    m = random_model(np.random.default_rng(3), 5, spread=2)
    H = 40
    center = ((H + 1) / (2 * H), (H + 1) / (2 * H))
    img = render(m, H, H)
    rot = render(rotate(m, math.pi / 2, center), H, H)
    np.testing.assert_allclose(rot, np.rot90(img, k=1), rtol=0, atol=1e-12)

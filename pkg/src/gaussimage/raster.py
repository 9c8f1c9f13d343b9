"""Pixel arrays <-> continuous coordinates, and rendering at any resolution.

Pixel (r, c), 1-based, sits at the continuous point (r/H, c/W): coordinates
start at 1/H rather than 0 and the last row/column lands exactly on 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from gaussimage.model import MixtureModel, ShapeError, evaluate_grid

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class FormatError(ValueError):
    """Pixel data or file contents that cannot be interpreted."""


@dataclass(frozen=True)
class Surface:
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 2 or 0 in data.shape:
            raise ShapeError(f"surface must be a non-empty 2D array, got shape {data.shape}")
        if not np.all((data >= 0.0) & (data <= 1.0)):
            raise FormatError("surface values must lie in [0, 1]")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def axes(H: int, W: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column coordinate axes: (1/H, ..., 1) and (1/W, ..., 1)."""
    if H < 1 or W < 1:
        raise ShapeError(f"grid dimensions must be positive, got {H}x{W}")
    return np.arange(1, H + 1) / H, np.arange(1, W + 1) / W


def grid(H: int, W: int) -> np.ndarray:
    """All H*W coordinates in row-major order, shape (H*W, 2)."""
    x1, x2 = axes(H, W)
    g = np.empty((H, W, 2))
    g[..., 0] = x1[:, None]
    g[..., 1] = x2[None, :]
    return g.reshape(-1, 2)


def render(model: MixtureModel, H: int, W: int) -> np.ndarray:
    """Unclamped H x W evaluation of the model on the pixel grid."""
    x1, x2 = axes(H, W)
    return evaluate_grid(model, x1, x2)


def _max_value(bit_depth: int) -> int:
    if bit_depth < 1 or bit_depth > 16:
        raise FormatError(f"unsupported bit depth {bit_depth}")
    return (1 << bit_depth) - 1


def image_to_surface(pixels, bit_depth: int = 8) -> Surface:
    """Integer pixels (H, W) or RGB (H, W, 3) -> Surface in [0, 1]."""
    maxv = _max_value(bit_depth)
    p = np.asarray(pixels)
    if not np.issubdtype(p.dtype, np.integer):
        if not np.all(np.equal(np.mod(p, 1), 0)):
            raise FormatError("pixel values must be integers")
    p = p.astype(np.int64)
    if p.min() < 0 or p.max() > maxv:
        raise FormatError(f"pixel values outside [0, {maxv}]")
    if p.ndim == 3:
        if p.shape[2] not in (3, 4):
            raise FormatError(f"expected RGB or RGBA channels, got {p.shape[2]}")
        rgb = p[..., :3].astype(np.float64)
        gray = rgb[..., 0] * LUMA_WEIGHTS[0] + rgb[..., 1] * LUMA_WEIGHTS[1] + rgb[..., 2] * LUMA_WEIGHTS[2]
        return Surface(np.clip(gray / maxv, 0.0, 1.0))
    if p.ndim != 2:
        raise FormatError(f"expected a 2D grayscale or 3D RGB array, got {p.ndim}D")
    return Surface(p / maxv)


def surface_to_image(values, bit_depth: int = 8) -> np.ndarray:
    """Clamp to [0, 1], scale and round half away from zero."""
    maxv = _max_value(bit_depth)
    v = np.asarray(values.data if isinstance(values, Surface) else values, dtype=np.float64)
    v = np.clip(v, 0.0, 1.0) * maxv
    # values are non-negative after clamping, so floor(x + 0.5) rounds half away from zero
    out = np.floor(v + 0.5).astype(np.int64)
    return out.astype(np.uint8 if bit_depth <= 8 else np.uint16)


def read_image(path) -> tuple[np.ndarray, int]:
    """Load PNG or PGM (P2/P5, also PPM/RGB PNG). Returns (pixels, bit_depth)."""
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode == "P":
                im = im.convert("RGBA" if "transparency" in im.info else "RGB")
                mode = im.mode
            if mode == "LA":
                im = im.convert("L")
                mode = "L"
            arr = np.array(im)
    except (OSError, SyntaxError, ValueError) as exc:
        raise FormatError(f"cannot read image {path}: {exc}") from exc
    if mode in ("1",):
        return arr.astype(np.int64), 1
    if mode in ("L", "RGB", "RGBA"):
        return arr.astype(np.int64), 8
    if mode.startswith("I"):
        return arr.astype(np.int64), 16
    raise FormatError(f"unsupported image mode {mode} in {path}")


def load_surface(path) -> Surface:
    pixels, depth = read_image(path)
    return image_to_surface(pixels, depth)


def write_image(path, pixels: np.ndarray, bit_depth: int = 8) -> None:
    """Write grayscale integers as PNG or binary PGM (chosen by suffix)."""
    path = Path(path)
    suffix = path.suffix.lower()
    arr = np.asarray(pixels)
    if suffix in (".pgm", ".pnm"):
        maxv = _max_value(bit_depth)
        H, W = arr.shape
        header = f"P5\n{W} {H}\n{maxv}\n".encode("ascii")
        body = arr.astype(">u2" if maxv > 255 else np.uint8).tobytes()
        path.write_bytes(header + body)
    elif suffix == ".png":
        if bit_depth <= 8:
            Image.fromarray(arr.astype(np.uint8)).save(path)
        else:
            Image.fromarray(arr.astype(np.uint16)).save(path)
    else:
        raise FormatError(f"unsupported output format {suffix!r} (use .png or .pgm)")


def save_surface(path, values, bit_depth: int = 8) -> None:
    write_image(path, surface_to_image(values, bit_depth), bit_depth)


def sample_face_path() -> Path:
    """Bundled 120x120 8-bit grayscale face (public-domain NASA portrait crop)."""
    return Path(__file__).with_name("data") / "face120.pgm"


def sample_face() -> Surface:
    return load_surface(sample_face_path())

"""Grayscale images as explicit sums of anisotropic 2D Gaussians."""

from gaussimage.model import (
    ConstraintViolation,
    GaussianElement,
    MixtureModel,
    RawParameterVector,
    ShapeError,
    build_precision,
    decode,
    encode,
    eval_element,
    eval_mixture,
)
from gaussimage.raster import (
    FormatError,
    Surface,
    grid,
    image_to_surface,
    load_surface,
    render,
    sample_face,
    save_surface,
    surface_to_image,
)
from gaussimage.fit import EmptyMaskError, FitConfig, FitTrace, fit
from gaussimage.transform import rotate, scale, translate
from gaussimage.modelfile import load_model, save_model

__version__ = "0.1.0"

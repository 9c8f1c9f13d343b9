"""Regenerate the bundled 120x120 grayscale face used by the tests.

Source: ``skimage.data.astronaut()`` (NASA portrait, public domain), cropped
around the face, converted with Rec. 601 luma and resized with a Lanczos filter.
"""

import argparse
from pathlib import Path

import numpy as np
from PIL import Image
from skimage import data

from gaussimage.raster import image_to_surface, save_surface

CROP = (55, 155, 195, 295)  # top, left, bottom, right: face fills the frame


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Path(__file__).resolve().parents[1] / "src/gaussimage/data/face120.pgm")
    args = ap.parse_args()

    top, left, bottom, right = CROP
    rgb = data.astronaut()[top:bottom, left:right]
    gray = image_to_surface(rgb, 8).data
    small = Image.fromarray(np.round(gray * 255).astype(np.uint8)).resize((120, 120), Image.LANCZOS)
    save_surface(args.out, np.asarray(small) / 255.0)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

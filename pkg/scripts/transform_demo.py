"""Fit the bundled face once, then translate, scale and rotate the model in closed form.

Writes one PNG per edit plus a montage.  No pixel resampling is involved: each
output is a fresh render of the edited parameters.

    python scripts/transform_demo.py [--elements 80] [--iters 5000] [--out results/]
"""

import argparse
import math
from pathlib import Path

import numpy as np

from gaussimage.fit import FitConfig, fit
from gaussimage.raster import render, sample_face, save_surface
from gaussimage.transform import rotate, scale, translate

EDITS = [
    ("original", lambda m: m),
    ("right_0.2", lambda m: translate(m, (0.0, 0.2))),
    ("left_0.2", lambda m: translate(m, (0.0, -0.2))),
    ("down_0.2", lambda m: translate(m, (0.2, 0.0))),
    ("up_0.2", lambda m: translate(m, (-0.2, 0.0))),
    ("zoom_2", lambda m: scale(m, 2.0)),
    ("shrink_0.5", lambda m: scale(m, 0.5)),
    ("rotate_30", lambda m: rotate(m, math.radians(30))),
    ("rotate_45", lambda m: rotate(m, math.radians(45))),
    ("rotate_60", lambda m: rotate(m, math.radians(60))),
    ("rotate_90", lambda m: rotate(m, math.radians(90))),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--elements", type=int, default=80)
    ap.add_argument("--iters", type=int, default=5000)
    ap.add_argument("--size", type=int, default=120, help="render resolution")
    ap.add_argument("--out", type=Path, default=Path("results/transforms"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    model, trace = fit(sample_face(), None, FitConfig(n_elements=args.elements, max_iters=args.iters))
    print(f"fitted {args.elements} elements in {trace.iterations} iterations, mse={trace.l2[trace.best_iteration]:.6f}")

    tiles = []
    for name, edit in EDITS:
        img = np.clip(render(edit(model), args.size, args.size), 0, 1)
        save_surface(args.out / f"{name}.png", img)
        tiles.append(img)
    pad = len(tiles) % 4 and 4 - len(tiles) % 4
    tiles += [np.zeros_like(tiles[0])] * pad
    montage = np.vstack([np.hstack(tiles[i : i + 4]) for i in range(0, len(tiles), 4)])
    save_surface(args.out / "montage.png", montage)
    print(f"wrote {len(EDITS)} renders and montage.png to {args.out}")


if __name__ == "__main__":
    main()

"""Fit one image at N = 40..90 elements and plot final MSE against N.

    python scripts/element_sweep.py [--image face.png] [--iters 5000] [--out results/]
"""

import argparse
import time
from pathlib import Path

from gaussimage import metrics
from gaussimage.experiments import ELEMENT_COUNTS
from gaussimage.fit import FitConfig, fit
from gaussimage.raster import load_surface, render, sample_face_path, save_surface


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--image", type=Path, default=sample_face_path())
    ap.add_argument("--iters", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/element_sweep"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    target = load_surface(args.image)
    rows = []
    for n in ELEMENT_COUNTS:
        start = time.perf_counter()
        model, trace = fit(target, None, FitConfig(n_elements=n, max_iters=args.iters, seed=args.seed))
        pred = render(model, *target.shape)
        err = metrics.mse(pred, target)
        rows.append((n, err, trace.iterations, time.perf_counter() - start))
        save_surface(args.out / f"fit_N{n}.png", pred)
        print(f"N={n:3d}  mse={err:.6f}  psnr={metrics.psnr(pred, target):.2f} dB  iters={trace.iterations}  {rows[-1][3]:.1f}s")

    with open(args.out / "sweep.csv", "w") as fh:
        fh.write("n_elements,mse,iterations,seconds\n")
        for n, err, iters, secs in rows:
            fh.write(f"{n},{err!r},{iters},{secs:.2f}\n")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    fig, ax = plt.subplots(figsize=(4, 3))
    ax.plot([r[0] for r in rows], [r[1] for r in rows], "o-")
    ax.set_xlabel("number of elements")
    ax.set_ylabel("MSE")
    fig.tight_layout()
    fig.savefig(args.out / "sweep.png", dpi=150)


if __name__ == "__main__":
    main()

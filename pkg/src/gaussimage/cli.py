"""Command-line entry point: ``gaussimage <subcommand> ...``.

Exit codes: 0 success, 1 bad flags, 2 unreadable/malformed input, 3 nothing to
fit (empty mask or empty input directory).  Diagnostics go to stderr; the one
result line per command goes to stdout.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from gaussimage import corrupt, experiments, metrics, transform
from gaussimage.fit import EmptyMaskError, FitConfig, extreme_pixel_mask, fit
from gaussimage.model import ShapeError
from gaussimage.modelfile import ModelFormatError, load_model, save_model
from gaussimage.raster import FormatError, load_surface, read_image, render, save_surface, write_image

log = logging.getLogger("gaussimage")

EXIT_FLAGS = 1
EXIT_INPUT = 2
EXIT_EMPTY = 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


def _fmt(v: float) -> str:
    return "inf" if math.isinf(v) else repr(float(v))


def _surface(path):
    try:
        return load_surface(path)
    except (FormatError, OSError) as exc:
        raise InputError(str(exc)) from exc


def _model(path):
    try:
        return load_model(path)
    except ModelFormatError as exc:
        raise InputError(str(exc)) from exc


def _mask(path, shape):
    if path is None or str(path).lower() == "none":
        return None
    try:
        pixels, _ = read_image(path)
    except (FormatError, OSError) as exc:
        raise InputError(str(exc)) from exc
    if pixels.ndim == 3:
        pixels = pixels[..., :3].max(axis=2)
    if pixels.shape != tuple(shape):
        raise InputError(f"mask {path} is {pixels.shape}, image is {tuple(shape)}")
    return pixels > 0


def _write_mask(path, observed):
    write_image(path, np.where(observed, 255, 0))


# --- subcommands ---------------------------------------------------------------


def cmd_fit(args):
    target = _surface(args.input)
    mask = _mask(args.mask, target.shape)
    if args.exclude_extremes:
        extremes = extreme_pixel_mask(target)
        mask = extremes if mask is None else mask & extremes
    try:
        config = FitConfig(
            n_elements=args.elements, alpha=args.alpha, learning_rate=args.lr,
            max_iters=args.iters, seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    model, trace = fit(target, mask, config)
    best = trace.best_iteration
    final = {"mse": float(trace.l2[best]), "pae": float(trace.pae[best]), "total": float(trace.total[best])}
    model.provenance.update(
        fit_config=config.to_dict(),
        final_losses=final,
        iterations=trace.iterations,
        termination=trace.termination,
        raw_theta=[float(v) for v in trace.raw.theta],
    )
    save_model(model, args.out)
    if args.trace:
        trace.write_csv(args.trace)
    print(f"mse={_fmt(final['mse'])} pae={_fmt(final['pae'])} iterations={trace.iterations} termination={trace.termination}")


def cmd_render(args):
    model = _model(args.model)
    dims = model.source_dims or (120, 120)
    H = args.height or dims[0]
    W = args.width or dims[1]
    save_surface(args.out, render(model, H, W))
    print(f"wrote {args.out} {H}x{W}")


def cmd_transform(args):
    model = _model(args.model)
    if args.center is not None and args.rotate is None:
        raise UsageError("--center only applies to --rotate")
    if args.translate is not None:
        out = transform.translate(model, args.translate)
    elif args.scale is not None:
        try:
            out = transform.scale(model, args.scale)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        center = args.center if args.center is not None else (0.5, 0.5)
        out = transform.rotate(model, math.radians(args.rotate), center)
    out.provenance.update(model.provenance)
    out.provenance.pop("raw_theta", None)
    save_model(out, args.out)
    print(f"wrote {args.out}")


def cmd_corrupt(args):
    clean = _surface(args.input)
    try:
        if args.mode == "occlude":
            ph, pw = args.patch
            noisy, report = corrupt.occlude(clean, ph, pw, args.seed, fill=args.fill)
        elif args.mode == "awgn":
            noisy, report = corrupt.awgn(clean, args.sigma, args.seed)
        else:
            noisy, report = corrupt.salt_pepper(clean, args.ratio, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    save_surface(args.out, noisy)
    if args.mask_out:
        _write_mask(args.mask_out, report.observed)
    print(f"kind={report.kind} affected={int(report.affected.sum())} mse={_fmt(metrics.mse(noisy, clean))}")


def cmd_eval(args):
    a = _surface(args.image_a)
    b = _surface(args.image_b)
    if a.shape != b.shape:
        raise InputError(f"image sizes differ: {a.shape} vs {b.shape}")
    mask = _mask(args.mask, a.shape)
    if mask is not None and not mask.any():
        raise EmptyMaskError("mask has no observed pixels")
    print(f"mse={_fmt(metrics.mse(a, b, mask))} pae={_fmt(metrics.pae(a, b, mask))} psnr={_fmt(metrics.psnr(a, b, mask))}")


def cmd_experiment(args):
    directory = Path(args.input)
    if not directory.is_dir():
        raise InputError(f"{directory} is not a directory")
    images = experiments.find_images(directory)
    if not images:
        print(f"no .png/.pgm images in {directory}", file=sys.stderr)
        return EXIT_EMPTY
    try:
        base = FitConfig(n_elements=args.elements, alpha=args.alpha, learning_rate=args.lr,
                         max_iters=args.iters, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = experiments.run_suite(args.suite, images, base, jobs=args.jobs)
    experiments.write_report(rows, args.out)
    print(f"wrote {args.out} rows={len(rows)}")


# --- parser --------------------------------------------------------------------


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _fit_flags(p, elements=80):
    defaults = FitConfig()
    p.add_argument("--elements", type=_positive_int, default=elements)
    p.add_argument("--alpha", type=float, default=defaults.alpha, help="weight of the peak-absolute-error term")
    p.add_argument("--lr", type=float, default=defaults.learning_rate)
    p.add_argument("--iters", type=int, default=defaults.max_iters)
    p.add_argument("--seed", type=int, default=defaults.seed)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gaussimage", description="Fit, render and edit Gaussian-mixture image models.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a model to an image")
    p.add_argument("input")
    _fit_flags(p)
    p.add_argument("--mask", default=None, help="image whose nonzero pixels are observed, or 'none'")
    p.add_argument("--exclude-extremes", action="store_true", help="ignore pixels exactly at 0 or 1 (salt-and-pepper)")
    p.add_argument("--out", required=True)
    p.add_argument("--trace", default=None, help="CSV of iteration,l2,pae,total")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("render", help="render a model file to PNG/PGM")
    p.add_argument("model")
    p.add_argument("--width", type=_positive_int)
    p.add_argument("--height", type=_positive_int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("transform", help="translate, scale or rotate a model")
    p.add_argument("model")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--translate", type=float, nargs=2, metavar=("DX", "DY"))
    group.add_argument("--scale", type=float, metavar="K")
    group.add_argument("--rotate", type=float, metavar="DEG", help="angle in degrees")
    p.add_argument("--center", type=float, nargs=2, metavar=("CX", "CY"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("corrupt", help="occlude or add noise to an image")
    p.add_argument("input")
    p.add_argument("--mode", choices=("occlude", "awgn", "saltpepper"), required=True)
    p.add_argument("--patch", type=_positive_int, nargs=2, metavar=("H", "W"), default=(40, 40))
    p.add_argument("--fill", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=25.0, help="noise std in 8-bit units")
    p.add_argument("--ratio", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--mask-out", default=None)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("eval", help="compare two images")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.add_argument("--mask", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("experiment", help="run a reproduction suite over a directory of images")
    p.add_argument("--suite", choices=experiments.SUITES, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    _fit_flags(p)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or 0
    except UsageError as exc:
        print(f"gaussimage: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except (InputError, ShapeError) as exc:
        print(f"gaussimage: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyMaskError as exc:
        print(f"gaussimage: {exc}", file=sys.stderr)
        return EXIT_EMPTY


if __name__ == "__main__":
    sys.exit(main())

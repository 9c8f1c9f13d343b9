"""Desk-scale reproductions of the element-count, restoration and denoising protocols.

All suites share one CSV schema::

    suite,image,setting,n_elements,mse_input,mse_fit,pae_fit,psnr_fit,iterations

``mse_input`` is the error of the (possibly corrupted) fitting target against
the clean image, ``mse_fit`` the error of the rendered fit against the clean
image.  Rows come out in a fixed order regardless of ``jobs``.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from gaussimage import corrupt, metrics
from gaussimage.fit import FitConfig, extreme_pixel_mask, fit
from gaussimage.raster import Surface, load_surface, render

SUITES = ("elements-sweep", "restore", "denoise")
ELEMENT_COUNTS = (40, 50, 60, 70, 80, 90)
PATCH_SIZES = (40, 60)
NOISE_SIGMAS = (25, 50)
DROP_RATIOS = (0.25, 0.50)
IMAGE_SUFFIXES = (".png", ".pgm")
COLUMNS = ("suite", "image", "setting", "n_elements", "mse_input", "mse_fit", "pae_fit", "psnr_fit", "iterations")


@dataclass(frozen=True)
class Task:
    suite: str
    image: str
    setting: str
    config: FitConfig


def find_images(directory) -> list[Path]:
    directory = Path(directory)
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def tasks_for(suite: str, images: list[Path], base: FitConfig) -> list[Task]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    tasks = []
    for path in images:
        name = str(path)
        if suite == "elements-sweep":
            tasks += [Task(suite, name, f"N={n}", replace(base, n_elements=n)) for n in ELEMENT_COUNTS]
        elif suite == "restore":
            tasks.append(Task(suite, name, "clean", base))
            tasks += [Task(suite, name, f"occlude{p}x{p}", base) for p in PATCH_SIZES]
        else:
            tasks += [Task(suite, name, f"awgn{s}", base) for s in NOISE_SIGMAS]
            tasks += [Task(suite, name, f"saltpepper{int(r * 100)}", base) for r in DROP_RATIOS]
    return tasks


def corrupted_target(clean: Surface, setting: str, seed: int):
    """Fitting target and observation mask for a setting label."""
    if setting == "clean" or setting.startswith("N="):
        return clean, None
    if setting.startswith("occlude"):
        size = int(setting[len("occlude"):].split("x")[0])
        noisy, report = corrupt.occlude(clean, size, size, seed)
        return noisy, report.observed
    if setting.startswith("awgn"):
        noisy, _ = corrupt.awgn(clean, float(setting[len("awgn"):]), seed)
        return noisy, None
    if setting.startswith("saltpepper"):
        noisy, _ = corrupt.salt_pepper(clean, int(setting[len("saltpepper"):]) / 100, seed)
        # blind to the true drop positions: exclude pixels sitting exactly at 0 or 1
        return noisy, extreme_pixel_mask(noisy)
    raise ValueError(f"unknown setting {setting!r}")


def run_task(task: Task) -> dict:
    clean = load_surface(task.image)
    target, mask = corrupted_target(clean, task.setting, task.config.seed)
    model, trace = fit(target, mask, task.config)
    pred = render(model, clean.height, clean.width)
    return {
        "suite": task.suite,
        "image": Path(task.image).name,
        "setting": task.setting,
        "n_elements": task.config.n_elements,
        "mse_input": metrics.mse(target, clean),
        "mse_fit": metrics.mse(pred, clean),
        "pae_fit": metrics.pae(pred, clean),
        "psnr_fit": metrics.psnr(pred, clean),
        "iterations": trace.iterations,
    }


def run_suite(suite: str, images: list[Path], base: FitConfig, jobs: int = 1) -> list[dict]:
    tasks = tasks_for(suite, images, base)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_task, tasks))
    return [run_task(t) for t in tasks]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_report(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in COLUMNS])


def read_report(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def mse_by_setting(rows) -> dict[str, float]:
    return {r["setting"]: float(r["mse_fit"]) for r in rows}


def summarize(rows) -> dict[str, float]:
    """Average mse_fit per setting across images."""
    acc: dict[str, list[float]] = {}
    for r in rows:
        acc.setdefault(r["setting"], []).append(float(r["mse_fit"]))
    return {k: float(np.mean(v)) for k, v in acc.items()}

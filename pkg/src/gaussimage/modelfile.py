"""JSON model files.

Layout (format_version 1)::

    {
      "format_version": 1,
      "n_elements": N,
      "elements": [{"w": w, "mu": [x1, x2], "A": [[a11, a12], [a21, a22]]}, ...],
      "provenance": {"source_dims": [H, W], "fit_config": {...},
                     "final_losses": {...}, "raw_theta": [...]}
    }

Floats are written with Python's shortest round-trip repr, so loading a saved
file reproduces every number bit for bit.  ``provenance`` is optional.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from gaussimage.model import GaussianElement, MixtureModel
from gaussimage.raster import FormatError

FORMAT_VERSION = 1


class ModelFormatError(FormatError):
    """The file is not a valid model file."""


def to_dict(model: MixtureModel) -> dict:
    elements = [
        {
            "w": float(e.w),
            "mu": [float(e.mu[0]), float(e.mu[1])],
            "A": [[float(e.A[0, 0]), float(e.A[0, 1])], [float(e.A[1, 0]), float(e.A[1, 1])]],
        }
        for e in model.elements
    ]
    doc = {"format_version": FORMAT_VERSION, "n_elements": model.n_elements, "elements": elements}
    provenance = dict(model.provenance)
    if model.source_dims is not None:
        provenance["source_dims"] = list(model.source_dims)
    if provenance:
        doc["provenance"] = provenance
    return doc


def dumps(model: MixtureModel) -> str:
    """Serialize with one element per line; the result is valid JSON."""
    doc = to_dict(model)

    def enc(v):
        return json.dumps(v, allow_nan=False)

    try:
        parts = [f' "format_version": {enc(doc["format_version"])}', f' "n_elements": {enc(doc["n_elements"])}']
        elements = ",\n".join(f"  {enc(e)}" for e in doc["elements"])
        parts.append(f' "elements": [\n{elements}\n ]')
        if "provenance" in doc:
            parts.append(f' "provenance": {enc(doc["provenance"])}')
    except ValueError as exc:
        raise ModelFormatError(f"model contains non-finite values: {exc}") from exc
    return "{\n" + ",\n".join(parts) + "\n}\n"


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ModelFormatError(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def from_dict(doc) -> MixtureModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model file must contain a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {doc.get('format_version')!r}")
    raw_elements = doc.get("elements")
    if not isinstance(raw_elements, list) or not raw_elements:
        raise ModelFormatError("'elements' must be a non-empty list")
    if doc.get("n_elements") != len(raw_elements):
        raise ModelFormatError(f"n_elements={doc.get('n_elements')!r} but {len(raw_elements)} elements listed")
    elements = []
    for i, item in enumerate(raw_elements):
        try:
            w = _number(item["w"], f"element {i} w")
            mu = [_number(v, f"element {i} mu") for v in item["mu"]]
            A = [[_number(v, f"element {i} A") for v in row] for row in item["A"]]
        except (KeyError, TypeError) as exc:
            raise ModelFormatError(f"element {i} is malformed: {exc}") from exc
        if len(mu) != 2 or len(A) != 2 or any(len(row) != 2 for row in A):
            raise ModelFormatError(f"element {i} has wrong dimensions")
        if A[0][1] != A[1][0]:
            raise ModelFormatError(f"element {i}: a12 != a21")
        elements.append(GaussianElement(w, np.array(mu), np.array(A)))
    provenance = doc.get("provenance") or {}
    if not isinstance(provenance, dict):
        raise ModelFormatError("'provenance' must be an object")
    provenance = dict(provenance)
    dims = provenance.pop("source_dims", None)
    if dims is not None:
        if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(d, int) and d > 0 for d in dims)):
            raise ModelFormatError(f"bad source_dims {dims!r}")
        dims = tuple(dims)
    return MixtureModel(tuple(elements), dims, provenance)


def loads(text: str) -> MixtureModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from exc
    return from_dict(doc)


def save_model(model: MixtureModel, path) -> None:
    Path(path).write_text(dumps(model))


def load_model(path) -> MixtureModel:
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    return loads(text)

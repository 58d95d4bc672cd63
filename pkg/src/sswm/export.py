"""Plain-text outputs: CSV tables, JSON sidecars and the run manifest."""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .grid import FrequencyGrid2D
from .params import SystemParams

FLOAT_FMT = "%.17g"
R3_CROP = 1e-6


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_table(path: Path, header: str, columns: list[np.ndarray], fmt: list[str] | None = None) -> Path:
    data = np.column_stack(columns)
    fmt = fmt or [FLOAT_FMT] * data.shape[1]
    with open(path, "w", newline="\n") as fh:
        np.savetxt(fh, data, fmt=fmt, delimiter=",", header=header, comments="")
    return path


def write_spectrum(path: Path, grid: FrequencyGrid2D, values: np.ndarray) -> Path:
    n1, n2 = np.meshgrid(grid.nu1, grid.nu2, indexing="ij")
    v = values.ravel()
    return _write_table(path, "nu1,nu2,re,im,abs",
                        [n1.ravel(), n2.ravel(), v.real, v.imag, np.abs(v)])


def write_r3(path: Path, tau31: np.ndarray, tau32: np.ndarray, r3: np.ndarray,
             crop: float = R3_CROP) -> Path:
    """Rows with r3 >= ``crop``; the surface is dense, the tails are not."""
    i, j = np.nonzero(r3 >= crop)
    return _write_table(path, "tau31,tau32,r3", [tau31[i], tau32[j], r3[i, j]])


def write_r2(path: Path, tau: np.ndarray, r2: np.ndarray, traced_over: str) -> Path:
    with open(path, "w", newline="\n") as fh:
        fh.write("tau,r2,traced_over\n")
        for t, r in zip(tau, r2):
            fh.write(f"{FLOAT_FMT % t},{FLOAT_FMT % r},{traced_over}\n")
    return path


def write_rows(path: Path, header: list[str], rows: list[tuple]) -> Path:
    def cell(x):
        if x is None:
            return ""
        if isinstance(x, (float, np.floating)):
            return "" if math.isnan(x) else FLOAT_FMT % x
        return str(x)

    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(cell(x) for x in row) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json(path: Path, doc: dict) -> Path:
    with open(path, "w", newline="\n") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def run_header(params: SystemParams, grid: FrequencyGrid2D, preset: str | None) -> dict:
    return {"preset": preset, "params": params.to_dict(), "grid": grid.to_dict()}


class Manifest:
    """Collects every file a command writes; written last as manifest.json."""

    def __init__(self, out_dir: Path, command: str, version: str):
        self.out_dir = Path(out_dir)
        self.doc: dict = {"command": command, "version": version, "outputs": []}

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def add(self, path: Path, kind: str) -> None:
        self.doc["outputs"].append({
            "path": path.name, "kind": kind, "bytes": path.stat().st_size, "sha256": sha256(path),
        })

    def update(self, **fields) -> None:
        self.doc.update(fields)

    def write(self, wall_time: float) -> Path:
        self.doc["wall_time_s"] = wall_time
        return write_json(self.out_dir / "manifest.json", self.doc)

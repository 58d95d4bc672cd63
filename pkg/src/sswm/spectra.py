"""Grid evaluation of spectral fields, dressed-state resonances and peak analysis."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import response
from .errors import GridTooCoarseError, OverdampedError, QuantityError, ResourceError, NumericPreconditionError
from .grid import FrequencyGrid2D
from .params import SystemParams
from .propagation import kernel

QUANTITIES = ("chi_s3", "chi5_he", "chi5_pcr_s1", "chi5_pcr_s2", "chi5_pcr_s3", "kernel")
MAX_GRID_POINTS = 1 << 24
_ROW_BLOCK = 128


def worker_count() -> int:
    raw = os.environ.get("SSWM_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


@dataclass(frozen=True)
class SpectralField2D:
    grid: FrequencyGrid2D
    values: np.ndarray
    quantity: str
    params: SystemParams | None = None

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid {self.grid.shape}")

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


def _pointwise(quantity: str):
    funcs = {
        "chi_s3": response.chi_s3_he,
        "chi5_he": response.chi5_he,
        "chi5_pcr_s1": response.chi5_pcr_s1,
        "chi5_pcr_s2": response.chi5_pcr_s2,
        "chi5_pcr_s3": response.chi5_pcr_s3,
        "kernel": kernel,
    }
    try:
        return funcs[quantity]
    except KeyError:
        raise QuantityError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}") from None


def _sample(func, params, grid: FrequencyGrid2D, workers: int) -> np.ndarray:
    nu1 = grid.nu1
    nu2 = grid.nu2[None, :]
    out = np.empty(grid.shape, dtype=complex)

    def block(start):
        stop = min(start + _ROW_BLOCK, grid.n1)
        out[start:stop] = func(params, nu1[start:stop, None], nu2)

    starts = range(0, grid.n1, _ROW_BLOCK)
    if workers > 1 and grid.n1 > _ROW_BLOCK:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(block, starts))
    else:
        for start in starts:
            block(start)
    return out


def resolve_chi5_scale(params: SystemParams, grid: FrequencyGrid2D, workers: int | None = None) -> SystemParams:
    """Fix an unset chi5 scale so that max |chi5| on ``grid`` is 1."""
    if params.chi5_scale is not None:
        return params
    raw = _sample(response.chi5_unscaled, params, grid, workers or worker_count())
    return params.replace(chi5_scale=1.0 / float(np.max(np.abs(raw))))


def evaluate(quantity: str, params: SystemParams, grid: FrequencyGrid2D,
             max_points: int = MAX_GRID_POINTS, workers: int | None = None) -> SpectralField2D:
    func = _pointwise(quantity)
    if grid.size > max_points:
        raise ResourceError(f"grid of {grid.size} points exceeds the cap of {max_points}")
    workers = workers or worker_count()
    if quantity in ("chi5_he", "kernel"):
        params = resolve_chi5_scale(params, grid, workers)
    values = _sample(func, params, grid, workers)
    if not np.all(np.isfinite(values)):
        from .errors import InvariantError
        raise InvariantError(f"non-finite samples in {quantity}")
    return SpectralField2D(grid, values, quantity, params)


# --- resonance predictions ---------------------------------------------------

@dataclass(frozen=True)
class ResonancePrediction:
    """Closed-form dressed-state resonances in gamma_31 units.

    ``pathways`` holds (nu1, nu2, nu3) in the detuning frame used by the
    susceptibility functions.
    """

    omega_e1: float
    omega_e2: float
    gamma_e1: float
    gamma_e2: float
    nu1_peaks: tuple[float, float]
    nu2_peaks: tuple[float, float, float, float]
    pathways: tuple[tuple[float, float, float], ...]

    def pathway_points(self) -> np.ndarray:
        return np.array([(a, b) for a, b, _ in self.pathways])


def emission_linewidths(params: SystemParams) -> tuple[float, float]:
    return 0.5 * (params.gamma_41 + params.gamma_51), 0.5 * (params.gamma_21 + params.gamma_31)


def predicted_resonances(params: SystemParams) -> ResonancePrediction:
    p = params
    rad1 = 4 * abs(p.omega_c1) ** 2 - (p.gamma_41 - p.gamma_51) ** 2
    rad2 = 4 * abs(p.omega_c2) ** 2 - (p.gamma_31 - p.gamma_21) ** 2
    if rad1 <= 0 or rad2 <= 0:
        raise OverdampedError("overdamped dressing: no closed-form resonance splitting")
    oe1 = math.sqrt(rad1)
    oe2 = math.sqrt(rad2)
    ge1, ge2 = emission_linewidths(p)
    dp = p.delta_p
    nu1_peaks = (dp + oe1 / 2, dp - oe1 / 2)
    nu2_peaks = tuple(-dp + a * oe1 / 2 + b * oe2 / 2 for a in (1, -1) for b in (1, -1))
    pathways = []
    for a, b in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        n1 = dp - a * oe1 / 2
        n2 = -dp + a * oe1 / 2 - b * oe2 / 2
        pathways.append((n1, n2, -(n1 + n2)))
    return ResonancePrediction(oe1, oe2, ge1, ge2, nu1_peaks, nu2_peaks, tuple(pathways))


def _quadratic_resonances(params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Real parts of the complex zeros of the two dressing factors of D.

    Valid for any detunings; used only to size grids.
    """
    p = params
    om1 = abs(p.omega_c1) ** 2
    om2 = abs(p.omega_c2) ** 2
    g41 = complex(-p.gamma_41, p.delta_p)
    g51 = complex(-p.gamma_51, p.delta_p + p.delta_c1)
    # (g41 - i nu)(g51 - i nu) + om1 = -nu^2 - i (g41 + g51) nu + g41 g51 + om1
    r1 = np.roots([-1.0, -1j * (g41 + g51), g41 * g51 + om1])
    # (-i s - g21)(i (dc2 - s) - g31) + om2 in s
    a21 = -p.gamma_21
    b31 = complex(-p.gamma_31, p.delta_c2)
    r2 = np.roots([-1.0, -1j * (a21 + b31), a21 * b31 + om2])
    return np.sort(r1.real), np.sort(r2.real)


def auto_grid(params: SystemParams, margin_linewidths: float = 10.0,
              min_samples: int = 256, max_samples: int = 4096) -> FrequencyGrid2D:
    """Grid covering every dressing resonance with a margin of linewidths.

    Both axes share one spacing, below a fifth of the narrower emission
    linewidth. Equal spacing keeps nu1 + nu2 on a common lattice, so ridges
    along constant nu1 + nu2 are sampled identically in every row.
    """
    ge1, ge2 = emission_linewidths(params)
    margin = margin_linewidths * max(ge1, ge2)
    r1, rs = _quadratic_resonances(params)
    nu2_sites = np.array([s - n for n in r1 for s in rs])
    lo1, hi1 = r1.min() - margin, r1.max() + margin
    lo2, hi2 = nu2_sites.min() - margin, nu2_sites.max() + margin
    spacing = min(ge1, ge2) / 5

    def samples(span):
        n = min_samples
        while n * spacing < span and n < max_samples:
            n *= 2
        return n

    n1, n2 = samples(hi1 - lo1), samples(hi2 - lo2)
    spacing = max(spacing, (hi1 - lo1) / n1, (hi2 - lo2) / n2)
    return FrequencyGrid2D(float(0.5 * (lo1 + hi1)), float(n1 * spacing), n1,
                           float(0.5 * (lo2 + hi2)), float(n2 * spacing), n2)


# --- peaks and symmetry ----------------------------------------------------------

@dataclass(frozen=True)
class Peak:
    nu1: float
    nu2: float
    magnitude: float
    index: tuple[int, int]


def check_resolution(field: SpectralField2D) -> None:
    if field.params is None:
        return
    ge1, ge2 = emission_linewidths(field.params)
    limit = min(ge1, ge2) / 4
    spacing = max(field.grid.d1, field.grid.d2)
    if spacing >= limit:
        raise GridTooCoarseError(
            f"grid spacing {spacing:.4g} is not below min(gamma_e1, gamma_e2)/4 = {limit:.4g}")


def find_peaks(field: SpectralField2D, threshold: float = 0.5) -> list[Peak]:
    """Strict interior local maxima of |value| over 8-neighbourhoods.

    Only maxima above ``threshold`` times the global maximum are kept. Sorted
    by magnitude (descending), ties broken by nu1 then nu2 ascending.
    """
    check_resolution(field)
    mag = field.magnitude
    footprint = np.ones((3, 3), dtype=bool)
    footprint[1, 1] = False
    neighbour_max = ndimage.maximum_filter(mag, footprint=footprint, mode="constant", cval=-np.inf)
    strict = mag > neighbour_max
    strict[[0, -1], :] = False
    strict[:, [0, -1]] = False
    gmax = mag.max()
    strict &= mag > threshold * gmax
    nu1, nu2 = field.grid.nu1, field.grid.nu2
    peaks = [Peak(float(nu1[i]), float(nu2[j]), float(mag[i, j]), (int(i), int(j)))
             for i, j in np.argwhere(strict)]
    peaks.sort(key=lambda p: (-p.magnitude, p.nu1, p.nu2))
    return peaks


def peak_centroid(field: SpectralField2D, threshold: float = 0.5) -> tuple[float, float]:
    peaks = find_peaks(field, threshold)
    if not peaks:
        raise NumericPreconditionError("no peaks found; symmetry centre undefined")
    return (float(np.mean([p.nu1 for p in peaks])), float(np.mean([p.nu2 for p in peaks])))


def central_symmetry_residual(field: SpectralField2D, threshold: float = 0.5,
                              center: tuple[float, float] | None = None) -> float:
    """max ||v(c + d)| - |v(c - d)|| / max|v| over the grid, c the peak centroid.

    The mirrored magnitude is bilinearly interpolated; lattice points whose
    mirror image falls outside the grid are skipped.
    """
    if center is None:
        center = peak_centroid(field, threshold)
    g = field.grid
    mag = field.magnitude
    # fractional index of the mirror point 2c - nu
    c1 = (center[0] - g.nu1[0]) / g.d1
    c2 = (center[1] - g.nu2[0]) / g.d2
    i = np.arange(g.n1)[:, None]
    j = np.arange(g.n2)[None, :]
    mi = np.broadcast_to(2 * c1 - i, g.shape)
    mj = np.broadcast_to(2 * c2 - j, g.shape)
    inside = (mi >= 0) & (mi <= g.n1 - 1) & (mj >= 0) & (mj <= g.n2 - 1)
    mirrored = ndimage.map_coordinates(mag, [mi[inside], mj[inside]], order=1, mode="nearest")
    return float(np.max(np.abs(mag[inside] - mirrored)) / mag.max())


# --- EIT landscapes ----------------------------------------------------------------

def eit_landscape(params: SystemParams, nu3_axis) -> tuple[np.ndarray, np.ndarray]:
    """Re and Im of the s3 linear susceptibility along its own detuning nu3."""
    nu3 = np.asarray(nu3_axis, dtype=float)
    if nu3.max() - nu3.min() < 6 * abs(params.omega_c2):
        raise NumericPreconditionError("nu3 axis must span at least 6 |Omega_c2|")
    chi = response.chi_s3_he(params, -nu3, 0.0)
    return chi.real, chi.imag


def eit_landscape_2d(params: SystemParams, grid: FrequencyGrid2D) -> SpectralField2D:
    return evaluate("chi_s3", params, grid)

"""Triphoton amplitude, coincidence rates and temporal-regime diagnostics.

Transforms follow A3(t31, t32) = sum K(nu1, nu2) exp(i (nu1 t31 + nu2 t32)) dnu1 dnu2
on the lattice of a :class:`FrequencyGrid2D`; time is in units of 1/gamma_31.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy.signal import argrelmax

from .errors import ConfigError, NumericPreconditionError, OverdampedError
from .grid import FrequencyGrid2D
from .params import SystemParams
from .propagation import SINC_HALF_POWER_ARG, eit_metrics, kernel
from .spectra import (SpectralField2D, emission_linewidths, evaluate, predicted_resonances,
                      resolve_chi5_scale, worker_count)

log = logging.getLogger(__name__)

LEAKAGE_LIMIT = 1e-3
GROUP_DELAY_BELOW = 1.0 / 3.0
DAMPED_RABI_ABOVE = 3.0
REGIMES = ("DampedRabi", "GroupDelay", "Hybrid")


def normalize(values) -> tuple[np.ndarray, float]:
    """Scale to unit maximum; returns the scaled copy and the divisor used."""
    arr = np.asarray(values, dtype=float)
    peak = float(arr.max())
    if not peak > 0:
        raise NumericPreconditionError("cannot normalize an identically zero rate")
    return arr / peak, peak


def edge_ratio(values) -> float:
    """Largest magnitude on the outer frame over the global maximum."""
    mag = np.abs(values)
    frame = max(mag[[0, -1], :].max(), mag[:, [0, -1]].max())
    return float(frame / mag.max())


# --- transforms ------------------------------------------------------------------

@dataclass(frozen=True)
class Amplitude:
    grid: FrequencyGrid2D
    values: np.ndarray          # indexed [tau31, tau32]
    edge_ratio: float

    @property
    def tau31(self) -> np.ndarray:
        return self.grid.tau31

    @property
    def tau32(self) -> np.ndarray:
        return self.grid.tau32


def _inverse_axis(values: np.ndarray, axis: int, center: float, d: float, tau: np.ndarray,
                  workers: int) -> np.ndarray:
    n = values.shape[axis]
    out = sfft.fftshift(
        sfft.ifft(sfft.ifftshift(values, axes=axis), axis=axis, workers=workers), axes=axis)
    ramp = np.exp(1j * center * tau) * (n * d)
    shape = [1, 1]
    shape[axis] = n
    return out * ramp.reshape(shape)


def amplitude_a3(kernel_field: SpectralField2D, workers: int | None = None) -> Amplitude:
    if kernel_field.quantity != "kernel":
        raise ConfigError(f"amplitude_a3 needs a kernel field, got {kernel_field.quantity!r}")
    g = kernel_field.grid
    workers = workers or worker_count()
    ratio = edge_ratio(kernel_field.values)
    if ratio >= LEAKAGE_LIMIT:
        log.warning("kernel at grid edge is %.2e of its peak (limit %.0e); "
                    "a larger span reduces leakage", ratio, LEAKAGE_LIMIT)
    a = _inverse_axis(kernel_field.values, 0, g.nu1_center, g.d1, g.tau31, workers)
    a = _inverse_axis(a, 1, g.nu2_center, g.d2, g.tau32, workers)
    return Amplitude(g, a, ratio)


def kernel_field(params: SystemParams, grid: FrequencyGrid2D, workers: int | None = None) -> SpectralField2D:
    return evaluate("kernel", params, grid, workers=workers)


@dataclass(frozen=True)
class QuadratureResult:
    points: np.ndarray          # (k, 2) of (tau31, tau32)
    values: np.ndarray          # NaN where out of range
    in_range: np.ndarray


def _trapezoid_weights(n: int, d: float) -> np.ndarray:
    w = np.full(n, d)
    w[[0, -1]] *= 0.5
    return w


def quadrature_a3(params: SystemParams, points, grid: FrequencyGrid2D, kernel_fn=None) -> QuadratureResult:
    """Direct trapezoidal evaluation of the amplitude integral at a few times.

    An independent check on :func:`amplitude_a3`: no FFT, no phase ramps.
    ``kernel_fn(params, nu1, nu2)`` defaults to the triphoton kernel, with the
    chi5 scale fixed on ``grid`` exactly as :func:`evaluate` does. Points
    outside the transform's time extent are reported as out of range.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if kernel_fn is None:
        params = resolve_chi5_scale(params, grid)
        kernel_fn = kernel
    nu1, nu2 = grid.nu1, grid.nu2
    k = np.asarray(kernel_fn(params, nu1[:, None], nu2[None, :]), dtype=complex)
    k = np.broadcast_to(k, grid.shape)
    w1 = _trapezoid_weights(grid.n1, grid.d1)
    w2 = _trapezoid_weights(grid.n2, grid.d2)
    t31, t32 = grid.tau31, grid.tau32
    in_range = ((pts[:, 0] >= t31[0]) & (pts[:, 0] <= t31[-1])
                & (pts[:, 1] >= t32[0]) & (pts[:, 1] <= t32[-1]))
    values = np.full(len(pts), np.nan + 0j)
    for idx in np.flatnonzero(in_range):
        a, b = pts[idx]
        row = w1 * np.exp(1j * nu1 * a)
        col = w2 * np.exp(1j * nu2 * b)
        values[idx] = row @ (k @ col)
    return QuadratureResult(pts, values, in_range)


@dataclass(frozen=True)
class OracleRow:
    tau31: float
    tau32: float
    transform: complex
    quadrature: complex
    rel_dev: float


def oracle_probes(amplitude: Amplitude, k: int, seed: int = 0, level: float = 0.1) -> np.ndarray:
    """``k`` random interior lattice nodes where |A3|^2 is at least ``level`` of its max."""
    r = np.abs(amplitude.values) ** 2
    mask = r >= level * r.max()
    mask[[0, -1], :] = False
    mask[:, [0, -1]] = False
    cand = np.argwhere(mask)
    if len(cand) < k:
        raise NumericPreconditionError(f"only {len(cand)} nodes above {level} of max for {k} probes")
    rng = np.random.default_rng(seed)
    pick = cand[np.sort(rng.choice(len(cand), size=k, replace=False))]
    return pick


def oracle_table(params: SystemParams, grid: FrequencyGrid2D, k: int = 8, seed: int = 0,
                 amplitude: Amplitude | None = None) -> list[OracleRow]:
    """Transform vs quadrature on ``k`` probe nodes inside the amplitude's support."""
    params = resolve_chi5_scale(params, grid)
    if amplitude is None:
        amplitude = amplitude_a3(kernel_field(params, grid))
    idx = oracle_probes(amplitude, k, seed)
    pts = np.column_stack([grid.tau31[idx[:, 0]], grid.tau32[idx[:, 1]]])
    quad = quadrature_a3(params, pts, grid)
    rows = []
    for (i, j), (a, b), q in zip(idx, pts, quad.values):
        t = amplitude.values[i, j]
        rows.append(OracleRow(float(a), float(b), complex(t), complex(q), float(abs(q - t) / abs(t))))
    return rows


# --- rates -----------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationSurface:
    tau31_axis: np.ndarray
    tau32_axis: np.ndarray
    r3: np.ndarray
    normalization: float


def surface_from_amplitude(amplitude: Amplitude) -> CorrelationSurface:
    r, peak = normalize(np.abs(amplitude.values) ** 2)
    return CorrelationSurface(amplitude.tau31, amplitude.tau32, r, peak)


def r3(params: SystemParams, grid: FrequencyGrid2D) -> CorrelationSurface:
    return surface_from_amplitude(amplitude_a3(kernel_field(params, grid)))


@dataclass(frozen=True)
class ConditionalTrace:
    tau_axis: np.ndarray
    r2: np.ndarray
    traced_over: str
    normalization: float


def conditional_from_kernel(field: SpectralField2D, traced_over: str,
                            workers: int | None = None) -> ConditionalTrace:
    """R2 from a kernel field, tracing over the undetected photon's frequency.

    ``traced_over="s1"`` transforms along nu2 and sums over nu1, giving R2(tau32);
    ``"s2"`` is the mirrored construction giving R2(tau31).
    """
    g = field.grid
    workers = workers or worker_count()
    if traced_over == "s1":
        a = _inverse_axis(field.values, 1, g.nu2_center, g.d2, g.tau32, workers)
        rate = (np.abs(a) ** 2).sum(axis=0) * g.d1
        tau = g.tau32
    elif traced_over == "s2":
        a = _inverse_axis(field.values, 0, g.nu1_center, g.d1, g.tau31, workers)
        rate = (np.abs(a) ** 2).sum(axis=1) * g.d2
        tau = g.tau31
    else:
        raise ConfigError(f"traced_over must be 's1' or 's2', got {traced_over!r}")
    r, peak = normalize(rate)
    return ConditionalTrace(tau, r, traced_over, peak)


def r2_conditional(params: SystemParams, grid: FrequencyGrid2D, traced_over: str) -> ConditionalTrace:
    return conditional_from_kernel(kernel_field(params, grid), traced_over)


# --- regimes ---------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeReport:
    regime: str
    delta_omega_tr: float       # rad/s
    delta_omega_sl: float       # rad/s
    gamma_e_min: float          # rad/s
    ratio: float                # min(tr, sl) / gamma_e_min
    overdamped: bool = False

    @staticmethod
    def regime_for(delta_omega_tr: float, delta_omega_sl: float, gamma_e_min: float) -> tuple[str, float]:
        rho = min(delta_omega_tr, delta_omega_sl) / gamma_e_min
        if rho < GROUP_DELAY_BELOW:
            return "GroupDelay", rho
        if rho > DAMPED_RABI_ABOVE:
            return "DampedRabi", rho
        return "Hybrid", rho

    def recomputed(self) -> str:
        return self.regime_for(self.delta_omega_tr, self.delta_omega_sl, self.gamma_e_min)[0]

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "delta_omega_tr": self.delta_omega_tr,
            "delta_omega_sl": self.delta_omega_sl,
            "gamma_e_min": self.gamma_e_min,
            "ratio": self.ratio,
            "overdamped": self.overdamped,
        }


def classify_regime(params: SystemParams) -> RegimeReport:
    """Place a parameter set in the damped-Rabi, group-delay or hybrid regime.

    Overdamped dressing voids the splitting prediction but not the linewidths,
    so it is recorded on the report rather than raised.
    """
    m = eit_metrics(params)
    sl = 2 * SINC_HALF_POWER_ARG * m.v3 / params.length_L
    ge_min = min(emission_linewidths(params)) * params.gamma31_si
    try:
        predicted_resonances(params)
        overdamped = False
    except OverdampedError:
        overdamped = True
    regime, rho = RegimeReport.regime_for(m.omega_tr, sl, ge_min)
    return RegimeReport(regime, float(m.omega_tr), float(sl), float(ge_min), float(rho), overdamped)


# --- surface and trace diagnostics -----------------------------------------------

@dataclass(frozen=True)
class DiagonalMetrics:
    above: float                # mass fraction with tau31 > tau32
    below: float                # mass fraction with tau31 < tau32
    diagonal_band: float        # |tau31 - tau32| < 3 dtau
    antidiagonal_band: float    # |tau31 + tau32| < 3 dtau

    def to_dict(self) -> dict:
        return {"above": self.above, "below": self.below,
                "diagonal_band": self.diagonal_band, "antidiagonal_band": self.antidiagonal_band}


def diagonal_support_metric(surface: CorrelationSurface) -> DiagonalMetrics:
    """R3 mass split by the tau31 = tau32 line; points on the line count half to each side."""
    t1 = surface.tau31_axis[:, None]
    t2 = surface.tau32_axis[None, :]
    r = surface.r3
    total = r.sum()
    diff = t1 - t2
    dtau = max(np.diff(surface.tau31_axis[:2])[0], np.diff(surface.tau32_axis[:2])[0])
    on = diff == 0
    above = (r[diff > 0].sum() + 0.5 * r[np.broadcast_to(on, r.shape)].sum()) / total
    below = (r[diff < 0].sum() + 0.5 * r[np.broadcast_to(on, r.shape)].sum()) / total
    band = r[np.broadcast_to(np.abs(diff) < 3 * dtau, r.shape)].sum() / total
    anti = r[np.broadcast_to(np.abs(t1 + t2) < 3 * dtau, r.shape)].sum() / total
    return DiagonalMetrics(float(above), float(below), float(band), float(anti))


def oscillation_period(trace: ConditionalTrace, n_maxima: int = 5, floor: float = 1e-3) -> float:
    """Mean spacing of successive local maxima, walking from the global maximum
    into the decaying side of the trace."""
    r = trace.r2
    peaks = argrelmax(r)[0]
    peaks = peaks[r[peaks] > floor]
    top = int(np.argmax(r))
    after = peaks[peaks >= top]
    before = peaks[peaks <= top][::-1]
    side = after if len(after) >= len(before) else before
    if len(side) < 2:
        raise NumericPreconditionError("fewer than two maxima; no oscillation period")
    side = side[:n_maxima]
    return float(np.mean(np.abs(np.diff(trace.tau_axis[side]))))


def coherence_extent(trace: ConditionalTrace, level: float = float(np.exp(-1))) -> float:
    """Distance between the outermost samples at or above ``level``."""
    above = np.flatnonzero(trace.r2 >= level)
    return float(trace.tau_axis[above[-1]] - trace.tau_axis[above[0]])

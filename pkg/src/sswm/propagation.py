"""Phase matching, slow light and EIT figures of merit."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .params import C_LIGHT, SystemParams
from .response import chi5_he, chi_s3_he

_SERIES_RADIUS = 1e-6
# |sinc(x)|^2 = 1/2
SINC_HALF_POWER_ARG = 1.3915573782515103


def phi(x):
    """Complex phase-matching function sinc(x) * exp(-i x)."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < _SERIES_RADIUS
    xs = x[small]
    x2 = xs * xs
    out[small] = (1 - x2 / 6 + x2 * x2 / 120) * np.exp(-1j * xs)
    xb = x[~small]
    out[~small] = np.sin(xb) / xb * np.exp(-1j * xb)
    return out if out.ndim else out[()]


@dataclass(frozen=True)
class EitMetrics:
    v3: float          # m/s
    omega_tr: float    # rad/s
    delay: float       # s

    def in_gamma_units(self, params: SystemParams) -> dict:
        return {
            "v3_over_L": self.v3 / params.length_L / params.gamma31_si,
            "omega_tr": self.omega_tr / params.gamma31_si,
            "delay": self.delay * params.gamma31_si,
        }


def eit_metrics(params: SystemParams) -> EitMetrics:
    """Group velocity, transparency window and group delay of the s3 photon.

    The window defaults to |Omega_c2|^2 / (gamma_31 sqrt(8 OD)), which has
    frequency units. ``literal_omega_tr`` switches to |Omega_c2| / sqrt(8 OD)
    in gamma_31 units.
    """
    om2 = abs(params.omega_c2)
    if om2 == 0:
        raise ConfigError("omega_c2 = 0: no EIT channel for the s3 photon")
    g = params.gamma31_si
    od = params.optical_depth
    v3 = (om2 * g) ** 2 * params.length_L / (g * od)
    if params.literal_omega_tr:
        omega_tr = om2 / np.sqrt(8 * od) * g
    else:
        omega_tr = (om2 * g) ** 2 / (g * np.sqrt(8 * od))
    return EitMetrics(v3=v3, omega_tr=omega_tr, delay=params.length_L / v3)


def absorption_coefficient(params: SystemParams, nu1, nu2):
    """Non-negative s3 field attenuation rate (1/m) carried by Im(delta_k).

    The literal linear susceptibility has Im(chi_s3) >= 0; with the
    exp(-i x) factor of ``phi`` an attenuating medium needs Im(delta_k) <= 0,
    so the term enters delta_k with a minus sign.
    """
    kappa = params.central_freq_s3 * np.imag(chi_s3_he(params, nu1, nu2)) / C_LIGHT
    if params.halve_absorption:
        kappa = 0.5 * kappa
    return kappa


def delta_k(params: SystemParams, nu1, nu2):
    """Longitudinal wavenumber mismatch in 1/m (nu in gamma_31 units)."""
    m = eit_metrics(params)
    s = np.asarray(nu1, dtype=float) + np.asarray(nu2, dtype=float)
    real = params.k_offset - s * params.gamma31_si / m.v3
    return real - 1j * absorption_coefficient(params, nu1, nu2)


def kernel(params: SystemParams, nu1, nu2):
    """chi5 * phi(delta_k L / 2): the integrand of the triphoton amplitude."""
    x = delta_k(params, nu1, nu2) * (params.length_L / 2)
    return chi5_he(params, nu1, nu2) * phi(x)


def sinc_bandwidth(params: SystemParams) -> float:
    """Half-power width of |sinc(delta_k L/2)|^2 in nu1 + nu2, in gamma_31 units."""
    m = eit_metrics(params)
    return 2 * SINC_HALF_POWER_ARG * m.v3 / params.length_L / params.gamma31_si


def transparency_width(params: SystemParams, span: float | None = None, n: int = 400_001,
                       level: float = 0.5) -> float:
    """Full width of the EIT transparency dip seen through |phi|.

    Only the absorptive part of delta_k is kept, so the dip reflects the
    transmission window rather than the dispersive sinc bandwidth. The width
    is measured between the first crossings of ``level`` times the value at
    nu1 + nu2 = 0, on either side.
    """
    if span is None:
        span = 8 * abs(params.omega_c2)
    s = np.linspace(-span / 2, span / 2, n)
    x = -1j * absorption_coefficient(params, s, 0.0) * (params.length_L / 2)
    mag = np.abs(phi(x))
    c = n // 2
    target = level * mag[c]
    right = np.flatnonzero(mag[c:] < target)
    left = np.flatnonzero(mag[:c + 1][::-1] < target)
    if right.size == 0 or left.size == 0:
        raise ValueError("transparency dip does not close inside the sampled span")
    return float(s[c + right[0]] - s[c - left[0]])

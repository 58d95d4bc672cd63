"""Linear and fifth-order susceptibilities of the five-level asymmetric-M scheme.

Frequencies are in units of gamma_31 and all functions broadcast over numpy
arrays of ``nu1`` and ``nu2``. Susceptibilities are dimensionless; the
fifth-order ones carry an arbitrary overall scale (``params.chi5_scale``,
1 when unset) because the dipole product is never specified numerically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SystemParams, alpha3_reduced


@dataclass(frozen=True)
class DressingDenominators:
    Gamma_41: complex
    Gamma_51: complex
    Gamma_54: complex
    Gamma_32: complex
    F_21: np.ndarray
    F_31: np.ndarray
    F_42: np.ndarray
    F_43: np.ndarray
    F_52: np.ndarray
    F_53: np.ndarray
    Pi_41: np.ndarray
    Pi_51: np.ndarray
    D: np.ndarray
    Xi: complex


def _abs2(z: complex) -> float:
    return z.real * z.real + z.imag * z.imag


def dressing(params: SystemParams, nu1, nu2) -> DressingDenominators:
    """Complex dressing factors, including the coupling-2 detuning throughout."""
    p = params
    nu1 = np.asarray(nu1, dtype=float)
    nu2 = np.asarray(nu2, dtype=float)
    s = nu1 + nu2
    om1 = _abs2(p.omega_c1)
    om2 = _abs2(p.omega_c2)

    G41 = complex(-p.gamma_41, p.delta_p)
    G51 = complex(-p.gamma_51, p.delta_p + p.delta_c1)
    G54 = complex(-p.gamma_54, p.delta_c1)
    G32 = complex(-p.gamma_32, p.delta_c2)

    F21 = -1j * s - p.gamma_21
    F31 = 1j * (p.delta_c2 - s) - p.gamma_31
    F42 = 1j * (p.delta_p + nu2) - p.gamma_42
    F43 = 1j * (nu2 + p.delta_p - p.delta_c2) - p.gamma_43
    F52 = 1j * (nu2 + p.delta_p + p.delta_c1) - p.gamma_52
    F53 = 1j * (nu2 + p.delta_p + p.delta_c1 - p.delta_c2) - p.gamma_53

    P41 = G41 - 1j * nu1
    P51 = G51 - 1j * nu1
    D = (P41 * P51 + om1) * (F21 * F31 + om2)
    Xi = G41 * G51 + om1
    return DressingDenominators(G41, G51, G54, G32, F21, F31, F42, F43, F52, F53,
                                P41, P51, D, Xi)


def _eit_bracket(params: SystemParams, s):
    """F21* / (F31* F21* + |Omega_c2|^2) as a function of nu1 + nu2, in 1/gamma_31."""
    s = np.asarray(s, dtype=float)
    f21c = 1j * s - params.gamma_21
    f31c = -1j * (params.delta_c2 - s) - params.gamma_31
    return f21c / (f31c * f21c + _abs2(params.omega_c2))


def chi_s3_he(params: SystemParams, nu1, nu2):
    """Linear susceptibility of the s3 photon; depends on nu1 + nu2 only."""
    s = np.asarray(nu1, dtype=float) + np.asarray(nu2, dtype=float)
    return -1j * alpha3_reduced(params) * _eit_bracket(params, s)


def chi5_unscaled(params: SystemParams, nu1, nu2):
    d = dressing(params, nu1, nu2)
    if params.conjugate_chi5:
        return -1j * np.conj(d.Pi_51) / (np.conj(d.Xi) * np.conj(d.D))
    return -1j * d.Pi_51 / (d.Xi * d.D)


def chi5_he(params: SystemParams, nu1, nu2):
    """Fifth-order susceptibility shared by all three generated photons."""
    scale = 1.0 if params.chi5_scale is None else params.chi5_scale
    return scale * chi5_unscaled(params, nu1, nu2)


# --- perturbation-chain-rule expressions ----------------------------------

def chi_s1_pcr(params: SystemParams, nu1, alpha: float | None = None):
    p = params
    a = alpha3_reduced(p) if alpha is None else alpha
    nu1 = np.asarray(nu1, dtype=float)
    z = nu1 + 1j * p.gamma_54
    return -1j * a * z / ((p.delta_c1 + nu1 + 1j * p.gamma_54) * z + _abs2(p.omega_c1))


def chi_s2_pcr(params: SystemParams, nu2, alpha: float | None = None):
    p = params
    a = alpha3_reduced(p) if alpha is None else alpha
    nu2 = np.asarray(nu2, dtype=float)
    z32 = p.delta_p + nu2 + 1j * p.gamma_32
    z42 = p.delta_p + nu2 + 1j * p.gamma_42
    return -1j * a * z32 / (z42 * z32 + _abs2(p.omega_c2))


def chi_s3_pcr(params: SystemParams, nu3):
    """PCR linear susceptibility written in the s3 photon's own detuning.

    The Lorentzian factors are expressed in nu3, i.e. F21 -> -i nu3 - gamma_21
    and F31 -> -i (nu3 + delta_c2) - gamma_31.
    """
    p = params
    nu3 = np.asarray(nu3, dtype=float)
    f21 = -1j * nu3 - p.gamma_21
    f31 = -1j * (nu3 + p.delta_c2) - p.gamma_31
    return -1j * alpha3_reduced(p) * f21 / (f31 * f21 + _abs2(p.omega_c2))


def chi5_pcr_s3(params: SystemParams, nu1, nu2):
    p = params
    d = dressing(p, nu1, nu2)
    nu1 = np.asarray(nu1, dtype=float)
    denom = d.Xi * (1j * p.delta_p - 1j * nu1 - p.gamma_41) * (d.F_21 * d.F_31 + _abs2(p.omega_c2))
    return -1j / denom


def chi5_pcr_s2(params: SystemParams, nu1, nu2):
    p = params
    nu1 = np.asarray(nu1, dtype=float)
    nu2 = np.asarray(nu2, dtype=float)
    s = nu1 + nu2
    big_pi = p.gamma_32 * p.gamma_22 + _abs2(p.omega_c2)
    dressed = ((1j * p.delta_p + 1j * s - p.gamma_41)
               * (1j * p.delta_p + 1j * p.delta_c1 + 1j * s - p.gamma_51) + _abs2(p.omega_c1))
    denom = big_pi * (1j * s - p.gamma_21) * dressed * (1j * p.delta_p + 1j * nu2 - p.gamma_41)
    return -1j * p.gamma_22 / denom


def chi5_pcr_s1(params: SystemParams, nu1, nu2):
    p = params
    nu1 = np.asarray(nu1, dtype=float)
    nu2 = np.asarray(nu2, dtype=float)
    left = ((-1j * p.delta_p - 1j * nu2 - p.gamma_42) * (-1j * p.delta_p - 1j * nu2 - p.gamma_43)
            + _abs2(p.omega_c2))
    mid = -1j * p.delta_p + 1j * nu1 - p.gamma_41
    right = (1j * nu1 - p.gamma_44) * (1j * nu1 + 1j * p.delta_c1 - p.gamma_54) + _abs2(p.omega_c1)
    return -1j / (left * mid * right)


def normalized_shape(values) -> np.ndarray:
    a = np.abs(np.asarray(values))
    peak = a.max()
    return a / peak if peak > 0 else a


def shape_distance(a, b) -> float:
    """Relative L2 distance between unit-peak magnitude surfaces."""
    x = normalized_shape(a)
    y = normalized_shape(b)
    scale = 0.5 * (np.linalg.norm(x) + np.linalg.norm(y))
    return float(np.linalg.norm(x - y) / scale) if scale > 0 else 0.0


def max_relative_deviation(a, b) -> float:
    """max |x - y| / max |y| on unit-peak magnitude surfaces."""
    return float(np.max(np.abs(normalized_shape(a) - normalized_shape(b))))

"""Physical parameters, unit conventions, presets and the TOML config format.

Every rate, detuning and Rabi frequency is stored in units of gamma_31 (the
|3>-|1> coherence decay rate, 2*pi x 3 MHz by default). Times are therefore
in units of 1/gamma_31. Lengths stay in metres.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, fields, replace, asdict
from pathlib import Path
from typing import Any

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, GridError
from .grid import FrequencyGrid2D

C_LIGHT = 299_792_458.0
GAMMA31_SI = 2 * math.pi * 3e6

RATE_NAMES = (
    "gamma_21", "gamma_31", "gamma_32", "gamma_41", "gamma_42", "gamma_43",
    "gamma_51", "gamma_52", "gamma_53", "gamma_54",
)
# keys converted with the frequency unit when reading MHz configs
FREQUENCY_KEYS = RATE_NAMES + (
    "gamma_22", "gamma_44", "delta_p", "delta_c1", "delta_c2", "omega_c1", "omega_c2",
)
FLAG_KEYS = ("halve_absorption", "literal_omega_tr", "conjugate_chi5")


def mhz_to_gamma(value_mhz: float, gamma31_si: float = GAMMA31_SI, angular: bool = False) -> float:
    """Convert a frequency in MHz to gamma_31 units.

    With ``angular=False`` the value is an ordinary frequency and picks up 2*pi;
    with ``angular=True`` it is already an angular frequency in 1e6 rad/s.
    """
    if angular:
        return (value_mhz * 1e6) / gamma31_si
    return (2 * math.pi * value_mhz * 1e6) / gamma31_si


def _pair_default(m: float, n: float) -> float:
    return 0.5 * (m + n)


@dataclass(frozen=True)
class SystemParams:
    gamma_21: float = 0.04
    gamma_31: float = 1.0
    gamma_41: float = 1.0
    gamma_51: float = 0.2
    gamma_32: float | None = None
    gamma_42: float | None = None
    gamma_43: float | None = None
    gamma_52: float | None = None
    gamma_53: float | None = None
    gamma_54: float | None = None
    # population decay rates appearing only in the PCR expressions
    gamma_22: float | None = None
    gamma_44: float | None = None
    delta_p: float = -100.0
    delta_c1: float = 0.0
    delta_c2: float = 0.0
    omega_c1: complex = 20.0
    omega_c2: complex = 20.0
    length_L: float = 0.015
    optical_depth: float = 1.5
    central_freq_s3: float = 2 * math.pi * C_LIGHT / 780e-9
    k_offset: float = 0.0
    gamma31_si: float = GAMMA31_SI
    chi5_scale: float | None = None
    halve_absorption: bool = False
    literal_omega_tr: bool = False
    conjugate_chi5: bool = True

    def __post_init__(self):
        g = {n: getattr(self, n) for n in ("gamma_21", "gamma_31", "gamma_41", "gamma_51")}
        defaults = {
            "gamma_32": _pair_default(g["gamma_31"], g["gamma_21"]),
            "gamma_42": _pair_default(g["gamma_41"], g["gamma_21"]),
            "gamma_43": _pair_default(g["gamma_41"], g["gamma_31"]),
            "gamma_52": _pair_default(g["gamma_51"], g["gamma_21"]),
            "gamma_53": _pair_default(g["gamma_51"], g["gamma_31"]),
            "gamma_54": _pair_default(g["gamma_51"], g["gamma_41"]),
            "gamma_22": g["gamma_21"],
            "gamma_44": g["gamma_41"],
        }
        for name, value in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, float(value))
        object.__setattr__(self, "omega_c1", complex(self.omega_c1))
        object.__setattr__(self, "omega_c2", complex(self.omega_c2))
        self.validate()

    def validate(self) -> None:
        for name in RATE_NAMES + ("gamma_22", "gamma_44"):
            v = getattr(self, name)
            # ground-state coherence and population may be lossless
            if name in ("gamma_21", "gamma_22"):
                ok = math.isfinite(v) and v >= 0
            else:
                ok = math.isfinite(v) and v > 0
            if not ok:
                raise ConfigError(f"{name} must be positive, got {v}")
        for name in ("delta_p", "delta_c1", "delta_c2", "k_offset"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        for name in ("optical_depth", "length_L", "central_freq_s3", "gamma31_si"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be strictly positive, got {v}")
        if self.chi5_scale is not None and not (math.isfinite(self.chi5_scale) and self.chi5_scale > 0):
            raise ConfigError("chi5_scale must be positive")

    def replace(self, **changes: Any) -> "SystemParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        """Flat dict of TOML-compatible values; complex couplings are split exactly."""
        d = asdict(self)
        for key in ("omega_c1", "omega_c2"):
            z = d.pop(key)
            if z.imag == 0 and z.real >= 0:
                d[key] = z.real
            else:
                d[key + "_re"] = z.real
                d[key + "_im"] = z.imag
        return d


def alpha3_si(optical_depth: float, length_L: float, gamma31_si: float, central_freq: float) -> float:
    return optical_depth * C_LIGHT * gamma31_si / (2 * length_L * central_freq)


def alpha3(params: SystemParams) -> float:
    """Prefactor N hbar |d31|^2 / eps0 of the linear susceptibility, in rad/s.

    Obtained by inverting the optical-depth definition, so the atom density and
    the dipole moment never appear separately.
    """
    return alpha3_si(params.optical_depth, params.length_L, params.gamma31_si,
                     params.central_freq_s3)


def alpha3_reduced(params: SystemParams) -> float:
    """``alpha3 / gamma_31``: the prefactor when the bracket is in gamma_31 units."""
    return params.optical_depth * C_LIGHT / (2 * params.length_L * params.central_freq_s3)


# --- presets -------------------------------------------------------------

@dataclass(frozen=True)
class Preset:
    name: str
    params: SystemParams
    grid: FrequencyGrid2D
    description: str = ""


_DP = mhz_to_gamma(-300.0)         # -2*pi x 300 MHz = -100 gamma_31
_DC1 = mhz_to_gamma(300.0)         # +2*pi x 300 MHz = +100 gamma_31

_PRESET_PARAMS: dict[str, tuple[dict, str]] = {
    "fig2a": (dict(delta_c1=0.0, omega_c1=20.0, omega_c2=20.0),
              "four-peak chi5 spectrum"),
    "fig2b": (dict(delta_c1=_DC1, omega_c1=10.0, omega_c2=50.0),
              "two-peak chi5 spectrum"),
    "fig3a": (dict(omega_c1=5.0, omega_c2=5.0, optical_depth=1.5),
              "damped Rabi oscillation regime"),
    "fig3c": (dict(omega_c1=1.6, omega_c2=1.6, optical_depth=88.0),
              "group delay regime"),
    "fig3e": (dict(omega_c1=1.6, omega_c2=1.6, optical_depth=8.0),
              "hybrid regime"),
    "figS2a": (dict(omega_c1=5.0, omega_c2=5.0), "equal couplings, 5 gamma_31"),
    "figS2b": (dict(omega_c1=5.0, omega_c2=50.0), "strong second coupling"),
    "figS2c": (dict(omega_c1=50.0, omega_c2=5.0), "strong first coupling"),
    "figS2d": (dict(omega_c1=5.0, omega_c2=5.0, delta_c1=_DC1), "figS2a with detuned c1"),
    "figS2e": (dict(omega_c1=5.0, omega_c2=50.0, delta_c1=_DC1), "figS2b with detuned c1"),
    "figS2f": (dict(omega_c1=50.0, omega_c2=5.0, delta_c1=_DC1), "figS2c with detuned c1"),
    "figS3": (dict(delta_c1=_DC1, omega_c1=10.0, omega_c2=50.0),
              "two-resonance temporal correlations"),
}

_PRESET_GRIDS: dict[str, FrequencyGrid2D] = {
    "fig2a": FrequencyGrid2D(_DP, 80.0, 1024, -_DP, 120.0, 1024),
    "fig3a": FrequencyGrid2D(_DP, 256.0, 2048, -_DP, 384.0, 2048),
    "fig3c": FrequencyGrid2D(_DP, 80.0, 2048, -_DP, 96.0, 2048),
    "fig3e": FrequencyGrid2D(_DP, 80.0, 2048, -_DP, 96.0, 2048),
}

PRESET_NAMES = tuple(_PRESET_PARAMS)


def preset_params(name: str) -> SystemParams:
    if name not in _PRESET_PARAMS:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}")
    overrides, _ = _PRESET_PARAMS[name]
    return SystemParams(delta_p=_DP, **overrides)


def load_preset(name: str) -> Preset:
    params = preset_params(name)
    grid = _PRESET_GRIDS.get(name)
    if grid is None:
        from .spectra import auto_grid
        grid = auto_grid(params)
    return Preset(name, params, grid, _PRESET_PARAMS[name][1])


# --- config files --------------------------------------------------------

def dump_config(params: SystemParams, grid: FrequencyGrid2D | None = None, preset: str | None = None) -> str:
    """Serialize to TOML in gamma_31 units; reading it back is bit-exact."""
    doc: dict[str, Any] = {}
    if preset is not None:
        doc["preset"] = preset
    doc["units"] = "gamma31"
    for key, value in params.to_dict().items():
        if value is None:
            continue
        doc[key] = value
    if grid is not None:
        doc["grid"] = grid.to_dict()
    return tomli_w.dumps(doc)


def _to_float(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def parse_config(doc: dict) -> tuple[SystemParams, FrequencyGrid2D | None, str | None]:
    """Build params (and optional grid) from a parsed TOML document.

    Explicit keys override the values of ``preset`` when both are given.
    """
    doc = dict(doc)
    preset_name = doc.pop("preset", None)
    units = doc.pop("units", "MHz")
    angular = doc.pop("angular", False)
    grid_doc = doc.pop("grid", None)
    if units not in ("MHz", "gamma31"):
        raise ConfigError(f"units must be 'MHz' or 'gamma31', got {units!r}")
    if not isinstance(angular, bool):
        raise ConfigError("angular must be true or false")

    base_grid = None
    if preset_name is not None:
        preset = load_preset(preset_name)
        base = preset.params
        base_grid = preset.grid
    else:
        base = SystemParams()

    gamma31_si = base.gamma31_si
    if "gamma31_si" in doc:
        gamma31_si = _to_float("gamma31_si", doc.pop("gamma31_si"))
    if units == "MHz" and "gamma_31" in doc:
        g31 = _to_float("gamma_31", doc.pop("gamma_31"))
        gamma31_si = g31 * 1e6 * (1.0 if angular else 2 * math.pi)

    changes: dict[str, Any] = {"gamma31_si": gamma31_si}
    phases = {}
    parts: dict[str, list[float]] = {}
    known = {f.name for f in fields(SystemParams)}
    for key, value in doc.items():
        if key in ("omega_c1_phase", "omega_c2_phase"):
            phases[key[:-6]] = _to_float(key, value)
            continue
        if key in ("omega_c1_re", "omega_c1_im", "omega_c2_re", "omega_c2_im"):
            v = _to_float(key, value)
            if units == "MHz":
                v = mhz_to_gamma(v, gamma31_si, angular)
            parts.setdefault(key[:8], [0.0, 0.0])[key.endswith("_im")] = v
            continue
        if key == "length_cm":
            changes["length_L"] = _to_float(key, value) / 100.0
            continue
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if key in FLAG_KEYS:
            if not isinstance(value, bool):
                raise ConfigError(f"{key} must be true or false")
            changes[key] = value
            continue
        v = _to_float(key, value)
        if units == "MHz" and key in FREQUENCY_KEYS:
            v = mhz_to_gamma(v, gamma31_si, angular)
        changes[key] = v

    for key in ("omega_c1", "omega_c2"):
        if key in parts:
            if key in changes or key in phases:
                raise ConfigError(f"give {key} either as magnitude/phase or as _re/_im parts")
            changes[key] = complex(*parts[key])
            continue
        mag = abs(changes.get(key, getattr(base, key)))
        if key in changes or key in phases:
            phase = phases.get(key, 0.0)
            changes[key] = complex(mag * math.cos(phase), mag * math.sin(phase)) if phase else complex(mag)
    # dependent dephasing defaults are recomputed unless given explicitly
    for name in ("gamma_32", "gamma_42", "gamma_43", "gamma_52", "gamma_53", "gamma_54",
                 "gamma_22", "gamma_44"):
        if name not in changes:
            changes[name] = None
    try:
        params = replace(base, **changes)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc

    grid = base_grid
    if grid_doc is not None:
        try:
            grid = FrequencyGrid2D.from_dict(grid_doc)
        except GridError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad [grid] table: {exc}") from exc
    return params, grid, preset_name


def loads_config(text: str, default_preset: str | None = None):
    """Parse TOML text; ``default_preset`` applies when the file names none."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    if default_preset is not None:
        doc.setdefault("preset", default_preset)
    return parse_config(doc)


def load_config(path: str | Path, default_preset: str | None = None):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads_config(text, default_preset)

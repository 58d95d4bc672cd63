"""Uniform (nu1, nu2) detuning lattice and its conjugate time lattice."""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .errors import GridError


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class FrequencyGrid2D:
    """Sampling lattice in units of gamma_31.

    Sample ``k`` of an axis sits at ``center + (k - n // 2) * span / n`` so the
    center is always a lattice point and the lattice maps onto an FFT without
    re-ordering beyond a shift.
    """

    nu1_center: float
    nu1_span: float
    n1: int
    nu2_center: float
    nu2_span: float
    n2: int

    def __post_init__(self):
        for n in (self.n1, self.n2):
            if int(n) != n or not _is_power_of_two(int(n)):
                raise GridError(f"sample counts must be powers of two, got {n}")
            if n < 2:
                raise GridError(f"degenerate grid: {self.n1}x{self.n2}")
        for span in (self.nu1_span, self.nu2_span):
            if not np.isfinite(span) or span <= 0:
                raise GridError(f"spans must be positive and finite, got {span}")
        if not (np.isfinite(self.nu1_center) and np.isfinite(self.nu2_center)):
            raise GridError("grid centers must be finite")

    @property
    def d1(self) -> float:
        return self.nu1_span / self.n1

    @property
    def d2(self) -> float:
        return self.nu2_span / self.n2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def size(self) -> int:
        return self.n1 * self.n2

    @property
    def nu1(self) -> np.ndarray:
        return self.nu1_center + (np.arange(self.n1) - self.n1 // 2) * self.d1

    @property
    def nu2(self) -> np.ndarray:
        return self.nu2_center + (np.arange(self.n2) - self.n2 // 2) * self.d2

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.nu1, self.nu2, indexing="ij")

    @property
    def dtau1(self) -> float:
        return 2 * np.pi / self.nu1_span

    @property
    def dtau2(self) -> float:
        return 2 * np.pi / self.nu2_span

    @property
    def tau31(self) -> np.ndarray:
        return (np.arange(self.n1) - self.n1 // 2) * self.dtau1

    @property
    def tau32(self) -> np.ndarray:
        return (np.arange(self.n2) - self.n2 // 2) * self.dtau2

    def with_samples(self, n1: int, n2: int) -> "FrequencyGrid2D":
        return FrequencyGrid2D(self.nu1_center, self.nu1_span, n1,
                               self.nu2_center, self.nu2_span, n2)

    def with_spans(self, span1: float, span2: float) -> "FrequencyGrid2D":
        return FrequencyGrid2D(self.nu1_center, span1, self.n1,
                               self.nu2_center, span2, self.n2)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FrequencyGrid2D":
        return cls(float(d["nu1_center"]), float(d["nu1_span"]), int(d["n1"]),
                   float(d["nu2_center"]), float(d["nu2_span"]), int(d["n2"]))

"""Harmonic-expansion vs perturbation-chain-rule comparison."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import response
from .grid import FrequencyGrid2D
from .params import SystemParams

CHI5_SURFACES = ("chi5_he", "chi5_pcr_s1", "chi5_pcr_s2", "chi5_pcr_s3")


@dataclass(frozen=True)
class PcrComparison:
    chi_s3_max_rel_dev: float
    shape_distances: dict[tuple[str, str], float]

    def rows(self) -> list[tuple[str, str, str, float]]:
        out = [("chi_s3_he", "chi_s3_pcr", "max_rel_dev", self.chi_s3_max_rel_dev)]
        out += [(a, b, "shape_distance", d) for (a, b), d in self.shape_distances.items()]
        return out


def compare_pcr(params: SystemParams, grid: FrequencyGrid2D) -> PcrComparison:
    """chi_s3 agreement and pairwise shape distances among the chi5 surfaces.

    The PCR chi_s3 is evaluated at the s3 detuning nu3 = -(nu1 + nu2).
    """
    nu1 = grid.nu1[:, None]
    nu2 = grid.nu2[None, :]
    he = response.chi_s3_he(params, nu1, nu2)
    pcr = response.chi_s3_pcr(params, -(nu1 + nu2))
    dev = float(np.max(np.abs(he - pcr)) / np.max(np.abs(he)))
    surfaces = {
        "chi5_he": response.chi5_he(params, nu1, nu2),
        "chi5_pcr_s1": response.chi5_pcr_s1(params, nu1, nu2),
        "chi5_pcr_s2": response.chi5_pcr_s2(params, nu1, nu2),
        "chi5_pcr_s3": response.chi5_pcr_s3(params, nu1, nu2),
    }
    distances = {(a, b): response.shape_distance(surfaces[a], surfaces[b])
                 for a, b in combinations(CHI5_SURFACES, 2)}
    return PcrComparison(dev, distances)

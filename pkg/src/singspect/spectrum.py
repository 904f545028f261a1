"""Sorted eigenvalue lists with multiplicities and truncation metadata."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicities, complete below `complete_below`.

    `levels` is sorted by eigenvalue.  `complete_below` bounds the region in
    which no eigenvalue is missing; sums over the spectrum should either stay
    below it or correct for the tail.  `errors` (optional, same length as
    levels) carries per-eigenvalue truncation estimates from refinement.
    """

    levels: Tuple[Tuple[float, int], ...]
    complete_below: float
    errors: Tuple[float, ...] = ()

    def __post_init__(self):
        lam = [l for l, _ in self.levels]
        if lam != sorted(lam):
            raise ValueError("levels must be sorted by eigenvalue")

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity."""
        out: List[float] = []
        for lam, m in self.levels:
            out.extend([lam] * m)
        return np.asarray(out)

    def count_below(self, bound: float) -> int:
        return sum(m for lam, m in self.levels if lam < bound)

    def heat_sum(self, t: float) -> float:
        """sum of multiplicity * exp(-t*lambda) over the stored levels."""
        return float(sum(m * np.exp(-t * lam) for lam, m in self.levels))

    def truncated(self, bound: float) -> "Spectrum":
        kept = tuple((lam, m) for lam, m in self.levels if lam <= bound)
        return Spectrum(kept, min(self.complete_below, bound))

    def to_json_dict(self) -> dict:
        return {
            "levels": [[lam, m] for lam, m in self.levels],
            "complete_below": self.complete_below,
        }


def cluster_eigenvalues(values, rel_tol: float = 1e-7) -> List[Tuple[float, int]]:
    """Group a sorted float array into (value, multiplicity) clusters."""
    levels: List[Tuple[float, int]] = []
    for v in sorted(values):
        if levels and abs(v - levels[-1][0]) <= rel_tol * max(1.0, abs(v)):
            lam, m = levels[-1]
            levels[-1] = ((lam * m + v) / (m + 1), m + 1)
        else:
            levels.append((float(v), 1))
    return levels

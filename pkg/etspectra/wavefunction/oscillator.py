# -*- coding: utf-8 -*-
"""Harmonic-oscillator eigenfunctions carried by the ET solutions."""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from logzero import logger
from scipy import integrate

from etspectra.core.models import DomainKind, QuantumNumber
from etspectra.envelope.solver import EtSolution
from etspectra.exceptions import (
    DomainViolation,
    EmptyGrid,
    GridTooNarrow,
    InvalidGrid,
    InvalidParameter,
    NonMonotoneGrid,
)

__all__ = [
    "WavefunctionSample",
    "hermite_eval",
    "normalized_hermite",
    "ho_eigenfunction",
    "count_nodes",
    "default_sampling_grid",
    "sample_wavefunction",
    "moment_check",
]

DEFAULT_SAMPLES = 2001
TAIL_MASS_LIMIT = 1e-8


@dataclass(frozen=True)
class WavefunctionSample:
    n: int
    lam: float
    grid: np.ndarray
    values: np.ndarray
    domain: DomainKind
    norm_estimate: float

    @property
    def nodes(self) -> int:
        return count_nodes(self.values)


def hermite_eval(n: int, z):
    """Physicists' Hermite polynomial H_n(z) by the three-term recurrence."""
    if n < 0:
        raise InvalidParameter("Hermite degree must be >= 0, got {}".format(n))
    z = np.asarray(z, dtype=float)
    prev, cur = np.ones_like(z), 2.0 * z
    if n == 0:
        return prev if prev.ndim else float(prev)
    for k in range(1, n):
        prev, cur = cur, 2.0 * z * cur - 2.0 * k * prev
    return cur if cur.ndim else float(cur)


def normalized_hermite(n: int, z):
    """
    H_n(z) / sqrt(2**n n!) through the rescaled recurrence, which stays
    finite where the factorial would overflow.
    """
    if n < 0:
        raise InvalidParameter("Hermite degree must be >= 0, got {}".format(n))
    z = np.asarray(z, dtype=float)
    prev = np.ones_like(z)
    if n == 0:
        return prev
    cur = math.sqrt(2.0) * z
    for k in range(1, n):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * z * cur - math.sqrt(
            k / (k + 1.0)
        ) * prev
    return cur


def ho_eigenfunction(n: int, lam: float, x):
    """Normalized oscillator state n of scale lam on the full line."""
    z = lam * np.asarray(x, dtype=float)
    return (lam * lam / math.pi) ** 0.25 * normalized_hermite(n, z) * np.exp(-0.5 * z * z)


def count_nodes(values: Sequence[float], floor: float = 1e-8) -> int:
    """Strict sign changes, ignoring entries below floor * max|values|."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0
    cutoff = floor * np.max(np.abs(values))
    signs = np.sign(values[np.abs(values) > cutoff])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def default_sampling_grid(sol: EtSolution, points: int = DEFAULT_SAMPLES) -> np.ndarray:
    index = QuantumNumber(sol.n, sol.domain).oscillator_index
    lam = math.sqrt(sol.q) / sol.x0
    reach = max(8.0, math.sqrt(2 * index + 1) + 6.0) / lam
    if sol.domain is DomainKind.HALF_LINE:
        return np.linspace(0.0, reach, points)
    return np.linspace(-reach, reach, points)


def sample_wavefunction(sol: EtSolution, grid: Sequence[float] = None) -> WavefunctionSample:
    """
    Samples the ET eigenfunction of a solved level. On the half line the
    level is carried by the odd oscillator state n_o = 2n + 1, scaled by
    sqrt(2) to stay normalized on x >= 0.
    """
    grid = default_sampling_grid(sol) if grid is None else np.asarray(grid, dtype=float)

    if grid.size == 0:
        raise EmptyGrid("Sampling grid is empty")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise NonMonotoneGrid("Sampling grid must be strictly increasing")
    if sol.domain is DomainKind.HALF_LINE and grid[0] < 0:
        raise DomainViolation(
            "Half-line level sampled at negative x = {}".format(grid[0])
        )

    index = QuantumNumber(sol.n, sol.domain).oscillator_index
    lam = math.sqrt(sol.q) / sol.x0
    values = ho_eigenfunction(index, lam, grid)
    if sol.domain is DomainKind.HALF_LINE:
        values = math.sqrt(2.0) * values

    norm = float(integrate.trapezoid(values**2, grid)) if grid.size > 1 else 0.0
    logger.debug("[WF] n={} lambda={} norm={}".format(sol.n, lam, norm))

    return WavefunctionSample(
        n=sol.n,
        lam=lam,
        grid=grid,
        values=values,
        domain=sol.domain,
        norm_estimate=norm,
    )


def moment_check(sample: WavefunctionSample, sol: EtSolution) -> Tuple[float, float]:
    """
    Quadrature estimates of (<x**2>, <p**2>) for a sampled ET state, to be
    compared with (x0**2, p0**2).
    """
    tail = abs(1.0 - sample.norm_estimate)
    if tail > TAIL_MASS_LIMIT:
        raise GridTooNarrow(
            "Sample of level {} misses probability mass {:.3g}".format(sample.n, tail)
        )

    x, psi = sample.grid, sample.values
    steps = np.diff(x)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise InvalidGrid("Moment check needs a uniform grid")
    x2 = float(integrate.trapezoid(x * x * psi * psi, x))
    dpsi = _derivative(psi, x[1] - x[0])
    p2 = float(integrate.trapezoid(dpsi * dpsi, x))

    logger.debug(
        "[WF] n={} <x2>={} (x0^2={}) <p2>={} (p0^2={})".format(
            sol.n, x2, sol.x0**2, p2, sol.p0**2
        )
    )
    return x2, p2


def _derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central differences, second order at the two edge pairs."""
    out = np.gradient(values, h, edge_order=2)
    out[2:-2] = (
        -values[4:] + 8 * values[3:-1] - 8 * values[1:-3] + values[:-4]
    ) / (12 * h)
    return out

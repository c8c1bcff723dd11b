# -*- coding: utf-8 -*-
"""Fourier Grid Hamiltonian reference eigensolver.

The kinetic operator of T = p**2/2 on a uniform periodic grid of N (odd)
points is the cosine sum

    T(d) = (2/N) sum_{l=1}^{(N-1)/2} cos(2 pi l d / N) (2 pi l / (N dx))**2 / 2

for points d steps apart, i.e. the inverse DFT of the kinetic spectrum. Even
potentials are diagonalized per parity sector. Half-line models use the
odd sector only, which puts an infinite wall at x = 0.
"""
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from logzero import logger
from scipy import interpolate, linalg

from etspectra import Configuration, settings
from etspectra.core.models import DomainKind, HamiltonianModel
from etspectra.envelope.solver import solve_level
from etspectra.exceptions import (
    EigensolverFailure,
    InvalidGrid,
    InvalidParameter,
    RootNotBracketed,
    SingularPotentialOnGrid,
    TooManyLevels,
    UnsupportedModel,
)

__all__ = [
    "GridSpec",
    "GridEigenResult",
    "kinetic_kernel",
    "fgh_solve",
    "default_grid",
    "convergence_sweep",
]

MIN_POINTS = 65
SWEEP_REFINEMENTS = 4
# error order in the spacing assumed by the certificate's extrapolation
RICHARDSON_ORDER = 2


@dataclass(frozen=True)
class GridSpec:
    """
    Symmetric grid of n_points (odd) over [-x_max, x_max]. A half-line spec
    uses the (n_points - 1)/2 points of (0, x_max].
    """

    n_points: int
    x_max: float
    domain: DomainKind = DomainKind.FULL_LINE

    def __post_init__(self):
        if self.n_points < MIN_POINTS or self.n_points % 2 == 0:
            raise InvalidGrid(
                "n_points must be odd and >= {}, got {}".format(
                    MIN_POINTS, self.n_points
                )
            )
        if not self.x_max > 0:
            raise InvalidGrid("x_max must be > 0, got {}".format(self.x_max))

    @property
    def spacing(self) -> float:
        return 2.0 * self.x_max / (self.n_points - 1)

    @property
    def half_points(self) -> int:
        return (self.n_points - 1) // 2

    @property
    def positions(self) -> np.ndarray:
        offsets = np.arange(self.n_points) - self.half_points
        if self.domain is DomainKind.HALF_LINE:
            offsets = offsets[self.half_points + 1 :]
        return offsets * self.spacing

    def refined(self) -> "GridSpec":
        """Half the spacing over the same extent."""
        return GridSpec(2 * self.n_points - 1, self.x_max, self.domain)

    def extended(self) -> "GridSpec":
        """Twice the extent at the same spacing."""
        return GridSpec(2 * self.n_points - 1, 2 * self.x_max, self.domain)

    def describe(self):
        return {
            "n_points": self.n_points,
            "x_max": self.x_max,
            "domain": self.domain.value,
        }


@dataclass(frozen=True)
class GridEigenResult:
    spec: GridSpec
    eigenvalues: np.ndarray
    # one column per level, unit norm under the discrete inner product
    eigenvectors: np.ndarray
    convergence_estimate: np.ndarray
    extrapolated: Optional[np.ndarray] = None

    @property
    def positions(self) -> np.ndarray:
        return self.spec.positions

    @property
    def best_estimate(self) -> np.ndarray:
        """Extrapolated eigenvalues when certified, grid eigenvalues otherwise."""
        return self.eigenvalues if self.extrapolated is None else self.extrapolated

    def wavefunction(self, k: int, x: Optional[np.ndarray] = None) -> np.ndarray:
        """
        psi_k normalized as a function (sum |psi|**2 dx = 1), optionally
        interpolated onto x; zero outside the grid.
        """
        values = self.eigenvectors[:, k] / math.sqrt(self.spec.spacing)
        if x is None:
            return values

        positions = self.positions
        if self.spec.domain is DomainKind.HALF_LINE:
            positions = np.concatenate(([0.0], positions))
            values = np.concatenate(([0.0], values))
        spline = interpolate.CubicSpline(positions, values)
        x = np.asarray(x, dtype=float)
        inside = (x >= positions[0]) & (x <= positions[-1])
        return np.where(inside, spline(x), 0.0)


def kinetic_kernel(n_points: int, spacing: float) -> np.ndarray:
    """T(d) for d = 0 .. n_points - 1 (periodic, T(d) = T(n_points - d))."""
    k = 2.0 * math.pi * np.fft.fftfreq(n_points, d=spacing)
    return np.fft.ifft(0.5 * k * k).real


def fgh_solve(
    model: HamiltonianModel,
    spec: GridSpec,
    n_levels: int,
    certify: bool = False,
    configuration: Configuration = None,
) -> GridEigenResult:
    """
    Lowest n_levels eigenpairs of H on the grid. With certify=True the
    solve is repeated at half the spacing, the per-level differences are
    stored in convergence_estimate (NaN otherwise) and the two grids are
    combined into a Richardson estimate in extrapolated.
    """
    if model.kinetic.label != "nonrel":
        raise UnsupportedModel(
            "FGH only handles T = p**2/2, got kinetic term {}".format(
                model.kinetic.label
            )
        )
    if n_levels < 1:
        raise InvalidParameter("n_levels must be >= 1, got {}".format(n_levels))
    if n_levels > spec.n_points // 4:
        raise TooManyLevels(
            "{} levels requested on a {}-point grid, at most {}".format(
                n_levels, spec.n_points, spec.n_points // 4
            )
        )
    if spec.domain is not model.domain:
        spec = GridSpec(spec.n_points, spec.x_max, model.domain)
    _check_size(spec, configuration)

    eigenvalues, eigenvectors = _diagonalize(model, spec, n_levels)

    estimate, extrapolated = np.full(n_levels, np.nan), None
    if certify:
        finer_spec = spec.refined()
        _check_size(finer_spec, configuration)
        finer, _ = _diagonalize(model, finer_spec, n_levels)
        estimate = np.abs(finer - eigenvalues)
        extrapolated = finer + (finer - eigenvalues) / (2**RICHARDSON_ORDER - 1)
        logger.info(
            "[FGH] {} certificate max delta {:.3g}".format(model.label, estimate.max())
        )

    return GridEigenResult(spec, eigenvalues, eigenvectors, estimate, extrapolated)


def default_grid(
    model: HamiltonianModel, n_max: int, configuration: Configuration = None
) -> GridSpec:
    """
    Grid sized from the ET solutions of the ground and highest levels: the
    extent covers three mean distances of the top level, the spacing
    resolves the ground state and the largest classical momentum.
    """
    params = settings(configuration)
    min_points, min_x_max = params["fgh_min_points"], params["fgh_min_x_max"]
    min_points += 1 - min_points % 2
    half_line = model.domain is DomainKind.HALF_LINE
    if half_line:
        min_x_max /= 2.0

    if not model.supports_et:
        return GridSpec(min_points, min_x_max, model.domain)

    ground = solve_level(model, 0, configuration=configuration)
    try:
        top = solve_level(model, n_max, configuration=configuration)
        x_max, top_energy = max(min_x_max, 3.0 * top.x0), top.energy
    except RootNotBracketed:
        logger.warning(
            "[FGH] No ET solution for {} at n={}, default extent {}".format(
                model.label, n_max, min_x_max
            )
        )
        x_max, top_energy = min_x_max, 0.0

    if half_line and model.potential.singular_origin:
        spacing = ground.x0 / 80.0
    else:
        spacing = min(0.5, ground.x0 / 4.0)
        depth = top_energy - float(model.potential.value(0.0))
        if depth > 0:
            spacing = min(spacing, math.pi / (6.0 * math.sqrt(2.0 * depth)))

    n_points = max(min_points, int(math.ceil(2.0 * x_max / spacing)) + 1)
    n_points += 1 - n_points % 2
    if n_points > params["fgh_max_points"]:
        raise InvalidGrid(
            "{} up to n={} needs {} grid points (spacing {:.3g} over +/-{:.6g}), "
            "above the limit of {}; pass an explicit grid or raise "
            "fgh_max_points".format(
                model.label, n_max, n_points, spacing, x_max, params["fgh_max_points"]
            )
        )

    logger.debug(
        "[FGH] Default grid for {} up to n={}: {} points over +/-{:.6g}".format(
            model.label, n_max, n_points, x_max
        )
    )
    return GridSpec(n_points, x_max, model.domain)


def convergence_sweep(
    model: HamiltonianModel,
    base: GridSpec,
    n_levels: int,
    configuration: Configuration = None,
) -> List[GridEigenResult]:
    """
    Solves on the base grid and on four refinements that alternately halve
    the spacing and double the extent. Each result's convergence_estimate is
    its per-level change from the previous grid.
    """
    results = [fgh_solve(model, base, n_levels, configuration=configuration)]
    spec = results[0].spec

    for step in range(SWEEP_REFINEMENTS):
        spec = spec.refined() if step % 2 == 0 else spec.extended()
        _check_size(spec, configuration)
        eigenvalues, eigenvectors = _diagonalize(model, spec, n_levels)
        delta = np.abs(eigenvalues - results[-1].eigenvalues)
        logger.info(
            "[FGH] Sweep step {} ({} points, x_max={}): max delta {:.3g}".format(
                step + 1, spec.n_points, spec.x_max, delta.max()
            )
        )
        results.append(GridEigenResult(spec, eigenvalues, eigenvectors, delta))

    return results


###############################################################################
# Private functions
###############################################################################
def _potential_on(model: HamiltonianModel, x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        values = np.asarray(model.potential.value(x), dtype=float)
    if not np.all(np.isfinite(values)):
        bad = x[~np.isfinite(values)]
        raise SingularPotentialOnGrid(
            "Potential of {} is not finite at x = {}".format(model.label, bad[:3])
        )
    return values


def _check_size(spec: GridSpec, configuration: Configuration):
    limit = settings(configuration)["fgh_max_points"]
    if spec.n_points > limit:
        raise InvalidGrid(
            "Grid of {} points exceeds the limit of {} (fgh_max_points)".format(
                spec.n_points, limit
            )
        )


def _eigh_lowest(matrix: np.ndarray, count: int):
    count = min(count, matrix.shape[0])
    try:
        return linalg.eigh(matrix, subset_by_index=[0, count - 1])
    except (linalg.LinAlgError, ValueError, MemoryError) as e:
        raise EigensolverFailure("Dense eigensolver failed: {}".format(e))


def _diagonalize(model: HamiltonianModel, spec: GridSpec, n_levels: int):
    half = spec.half_points
    kernel = kinetic_kernel(spec.n_points, spec.spacing)
    m = np.arange(1, half + 1)
    diag = np.diag_indices(half)

    if spec.domain is DomainKind.HALF_LINE:
        v = _potential_on(model, m * spec.spacing)
        block = linalg.toeplitz(kernel[:half])
        block -= _mirror(kernel, half)
        block[diag] += v
        energies, vectors = _eigh_lowest(block, n_levels)
        return _phase(energies, vectors)

    # full-line potentials are even, x_i and -x_i are sampled bit-identically
    x = spec.positions
    v = _potential_on(model, x)
    mirror = _mirror(kernel, half)

    # odd sector: (e_m - e_-m)/sqrt(2)
    block = linalg.toeplitz(kernel[:half])
    block -= mirror
    block[diag] += v[half + 1 :]
    odd_e, odd_c = _eigh_lowest(block, n_levels)

    # even sector: e_0 and (e_m + e_-m)/sqrt(2)
    block += 2.0 * mirror
    del mirror
    even = np.empty((half + 1, half + 1))
    even[0, 0] = kernel[0] + v[half]
    even[0, 1:] = even[1:, 0] = math.sqrt(2.0) * kernel[m]
    even[1:, 1:] = block
    del block
    even_e, even_c = _eigh_lowest(even, n_levels)

    vectors = np.zeros((x.size, odd_e.size + even_e.size))
    for j in range(even_e.size):
        vectors[half, j] = even_c[0, j]
        vectors[half + 1 :, j] = even_c[1:, j] / math.sqrt(2.0)
        vectors[:half, j] = even_c[:0:-1, j] / math.sqrt(2.0)
    for j in range(odd_e.size):
        col = even_e.size + j
        vectors[half + 1 :, col] = odd_c[:, j] / math.sqrt(2.0)
        vectors[:half, col] = -odd_c[::-1, j] / math.sqrt(2.0)

    energies = np.concatenate((even_e, odd_e))
    order = np.argsort(energies, kind="stable")[:n_levels]
    return _phase(energies[order], vectors[:, order])


def _mirror(kernel: np.ndarray, half: int) -> np.ndarray:
    """T(i + j) for i, j = 1 .. half."""
    return linalg.hankel(kernel[2 : half + 2], kernel[half + 1 : 2 * half + 1])


def _phase(energies: np.ndarray, vectors: np.ndarray, floor: float = 1e-8):
    """First component above floor * max|v| is made positive."""
    vectors = np.array(vectors, copy=True)
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        lead = col[np.abs(col) > floor * np.max(np.abs(col))][0]
        if lead < 0:
            vectors[:, j] = -col
    return np.asarray(energies, dtype=float), vectors

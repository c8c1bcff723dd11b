# -*- coding: utf-8 -*-
"""Closed-form spectra used as bounds and benchmarks.

All energies are in the dimensionless unit of H (2 R_y for the exciton).
"""
import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from logzero import logger
from scipy import optimize, special

from etspectra.exceptions import (
    InvalidParameter,
    NoBoundState,
    NonPositiveBias,
    RootNotBracketed,
)

__all__ = [
    "BoundSource",
    "BoundSpectrum",
    "HulthenSandwich",
    "coulomb_lower",
    "coulomb_lower_for_level",
    "harmonic_upper",
    "coulomb_half_exact",
    "hulthen_exact",
    "hulthen_bound_count",
    "exp_well_orders",
    "exp_well_exact",
    "hulthen_bracket",
    "hulthen_sandwich",
    "bound_spectrum",
]

_ORDER_STEP = 0.01


class BoundSource(enum.Enum):
    COULOMB_LOWER = "CoulombLower"
    HARMONIC_UPPER = "HarmonicUpper"
    HULTHEN_EXACT = "HulthenExact"
    EXP_WELL_EXACT = "ExpWellExact"
    COULOMB_HALF_EXACT = "CoulombHalfExact"


@dataclass(frozen=True)
class BoundSpectrum:
    source: BoundSource
    levels: Tuple[Tuple[int, float], ...]
    # level index of the model the bound is compared with -> meaningful?
    applicability: Callable[[int], bool]

    def energy(self, n: int) -> Optional[float]:
        for level, energy in self.levels:
            if level == n:
                return energy
        return None


class HulthenSandwich(NamedTuple):
    lower: float
    exact: float
    upper: float


def _check_level(n: int):
    if n < 0:
        raise InvalidParameter("Level index must be non-negative, got {}".format(n))


def _check_half_line(k: float, a: float):
    if not k > 0 or not a > 0:
        raise InvalidParameter("k and a must be > 0, got k={} a={}".format(k, a))


def coulomb_lower(n: int) -> float:
    """
    Spectrum of -1/2 d2/dx2 - 1/|x| for the states vanishing at x = 0,
    indexed by the odd sector: n_o = 2n + 1 and E_C = -2 / (n_o + 1)**2.
    """
    _check_level(n)
    odd = 2 * n + 1
    return -2.0 / (odd + 1) ** 2


def coulomb_lower_for_level(level: int) -> Optional[float]:
    """Coulomb lower bound for a full-line level, None for even levels."""
    _check_level(level)
    if level % 2 == 0:
        logger.debug("[BOUNDS] Level {} has no analytic lower bound".format(level))
        return None
    return coulomb_lower((level - 1) // 2)


def harmonic_upper(n: int, D: float) -> float:
    """(n + 1/2) / D**(3/2) - 1/D, from the quadratic expansion at x = 0."""
    _check_level(n)
    if not D > 0:
        raise NonPositiveBias("The bias D must be > 0, got {}".format(D))
    return (n + 0.5) / D**1.5 - 1.0 / D


def coulomb_half_exact(n: int, k: float, a: float) -> float:
    """-k/(a x) on x > 0 is the s-wave hydrogen problem with charge k/a."""
    _check_level(n)
    _check_half_line(k, a)
    return -((k / a) ** 2) / (2.0 * (n + 1) ** 2)


def hulthen_bound_count(k: float, a: float) -> int:
    """Number of bound states: N = n + 1 must satisfy N < sqrt(2k)/a."""
    _check_half_line(k, a)
    limit = math.sqrt(2 * k) / a
    return max(0, math.ceil(limit) - 1)


def hulthen_exact(n: int, k: float, a: float) -> float:
    """E_n = -1/2 (k/(aN) - aN/2)**2 with N = n + 1."""
    _check_level(n)
    if n >= hulthen_bound_count(k, a):
        raise NoBoundState(
            n, "Hulthén level {} is not bound for k={} a={}".format(n, k, a)
        )
    big_n = n + 1
    return -0.5 * (k / (a * big_n) - a * big_n / 2.0) ** 2


def exp_well_orders(k: float, a: float) -> np.ndarray:
    """
    Bessel orders nu > 0 with J_nu(2 sqrt(2k)/a) = 0, in decreasing order.
    Level n has energy -a**2 nu_n**2 / 8.
    """
    _check_half_line(k, a)
    zeta = 2.0 * math.sqrt(2.0 * k) / a

    # J_nu(zeta) > 0 once nu >= zeta, so every root lies in (0, zeta)
    orders = np.arange(_ORDER_STEP, zeta + _ORDER_STEP, _ORDER_STEP)
    values = special.jv(orders, zeta)
    changes = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)

    roots = []
    for i in changes:
        try:
            roots.append(
                optimize.brentq(
                    lambda nu: special.jv(nu, zeta),
                    orders[i],
                    orders[i + 1],
                    xtol=1e-14,
                )
            )
        except (RuntimeError, ValueError) as e:
            raise RootNotBracketed(
                "Bessel order root near {} failed: {}".format(orders[i], e)
            )

    return np.array(sorted(roots, reverse=True))


def exp_well_exact(n: int, k: float, a: float) -> float:
    _check_level(n)
    orders = exp_well_orders(k, a)
    if n >= orders.size:
        raise NoBoundState(
            n, "Exponential-well level {} is not bound for k={} a={}".format(n, k, a)
        )
    return -(a * orders[n]) ** 2 / 8.0


def hulthen_sandwich(n: int, k: float, a: float) -> HulthenSandwich:
    """
    -k/(a x) <= -k/(exp(a x) - 1) <= -k exp(-a x) on x > 0, so the
    Coulomb-half and exponential-well spectra bracket the Hulthén one.
    """
    exact = hulthen_exact(n, k, a)
    lower = coulomb_half_exact(n, k, a)
    upper = exp_well_exact(n, k, a)
    logger.debug(
        "[BOUNDS] Hulthén n={} k={} a={}: {} <= {} <= {}".format(
            n, k, a, lower, exact, upper
        )
    )
    return HulthenSandwich(lower, exact, upper)


def hulthen_bracket(n: int, k: float, a: float) -> Tuple[float, float]:
    sandwich = hulthen_sandwich(n, k, a)
    return sandwich.lower, sandwich.upper


def bound_spectrum(source: BoundSource, n_levels: int, **params) -> BoundSpectrum:
    """Tabulates the first n_levels of a closed-form spectrum."""
    source = BoundSource(source)
    if n_levels < 1:
        raise InvalidParameter("n_levels must be >= 1, got {}".format(n_levels))

    if source is BoundSource.COULOMB_LOWER:
        # compared with the odd full-line levels 2n + 1 only
        levels = tuple((2 * n + 1, coulomb_lower(n)) for n in range(n_levels))
        return BoundSpectrum(source, levels, lambda level: level % 2 == 1)

    if source is BoundSource.HARMONIC_UPPER:
        D = params["D"]
        levels = tuple((n, harmonic_upper(n, D)) for n in range(n_levels))
        return BoundSpectrum(source, levels, lambda level: level >= 0)

    k, a = params["k"], params["a"]
    exact = {
        BoundSource.HULTHEN_EXACT: hulthen_exact,
        BoundSource.EXP_WELL_EXACT: exp_well_exact,
        BoundSource.COULOMB_HALF_EXACT: coulomb_half_exact,
    }[source]
    levels = tuple((n, exact(n, k, a)) for n in range(n_levels))
    return BoundSpectrum(source, levels, lambda level: 0 <= level < n_levels)

# -*- coding: utf-8 -*-
import enum
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from logzero import logger
from scipy import optimize

from etspectra import Configuration, settings
from etspectra.core.models import (
    BoundCharacter,
    Convexity,
    DomainKind,
    HamiltonianModel,
    quantization_number,
)
from etspectra.exceptions import (
    InvalidParameter,
    NoConvergence,
    RootNotBracketed,
    UnsupportedModel,
)

__all__ = [
    "EtSolution",
    "QuadraticEnvelope",
    "EnvelopePair",
    "Regime",
    "solve_level",
    "classify_bound",
    "build_envelopes",
    "envelope_expectation",
    "asymptotic_energy",
    "MIN_SOFT_COULOMB_BIAS",
]

MIN_SOFT_COULOMB_BIAS = 1e-6

# Geometric scan used to bracket the motion equation of a generic model.
_SCAN = np.geomspace(1e-8, 1e8, 1601)


@dataclass(frozen=True)
class EtSolution:
    n: int
    q: float
    x0: float
    p0: float
    energy: float
    bound_character: BoundCharacter
    residuals: Tuple[float, float]
    domain: DomainKind
    model_label: str


@dataclass(frozen=True)
class QuadraticEnvelope:
    """f(z) = value0 + curvature * (z**2 - anchor**2), tangent at z = anchor."""

    value0: float
    curvature: float
    anchor: float

    def __call__(self, z):
        return self.value0 + self.curvature * (np.square(z) - self.anchor**2)

    def derivative(self, z):
        return 2.0 * self.curvature * np.asarray(z)

    def expectation(self, second_moment: float) -> float:
        return self.value0 + self.curvature * (second_moment - self.anchor**2)

    @property
    def coeffs(self) -> Tuple[float, float, float]:
        return (self.value0, self.curvature, self.anchor)


@dataclass(frozen=True)
class EnvelopePair:
    kinetic: QuadraticEnvelope
    potential: QuadraticEnvelope

    @property
    def t_coeffs(self) -> Tuple[float, float, float]:
        return self.kinetic.coeffs

    @property
    def v_coeffs(self) -> Tuple[float, float, float]:
        return self.potential.coeffs


class Regime(enum.Enum):
    LARGE_N = "LargeN"
    SMALL_N_LARGE_D = "SmallNLargeD"


def classify_bound(model: HamiltonianModel) -> BoundCharacter:
    """
    Variational character of the ET energies, from the convexity of
    b_T(p**2) = T(p) and b_V(x**2) = V(x).
    """
    pair = {model.kinetic.b_convexity, model.potential.b_convexity}

    if Convexity.INDEFINITE in pair:
        return BoundCharacter.UNKNOWN
    if pair == {Convexity.LINEAR}:
        return BoundCharacter.EXACT
    if pair <= {Convexity.CONCAVE, Convexity.LINEAR}:
        return BoundCharacter.UPPER_BOUND
    if pair <= {Convexity.CONVEX, Convexity.LINEAR}:
        return BoundCharacter.LOWER_BOUND
    return BoundCharacter.UNKNOWN


def solve_level(
    model: HamiltonianModel,
    n: int,
    tol: float = None,
    configuration: Configuration = None,
) -> EtSolution:
    """
    Solves the ET system for level n:

        E = T(p0) + V(x0),  x0 p0 = Q_n,  p0 T'(p0) = x0 V'(x0)

    with hbar = 1. The soft-Coulomb model is solved in s = x0**2 through
    s**2 = Q**2 (s + D**2)**(3/2), which has a single positive root. Other
    models eliminate p0 = Q/x0 and root-find the motion equation in x0.
    """
    params = settings(configuration)
    tol = params["et_tolerance"] if tol is None else tol
    max_iter = params["et_max_iterations"]

    if not model.supports_et:
        raise UnsupportedModel(
            "Model {} has a singular V' and cannot be solved with the ET".format(
                model.label
            )
        )
    if not tol > 0:
        raise InvalidParameter("Tolerance must be > 0, got {}".format(tol))

    q = quantization_number(n, model.domain)

    if model.label == "soft-coulomb":
        bias = model.parameters["D"]
        if bias < MIN_SOFT_COULOMB_BIAS:
            raise UnsupportedModel(
                "Bias D = {} is below {}, the x0 equation is too ill-conditioned".format(
                    bias, MIN_SOFT_COULOMB_BIAS
                )
            )
        x0 = math.sqrt(_solve_soft_coulomb(q, bias, max_iter))
    else:
        x0 = _solve_motion(model, q, max_iter)

    p0 = q / x0
    kinetic, potential = model.kinetic, model.potential
    energy = float(kinetic.value(p0) + potential.value(x0))
    residuals = (
        abs(x0 * p0 - q),
        abs(float(p0 * kinetic.derivative(p0) - x0 * potential.derivative(x0))),
    )

    if max(residuals) > tol:
        raise NoConvergence(
            max_iter,
            "ET residuals {} for level {} of {} exceed tolerance {}".format(
                residuals, n, model.label, tol
            ),
        )

    logger.debug(
        "[ET] {} n={} Q={} x0={} p0={} E={}".format(model.label, n, q, x0, p0, energy)
    )

    return EtSolution(
        n=n,
        q=q,
        x0=x0,
        p0=p0,
        energy=energy,
        bound_character=classify_bound(model),
        residuals=residuals,
        domain=model.domain,
        model_label=model.label,
    )


def build_envelopes(model: HamiltonianModel, sol: EtSolution) -> EnvelopePair:
    if sol.model_label != model.label:
        raise InvalidParameter(
            "Solution of {} cannot build envelopes for {}".format(
                sol.model_label, model.label
            )
        )

    p0, x0 = sol.p0, sol.x0
    kinetic = QuadraticEnvelope(
        float(model.kinetic.value(p0)),
        float(model.kinetic.derivative(p0)) / (2 * p0),
        p0,
    )
    potential = QuadraticEnvelope(
        float(model.potential.value(x0)),
        float(model.potential.derivative(x0)) / (2 * x0),
        x0,
    )
    return EnvelopePair(kinetic, potential)


def envelope_expectation(sol: EtSolution, env: EnvelopePair) -> float:
    """<n|H~|n> using <p**2> = p0**2 and <x**2> = x0**2."""
    return env.kinetic.expectation(sol.p0**2) + env.potential.expectation(sol.x0**2)


def asymptotic_energy(regime: Regime, n: int, D: float) -> float:
    """Large-n (Coulomb-like) and small-n/large-D (harmonic) limits of E_ET."""
    if n < 0:
        raise InvalidParameter("Level index must be non-negative, got {}".format(n))
    if not D > 0:
        raise InvalidParameter("Bias D must be > 0, got {}".format(D))

    regime = Regime(regime)
    if regime is Regime.LARGE_N:
        return -2.0 / (2 * n + 1) ** 2
    return (n + 0.5) / D**1.5 - 1.0 / D


###############################################################################
# Private functions
###############################################################################
def _solve_soft_coulomb(q: float, bias: float, max_iter: int) -> float:
    d2 = bias * bias

    def g(s):
        return s * s - q * q * (s + d2) ** 1.5

    def dg(s):
        return 2 * s - 1.5 * q * q * math.sqrt(s + d2)

    # g(0) = -Q**2 D**3 < 0, grow the upper end until g changes sign
    lo, hi = 0.0, 4 * max(q * q * bias**3, q**4)
    for _ in range(max_iter):
        if g(hi) > 0:
            break
        lo, hi = hi, 2 * hi
    else:
        raise RootNotBracketed(
            "No sign change of the x0 equation for Q={} D={} below s={}".format(
                q, bias, hi
            )
        )

    coarse = optimize.root_scalar(
        g, bracket=[lo, hi], method="bisect", rtol=1e-6, maxiter=max_iter
    )
    if not coarse.converged:
        raise NoConvergence(coarse.iterations)

    fine = optimize.root_scalar(
        g, x0=coarse.root, fprime=dg, method="newton", rtol=1e-14, maxiter=max_iter
    )
    if fine.converged and lo < fine.root < hi:
        return fine.root

    logger.warning(
        "[ET] Newton left the bracket for Q={} D={}, using Brent".format(q, bias)
    )
    return _brent(g, lo, hi, max_iter)


def _solve_motion(model: HamiltonianModel, q: float, max_iter: int) -> float:
    kinetic, potential = model.kinetic, model.potential

    def motion(x):
        p = q / x
        return p * kinetic.derivative(p) - x * potential.derivative(x)

    with np.errstate(all="ignore"):
        values = np.asarray(motion(_SCAN), dtype=float)

    # dE/dx0 = -motion / x0, the first +/- crossing is the minimum of E(x0)
    crossing = np.flatnonzero(
        np.isfinite(values[:-1])
        & np.isfinite(values[1:])
        & (values[:-1] > 0)
        & (values[1:] <= 0)
    )
    if crossing.size == 0:
        raise RootNotBracketed(
            "No minimum of the ET energy for {} at Q={}".format(model.label, q)
        )

    i = crossing[0]
    return _brent(motion, float(_SCAN[i]), float(_SCAN[i + 1]), max_iter)


def _brent(fn: Callable, lo: float, hi: float, max_iter: int) -> float:
    root, info = optimize.brentq(
        fn,
        lo,
        hi,
        xtol=1e-300,
        rtol=4 * np.finfo(float).eps,
        maxiter=max_iter,
        full_output=True,
        disp=False,
    )
    if not info.converged:
        raise NoConvergence(info.iterations)
    return root

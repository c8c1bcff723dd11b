# -*- coding: utf-8 -*-
"""Domain types, the model registry and the quantization-number scheme."""
import enum
import inspect
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Dict, Mapping

import numpy as np
from logzero import logger

from etspectra.exceptions import (
    InvalidModel,
    InvalidParameter,
    NonPositiveBias,
    UnknownModel,
)
from etspectra.utils import args_fmt

__all__ = [
    "DomainKind",
    "Convexity",
    "BoundCharacter",
    "QuantumNumber",
    "KineticSpec",
    "PotentialSpec",
    "HamiltonianModel",
    "quantization_number",
    "nonrel_kinetic",
    "make_soft_coulomb",
    "make_pure_coulomb",
    "make_harmonic_approx",
    "make_hulthen",
    "make_exp_well",
    "make_coulomb_half",
    "make_model",
    "MODELS",
]

# Probe points for the construction-time parity and derivative checks, drawn
# once from a fixed seed so model validation is reproducible.
_PROBE_COUNT = 100
_PROBES = np.sort(np.random.default_rng(1729).uniform(0.1, 10.0, _PROBE_COUNT))
_FD_STEP = 1e-5


class DomainKind(enum.Enum):
    FULL_LINE = "FullLine"
    HALF_LINE = "HalfLine"


class Convexity(enum.Enum):
    """Global sign of b'' where b(z**2) is the kinetic or potential term."""

    CONCAVE = "Concave"
    LINEAR = "Linear"
    CONVEX = "Convex"
    INDEFINITE = "Indefinite"


class BoundCharacter(enum.Enum):
    UPPER_BOUND = "UpperBound"
    LOWER_BOUND = "LowerBound"
    EXACT = "Exact"
    UNKNOWN = "Unknown"


def quantization_number(n: int, domain: DomainKind) -> float:
    """
    Effective quantization number Q_n of the harmonic auxiliary Hamiltonian.

    On the full line Q_n = n + 1/2. On the half line only the odd oscillator
    states vanish at the origin, so Q_n = n_o + 1/2 with n_o = 2n + 1.
    """
    if n < 0:
        raise InvalidParameter("Level index must be non-negative, got {}".format(n))
    if domain is DomainKind.HALF_LINE:
        return 2 * n + 1 + 0.5
    return n + 0.5


@dataclass(frozen=True)
class QuantumNumber:
    n: int
    domain: DomainKind

    def __post_init__(self):
        if self.n < 0:
            raise InvalidParameter(
                "Level index must be non-negative, got {}".format(self.n)
            )

    @property
    def oscillator_index(self) -> int:
        """Index of the harmonic oscillator state carrying this level."""
        if self.domain is DomainKind.HALF_LINE:
            return 2 * self.n + 1
        return self.n

    @property
    def q(self) -> float:
        return quantization_number(self.n, self.domain)


def _centered_difference(fn: Callable, x: np.ndarray) -> np.ndarray:
    return (fn(x + _FD_STEP) - fn(x - _FD_STEP)) / (2 * _FD_STEP)


def _check_derivative(name: str, value: Callable, derivative: Callable, x):
    exact = np.asarray(derivative(x), dtype=float)
    approx = _centered_difference(value, x)
    if not np.all(np.abs(exact - approx) <= 1e-6 * (1 + np.abs(exact))):
        raise InvalidModel(
            "The derivative of {} does not match its value function".format(name)
        )


def _check_even(name: str, value: Callable, x):
    if not np.allclose(value(x), value(-x), rtol=0.0, atol=1e-12):
        raise InvalidModel("{} must be an even function".format(name))


@dataclass(frozen=True)
class KineticSpec:
    value: Callable
    derivative: Callable
    b_convexity: Convexity
    label: str = "kinetic"

    def __post_init__(self):
        probes = _PROBES / 2
        _check_even(self.label, self.value, probes)
        _check_derivative(self.label, self.value, self.derivative, probes)


@dataclass(frozen=True)
class PotentialSpec:
    value: Callable
    derivative: Callable
    b_convexity: Convexity
    domain: DomainKind
    label: str = "potential"
    # 1/x-like divergence at x = 0, the FGH default grid resolves it finer
    singular_origin: bool = False

    def __post_init__(self):
        if self.domain is DomainKind.FULL_LINE:
            _check_even(self.label, self.value, _PROBES)
            _check_derivative(self.label, self.value, self.derivative, -_PROBES)
        _check_derivative(self.label, self.value, self.derivative, _PROBES)


@dataclass(frozen=True)
class HamiltonianModel:
    kinetic: KineticSpec
    potential: PotentialSpec
    label: str
    parameters: Mapping[str, float] = field(default_factory=dict)
    supports_et: bool = True

    def __post_init__(self):
        object.__setattr__(self, "parameters", MappingProxyType(dict(self.parameters)))

    @property
    def domain(self) -> DomainKind:
        return self.potential.domain

    def describe(self) -> Dict[str, Any]:
        return {
            "model": self.label,
            "parameters": dict(sorted(self.parameters.items())),
            "domain": self.domain.value,
        }


def _positive(name: str, value: float) -> float:
    if not value > 0:
        raise InvalidParameter("{} must be > 0, got {}".format(name, value))
    return float(value)


###############################################################################
# Registry
###############################################################################
def nonrel_kinetic() -> KineticSpec:
    """T(p) = p**2 / 2, so b_T is linear."""

    def value(p):
        return 0.5 * np.square(p)

    def derivative(p):
        return 1.0 * np.asarray(p)

    return KineticSpec(value, derivative, Convexity.LINEAR, label="nonrel")


@args_fmt
def make_soft_coulomb(D: float = None) -> HamiltonianModel:
    """V(x) = -1 / sqrt(x**2 + D**2), b_V(z) = -(z + D**2)**(-1/2) is concave."""
    if D is None or not D > 0:
        raise NonPositiveBias(
            "The soft-Coulomb bias D must be > 0, got {} (use pure-coulomb for D = 0)".format(
                D
            )
        )
    d2 = float(D) ** 2

    def value(x):
        return -1.0 / np.sqrt(np.square(x) + d2)

    def derivative(x):
        return x * (np.square(x) + d2) ** -1.5

    potential = PotentialSpec(
        value, derivative, Convexity.CONCAVE, DomainKind.FULL_LINE, "soft-coulomb"
    )
    return HamiltonianModel(nonrel_kinetic(), potential, "soft-coulomb", {"D": float(D)})


def make_pure_coulomb() -> HamiltonianModel:
    """V(x) = -1/|x|, registered for the bound formulas only."""

    def value(x):
        return -1.0 / np.abs(x)

    def derivative(x):
        return x / np.abs(x) ** 3

    potential = PotentialSpec(
        value,
        derivative,
        Convexity.CONCAVE,
        DomainKind.FULL_LINE,
        "pure-coulomb",
        singular_origin=True,
    )
    return HamiltonianModel(
        nonrel_kinetic(), potential, "pure-coulomb", {}, supports_et=False
    )


@args_fmt
def make_harmonic_approx(D: float = None) -> HamiltonianModel:
    """Lowest-order expansion of the soft-Coulomb potential around x = 0."""
    if D is None or not D > 0:
        raise NonPositiveBias("The bias D must be > 0, got {}".format(D))
    D = float(D)
    curvature = 1.0 / D**3

    def value(x):
        return 0.5 * curvature * np.square(x) - 1.0 / D

    def derivative(x):
        return curvature * np.asarray(x)

    potential = PotentialSpec(
        value, derivative, Convexity.LINEAR, DomainKind.FULL_LINE, "harmonic-approx"
    )
    return HamiltonianModel(nonrel_kinetic(), potential, "harmonic-approx", {"D": D})


@args_fmt
def make_hulthen(k: float = None, a: float = None) -> HamiltonianModel:
    """V(x) = -k / (exp(a x) - 1) on the half line."""
    k, a = _positive("k", k or 0.0), _positive("a", a or 0.0)

    def value(x):
        decay = np.exp(-a * x)
        return -k * decay / -np.expm1(-a * x)

    def derivative(x):
        decay = np.exp(-a * x)
        return k * a * decay / np.square(np.expm1(-a * x))

    potential = PotentialSpec(
        value,
        derivative,
        Convexity.CONCAVE,
        DomainKind.HALF_LINE,
        "hulthen",
        singular_origin=True,
    )
    return HamiltonianModel(nonrel_kinetic(), potential, "hulthen", {"k": k, "a": a})


@args_fmt
def make_exp_well(k: float = None, a: float = None) -> HamiltonianModel:
    """V(x) = -k exp(-a x) on the half line, bounds the Hulthén potential from above."""
    k, a = _positive("k", k or 0.0), _positive("a", a or 0.0)

    def value(x):
        return -k * np.exp(-a * x)

    def derivative(x):
        return k * a * np.exp(-a * x)

    potential = PotentialSpec(
        value, derivative, Convexity.CONCAVE, DomainKind.HALF_LINE, "exp-well"
    )
    return HamiltonianModel(nonrel_kinetic(), potential, "exp-well", {"k": k, "a": a})


@args_fmt
def make_coulomb_half(k: float = None, a: float = None) -> HamiltonianModel:
    """V(x) = -k / (a x) on the half line, bounds the Hulthén potential from below."""
    k, a = _positive("k", k or 0.0), _positive("a", a or 0.0)
    charge = k / a

    def value(x):
        return -charge / np.asarray(x)

    def derivative(x):
        return charge / np.square(x)

    potential = PotentialSpec(
        value,
        derivative,
        Convexity.CONCAVE,
        DomainKind.HALF_LINE,
        "coulomb-half",
        singular_origin=True,
    )
    return HamiltonianModel(
        nonrel_kinetic(), potential, "coulomb-half", {"k": k, "a": a}
    )


MODELS = {
    "soft-coulomb": make_soft_coulomb,
    "pure-coulomb": make_pure_coulomb,
    "harmonic-approx": make_harmonic_approx,
    "hulthen": make_hulthen,
    "exp-well": make_exp_well,
    "coulomb-half": make_coulomb_half,
}


def make_model(label: str, parameters: Mapping[str, Any] = None) -> HamiltonianModel:
    """
    Builds a registered model from its CLI label and a parameter mapping
    whose values may be numbers or numeric strings.
    """
    parameters = dict(parameters or {})
    factory = MODELS.get(label)
    if factory is None:
        raise UnknownModel(
            "Unknown model '{}', expected one of {}".format(label, sorted(MODELS))
        )

    try:
        inspect.signature(factory).bind(**parameters)
    except TypeError:
        raise InvalidParameter(
            "Model '{}' does not accept parameters {}".format(
                label, sorted(parameters)
            )
        )
    model = factory(**parameters)

    logger.debug("[CORE] Built model {} with {}".format(label, dict(model.parameters)))
    return model

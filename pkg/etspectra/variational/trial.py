# -*- coding: utf-8 -*-
"""Oscillator trial states for the two lowest soft-Coulomb levels.

The n = 1 trial state is odd, hence orthogonal to every even eigenstate,
so its energy bounds the first excited level from above. Higher levels
need trial states orthogonalized against all lower exact states and are
not handled here.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from logzero import logger
from scipy import integrate, optimize

from etspectra import Configuration, settings
from etspectra.exceptions import (
    InvalidParameter,
    LevelNotSupported,
    MinimizerNotBracketed,
    NonPositiveBias,
    QuadratureFailure,
)
from etspectra.wavefunction.oscillator import ho_eigenfunction

__all__ = ["VariationalResult", "trial_energy", "variational_energy"]

LOG_SCALE_BOUNDS = (-6.0, 6.0)
# |psi|**2 is below exp(-140) past z = 12
CUTOFF = 12.0


@dataclass(frozen=True)
class VariationalResult:
    n: int
    lambda_opt: float
    energy: float
    iterations: int


def trial_energy(D: float, n: int, lam: float, tol: float = 1e-10) -> float:
    """<n(lam)|H|n(lam)> for the soft-Coulomb model with bias D."""
    _check(D, n)
    if not lam > 0:
        raise InvalidParameter("Trial scale must be > 0, got {}".format(lam))

    kinetic = 0.5 * lam * lam * (n + 0.5)

    def integrand(x):
        psi = ho_eigenfunction(n, lam, x)
        return -(psi * psi) / math.sqrt(x * x + D * D)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, error = integrate.quad(
            integrand, 0.0, CUTOFF / lam, epsabs=tol, epsrel=tol, limit=200
        )
    for w in caught:
        logger.debug("[VAR] quad at lambda={}: {}".format(lam, w.message))

    if not np.isfinite(value) or error > 1e3 * tol * max(1.0, abs(value)):
        raise QuadratureFailure(
            "Potential expectation at lambda={} did not converge (error {:.3g})".format(
                lam, error
            )
        )

    # integrand is even
    return kinetic + 2.0 * value


def variational_energy(
    D: float, n: int, configuration: Configuration = None
) -> VariationalResult:
    """
    Minimizes the trial energy over log(lambda) in [-6, 6] with bounded
    Brent (golden section with parabolic steps).
    """
    _check(D, n)
    tol = settings(configuration)["var_tolerance"]

    def objective(log_lam):
        return trial_energy(D, n, math.exp(log_lam), tol)

    lo, hi = LOG_SCALE_BOUNDS
    result = optimize.minimize_scalar(
        objective,
        bounds=LOG_SCALE_BOUNDS,
        method="bounded",
        options={"xatol": 1e-10, "maxiter": 500},
    )
    if not result.success or min(result.x - lo, hi - result.x) < 1e-6:
        raise MinimizerNotBracketed(
            "No interior minimum for D={} n={} in log(lambda) {} (stopped at {})".format(
                D, n, LOG_SCALE_BOUNDS, result.x
            )
        )

    lam = math.exp(result.x)
    logger.debug(
        "[VAR] D={} n={} lambda={} E={} after {} evaluations".format(
            D, n, lam, result.fun, result.nfev
        )
    )
    return VariationalResult(
        n=n, lambda_opt=lam, energy=float(result.fun), iterations=int(result.nfev)
    )


def _check(D: float, n: int):
    if not D > 0:
        raise NonPositiveBias("The bias D must be > 0, got {}".format(D))
    if n < 0:
        raise InvalidParameter("Level index must be non-negative, got {}".format(n))
    if n > 1:
        raise LevelNotSupported(
            "Level {} needs trial states expanded in an orthonormal basis and "
            "orthogonalized against the lower states; only n = 0 and n = 1 are "
            "supported".format(n)
        )

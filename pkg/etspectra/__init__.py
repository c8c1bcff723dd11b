# -*- coding: utf-8 -*-

"""Top-level package for et-spectra."""

import os
from typing import Any, Dict

from logzero import logger

from etspectra.exceptions import InvalidParameter

__all__ = ["Configuration", "settings", "__version__"]
__version__ = "0.1.0"

Configuration = Dict[str, Any]

# key -> (environment variable, default, cast)
_SETTINGS = {
    "et_tolerance": ("ETSPECTRA_ET_TOLERANCE", 1e-12, float),
    "et_max_iterations": ("ETSPECTRA_ET_MAX_ITERATIONS", 200, int),
    "fgh_min_points": ("ETSPECTRA_FGH_MIN_POINTS", 1025, int),
    "fgh_min_x_max": ("ETSPECTRA_FGH_MIN_X_MAX", 40.0, float),
    "fgh_max_points": ("ETSPECTRA_FGH_MAX_POINTS", 16001, int),
    "var_tolerance": ("ETSPECTRA_VAR_TOLERANCE", 1e-10, float),
    "workers": ("ETSPECTRA_WORKERS", None, int),
}


def settings(configuration: Configuration = None) -> Dict[str, Any]:
    """
    Resolves solver settings from the configuration, falling back to the
    environment and then to the built-in defaults.
    """
    configuration = configuration or {}
    params = dict()

    for key, (env_name, default, cast) in _SETTINGS.items():
        value = configuration.get(key)
        source = "configuration"
        if value is None:
            value = os.getenv(env_name)
            source = "environment"
        if value is None:
            params[key] = default
            continue
        try:
            params[key] = cast(value)
        except (TypeError, ValueError):
            raise InvalidParameter(
                "Setting '{}' from {} must be a {}, got '{}'".format(
                    key, source, cast.__name__, value
                )
            )
        logger.debug("Using {} '{}' from {}".format(key, params[key], source))

    return params

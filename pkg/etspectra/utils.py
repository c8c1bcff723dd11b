import functools

from etspectra.exceptions import InvalidParameter


def args_fmt(fn):
    """Coerces string keyword arguments to floats.

    Model factories receive their parameters from ``-P key=val`` pairs on
    the command line as well as from Python callers.
    """

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        for key, value in kwargs.items():
            if isinstance(value, str):
                try:
                    kwargs[key] = float(value)
                except ValueError:
                    raise InvalidParameter(
                        "Parameter '{}' of {} must be a number, got '{}'".format(
                            key, fn.__name__, value
                        )
                    )
        return fn(*args, **kwargs)

    return wrapper

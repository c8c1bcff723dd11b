# -*- coding: utf-8 -*-
"""The ``et-spectra`` command line.

    et-spectra <command> --model <label> -P key=val ... --levels a..b
               --format csv|json --out PATH

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.
Errors are written to stderr as a single ``<ErrorName>: <message>`` line.
"""
import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import logzero
import numpy as np
from logzero import logger
from scipy import integrate

from etspectra import Configuration, __version__, settings
from etspectra.bounds.analytic import (
    coulomb_half_exact,
    coulomb_lower_for_level,
    exp_well_exact,
    harmonic_upper,
    hulthen_exact,
)
from etspectra.core.models import DomainKind, HamiltonianModel, make_model
from etspectra.envelope.solver import build_envelopes, classify_bound, solve_level
from etspectra.exceptions import (
    EtSpectraError,
    LevelNotSupported,
    NoBoundState,
    NonPositiveBias,
    RootNotBracketed,
    UsageError,
)
from etspectra.fgh.oracle import (
    GridSpec,
    convergence_sweep,
    default_grid,
    fgh_solve,
)
from etspectra.helpers import (
    FORMATS,
    format_value,
    render_csv,
    render_json,
    validate_out_path,
    write_output,
)
from etspectra.variational.trial import variational_energy
from etspectra.wavefunction.oscillator import (
    DEFAULT_SAMPLES,
    default_sampling_grid,
    sample_wavefunction,
)

__all__ = [
    "RunConfig",
    "Table",
    "UNIT_FACTORS",
    "HEADERS",
    "parse_args",
    "cmd_spectrum",
    "cmd_wavefunction",
    "cmd_envelope",
    "cmd_sweep_d",
    "cmd_compare",
    "cmd_convergence",
    "run",
    "main",
]

COMMANDS = ("spectrum", "wavefunction", "envelope", "sweep-d", "compare", "convergence")

HEADERS = {
    "spectrum": ("n", "e_et", "e_fgh", "e_coulomb", "e_ho", "character"),
    "wavefunction": ("n", "x", "psi_et", "psi_fgh"),
    "envelope": ("n", "x", "v", "v_env"),
    "sweep-d": ("d", "n", "e_fgh", "e_var", "e_et"),
    "compare": ("n", "e_lower", "e_exact", "e_fgh", "e_et", "e_upper"),
    "convergence": ("step", "n_points", "x_max", "n", "energy", "delta"),
}

# Multiply lengths and energies by these to restore physical units.
UNIT_FACTORS = {"length": "a_B", "energy": "2 R_y"}

ENVELOPE_POINTS = 401
CONVERGENCE_BASE_POINTS = 129
HULTHEN_DEFAULTS = (("a", "0.2"), ("k", "1"))


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str
    parameters: Tuple[Tuple[str, str], ...] = ()
    levels: Tuple[int, int] = (0, 4)
    fmt: str = "csv"
    out: Optional[str] = None
    n_points: Optional[int] = None
    x_max: Optional[float] = None
    tol: Optional[float] = None
    window: Optional[Tuple[float, float]] = None
    points: Optional[int] = None
    d_range: Tuple[float, float] = (0.25, 4.0)
    d_samples: int = 16
    d_spacing: str = "log"
    certify: bool = False
    verbose: bool = False

    @property
    def level_list(self) -> List[int]:
        return list(range(self.levels[0], self.levels[1] + 1))

    @property
    def params(self) -> Dict[str, str]:
        return dict(self.parameters)

    def configuration(self) -> Configuration:
        return {} if self.tol is None else {"et_tolerance": self.tol}

    def canonical(self) -> List[str]:
        """argv that parses back to this exact configuration."""
        argv = [self.command, "--model", self.model]
        for key, value in self.parameters:
            argv += ["-P", "{}={}".format(key, value)]
        argv += [
            "--levels={}..{}".format(*self.levels),
            "--format",
            self.fmt,
            "--d-range={!r}..{!r}".format(*self.d_range),
            "--d-samples",
            str(self.d_samples),
            "--d-spacing",
            self.d_spacing,
        ]
        if self.out is not None:
            argv += ["--out", self.out]
        if self.n_points is not None:
            argv += ["--n-points", str(self.n_points)]
        if self.x_max is not None:
            argv += ["--x-max", repr(self.x_max)]
        if self.tol is not None:
            argv += ["--tol", repr(self.tol)]
        if self.window is not None:
            argv += ["--window={!r}..{!r}".format(*self.window)]
        if self.points is not None:
            argv += ["--points", str(self.points)]
        if self.certify:
            argv.append("--certify")
        if self.verbose:
            argv.append("--verbose")
        return argv


class Table(NamedTuple):
    header: Tuple[str, ...]
    rows: List[Tuple[Any, ...]]
    metadata: Dict[str, Any]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="et-spectra",
        description="Envelope-theory spectra of 1D two-body Hamiltonians.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--model", default=None, help="registered model label")
    parser.add_argument(
        "-P",
        dest="parameters",
        action="append",
        default=[],
        metavar="KEY=VAL",
        help="model parameter, repeatable",
    )
    parser.add_argument("--levels", default=None, help="inclusive range a..b or a")
    parser.add_argument("--format", dest="fmt", default="csv", choices=FORMATS)
    parser.add_argument("--out", default=None, help="output file, stdout if omitted")
    parser.add_argument("--n-points", type=int, default=None)
    parser.add_argument("--x-max", type=float, default=None)
    parser.add_argument("--tol", type=float, default=None, help="ET residual tolerance")
    parser.add_argument("--window", default=None, help="sampling window a..b")
    parser.add_argument("--points", type=int, default=None)
    parser.add_argument("--d-range", default="0.25..4")
    parser.add_argument("--d-samples", type=int, default=16)
    parser.add_argument("--d-spacing", default="log", choices=("log", "linear"))
    parser.add_argument(
        "--certify",
        action="store_true",
        help="repeat the FGH solve at half spacing and report the differences",
    )
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=__version__)
    return parser


def parse_args(argv: Sequence[str]) -> RunConfig:
    args = _parser().parse_args(list(argv))

    model = args.model
    if args.command == "compare":
        if model not in (None, "hulthen"):
            raise UsageError("compare only runs on the hulthen model, got {}".format(model))
        model = "hulthen"
    elif args.command == "sweep-d":
        if model not in (None, "soft-coulomb"):
            raise UsageError(
                "sweep-d only runs on the soft-coulomb model, got {}".format(model)
            )
        model = "soft-coulomb"
    elif model is None:
        model = "soft-coulomb"

    parameters = dict(HULTHEN_DEFAULTS) if args.command == "compare" else {}
    for item in args.parameters:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError("Parameters are given as -P key=val, got '{}'".format(item))
        parameters[key.strip()] = _canonical_number(value.strip())

    default_levels = "0..1" if args.command == "sweep-d" else "0..4"
    levels = _int_range(args.levels or default_levels, "--levels")

    points = args.points
    if points is None and args.command == "wavefunction":
        points = DEFAULT_SAMPLES
    elif points is None and args.command == "envelope":
        points = ENVELOPE_POINTS
    if points is not None and points < 2:
        raise UsageError("--points must be >= 2, got {}".format(points))
    if args.d_samples < 1:
        raise UsageError("--d-samples must be >= 1, got {}".format(args.d_samples))

    return RunConfig(
        command=args.command,
        model=model,
        parameters=tuple(sorted(parameters.items())),
        levels=levels,
        fmt=args.fmt,
        out=args.out,
        n_points=args.n_points,
        x_max=args.x_max,
        tol=args.tol,
        window=None if args.window is None else _float_range(args.window, "--window"),
        points=points,
        d_range=_float_range(args.d_range, "--d-range"),
        d_samples=args.d_samples,
        d_spacing=args.d_spacing,
        certify=args.certify,
        verbose=args.verbose,
    )


def cmd_spectrum(config: RunConfig) -> Table:
    model = make_model(config.model, config.params)
    levels = config.level_list
    configuration = config.configuration()

    et = _map(lambda n: _et_or_none(model, n, configuration), levels, configuration)
    grid = _grid(config, model, levels[-1])
    fgh = fgh_solve(model, grid, levels[-1] + 1, config.certify, configuration)
    character = classify_bound(model).value

    bias = model.parameters.get("D")
    rows = []
    for n, e_et in zip(levels, et):
        e_coulomb = coulomb_lower_for_level(n) if model.label == "soft-coulomb" else None
        e_ho = harmonic_upper(n, bias) if bias is not None else None
        rows.append(
            (
                n,
                e_et,
                float(fgh.best_estimate[n]),
                e_coulomb,
                e_ho,
                character,
            )
        )

    logger.info("[CLI] spectrum of {} for levels {}".format(model.label, levels))
    return Table(HEADERS["spectrum"], rows, _metadata(config, model, fgh))


def cmd_wavefunction(config: RunConfig) -> Table:
    """ET and FGH wavefunctions per level, sign-aligned by their overlap."""
    model = make_model(config.model, config.params)
    levels = config.level_list
    configuration = config.configuration()

    solutions = _map(
        lambda n: solve_level(model, n, configuration=configuration),
        levels,
        configuration,
    )
    grid = _grid(config, model, levels[-1])
    fgh = fgh_solve(model, grid, levels[-1] + 1, config.certify, configuration)

    rows, overlaps = [], []
    for n, sol in zip(levels, solutions):
        if config.window is None:
            x = default_sampling_grid(sol, config.points)
        else:
            x = np.linspace(config.window[0], config.window[1], config.points)
        sample = sample_wavefunction(sol, x)
        psi_fgh = fgh.wavefunction(n, sample.grid)
        overlap = _overlap(sample.grid, sample.values, psi_fgh)
        if overlap < 0:
            psi_fgh, overlap = -psi_fgh, -overlap
        overlaps.append((n, overlap))
        rows.extend(
            (n, float(xi), float(a), float(b))
            for xi, a, b in zip(sample.grid, sample.values, psi_fgh)
        )

    metadata = _metadata(config, model, fgh)
    metadata["overlaps"] = [{"n": n, "overlap": value} for n, value in overlaps]
    return Table(HEADERS["wavefunction"], rows, metadata)


def cmd_envelope(config: RunConfig) -> Table:
    model = make_model(config.model, config.params)
    levels = config.level_list
    configuration = config.configuration()

    solutions = _map(
        lambda n: solve_level(model, n, configuration=configuration),
        levels,
        configuration,
    )
    reach = 2.0 * max(sol.x0 for sol in solutions)
    if config.window is not None:
        lo, hi = config.window
    elif model.domain is DomainKind.HALF_LINE:
        lo, hi = reach / 200.0, reach
    else:
        lo, hi = -reach, reach
    if model.domain is DomainKind.HALF_LINE and lo <= 0:
        raise UsageError("Half-line envelopes need a window above 0, got {}".format(lo))
    x = np.linspace(lo, hi, config.points)
    v = model.potential.value(x)

    rows, tangency = [], []
    for n, sol in zip(levels, solutions):
        env = build_envelopes(model, sol).potential
        tangency.append(
            {
                "n": n,
                "x0": sol.x0,
                "value": abs(float(env(sol.x0) - model.potential.value(sol.x0))),
                "slope": abs(
                    float(env.derivative(sol.x0) - model.potential.derivative(sol.x0))
                ),
            }
        )
        rows.extend(
            (n, float(xi), float(vi), float(ei)) for xi, vi, ei in zip(x, v, env(x))
        )

    metadata = _metadata(config, model)
    metadata["tangency"] = tangency
    return Table(HEADERS["envelope"], rows, metadata)


def cmd_sweep_d(config: RunConfig) -> Table:
    """FGH, variational and ET energies of the lowest two levels against D."""
    levels = config.level_list
    if levels[-1] > 1:
        raise LevelNotSupported(
            "sweep-d compares the variational bound, which covers levels 0 and 1 only"
        )
    lo, hi = config.d_range
    if not lo > 0 or not hi > 0:
        raise NonPositiveBias("--d-range endpoints must be > 0, got {}".format((lo, hi)))

    if config.d_samples == 1 or lo == hi:
        biases = np.array([lo])
    elif config.d_spacing == "log":
        biases = np.geomspace(lo, hi, config.d_samples)
    else:
        biases = np.linspace(lo, hi, config.d_samples)
    configuration = config.configuration()

    def solve(bias):
        params = dict(config.params, D=bias)
        model = make_model("soft-coulomb", params)
        grid = _grid(config, model, levels[-1])
        fgh = fgh_solve(model, grid, levels[-1] + 1, config.certify, configuration)
        return [
            (
                float(bias),
                n,
                float(fgh.best_estimate[n]),
                variational_energy(float(bias), n, configuration).energy,
                solve_level(model, n, configuration=configuration).energy,
            )
            for n in levels
        ]

    rows = [row for block in _map(solve, list(biases), configuration) for row in block]
    logger.info("[CLI] D sweep over {} samples".format(len(biases)))

    metadata = _metadata(config, None)
    metadata["d_values"] = [float(b) for b in biases]
    return Table(HEADERS["sweep-d"], rows, metadata)


def cmd_compare(config: RunConfig) -> Table:
    """
    Hulthén spectrum against its Coulomb-half lower and exponential-well
    upper bounds, with the FGH and ET values on the Hulthén model itself.
    """
    model = make_model("hulthen", config.params)
    k, a = model.parameters["k"], model.parameters["a"]
    levels = config.level_list
    configuration = config.configuration()

    exact = [hulthen_exact(n, k, a) for n in levels]
    grid = _grid(config, model, levels[-1])
    fgh = fgh_solve(model, grid, levels[-1] + 1, config.certify, configuration)
    et = _map(lambda n: _et_or_none(model, n, configuration), levels, configuration)

    rows = []
    for i, n in enumerate(levels):
        try:
            upper = exp_well_exact(n, k, a)
        except NoBoundState:
            logger.warning("[CLI] Exponential well has no level {}".format(n))
            upper = None
        rows.append(
            (
                n,
                coulomb_half_exact(n, k, a),
                exact[i],
                float(fgh.best_estimate[n]),
                et[i],
                upper,
            )
        )

    return Table(HEADERS["compare"], rows, _metadata(config, model, fgh))


def cmd_convergence(config: RunConfig) -> Table:
    model = make_model(config.model, config.params)
    levels = config.level_list
    configuration = config.configuration()

    if config.n_points is None or config.x_max is None:
        fallback = default_grid(model, levels[-1], configuration)
        base = GridSpec(
            config.n_points or CONVERGENCE_BASE_POINTS,
            config.x_max or fallback.x_max / 2.0,
            model.domain,
        )
    else:
        base = GridSpec(config.n_points, config.x_max, model.domain)

    results = convergence_sweep(model, base, levels[-1] + 1, configuration)

    rows = []
    for step, result in enumerate(results):
        for n in levels:
            rows.append(
                (
                    step,
                    result.spec.n_points,
                    result.spec.x_max,
                    n,
                    float(result.eigenvalues[n]),
                    float(result.convergence_estimate[n]),
                )
            )

    return Table(HEADERS["convergence"], rows, _metadata(config, model, results[-1]))


_COMMANDS: Dict[str, Callable[[RunConfig], Table]] = {
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "envelope": cmd_envelope,
    "sweep-d": cmd_sweep_d,
    "compare": cmd_compare,
    "convergence": cmd_convergence,
}


def run(config: RunConfig) -> str:
    table = _COMMANDS[config.command](config)
    if config.fmt == "json":
        return render_json(table.header, table.rows, table.metadata)
    return render_csv(table.header, table.rows)


def main(argv: Sequence[str] = None) -> int:
    logzero.loglevel(logging.ERROR)
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
        if config.verbose:
            logzero.loglevel(logging.DEBUG)
        out = None if config.out is None else validate_out_path(config.out, config.fmt)
        write_output(run(config), out)
    except EtSpectraError as e:
        sys.stderr.write("{}: {}\n".format(e.name, e))
        return e.exit_code
    return 0


###############################################################################
# Private functions
###############################################################################
def _canonical_number(value: str) -> str:
    try:
        return format_value(float(value))
    except ValueError:
        return value


def _int_range(text: str, option: str) -> Tuple[int, int]:
    first, sep, last = text.partition("..")
    try:
        lo = int(first)
        hi = int(last) if sep else lo
    except ValueError:
        raise UsageError("{} expects a..b with integers, got '{}'".format(option, text))
    if lo < 0:
        raise UsageError("{} must start at 0 or above, got {}".format(option, lo))
    if hi < lo:
        raise UsageError("{} '{}' selects no level".format(option, text))
    return lo, hi


def _float_range(text: str, option: str) -> Tuple[float, float]:
    first, sep, last = text.partition("..")
    try:
        lo = float(first)
        hi = float(last) if sep else lo
    except ValueError:
        raise UsageError("{} expects a..b with numbers, got '{}'".format(option, text))
    if hi < lo:
        raise UsageError("{} '{}' is empty".format(option, text))
    return lo, hi


def _map(fn: Callable, items: List[Any], configuration: Configuration) -> List[Any]:
    """Runs fn over items on a thread pool, results in submission order."""
    with ThreadPoolExecutor(max_workers=settings(configuration)["workers"]) as executor:
        futures = [executor.submit(fn, item) for item in items]
        return [f.result() for f in futures]


def _grid(config: RunConfig, model: HamiltonianModel, n_max: int) -> GridSpec:
    if config.n_points is not None and config.x_max is not None:
        return GridSpec(config.n_points, config.x_max, model.domain)
    grid = default_grid(model, n_max, config.configuration())
    return GridSpec(
        config.n_points or grid.n_points, config.x_max or grid.x_max, model.domain
    )


def _et_or_none(model: HamiltonianModel, n: int, configuration: Configuration):
    try:
        return solve_level(model, n, configuration=configuration).energy
    except RootNotBracketed:
        logger.warning("[CLI] No ET solution for {} level {}".format(model.label, n))
        return None


def _overlap(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float(integrate.trapezoid(a * b, x))


def _metadata(config: RunConfig, model: Optional[HamiltonianModel], fgh=None):
    params = settings(config.configuration())
    metadata = {
        "command": config.command,
        "version": __version__,
        "model": config.model,
        "parameters": config.params,
        "levels": config.level_list,
        "tolerances": {
            "et_tolerance": params["et_tolerance"],
            "var_tolerance": params["var_tolerance"],
        },
        "units": UNIT_FACTORS,
    }
    if model is not None:
        metadata.update(model.describe())
    if fgh is not None:
        grid = fgh.spec.describe()
        estimate = fgh.convergence_estimate
        grid["convergence_estimate"] = (
            None if np.all(np.isnan(estimate)) else float(np.nanmax(estimate))
        )
        metadata["grid"] = grid
    return metadata

from unittest.mock import patch

import numpy as np
import pytest
from scipy import linalg

from etspectra.bounds.analytic import (
    coulomb_half_exact,
    coulomb_lower_for_level,
    exp_well_exact,
    harmonic_upper,
    hulthen_exact,
)
from etspectra.core.models import DomainKind, make_model
from etspectra.envelope.solver import solve_level
from etspectra.exceptions import (
    EigensolverFailure,
    InvalidGrid,
    SingularPotentialOnGrid,
    TooManyLevels,
)
from etspectra.fgh.oracle import (
    GridSpec,
    convergence_sweep,
    default_grid,
    fgh_solve,
    kinetic_kernel,
)
from etspectra.wavefunction.oscillator import count_nodes


def test_kinetic_kernel_is_the_cosine_sum():
    n_points, dx = 65, 0.3
    half = (n_points - 1) // 2
    d = np.arange(n_points)[:, None]
    k = 2 * np.pi * np.arange(1, half + 1)[None, :] / (n_points * dx)
    expected = (2.0 / n_points) * np.sum(
        np.cos(2 * np.pi * d * np.arange(1, half + 1)[None, :] / n_points)
        * 0.5
        * k**2,
        axis=1,
    )

    assert np.allclose(kinetic_kernel(n_points, dx), expected, rtol=0, atol=1e-12)


@pytest.mark.parametrize(
    "n_points, x_max", [(63, 10.0), (64, 10.0), (101, 0.0), (101, -1.0)]
)
def test_grid_validation(n_points, x_max):
    with pytest.raises(InvalidGrid):
        GridSpec(n_points, x_max)


def test_grid_geometry():
    spec = GridSpec(65, 8.0)
    half = GridSpec(65, 8.0, DomainKind.HALF_LINE)

    assert spec.spacing == 0.25
    assert spec.positions[0] == -8.0 and spec.positions[-1] == 8.0
    assert half.positions.size == 32
    assert half.positions[0] == 0.25
    assert spec.refined() == GridSpec(129, 8.0)
    assert spec.extended() == GridSpec(129, 16.0)


def test_harmonic_spectrum_on_default_grid():
    model = make_model("harmonic-approx", {"D": 1})
    result = fgh_solve(model, default_grid(model, 10), 11)

    expected = [harmonic_upper(n, 1.0) for n in range(11)]
    assert np.allclose(result.eigenvalues, expected, rtol=0, atol=1e-8)
    assert np.all(np.isnan(result.convergence_estimate))


def test_eigenvectors_orthonormal_with_parity_and_nodes():
    model = make_model("soft-coulomb", {"D": 2})
    result = fgh_solve(model, GridSpec(1201, 80.0), 6)
    vectors = result.eigenvectors

    assert np.all(np.diff(result.eigenvalues) > 0)
    assert np.allclose(vectors.T @ vectors, np.eye(6), atol=1e-10)
    for n in range(6):
        v = vectors[:, n]
        assert np.allclose(v[::-1], (-1) ** n * v, atol=1e-8)
        assert count_nodes(v) == n
        lead = v[np.abs(v) > 1e-8 * np.abs(v).max()][0]
        assert lead > 0


def test_wavefunction_is_normalized_and_interpolates():
    model = make_model("harmonic-approx", {"D": 1})
    result = fgh_solve(model, GridSpec(401, 12.0), 2)
    psi = result.wavefunction(0)

    assert np.sum(psi**2) * result.spec.spacing == pytest.approx(1.0, abs=1e-10)
    x = np.array([-20.0, 0.0, 0.01, 20.0])
    values = result.wavefunction(0, x)
    assert values[0] == 0.0 and values[-1] == 0.0
    assert values[1] == pytest.approx(np.pi**-0.25, rel=1e-6)


def test_soft_coulomb_ordering_at_bias_two():
    model = make_model("soft-coulomb", {"D": 2})
    result = fgh_solve(model, default_grid(model, 9), 10)

    gaps, coulomb_gaps = [], []
    for n in range(10):
        e_fgh = result.eigenvalues[n]
        e_et = solve_level(model, n).energy
        e_ho = harmonic_upper(n, 2.0)
        assert e_fgh <= e_et
        assert e_et - e_fgh < 0.045
        assert e_fgh <= e_ho
        if n % 2 == 1:
            assert coulomb_lower_for_level(n) <= e_fgh
            coulomb_gaps.append(e_fgh - coulomb_lower_for_level(n))
        gaps.append(e_ho - e_fgh)

    assert all(a < b for a, b in zip(gaps, gaps[1:]))
    assert all(a > b for a, b in zip(coulomb_gaps, coulomb_gaps[1:]))


def test_ground_state_is_certified():
    model = make_model("soft-coulomb", {"D": 2})
    result = fgh_solve(model, default_grid(model, 0), 1, certify=True)

    assert result.convergence_estimate[0] < 1e-12
    assert result.eigenvalues[0] == pytest.approx(-0.370858994330, abs=1e-9)
    assert result.extrapolated[0] == pytest.approx(result.eigenvalues[0], abs=1e-12)
    assert result.eigenvalues[0] < solve_level(model, 0).energy


@pytest.mark.parametrize("bias", [0.5, 1.0, 4.0])
def test_variational_sandwich_across_bias(bias):
    model = make_model("soft-coulomb", {"D": bias})
    result = fgh_solve(model, default_grid(model, 10), 11)

    for n in range(11):
        e_fgh = result.eigenvalues[n]
        upper = min(solve_level(model, n).energy, harmonic_upper(n, bias))
        assert e_fgh <= upper
        if n % 2 == 1:
            assert coulomb_lower_for_level(n) <= e_fgh


def test_hulthen_matches_closed_form_and_bounds():
    model = make_model("hulthen", {"k": 1, "a": 0.2})
    grid = default_grid(model, 2)
    result = fgh_solve(model, grid, 3)

    assert grid.domain is DomainKind.HALF_LINE
    for n in range(3):
        e_fgh = result.eigenvalues[n]
        assert e_fgh == pytest.approx(hulthen_exact(n, 1.0, 0.2), rel=1e-3)
        assert coulomb_half_exact(n, 1.0, 0.2) <= e_fgh <= exp_well_exact(n, 1.0, 0.2)
        assert count_nodes(result.eigenvectors[:, n]) == n


def test_certified_hulthen_reaches_the_closed_form():
    model = make_model("hulthen", {"k": 1, "a": 0.2})
    result = fgh_solve(model, default_grid(model, 2), 3, certify=True)

    for n in range(3):
        exact = hulthen_exact(n, 1.0, 0.2)
        assert result.best_estimate[n] == pytest.approx(exact, rel=5e-6)
        # second-order convergence: the extrapolation gains two orders
        assert abs(result.best_estimate[n] - exact) < 0.05 * abs(
            result.eigenvalues[n] - exact
        )


def test_coulomb_half_matches_hydrogen():
    model = make_model("coulomb-half", {"k": 1, "a": 0.2})
    result = fgh_solve(model, GridSpec(6001, 15.0, DomainKind.HALF_LINE), 3)

    for n in range(3):
        expected = coulomb_half_exact(n, 1.0, 0.2)
        assert result.eigenvalues[n] == pytest.approx(expected, rel=1e-3)


def test_exp_well_matches_bessel_spectrum():
    model = make_model("exp-well", {"k": 1, "a": 0.2})
    result = fgh_solve(model, GridSpec(2001, 40.0, DomainKind.HALF_LINE), 3)

    for n in range(3):
        expected = exp_well_exact(n, 1.0, 0.2)
        assert result.eigenvalues[n] == pytest.approx(expected, rel=1e-6)


def test_grid_domain_follows_the_model():
    model = make_model("exp-well", {"k": 1, "a": 0.2})
    result = fgh_solve(model, GridSpec(401, 40.0), 1)

    assert result.spec.domain is DomainKind.HALF_LINE
    assert result.positions.size == 200


def test_pure_coulomb_is_singular_on_a_symmetric_grid():
    with pytest.raises(SingularPotentialOnGrid):
        fgh_solve(make_model("pure-coulomb"), GridSpec(65, 10.0), 1)


def test_too_many_levels():
    with pytest.raises(TooManyLevels):
        fgh_solve(make_model("soft-coulomb", {"D": 1}), GridSpec(65, 10.0), 17)


@patch("etspectra.fgh.oracle.linalg.eigh", autospec=True)
def test_eigensolver_failure(eigh):
    eigh.side_effect = linalg.LinAlgError("no convergence")

    with pytest.raises(EigensolverFailure):
        fgh_solve(make_model("soft-coulomb", {"D": 1}), GridSpec(65, 10.0), 1)


def test_default_grid_respects_floors():
    model = make_model("soft-coulomb", {"D": 2})

    grid = default_grid(model, 3)
    assert grid.n_points % 2 == 1
    assert grid.n_points >= 1025
    assert grid.x_max >= 40.0

    grid = default_grid(model, 3, {"fgh_min_points": 2000})
    assert grid.n_points >= 2001 and grid.n_points % 2 == 1

    half = default_grid(make_model("coulomb-half", {"k": 1, "a": 0.2}), 0)
    assert half.domain is DomainKind.HALF_LINE
    assert half.x_max == 20.0
    assert half.spacing <= 0.45 / 80 * 1.0001


def test_convergence_sweep_on_the_harmonic_model():
    model = make_model("harmonic-approx", {"D": 1})
    results = convergence_sweep(model, GridSpec(129, 10.0), 5)

    assert len(results) == 5
    assert [r.spec.n_points for r in results] == [129, 257, 513, 1025, 2049]
    assert [r.spec.x_max for r in results] == [10.0, 10.0, 20.0, 20.0, 40.0]
    assert np.all(np.isnan(results[0].convergence_estimate))
    assert np.max(results[2].convergence_estimate) < 1e-10


def test_convergence_sweep_soft_coulomb():
    model = make_model("soft-coulomb", {"D": 0.5})
    results = convergence_sweep(model, GridSpec(129, 20.0), 2)

    deltas = [r.convergence_estimate[0] for r in results[1:]]
    assert deltas[2] < deltas[0]
    assert deltas[-1] < 1e-8


def test_convergence_sweep_propagates_singularity():
    with pytest.raises(SingularPotentialOnGrid):
        convergence_sweep(make_model("pure-coulomb"), GridSpec(65, 10.0), 1)


def test_default_grid_refuses_oversized_grids():
    model = make_model("soft-coulomb", {"D": 1e-5})

    with pytest.raises(InvalidGrid):
        default_grid(model, 4)

    small = default_grid(make_model("soft-coulomb", {"D": 2}), 3)
    with pytest.raises(InvalidGrid):
        default_grid(
            make_model("soft-coulomb", {"D": 2}),
            3,
            {"fgh_max_points": small.n_points - 2},
        )


def test_fgh_solve_refuses_oversized_grids():
    model = make_model("soft-coulomb", {"D": 1})

    with pytest.raises(InvalidGrid):
        fgh_solve(model, GridSpec(201, 10.0), 1, configuration={"fgh_max_points": 199})
    with pytest.raises(InvalidGrid):
        fgh_solve(
            model,
            GridSpec(201, 10.0),
            1,
            certify=True,
            configuration={"fgh_max_points": 301},
        )
    with pytest.raises(InvalidGrid):
        convergence_sweep(model, GridSpec(129, 10.0), 1, {"fgh_max_points": 1000})


@patch("etspectra.fgh.oracle.linalg.eigh", autospec=True)
def test_out_of_memory_is_an_eigensolver_failure(eigh):
    eigh.side_effect = MemoryError()

    with pytest.raises(EigensolverFailure):
        fgh_solve(make_model("soft-coulomb", {"D": 1}), GridSpec(65, 10.0), 1)


def test_uncertified_result_has_no_extrapolation():
    model = make_model("harmonic-approx", {"D": 1})
    result = fgh_solve(model, GridSpec(401, 12.0), 2)

    assert result.extrapolated is None
    assert np.array_equal(result.best_estimate, result.eigenvalues)

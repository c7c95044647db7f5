import numpy as np
import pytest

from dsicheck.catalog import ModelId, partner_shift, reference_model
from dsicheck.eigensolver import solve_levels
from dsicheck.errors import NonNormalizable
from dsicheck.families import Interval
from dsicheck.operators import GridFunction, apply_ladder, inner
from dsicheck.spectrum import energy_level
from dsicheck.wavefunctions import (
    StateGrid,
    boundary_check,
    eigen_residual,
    eigenstate_on,
    ground_state,
    intertwining_residual,
    ladder_state,
    overlap,
    require_admissible,
    state_grid,
)

ALL = list(ModelId)


@pytest.mark.parametrize("mid", ALL)
def test_ground_state_is_annihilated(mid):
    spec = reference_model(mid)
    grid = state_grid(spec)
    psi0 = ground_state(spec, grid)
    killed = apply_ladder(spec, "-", psi0)
    assert np.max(np.abs(killed.values[grid.inner_window()])) < 1e-8 * psi0.sup()


def test_ladder_zero_is_ground_state(pt):
    grid = state_grid(pt)
    assert np.array_equal(ladder_state(pt, 0, grid).values, ground_state(pt, grid).values)


def test_rho_ground_state_matches_eigensolver():
    spec = reference_model("RHO")
    grid = state_grid(spec, 1)
    sol = solve_levels(spec, 1)
    assert overlap(ground_state(spec, grid), eigenstate_on(grid, sol, 0)) >= 1 - 1e-8


def test_pt_first_excited_state(pt):
    grid = state_grid(pt, 1)
    sol = solve_levels(pt, 1)
    assert overlap(ladder_state(pt, 1, grid), eigenstate_on(grid, sol, 1), grid.inner_window()) >= 1 - 1e-6


def test_pt_second_level_eigen_equation(pt):
    res, scale = eigen_residual(pt, 2, energy_level(pt, 2))
    assert res < 1e-5 * scale


@pytest.mark.parametrize("mid", ALL)
def test_isospectral_partner_states(mid):
    spec = reference_model(mid)
    grid = state_grid(spec, 4)
    window = grid.inner_window()
    partner = partner_shift(spec)
    for n in range(3):
        lowered = apply_ladder(spec, "-", ladder_state(spec, n + 1, grid))
        assert overlap(lowered, ladder_state(partner, n, grid), window) >= 1 - 1e-5


@pytest.mark.parametrize("mid", ALL)
def test_orthogonality(mid):
    spec = reference_model(mid)
    grid = state_grid(spec, 4)
    states = [ladder_state(spec, n, grid) for n in range(4)]
    for i in range(4):
        for j in range(i):
            assert abs(inner(states[i], states[j])) < 1e-6


@pytest.mark.parametrize("mid", ALL)
def test_intertwining(mid):
    res, scale = intertwining_residual(reference_model(mid))
    assert res < 1e-6 * scale


def test_ext1_ground_state_vanishes_at_both_ends(ext1):
    psi0 = ground_state(ext1)
    assert np.all(psi0.values[1:-1] > 0)
    left, right = boundary_check(ext1, psi0)
    assert left.hermiticity_ok and right.hermiticity_ok


@pytest.mark.parametrize("mid", ALL)
def test_boundary_conditions_for_ladder_states(mid):
    spec = reference_model(mid)
    grid = state_grid(spec, 4)
    for n in range(4):
        for report in boundary_check(spec, ladder_state(spec, n, grid)):
            assert report.square_integrable and report.hermiticity_ok, (n, report)


def test_constant_function_is_square_integrable(ext1):
    x = np.linspace(1e-4, 2 - 1e-4, 2001)
    const = GridFunction(Interval(x[0], x[-1]), np.ones_like(x))
    assert all(r.square_integrable for r in boundary_check(ext1, const))


def test_inverse_sqrt_is_not_square_integrable():
    spec = reference_model("RHO")
    grid = StateGrid(Interval(1e-6, 8.0), 20001)
    x = grid.nodes
    psi = grid.wrap(np.exp(-x * x) / np.sqrt(x))
    left, _ = boundary_check(spec, psi)
    assert not left.square_integrable


def test_admissible_reference_models():
    for mid in ALL:
        require_admissible(reference_model(mid), 4)


def test_ext1_ground_state_lost_at_large_hbar():
    with pytest.raises(NonNormalizable, match="a \\+ 0ħ"):
        require_admissible(reference_model("DRHO_EXT1", 2.0), 2)

import math

import numpy as np
import pytest

from dsicheck.catalog import ModelId, reference_model
from dsicheck.eigensolver import (
    GridSettings,
    build_canonical_map,
    numeric_canonical_map,
    solve_levels,
)
from dsicheck.errors import NonConvergent
from dsicheck.operators import interior_points
from dsicheck.spectrum import energy_level


def test_canonical_map_examples():
    assert float(build_canonical_map(reference_model("RHO")).forward(1.0)) == pytest.approx(math.pi / 4, rel=1e-15)
    assert float(build_canonical_map(reference_model("DRHO_EXT1")).forward(1.0)) == pytest.approx(math.pi / 3, rel=1e-15)


@pytest.mark.parametrize("mid", list(ModelId))
def test_closed_map_matches_quadrature(mid):
    spec = reference_model(mid)
    closed, numeric = build_canonical_map(spec), numeric_canonical_map(spec)
    xs = interior_points(spec, 7)
    du_closed = np.diff(closed.forward(xs))
    du_numeric = np.diff(numeric.forward(xs))
    assert np.all(du_closed > 0)
    assert np.allclose(du_closed, du_numeric, rtol=1e-9)
    assert np.allclose(closed.inverse(closed.forward(xs)), xs, rtol=1e-11, atol=1e-12)


@pytest.fixture(scope="module")
def pt_solution():
    return solve_levels(reference_model("PT"), 4)


def test_pt_levels(pt_solution):
    assert abs(pt_solution.eigenvalues[0]) < 1e-7
    assert pt_solution.eigenvalues[1] == pytest.approx(4 + 2 * math.sqrt(3), rel=1e-6)


def test_ext1_first_level():
    sol = solve_levels(reference_model("DRHO_EXT1"), 1)
    assert sol.eigenvalues[1] == pytest.approx(6.0, rel=1e-6)


def test_node_counts(pt_solution):
    assert [pt_solution.node_count(k) for k in range(5)] == [0, 1, 2, 3, 4]


def test_grid_independence(pt_solution):
    assert np.all(pt_solution.changes < 1e-7)


def test_eigenvectors_have_unit_norm(pt_solution):
    for k in range(3):
        assert pt_solution.phi(k).norm() == pytest.approx(1.0, rel=1e-10)


def test_richardson_off_is_less_accurate():
    spec = reference_model("PT")
    raw = solve_levels(spec, 2, GridSettings(n_points=1000, extrapolate=False))
    exact = energy_level(spec, 2)
    assert abs(raw.eigenvalues[2] - exact) > 1e-6 * exact


def test_nonconvergent_when_budget_exhausted():
    with pytest.raises(NonConvergent):
        solve_levels(reference_model("PT"), 2, GridSettings(n_points=50, conv_tol=1e-15, max_refinements=0))


def test_export(tmp_path, pt_solution):
    path = tmp_path / "phi1.dat"
    pt_solution.save(1, path, coordinate="x")
    data = np.loadtxt(path)
    assert data.shape[1] == 2
    assert np.all(np.diff(data[:, 0]) > 0)

import math

import numpy as np
import pytest

from dsicheck.autodiff import Jet
from dsicheck.catalog import reference_model
from dsicheck.errors import GridTooCoarse, NotFlat, OutOfDomain
from dsicheck.families import Interval
from dsicheck.operators import (
    GridFunction,
    apply_hamiltonian,
    apply_hamiltonian_direct,
    apply_ladder,
    eval_f,
    eval_V,
    eval_V_minus,
    eval_V_plus,
    eval_W,
    ground_energy_shift,
    interior_points,
)

from dsicheck.catalog import ModelId

ALL_MODELS = list(ModelId)


def test_f_examples():
    assert float(eval_f(reference_model("PT"), 0.0)) == 1.0
    assert float(eval_f(reference_model("DRHO_EXT1"), 1.0)) == pytest.approx(math.sqrt(0.75), rel=1e-15)
    assert float(eval_f(reference_model("RHO"), 2.0)) == 5.0


def test_W_examples():
    assert float(eval_W(reference_model("PT"), 0.0)) == 0.0
    full = float(eval_W(reference_model("DRHO_EXT1"), 1.0))
    assert full == pytest.approx(0.2886751 + 0.4618802, abs=2e-7)


def test_out_of_domain():
    with pytest.raises(OutOfDomain):
        eval_f(reference_model("PT"), 2.0)


def test_partner_potentials():
    spec = reference_model("PT")
    assert float(eval_V_minus(spec, 0.0)) == pytest.approx(-(1 + math.sqrt(3)), rel=1e-14)
    xs = interior_points(spec, 50)
    slope = eval_W(spec, Jet.seed_x(xs, px=1)).d(1, 0)
    diff = np.asarray(eval_V_plus(spec, xs)) - np.asarray(eval_V_minus(spec, xs))
    assert np.allclose(diff, 2 * spec.hbar * eval_f(spec, xs) * slope, rtol=1e-12)


def test_ground_energy_shift_examples():
    assert ground_energy_shift(reference_model("PT")) == pytest.approx(3 + math.sqrt(3), rel=1e-13)
    assert ground_energy_shift(reference_model("RHO")) == pytest.approx(1.5 * math.sqrt(5) + 2.5, rel=1e-13)
    rho = reference_model("RHO")
    assert float(eval_V_minus(rho, 1.0)) + ground_energy_shift(rho) == pytest.approx(float(eval_V(rho, 1.0)), abs=1e-12)


@pytest.mark.parametrize("mid", ALL_MODELS)
def test_flatness_for_every_model(mid):
    ground_energy_shift(reference_model(mid))


def test_not_flat_negative_control(monkeypatch):
    spec = reference_model("PT")
    fam = type(spec.family)
    original = fam.W
    monkeypatch.setattr(fam, "W", lambda self, x, a, s: 1.01 * original(self, x, a, s))
    with pytest.raises(NotFlat):
        ground_energy_shift(spec)


@pytest.mark.parametrize("mid", ALL_MODELS)
def test_factorization_identity(mid):
    spec = reference_model(mid)
    xs = interior_points(spec, 100)
    w = eval_W(spec, Jet.seed_x(xs, px=1))
    expected = w.d(0, 0) ** 2 - spec.hbar * eval_f(spec, xs) * w.d(1, 0)
    got = np.asarray(eval_V_minus(spec, xs))
    assert np.max(np.abs(got - expected) / np.maximum(np.abs(expected), 1)) < 1e-13


def _bump(n=2001):
    x = np.linspace(-1.2, 1.2, n)
    return GridFunction(Interval(-1.2, 1.2), np.exp(-4 * x * x) * np.cos(x) ** 8)


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarse):
        apply_ladder(reference_model("PT"), "+", GridFunction(Interval(-1, 1), np.ones(10)))


def test_factorized_and_direct_hamiltonians_agree():
    spec, psi = reference_model("PT"), _bump()
    a = apply_hamiltonian(spec, "-", psi)
    b = apply_hamiltonian_direct(spec, "-", psi)
    inner = a.interior(4)
    a, b = a.values[inner], b.values[inner]
    assert np.max(np.abs(a - b)) < 1e-7 * np.max(np.abs(a))


def test_hamiltonian_symmetry():
    spec = reference_model("PT")
    x = np.linspace(-1.2, 1.2, 2001)
    phi = GridFunction(Interval(-1.2, 1.2), np.exp(-6 * (x - 0.2) ** 2) * np.cos(x) ** 8)
    psi = _bump()
    from dsicheck.operators import integrate

    lhs = integrate(phi.values * apply_hamiltonian(spec, "-", psi).values, psi.h)
    rhs = integrate(apply_hamiltonian(spec, "-", phi).values * psi.values, psi.h)
    assert lhs == pytest.approx(rhs, rel=1e-7)


def test_gridfunction_text_round_trip(tmp_path):
    psi = _bump(101)
    path = tmp_path / "psi.dat"
    psi.save(path)
    back = GridFunction.from_text(path.read_text())
    assert np.array_equal(back.values, psi.values)

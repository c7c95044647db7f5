import numpy as np
import pytest

from dsicheck import hbar_series as hs
from dsicheck.catalog import RawParams, build_model, reference_model
from dsicheck.dsi import dsi_residual
from dsicheck.errors import DivergentSeries, WrongModel
from dsicheck.operators import interior_points

F = np.sqrt(0.75)


def test_terms(ext1):
    assert hs.series_term(0, 1.0, 2.5, ext1) == pytest.approx(0.2886751345948, abs=1e-12)
    assert hs.series_term(3, 1.0, 2.5, ext1) == 0.0
    # D = 3.5 at x = 1, so W2 = 6 f / 12.25
    assert hs.series_term(2, 1.0, 2.5, ext1) == pytest.approx(6 * F / 12.25, rel=1e-14)
    assert hs.series_term(2, 1.0, 2.5, ext1) == pytest.approx(0.4241757, abs=1e-7)


def test_wrong_model():
    with pytest.raises(WrongModel):
        hs.series_term(0, 1.0, 2.5, reference_model("DRHO"))


def test_pair_sums(ext1):
    assert hs.pair_sum(3, 1.0, 2.5, ext1) == 0.0
    for s in (2, 4, 6, 8):
        p, f = hs.pair_sum(s, 1.0, 2.5, ext1), hs.F_s(s, 1.0, 2.5, ext1)
        assert abs(p - f) <= 1e-13 * abs(f)
    w0, w2, w4 = (hs.series_term(k, 1.0, 2.5, ext1) for k in (0, 2, 4))
    assert hs.pair_sum(4, 1.0, 2.5, ext1) == pytest.approx(2 * w0 * w4 + w2 * w2, rel=1e-15)


def test_pair_sum_residual_over_mesh(ext1):
    xs = interior_points(ext1, 50)
    assert max(hs.pair_sum_residual(s, xs, None, ext1) for s in range(1, 9)) < 1e-13


@pytest.mark.parametrize("method", ["closed", "jet"])
@pytest.mark.parametrize("n,s", [(4, 4), (4, 2), (5, 2), (6, 4), (7, 2), (8, 6)])
def test_derivative_identity(ext1, n, s, method):
    assert hs.derivative_identity_residual(n, s, 1.0, 2.5, ext1, method) < 1e-11


def test_closed_a_derivative_matches_jet(ext1):
    from dsicheck.autodiff import Jet

    for s, m in [(2, 1), (4, 3), (6, 2)]:
        jet = hs.F_s(s, 0.8, Jet.seed_a(2.5, px=0, pa=m), ext1).d(0, m)
        assert hs.F_s_a_derivative(s, m, 0.8, 2.5, ext1) == pytest.approx(jet, rel=1e-12)


def test_order_relations(ext1):
    assert hs.order_n_residual(1, [1.0], 2.5, ext1) < 1e-12
    assert hs.order_n_residual(2, [1.0], 2.5, ext1) == 0.0
    xs = interior_points(ext1, 50)
    for n in range(3, 9):
        assert hs.order_n_residual(n, xs, None, ext1) < 1e-10
        assert hs.general_order_residual(n, xs, None, ext1) < 1e-10


def test_summation_closed_forms(ext1):
    xs = interior_points(ext1, 50)
    for n in range(3, 9):
        assert max(hs.summation_identity_residuals(n, xs, None, ext1)) < 1e-9


def test_parity_assembly_and_flip_control(ext1):
    xs = interior_points(ext1, 50)
    for n in range(3, 9):
        assert hs.order_n_parity_residual(n, xs, None, ext1) < 1e-12
        for branch in hs.SUMS:
            assert hs.order_n_parity_residual(n, xs, None, ext1, flip=branch) > 0.5


def test_partial_sums(ext1):
    assert hs.partial_sum_error(0, 1.0, ext1) == pytest.approx(0.4618802, abs=1e-7)
    assert hs.partial_sum_error(20, 1.0, ext1) < 1e-10
    rows = hs.convergence_table(1.0, ext1, 10)
    for (_, e0), (_, e1) in zip(rows, rows[1:]):
        assert e1 / e0 == pytest.approx(1 / 12.25, rel=0.2)


def test_divergent_series():
    # D falls to 2(l + 1) = 2 at the origin
    spec = build_model("DRHO_EXT1", RawParams(hbar=2.5, omega=2.0, lam=-0.25, l=0))
    x = np.linspace(0.05, 0.5, 20)
    with pytest.raises(DivergentSeries):
        hs.partial_sum_error(4, x, spec)


def test_odd_order_rejected(ext1):
    with pytest.raises(ValueError):
        hs.partial_sum_error(3, 1.0, ext1)


@pytest.mark.parametrize("ratio", [0.1, 0.3, 0.5])
def test_resummation_identity(ext1, ratio):
    xs = interior_points(ext1, 50)
    D = hs.denominator(xs, ext1.a, ext1)
    hbar = ratio * D
    tail = sum(hbar ** (2 * v) * hs.series_term(2 * v, xs, None, ext1) for v in range(1, 60))
    assert np.allclose(tail, hs.resummed_tail(xs, ext1, hbar=hbar), rtol=1e-13, atol=0)
    assert np.allclose(hs.closed_correction(xs, ext1, hbar=hbar), hs.resummed_tail(xs, ext1, hbar=hbar), rtol=1e-13)


@pytest.mark.parametrize("hbar", [0.5, 1.0])
def test_closed_form_is_shape_invariant(hbar):
    spec = build_model("DRHO_EXT1", RawParams(hbar=hbar, omega=2.0, lam=-0.25, l=0))
    assert dsi_residual(spec).max_relative < 1e-11


def test_convergence_csv(ext1):
    text = hs.convergence_csv(hs.convergence_table(1.0, ext1, 4))
    assert text.splitlines()[0] == "N,error"
    assert len(text.splitlines()) == 4

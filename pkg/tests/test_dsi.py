import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dsicheck.catalog import ModelId, RawParams, build_model, reference_model
from dsicheck.dsi import condition1_residual, condition2_residual, dsi_residual
from dsicheck.errors import ExplicitHbarModel

HBAR_FREE = [m for m in ModelId if m is not ModelId.DRHO_EXT1]


def test_pt_single_point(pt):
    assert dsi_residual(pt, [0.3]).max_relative < 1e-12


@pytest.mark.parametrize("hbar", [0.25, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("mid", list(ModelId))
def test_identity_holds_across_hbar(mid, hbar):
    assert dsi_residual(reference_model(mid, hbar)).max_relative < 1e-11


def test_g_offset_negative_control(pt):
    sample = dsi_residual(pt, g_offset=1e-3)
    assert np.allclose(np.abs(sample.residual), 1e-3, rtol=1e-6)


def test_condition1_examples(pt):
    assert condition1_residual(pt, [0.3]).max_relative < 1e-12
    assert condition1_residual(reference_model("RHO"), [1.0]).max_relative < 1e-12


def test_condition1_rejects_explicit_hbar(ext1):
    with pytest.raises(ExplicitHbarModel):
        condition1_residual(ext1)
    with pytest.raises(ExplicitHbarModel):
        condition2_residual(ext1)


@pytest.mark.parametrize("mid", HBAR_FREE)
def test_conditions_for_hbar_free_models(mid):
    spec = reference_model(mid)
    assert condition1_residual(spec).max_relative < 1e-12
    sample = condition2_residual(spec)
    assert np.all(np.abs(sample.residual) < 1e-13 * sample.scale)


def test_condition2_exact_zero_for_pt(pt):
    assert np.all(condition2_residual(pt).residual == 0)


def test_condition2_negative_control(pt):
    sample = condition2_residual(pt, [0.1, 0.5], superpotential=lambda x, a, s: a * a * x)
    assert np.allclose(sample.residual, 2.0)


def test_csv_rows(pt):
    text = dsi_residual(pt, [0.1, 0.2]).to_csv("PT")
    lines = text.splitlines()
    assert lines[0] == "model,x,residual,scale,pass"
    assert len(lines) == 3 and lines[1].endswith("true")


@given(
    st.floats(1.05, 6.0),
    st.floats(-0.8, 2.0).filter(lambda a: abs(a) > 1e-2),
    st.sampled_from([0.25, 0.5, 1.0]),
)
def test_pt_identity_for_random_parameters(A, alpha, hbar):
    spec = build_model("PT", RawParams(hbar=hbar, A=A * hbar, alpha=alpha))
    assert dsi_residual(spec).max_relative < 1e-11


@given(st.floats(0.2, 4.0), st.floats(0.5, 5.0), st.integers(0, 3))
def test_rho_identity_for_random_parameters(alpha, omega, l):
    spec = build_model("RHO", RawParams(hbar=1.0, alpha=alpha, omega=omega, l=l))
    assert dsi_residual(spec).max_relative < 1e-11

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dsicheck.catalog import (
    ModelId,
    RawParams,
    build_model,
    list_catalog,
    partner_shift,
    reference_model,
)
from dsicheck.errors import ConstraintViolation, UnknownFamily
from dsicheck.operators import eval_f, interior_points

ALL_MODELS = list(ModelId)


def test_pt_derived_parameters():
    spec = build_model("PT", RawParams(hbar=1.0, alpha=1.0, A=2.0))
    assert spec.derived.delta == pytest.approx(2 * math.sqrt(3), rel=1e-14)
    assert spec.a == pytest.approx((1 + math.sqrt(3)) / 2, rel=1e-14)


def test_rho_derived_parameters():
    spec = build_model("RHO", dict(hbar=1.0, alpha=1.0, omega=2.0, l=0))
    assert spec.derived.delta == pytest.approx(math.sqrt(5), rel=1e-14)
    assert spec.a == pytest.approx(1.3090170, abs=1e-7)
    assert spec.b == pytest.approx(-0.3090170, abs=1e-7)


def test_constraint_violation_names_inequality():
    with pytest.raises(ConstraintViolation, match="A"):
        build_model("PT", RawParams(hbar=1.0, alpha=1.0, A=0.5))


def test_unknown_family():
    with pytest.raises(UnknownFamily):
        build_model("NOPE", RawParams())


def test_ext1_requires_negative_lambda():
    with pytest.raises(ConstraintViolation):
        build_model("DRHO_EXT1", dict(hbar=1.0, omega=2.0, lam=0.25, l=0))


def test_catalog_listing():
    entries = list_catalog()
    assert len(entries) == 11
    raw = dict(entries)[ModelId.DRHO_EXT1]
    assert (raw.hbar, raw.omega, raw.lam, raw.l) == (1.0, 2.0, -0.25, 0)
    raw = dict(entries)[ModelId.PT]
    assert (raw.hbar, raw.alpha, raw.A) == (1.0, 1.0, 2.0)


def test_partner_shift():
    spec = reference_model("PT")
    once = partner_shift(spec)
    assert once.a == pytest.approx(2.3660254, abs=1e-7)
    assert partner_shift(once).a == spec.a + 2 * spec.hbar
    ext = partner_shift(reference_model("DRHO_EXT1"))
    assert (ext.a, ext.b) == (3.5, -1.5)
    assert ext.raw == reference_model("DRHO_EXT1").raw


@pytest.mark.parametrize("mid", ALL_MODELS)
def test_deforming_function_positive(mid):
    spec = reference_model(mid)
    assert np.all(np.asarray(eval_f(spec, interior_points(spec, 200))) > 0)


@pytest.mark.parametrize("mid", ALL_MODELS)
def test_build_is_idempotent(mid):
    spec = reference_model(mid)
    assert build_model(mid, spec.raw) == spec


@pytest.mark.parametrize("mid", [ModelId.RHO, ModelId.DRHO, ModelId.DRHO_EXT1])
def test_radial_a_plus_b(mid):
    spec = reference_model(mid)
    assert spec.a + spec.b == pytest.approx(spec.raw.l + 1, abs=1e-14)


@given(st.floats(1.1, 5.0), st.floats(-0.9, 3.0).filter(lambda a: abs(a) > 1e-3))
def test_pt_constraints_accept_valid_draws(A, alpha):
    spec = build_model("PT", RawParams(hbar=1.0, A=A, alpha=alpha))
    assert spec.derived.delta > 0

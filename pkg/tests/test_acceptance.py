"""Acceptance criteria, one printed PASS/FAIL line each, tolerances pinned."""

import math
import time

import numpy as np
import pytest

from dsicheck import dsi, hbar_series, spectrum
from dsicheck.catalog import ModelId, reference_model
from dsicheck.conventions import potential_relation, round_trip_error
from dsicheck.eigensolver import solve_levels
from dsicheck.operators import interior_points
from dsicheck.report import SuiteConfig, emit_report, render, run_suite

ALL = list(ModelId)
HBAR_FREE = [m for m in ALL if not reference_model(m).hbar_explicit]
APPENDIX = [m for m in ALL if m is not ModelId.DRHO_EXT1]
HBARS = (0.5, 1.0, 2.0)

TOL_DSI = 1e-11
TOL_COND1 = 1e-12
TOL_COND2 = 1e-13
TOL_EIGEN = 1e-6
TOL_TABLE = 1e-10
TOL_ORDER = 1e-10
TOL_PAIR = 1e-13
TOL_RATIO = 0.2
TOL_RESUM = 1e-10
TOL_ANNIHILATE = 1e-8
TOL_OVERLAP = 1e-6
TOL_INTERTWINE = 1e-6
TOL_ROUND_TRIP = 1e-14
TOL_POTENTIAL = 1e-12


def _report(capsys, number, ok, summary, elapsed, limit):
    ok = ok and (limit is None or elapsed < limit)
    budget = "" if limit is None else f" ({elapsed:.2f} s < {limit:g} s)"
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {summary}{budget}")
    assert ok, summary


def test_criterion_1_dsi_identity(capsys):
    t0 = time.perf_counter()
    worst = 0.0
    for mid in ALL:
        for h in HBARS:
            spec = reference_model(mid, h)
            worst = max(worst, dsi.dsi_residual(spec, interior_points(spec, 200)).max_relative)
    elapsed = time.perf_counter() - t0
    _report(capsys, 1, worst < TOL_DSI, f"DSI residual {worst:.2e} < {TOL_DSI:g}, 11 models x 3 hbar", elapsed, 5)


def test_criterion_2_pde_reductions(capsys):
    t0 = time.perf_counter()
    c1 = max(dsi.condition1_residual(reference_model(m)).max_relative for m in HBAR_FREE)
    c2 = max(dsi.condition2_residual(reference_model(m)).max_relative for m in HBAR_FREE)
    elapsed = time.perf_counter() - t0
    ok = len(HBAR_FREE) == 10 and c1 < TOL_COND1 and c2 < TOL_COND2
    _report(capsys, 2, ok, f"condition 1 {c1:.2e} < {TOL_COND1:g}, condition 2 {c2:.2e} < {TOL_COND2:g}", elapsed, 2)


def test_criterion_3_spectrum_oracle(capsys):
    t0 = time.perf_counter()
    worst, pt_e1, ext_e1 = 0.0, math.nan, math.nan
    for mid in ALL:
        spec = reference_model(mid)
        sol = solve_levels(spec, 4)
        for n in range(5):
            exact = spectrum.energy_level(spec, n, strict=False)
            if n > 0:
                worst = max(worst, abs(sol.eigenvalues[n] - exact) / abs(exact))
            else:
                worst = max(worst, abs(sol.eigenvalues[0]))
        if mid is ModelId.PT:
            pt_e1 = sol.eigenvalues[1]
        if mid is ModelId.DRHO_EXT1:
            ext_e1 = sol.eigenvalues[1]
    elapsed = time.perf_counter() - t0
    ok = (
        worst <= TOL_EIGEN
        and abs(pt_e1 / (4 + 2 * math.sqrt(3)) - 1) <= TOL_EIGEN
        and abs(ext_e1 / 6 - 1) <= TOL_EIGEN
    )
    summary = f"eigen rel err {worst:.2e} <= {TOL_EIGEN:g} (E0 absolute), PT E1 = {pt_e1:.7f}, EXT1 E1 = {ext_e1:.7f}"
    _report(capsys, 3, ok, summary, elapsed, 30)


def test_criterion_4_table_crosscheck(capsys):
    t0 = time.perf_counter()
    agree, flagged, unexplained = [], {}, []
    for mid in ALL:
        rows = spectrum.spectrum(reference_model(mid), 5).table_mismatches
        if not rows:
            agree.append(mid.value)
            continue
        flagged[mid.value] = [r.n for r in rows]
        for r in rows:
            if not r.n >= 1 or spectrum.table_agrees(r.g_difference, r.closed_form, TOL_TABLE):
                unexplained.append(mid.value)
    elapsed = time.perf_counter() - t0
    ok = len(agree) + len(flagged) == len(ALL) and not unexplained
    _report(capsys, 4, ok, f"{len(agree)} models agree to {TOL_TABLE:g}, TableMismatch reported for {flagged}", elapsed, 1)


def test_criterion_4_mismatches_resolved_by_eigensolver():
    # the flagged entries are typos in the tabulated forms: the numerics follow the g-difference form
    for mid in (ModelId.RM, ModelId.SHO):
        spec = reference_model(mid)
        sol = solve_levels(spec, 3)
        rows = spectrum.table_crosscheck(spec, 3)
        for r in rows[1:]:
            assert abs(sol.eigenvalues[r.n] - r.g_difference) <= TOL_EIGEN * abs(r.g_difference)


def test_criterion_5_hbar_series(capsys):
    t0 = time.perf_counter()
    spec = reference_model(ModelId.DRHO_EXT1)
    xs = interior_points(spec, 50)
    order = max(hbar_series.order_n_residual(n, xs, None, spec) for n in range(1, 9))
    pair = max(hbar_series.pair_sum_residual(s, xs, None, spec) for s in range(2, 9))
    rows = hbar_series.convergence_table(1.0, spec, 20)
    errs = np.array([e for _, e in rows])
    expected = float(hbar_series.convergence_ratio(1.0, spec))
    ratio_dev = float(np.max(np.abs(errs[1:5] / errs[:4] / expected - 1)))
    resum = float(errs[-1])
    elapsed = time.perf_counter() - t0
    ok = order < TOL_ORDER and pair < TOL_PAIR and ratio_dev <= TOL_RATIO and resum < TOL_RESUM
    summary = (
        f"order-n {order:.1e}, pair sums {pair:.1e}, ratio off by {ratio_dev:.1%} of {expected:.5f}, N=20 error {resum:.1e}"
    )
    _report(capsys, 5, ok, summary, elapsed, 2)


def test_criterion_6_wavefunctions(capsys):
    t0 = time.perf_counter()
    cfg = SuiteConfig(checks=["wavefunction"], n_max=3)
    reports = run_suite(cfg)
    elapsed = time.perf_counter() - t0
    pinned = {
        "annihilation": TOL_ANNIHILATE,
        "ladder_overlap": TOL_OVERLAP,
        "intertwining": TOL_INTERTWINE,
    }
    for r in reports:
        if r.check in pinned:
            assert r.tolerance == pinned[r.check]
    failing = [f"{r.model}/{r.check}" for r in reports if not r.passed]
    worst = {c: max(r.max_residual or math.inf for r in reports if r.check == c) for c in pinned}
    summary = ", ".join(f"{c} {v:.1e}" for c, v in worst.items()) + f", failing {failing or 'none'}"
    _report(capsys, 6, not failing and len(reports) == 6 * len(ALL), summary, elapsed, 20)


def test_criterion_7_conventions(capsys):
    t0 = time.perf_counter()
    trip = pot = 0.0
    for mid in APPENDIX:
        for h in HBARS:
            spec = reference_model(mid, h)
            trip = max(trip, round_trip_error(spec))
            pot = max(pot, potential_relation(spec, interior_points(spec, 50)).potential_residual)
    elapsed = time.perf_counter() - t0
    ok = trip <= TOL_ROUND_TRIP and pot < TOL_POTENTIAL
    _report(capsys, 7, ok, f"round trip {trip:.1e} <= {TOL_ROUND_TRIP:g}, V relation {pot:.1e} < {TOL_POTENTIAL:g}", elapsed, 1)


def test_criterion_8_cli_determinism(capsys, tmp_path):
    t0 = time.perf_counter()
    cfg = SuiteConfig()
    paths = [tmp_path / "run1.json", tmp_path / "run2.json"]
    codes = [emit_report(run_suite(cfg), "json", p, {"finished": str(time.time())}) for p in paths]
    identical = paths[0].read_bytes() == paths[1].read_bytes()

    def broken(spec, cfg, emit):
        emit("dsi", math.inf, "injected")

    injected = run_suite(SuiteConfig(models=[ModelId.PT], checks=["dsi", "conventions"]), runners={"dsi": broken})
    fault_code = emit_report(injected, "csv", tmp_path / "fault.csv")
    clean_code = emit_report(run_suite(SuiteConfig(models=[ModelId.PT], checks=["dsi"])), "csv", tmp_path / "ok.csv")
    header_ok = render(injected, "csv").startswith("suite,model,check,max_residual,tolerance,pass\n")
    elapsed = time.perf_counter() - t0
    ok = identical and codes == [0, 0] and fault_code == 1 and clean_code == 0 and header_ok
    summary = f"byte-identical JSON {identical}, full-suite exit {codes}, injected fault exit {fault_code}, clean exit {clean_code}"
    _report(capsys, 8, ok, summary, elapsed, None)

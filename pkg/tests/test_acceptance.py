"""The ten acceptance criteria, one test each.

Every test records a one-line verdict that the terminal summary prints
under "acceptance criteria".
"""

import time

import numpy as np
import pytest

from hermtrig import algebra
from hermtrig.classical import check_classical
from hermtrig.cli import contraction_study
from hermtrig.group import exp_series, one_param, scaled_generator
from hermtrig.laws import Quantities, evaluate_laws, full_suite, jacobian_rank, residual_basic
from hermtrig.scalars import SpaceLabels, all_normalized_labels, dual_labels, sink
from hermtrig.triangle import (
    FIELDS,
    classify_special,
    dual_triangle,
    gramm_Gamma,
    gramm_gamma,
    sample_batch,
    symplectic_area,
    symplectic_coarea,
)

ALL = all_normalized_labels()
CORPUS_SIZE = 500
SPECIAL_SIZE = 100
LAW_TOL = 1e-8


@pytest.fixture(scope="session")
def corpus():
    return {L: sample_batch(L, CORPUS_SIZE, seed=0) for L in ALL}


@pytest.fixture(scope="session")
def suite_reports(corpus):
    return {L: full_suite(t, tol=LAW_TOL) for L, t in corpus.items()}


def test_criterion_01_structure_constants(acceptance):
    start = time.perf_counter()
    table_ok = all(c.passed for L in ALL for c in algebra.check_commutation_table(L))
    casimir_ok = all(
        algebra.bracket(algebra.casimir(L), algebra.rep(g, L)).is_zero() for L in ALL for g in algebra.GENERATORS
    )
    elapsed = time.perf_counter() - start
    ok = table_ok and casimir_ok and elapsed < 1.0
    acceptance(1, ok, f"brackets exact={table_ok}, casimir central={casimir_ok}, {elapsed:.2f}s")
    assert ok


def test_criterion_02_exponential_oracle(acceptance):
    start = time.perf_counter()
    worst = 0.0
    for L in ALL:
        for g in algebra.GENERATORS:
            for t in np.linspace(-2, 2, 11):
                worst = max(worst, float(exp_series(scaled_generator(g, t, L)).deviation(one_param(g, t, L))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 5.0
    acceptance(2, ok, f"max deviation {worst:.2e} over 27x12x11, {elapsed:.2f}s")
    assert ok


def test_criterion_03_basic_identity(acceptance, corpus):
    start = time.perf_counter()
    worst = max(float(np.max(residual_basic(t))) for t in corpus.values())
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 30.0
    acceptance(3, ok, f"max 12-factor residual {worst:.2e} on 27x{CORPUS_SIZE}, {elapsed:.2f}s")
    assert ok


def test_criterion_04_full_suite(acceptance, suite_reports):
    worst_key, worst = "", 0.0
    failures = []
    for L, report in suite_reports.items():
        key, value = report.worst()
        if value > worst:
            worst_key, worst = f"{L} {key}", value
        failures += [f"{L} {k}" for k in report.failures()]
    ok = not failures and worst <= LAW_TOL
    acceptance(4, ok, f"worst {worst:.2e} ({worst_key}), {len(failures)} failing entries")
    assert ok, failures[:10]


def test_criterion_05_existence(acceptance, corpus):
    lowest = {"gamma/k2": np.inf, "Gamma/k1": np.inf, "coarea phase form": np.inf, "area phase form": np.inf}
    for L, t in corpus.items():
        eta, k1, k2 = L.as_tuple()
        if k2 != 0:
            lowest["gamma/k2"] = min(lowest["gamma/k2"], float(np.min(gramm_gamma(t) / k2)))
        if k1 != 0:
            lowest["Gamma/k1"] = min(lowest["Gamma/k1"], float(np.min(gramm_Gamma(t) / k1)))
        psi_prod = np.prod([sink(eta, v) for v in t.psi], axis=0)
        phi_prod = np.prod([sink(eta, v) for v in t.phi], axis=0)
        coarea = -sink(eta * k2 * k2, 2 * symplectic_coarea(t)) * psi_prod
        area = -sink(eta * k1 * k1, 2 * symplectic_area(t)) * phi_prod
        lowest["coarea phase form"] = min(lowest["coarea phase form"], float(np.min(coarea)))
        lowest["area phase form"] = min(lowest["area phase form"], float(np.min(area)))
    ok = all(v >= -1e-12 for v in lowest.values())
    acceptance(5, ok, ", ".join(f"min {k} {v:.2e}" for k, v in lowest.items()))
    assert ok


def test_criterion_06_duality(acceptance, corpus):
    worst = 0.0
    exact = True
    for L, t in corpus.items():
        d = dual_triangle(t)
        assert d.labels == dual_labels(L)
        worst = max(worst, full_suite(d, tol=LAW_TOL).worst()[1])
        back = dual_triangle(d)
        exact &= back.labels == L and all(np.array_equal(back.values()[k], t.values()[k]) for k in FIELDS)
    ok = worst <= LAW_TOL and exact
    acceptance(6, ok, f"dual corpus worst {worst:.2e}, dual of dual exact={exact}")
    assert ok


def test_criterion_07_contractions(acceptance):
    min_order, worst_err, area_err = np.inf, 0.0, 0.0
    pairs = 0
    for which in ("eta", "kappa1", "kappa2"):
        for L in ALL:
            if getattr(L, which) == 0:
                continue
            study = contraction_study(L, which)
            pairs += 1
            min_order = min(min_order, min(r.order for r in study.rows))
            worst_err = max(worst_err, max(r.extrapolated_error for r in study.rows))
            if which == "kappa1":
                # the S row is omega / (2 kappa1) against the flat-space area
                area_err = max(area_err, study.row("S").extrapolated_error)
    # order >= 1 up to roundoff in the log ratio of the last deviations
    ok = min_order >= 0.99 and worst_err <= 1e-6 and area_err <= 1e-6
    acceptance(
        7, ok,
        f"{pairs} label/limit pairs, min order {min_order:.4f}, worst extrapolated error {worst_err:.1e}, "
        f"omega/(2 kappa1) vs S {area_err:.1e}",
    )
    assert ok


def test_criterion_08_special_cases(acceptance):
    worst_phase, worst_real, worst_coll, worst_conc = 0.0, 0.0, 0.0, 0.0
    coll_ok = conc_class = True
    for L in ALL:
        eta = L.eta
        real = sample_batch(L, SPECIAL_SIZE, seed=1, kind="purely_real")
        for v in (*real.phi, *real.psi):
            worst_phase = max(worst_phase, float(np.max(np.abs(sink(eta, v)))))
        worst_real = max(worst_real, evaluate_laws(real, ["purely_real_reduced"], 1e-10).worst()[1])

        coll = sample_batch(L, SPECIAL_SIZE, seed=1, kind="collinear")
        omega = coll.psi[0] + coll.psi[1] + coll.phi[2]
        Omega = coll.phi[0] + coll.phi[1] + coll.psi[2]
        coll_ok &= float(np.max(np.abs(Omega))) <= 1e-10
        coll_ok &= all(float(np.max(np.abs(coll.psi[i] - coll.phi[i] - omega))) <= 1e-10 for i in range(3))
        worst_coll = max(worst_coll, evaluate_laws(coll, ["collinear_reduced"], 1e-10).worst()[1])

        dual = dual_triangle(coll)
        conc_class &= all(classify_special(dual[n]) == "concurrent" for n in range(SPECIAL_SIZE))
        worst_conc = max(worst_conc, evaluate_laws(dual, ["concurrent_reduced"], 1e-10).worst()[1])
    ok = (
        worst_phase <= 1e-12 and worst_real <= 1e-10 and coll_ok
        and worst_coll <= 1e-10 and conc_class and worst_conc <= 1e-10
    )
    acceptance(
        8, ok,
        f"purely real phases {worst_phase:.1e} laws {worst_real:.1e}; collinear laws {worst_coll:.1e} "
        f"(Omega=0, psi-phi=omega: {coll_ok}); dual concurrent={conc_class} laws {worst_conc:.1e}",
    )
    assert ok


def test_criterion_09_classical(acceptance, corpus):
    worst, shape = 0.0, 0.0
    for L in (SpaceLabels(1, 1, 1), SpaceLabels(1, -1, 1)):
        t = corpus[L]
        report = check_classical(t, with_vertices=False)
        worst = max(worst, report.worst()[1])
        vertex_report = check_classical(sample_batch(L, 100, seed=3))
        shape = max(shape, vertex_report.entries["shape_invariant"].residual)
        worst = max(worst, vertex_report.worst()[1])
    ok = worst <= 1e-9 and shape <= 1e-10
    acceptance(9, ok, f"classical laws worst {worst:.2e}, sigma mismatch {shape:.2e}")
    assert ok


def test_criterion_10_rank(acceptance):
    low = []
    for L in ALL:
        v = Quantities.from_triangle(sample_batch(L, 50, seed=5)).vector()
        ranks, _ = jacobian_rank(L, v)
        if np.any(ranks != 10):
            low.append(str(L))
    ok = not low
    acceptance(10, ok, f"rank 10 at 50 points for {27 - len(low)}/27 label triples")
    assert ok, low

"""Acceptance battery: one test per criterion, at its stated tolerance.

Each test prints its pass/fail summary line (run with ``-s`` to see all
of them live).  Criterion 4 asserts the plateau witness gap at 1e-2 as
specified; the gap of any finite-support witness for the slow log
family decays like 1/log(support), so this clause is expected to fail
at every realistic budget (see the details it prints).
"""

import pytest

from gibbs_series import acceptance


def _run(cid: str):
    res = acceptance.run_criterion(cid)
    print(res.summary_line())
    assert res.passed, f"criterion {cid} details: {res.details}"


def test_criterion_01_geometric_closed_form():
    _run("1")


def test_criterion_02_conjugate_exactness():
    _run("2")


def test_criterion_03_gibbs_weights():
    _run("3")


def test_criterion_04_plateau_law_and_witness():
    _run("4")


def test_criterion_05_box_reports():
    _run("5")


def test_criterion_06_gradient_sums():
    _run("6")


def test_criterion_07_alternating_series():
    _run("7")


def test_criterion_08_alternating_attainment():
    _run("8")


def test_criterion_09_fenchel_young_sweep():
    _run("9")


def test_criterion_10_domain_table():
    _run("10")

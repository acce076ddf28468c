"""Shared fixtures: hand-transcribed reference matrices and random draws."""
import numpy as np
import pytest

from ptdimer.fock import DimerParams


def printed_h0(eps, t):
    e2 = 2 * eps
    return np.array([
        [e2, 0, 0, 0, 0, 0],
        [0, e2, t, -t, 0, 0],
        [0, t, e2, 0, t, 0],
        [0, -t, 0, e2, -t, 0],
        [0, 0, t, -t, e2, 0],
        [0, 0, 0, 0, 0, e2],
    ], dtype=complex)


def printed_h2(eps, t, lam, u):
    """Printed H^2; H^1 is the U=0 case."""
    e2 = 2 * eps
    tp, tm = t + lam, t - lam
    return np.array([
        [e2, 0, 0, 0, 0, 0],
        [0, e2 + u, tm, -tm, 0, 0],
        [0, tp, e2, 0, tm, 0],
        [0, -tp, 0, e2, -tm, 0],
        [0, 0, tp, -tp, e2 + u, 0],
        [0, 0, 0, 0, 0, e2],
    ], dtype=complex)


def printed_h3(eps, t, lam, gamma, u):
    ep, em = complex(eps, gamma), complex(eps, -gamma)
    s = ep + em
    tp, tm = t + lam, t - lam
    return np.array([
        [s, 0, 0, 0, 0, 0],
        [0, 2 * em + u, tm, -tm, 0, 0],
        [0, tp, s, 0, tm, 0],
        [0, -tp, 0, s, -tm, 0],
        [0, 0, tp, -tp, 2 * ep + u, 0],
        [0, 0, 0, 0, 0, s],
    ], dtype=complex)


def random_params(rng, low=-3.0, high=3.0, gamma_zero=False):
    eps, t, lam, gamma, u = rng.uniform(low, high, 5)
    return DimerParams(epsilon=eps, t=t, lam=lam, gamma=0.0 if gamma_zero else gamma, u=u)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# --- acceptance summary ---------------------------------------------------------

ACCEPTANCE_LINES = {}


def pytest_runtest_logreport(report):
    marker = "test_acceptance.py::test_criterion_"
    if report.when == "call" and marker in report.nodeid:
        num = int(report.nodeid.split(marker)[1].split("_")[0])
        detail = ""
        for name, text in report.user_properties:
            if name == "detail":
                detail = text
        ACCEPTANCE_LINES[num] = f"criterion {num:2d}: {'PASS' if report.passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[num])

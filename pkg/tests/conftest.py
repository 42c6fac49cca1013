from __future__ import annotations

import numpy as np
import pytest


def loguniform(rng, lo, hi, size=None):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=size))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def lam_min(M):
    M = np.asarray(M)
    return float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0])


def opnorm(M):
    return float(np.linalg.norm(np.asarray(M), 2))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

from __future__ import annotations

import math
import random

import pytest


def random_tau(rng: random.Random) -> complex:
    return complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5))


def random_z(rng: random.Random, tau: complex, scale: float = 0.9) -> complex:
    """Uniform point of the fundamental parallelogram scaled by ``scale``."""
    return scale * (rng.random() * math.pi + rng.random() * math.pi * tau)


def rel(a, b) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, after the normal report."""
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
    for n in range(1, 9):
        if n not in results:
            terminalreporter.write_line(f"[criterion {n}] NOT RUN")

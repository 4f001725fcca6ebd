from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from polyapprox.instances import gen_random_polytope_cpp
from polyapprox.projection import approximate_body, build_mocp, polyhedral_image, upper_image_reference

EPS_LEVELS = (0.1, 0.01)

_criteria: dict[int, list[bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _criteria.setdefault(marker.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok = all(_criteria[n])
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({len(_criteria[n])} checks)")


def random_specs():
    """(q, n, m, seed) for twenty small polyhedral instances."""
    specs = []
    for k in range(20):
        q = 2 + k % 2
        n = min(q + (k // 2) % (6 - q), 5)
        m = n + 2 + k % 4
        specs.append((q, n, m, 100 + k))
    return specs


@dataclass
class RandomRun:
    q: int
    seed: int
    eps: float
    Y: object
    P: object
    outer: object
    inner: object


@pytest.fixture(scope="session")
def random_runs() -> list[RandomRun]:
    runs = []
    for q, n, m, seed in random_specs():
        inst = gen_random_polytope_cpp(q, n, m, seed)
        Y = polyhedral_image(inst)
        P = upper_image_reference(build_mocp(inst))
        for eps in EPS_LEVELS:
            outer = approximate_body(inst, eps, "primal")
            inner = approximate_body(inst, eps, "dual")
            runs.append(RandomRun(q, seed, eps, Y, P, outer, inner))
    return runs


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

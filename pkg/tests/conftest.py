import itertools

import pytest

from mwsrpdt.core import INFINITE, Instance, Service
from mwsrpdt.instances import GeneratorConfig, generate, truncate


def make_instance(coords, services, requested, times, K, D=8.0):
    """Hand-built instance; ``times`` maps (team, service, task) to hours or INFINITE."""
    return Instance(n=len(coords), K=K, D=D, coords=tuple(coords), services=tuple(services),
                    requested=dict(requested), times=dict(times))


def uniform_times(services, K, hours):
    return {(k, s.id, a): hours for k in range(1, K + 1) for s in services for a in s.tasks}


def pair_instance(dependent, K=2, hours=5.0):
    """One customer at the depot with two tasks of ``hours`` each."""
    svc = Service(1, (1, 2), frozenset({(2, 1)}) if dependent else frozenset())
    return make_instance([(0, 0), (0, 0)], [svc], {2: 1}, uniform_times([svc], K, hours), K)


def tiny_instances(limit_tasks=6, max_teams=2, count=30):
    """Hand-built cases followed by truncated generated ones (each at most ``limit_tasks`` tasks)."""
    out = [pair_instance(False), pair_instance(True), pair_instance(True, K=1),
           pair_instance(False, K=1, hours=3.0)]
    chain = Service(1, (1, 2, 3), frozenset({(2, 1), (3, 2)}))
    out.append(make_instance([(0, 0), (10, 10), (40, 0)], [chain], {2: 1, 3: 1},
                             uniform_times([chain], 2, 1.5), 2))
    single = Service(1, (1,), frozenset())
    out.append(make_instance([(0, 0), (10, 10)], [single], {2: 1},
                             {(1, 1, 1): 1.0, (2, 1, 1): INFINITE}, 2))
    for kind, seed in itertools.product("ABC", range(100)):
        if len(out) >= count:
            break
        full = generate(GeneratorConfig(6, kind, seed))
        teams = 3 if kind == "C" else max_teams
        if teams > max_teams:
            continue
        best = None
        for customers in range(1, full.n):
            try:
                inst = truncate(full, customers, teams)
            except ValueError:
                break
            if inst.num_tasks > limit_tasks:
                break
            best = inst
        if best is not None and best.num_tasks >= 2:
            out.append(best)
    return out


@pytest.fixture
def small_a():
    return generate(GeneratorConfig(8, "A", 1))


# ------------------------------------------------------------ acceptance reporting

ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(number, ok, detail):
        ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(ACCEPTANCE_LINES[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])

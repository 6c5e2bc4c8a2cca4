import dataclasses
import random

import pytest

from conftest import make_instance, pair_instance
from mwsrpdt.constructive import construct, construct_greedy_fast
from mwsrpdt.core import INFINITE, Service, Solution, TaskRef, Visit, evaluate
from mwsrpdt.exceptions import InfeasibleInput, ParseError
from mwsrpdt.instances import GeneratorConfig, generate
from mwsrpdt.validate import (DAY_LENGTH, DEPOT_START, DUPLICATE_TASK, INCAPABLE_TEAM,
                              MISSING_TASK, OBJECTIVE, PRECEDENCE, TASK_TIME, TRAVEL,
                              UNKNOWN_TASK, check_feasible, dumps, loads, read_solution,
                              recompute_objective, write_solution)


def far_instance(hours=7.7):
    svc = Service(1, (1,), frozenset())
    return make_instance([(0, 0), (40, 40)], [svc], {2: 1}, {(1, 1, 1): hours}, K=1)


def raw(visits):
    """Solution whose stored p/m come straight from the visits."""
    return Solution.from_visits(visits)


@pytest.mark.parametrize("kind", "ABC")
def test_constructive_output_ok(kind):
    inst = generate(GeneratorConfig(15, kind, 11))
    assert check_feasible(inst, construct_greedy_fast(inst)).ok


def test_precedence_violation():
    inst = pair_instance(True)
    sol = raw([Visit(1, 1, TaskRef(2, 1), 0.0, 5.0), Visit(2, 1, TaskRef(2, 2), 1.0, 6.0)])
    assert check_feasible(inst, sol).codes() == [PRECEDENCE]


def test_precedence_across_days_ok():
    inst = pair_instance(True)
    sol = raw([Visit(1, 1, TaskRef(2, 1), 0.0, 5.0), Visit(2, 2, TaskRef(2, 2), 0.0, 5.0)])
    assert check_feasible(inst, sol).ok


def test_day_length_violation():
    inst = far_instance()
    sol = raw([Visit(1, 1, TaskRef(2, 1), 0.2, 7.9)])
    assert check_feasible(inst, sol).codes() == [DAY_LENGTH]


def test_depot_start_violation():
    inst = far_instance(1.0)
    sol = raw([Visit(1, 1, TaskRef(2, 1), 0.1, 1.1)])
    assert check_feasible(inst, sol).codes() == [DEPOT_START]


def test_travel_violation():
    svc = Service(1, (1,), frozenset())
    inst = make_instance([(0, 0), (0, 0), (40, 40)], [svc], {2: 1, 3: 1},
                         {(1, 1, 1): 1.0}, K=1)
    sol = raw([Visit(1, 1, TaskRef(2, 1), 0.0, 1.0), Visit(1, 1, TaskRef(3, 1), 1.1, 2.1)])
    assert check_feasible(inst, sol).codes() == [TRAVEL]


def test_task_time_and_capability():
    svc = Service(1, (1, 2), frozenset())
    inst = make_instance([(0, 0), (0, 0)], [svc], {2: 1},
                         {(1, 1, 1): 1.0, (1, 1, 2): 1.0, (2, 1, 1): INFINITE, (2, 1, 2): 1.0}, K=2)
    sol = raw([Visit(2, 1, TaskRef(2, 1), 0.0, 1.0), Visit(1, 1, TaskRef(2, 2), 0.0, 2.0)])
    assert check_feasible(inst, sol).codes() == sorted([INCAPABLE_TEAM, TASK_TIME])


def test_coverage_codes():
    inst = pair_instance(False)
    sol = raw([Visit(1, 1, TaskRef(2, 1), 0.0, 5.0), Visit(2, 1, TaskRef(2, 1), 0.0, 5.0),
               Visit(2, 2, TaskRef(3, 1), 0.0, 5.0)])
    assert set(check_feasible(inst, sol).codes()) == {DUPLICATE_TASK, MISSING_TASK, UNKNOWN_TASK}


def test_tampered_objective_detected():
    inst = generate(GeneratorConfig(8, "A", 0))
    sol = construct_greedy_fast(inst)
    bad = dataclasses.replace(sol, p=sol.p + 1)
    rep = check_feasible(inst, bad)
    assert rep.codes() == [OBJECTIVE]
    assert "OBJECTIVE" in str(rep)
    with pytest.raises(InfeasibleInput):
        recompute_objective(inst, bad)


def test_recompute_matches_evaluate_on_random_solutions():
    rng = random.Random(5)
    checked = 0
    for seed in range(100):
        inst = generate(GeneratorConfig(6, "ABC"[seed % 3], seed))
        sol = construct(inst, lambda team, pos, day, cs: rng.choice(list(cs)))
        assert check_feasible(inst, sol).ok
        ours = recompute_objective(inst, sol)
        assert ours == evaluate(inst, sol)
        assert ours.p == max(v.day for v in sol.visits)
        checked += 1
    assert checked == 100


def test_solution_round_trip(tmp_path):
    inst = generate(GeneratorConfig(10, "B", 2))
    sol = construct_greedy_fast(inst)
    path = tmp_path / "s.sol"
    write_solution(sol, path)
    assert read_solution(path) == sol
    assert loads(dumps(sol)) == sol


@pytest.mark.parametrize("text", ["", "SOLUTION x 1\nEND\n", "SOLUTION 1 1\n1 1 2\nEND\n",
                                  "SOLUTION 1 1.0\n1 1 2 1 0.0 1.0\n"])
def test_bad_solution_files(text):
    with pytest.raises(ParseError):
        loads(text)

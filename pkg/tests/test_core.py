import pytest
from hypothesis import given, strategies as st

from conftest import make_instance
from mwsrpdt.core import (DEPOT, INFINITE, Service, Solution, TaskRef, Visit, evaluate,
                          extended_travel_time, fractional_objective, is_finite)
from mwsrpdt.exceptions import EmptySolution
from mwsrpdt.instances import GeneratorConfig, generate


def two_customers():
    svc = Service(1, (1, 2), frozenset())
    times = {(1, 1, 1): 1.0, (1, 1, 2): 1.0}
    return make_instance([(0, 0), (0, 0), (10, 10)], [svc], {2: 1, 3: 1}, times, K=1)


def test_same_customer_tasks_are_free_to_move_between():
    inst = two_customers()
    assert extended_travel_time(inst, TaskRef(3, 1), TaskRef(3, 2)) == 0.0


def test_travel_time_manhattan_scaled():
    inst = two_customers()
    assert extended_travel_time(inst, TaskRef(2, 1), TaskRef(3, 1)) == pytest.approx(0.1 * 20 / 40)
    assert extended_travel_time(inst, DEPOT, TaskRef(3, 2)) == pytest.approx(0.05)


def test_travel_time_symmetric_on_generated_instance():
    inst = generate(GeneratorConfig(6, "A", 4))
    verts = [DEPOT] + inst.tasks()
    for u in verts:
        for v in verts:
            assert extended_travel_time(inst, u, v) == extended_travel_time(inst, v, u)


@pytest.mark.parametrize("p,m,expected", [(3, 4.0, 2.5), (1, 8.0, 1.0)])
def test_fractional_objective(p, m, expected):
    assert fractional_objective(p, m, 8.0) == expected


def test_single_visit_objective():
    inst = two_customers()
    sol = Solution.from_visits([Visit(1, 1, TaskRef(3, 1), 0.05, 1.05)])
    obj = evaluate(inst, sol)
    assert (obj.p, obj.m) == (1, 1.05)
    # p - 1 + m / D = 0 + 1.05 / 8
    assert obj.fprime == pytest.approx(0.13125, abs=1e-12)


def test_empty_solution_rejected():
    with pytest.raises(EmptySolution):
        Solution.from_visits([])


def test_infinite_sentinel_has_no_arithmetic():
    assert not is_finite(INFINITE)
    with pytest.raises(TypeError):
        INFINITE + 1.0


def test_cyclic_service_rejected():
    with pytest.raises(ValueError):
        Service(1, (1, 2), frozenset({(1, 2), (2, 1)}))


def test_dependency_on_unknown_task_rejected():
    with pytest.raises(ValueError):
        Service(1, (1, 2), frozenset({(3, 1)}))


def test_instance_rejects_task_without_capable_team():
    svc = Service(1, (1,), frozenset())
    with pytest.raises(ValueError):
        make_instance([(0, 0), (1, 1)], [svc], {2: 1}, {(1, 1, 1): INFINITE}, K=1)


@given(st.lists(st.tuples(st.integers(1, 5), st.floats(0.1, 8.0)), min_size=1, max_size=20))
def test_evaluate_takes_latest_day_and_its_latest_end(rows):
    visits = [Visit(1, d, TaskRef(2, i + 1), max(0.0, e - 0.1), e) for i, (d, e) in enumerate(rows)]
    sol = Solution.from_visits(visits)
    p = max(d for d, _ in rows)
    assert sol.p == p
    assert sol.m == max(e for d, e in rows if d == p)

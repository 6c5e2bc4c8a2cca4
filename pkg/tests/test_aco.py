import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import tiny_instances
from mwsrpdt import _kernel, aco
from mwsrpdt.aco import (AcoParams, PheromoneTable, default_params, heuristic_value,
                         local_update, mmas_clamp, offline_update, select_probabilistic,
                         select_pseudorandom, selection_probabilities)
from mwsrpdt.constructive import Candidate, ComponentKey, component_from_key, construct
from mwsrpdt.core import DEPOT, TaskRef
from mwsrpdt.exceptions import DegenerateWeights, InvalidConfig
from mwsrpdt.instances import GeneratorConfig, generate
from mwsrpdt.oracle import solve_exact
from mwsrpdt.validate import check_feasible


def cands(ends, encoding="ct1"):
    return [Candidate(TaskRef(i + 2, 1), 0.0, e,
                      ComponentKey.make(encoding, 1, 1, DEPOT, TaskRef(i + 2, 1)))
            for i, e in enumerate(ends)]


class Draws:
    """Stand-in generator returning a fixed sequence of uniforms."""

    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


def table(cs, taus, default=1.0):
    t = PheromoneTable(default)
    for c, v in zip(cs, taus):
        t[c.component] = v
    return t


# ------------------------------------------------------------ heuristic value

@pytest.mark.parametrize("end,expected", [(2.0, 0.5), (0.25, 4.0)])
def test_heuristic_value(end, expected):
    assert heuristic_value(cands([end])[0]) == expected


def test_heuristic_value_monotone():
    a, b = cands([1.0, 3.0])
    assert heuristic_value(a) > heuristic_value(b)


# ------------------------------------------------------------ probabilities

def test_symmetric_probabilities():
    cs = cands([1.0, 1.0])
    assert selection_probabilities(cs, table(cs, [2, 2]), 1, 1) == [0.5, 0.5]


def test_normalized_by_pheromone_only_when_beta_zero():
    cs = cands([1.0, 1.0])
    assert selection_probabilities(cs, table(cs, [1, 3]), 1, 0) == pytest.approx([0.25, 0.75], abs=1e-12)


def test_zero_exponents_uniform():
    cs = cands([1.0, 2.0, 5.0])
    assert selection_probabilities(cs, table(cs, [1, 7, 0.1]), 0, 0) == pytest.approx([1 / 3] * 3, abs=1e-12)


@given(st.lists(st.tuples(st.floats(0.01, 10), st.floats(0.25, 8)), min_size=1, max_size=12),
       st.floats(0, 10), st.floats(0, 6))
def test_probabilities_sum_to_one(rows, alpha, beta):
    cs = cands([e for _, e in rows])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateWeights)
        probs = selection_probabilities(cs, table(cs, [t for t, _ in rows]), alpha, beta)
    assert abs(sum(probs) - 1.0) <= 1e-12
    assert all(p >= 0 for p in probs)


def test_huge_exponents_rescaled_not_degenerate():
    cs = cands([0.25, 8.0])
    probs = selection_probabilities(cs, table(cs, [10.0, 1e-3]), 400.0, 400.0)
    assert probs[0] == pytest.approx(1.0) and abs(sum(probs) - 1) <= 1e-12


def test_roulette_follows_cumulative_weights():
    cs = cands([1.0, 1.0])
    t = table(cs, [1, 3])
    assert select_probabilistic(cs, t, 1, 0, Draws([0.2])) is cs[0]
    assert select_probabilistic(cs, t, 1, 0, Draws([0.3])) is cs[1]


# ------------------------------------------------------------ pseudo-random rule

def test_q0_one_takes_argmax():
    cs = cands([1.0, 1.0])
    assert select_pseudorandom(cs, table(cs, [5, 1]), 1, 1.0, Draws([0.99, 0.0])) is cs[0]


def test_q0_zero_matches_probabilistic():
    cs = cands([1.0, 2.0, 3.0])
    t = table(cs, [1, 2, 4])
    for u in np.linspace(0, 0.999, 37):
        a = select_pseudorandom(cs, t, 2.0, 0.0, Draws([0.5, u]))
        b = select_probabilistic(cs, t, 1.0, 2.0, Draws([u]))
        assert a is b


def test_argmax_tie_goes_to_lowest_component():
    cs = cands([1.0, 1.0, 1.0])
    t = table(cs, [2, 2, 2])
    assert select_pseudorandom(list(reversed(cs)), t, 1.0, 1.0, Draws([0.0, 0.0])) is cs[0]


# ------------------------------------------------------------ updates

def test_offline_update_evaporate_and_deposit():
    t = PheromoneTable(1.0)
    t["c"] = 1.0
    offline_update(t, [(2.0, ["c"])], rho=0.5, Q=2.0)
    assert t["c"] == 1.5


def test_offline_update_evaporation_only():
    t = PheromoneTable(1.0)
    t["c"] = 4.0
    offline_update(t, [], rho=0.25, Q=1.0)
    assert t["c"] == 3.0


def test_offline_update_additive_deposits():
    t = PheromoneTable(1.0)
    t["c"] = 5.0
    offline_update(t, [(2.0, ["c"]), (4.0, ["c", "c"])], rho=0.0, Q=4.0)
    assert t["c"] == 5.0 + 2.0 + 1.0


def test_untouched_keys_evaporate_like_stored_ones():
    t = PheromoneTable(2.0)
    offline_update(t, [(1.0, ["a"])], rho=0.5, Q=1.0)
    assert t["never"] == 1.0 and t["a"] == 2.0


@pytest.mark.parametrize("tau,expected", [(6.0, 5.69), (0.01, 0.02), (1.0, 1.0)])
def test_mmas_clamp(tau, expected):
    assert mmas_clamp(tau, 0.02, 5.69) == expected


def test_local_update_arithmetic():
    t = PheromoneTable(7.28)
    t["c"] = 5.0
    local_update(t, "c", 0.12, 7.28)
    assert t["c"] == pytest.approx(0.88 * 5 + 0.12 * 7.28, abs=1e-12)


@pytest.mark.parametrize("phi,expected", [(0.0, 5.0), (1.0, 7.28)])
def test_local_update_limits(phi, expected):
    t = PheromoneTable(7.28)
    t["c"] = 5.0
    local_update(t, "c", phi, 7.28)
    assert t["c"] == expected


# ------------------------------------------------------------ parameters

def test_mmas_defaults():
    p = default_params("MMAS")
    assert (p.encoding, p.alpha, p.beta, p.rho, p.Q, p.tau0, p.tau_min, p.tau_max) == \
        ("ct3", 6.47, 5.78, 0.02, 9.96, 8.88, 0.02, 5.69)
    assert (p.num_ants, p.max_iter) == (100, 100)


def test_as_and_acs_defaults():
    a, c = default_params("AS"), default_params("ACS")
    assert (a.encoding, a.alpha, a.beta, a.rho, a.Q, a.tau0) == ("ct2", 5.97, 1.39, 0.48, 4.08, 9.99)
    assert (c.encoding, c.alpha, c.beta, c.rho, c.Q, c.tau0, c.phi, c.q0) == \
        ("ct2", 9.29, 0.53, 0.82, 8.91, 7.28, 0.12, 0.91)


@pytest.mark.parametrize("bad", [dict(rho=1.5), dict(q0=-0.1), dict(encoding="ct9"),
                                 dict(num_ants=0), dict(tau_min=3.0, tau_max=1.0), dict(Q=0)])
def test_invalid_params(bad):
    with pytest.raises(InvalidConfig):
        default_params("MMAS", **bad)


# ------------------------------------------------------------ runs

@pytest.mark.parametrize("variant", aco.VARIANTS)
@pytest.mark.parametrize("encoding", aco.ENCODINGS)
def test_run_feasible_and_deterministic(variant, encoding):
    inst = generate(GeneratorConfig(8, "B", 5))
    params = default_params(variant, encoding=encoding, num_ants=4, max_iter=5, seed=3)
    r1 = aco.run(inst, params)
    r2 = aco.run(inst, params)
    assert check_feasible(inst, r1.best).ok
    assert r1.best == r2.best and r1.history == r2.history
    assert r1.best_fprime == r1.best.p - 1 + r1.best.m / inst.D


def test_single_ant_single_iteration_deterministic():
    inst = generate(GeneratorConfig(10, "A", 0))
    params = default_params("ACS", num_ants=1, max_iter=1, seed=9)
    assert aco.run(inst, params).best == aco.run(inst, params).best


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(aco.VARIANTS), st.integers(0, 2**32), st.sampled_from("ABC"))
def test_history_monotone(variant, seed, kind):
    inst = generate(GeneratorConfig(7, kind, seed % 50))
    res = aco.run(inst, default_params(variant, num_ants=3, max_iter=6, seed=seed))
    best = [h.best_fprime for h in res.history]
    assert all(b <= a for a, b in zip(best, best[1:]))
    assert best[-1] == res.best_fprime == min(h.iter_fprime for h in res.history)


def test_time_limit_stops_early():
    inst = generate(GeneratorConfig(10, "A", 0))
    res = aco.run(inst, default_params("AS", num_ants=2, max_iter=10_000), time_limit=0.05)
    assert 1 <= res.iterations < 10_000


def test_dense_equivalent_table_matches_dense_dictionary():
    """Sparse table with a shared default equals a fully materialized table."""
    inst = generate(GeneratorConfig(6, "A", 2))
    fp = _kernel.FlatProblem(inst)
    params = default_params("MMAS", num_ants=3, max_iter=4, encoding="ct2")
    sparse = PheromoneTable(params.tau0)
    dense = PheromoneTable(params.tau0)
    for k in range(fp.K):
        for u in range(fp.V):
            for v in range(fp.V):
                dense[fp.pack(2, 1, k, u, v)] = params.tau0
    a = aco.run(inst, params, pheromones=sparse)
    b = aco.run(inst, params, pheromones=dense)
    assert a.best == b.best
    for key, value in dense.values.items():
        assert sparse[key] == value


# ------------------------------------------------------------ replay through the public rules

def replay(inst, params, table_ck, u):
    """Rebuild one ant through construct() with select_probabilistic/select_pseudorandom."""
    count = [0]

    def rule(team, pos, day, options):
        s = count[0]
        count[0] += 1
        if params.variant == "ACS":
            pick = select_pseudorandom(options, table_ck, params.beta, params.q0,
                                       Draws([u[2 * s], u[2 * s + 1]]), alpha=params.alpha)
            local_update(table_ck, pick.component, params.phi, params.tau0)
            return pick
        return select_probabilistic(options, table_ck, params.alpha, params.beta, Draws([u[2 * s + 1]]))

    return construct(inst, rule, encoding=params.encoding)


@pytest.mark.parametrize("variant,encoding", [("AS", "ct1"), ("MMAS", "ct3"), ("ACS", "ct2"),
                                              ("AS", "ct4"), ("ACS", "ct3")])
@pytest.mark.parametrize("seed", range(3))
def test_kernel_agrees_with_public_selection_rules(variant, encoding, seed):
    inst = generate(GeneratorConfig(7, "AB"[seed % 2], seed))
    fp = _kernel.FlatProblem(inst)
    params = default_params(variant, encoding=encoding, alpha=1.3, beta=2.0)
    rng = np.random.default_rng(seed)
    enc = _kernel.ENCODINGS[encoding]
    tau_int = {}
    for k in range(fp.K):
        for u in range(fp.V):
            for v in range(fp.V):
                for day in (1, 2, 3):
                    key = fp.pack(enc, day, k, u, v)
                    tau_int.setdefault(key, float(rng.uniform(0.1, 5.0)))
    table_ck = PheromoneTable(params.tau0)
    for key, value in tau_int.items():
        table_ck[component_from_key(fp, encoding, key)] = value
    u = aco.ant_uniforms(seed, 0, 0, 2 * fp.T + 2)
    for backend in _kernel.available_backends():
        tau_copy = dict(tau_int)
        visits, comps = _kernel.simulate(fp, _kernel.PSEUDORANDOM if variant == "ACS" else _kernel.PROPORTIONAL,
                                         u, tau_copy, params.tau0, enc, params.alpha, params.beta,
                                         params.q0, params.phi, params.tau0, variant == "ACS",
                                         backend=backend)
        expected = replay(inst, params, _clone(table_ck), u)
        got = [component_from_key(fp, encoding, c) for c in comps]
        assert got == list(expected.components)


def _clone(t):
    out = PheromoneTable(t.tau0)
    out.values = dict(t.values)
    return out


@pytest.mark.slow
def test_mmas_reaches_oracle_on_tiny_pair():
    inst = tiny_instances()[1]
    best = solve_exact(inst).optimal
    res = aco.run(inst, default_params("MMAS", num_ants=10, max_iter=100))
    assert res.best_fprime == pytest.approx(best.fprime, abs=1e-9)

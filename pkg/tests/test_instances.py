import io

import pytest

from mwsrpdt.core import INFINITE, TaskRef, is_finite
from mwsrpdt.exceptions import InvalidConfig, ParseError
from mwsrpdt.instances import (GeneratorConfig, dumps, generate, layers_of, loads,
                               read_instance, truncate, write_instance)


@pytest.mark.parametrize("seed", range(5))
def test_type_a_structure(seed):
    inst = generate(GeneratorConfig(10, "A", seed))
    assert inst.K == 3 and inst.D == 8.0
    assert [len(s.tasks) for s in inst.services] == [1, 3, 5]
    assert all(is_finite(t) for t in inst.times.values())


@pytest.mark.parametrize("seed", range(5))
def test_type_c_single_capable_team(seed):
    inst = generate(GeneratorConfig(10, "C", seed))
    for t in inst.tasks():
        capable = [k for k in range(1, inst.K + 1) if is_finite(inst.task_time(k, t))]
        assert len(capable) == 1
    owners = {a: [k for k in range(1, 4) if is_finite(inst.times[k, 1, a])][0] for a in (1, 2, 3)}
    assert sorted(owners.values()) == [1, 2, 3]


@pytest.mark.parametrize("seed", range(5))
def test_type_b_every_task_has_a_capable_team(seed):
    inst = generate(GeneratorConfig(10, "B", seed))
    for t in inst.tasks():
        assert any(is_finite(inst.task_time(k, t)) for k in range(1, 4))


@pytest.mark.parametrize("kind", "ABC")
def test_generation_deterministic(kind):
    a = generate(GeneratorConfig(12, kind, 42))
    b = generate(GeneratorConfig(12, kind, 42))
    assert a == b and dumps(a) == dumps(b)


def test_times_are_reference_over_skill():
    inst = generate(GeneratorConfig(20, "A", 3))
    allowed = {r / s for r in (0.5, 1.0, 1.5, 2.0) for s in (0.5, 1.0, 2.0)}
    assert set(inst.times.values()) <= allowed


def test_dependencies_link_adjacent_layers_only():
    for seed in range(20):
        inst = generate(GeneratorConfig(4, "A", seed))
        for svc in inst.services:
            layers = layers_of(svc)
            depth = {a: d for d, layer in enumerate(layers) for a in layer}
            assert all(depth[a] == depth[b] + 1 for a, b in svc.deps)


@pytest.mark.parametrize("kind", "ABC")
def test_round_trip(kind, tmp_path):
    inst = generate(GeneratorConfig(15, kind, 7))
    path = tmp_path / "x.mwsrpdt"
    write_instance(inst, path)
    assert read_instance(path) == inst
    assert loads(dumps(inst)) == inst


def test_inf_token_reads_as_sentinel():
    inst = generate(GeneratorConfig(6, "C", 0))
    text = dumps(inst)
    assert " INF\n" in text
    back = loads(text)
    assert any(t is INFINITE for t in back.times.values())


def test_truncated_file_names_missing_section():
    text = dumps(generate(GeneratorConfig(6, "A", 0)))
    cut = text[: text.index("REQUESTS")]
    with pytest.raises(ParseError, match="REQUESTS"):
        loads(cut)
    with pytest.raises(ParseError, match="END"):
        loads(text.replace("END\n", ""))


def test_parse_error_carries_line_number():
    text = dumps(generate(GeneratorConfig(4, "A", 0))).replace("COORDS\n1 ", "COORDS\n1 x")
    with pytest.raises(ParseError) as info:
        loads(text)
    assert info.value.line == 4


def test_bad_config_rejected():
    with pytest.raises(InvalidConfig):
        generate(GeneratorConfig(1, "A", 0))
    with pytest.raises(InvalidConfig):
        generate(GeneratorConfig(5, "D", 0))


def test_truncate_keeps_prefix():
    full = generate(GeneratorConfig(8, "A", 2))
    small = truncate(full, 2, 2)
    assert small.n == 3 and small.K == 2
    assert small.tasks() == [t for t in full.tasks() if t.customer <= 3]
    assert small.task_time(1, TaskRef(2, 1)) == full.task_time(1, TaskRef(2, 1))

"""Random instance generation (types A, B, C) and the instance text format.

Format (UTF-8, line oriented, ``#`` starts a comment)::

    MWSRPDT 1
    n K D type seed
    COORDS
    i x y                      # n lines, depot (i = 1) first
    SERVICES
    SERVICE id ntasks          # tasks are numbered 1..ntasks
    DEPS m
    a b                        # m lines, a starts after b completes
    REQUESTS
    i serviceId                # n - 1 lines
    TIMES
    k serviceId a value|INF    # one line per team, service and task
    END
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from .core import INFINITE, Instance, Service, is_finite
from .exceptions import InvalidConfig, ParseError

K_TEAMS = 3
DAY_HOURS = 8.0
GRID_MAX = 100
REFERENCE_TIMES = (0.5, 1.0, 1.5, 2.0)
SKILLS = (0.5, 1.0, 2.0)
SKILLS_WITH_ZERO = (0.0, 0.5, 1.0, 2.0)
SERVICE_SIZES = {"A": (1, 3, 5), "B": (1, 3, 5), "C": (3,)}

FORMAT_HEADER = "MWSRPDT 1"


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    instance_type: str
    seed: int

    def validate(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise InvalidConfig(f"n must be an integer >= 2, got {self.n!r}")
        if self.instance_type not in SERVICE_SIZES:
            raise InvalidConfig(f"instance type must be A, B or C, got {self.instance_type!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfig(f"seed must fit in an unsigned 64-bit integer, got {self.seed!r}")


def _streams(seed: int, count: int):
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def _pick(rng, values):
    return values[int(rng.integers(len(values)))]


def generate(cfg: GeneratorConfig) -> Instance:
    """Generate an instance from ``(n, type, seed)``.

    Coordinates, service structure, requests and skills are drawn from
    independent PCG64 substreams spawned from ``seed``, so changing one
    ingredient never shifts the others.
    """
    cfg.validate()
    n, kind = int(cfg.n), cfg.instance_type
    K = K_TEAMS
    rng_xy, rng_svc, rng_req, rng_skill = _streams(cfg.seed, 4)

    xy = rng_xy.integers(0, GRID_MAX + 1, size=(n, 2))
    coords = tuple((int(x), int(y)) for x, y in xy)

    services = []
    reference: Dict[Tuple[int, int], float] = {}
    capable: Dict[Tuple[int, int], int] = {}
    for sid, size in enumerate(SERVICE_SIZES[kind], start=1):
        tasks = tuple(range(1, size + 1))
        # type C: each team owns exactly one of the three tasks
        owners = [int(k) + 1 for k in rng_svc.permutation(K)] if kind == "C" else None
        for a in tasks:
            reference[sid, a] = _pick(rng_svc, REFERENCE_TIMES)
            if kind == "B":
                capable[sid, a] = int(rng_svc.integers(1, K + 1))
            elif kind == "C":
                capable[sid, a] = owners[a - 1]
        groups = [int(g) for g in rng_svc.integers(0, 3, size=size)]
        layers = [[a for a, g in zip(tasks, groups) if g == layer] for layer in range(3)]
        deps = frozenset((a, b) for l in (1, 2) for a in layers[l] for b in layers[l - 1])
        services.append(Service(sid, tasks, deps))

    requested = {i: int(rng_req.integers(1, len(services) + 1)) for i in range(2, n + 1)}

    times = {}
    for k in range(1, K + 1):
        for svc in services:
            for a in svc.tasks:
                if kind == "A":
                    s = _pick(rng_skill, SKILLS)
                elif kind == "B":
                    s = _pick(rng_skill, SKILLS if k == capable[svc.id, a] else SKILLS_WITH_ZERO)
                else:
                    s = _pick(rng_skill, SKILLS) if k == capable[svc.id, a] else 0.0
                times[k, svc.id, a] = reference[svc.id, a] / s if s != 0 else INFINITE

    return Instance(n=n, K=K, D=DAY_HOURS, coords=coords, services=tuple(services),
                    requested=requested, times=times, instance_type=kind, seed=int(cfg.seed))


def truncate(inst: Instance, customers: int, teams: int = None) -> Instance:
    """Keep the depot, the first ``customers`` customers and the first ``teams`` teams.

    Raises ``ValueError`` if a kept task has no capable team left.
    """
    K = inst.K if teams is None else int(teams)
    if not 1 <= customers <= inst.n - 1 or not 1 <= K <= inst.K:
        raise InvalidConfig("truncation must keep at least one customer and one team")
    n = customers + 1
    requested = {i: inst.requested[i] for i in range(2, n + 1)}
    times = {key: t for key, t in inst.times.items() if key[0] <= K}
    return Instance(n=n, K=K, D=inst.D, coords=inst.coords[:n], services=inst.services,
                    requested=requested, times=times, instance_type=inst.instance_type,
                    seed=inst.seed)


def layers_of(svc: Service) -> List[List[int]]:
    """Depth layers of a service DAG (tasks without dependencies first)."""
    depth = {}

    def d(a):
        if a not in depth:
            preds = svc.predecessors(a)
            depth[a] = 0 if not preds else 1 + max(d(b) for b in preds)
        return depth[a]

    out: Dict[int, List[int]] = {}
    for a in svc.tasks:
        out.setdefault(d(a), []).append(a)
    return [out[k] for k in sorted(out)]


def format_hours(value: float) -> str:
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-0") else "0"


def dumps(inst: Instance) -> str:
    lines = [FORMAT_HEADER,
             f"{inst.n} {inst.K} {format_hours(inst.D)} {inst.instance_type} {inst.seed}",
             "COORDS"]
    for i, (x, y) in enumerate(inst.coords, start=1):
        lines.append(f"{i} {x} {y}")
    lines.append("SERVICES")
    for svc in inst.services:
        lines.append(f"SERVICE {svc.id} {len(svc.tasks)}")
        deps = sorted(svc.deps)
        lines.append(f"DEPS {len(deps)}")
        lines.extend(f"{a} {b}" for a, b in deps)
    lines.append("REQUESTS")
    for i in range(2, inst.n + 1):
        lines.append(f"{i} {inst.requested[i]}")
    lines.append("TIMES")
    for k in range(1, inst.K + 1):
        for svc in inst.services:
            for a in svc.tasks:
                t = inst.times.get((k, svc.id, a), INFINITE)
                lines.append(f"{k} {svc.id} {a} {format_hours(t) if is_finite(t) else 'INF'}")
    lines.append("END")
    return "\n".join(lines) + "\n"


def write_instance(inst: Instance, sink) -> None:
    """Write ``inst`` to a path or a text stream."""
    text = dumps(inst)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


class _Lines:
    def __init__(self, raw: Iterable[str]):
        self.items = []
        for no, line in enumerate(raw, start=1):
            line = line.split("#", 1)[0].strip()
            if line:
                self.items.append((no, line))
        self.pos = 0

    def next(self, expecting: str):
        if self.pos >= len(self.items):
            raise ParseError(f"unexpected end of file, missing {expecting}")
        item = self.items[self.pos]
        self.pos += 1
        return item

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)


def _ints(no, line, count, what):
    parts = line.split()
    if len(parts) != count:
        raise ParseError(f"{what}: expected {count} fields, got {len(parts)}", no)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"{what}: expected integers in {line!r}", no) from None


def _keyword(lines, word):
    no, line = lines.next(f"section {word}")
    if line != word:
        raise ParseError(f"expected section {word}, got {line!r}", no)


def loads(text: str) -> Instance:
    lines = _Lines(io.StringIO(text))
    no, line = lines.next("header line")
    if line != FORMAT_HEADER:
        raise ParseError(f"expected {FORMAT_HEADER!r}", no)
    no, line = lines.next("size line")
    parts = line.split()
    if len(parts) != 5:
        raise ParseError("size line must read 'n K D type seed'", no)
    try:
        n, K, D, kind, seed = int(parts[0]), int(parts[1]), float(parts[2]), parts[3], int(parts[4])
    except ValueError:
        raise ParseError("size line must read 'n K D type seed'", no) from None
    if kind not in SERVICE_SIZES:
        raise ParseError(f"instance type must be A, B or C, got {kind!r}", no)
    if n < 2 or K < 1 or not D > 0:
        raise ParseError("need n >= 2, K >= 1 and D > 0", no)

    _keyword(lines, "COORDS")
    coords = []
    for expected in range(1, n + 1):
        no, line = lines.next(f"COORDS entry for vertex {expected}")
        i, x, y = _ints(no, line, 3, "COORDS")
        if i != expected:
            raise ParseError(f"COORDS: expected vertex {expected}, got {i}", no)
        coords.append((x, y))

    _keyword(lines, "SERVICES")
    services = []
    while True:
        no, line = lines.peek()
        if line is None:
            raise ParseError("unexpected end of file, missing section REQUESTS")
        if not line.startswith("SERVICE "):
            break
        lines.next("SERVICE")
        sid, ntasks = _ints(no, line[len("SERVICE "):], 2, "SERVICE")
        no, line = lines.next(f"DEPS of service {sid}")
        if not line.startswith("DEPS "):
            raise ParseError(f"expected 'DEPS m' for service {sid}", no)
        (m,) = _ints(no, line[len("DEPS "):], 1, "DEPS")
        deps = set()
        for _ in range(m):
            no, line = lines.next(f"dependency of service {sid}")
            a, b = _ints(no, line, 2, "dependency")
            deps.add((a, b))
        try:
            services.append(Service(sid, tuple(range(1, ntasks + 1)), frozenset(deps)))
        except ValueError as exc:
            raise ParseError(str(exc), no) from None
    if not services:
        raise ParseError("no services defined", no)

    _keyword(lines, "REQUESTS")
    requested = {}
    for _ in range(n - 1):
        no, line = lines.next("REQUESTS entry")
        i, sid = _ints(no, line, 2, "REQUESTS")
        if i in requested:
            raise ParseError(f"customer {i} listed twice", no)
        requested[i] = sid

    _keyword(lines, "TIMES")
    times = {}
    while True:
        no, line = lines.next("END")
        if line == "END":
            break
        parts = line.split()
        if len(parts) != 4:
            raise ParseError("TIMES: expected 'k serviceId a value|INF'", no)
        k, sid, a = _ints(no, " ".join(parts[:3]), 3, "TIMES")
        if parts[3] == "INF":
            value = INFINITE
        else:
            try:
                value = float(parts[3])
            except ValueError:
                raise ParseError(f"TIMES: bad value {parts[3]!r}", no) from None
            if not value > 0 or value == float("inf"):
                raise ParseError("TIMES: value must be positive and finite, or INF", no)
        times[k, sid, a] = value

    try:
        return Instance(n=n, K=K, D=D, coords=tuple(coords), services=tuple(services),
                        requested=requested, times=times, instance_type=kind, seed=seed)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_instance(source) -> Instance:
    """Read an instance from a path or a text stream."""
    if hasattr(source, "read"):
        return loads(source.read())
    with open(source, encoding="utf-8") as fh:
        return loads(fh.read())

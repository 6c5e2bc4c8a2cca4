"""Domain types, extended-graph travel times and objective evaluation.

Vertex 1 is the depot, customers are 2..n. Teams are numbered 1..K and days
start at 1. All times are hours; a moment within a day lies in ``[0, D]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Tuple, Union

from .exceptions import EmptySolution

EPS = 1e-9
SPEED_KMH = 40.0
GRID_STEP_KM = 0.1


class _Infinite:
    """Sentinel for a task a team cannot execute.

    Deliberately supports no arithmetic so it can never leak into a sum.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


def is_finite(t) -> bool:
    return t is not INFINITE


class _Depot:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DEPOT"

    def __reduce__(self):
        return (_Depot, ())


DEPOT = _Depot()


class TaskRef(NamedTuple):
    """Task ``task`` of the service requested by ``customer``."""

    customer: int
    task: int


ExtendedVertex = Union[TaskRef, _Depot]


def vertex_of(v: ExtendedVertex) -> int:
    """Underlying graph vertex of an extended vertex."""
    return 1 if v is DEPOT else v.customer


@dataclass(frozen=True)
class Service:
    """Precedence DAG over tasks ``1..len(tasks)``.

    A pair ``(a, b)`` in ``deps`` means task ``a`` may start only after task
    ``b`` has completed.
    """

    id: int
    tasks: Tuple[int, ...]
    deps: frozenset = frozenset()

    def __post_init__(self):
        known = set(self.tasks)
        for a, b in self.deps:
            if a not in known or b not in known:
                raise ValueError(f"service {self.id}: dependency ({a}, {b}) names an unknown task")
        if _has_cycle(self.tasks, self.deps):
            raise ValueError(f"service {self.id}: dependencies contain a cycle")

    def predecessors(self, a: int) -> List[int]:
        return sorted(b for (x, b) in self.deps if x == a)

    def successors(self, b: int) -> List[int]:
        return sorted(a for (a, y) in self.deps if y == b)


def _has_cycle(tasks, deps) -> bool:
    succ = {t: [] for t in tasks}
    indeg = {t: 0 for t in tasks}
    for a, b in deps:
        succ[b].append(a)
        indeg[a] += 1
    stack = [t for t in tasks if indeg[t] == 0]
    seen = 0
    while stack:
        t = stack.pop()
        seen += 1
        for a in succ[t]:
            indeg[a] -= 1
            if indeg[a] == 0:
                stack.append(a)
    return seen != len(tasks)


@dataclass(frozen=True)
class Instance:
    """A problem instance.

    ``times`` maps ``(team, service id, task)`` to hours or ``INFINITE``;
    every customer requesting a service shares that service's times.
    ``coords[i - 1]`` holds the grid position of vertex ``i``.
    """

    n: int
    K: int
    D: float
    coords: Tuple[Tuple[int, int], ...]
    services: Tuple[Service, ...]
    requested: Dict[int, int]
    times: Dict[Tuple[int, int, int], object]
    instance_type: str = "A"
    seed: int = 0
    _service_index: Dict[int, Service] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_service_index", {s.id: s for s in self.services})
        if len(self.coords) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(self.coords)}")
        if sorted(self.requested) != list(range(2, self.n + 1)):
            raise ValueError("every customer 2..n must request exactly one service")
        for i, sid in self.requested.items():
            if sid not in self._service_index:
                raise ValueError(f"customer {i} requests unknown service {sid}")
        for s in self.services:
            for a in s.tasks:
                finite = False
                for k in range(1, self.K + 1):
                    t = self.times.get((k, s.id, a), INFINITE)
                    if is_finite(t):
                        if not t > 0:
                            raise ValueError(f"time of team {k} on service {s.id} task {a} must be > 0")
                        finite = True
                if not finite and any(r == s.id for r in self.requested.values()):
                    raise ValueError(f"service {s.id} task {a} has no capable team")

    def service(self, sid: int) -> Service:
        return self._service_index[sid]

    def service_of(self, customer: int) -> Service:
        return self._service_index[self.requested[customer]]

    def task_time(self, team: int, task: TaskRef):
        """Hours team ``team`` needs for ``task``, or ``INFINITE``."""
        sid = self.requested[task.customer]
        return self.times.get((team, sid, task.task), INFINITE)

    def tasks(self) -> List[TaskRef]:
        """All customer-task pairs, ordered by customer then task."""
        out = []
        for i in range(2, self.n + 1):
            for a in self.service_of(i).tasks:
                out.append(TaskRef(i, a))
        return out

    @property
    def num_tasks(self) -> int:
        return sum(len(self.service_of(i).tasks) for i in range(2, self.n + 1))

    def travel_time(self, i: int, j: int) -> float:
        """Base travel time d_ij between graph vertices, in hours."""
        xi, yi = self.coords[i - 1]
        xj, yj = self.coords[j - 1]
        return GRID_STEP_KM * (abs(xi - xj) + abs(yi - yj)) / SPEED_KMH


def extended_travel_time(inst: Instance, u: ExtendedVertex, v: ExtendedVertex) -> float:
    """Travel time d' between two vertices of the extended graph.

    Moving between two tasks of the same customer is free; every other move
    costs the travel time between the underlying vertices.
    """
    if u is not DEPOT and v is not DEPOT and u.customer == v.customer:
        return 0.0
    return inst.travel_time(vertex_of(u), vertex_of(v))


def absolute_hours(day: int, moment: float, D: float) -> float:
    return (day - 1) * D + moment


@dataclass(frozen=True)
class Visit:
    team: int
    day: int
    task: TaskRef
    start: float
    end: float


@dataclass(frozen=True)
class ObjectiveValue:
    p: int
    m: float
    fprime: float


@dataclass(frozen=True)
class Solution:
    """Timed visits plus the stored makespan fields.

    ``components`` is the ordered list of construction decisions when the
    solution came out of a construction run, and empty otherwise.
    """

    visits: Tuple[Visit, ...]
    p: int
    m: float
    components: tuple = field(default=(), compare=False)

    @classmethod
    def from_visits(cls, visits, components=()) -> "Solution":
        visits = tuple(sorted(visits, key=lambda v: (v.day, v.team, v.start, v.task)))
        if not visits:
            raise EmptySolution("solution has no visits")
        p = max(v.day for v in visits)
        m = max(v.end for v in visits if v.day == p)
        return cls(visits, p, m, tuple(components))

    @property
    def routes(self) -> Dict[Tuple[int, int], List[Visit]]:
        """Visits per ``(team, day)`` in start-time order."""
        out: Dict[Tuple[int, int], List[Visit]] = {}
        for v in self.visits:
            out.setdefault((v.team, v.day), []).append(v)
        for r in out.values():
            r.sort(key=lambda v: (v.start, v.end))
        return out


def fractional_objective(p: int, m: float, D: float) -> float:
    return p - 1 + m / D


def evaluate(inst: Instance, sol: Solution) -> ObjectiveValue:
    """Objective of ``sol`` recomputed from its visits.

    The stored ``p``/``m`` fields are ignored.
    """
    if not sol.visits:
        raise EmptySolution("solution has no visits")
    p = max(v.day for v in sol.visits)
    m = max(v.end for v in sol.visits if v.day == p)
    return ObjectiveValue(p, m, fractional_objective(p, m, inst.D))

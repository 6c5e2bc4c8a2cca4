"""Exhaustive search over every dispatch choice for tiny instances.

The search replays the constructive heuristic's day/event semantics but
branches on each candidate a free team could take instead of following one
rule. Its optimum is therefore the best schedule any selection rule can
reach, which is the right yardstick for the heuristics. It is not claimed to
be the optimum of the full MIP, which allows waiting patterns the event
simulation cannot express.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .core import (DEPOT, EPS, Instance, ObjectiveValue, Solution, TaskRef, Visit,
                   extended_travel_time, fractional_objective, is_finite)
from .exceptions import BudgetExceeded, InvalidConfig, StalledDay


@dataclass(frozen=True)
class OracleResult:
    optimal: ObjectiveValue
    solution: Solution
    nodes_explored: int


class _State:
    __slots__ = ("day", "completed", "events", "executed", "visits")

    def __init__(self, K):
        self.day = 1
        self.completed: Dict[TaskRef, Tuple[int, float]] = {}
        self.events: List[Optional[Tuple[float, object]]] = [(0.0, DEPOT)] * K
        self.executed = 0
        self.visits: List[Visit] = []

    def copy(self):
        other = _State.__new__(_State)
        other.day = self.day
        other.completed = dict(self.completed)
        other.events = list(self.events)
        other.executed = self.executed
        other.visits = list(self.visits)
        return other

    def key(self):
        return (self.day, self.executed > 0, tuple(sorted(self.completed.items())),
                tuple(self.events))


class _Search:
    def __init__(self, inst: Instance, max_nodes, wall_clock, memo):
        self.inst = inst
        self.tasks = inst.tasks()
        self.preds = {t: [TaskRef(t.customer, b) for b in inst.service_of(t.customer).predecessors(t.task)]
                      for t in self.tasks}
        self.max_nodes = max_nodes
        self.deadline = None if wall_clock is None else time.monotonic() + wall_clock
        self.memo = set() if memo else None
        self.nodes = 0
        self.best_f = float("inf")
        self.best_visits = None

    def _candidates(self, st: _State, k: int):
        inst = self.inst
        q, pos = st.events[k]
        out = []
        for t in self.tasks:
            if t in st.completed:
                continue
            dur = inst.task_time(k + 1, t)
            if not is_finite(dur):
                continue
            deps = self.preds[t]
            if any(b not in st.completed for b in deps):
                continue
            opened = max((st.completed[b] for b in deps), default=(0, 0.0))
            s = opened[1] if opened[0] == st.day else 0.0
            start = max(q + extended_travel_time(inst, pos, t), s)
            end = start + dur
            if end + extended_travel_time(inst, t, DEPOT) <= inst.D + EPS:
                out.append((t, start, end))
        return out

    def _advance(self, st: _State):
        """Move the simulation to the next real decision.

        Returns ``"done"``, ``"stalled"`` or ``(team, candidates)``.
        """
        K = self.inst.K
        while True:
            if len(st.completed) == len(self.tasks):
                return "done"
            active = [k for k in range(K) if st.events[k] is not None]
            if not active:
                if st.executed == 0:
                    return "stalled"
                st.day += 1
                st.events = [(0.0, DEPOT)] * K
                st.executed = 0
                continue
            k = min(active, key=lambda kk: (st.events[kk][0], kk))
            cands = self._candidates(st, k)
            if not cands:
                st.events[k] = None
                continue
            return k, cands

    def _tick(self):
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise BudgetExceeded(f"node limit {self.max_nodes} reached before optimality was proven")
        if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded("wall-clock limit reached before optimality was proven")

    def explore(self, st: _State):
        self._tick()
        res = self._advance(st)
        if res == "stalled":
            return
        D = self.inst.D
        if res == "done":
            p = max(v.day for v in st.visits)
            m = max(v.end for v in st.visits if v.day == p)
            f = fractional_objective(p, m, D)
            if f < self.best_f:
                self.best_f = f
                self.best_visits = list(st.visits)
            return
        # any completion will finish no earlier than what already ended today
        today = max((v.end for v in st.visits if v.day == st.day), default=0.0)
        if st.day - 1 + today / D >= self.best_f - 1e-12:
            return
        if self.memo is not None:
            key = st.key()
            if key in self.memo:
                return
            self.memo.add(key)
        k, cands = res
        for t, start, end in cands:
            child = st.copy()
            child.completed[t] = (child.day, end)
            child.events[k] = (end, t)
            child.executed += 1
            child.visits.append(Visit(k + 1, child.day, t, start, end))
            self.explore(child)


def solve_exact(inst: Instance, max_tasks: int = 7, max_nodes: Optional[int] = 2_000_000,
                wall_clock: Optional[float] = None, memo: bool = True) -> OracleResult:
    """Minimum-f' schedule among all schedules reachable by dispatch choices.

    Raises :class:`BudgetExceeded` when ``max_nodes`` or ``wall_clock``
    (seconds) runs out first, and :class:`StalledDay` if no branch finishes.
    """
    if inst.num_tasks > max_tasks:
        raise InvalidConfig(f"instance has {inst.num_tasks} tasks, oracle limit is {max_tasks}")
    if inst.K > 3:
        raise InvalidConfig("oracle supports at most 3 teams")
    search = _Search(inst, max_nodes, wall_clock, memo)
    search.explore(_State(inst.K))
    if search.best_visits is None:
        raise StalledDay("no dispatch sequence completes every task")
    sol = Solution.from_visits(search.best_visits)
    return OracleResult(ObjectiveValue(sol.p, sol.m, fractional_objective(sol.p, sol.m, inst.D)),
                        sol, search.nodes)

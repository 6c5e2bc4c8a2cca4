"""Producer-independent feasibility checks and the solution text format.

Only the instance and the visit list are trusted; routes are rebuilt from
start times and every model rule is re-derived from scratch.

Solution format::

    SOLUTION p m
    day team customer task start end     # sorted by (day, team, start)
    END
"""

from __future__ import annotations

import io
from collections import defaultdict
from dataclasses import dataclass, field
from typing import List, Optional

from .core import (DEPOT, EPS, Instance, ObjectiveValue, Solution, TaskRef, Visit,
                   extended_travel_time, is_finite)
from .exceptions import InfeasibleInput, ParseError

# violation codes
UNKNOWN_TASK = "UNKNOWN_TASK"
MISSING_TASK = "MISSING_TASK"
DUPLICATE_TASK = "DUPLICATE_TASK"
BAD_VISIT = "BAD_VISIT"
TRAVEL = "TRAVEL"
DEPOT_START = "DEPOT_START"
DAY_LENGTH = "DAY_LENGTH"
TASK_TIME = "TASK_TIME"
INCAPABLE_TEAM = "INCAPABLE_TEAM"
PRECEDENCE = "PRECEDENCE"
OBJECTIVE = "OBJECTIVE"

CODES = (UNKNOWN_TASK, MISSING_TASK, DUPLICATE_TASK, BAD_VISIT, TRAVEL, DEPOT_START,
         DAY_LENGTH, TASK_TIME, INCAPABLE_TEAM, PRECEDENCE, OBJECTIVE)


@dataclass(frozen=True)
class Violation:
    code: str
    team: Optional[int] = None
    day: Optional[int] = None
    task: Optional[TaskRef] = None
    detail: str = ""


@dataclass
class FeasibilityReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self):
        return sorted({v.code for v in self.violations})

    def __str__(self):
        if self.ok:
            return "feasible"
        lines = [f"{len(self.violations)} violation(s):"]
        for v in self.violations:
            where = " ".join(f"{k}={x}" for k, x in
                             (("team", v.team), ("day", v.day), ("task", v.task)) if x is not None)
            lines.append(f"  {v.code} {where} {v.detail}".rstrip())
        return "\n".join(lines)


def check_feasible(inst: Instance, sol: Solution) -> FeasibilityReport:
    rep = FeasibilityReport()
    bad = rep.violations.append
    D = inst.D

    wanted = set(inst.tasks())
    seen = defaultdict(int)
    for v in sol.visits:
        seen[v.task] += 1
    for t in sorted(seen):
        if t not in wanted:
            bad(Violation(UNKNOWN_TASK, task=t, detail="task is not requested by the instance"))
        elif seen[t] > 1:
            bad(Violation(DUPLICATE_TASK, task=t, detail=f"executed {seen[t]} times"))
    for t in sorted(wanted - set(seen)):
        bad(Violation(MISSING_TASK, task=t, detail="never executed"))

    usable = []
    for v in sol.visits:
        if v.task not in wanted:
            continue
        if not (1 <= v.team <= inst.K) or v.day < 1:
            bad(Violation(BAD_VISIT, v.team, v.day, v.task, "team or day out of range"))
            continue
        if v.start < -EPS or v.end > D + EPS or v.end < v.start:
            bad(Violation(BAD_VISIT, v.team, v.day, v.task,
                          f"interval [{v.start}, {v.end}] outside [0, {D}]"))
        t = inst.task_time(v.team, v.task)
        if not is_finite(t):
            bad(Violation(INCAPABLE_TEAM, v.team, v.day, v.task, "team cannot execute this task"))
        elif abs((v.end - v.start) - t) > EPS:
            bad(Violation(TASK_TIME, v.team, v.day, v.task,
                          f"duration {v.end - v.start} differs from task time {t}"))
        usable.append(v)

    routes = defaultdict(list)
    for v in usable:
        routes[v.team, v.day].append(v)
    for (team, day), route in sorted(routes.items()):
        route.sort(key=lambda v: (v.start, v.end))
        first, last = route[0], route[-1]
        lead = extended_travel_time(inst, DEPOT, first.task)
        if first.start < lead - EPS:
            bad(Violation(DEPOT_START, team, day, first.task,
                          f"starts at {first.start} but the depot is {lead} h away"))
        back = extended_travel_time(inst, last.task, DEPOT)
        if last.end + back > D + EPS:
            bad(Violation(DAY_LENGTH, team, day, last.task,
                          f"returns at {last.end + back} > {D}"))
        for prev, nxt in zip(route, route[1:]):
            gap = extended_travel_time(inst, prev.task, nxt.task)
            if nxt.start < prev.end + gap - EPS:
                bad(Violation(TRAVEL, team, day, nxt.task,
                              f"starts at {nxt.start} before {prev.end} + travel {gap}"))

    # absolute hours make cross-day comparisons direct
    finish = {}
    begin = {}
    for v in usable:
        finish[v.task] = (v.day - 1) * D + v.end
        begin[v.task] = (v.day - 1) * D + v.start
    for v in usable:
        svc = inst.service_of(v.task.customer)
        for b in svc.predecessors(v.task.task):
            dep = TaskRef(v.task.customer, b)
            if dep not in finish:
                bad(Violation(PRECEDENCE, v.team, v.day, v.task, f"dependency {dep} never executed"))
            elif begin[v.task] < finish[dep] - EPS:
                bad(Violation(PRECEDENCE, v.team, v.day, v.task,
                              f"starts before dependency {dep} completes"))

    if sol.visits:
        p = max(v.day for v in sol.visits)
        m = max(v.end for v in sol.visits if v.day == p)
        if sol.p != p or abs(sol.m - m) > EPS:
            bad(Violation(OBJECTIVE, detail=f"stored (p={sol.p}, m={sol.m}) but visits give (p={p}, m={m})"))
    return rep


def recompute_objective(inst: Instance, sol: Solution) -> ObjectiveValue:
    """Objective of a feasible solution, derived from absolute completion times."""
    rep = check_feasible(inst, sol)
    if not rep.ok:
        raise InfeasibleInput(str(rep))
    latest = max(sol.visits, key=lambda v: (v.day - 1) * inst.D + v.end)
    p, m = latest.day, latest.end
    return ObjectiveValue(p, m, (p - 1) + m / inst.D)


def dumps(sol: Solution) -> str:
    lines = [f"SOLUTION {sol.p} {sol.m!r}"]
    for v in sorted(sol.visits, key=lambda v: (v.day, v.team, v.start, v.task)):
        lines.append(f"{v.day} {v.team} {v.task.customer} {v.task.task} {v.start!r} {v.end!r}")
    lines.append("END")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Solution:
    rows = [(no, ln.split("#", 1)[0].strip()) for no, ln in enumerate(io.StringIO(text), start=1)]
    rows = [(no, ln) for no, ln in rows if ln]
    if not rows:
        raise ParseError("empty file, missing SOLUTION header")
    no, head = rows[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] != "SOLUTION":
        raise ParseError("expected 'SOLUTION p m'", no)
    try:
        p, m = int(parts[1]), float(parts[2])
    except ValueError:
        raise ParseError("expected 'SOLUTION p m'", no) from None
    visits = []
    for no, ln in rows[1:]:
        if ln == "END":
            break
        parts = ln.split()
        if len(parts) != 6:
            raise ParseError("expected 'day team customer task start end'", no)
        try:
            day, team, cust, task = (int(x) for x in parts[:4])
            start, end = float(parts[4]), float(parts[5])
        except ValueError:
            raise ParseError(f"bad visit line {ln!r}", no) from None
        visits.append(Visit(team, day, TaskRef(cust, task), start, end))
    else:
        raise ParseError("unexpected end of file, missing END")
    return Solution(tuple(visits), p, m)


def write_solution(sol: Solution, sink) -> None:
    text = dumps(sol)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def read_solution(source) -> Solution:
    if hasattr(source, "read"):
        return loads(source.read())
    with open(source, encoding="utf-8") as fh:
        return loads(fh.read())

"""Discrete-event constructive heuristic with a pluggable selection rule.

Each day every team leaves the depot at time 0. An event queue pops the team
that becomes free earliest (ties go to the lowest team index); that team
looks at all open tasks it can still finish and return from within the day,
and the selection rule picks one. A team with nothing to do goes home and
stays there for the rest of the day.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Sequence

from . import _kernel
from .core import DEPOT, ExtendedVertex, Instance, Solution, TaskRef, Visit
from .exceptions import StalledDay

__all__ = ["Candidate", "ComponentKey", "StalledDay", "construct", "greedy_rule",
           "solution_from_kernel"]


@dataclass(frozen=True, order=True)
class ComponentKey:
    """One construction decision as seen by pheromone learning.

    Fields not used by an encoding are ``None``: ct1 keeps the arc,
    ct2 adds the team, ct3 adds day and team, ct4 keeps team and task.
    ``to`` is ``DEPOT`` for a return to the depot.
    """

    encoding: str
    day: object
    team: object
    frm: object
    to: object

    @classmethod
    def make(cls, encoding: str, day: int, team: int, frm: ExtendedVertex, to: ExtendedVertex):
        if encoding == "ct1":
            return cls(encoding, None, None, frm, to)
        if encoding == "ct2":
            return cls(encoding, None, team, frm, to)
        if encoding == "ct3":
            return cls(encoding, day, team, frm, to)
        if encoding == "ct4":
            return cls(encoding, None, team, None, to)
        raise ValueError(f"unknown encoding {encoding!r}")


@dataclass(frozen=True)
class Candidate:
    task: TaskRef
    start: float
    end: float
    component: ComponentKey


SelectionRule = Callable[[int, ExtendedVertex, int, List[Candidate]], Candidate]


def greedy_rule(team: int, position: ExtendedVertex, day: int,
                candidates: Sequence[Candidate]) -> Candidate:
    """Pick the candidate that finishes first; ties go to the smallest (customer, task)."""
    return min(candidates, key=lambda c: (c.end, c.task))


def component_from_key(fp, encoding: str, key: int) -> ComponentKey:
    day, team, frm, to = fp.unpack(_kernel.ENCODINGS[encoding], key)
    return ComponentKey(
        encoding,
        day,
        None if team is None else team + 1,
        None if frm is None else fp.vertex(frm),
        fp.vertex(to),
    )


def solution_from_kernel(fp, visits, comps, encoding: str = "ct1") -> Solution:
    out = [Visit(k + 1, day, fp.vertex(v), st, en) for (k, day, v, st, en) in visits]
    components = tuple(component_from_key(fp, encoding, key) for key in comps)
    return Solution.from_visits(out, components)


def construct(inst: Instance, rule: SelectionRule = greedy_rule, encoding: str = "ct1") -> Solution:
    """Build a feasible solution, letting ``rule`` decide every dispatch.

    Components recorded on the returned solution use ``encoding``.
    Raises :class:`StalledDay` if some day passes without any task executed.
    """
    fp = _kernel.FlatProblem(inst)
    enc = _kernel.ENCODINGS[encoding]

    def chooser(k, pos, day, cand, starts, ends):
        frm = fp.vertex(pos)
        options = [
            Candidate(fp.vertex(v), st, en,
                      ComponentKey.make(encoding, day, k + 1, frm, fp.vertex(v)))
            for v, st, en in zip(cand, starts, ends)
        ]
        chosen = rule(k + 1, frm, day, options)
        for idx, c in enumerate(options):
            if c is chosen:
                return idx
        for idx, c in enumerate(options):
            if c == chosen:
                return idx
        raise ValueError("selection rule returned a candidate that was not offered")

    visits, comps = _kernel.simulate(fp, _kernel.CALLBACK, encoding=enc, chooser=chooser)
    return solution_from_kernel(fp, visits, comps, encoding)


def construct_greedy_fast(inst: Instance, backend=None) -> Solution:
    """Greedy construction through the selected kernel backend."""
    fp = _kernel.FlatProblem(inst)
    visits, comps = _kernel.simulate(fp, _kernel.GREEDY, backend=backend)
    return solution_from_kernel(fp, visits, comps)

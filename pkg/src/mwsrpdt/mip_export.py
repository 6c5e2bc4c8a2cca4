"""Write the time-indexed MIP model in CPLEX LP text format.

Variables (team ``k``, day ``h``, extended vertices ``u != v``; the depot is
named ``0`` and task ``a`` of customer ``i`` is named ``i.a``)::

    x_k_h_u_v  binary      team k travels u -> v on day h
    q_k_h_u_v  continuous  arrival moment at v over that arc
    y_k_h_i_a  binary      team k executes task a of customer i on day h
    p          integer     day on which the last task completes

Pairs a team cannot execute get ``y`` fixed to 0 and no ``x``/``q`` columns
into or out of that vertex. With ``m_k`` = 1 + number of tasks team ``k``
can do, ``T`` = number of tasks, ``P`` = number of dependency arcs over all
customers and ``S = sum_k (m_k - 1)``, the model has::

    x columns     H * sum_k m_k (m_k - 1)      (same count of q columns)
    y columns     K * H * T
    constraints   T + P + 4 * H * S + #x + 2 * K * H

The day bound ``q <= T x`` uses the day length for ``T``. Solving is left to
an external MIP solver; an infeasible model means ``H`` was too small.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .constructive import construct_greedy_fast
from .core import DEPOT, Instance, extended_travel_time, is_finite

LINE_WIDTH = 200


@dataclass
class ModelStats:
    num_binary: int = 0
    num_continuous: int = 0
    num_general_integer: int = 0
    num_constraints: int = 0
    H: int = 0
    by_family: Dict[str, int] = field(default_factory=dict)


def vertex_name(v) -> str:
    return "0" if v is DEPOT else f"{v.customer}.{v.task}"


def _coef(c: float) -> str:
    return format(c, ".9g")


class _Writer:
    def __init__(self, out):
        self.out = out
        self.stats = ModelStats()

    def row(self, family: str, name: str, terms: List[Tuple[float, str]], sense: str, rhs: float):
        parts = []
        for c, var in terms:
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            parts.append(f"{sign} {var}" if mag == 1 else f"{sign} {_coef(mag)} {var}")
        if not parts:
            parts = ["0 p"]
        if parts[0].startswith("+ "):
            parts[0] = parts[0][2:]
        line = f" {name}:"
        for piece in parts + [f"{sense} {_coef(rhs)}"]:
            if len(line) + 1 + len(piece) > LINE_WIDTH:
                self.out.write(line + "\n")
                line = "   "
            line += " " + piece
        self.out.write(line + "\n")
        self.stats.num_constraints += 1
        self.stats.by_family[family] = self.stats.by_family.get(family, 0) + 1

    def names(self, header: str, names: List[str]):
        self.out.write(header + "\n")
        line = ""
        for nm in names:
            if line and len(line) + 1 + len(nm) > LINE_WIDTH:
                self.out.write(line + "\n")
                line = ""
            line += " " + nm
        if line:
            self.out.write(line + "\n")


def emit_model(inst: Instance, H: Optional[int] = None, sink=None) -> ModelStats:
    """Write the model for horizon ``H`` (default: greedy makespan) to ``sink``.

    ``sink`` may be a text stream or a path; with ``None`` the text is
    discarded and only the statistics are returned.
    """
    if H is None:
        H = construct_greedy_fast(inst).p
    if H < 1:
        raise ValueError("horizon H must be >= 1")
    if sink is None or hasattr(sink, "write"):
        return _emit(inst, H, sink if sink is not None else io.StringIO())
    with open(sink, "w", encoding="utf-8", newline="\n") as fh:
        return _emit(inst, H, fh)


def _emit(inst: Instance, H: int, out) -> ModelStats:
    K, D = inst.K, float(inst.D)
    tasks = inst.tasks()
    verts = [DEPOT] + tasks
    name = {v: vertex_name(v) for v in verts}
    dist = {(u, v): extended_travel_time(inst, u, v) for u in verts for v in verts if u != v}
    dur = {(k, t): inst.task_time(k, t) for k in range(1, K + 1) for t in tasks}
    able = {k: [DEPOT] + [t for t in tasks if is_finite(dur[k, t])] for k in range(1, K + 1)}
    can = {(k, t) for k in range(1, K + 1) for t in tasks if is_finite(dur[k, t])}

    def x(k, h, u, v):
        return f"x_{k}_{h}_{name[u]}_{name[v]}"

    def q(k, h, u, v):
        return f"q_{k}_{h}_{name[u]}_{name[v]}"

    def y(k, h, t):
        return f"y_{k}_{h}_{t.customer}_{t.task}"

    w = _Writer(out)
    out.write(f"\\ MWSRPDT model n={inst.n} K={K} H={H} D={_coef(D)} tasks={len(tasks)}\n")
    out.write("Minimize\n obj: p\nSubject To\n")

    # each task executed exactly once
    for t in tasks:
        w.row("cover", f"cover_{t.customer}_{t.task}",
              [(1.0, y(k, h, t)) for k in range(1, K + 1) if (k, t) in can for h in range(1, H + 1)],
              "=", 1)

    # start of a no earlier than completion of b, in absolute hours
    for i in range(2, inst.n + 1):
        svc = inst.service_of(i)
        for a, b in sorted(svc.deps):
            ta, tb = type(tasks[0])(i, a), type(tasks[0])(i, b)
            terms: Dict[str, float] = {}
            for k in range(1, K + 1):
                for h in range(1, H + 1):
                    if (k, ta) in can:
                        terms[y(k, h, ta)] = terms.get(y(k, h, ta), 0.0) + D * (h - 1)
                        for u in able[k]:
                            if u != ta:
                                terms[q(k, h, u, ta)] = terms.get(q(k, h, u, ta), 0.0) + 1.0
                    if (k, tb) in can:
                        terms[y(k, h, tb)] = terms.get(y(k, h, tb), 0.0) - (D * (h - 1) + dur[k, tb])
                        for u in able[k]:
                            if u != tb:
                                terms[q(k, h, u, tb)] = terms.get(q(k, h, u, tb), 0.0) - 1.0
            w.row("precedence", f"prec_{i}_{a}_{b}", [(c, var) for var, c in terms.items()], ">=", 0)

    for k in range(1, K + 1):
        for h in range(1, H + 1):
            for v in able[k][1:]:
                w.row("depart", f"depart_{k}_{h}_{name[v]}",
                      [(dist[DEPOT, v], x(k, h, DEPOT, v)), (-1.0, q(k, h, DEPOT, v))], "<=", 0)
            for v in able[k][1:]:
                terms = []
                for u in able[k]:
                    if u != v:
                        terms.append((1.0, q(k, h, u, v)))
                for u in able[k]:
                    if u != v:
                        terms.append((dist[v, u], x(k, h, v, u)))
                terms.append((dur[k, v], y(k, h, v)))
                for u in able[k]:
                    if u != v:
                        terms.append((-1.0, q(k, h, v, u)))
                w.row("flow", f"flow_{k}_{h}_{name[v]}", terms, "<=", 0)
            for u in able[k]:
                for v in able[k]:
                    if u != v:
                        w.row("daylength", f"cap_{k}_{h}_{name[u]}_{name[v]}",
                              [(1.0, q(k, h, u, v)), (-D, x(k, h, u, v))], "<=", 0)
            for v in able[k][1:]:
                w.row("indegree", f"in_{k}_{h}_{name[v]}",
                      [(1.0, x(k, h, u, v)) for u in able[k] if u != v] + [(-1.0, y(k, h, v))], "=", 0)
                w.row("outdegree", f"out_{k}_{h}_{name[v]}",
                      [(1.0, x(k, h, v, u)) for u in able[k] if u != v] + [(-1.0, y(k, h, v))], "=", 0)
            w.row("single", f"single_{k}_{h}",
                  [(1.0, x(k, h, DEPOT, v)) for v in able[k][1:]], "<=", 1)
            w.row("makespan", f"span_{k}_{h}",
                  [(1.0, "p")] + [(-float(h), x(k, h, DEPOT, v)) for v in able[k][1:]], ">=", 0)

    xs = [x(k, h, u, v) for k in range(1, K + 1) for h in range(1, H + 1)
          for u in able[k] for v in able[k] if u != v]
    qs = [q(k, h, u, v) for k in range(1, K + 1) for h in range(1, H + 1)
          for u in able[k] for v in able[k] if u != v]
    ys = [y(k, h, t) for k in range(1, K + 1) for h in range(1, H + 1) for t in tasks]
    fixed = [y(k, h, t) for k in range(1, K + 1) for h in range(1, H + 1) for t in tasks
             if (k, t) not in can]

    out.write("Bounds\n")
    for var in qs:
        out.write(f" 0 <= {var} <= {_coef(D)}\n")
    for var in fixed:
        out.write(f" {var} = 0\n")
    out.write(" 0 <= p <= " + str(H) + "\n")
    w.names("Generals", ["p"])
    w.names("Binaries", xs + ys)
    out.write("End\n")

    st = w.stats
    st.H = H
    st.num_binary = len(xs) + len(ys)
    st.num_continuous = len(qs)
    st.num_general_integer = 1
    st.by_family.update({"x": len(xs), "q": len(qs), "y": len(ys)})
    return st


def closed_form_counts(inst: Instance, H: int) -> Dict[str, int]:
    """Variable and constraint counts predicted from instance dimensions alone."""
    K = inst.K
    tasks = inst.tasks()
    T = len(tasks)
    m = [1 + sum(1 for t in tasks if is_finite(inst.task_time(k, t))) for k in range(1, K + 1)]
    P = sum(len(inst.service_of(i).deps) for i in range(2, inst.n + 1))
    S = sum(mk - 1 for mk in m)
    nx = H * sum(mk * (mk - 1) for mk in m)
    return {
        "x": nx,
        "q": nx,
        "y": K * H * T,
        "binary": nx + K * H * T,
        "continuous": nx,
        "general": 1,
        "constraints": T + P + 4 * H * S + nx + 2 * K * H,
    }


_TERM = re.compile(r"^([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.]*)$")
_NAME = re.compile(r"^[A-Za-z_][\w.]*$")
_NUM = re.compile(r"^-?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?$")


@dataclass
class LpSummary:
    objective: str
    constraints: List[str]
    binaries: List[str]
    generals: List[str]
    bounded: List[str]
    variables: set


def lint_lp(text: str) -> LpSummary:
    """Check the subset of LP grammar this module emits; raise ``ValueError`` on a defect."""
    sections = ["Minimize", "Subject To", "Bounds", "Generals", "Binaries", "End"]
    current = None
    order = []
    logical: List[Tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].rstrip()
        if not line.strip():
            continue
        if line in sections:
            current = line
            order.append(line)
            continue
        if current is None:
            raise ValueError(f"content before the first section: {raw!r}")
        if raw.startswith("   ") and logical and logical[-1][0] == current:
            logical[-1] = (current, logical[-1][1] + " " + line.strip())
        else:
            logical.append((current, line.strip()))
    if order != sections:
        raise ValueError(f"sections out of order or missing: {order}")

    summary = LpSummary("", [], [], [], [], set())
    seen_names = set()
    for sec, line in logical:
        if sec in ("Minimize", "Subject To"):
            if ":" not in line:
                raise ValueError(f"unnamed row: {line!r}")
            rname, body = line.split(":", 1)
            rname = rname.strip()
            if not _NAME.match(rname) or rname in seen_names:
                raise ValueError(f"bad or duplicate row name {rname!r}")
            seen_names.add(rname)
            if sec == "Minimize":
                expr, rhs = body, None
                summary.objective = rname
            else:
                m = re.match(r"^(.*?)(<=|>=|=)\s*(\S+)$", body)
                if not m or not _NUM.match(m.group(3)):
                    raise ValueError(f"row {rname}: missing sense or right-hand side")
                expr = m.group(1)
                summary.constraints.append(rname)
            for term in re.findall(r"[+-]?\s*[^+-]+", expr.strip()):
                tm = _TERM.match(term.strip())
                if not tm:
                    raise ValueError(f"row {rname}: bad term {term!r}")
                summary.variables.add(tm.group(3))
        elif sec == "Bounds":
            m = re.match(r"^(?:(\S+)\s*<=\s*)?([A-Za-z_][\w.]*)\s*(<=|=)\s*(\S+)$", line)
            if not m or not _NUM.match(m.group(4)) or (m.group(1) and not _NUM.match(m.group(1))):
                raise ValueError(f"bad bound: {line!r}")
            summary.bounded.append(m.group(2))
            summary.variables.add(m.group(2))
        elif sec in ("Generals", "Binaries"):
            for nm in line.split():
                if not _NAME.match(nm):
                    raise ValueError(f"bad variable name {nm!r}")
                (summary.generals if sec == "Generals" else summary.binaries).append(nm)
                summary.variables.add(nm)
        elif sec == "End":
            raise ValueError("content after End")
    if len(set(summary.binaries)) != len(summary.binaries):
        raise ValueError("duplicate binary declaration")
    return summary

"""Construction kernel: flattened problem data and backend selection.

The hot loop (one ant building one solution) exists twice, as a compiled
Cython extension ``_ckernel`` and as the pure-Python ``_pykernel``. Both
produce bit-identical output. The compiled backend is used when it imports
and ``MWSRPDT_PURE_PYTHON`` is unset or ``0``.

Extended vertices are flattened to integers: ``0`` is the depot and
``1..T`` are the customer-task pairs in (customer, task) order. Teams are
0-based inside the kernel.
"""

from __future__ import annotations

import math
import os

import numpy as np

from ..core import DEPOT, INFINITE, Instance, TaskRef, extended_travel_time, is_finite
from . import _pykernel

# selection modes
GREEDY = 0
PROPORTIONAL = 1
PSEUDORANDOM = 2
CALLBACK = 3

ENCODINGS = {"ct1": 1, "ct2": 2, "ct3": 3, "ct4": 4}


class FlatProblem:
    """Array view of an :class:`Instance` consumed by both kernels."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.vertices = [DEPOT] + inst.tasks()
        self.index = {v: idx for idx, v in enumerate(self.vertices)}
        self.T = len(self.vertices) - 1
        self.V = self.T + 1
        self.K = inst.K
        self.D = float(inst.D)

        dist = np.zeros((self.V, self.V))
        for a in range(self.V):
            for b in range(self.V):
                if a != b:
                    dist[a, b] = extended_travel_time(inst, self.vertices[a], self.vertices[b])
        times = np.full((self.K, self.V), math.inf)
        for k in range(self.K):
            for v in range(1, self.V):
                t = inst.task_time(k + 1, self.vertices[v])
                if is_finite(t):
                    times[k, v] = float(t)

        preds = [[] for _ in range(self.V)]
        succs = [[] for _ in range(self.V)]
        for v in range(1, self.V):
            ref = self.vertices[v]
            svc = inst.service_of(ref.customer)
            for b in svc.predecessors(ref.task):
                preds[v].append(self.index[TaskRef(ref.customer, b)])
            for a in svc.successors(ref.task):
                succs[v].append(self.index[TaskRef(ref.customer, a)])

        self.dist = dist
        self.times = times
        self.pred_ptr, self.pred_idx = _csr(preds)
        self.succ_ptr, self.succ_idx = _csr(succs)
        # list copies for the pure-Python kernel
        self.dist_l = dist.tolist()
        self.times_l = times.tolist()
        self.preds_l = preds
        self.succs_l = succs

    def vertex(self, idx: int):
        return self.vertices[idx]

    def pack(self, encoding: int, day: int, team: int, frm: int, to: int) -> int:
        return _pykernel.pack_key(encoding, day, team, frm, to, self.V, self.K)

    def unpack(self, encoding: int, key: int):
        """Inverse of :meth:`pack`: ``(day, team, frm, to)`` with absent fields ``None``."""
        V, K = self.V, self.K
        to = key % V
        rest = key // V
        if encoding == 1:
            return None, None, rest, to
        if encoding == 4:
            return None, rest, None, to
        frm = rest % V
        rest //= V
        if encoding == 2:
            return None, rest, frm, to
        return rest // K, rest % K, frm, to


def _csr(lists):
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    for i, lst in enumerate(lists):
        ptr[i + 1] = ptr[i] + len(lst)
    idx = np.array([x for lst in lists for x in lst], dtype=np.int64)
    return ptr, idx


def _load_compiled():
    if os.environ.get("MWSRPDT_PURE_PYTHON", "0") not in ("", "0"):
        return None
    try:
        from . import _ckernel
    except ImportError:
        return None
    return _ckernel


_compiled = _load_compiled()
BACKEND = "cython" if _compiled is not None else "python"


def simulate(fp: FlatProblem, mode: int, uniforms=None, tau=None, tau_default=1.0,
             encoding=1, alpha=1.0, beta=1.0, q0=0.0, phi=0.0, tau0=1.0,
             local=False, chooser=None, backend=None):
    """Run one construction; see ``_pykernel.simulate`` for the contract."""
    impl = _pick_backend(backend if backend is not None else BACKEND, mode)
    if tau is None:
        tau = {}
    if uniforms is None:
        uniforms = np.zeros(2 * fp.T + 2)
    return impl.simulate(fp, mode, uniforms, tau, float(tau_default), int(encoding),
                         float(alpha), float(beta), float(q0), float(phi), float(tau0),
                         bool(local), chooser)


def _pick_backend(name, mode):
    if mode == CALLBACK or name == "python":
        return _pykernel
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    return ["python"] + (["cython"] if _compiled is not None else [])


__all__ = [
    "BACKEND", "CALLBACK", "ENCODINGS", "FlatProblem", "GREEDY", "INFINITE",
    "PROPORTIONAL", "PSEUDORANDOM", "available_backends", "simulate",
]

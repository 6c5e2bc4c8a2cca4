# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled construction kernel. Mirrors ``_pykernel.simulate`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, log, exp, INFINITY

from ..exceptions import StalledDay

cnp.import_array()

cdef double EPS = 1e-9


cdef inline long long pack_key(int encoding, long long day, long long team,
                               long long frm, long long to, long long V, long long K):
    if encoding == 1:
        return frm * V + to
    if encoding == 2:
        return (team * V + frm) * V + to
    if encoding == 3:
        return ((day * K + team) * V + frm) * V + to
    return team * V + to


cdef int roulette(double[::1] w, int n, double u):
    cdef double total = 0.0, threshold, acc = 0.0
    cdef int i, last = -1
    for i in range(n):
        total += w[i]
    if not (total > 0.0) or total == INFINITY:
        return -1
    threshold = u * total
    for i in range(n):
        acc += w[i]
        if w[i] > 0.0:
            last = i
        if threshold < acc:
            return i
    return last


cdef int pick_proportional(double[::1] taus, double[::1] ends, double[::1] w, int n,
                           double alpha, double beta, double u):
    cdef double total = 0.0, top
    cdef int i, idx
    for i in range(n):
        w[i] = pow(taus[i], alpha) * pow(1.0 / ends[i], beta)
        total += w[i]
    if not (total > 0.0 and total != INFINITY):
        for i in range(n):
            w[i] = alpha * log(taus[i]) - beta * log(ends[i])
        top = w[0]
        for i in range(1, n):
            if w[i] > top:
                top = w[i]
        for i in range(n):
            w[i] = exp(w[i] - top)
    idx = roulette(w, n, u)
    if idx < 0:
        idx = <int>(u * n)
        if idx >= n:
            idx = n - 1
    return idx


cdef int pick_greedy_tau(double[::1] taus, double[::1] ends, int n, double beta):
    cdef int i, best = -1
    cdef double val, best_val = -1.0
    for i in range(n):
        val = taus[i] * pow(1.0 / ends[i], beta)
        if val > best_val:
            best_val = val
            best = i
    return best


def simulate(fp, int mode, uniforms_in, dict tau, double tau_default, int encoding,
             double alpha, double beta, double q0, double phi, double tau0,
             bint local, chooser):
    if mode == 3:
        raise ValueError("callback mode is only supported by the Python kernel")
    cdef int T = fp.T
    cdef int V = fp.V
    cdef int K = fp.K
    cdef double D = fp.D
    cdef double[:, ::1] dist = fp.dist
    cdef double[:, ::1] times = fp.times
    cdef long long[::1] pred_ptr = fp.pred_ptr
    cdef long long[::1] pred_idx = fp.pred_idx
    cdef long long[::1] succ_ptr = fp.succ_ptr
    cdef long long[::1] succ_idx = fp.succ_idx
    cdef double[::1] uniforms = np.ascontiguousarray(uniforms_in, dtype=np.float64)

    cdef unsigned char[::1] done = np.zeros(V, dtype=np.uint8)
    cdef unsigned char[::1] avail = np.zeros(V, dtype=np.uint8)
    cdef long long[::1] open_day = np.zeros(V, dtype=np.int64)
    cdef double[::1] open_at = np.zeros(V, dtype=np.float64)
    cdef long long[::1] comp_day = np.zeros(V, dtype=np.int64)
    cdef double[::1] comp_at = np.zeros(V, dtype=np.float64)

    cdef long long[::1] cand = np.zeros(V, dtype=np.int64)
    cdef double[::1] starts = np.zeros(V, dtype=np.float64)
    cdef double[::1] ends = np.zeros(V, dtype=np.float64)
    cdef double[::1] taus = np.zeros(V, dtype=np.float64)
    cdef double[::1] wbuf = np.zeros(V, dtype=np.float64)

    cdef double[::1] ev_q = np.zeros(K, dtype=np.float64)
    cdef long long[::1] ev_pos = np.zeros(K, dtype=np.int64)
    cdef unsigned char[::1] active = np.zeros(K, dtype=np.uint8)

    cdef int v, k, kk, i, n, c, c2, j, jj, b, executed, remaining = T
    cdef long long day = 0, pos, key, bd
    cdef long long nsel = 0
    cdef double q, s, st, en, t, bt
    cdef bint ready

    visits = []
    comps = []

    for v in range(1, V):
        if pred_ptr[v + 1] == pred_ptr[v]:
            avail[v] = 1

    while remaining > 0:
        day += 1
        for k in range(K):
            ev_q[k] = 0.0
            ev_pos[k] = 0
            active[k] = 1
        executed = 0
        while True:
            k = -1
            for kk in range(K):
                if active[kk] and (k < 0 or ev_q[kk] < ev_q[k]):
                    k = kk
            if k < 0:
                break
            q = ev_q[k]
            pos = ev_pos[k]

            n = 0
            for v in range(1, V):
                if not avail[v]:
                    continue
                t = times[k, v]
                if t == INFINITY:
                    continue
                s = open_at[v] if open_day[v] == day else 0.0
                st = q + dist[pos, v]
                if s > st:
                    st = s
                en = st + t
                if en + dist[v, 0] <= D + EPS:
                    cand[n] = v
                    starts[n] = st
                    ends[n] = en
                    n += 1

            if n == 0:
                comps.append(pack_key(encoding, day, k, pos, 0, V, K))
                active[k] = 0
                continue

            if mode == 0:
                c = 0
                for i in range(1, n):
                    if ends[i] < ends[c]:
                        c = i
            else:
                for i in range(n):
                    taus[i] = tau.get(pack_key(encoding, day, k, pos, cand[i], V, K), tau_default)
                if mode == 2 and uniforms[2 * nsel] < q0:
                    c = pick_greedy_tau(taus, ends, n, beta)
                else:
                    c = pick_proportional(taus, ends, wbuf, n, alpha, beta, uniforms[2 * nsel + 1])
            nsel += 1

            v = cand[c]
            st = starts[c]
            en = ends[c]
            key = pack_key(encoding, day, k, pos, v, V, K)
            comps.append(key)
            if local:
                tau[key] = (1.0 - phi) * tau.get(key, tau_default) + phi * tau0
            visits.append((k, day, v, st, en))
            done[v] = 1
            avail[v] = 0
            remaining -= 1
            executed += 1
            comp_day[v] = day
            comp_at[v] = en
            for j in range(succ_ptr[v], succ_ptr[v + 1]):
                c2 = succ_idx[j]
                if done[c2]:
                    continue
                ready = True
                bd = 0
                bt = 0.0
                for jj in range(pred_ptr[c2], pred_ptr[c2 + 1]):
                    b = pred_idx[jj]
                    if not done[b]:
                        ready = False
                        break
                    if comp_day[b] > bd or (comp_day[b] == bd and comp_at[b] > bt):
                        bd = comp_day[b]
                        bt = comp_at[b]
                if ready:
                    open_day[c2] = bd
                    open_at[c2] = bt
                    avail[c2] = 1
            ev_q[k] = en
            ev_pos[k] = v
        if executed == 0:
            raise StalledDay(f"day {day}: {remaining} tasks remain but no team can fit any of them")
    return visits, comps

"""Pure-Python construction kernel (reference backend).

Must stay bit-identical to ``_ckernel.pyx``: same loop order, same
floating-point expression order, same tie-breaking.
"""

import math

from ..exceptions import StalledDay

EPS = 1e-9
INF = math.inf


def _pow(x, y):
    """``x ** y`` returning inf on overflow, as C ``pow`` does."""
    try:
        return x ** y
    except OverflowError:
        return INF


def pack_key(encoding, day, team, frm, to, V, K):
    if encoding == 1:
        return frm * V + to
    if encoding == 2:
        return (team * V + frm) * V + to
    if encoding == 3:
        return ((day * K + team) * V + frm) * V + to
    return team * V + to


def roulette(weights, u):
    """Index drawn from unnormalized ``weights`` with uniform ``u`` in [0, 1).

    Returns -1 when the weights are degenerate (zero or non-finite total).
    """
    total = 0.0
    for w in weights:
        total += w
    if not (total > 0.0) or total == INF:
        return -1
    threshold = u * total
    acc = 0.0
    last = -1
    for i, w in enumerate(weights):
        acc += w
        if w > 0.0:
            last = i
        if threshold < acc:
            return i
    return last


def proportional_weights(taus, ends, alpha, beta):
    """tau^alpha * (1/end)^beta, rescaled in log space if plain powers under/overflow."""
    weights = [_pow(t, alpha) * _pow(1.0 / e, beta) for t, e in zip(taus, ends)]
    total = 0.0
    for w in weights:
        total += w
    if total > 0.0 and total != INF:
        return weights
    logs = [alpha * math.log(t) - beta * math.log(e) for t, e in zip(taus, ends)]
    top = max(logs)
    return [math.exp(x - top) for x in logs]


def pick_proportional(taus, ends, alpha, beta, u):
    idx = roulette(proportional_weights(taus, ends, alpha, beta), u)
    if idx < 0:
        # uniform fallback
        idx = int(u * len(taus))
        if idx >= len(taus):
            idx = len(taus) - 1
    return idx


def pick_greedy_tau(taus, ends, beta):
    best = -1
    best_val = -1.0
    for i in range(len(taus)):
        val = taus[i] * _pow(1.0 / ends[i], beta)
        if val > best_val:
            best_val = val
            best = i
    return best


def simulate(fp, mode, uniforms, tau, tau_default, encoding, alpha, beta, q0, phi,
             tau0, local, chooser):
    """Build one solution with the discrete-event construction.

    Parameters are the flattened problem ``fp``, a selection ``mode``
    (0 greedy, 1 proportional, 2 pseudo-random proportional, 3 callback),
    ``uniforms`` (two draws per selection), the pheromone dict ``tau`` with
    its fallback ``tau_default``, the component ``encoding`` (1..4) and the
    ACO constants. With ``local`` set, each selected component's pheromone is
    decayed towards ``tau0`` immediately.

    Returns ``(visits, components)`` where each visit is
    ``(team, day, vertex, start, end)`` with 0-based team, in decision order.
    """
    T = fp.T
    V = fp.V
    K = fp.K
    D = fp.D
    dist = fp.dist_l
    times = fp.times_l
    preds = fp.preds_l
    succs = fp.succs_l
    if hasattr(uniforms, "tolist"):
        uniforms = uniforms.tolist()

    done = [False] * V
    avail = [False] * V
    open_day = [0] * V
    open_at = [0.0] * V
    comp_day = [0] * V
    comp_at = [0.0] * V
    for v in range(1, V):
        if not preds[v]:
            avail[v] = True

    visits = []
    comps = []
    remaining = T
    day = 0
    nsel = 0
    ev_q = [0.0] * K
    ev_pos = [0] * K
    active = [False] * K

    while remaining > 0:
        day += 1
        for k in range(K):
            ev_q[k] = 0.0
            ev_pos[k] = 0
            active[k] = True
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
            tk = times[k]
            drow = dist[pos]

            cand = []
            starts = []
            ends = []
            for v in range(1, V):
                if not avail[v]:
                    continue
                t = tk[v]
                if t == INF:
                    continue
                s = open_at[v] if open_day[v] == day else 0.0
                st = q + drow[v]
                if s > st:
                    st = s
                en = st + t
                if en + dist[v][0] <= D + EPS:
                    cand.append(v)
                    starts.append(st)
                    ends.append(en)

            if not cand:
                comps.append(pack_key(encoding, day, k, pos, 0, V, K))
                active[k] = False
                continue

            n = len(cand)
            if mode == 0:
                c = 0
                for i in range(1, n):
                    if ends[i] < ends[c]:
                        c = i
            elif mode == 3:
                c = chooser(k, pos, day, cand, starts, ends)
            else:
                keys = [pack_key(encoding, day, k, pos, v, V, K) for v in cand]
                taus = [tau.get(key, tau_default) for key in keys]
                if mode == 2 and uniforms[2 * nsel] < q0:
                    c = pick_greedy_tau(taus, ends, beta)
                else:
                    c = pick_proportional(taus, ends, alpha, beta, uniforms[2 * nsel + 1])
            nsel += 1

            v = cand[c]
            st = starts[c]
            en = ends[c]
            key = pack_key(encoding, day, k, pos, v, V, K)
            comps.append(key)
            if local:
                tau[key] = (1.0 - phi) * tau.get(key, tau_default) + phi * tau0
            visits.append((k, day, v, st, en))
            done[v] = True
            avail[v] = False
            remaining -= 1
            executed += 1
            comp_day[v] = day
            comp_at[v] = en
            for c2 in succs[v]:
                if done[c2]:
                    continue
                ready = True
                bd = 0
                bt = 0.0
                for b in preds[c2]:
                    if not done[b]:
                        ready = False
                        break
                    if comp_day[b] > bd or (comp_day[b] == bd and comp_at[b] > bt):
                        bd = comp_day[b]
                        bt = comp_at[b]
                if ready:
                    open_day[c2] = bd
                    open_at[c2] = bt
                    avail[c2] = True
            ev_q[k] = en
            ev_pos[k] = v
        if executed == 0:
            raise StalledDay(f"day {day}: {remaining} tasks remain but no team can fit any of them")
    return visits, comps

"""Pure-Python implementation of the allocation kernels.

This module is the reference for ``_ckernels.pyx``; both expose the same
functions and evaluate floating-point expressions in the same order, so the
two backends agree to the last bit on the same inputs.

Scheme codes (see ``SCHEMES``): 0 = E-NOMA, 1 = C-NOMA, 2 = E-OMA, 3 = C-OMA.
"""

from math import log2

import numpy as np

TOL = 1e-9
E_NOMA, C_NOMA, E_OMA, C_OMA = 0, 1, 2, 3
SCHEMES = ("E-NOMA", "C-NOMA", "E-OMA", "C-OMA")


def water_fill_levels(base, budget):
    """Spread ``budget`` over entries with floor levels ``base``.

    Returns ``(x, mu)`` with ``x[i] = max(0, mu - base[i])`` and
    ``sum(x) == budget``.  Plain water-filling over gains ``g`` is the special
    case ``base = 1/g``.
    """
    n = len(base)
    order = sorted(range(n), key=base.__getitem__)
    k = n
    mu = 0.0
    while k > 0:
        acc = budget
        for j in range(k):
            acc += base[order[j]]
        mu = acc / k
        if mu > base[order[k - 1]] or k == 1:
            break
        k -= 1
    x = [0.0] * n
    for j in range(k):
        i = order[j]
        v = mu - base[i]
        x[i] = v if v > 0.0 else 0.0
    return x, mu


def _e_noma_cluster(gs, gw, rs, rw, b):
    ss = 2.0 ** rs - 1.0
    sw = 2.0 ** rw - 1.0
    qs = ss / gs
    qw = sw * (qs * gw + 1.0) / gw
    alone = log2(1.0 + b * gs) >= rs - TOL
    if qs + qw <= b + TOL:
        pw = sw * (b * gw + 1.0) / ((1.0 + sw) * gw)
        if pw > b:
            pw = b
        ps = b - pw
        ra_s = log2(1.0 + ps * gs)
        ra_w = log2(1.0 + pw * gw / (ps * gw + 1.0))
        return ps, pw, ra_s, ra_w, alone, ra_w >= rw - TOL
    return b, 0.0, log2(1.0 + b * gs), 0.0, alone, False


def _e_oma_cluster(gs, gw, rs, rw, b, lone_share):
    qs = (2.0 ** (2.0 * rs) - 1.0) / gs
    qw = (2.0 ** (2.0 * rw) - 1.0) / gw
    lone = lone_share * log2(1.0 + b * gs)
    alone = lone >= rs - TOL
    if qs + qw <= b + TOL:
        resid = b - qs - qw
        if resid < 0.0:
            resid = 0.0
        x, _ = water_fill_levels([1.0 / gs + qs, 1.0 / gw + qw], resid)
        ps = qs + x[0]
        pw = qw + x[1]
        ra_s = 0.5 * log2(1.0 + ps * gs)
        ra_w = 0.5 * log2(1.0 + pw * gw)
        return ps, pw, ra_s, ra_w, alone, ra_w >= rw - TOL
    return b, 0.0, lone, 0.0, alone, False


def _c_noma(gs, gw, rs, rw, budget):
    k = len(gs)
    qs = [0.0] * k
    qw = [0.0] * k
    total = 0.0
    for c in range(k):
        ss = 2.0 ** rs[c] - 1.0
        sw = 2.0 ** rw[c] - 1.0
        qs[c] = ss / gs[c]
        qw[c] = sw * (qs[c] * gw[c] + 1.0) / gw[c]
        total += qs[c] + qw[c]
    ps = [0.0] * k
    pw = [0.0] * k
    ra_s = [0.0] * k
    ra_w = [0.0] * k
    adm_s = [False] * k
    adm_w = [False] * k
    if total <= budget + TOL:
        resid = budget - total
        if resid < 0.0:
            resid = 0.0
        # extra cluster power x raises the strong rate as log2(a + x*gs/(1+sw));
        # the weak user keeps its QoS by taking the share sw/(1+sw) of x
        base = [0.0] * k
        for c in range(k):
            base[c] = (2.0 ** rs[c]) * (2.0 ** rw[c]) / gs[c]
        x, _ = water_fill_levels(base, resid)
        for c in range(k):
            fw = 2.0 ** rw[c]
            ps[c] = qs[c] + x[c] / fw
            pw[c] = qw[c] + x[c] * (fw - 1.0) / fw
            ra_s[c] = log2(1.0 + ps[c] * gs[c])
            ra_w[c] = log2(1.0 + pw[c] * gw[c] / (ps[c] * gw[c] + 1.0))
            adm_s[c] = ra_s[c] >= rs[c] - TOL
            adm_w[c] = ra_w[c] >= rw[c] - TOL
        return ps, pw, ra_s, ra_w, adm_s, adm_w
    left = budget
    while True:
        best = -1
        best_cost = 0.0
        best_weak = False
        for c in range(k):
            if not adm_s[c]:
                cost, weak = qs[c], False
            elif not adm_w[c]:
                cost, weak = qw[c], True
            else:
                continue
            if best < 0 or cost < best_cost:
                best, best_cost, best_weak = c, cost, weak
        if best < 0 or best_cost > left + TOL:
            break
        left -= best_cost
        if best_weak:
            adm_w[best] = True
        else:
            adm_s[best] = True
    for c in range(k):
        if adm_s[c]:
            ps[c] = qs[c]
            ra_s[c] = log2(1.0 + ps[c] * gs[c])
        if adm_w[c]:
            pw[c] = qw[c]
            ra_w[c] = log2(1.0 + pw[c] * gw[c] / (ps[c] * gw[c] + 1.0))
    return ps, pw, ra_s, ra_w, adm_s, adm_w


def _c_oma(gs, gw, rs, rw, budget):
    k = len(gs)
    n = 2 * k
    g = [0.0] * n
    r = [0.0] * n
    q = [0.0] * n
    total = 0.0
    for c in range(k):
        g[2 * c] = gs[c]
        g[2 * c + 1] = gw[c]
        r[2 * c] = rs[c]
        r[2 * c + 1] = rw[c]
    for i in range(n):
        q[i] = (2.0 ** (2.0 * r[i]) - 1.0) / g[i]
        total += q[i]
    p = [0.0] * n
    rate = [0.0] * n
    adm = [False] * n
    if total <= budget + TOL:
        resid = budget - total
        if resid < 0.0:
            resid = 0.0
        base = [0.0] * n
        for i in range(n):
            base[i] = 1.0 / g[i] + q[i]
        x, _ = water_fill_levels(base, resid)
        for i in range(n):
            p[i] = q[i] + x[i]
            rate[i] = 0.5 * log2(1.0 + p[i] * g[i])
            adm[i] = rate[i] >= r[i] - TOL
    else:
        # descending gain; equal gains keep cluster order, strong first
        order = sorted(range(n), key=lambda i: -g[i])
        left = budget
        for i in order:
            if q[i] > left + TOL:
                break
            left -= q[i]
            p[i] = q[i]
            rate[i] = 0.5 * log2(1.0 + p[i] * g[i])
            adm[i] = True
    return (p[0::2], p[1::2], rate[0::2], rate[1::2], adm[0::2], adm[1::2])


def allocate(scheme, gs, gw, rs, rw, budget, lone_full_band=True):
    """Run one scheme over ``K`` clusters with a total power ``budget``.

    ``gs``/``gw`` are strong/weak gains per cluster and ``rs``/``rw`` the QoS
    rates.  The equal-power schemes give every cluster ``budget / K``.
    ``lone_full_band`` selects whether an E-OMA strong user served without
    its partner occupies the whole sub-channel (default) or only its half.
    Returns six length-``K`` lists: strong power, weak power, strong rate,
    weak rate, strong admitted, weak admitted.
    """
    gs = [float(v) for v in gs]
    gw = [float(v) for v in gw]
    rs = [float(v) for v in rs]
    rw = [float(v) for v in rw]
    k = len(gs)
    if scheme == E_NOMA or scheme == E_OMA:
        b = budget / k
        if scheme == E_NOMA:
            cols = [_e_noma_cluster(gs[c], gw[c], rs[c], rw[c], b) for c in range(k)]
        else:
            share = 1.0 if lone_full_band else 0.5
            cols = [_e_oma_cluster(gs[c], gw[c], rs[c], rw[c], b, share) for c in range(k)]
        return tuple(list(col) for col in zip(*cols))
    if scheme == C_NOMA:
        return _c_noma(gs, gw, rs, rw, budget)
    if scheme == C_OMA:
        return _c_oma(gs, gw, rs, rw, budget)
    raise ValueError(f"unknown scheme code {scheme}")


def sweep(gs, gw, rs, rw, budgets, lone_full_band=True):
    """Evaluate all four schemes for every (budget, trial).

    ``gs``/``gw`` have shape (T, K); ``rs``/``rw`` are scalar QoS rates.
    Returns ``(out_strong, out_weak, sum_rate)`` of shape (P, T, 4): the
    number of strong-/weak-role users in outage and the effective sum rate.
    """
    gs = np.ascontiguousarray(gs, dtype=np.float64)
    gw = np.ascontiguousarray(gw, dtype=np.float64)
    budgets = np.ascontiguousarray(budgets, dtype=np.float64)
    n_t, k = gs.shape
    n_p = budgets.shape[0]
    out_s = np.zeros((n_p, n_t, 4), dtype=np.int32)
    out_w = np.zeros((n_p, n_t, 4), dtype=np.int32)
    srate = np.zeros((n_p, n_t, 4), dtype=np.float64)
    rsl = [float(rs)] * k
    rwl = [float(rw)] * k
    for t in range(n_t):
        gsl = gs[t].tolist()
        gwl = gw[t].tolist()
        for ip in range(n_p):
            b = float(budgets[ip])
            for s in range(4):
                _, _, ra_s, ra_w, adm_s, adm_w = allocate(s, gsl, gwl, rsl, rwl, b, lone_full_band)
                no_s = 0
                no_w = 0
                tot = 0.0
                for c in range(k):
                    if adm_s[c]:
                        tot += ra_s[c]
                    else:
                        no_s += 1
                    if adm_w[c]:
                        tot += ra_w[c]
                    else:
                        no_w += 1
                out_s[ip, t, s] = no_s
                out_w[ip, t, s] = no_w
                srate[ip, t, s] = tot
    return out_s, out_w, srate

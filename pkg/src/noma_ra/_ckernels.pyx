# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled allocation kernels; mirrors ``_pykernels`` operation for operation."""

from libc.math cimport log2, pow
from libc.stdlib cimport malloc, free

import numpy as np

cdef double TOL = 1e-9

E_NOMA, C_NOMA, E_OMA, C_OMA = 0, 1, 2, 3
SCHEMES = ("E-NOMA", "C-NOMA", "E-OMA", "C-OMA")


cdef void _argsort_asc(int n, const double* v, int* order) noexcept nogil:
    # stable insertion sort; n is tiny (two users per cluster)
    cdef int i, j, t
    for i in range(n):
        order[i] = i
    for i in range(1, n):
        t = order[i]
        j = i - 1
        while j >= 0 and v[order[j]] > v[t]:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = t


cdef void _argsort_desc(int n, const double* v, int* order) noexcept nogil:
    cdef int i, j, t
    for i in range(n):
        order[i] = i
    for i in range(1, n):
        t = order[i]
        j = i - 1
        while j >= 0 and -v[order[j]] > -v[t]:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = t


cdef double _wf(int n, const double* base, double budget, double* x,
                int* order) noexcept nogil:
    cdef int k, j, i
    cdef double acc, mu = 0.0, v
    _argsort_asc(n, base, order)
    k = n
    while k > 0:
        acc = budget
        for j in range(k):
            acc += base[order[j]]
        mu = acc / k
        if mu > base[order[k - 1]] or k == 1:
            break
        k -= 1
    for i in range(n):
        x[i] = 0.0
    for j in range(k):
        i = order[j]
        v = mu - base[i]
        x[i] = v if v > 0.0 else 0.0
    return mu


cdef void _e_noma_cluster(double gs, double gw, double rs, double rw, double b,
                          double* out, char* adm) noexcept nogil:
    cdef double ss = pow(2.0, rs) - 1.0
    cdef double sw = pow(2.0, rw) - 1.0
    cdef double qs = ss / gs
    cdef double qw = sw * (qs * gw + 1.0) / gw
    cdef double ps, pw, ra_s, ra_w
    cdef bint alone = log2(1.0 + b * gs) >= rs - TOL
    if qs + qw <= b + TOL:
        pw = sw * (b * gw + 1.0) / ((1.0 + sw) * gw)
        if pw > b:
            pw = b
        ps = b - pw
        ra_s = log2(1.0 + ps * gs)
        ra_w = log2(1.0 + pw * gw / (ps * gw + 1.0))
        out[0] = ps; out[1] = pw; out[2] = ra_s; out[3] = ra_w
        adm[0] = alone; adm[1] = ra_w >= rw - TOL
        return
    out[0] = b; out[1] = 0.0; out[2] = log2(1.0 + b * gs); out[3] = 0.0
    adm[0] = alone; adm[1] = 0


cdef void _e_oma_cluster(double gs, double gw, double rs, double rw, double b,
                         double lone_share, double* out, char* adm) noexcept nogil:
    cdef double qs = (pow(2.0, 2.0 * rs) - 1.0) / gs
    cdef double qw = (pow(2.0, 2.0 * rw) - 1.0) / gw
    cdef double lone = lone_share * log2(1.0 + b * gs)
    cdef bint alone = lone >= rs - TOL
    cdef double resid, ps, pw, ra_s, ra_w
    cdef double base[2]
    cdef double x[2]
    cdef int order[2]
    if qs + qw <= b + TOL:
        resid = b - qs - qw
        if resid < 0.0:
            resid = 0.0
        base[0] = 1.0 / gs + qs
        base[1] = 1.0 / gw + qw
        _wf(2, base, resid, x, order)
        ps = qs + x[0]
        pw = qw + x[1]
        ra_s = 0.5 * log2(1.0 + ps * gs)
        ra_w = 0.5 * log2(1.0 + pw * gw)
        out[0] = ps; out[1] = pw; out[2] = ra_s; out[3] = ra_w
        adm[0] = alone; adm[1] = ra_w >= rw - TOL
        return
    out[0] = b; out[1] = 0.0; out[2] = lone; out[3] = 0.0
    adm[0] = alone; adm[1] = 0


cdef void _c_noma(int k, const double* gs, const double* gw, const double* rs,
                  const double* rw, double budget, double* ps, double* pw,
                  double* ra_s, double* ra_w, char* adm_s, char* adm_w,
                  double* work, int* iwork) noexcept nogil:
    cdef double* qs = work
    cdef double* qw = work + k
    cdef double* base = work + 2 * k
    cdef double* x = work + 3 * k
    cdef double total = 0.0, ss, sw, resid, fw, left, cost, best_cost
    cdef int c, best
    cdef bint weak, best_weak
    for c in range(k):
        ss = pow(2.0, rs[c]) - 1.0
        sw = pow(2.0, rw[c]) - 1.0
        qs[c] = ss / gs[c]
        qw[c] = sw * (qs[c] * gw[c] + 1.0) / gw[c]
        total += qs[c] + qw[c]
    for c in range(k):
        ps[c] = 0.0; pw[c] = 0.0; ra_s[c] = 0.0; ra_w[c] = 0.0
        adm_s[c] = 0; adm_w[c] = 0
    if total <= budget + TOL:
        resid = budget - total
        if resid < 0.0:
            resid = 0.0
        for c in range(k):
            base[c] = pow(2.0, rs[c]) * pow(2.0, rw[c]) / gs[c]
        _wf(k, base, resid, x, iwork)
        for c in range(k):
            fw = pow(2.0, rw[c])
            ps[c] = qs[c] + x[c] / fw
            pw[c] = qw[c] + x[c] * (fw - 1.0) / fw
            ra_s[c] = log2(1.0 + ps[c] * gs[c])
            ra_w[c] = log2(1.0 + pw[c] * gw[c] / (ps[c] * gw[c] + 1.0))
            adm_s[c] = ra_s[c] >= rs[c] - TOL
            adm_w[c] = ra_w[c] >= rw[c] - TOL
        return
    left = budget
    while True:
        best = -1
        best_cost = 0.0
        best_weak = 0
        for c in range(k):
            if not adm_s[c]:
                cost = qs[c]; weak = 0
            elif not adm_w[c]:
                cost = qw[c]; weak = 1
            else:
                continue
            if best < 0 or cost < best_cost:
                best = c; best_cost = cost; best_weak = weak
        if best < 0 or best_cost > left + TOL:
            break
        left -= best_cost
        if best_weak:
            adm_w[best] = 1
        else:
            adm_s[best] = 1
    for c in range(k):
        if adm_s[c]:
            ps[c] = qs[c]
            ra_s[c] = log2(1.0 + ps[c] * gs[c])
        if adm_w[c]:
            pw[c] = qw[c]
            ra_w[c] = log2(1.0 + pw[c] * gw[c] / (ps[c] * gw[c] + 1.0))


cdef void _c_oma(int k, const double* gs, const double* gw, const double* rs,
                 const double* rw, double budget, double* ps, double* pw,
                 double* ra_s, double* ra_w, char* adm_s, char* adm_w,
                 double* work, int* iwork) noexcept nogil:
    cdef int n = 2 * k
    cdef double* g = work
    cdef double* r = work + n
    cdef double* q = work + 2 * n
    cdef double* base = work + 3 * n
    cdef double* x = work + 4 * n
    cdef double* p = work + 5 * n
    cdef double* rate = work + 6 * n
    cdef char* adm = <char*> (iwork + n)
    cdef double total = 0.0, resid, left
    cdef int c, i, j
    for c in range(k):
        g[2 * c] = gs[c]
        g[2 * c + 1] = gw[c]
        r[2 * c] = rs[c]
        r[2 * c + 1] = rw[c]
    for i in range(n):
        q[i] = (pow(2.0, 2.0 * r[i]) - 1.0) / g[i]
        total += q[i]
        p[i] = 0.0; rate[i] = 0.0; adm[i] = 0
    if total <= budget + TOL:
        resid = budget - total
        if resid < 0.0:
            resid = 0.0
        for i in range(n):
            base[i] = 1.0 / g[i] + q[i]
        _wf(n, base, resid, x, iwork)
        for i in range(n):
            p[i] = q[i] + x[i]
            rate[i] = 0.5 * log2(1.0 + p[i] * g[i])
            adm[i] = rate[i] >= r[i] - TOL
    else:
        _argsort_desc(n, g, iwork)
        left = budget
        for j in range(n):
            i = iwork[j]
            if q[i] > left + TOL:
                break
            left -= q[i]
            p[i] = q[i]
            rate[i] = 0.5 * log2(1.0 + p[i] * g[i])
            adm[i] = 1
    for c in range(k):
        ps[c] = p[2 * c]; pw[c] = p[2 * c + 1]
        ra_s[c] = rate[2 * c]; ra_w[c] = rate[2 * c + 1]
        adm_s[c] = adm[2 * c]; adm_w[c] = adm[2 * c + 1]


cdef void _allocate(int scheme, int k, const double* gs, const double* gw,
                    const double* rs, const double* rw, double budget,
                    double* ps, double* pw, double* ra_s, double* ra_w,
                    char* adm_s, char* adm_w, double* work,
                    int* iwork, double lone_share) noexcept nogil:
    cdef int c
    cdef double b
    cdef double out[4]
    cdef char a[2]
    if scheme == 0 or scheme == 2:
        b = budget / k
        for c in range(k):
            if scheme == 0:
                _e_noma_cluster(gs[c], gw[c], rs[c], rw[c], b, out, a)
            else:
                _e_oma_cluster(gs[c], gw[c], rs[c], rw[c], b, lone_share, out, a)
            ps[c] = out[0]; pw[c] = out[1]; ra_s[c] = out[2]; ra_w[c] = out[3]
            adm_s[c] = a[0]; adm_w[c] = a[1]
    elif scheme == 1:
        _c_noma(k, gs, gw, rs, rw, budget, ps, pw, ra_s, ra_w, adm_s, adm_w,
                work, iwork)
    else:
        _c_oma(k, gs, gw, rs, rw, budget, ps, pw, ra_s, ra_w, adm_s, adm_w,
               work, iwork)


def water_fill_levels(base, double budget):
    cdef double[::1] b = np.ascontiguousarray(base, dtype=np.float64)
    cdef int n = b.shape[0]
    x = np.zeros(n, dtype=np.float64)
    cdef double[::1] xv = x
    cdef int* order = <int*> malloc((n + 1) * sizeof(int))
    cdef double mu
    try:
        mu = _wf(n, &b[0] if n else NULL, budget, &xv[0] if n else NULL, order)
    finally:
        free(order)
    return x.tolist(), mu


def allocate(int scheme, gs, gw, rs, rw, double budget, bint lone_full_band=True):
    if scheme < 0 or scheme > 3:
        raise ValueError(f"unknown scheme code {scheme}")
    cdef double[::1] g_s = np.ascontiguousarray(gs, dtype=np.float64)
    cdef double[::1] g_w = np.ascontiguousarray(gw, dtype=np.float64)
    cdef double[::1] r_s = np.ascontiguousarray(rs, dtype=np.float64)
    cdef double[::1] r_w = np.ascontiguousarray(rw, dtype=np.float64)
    cdef int k = g_s.shape[0]
    outf = np.zeros((4, k), dtype=np.float64)
    outb = np.zeros((2, k), dtype=np.int8)
    cdef double[:, ::1] f = outf
    cdef signed char[:, ::1] a = outb
    cdef double* work = <double*> malloc((14 * k + 1) * sizeof(double))
    cdef int* iwork = <int*> malloc((4 * k + 1) * sizeof(int))
    try:
        _allocate(scheme, k, &g_s[0], &g_w[0], &r_s[0], &r_w[0], budget,
                  &f[0, 0], &f[1, 0], &f[2, 0], &f[3, 0],
                  <char*> &a[0, 0], <char*> &a[1, 0], work, iwork,
                  1.0 if lone_full_band else 0.5)
    finally:
        free(work)
        free(iwork)
    return (outf[0].tolist(), outf[1].tolist(), outf[2].tolist(),
            outf[3].tolist(), [bool(v) for v in outb[0]],
            [bool(v) for v in outb[1]])


def sweep(gs, gw, double rs, double rw, budgets, bint lone_full_band=True):
    cdef double[:, ::1] g_s = np.ascontiguousarray(gs, dtype=np.float64)
    cdef double[:, ::1] g_w = np.ascontiguousarray(gw, dtype=np.float64)
    cdef double[::1] bud = np.ascontiguousarray(budgets, dtype=np.float64)
    cdef int n_t = g_s.shape[0], k = g_s.shape[1], n_p = bud.shape[0]
    out_s = np.zeros((n_p, n_t, 4), dtype=np.int32)
    out_w = np.zeros((n_p, n_t, 4), dtype=np.int32)
    srate = np.zeros((n_p, n_t, 4), dtype=np.float64)
    cdef int[:, :, ::1] os_ = out_s
    cdef int[:, :, ::1] ow = out_w
    cdef double[:, :, ::1] sr = srate
    cdef double* work = <double*> malloc((14 * k + 8 * k + 1) * sizeof(double))
    cdef int* iwork = <int*> malloc((4 * k + 1) * sizeof(int))
    cdef char* flags = <char*> malloc(2 * k + 1)
    cdef double* rsv = work + 14 * k
    cdef double* rwv = work + 15 * k
    cdef double* pbuf = work + 16 * k
    cdef double lone_share = 1.0 if lone_full_band else 0.5
    cdef int t, ip, s, c, no_s, no_w
    cdef double tot
    try:
        with nogil:
            for c in range(k):
                rsv[c] = rs
                rwv[c] = rw
            for t in range(n_t):
                for ip in range(n_p):
                    for s in range(4):
                        _allocate(s, k, &g_s[t, 0], &g_w[t, 0], rsv, rwv,
                                  bud[ip], pbuf, pbuf + k, pbuf + 2 * k,
                                  pbuf + 3 * k, flags, flags + k, work, iwork,
                                  lone_share)
                        no_s = 0
                        no_w = 0
                        tot = 0.0
                        for c in range(k):
                            if flags[c]:
                                tot += pbuf[2 * k + c]
                            else:
                                no_s += 1
                            if flags[k + c]:
                                tot += pbuf[3 * k + c]
                            else:
                                no_w += 1
                        os_[ip, t, s] = no_s
                        ow[ip, t, s] = no_w
                        sr[ip, t, s] = tot
    finally:
        free(work)
        free(iwork)
        free(flags)
    return out_s, out_w, srate

"""Fused compiled kernels for the separable-network jet sweep.

The numpy implementation in :mod:`duosolve.network` spends most of a
training step launching ~300 elementwise passes over (P, D, N) arrays.
These kernels do the same arithmetic in a handful of fused sweeps.  The
sine/cosine pair uses the same Cody-Waite plus Taylor construction as
``network._sincos`` so the two routes agree to accumulation error, which
the tests assert.

Everything lives in a transposed (..., N, P) layout with the collocation
point axis innermost: batches run to thousands of points while N is a few
dozen, so loops over P amortize their setup and vectorize, while loops
over N would spend most of their time in prologues.  Reductions over P
use a fixed-order four-accumulator pattern (:func:`_dot4`), which breaks
the dependence chain without reassociating sums differently from run to
run.

Determinism: every loop is sequential with a fixed iteration order,
``fastmath`` stays off, and nothing here depends on thread counts.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# pi/2 split into 33-bit chunks so quad * _HPA is exact for |quad| < 2^20.
_HPA = 1.57079632673412561417e+00
_HPB = 6.07710050630396597660e-11
_HPC = 2.02226624879595063154e-21
_TWO_OVER_PI = 0.63661977236758138243
# Taylor tails in z = r^2 for r in [-pi/4, pi/4]; truncation < 5e-17.
_S1, _S2, _S3, _S4 = -1.0 / 6, 1.0 / 120, -1.0 / 5040, 1.0 / 362880
_S5, _S6, _S7 = -1.0 / 39916800, 1.0 / 6227020800, -1.0 / 1307674368000
_C1, _C2, _C3, _C4 = -0.5, 1.0 / 24, -1.0 / 720, 1.0 / 40320
_C5, _C6, _C7 = -1.0 / 3628800, 1.0 / 479001600, -1.0 / 87178291200


@njit(cache=True, inline="always")
def _sincos1(a):
    """Branch-light scalar sin/cos pair; vectorizes across callers' loops."""
    quad = np.rint(a * _TWO_OVER_PI)
    r = a - quad * _HPA
    r -= quad * _HPB
    r -= quad * _HPC
    z = r * r
    ps = ((((((_S7 * z + _S6) * z + _S5) * z + _S4) * z + _S3) * z + _S2) * z + _S1)
    sr = r + r * z * ps
    pc = ((((((_C7 * z + _C6) * z + _C5) * z + _C4) * z + _C3) * z + _C2) * z + _C1)
    cr = 1.0 + z * pc
    qi = np.int64(quad)
    odd = qi & 1
    sv = cr if odd == 1 else sr
    cv = sr if odd == 1 else cr
    if (qi >> 1) & 1 == 1:
        sv = -sv
    if ((qi + 1) >> 1) & 1 == 1:
        cv = -cv
    return sv, cv


@njit(cache=True, inline="always")
def _dot4(a, b):
    """Fixed-order dot product with four lanes to hide FP add latency."""
    n = a.shape[0]
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    s3 = 0.0
    i = 0
    while i + 4 <= n:
        s0 += a[i] * b[i]
        s1 += a[i + 1] * b[i + 1]
        s2 += a[i + 2] * b[i + 2]
        s3 += a[i + 3] * b[i + 3]
        i += 4
    while i < n:
        s0 += a[i] * b[i]
        i += 1
    return (s0 + s1) + (s2 + s3)


@njit(cache=True, inline="always")
def _sum4(a):
    n = a.shape[0]
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    s3 = 0.0
    i = 0
    while i + 4 <= n:
        s0 += a[i]
        s1 += a[i + 1]
        s2 += a[i + 2]
        s3 += a[i + 3]
        i += 4
    while i < n:
        s0 += a[i]
        i += 1
    return (s0 + s1) + (s2 + s3)


@njit(cache=True)
def fill_factors(arg, th, om, w, max_m, f, s, g, sn, cs, p1a):
    """Per-dimension factor jets for the whole batch.

    arg/th are (D, N, P): the sine arguments and tanh(z/2) of the sigmoid
    arguments.  f/s/g receive orders 0..max_m of the sine, sigmoid and
    product families, laid out (4, D, N, P); sn/cs/p1a keep the raw pieces
    the backward chain reuses.
    """
    D, N, P = arg.shape
    for j in range(D):
        for k in range(N):
            argr = arg[j, k]
            thr = th[j, k]
            snr = sn[j, k]
            csr = cs[j, k]
            p1r = p1a[j, k]
            f0 = f[0, j, k]
            s0 = s[0, j, k]
            g0 = g[0, j, k]
            for p in range(P):
                sv, cv = _sincos1(argr[p])
                t = thr[p]
                snr[p] = sv
                csr[p] = cv
                p1r[p] = 0.25 * (1.0 - t * t)  # = sigmoid * (1 - sigmoid)
                sgv = 0.5 + 0.5 * t
                f0[p] = sv
                s0[p] = sgv
                g0[p] = sv * sgv
            if max_m >= 1:
                ov = om[j, k]
                wv = w[j, k]
                f1 = f[1, j, k]
                s1 = s[1, j, k]
                g1 = g[1, j, k]
                for p in range(P):
                    f1[p] = ov * csr[p]
                    s1[p] = wv * p1r[p]
                    g1[p] = f1[p] * s0[p] + f0[p] * s1[p]
            if max_m >= 2:
                ov = om[j, k]
                wv = w[j, k]
                f1 = f[1, j, k]
                s1 = s[1, j, k]
                f2 = f[2, j, k]
                s2 = s[2, j, k]
                g2 = g[2, j, k]
                o2 = ov * ov
                w2 = wv * wv
                for p in range(P):
                    f2[p] = -o2 * snr[p]
                    s2[p] = -w2 * p1r[p] * thr[p]
                    g2[p] = f2[p] * s0[p] + 2.0 * f1[p] * s1[p] + f0[p] * s2[p]
            if max_m >= 3:
                ov = om[j, k]
                wv = w[j, k]
                f1 = f[1, j, k]
                s1 = s[1, j, k]
                f2 = f[2, j, k]
                s2 = s[2, j, k]
                f3 = f[3, j, k]
                s3 = s[3, j, k]
                g3 = g[3, j, k]
                o3 = ov * ov * ov
                w3 = wv * wv * wv
                for p in range(P):
                    f3[p] = -o3 * csr[p]
                    s3[p] = w3 * p1r[p] * (1.0 - 6.0 * p1r[p])
                    g3[p] = (f3[p] * s0[p] + 3.0 * f2[p] * s1[p]
                             + 3.0 * f1[p] * s2[p] + f0[p] * s3[p])


@njit(cache=True)
def forward(om, w, d, avec, alphas, f, s, g, outT):
    """Contract factor jets to outT[ia, l, p], all requested partials."""
    A = alphas.shape[0]
    n_o = d.shape[0]
    D = f.shape[1]
    N = f.shape[2]
    P = f.shape[3]
    bf = np.empty((N, P))
    bs = np.empty((N, P))
    bg = np.empty((N, P))
    for ia in range(A):
        order = 0
        for j in range(D):
            order += alphas[ia, j]
        if D > 1:
            a0 = alphas[ia, 0]
            for k in range(N):
                fr = f[a0, 0, k]
                sr = s[a0, 0, k]
                gr = g[a0, 0, k]
                bfr = bf[k]
                bsr = bs[k]
                bgr = bg[k]
                for p in range(P):
                    bfr[p] = fr[p]
                    bsr[p] = sr[p]
                    bgr[p] = gr[p]
            for j in range(1, D):
                mj = alphas[ia, j]
                for k in range(N):
                    fr = f[mj, j, k]
                    sr = s[mj, j, k]
                    gr = g[mj, j, k]
                    bfr = bf[k]
                    bsr = bs[k]
                    bgr = bg[k]
                    for p in range(P):
                        bfr[p] *= fr[p]
                        bsr[p] *= sr[p]
                        bgr[p] *= gr[p]
        for l in range(n_o):
            dr = d[l]
            out = outT[ia, l]
            seed = avec[l] if order == 0 else 0.0
            for p in range(P):
                out[p] = seed
            m0 = alphas[ia, 0]
            for k in range(N):
                cf = dr[k]
                cv = dr[N + k]
                cg = dr[2 * N + k]
                if D == 1:
                    fr = f[m0, 0, k]
                    sr = s[m0, 0, k]
                    gr = g[m0, 0, k]
                    for p in range(P):
                        out[p] += fr[p] * cf + sr[p] * cv + gr[p] * cg
                else:
                    bfr = bf[k]
                    bsr = bs[k]
                    bgr = bg[k]
                    for p in range(P):
                        out[p] += bfr[p] * cf + bsr[p] * cv + bgr[p] * cg


@njit(cache=True)
def backward(XT, th, om, w, d, alphas, max_m, cotT,
             f, s, g, sn, cs, p1a, fb, sb, gb,
             g_om, g_ph, g_w, g_b, g_d, g_a):
    """Accumulate exact parameter gradients for cotangents cotT[ia, l, p].

    Rows for partials that carry no cotangent are zero, which contributes
    nothing.  f/s/g/sn/cs/p1a come straight from :func:`fill_factors` for
    the same batch; fb/sb/gb are caller-recycled scratch of the same shape;
    the g_* outputs must arrive zeroed.
    """
    D = f.shape[1]
    N = f.shape[2]
    P = f.shape[3]
    n_o = d.shape[0]
    A = alphas.shape[0]
    # First alpha to touch each (order, dimension) deposit row overwrites it,
    # so only rows no alpha reaches need explicit zeroing.
    first = np.full((max_m + 1, D), -1, dtype=np.int64)
    for ia in range(A):
        for j in range(D):
            m = alphas[ia, j]
            if first[m, j] < 0:
                first[m, j] = ia
    for m in range(max_m + 1):
        for j in range(D):
            if first[m, j] >= 0:
                continue
            for k in range(N):
                fr = fb[m, j, k]
                sr = sb[m, j, k]
                gr = gb[m, j, k]
                for p in range(P):
                    fr[p] = 0.0
                    sr[p] = 0.0
                    gr[p] = 0.0
    tf = np.empty(P)
    ts = np.empty(P)
    tg = np.empty(P)
    lf = np.empty(P)
    ls = np.empty(P)
    lg = np.empty(P)
    for ia in range(A):
        order = 0
        for j in range(D):
            order += alphas[ia, j]
        if order == 0:
            for l in range(n_o):
                g_a[l] += _sum4(cotT[ia, l])
        if D == 1 and n_o == 1:
            # Deposits reduce to the cotangent scaled by one amplitude
            # entry; fold them into the amplitude-gradient pass.
            m0 = alphas[ia, 0]
            c0 = cotT[ia, 0]
            d0 = d[0]
            fresh = first[m0, 0] == ia
            for k in range(N):
                g_d[0, k] += _dot4(c0, f[m0, 0, k])
                g_d[0, N + k] += _dot4(c0, s[m0, 0, k])
                g_d[0, 2 * N + k] += _dot4(c0, g[m0, 0, k])
                vf = d0[k]
                vs = d0[N + k]
                vg = d0[2 * N + k]
                fr = fb[m0, 0, k]
                sr = sb[m0, 0, k]
                gr = gb[m0, 0, k]
                if fresh:
                    for p in range(P):
                        fr[p] = c0[p] * vf
                        sr[p] = c0[p] * vs
                        gr[p] = c0[p] * vg
                else:
                    for p in range(P):
                        fr[p] += c0[p] * vf
                        sr[p] += c0[p] * vs
                        gr[p] += c0[p] * vg
            continue
        for k in range(N):
            # Cotangent against the amplitude row: tf/ts/tg[p] are
            # dL/d(branch product k at point p) for this alpha.
            c0 = cotT[ia, 0]
            d0 = d[0]
            vf = d0[k]
            vs = d0[N + k]
            vg = d0[2 * N + k]
            for p in range(P):
                tf[p] = c0[p] * vf
                ts[p] = c0[p] * vs
                tg[p] = c0[p] * vg
            for l in range(1, n_o):
                cl = cotT[ia, l]
                dl = d[l]
                vf = dl[k]
                vs = dl[N + k]
                vg = dl[2 * N + k]
                for p in range(P):
                    tf[p] += cl[p] * vf
                    ts[p] += cl[p] * vs
                    tg[p] += cl[p] * vg
            # Amplitude gradient needs the full branch products.
            if D == 1:
                m0 = alphas[ia, 0]
                for l in range(n_o):
                    cl = cotT[ia, l]
                    g_d[l, k] += _dot4(cl, f[m0, 0, k])
                    g_d[l, N + k] += _dot4(cl, s[m0, 0, k])
                    g_d[l, 2 * N + k] += _dot4(cl, g[m0, 0, k])
                fr = fb[m0, 0, k]
                sr = sb[m0, 0, k]
                gr = gb[m0, 0, k]
                if first[m0, 0] == ia:
                    for p in range(P):
                        fr[p] = tf[p]
                        sr[p] = ts[p]
                        gr[p] = tg[p]
                else:
                    for p in range(P):
                        fr[p] += tf[p]
                        sr[p] += ts[p]
                        gr[p] += tg[p]
            else:
                a0 = alphas[ia, 0]
                fr = f[a0, 0, k]
                sr = s[a0, 0, k]
                gr = g[a0, 0, k]
                for p in range(P):
                    lf[p] = fr[p]
                    ls[p] = sr[p]
                    lg[p] = gr[p]
                for j in range(1, D):
                    mj = alphas[ia, j]
                    fr = f[mj, j, k]
                    sr = s[mj, j, k]
                    gr = g[mj, j, k]
                    for p in range(P):
                        lf[p] *= fr[p]
                        ls[p] *= sr[p]
                        lg[p] *= gr[p]
                for l in range(n_o):
                    cl = cotT[ia, l]
                    g_d[l, k] += _dot4(cl, lf)
                    g_d[l, N + k] += _dot4(cl, ls)
                    g_d[l, 2 * N + k] += _dot4(cl, lg)
                # Deposit onto each dimension's factor with the
                # leave-one-out product over the other dimensions.
                for j in range(D):
                    mj = alphas[ia, j]
                    for p in range(P):
                        lf[p] = tf[p]
                        ls[p] = ts[p]
                        lg[p] = tg[p]
                    for j2 in range(D):
                        if j2 == j:
                            continue
                        m2 = alphas[ia, j2]
                        fr = f[m2, j2, k]
                        sr = s[m2, j2, k]
                        gr = g[m2, j2, k]
                        for p in range(P):
                            lf[p] *= fr[p]
                            ls[p] *= sr[p]
                            lg[p] *= gr[p]
                    fr = fb[mj, j, k]
                    sr = sb[mj, j, k]
                    gr = gb[mj, j, k]
                    if first[mj, j] == ia:
                        for p in range(P):
                            fr[p] = lf[p]
                            sr[p] = ls[p]
                            gr[p] = lg[p]
                    else:
                        for p in range(P):
                            fr[p] += lf[p]
                            sr[p] += ls[p]
                            gr[p] += lg[p]
    # Product-family cotangents distribute onto the factor families
    # through the Leibniz forms g_m = sum_i binom(m, i) f_{m-i} s_i.
    for m in range(max_m + 1):
        for i in range(m + 1):
            coeff = 1.0
            if m == 2 and i == 1:
                coeff = 2.0
            elif m == 3 and (i == 1 or i == 2):
                coeff = 3.0
            for j in range(D):
                for k in range(N):
                    gr = gb[m, j, k]
                    fr = fb[m - i, j, k]
                    sr = sb[i, j, k]
                    svr = s[i, j, k]
                    fvr = f[m - i, j, k]
                    for p in range(P):
                        gv = coeff * gr[p]
                        fr[p] += gv * svr[p]
                        sr[p] += gv * fvr[p]
    # Sine family chain: f_m = om^m T_m(arg), T = (sin, cos, -sin, -cos).
    dphi = np.empty(P)
    dom = np.empty(P)
    for j in range(D):
        xr = XT[j]
        for k in range(N):
            snr = sn[j, k]
            csr = cs[j, k]
            ov = om[j, k]
            fb0 = fb[0, j, k]
            for p in range(P):
                v = fb0[p] * csr[p]
                dphi[p] = v
                dom[p] = v * xr[p]
            if max_m >= 1:
                fb1 = fb[1, j, k]
                for p in range(P):
                    t1 = -ov * snr[p]           # d f_1 / d phi
                    dphi[p] += fb1[p] * t1
                    dom[p] += fb1[p] * (csr[p] + t1 * xr[p])
            if max_m >= 2:
                fb2 = fb[2, j, k]
                o2 = ov * ov
                for p in range(P):
                    t2 = -o2 * csr[p]
                    dphi[p] += fb2[p] * t2
                    dom[p] += fb2[p] * (-2.0 * ov * snr[p] + t2 * xr[p])
            if max_m >= 3:
                fb3 = fb[3, j, k]
                o2 = ov * ov
                o3 = o2 * ov
                for p in range(P):
                    t3 = o3 * snr[p]
                    dphi[p] += fb3[p] * t3
                    dom[p] += fb3[p] * (-3.0 * o2 * csr[p] + t3 * xr[p])
            g_ph[j, k] += _sum4(dphi)
            g_om[j, k] += _sum4(dom)
    # Sigmoid family chain through the tanh half-angle: with t = tanh(z/2),
    # sigma(1-sigma) = (1 - t^2)/4, 1 - 2 sigma = -t, q3 = 1 - 6 p1.
    db = dphi
    dw = dom
    for j in range(D):
        xr = XT[j]
        for k in range(N):
            thr = th[j, k]
            p1r = p1a[j, k]
            wv = w[j, k]
            sb0 = sb[0, j, k]
            for p in range(P):
                v = sb0[p] * p1r[p]
                db[p] = v
                dw[p] = v * xr[p]
            if max_m >= 1:
                sb1 = sb[1, j, k]
                for p in range(P):
                    z1 = -wv * thr[p] * p1r[p]  # d s_1 / d b
                    db[p] += sb1[p] * z1
                    dw[p] += sb1[p] * (p1r[p] + z1 * xr[p])
            if max_m >= 2:
                sb2 = sb[2, j, k]
                w2 = wv * wv
                for p in range(P):
                    q3 = 1.0 - 6.0 * p1r[p]
                    z2 = w2 * q3 * p1r[p]
                    db[p] += sb2[p] * z2
                    dw[p] += sb2[p] * (-2.0 * wv * p1r[p] * thr[p] + z2 * xr[p])
            if max_m >= 3:
                sb3 = sb[3, j, k]
                w2 = wv * wv
                w3 = w2 * wv
                for p in range(P):
                    q1 = p1r[p]
                    q3 = 1.0 - 6.0 * q1
                    z3 = w3 * (-thr[p]) * (2.0 * q3 - 1.0) * q1
                    db[p] += sb3[p] * z3
                    dw[p] += sb3[p] * (3.0 * w2 * q1 * q3 + z3 * xr[p])
            g_b[j, k] += _sum4(db)
            g_w[j, k] += _sum4(dw)

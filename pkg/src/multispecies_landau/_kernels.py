"""Compiled pair-grid quadratures.

Every kernel loops over ordered node pairs ``(v, v_*)`` with ``v != v_*`` and
returns one partial sum per outer node ``v``; callers reduce the partials in a
fixed order, so results do not depend on the thread count.
"""

import numba
import numpy as np
from numba import prange

FISHER, PARALLEL, RADIAL, SPHERICAL, REMAINDER = range(5)


@numba.njit(parallel=True, cache=True)
def fisher_pair_terms(x, fi, fj, ai, aj, Hi, Hj, pairs, mi, mj, gamma):
    """Integrands of the Fisher dissipation and of its four-part regrouping.

    Column FISHER holds the rotation-derivative form
    ``-alpha/m_i |grad_v G + ...|^2 - alpha/m_j |grad_v* G - ...|^2 + remainder``,
    the other columns the parallel, radial, spherical and remainder parts with
    their Cartesian mass prefactors (couplings excluded).
    """
    n, d = x.shape
    nk = pairs.shape[0]
    out = np.zeros((n, 5))
    msum = mi + mj
    mred = msum / (mi * mj)
    for v in prange(n):
        w = np.empty(d)
        b = np.empty(d)
        Kai = np.empty(d)
        Kaj = np.empty(d)
        gv = np.empty(d)
        gs = np.empty(d)
        acc = np.zeros(5)
        for s in range(n):
            if s == v:
                continue
            F = fi[v] * fj[s]
            if F == 0.0:
                continue
            r2 = 0.0
            for a in range(d):
                w[a] = x[v, a] - x[s, a]
                r2 += w[a] * w[a]
            r = np.sqrt(r2)
            alpha = r2 ** (0.5 * gamma)
            for k in range(nk):
                p = pairs[k, 0]
                q = pairs[k, 1]
                for a in range(d):
                    b[a] = 0.0
                    Kai[a] = 0.0
                    Kaj[a] = 0.0
                b[p] = w[q]
                b[q] = -w[p]
                Kai[p] = ai[v, q]
                Kai[q] = -ai[v, p]
                Kaj[p] = aj[s, q]
                Kaj[q] = -aj[s, p]
                G = 0.0
                for a in range(d):
                    G += b[a] * (ai[v, a] / mi - aj[s, a] / mj)
                for a in range(d):
                    hib = 0.0
                    hjb = 0.0
                    for c in range(d):
                        hib += Hi[v, a, c] * b[c]
                        hjb += Hj[s, a, c] * b[c]
                    gv[a] = (-Kai[a] + hib) / mi + Kaj[a] / mj
                    gs[a] = Kai[a] / mi - (Kaj[a] + hjb) / mj
                # Prop. form: Phi = sqrt(alpha) G, grad sqrt(alpha) = (gamma/2) sqrt(alpha) w / r^2
                cg = 0.5 * gamma * G / r2
                nv = 0.0
                ns = 0.0
                nz = 0.0
                sg = 0.0
                nrel = 0.0
                for a in range(d):
                    tv = gv[a] + cg * w[a]
                    ts = gs[a] - cg * w[a]
                    nv += tv * tv
                    ns += ts * ts
                    gz = gv[a] + gs[a]
                    nz += gz * gz
                    grel = (mj * gv[a] - mi * gs[a]) / msum
                    nrel += grel * grel
                    sg += grel * w[a] / r
                rem = mred * gamma * gamma * alpha / (4.0 * r2) * G * G
                acc[FISHER] += F * (-alpha * nv / mi - alpha * ns / mj + rem)
                acc[PARALLEL] += F * alpha * nz / msum
                rad = 0.5 * gamma * G / r + sg
                acc[RADIAL] += F * mred * alpha * rad * rad
                acc[SPHERICAL] += F * mred * alpha * (nrel - sg * sg)
                acc[REMAINDER] += F * rem
        for c in range(5):
            out[v, c] = acc[c]
    return out


@numba.njit(parallel=True, cache=True)
def xi_pair_terms(x, fi, fj, ai, aj, yi, yj, mi, mj, gamma):
    """``alpha F (g_i - g_j^*) . A (y_i - y_j^*)`` summed over ``v_*`` for every ``v``.

    ``g = grad(log f) / m`` and ``y`` is the (already mass-scaled) gradient of
    the Xi field.
    """
    n, d = x.shape
    out = np.zeros(n)
    for v in prange(n):
        acc = 0.0
        for s in range(n):
            if s == v:
                continue
            F = fi[v] * fj[s]
            if F == 0.0:
                continue
            r2 = 0.0
            uy = 0.0
            wu = 0.0
            wy = 0.0
            for a in range(d):
                wa = x[v, a] - x[s, a]
                ua = ai[v, a] / mi - aj[s, a] / mj
                ya = yi[v, a] - yj[s, a]
                r2 += wa * wa
                uy += ua * ya
                wu += wa * ua
                wy += wa * ya
            acc += F * r2 ** (0.5 * gamma) * (r2 * uy - wu * wy)
        out[v] = acc
    return out


@numba.njit(parallel=True, cache=True)
def entropy_pair_terms(x, fi, fj, ai, aj, mi, mj, gamma):
    """``alpha F A : (u (x) u)`` summed over ``v_*``, ``u = g_i - g_j^*``."""
    n, d = x.shape
    out = np.zeros(n)
    for v in prange(n):
        acc = 0.0
        for s in range(n):
            if s == v:
                continue
            F = fi[v] * fj[s]
            if F == 0.0:
                continue
            r2 = 0.0
            uu = 0.0
            wu = 0.0
            for a in range(d):
                wa = x[v, a] - x[s, a]
                ua = ai[v, a] / mi - aj[s, a] / mj
                r2 += wa * wa
                uu += ua * ua
                wu += wa * ua
            acc += F * r2 ** (0.5 * gamma) * (r2 * uu - wu * wu)
        out[v] = acc
    return out

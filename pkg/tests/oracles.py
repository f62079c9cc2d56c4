"""Brute-force reference implementations, written straight from the defining formulas.

Nothing here imports the package's numerics: products are expanded factor by
factor and series are summed term by term in mpmath at 60 digits, so agreement
with the package is a genuine cross-check.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath

DPS = 60


def poch(a, q, n):
    """(a;q)_n as an explicit product."""
    out = mpmath.mpf(1)
    for i in range(n):
        out *= 1 - a * q**i
    return out


def poch_inf(a, q, factors=400):
    """(a;q)_inf truncated after a fixed number of factors."""
    return poch(a, q, factors)


def psi(a, b, z, q, terms=200, factors=400):
    """Psi(a;b;q,z), with (b q^n;q)_inf recomputed from scratch for every term."""
    with mpmath.workdps(DPS):
        a, b, z, q = (mpmath.mpmathify(v) for v in (a, b, z, q))
        s = mpmath.mpf(0)
        for n in range(terms):
            t = poch(a, q, n) * poch_inf(b * q**n, q, factors) / poch(q, q, n)
            s += t * (-1) ** n * q ** (n * (n - 1) // 2) * z**n
        return complex(s) if isinstance(s, mpmath.mpc) else float(s)


def phi_aux(w, z, q, terms=100):
    """sum_r (w q^{2r};q^2)_inf / (q^2;q^2)_r q^{2r(r-1)} z^r."""
    with mpmath.workdps(DPS):
        w, z, q = (mpmath.mpmathify(v) for v in (w, z, q))
        Q = q * q
        s = mpmath.mpf(0)
        for r in range(terms):
            s += poch_inf(w * Q**r, Q) / poch(Q, Q, r) * q ** (2 * r * (r - 1)) * z**r
        return complex(s) if isinstance(s, mpmath.mpc) else float(s)


def psi_bound(a, k, z, q):
    """(-|a|;q)_inf (-|z|;q)_inf |z|^k q^{k(k-1)/2}."""
    with mpmath.workdps(DPS):
        q = mpmath.mpf(q)
        A, Z = abs(mpmath.mpmathify(a)), abs(mpmath.mpmathify(z))
        return float(poch_inf(-A, q) * poch_inf(-Z, q) * Z**k * q ** (k * (k - 1) // 2))


# -- lattice helpers, kept independent of the package ------------------------------


def val(pt, q):
    """(sign, exponent) -> sign * q^exponent."""
    return pt[0] * mpmath.mpf(q) ** pt[1]


def chi(pt):
    return pt[1]


def kappa(x):
    return mpmath.sign(x) * x * x


def nu(k, q):
    """nu(t) for chi(t) = k: q^{(k-1)(k-2)/2}."""
    return mpmath.mpf(q) ** ((k - 1) * (k - 2) // 2)


def s_sign(x, y):
    return -1 if (x > 0 and y < 0) else 1


def c_q(q):
    with mpmath.workdps(DPS):
        q = mpmath.mpf(q)
        return 1 / (mpmath.sqrt(2) * q * poch_inf(q * q, q * q) * poch_inf(-q * q, q * q))


@lru_cache(maxsize=None)
def a_p(p, x, y, q, terms=200):
    """a_p(x, y) from its closed form; p, x, y are (sign, exponent) pairs.

    The series runs in base q^2, so far fewer than 200 terms already reach
    60 digits near the centre of the lattice; terms can be lowered for speed.
    """
    with mpmath.workdps(DPS):
        if p[0] != x[0] * y[0]:
            return 0.0
        qm = mpmath.mpf(q)
        Q = qm * qm
        P, X, Y = val(p, q), val(x, q), val(y, q)
        pref = (
            c_q(q)
            * s_sign(X, Y)
            * (-1) ** chi(p)
            * (-mpmath.sign(Y)) ** chi(x)
            * abs(Y)
            * nu(chi(p) + chi(y) - chi(x), q)
        )
        root = mpmath.sqrt(poch_inf(-kappa(P), Q) * poch_inf(-kappa(Y), Q) / poch_inf(-kappa(X), Q))
        series = psi(-Q / kappa(Y), Q * kappa(X / Y), Q * kappa(X / P), Q, terms, 2 * terms)
        return float(pref * root * series)


def f_function(k, m, p, x, y, q):
    """F^k_{m,p}(x, y); lattice points are (sign, exponent) in powers of q^2."""
    with mpmath.workdps(DPS):
        qm = mpmath.mpf(q)
        Q = qm * qm
        yy = (p[0] * y[0], y[1] - m)
        if yy[0] < 0 and yy[1] < 1:
            return 0.0
        P, X, Y = val(p, Q), val(x, Q), val(y, Q)
        # nu(kappa^{-1}(p) q^m): kappa^{-1}(p) = sgn(p) sqrt|p|, so chi = exponent(p) + m in base q
        pref = c_q(q) ** 2 * qm ** ((m + k + 1) * (m + k + 2) // 2) * nu(p[1] + m, q)
        pref *= mpmath.sqrt(poch_inf(-P, Q))
        s1 = psi(-Q / P, Q ** (1 - m) * Y / abs(P), p[0] * Q ** (1 - m), Q)
        s2 = psi(-Q / X, p[0] * Q ** (1 + k) * Y, Q ** (1 + m + k) * X, Q)
        return float(pref * s1 * s2)


def w_star_naive(inp, q, lo=-10, hi=16, neg=10):
    """W*(f_a (x) f_b) by a plain double loop over y, z in a window of I_q.

    Only output coefficients whose three lattice labels y, z, w all lie in the
    window are produced.

    inp = ((m1, p1, t1), (m2, p2, t2)) with points as (sign, exponent); the
    result maps ((m, p, t), (m', p', t')) to its coefficient.
    """
    (m1, p1, t1), (m2, p2, t2) = inp
    pts = [(1, k) for k in range(lo, hi + 1)] + [(-1, k) for k in range(1, neg + 1)]
    out: dict = {}
    for y in pts:
        c1 = a_p(t2, p1, y, q, 60)
        if c1 == 0:
            continue
        c1 *= float(mpmath.mpf(q) ** (t2[1] - y[1]))
        for z in pts:
            w = (p2[0] * t2[0] * y[0] * z[0] * p1[0], y[1] + z[1] - p1[1] + m2)
            if w not in pts:  # keep every coefficient inside the region where 60 digits suffice
                continue
            c2 = a_p(p2, z, w, q, 60)
            if c2 == 0:
                continue
            k = p1[1] + p2[1] - t2[1] - z[1]
            key = ((m1 + m2 - k, z, t1), (k, w, y))
            out[key] = out.get(key, 0.0) + c1 * c2
    return out

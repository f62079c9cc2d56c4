"""q-shifted factorials, Psi-series, the phi auxiliary series and 2phi1.

Every series returns a SeriesValue carrying a rigorous-in-exact-arithmetic
tail majorant as ``error_bound``.  Residuals of identities use the scale
|L - R| / (1 + |L| + |R|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

from .qlattice import QParam

Number = Union[float, complex]

DEFAULT_TOL = 1e-14
N_MIN = 5
_SNAP = 1e-11
_MAX_TERMS = 10_000
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class SeriesValue:
    value: Number
    error_bound: float
    terms: int

    def __post_init__(self) -> None:
        if self.error_bound < 0 or self.terms < 1:
            raise ValueError("SeriesValue needs error_bound >= 0 and terms >= 1")

    def __float__(self) -> float:
        return float(self.value.real) if isinstance(self.value, complex) else float(self.value)


def _base(base: QParam | float) -> float:
    if isinstance(base, QParam):
        return base.base
    if not (0.0 < base < 1.0):
        raise ValueError(f"base must lie in (0, 1), got {base!r}")
    return float(base)


def _check_tol(tol: float) -> None:
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")


def _tidy(x: complex) -> Number:
    return x.real if x.imag == 0 else x


def q_exponent(x: Number, q: float) -> int | None:
    """Return j when x equals q**j up to rounding, else None."""
    if isinstance(x, complex):
        if x.imag != 0:
            return None
        x = x.real
    if x <= 0:
        return None
    j = math.log(x) / math.log(q)
    r = round(j)
    if abs(j - r) <= _SNAP * max(1.0, abs(j)):
        return int(r)
    return None


class _Factor:
    """Evaluates 1 - x q^i with exact zeros when x q^i == 1 on the nose."""

    __slots__ = ("x", "q", "j")

    def __init__(self, x: Number, q: float) -> None:
        self.x = x
        self.q = q
        self.j = q_exponent(x, q)

    def __call__(self, i: int) -> Number:
        if self.j is not None and self.j + i == 0:
            return 0.0
        return 1.0 - self.x * self.q ** i

    def vanishes_from(self) -> int | None:
        """Smallest index at which the infinite product from there on is nonzero,
        when some factor vanishes (x in q^{-N0})."""
        if self.j is not None and self.j <= 0:
            return -self.j
        return None


def poch_finite(a: Number, n: int, base: QParam | float) -> Number:
    """(a;q)_n for n >= 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    q = _base(base)
    f = _Factor(a, q)
    out: Number = 1.0
    for i in range(n):
        out *= f(i)
    return out


def poch_inf(a: Number, base: QParam | float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """(a;q)_infinity with the product tail bounded by exp(|a| q^n/(1-q)) - 1."""
    _check_tol(tol)
    q = _base(base)
    f = _Factor(a, q)
    v = f.vanishes_from()
    if v is not None:
        return SeriesValue(0.0, 0.0, v + 1)
    aa = abs(a)
    out: Number = 1.0
    n = 0
    while True:
        e = aa * q ** n / (1.0 - q)
        tail = math.expm1(e) if e < 700.0 else math.inf
        if tail * abs(out) <= tol * max(abs(out), 1e-300) or n >= _MAX_TERMS:
            break
        out *= f(n)
        n += 1
    return SeriesValue(_tidy(complex(out)), tail * abs(out), max(n, 1))


def poch_inf_value(a: Number, base: QParam | float, tol: float = DEFAULT_TOL) -> Number:
    return poch_inf(a, base, tol).value


def _sum_with_majorant(
    terms: Sequence[Number], tails: Sequence[float], tol: float, extra: float = 0.0
) -> SeriesValue:
    """Pick the first n >= N_MIN whose tail majorant meets tol * (1 + |S_n|)."""
    s: Number = 0.0
    n_last = len(terms) - 1
    for n, t in enumerate(terms):
        s += t
        if n >= min(N_MIN, n_last) and tails[n] < tol * (1.0 + abs(s)):
            return SeriesValue(_tidy(complex(s)), tails[n] + extra, n + 1)
    return SeriesValue(_tidy(complex(s)), tails[n_last] + extra, n_last + 1)


def psi(
    a: Number, b: Number, z: Number, base: QParam | float, tol: float = DEFAULT_TOL, rel_tol: float = 0.0
) -> SeriesValue:
    """Psi(a;b;q,z) = sum_n (a;q)_n (b q^n;q)_inf / (q;q)_n (-1)^n q^{n(n-1)/2} z^n.

    tol bounds the absolute error (relative to 1 + |S|).  With rel_tol > 0 a
    result whose error estimate exceeds rel_tol * |value| (cancellation among
    the terms) is recomputed with mpmath at the working precision it needs.
    """
    _check_tol(tol)
    q = _base(base)
    fa = _Factor(a, q)
    fb = _Factor(b, q)
    qq_inf = poch_inf_value(q, q)
    big_c = poch_inf_value(-abs(b), q) / qq_inf
    az = abs(z)
    aa = abs(a)
    # majorant M_j = C (-|a|;q)_j q^{j(j-1)/2} |z|^j, ratio r_j = (1+|a|q^j) q^j |z|
    maj = [big_c]
    tails: list[float] = []
    n = 0
    while True:
        r_next = (1.0 + aa * q ** (n + 1)) * q ** (n + 1) * az
        m_next = maj[n] * (1.0 + aa * q ** n) * q ** n * az
        tail = m_next / (1.0 - r_next) if r_next < 1.0 else math.inf
        tails.append(tail)
        if (tail < tol and n >= N_MIN) or az == 0.0 or n >= _MAX_TERMS:
            break
        maj.append(m_next)
        n += 1
    top = n
    pb = poch_inf(b * q ** top if fb.j is None else _shifted(b, q, top), q, tol * 1e-2)
    p_vals: list[Number] = [0.0] * (top + 1)
    p_vals[top] = pb.value
    for i in range(top - 1, -1, -1):
        p_vals[i] = fb(i) * p_vals[i + 1]
    rel_p = pb.error_bound / abs(pb.value) if pb.value != 0 else 0.0
    terms: list[Number] = []
    pa: Number = 1.0
    qn: Number = 1.0
    zpow: Number = 1.0
    for i in range(top + 1):
        terms.append(pa * p_vals[i] / qn * zpow)
        pa *= fa(i)
        qn *= 1.0 - q ** (i + 1)
        zpow *= -(q ** i) * z
    extra = rel_p * sum(abs(t) for t in terms)
    sv = _sum_with_majorant(terms, tails, tol, extra)
    if rel_tol and not sv.error_bound + 8 * sv.terms * _EPS * sum(map(abs, terms)) <= rel_tol * abs(sv.value):
        return _psi_mp(a, b, z, q, rel_tol, sum(map(abs, terms)), sv)
    return sv


# extended-precision attempts for psi(rel_tol=...): digits beyond the cancellation depth
_MP_EXTRA_DIGITS = (20, 60, 140)


def _psi_mp(a: Number, b: Number, z: Number, q: float, rel_tol: float, scale: float, sv: SeriesValue) -> SeriesValue:
    """Psi by mpmath, with precision raised until the sum is resolved to rel_tol.

    An exact zero of Psi can never be resolved relatively; after the last attempt
    the value is returned with its absolute error estimate.
    """
    import mpmath

    size = abs(sv.value) if sv.value != 0 else scale * _EPS
    for extra in _MP_EXTRA_DIGITS:
        dps = int(max(0.0, math.log10(max(scale, 1e-300) / size))) + extra
        with mpmath.workdps(dps):
            Q, A, Bv, Z = mpmath.mpf(q), mpmath.mpmathify(a), mpmath.mpmathify(b), mpmath.mpmathify(z)
            target = mpmath.mpf(rel_tol) * size * mpmath.mpf(10) ** -3
            # |t_n| <= M_n = C (-|a|;q)_n q^{n(n-1)/2} |z|^n, C = (-|b|;q)_inf / (q;q)_inf, as in the float path
            big_c = mpmath.qp(-abs(Bv), Q) / mpmath.qp(Q, Q)
            terms, n = [], 0
            pa = qn = zp = maj = mpmath.mpf(1)
            while True:
                terms.append(pa * mpmath.qp(Bv * Q**n, Q) / qn * zp)
                maj *= (1 + abs(A) * Q**n) * Q**n * abs(Z)
                r_next = (1 + abs(A) * Q ** (n + 1)) * Q ** (n + 1) * abs(Z)
                tail = big_c * maj / (1 - r_next) if r_next < 1 else mpmath.inf
                if tail < target or n >= 4 * _MAX_TERMS:
                    break
                pa *= 1 - A * Q**n
                qn *= 1 - Q ** (n + 1)
                zp *= -(Q**n) * Z
                n += 1
            total = mpmath.fsum(terms)
            err = float(tail + mpmath.mpf(10) ** (-dps + 2) * mpmath.fsum(abs(t) for t in terms))
            val = complex(total) if isinstance(total, mpmath.mpc) else float(total)
        if err <= rel_tol * abs(val):
            break
        size = max(abs(val), err)
    return SeriesValue(_tidy(complex(val)), err, len(terms))


def _shifted(b: Number, q: float, k: int) -> float:
    j = q_exponent(b, q)
    assert j is not None
    return q ** (j + k)


def psi_value(a: Number, b: Number, z: Number, base: QParam | float, tol: float = DEFAULT_TOL) -> Number:
    return psi(a, b, z, base, tol).value


def phi_aux(w: Number, z: Number, base: QParam | float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """phi(w;z) = sum_r (w q^{2r};q^2)_inf / (q^2;q^2)_r q^{2r(r-1)} z^r, q from base."""
    _check_tol(tol)
    q = base.q if isinstance(base, QParam) else _base(base)
    Q = q * q
    fw = _Factor(w, Q)
    big_c = poch_inf_value(-abs(w), Q) / poch_inf_value(Q, Q)
    az = abs(z)
    maj = big_c
    tails: list[float] = []
    n = 0
    while True:
        r_next = Q ** (2 * (n + 1)) * az
        m_next = maj * Q ** (2 * n) * az
        tail = m_next / (1.0 - r_next) if r_next < 1.0 else math.inf
        tails.append(tail)
        if (tail < tol and n >= N_MIN) or az == 0.0 or n >= _MAX_TERMS:
            break
        maj = m_next
        n += 1
    top = n
    pw = poch_inf(w * Q ** top if fw.j is None else _shifted(w, Q, top), Q, tol * 1e-2)
    p_vals: list[Number] = [0.0] * (top + 1)
    p_vals[top] = pw.value
    for i in range(top - 1, -1, -1):
        p_vals[i] = fw(i) * p_vals[i + 1]
    rel_p = pw.error_bound / abs(pw.value) if pw.value != 0 else 0.0
    terms: list[Number] = []
    qn: Number = 1.0
    zpow: Number = 1.0
    for r in range(top + 1):
        terms.append(p_vals[r] / qn * zpow)
        qn *= 1.0 - Q ** (r + 1)
        zpow *= Q ** (2 * r) * z
    extra = rel_p * sum(abs(t) for t in terms)
    return _sum_with_majorant(terms, tails, tol, extra)


# extended-precision attempts for psi(rel_tol=...): digits beyond the cancellation depth
_MP_EXTRA_DIGITS = (20, 60, 140)


def _psi_mp(a: Number, b: Number, z: Number, q: float, rel_tol: float, scale: float, sv: SeriesValue) -> SeriesValue:
    """Psi by mpmath, with precision raised until the sum is resolved to rel_tol.

    An exact zero of Psi can never be resolved relatively; after the last attempt
    the value is returned with its absolute error estimate.
    """
    import mpmath

    size = abs(sv.value) if sv.value != 0 else scale * _EPS
    for extra in _MP_EXTRA_DIGITS:
        dps = int(max(0.0, math.log10(max(scale, 1e-300) / size))) + extra
        with mpmath.workdps(dps):
            Q, A, Bv, Z = mpmath.mpf(q), mpmath.mpmathify(a), mpmath.mpmathify(b), mpmath.mpmathify(z)
            target = mpmath.mpf(rel_tol) * size * mpmath.mpf(10) ** -3
            # terms t_n are majorised by M_n; stop once the geometric tail of M drops below target
            terms, n = [], 0
            pa = qn = zp = mpmath.mpf(1)
            while True:
                t = pa * mpmath.qp(Bv * Q**n, Q) / qn * zp
                terms.append(t)
                m_next = abs(pa) * (1 + abs(A) * Q**n) * Q**n * abs(Z) * mpmath.qp(-abs(Bv), Q) / abs(qn * (1 - Q ** (n + 1))) * abs(zp)
                r_next = (1 + abs(A) * Q ** (n + 1)) * Q ** (n + 1) * abs(Z)
                if (r_next < 1 and m_next / (1 - r_next) < target) or n >= 4 * _MAX_TERMS:
                    tail = m_next / (1 - r_next) if r_next < 1 else mpmath.inf
                    break
                pa *= 1 - A * Q**n
                qn *= 1 - Q ** (n + 1)
                zp *= -(Q**n) * Z
                n += 1
            total = mpmath.fsum(terms)
            err = float(tail + mpmath.mpf(10) ** (-dps + 2) * mpmath.fsum(abs(t) for t in terms))
            val = complex(total) if isinstance(total, mpmath.mpc) else float(total)
        if err <= rel_tol * abs(val):
            break
        size = max(abs(val), err)
    return SeriesValue(_tidy(complex(val)), err, len(terms))


def two_phi_one(
    a: Number, b: Number, c: Number, z: Number, base: QParam | float, tol: float = DEFAULT_TOL
) -> SeriesValue:
    """2phi1(a,b;c;q,z) for |z| < 1 and c outside q^{-N0}."""
    _check_tol(tol)
    q = _base(base)
    if abs(z) >= 1.0:
        raise ValueError("2phi1 needs |z| < 1")
    fc = _Factor(c, q)
    if fc.vanishes_from() is not None:
        raise ValueError("2phi1 needs c outside q^{-N0}")
    fa, fb = _Factor(a, q), _Factor(b, q)
    az, aa, ab, ac = abs(z), abs(a), abs(b), abs(c)

    def rho(n: int) -> float:
        den = (1.0 - ac * q ** n) * (1.0 - q ** (n + 1))
        if den <= 0:
            return math.inf
        return (1.0 + aa * q ** n) * (1.0 + ab * q ** n) / den * az

    terms: list[Number] = []
    tails: list[float] = []
    t: Number = 1.0
    n = 0
    while True:
        terms.append(t)
        if fa(n) == 0 or fb(n) == 0:
            tails.append(0.0)  # terminating: every later term vanishes
            break
        r1 = rho(n + 1)
        bound_next = abs(t) * rho(n)
        tail = bound_next / (1.0 - r1) if r1 < 1.0 else math.inf
        tails.append(tail)
        if (tail < tol and n >= N_MIN) or n >= _MAX_TERMS:
            break
        t = t * fa(n) * fb(n) / (fc(n) * (1.0 - q ** (n + 1))) * z
        n += 1
    return _sum_with_majorant(terms, tails, tol)


def psi_bound(a: Number, k: int, z: Number, base: QParam | float) -> float:
    """(-|a|;q)_inf (-|z|;q)_inf |z|^k q^{k(k-1)/2}, dominating |Psi(a;q^{1-k};q,z)|."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    q = _base(base)
    pa = poch_inf_value(-abs(a), q).real
    pz = poch_inf_value(-abs(z), q).real
    return pa * pz * abs(z) ** k * q ** (k * (k - 1) / 2)


def residual(lhs: Number, rhs: Number) -> float:
    return abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs))


IDENTITIES = (
    "theta",
    "psi_symmetry",
    "transform_shift",
    "transform_terminating",
    "contiguous1",
    "contiguous2",
    "heine",
    "limit",
)


def _sides(case: str, p: dict, q: float, tol: float) -> tuple[Number, Number]:
    P = lambda x: poch_inf_value(x, q, tol)  # noqa: E731
    S = lambda a, b, z: psi_value(a, b, z, q, tol)  # noqa: E731
    if case == "theta":
        a, k = p["a"], int(p["k"])
        if a == 0:
            raise ValueError("theta identity needs a != 0")
        lhs = P(a * q ** k) * P(q ** (1 - k) / a)
        rhs = (-a) ** (-k) * q ** (-k * (k - 1) / 2) * P(a) * P(q / a)
        return lhs, rhs
    if case == "psi_symmetry":
        a, b, z = p["a"], p["b"], p["z"]
        if b == 0:
            raise ValueError("argument symmetry needs b != 0")
        return S(a, b, z), S(a * z / b, z, b)
    if case == "transform_shift":
        a, z, k = p["a"], p["z"], int(p["k"])
        if a == 0 or z == 0:
            raise ValueError("shift transformation needs a, z != 0")
        lhs = P(q ** (k + 1) / a) * S(a * q ** (-k), q ** (1 - k), z)
        rhs = P(q / a) * (a * z / q) ** k * S(a, q ** (k + 1), z * q ** k)
        return lhs, rhs
    if case == "transform_terminating":
        a, z, k = p["a"], p["z"], int(p["k"])
        if z == 0 or k < 0:
            raise ValueError("terminating transformation needs z != 0 and k >= 0")
        lhs = P(q ** (k + 1) * a / z) * S(q ** (-k), a, z)
        rhs = (z / q) ** k * P(q ** k * a) * S(q ** (-k), q * a / z, q * q / z)
        return lhs, rhs
    if case == "contiguous1":
        a, b, z = p["a"], p["b"], p["z"]
        return S(a, b, z), (1 - a) * S(q * a, b, z) + a * S(a, b, q * z)
    if case == "contiguous2":
        a, b, z = p["a"], p["b"], p["z"]
        return S(a, b, z), (a - b) * S(a, q * b, q * z) + (1 - a) * S(q * a, q * b, z)
    if case == "heine":
        a, b, z = p["a"], p["b"], p["z"]
        return P(z) * two_phi_one(a, b, 0.0, z, q, tol).value, S(a, a * z, b * z)
    raise ValueError(f"unknown identity {case!r}")


def identity_residuals(case: str, params: dict, base: QParam | float, tol: float = DEFAULT_TOL) -> float:
    """Scaled residual |L - R| / (1 + |L| + |R|) of one q-series identity."""
    q = _base(base)
    if case == "limit":
        seq = limit_residuals(params, q, tol)
        return seq[-1]
    lhs, rhs = _sides(case, params, q, tol)
    return residual(lhs, rhs)


def limit_residuals(params: dict, base: QParam | float, tol: float = DEFAULT_TOL, n: int = 30) -> list[float]:
    """Residuals of 2phi1(a, b/x_i; c; x_i z) against 1phi1(a; c; bz) along x_i = 2^-i."""
    q = _base(base)
    a, b, c, z = params["a"], params["b"], params["c"], params["z"]
    target = psi_value(a, c, b * z, q, tol) / poch_inf_value(c, q, tol)
    out = []
    for i in range(1, n + 1):
        x = 2.0 ** (-i)
        if abs(x * z) >= 1:
            continue
        out.append(residual(_phi21_scaled(a, b, c, z, x, q, tol), target))
    return out


def _phi21_scaled(a: Number, b: Number, c: Number, z: Number, x: float, q: float, tol: float) -> Number:
    """2phi1(a, b/x; c; q, x z) summed with (b/x;q)_n x^n = prod (x - b q^k) to avoid overflow."""
    fa, fc = _Factor(a, q), _Factor(c, q)
    aa, ab, ac, az = abs(a), abs(b), abs(c), abs(z)

    def rho(n: int) -> float:
        den = (1.0 - ac * q ** n) * (1.0 - q ** (n + 1))
        return (1.0 + aa * q ** n) * (x + ab * q ** n) * az / den if den > 0 else math.inf

    s: Number = 0.0
    t: Number = 1.0
    for n in range(_MAX_TERMS):
        s += t
        r1 = rho(n + 1)
        if n >= N_MIN and r1 < 1.0 and abs(t) * rho(n) / (1.0 - r1) < tol * (1.0 + abs(s)):
            break
        t = t * fa(n) * (x - b * q ** n) / (fc(n) * (1.0 - q ** (n + 1))) * z
    return s


# -- lattice-argument Psi with conditioning control ---------------------------



@lru_cache(maxsize=200_000)
def _log_factor(sign: int, e: int, lb: float) -> tuple[float, int]:
    """log|1 - sign*B^e| and the sign of 1 - sign*B^e, with B = exp(lb)."""
    if sign > 0:
        if e == 0:
            return -math.inf, 0
        if e > 0:
            return math.log1p(-math.exp(e * lb)), 1
        return e * lb + math.log1p(-math.exp(-e * lb)), -1
    if e >= 0:
        return math.log1p(math.exp(e * lb)), 1
    return e * lb + math.log1p(math.exp(-e * lb)), 1


@lru_cache(maxsize=200_000)
def _log_poch_inf(sign: int, e: int, lb: float) -> tuple[float, int]:
    """log|(sign*B^e; B)_inf| and its sign."""
    tot, sg = 0.0, 1
    i = 0
    while True:
        ei = e + i
        if ei > 0 and ei * lb < -60.0:
            return tot, sg
        lf, s = _log_factor(sign, ei, lb)
        if s == 0:
            return -math.inf, 0
        tot += lf
        sg *= s
        i += 1


@dataclass(frozen=True)
class PsiPlan:
    """Exact log-magnitudes and signs of the Psi terms for one representation."""

    form: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]
    logs: tuple[float, ...]
    signs: tuple[int, ...]
    log_max: float
    log_abs_sum: float
    terminated: bool = False  # (a;B)_n vanishes beyond the last term, so there is no tail


def psi_plan(
    a: tuple[int, int], b: tuple[int, int], z: tuple[int, int], lb: float, log_cut: float
) -> PsiPlan:
    sa, ea = a
    sb, eb = b
    sz, ez = z
    b_zero_until = -eb if (sb > 0 and eb <= 0) else -1
    logs: list[float] = []
    signs: list[int] = []
    la, sga = 0.0, 1
    lqn = 0.0
    n = 0
    terminated = False
    while n < _MAX_TERMS:
        lbn, sbn = _log_poch_inf(sb, eb + n, lb)
        if sga == 0 or sbn == 0:
            lt, st = -math.inf, 0
        else:
            lt = la + lbn - lqn + (n * (n - 1) / 2) * lb + n * ez * lb
            st = sga * sbn * ((-sz) if n % 2 else 1)
        logs.append(lt)
        signs.append(st)
        lf, s = _log_factor(sa, ea + n, lb)
        if s == 0:
            terminated = True
            break
        if n >= N_MIN and n > b_zero_until and lt < log_cut:
            # bound on |t_{k+1}/t_k| for all k >= n (decreasing in k)
            ab = math.exp((eb + n) * lb)
            if ab < 1.0:
                lr = (
                    math.log1p(math.exp((ea + n) * lb))
                    - math.log1p(-ab)
                    + (n + ez) * lb
                    - math.log1p(-math.exp(lb))
                )
                if lr < -0.7:
                    break
        la += lf
        sga *= s
        lqn += math.log1p(-math.exp((n + 1) * lb))
        n += 1
    finite = [x for x in logs if x > -math.inf]
    if finite:
        m = max(finite)
        las = m + math.log(sum(math.exp(x - m) for x in finite))
    else:
        m = las = -math.inf
    return PsiPlan((a, b, z), tuple(logs), tuple(signs), m, las, terminated)


def psi_lattice(
    a: tuple[int, int],
    b: tuple[int, int],
    z: tuple[int, int],
    base: QParam,
    log_scale: float = 0.0,
    abs_tol: float = 1e-17,
    allow_swap: bool = True,
    rel_tol: float = 0.0,
) -> float:
    """exp(log_scale) * Psi(a;b;B,z) for lattice arguments (sign, exponent) in base B.

    The argument symmetry Psi(a;b;z) = Psi(az/b; z; b) picks the representation
    with the smaller sum of |terms|; mpmath extended precision is used only when
    double precision cannot reach abs_tol (absolute, after scaling) or 1e-13
    relative accuracy.  With rel_tol > 0 the absolute target is tightened until
    the result is resolved to rel_tol relative accuracy, however small it is.
    """
    return _psi_lattice_full(a, b, z, base, log_scale, abs_tol, allow_swap, rel_tol)[0]


def psi_lattice_series(
    a: tuple[int, int],
    b: tuple[int, int],
    z: tuple[int, int],
    base: QParam,
    log_scale: float = 0.0,
    abs_tol: float = 1e-17,
    rel_tol: float = 0.0,
) -> SeriesValue:
    """psi_lattice with its error estimate (rounding plus truncation tail) and term count."""
    val, err, n = _psi_lattice_full(a, b, z, base, log_scale, abs_tol, True, rel_tol)
    return SeriesValue(val, err, max(n, 1))


def _psi_lattice_full(a, b, z, base: QParam, log_scale: float, abs_tol: float, allow_swap: bool, rel_tol: float):
    lb = math.log(base.base)
    log_tol = math.log(abs_tol)
    for _ in range(8):
        val, err, n = _psi_at(a, b, z, base, lb, log_scale, log_tol, allow_swap, rel_tol)
        # the truncation point follows log_tol, so it must sit below rel_tol * |val|
        if not rel_tol or val != 0.0 and math.log(abs(val)) + math.log(rel_tol) >= log_tol:
            break
        log_tol = (math.log(abs(val)) + math.log(rel_tol) - 2.0) if val != 0.0 else log_tol - 70.0
    return val, err, n


def _psi_at(a, b, z, base: QParam, lb: float, log_scale: float, log_tol: float, allow_swap: bool, rel_tol: float):
    """(value, error estimate, terms) for one truncation target."""
    plan = _pick_plan(a, b, z, lb, log_tol - log_scale - 7.0, allow_swap)
    if plan.log_max == -math.inf:
        return 0.0, 0.0, 0
    n = len(plan.logs)
    total = plan.log_abs_sum + log_scale
    # the last kept term bounds the neglected tail (term ratios are below 1/2 there)
    tail = 0.0
    if not plan.terminated and plan.logs[-1] > -math.inf:
        tail = math.exp(min(plan.logs[-1] + log_scale, 700.0))
    if plan.log_max < 650.0 and plan.log_max + log_scale < 650.0:
        val = _float_eval(plan, base.base, log_scale)
        if (not rel_tol and math.log(8 * n * _EPS) + total <= log_tol) or 8 * n * _EPS * math.exp(total) <= max(
            rel_tol, 1e-13
        ) * abs(val):
            return val, tail + 8 * n * _EPS * math.exp(total), n
    return _mp_eval(plan, base, log_scale, log_tol), tail + math.exp(log_tol), n


def _pick_plan(a, b, z, lb: float, log_cut: float, allow_swap: bool) -> PsiPlan:
    forms = [(a, b, z)]
    if allow_swap:
        forms.append(((a[0] * z[0] * b[0], a[1] + z[1] - b[1]), z, b))
    return min((psi_plan(*f, lb, log_cut) for f in forms), key=lambda p: p.log_abs_sum)


def _float_eval(plan: PsiPlan, B: float, log_scale: float) -> float:
    """exp(log_scale) * sum of terms, advancing by exact term ratios.

    The first nonzero term is taken from its log-magnitude; later terms follow
    from t_{k+1}/t_k = (1 - aB^k)/(1 - bB^k) * (-B^k z)/(1 - B^{k+1}), which
    never overflows even when (a;B)_k and (bB^k;B)_inf individually do.
    """
    (sa, ea), (sb, eb), (sz, ez) = plan.form
    a, b, z = sa * B ** ea, sb * B ** eb, sz * B ** ez
    k0 = next(k for k, s in enumerate(plan.signs) if s != 0)
    t = plan.signs[k0] * math.exp(plan.logs[k0] + log_scale)
    terms = [t]
    for k in range(k0, len(plan.logs) - 1):
        if sa > 0 and ea + k == 0:
            break
        t = t * (1.0 - a * B ** k) / (1.0 - b * B ** k) * (-(B ** k) * z) / (1.0 - B ** (k + 1))
        terms.append(t)
    return math.fsum(terms)


def _mp_eval(plan: PsiPlan, base: QParam, log_scale: float, log_tol: float) -> float:
    import mpmath

    (sa, ea), (sb, eb), (sz, ez) = plan.form
    need = (plan.log_abs_sum + log_scale - log_tol) / math.log(10.0)
    dps = max(20, int(need) + 12)
    with mpmath.workdps(dps):
        q = mpmath.mpf(base.q)
        B = q * q if base.base_squared else q
        a, b, z = sa * B ** ea, sb * B ** eb, sz * B ** ez
        n_top = len(plan.logs) - 1
        cur = mpmath.qp(b * B ** (n_top + 1), B)
        pb = [mpmath.mpf(0)] * (n_top + 1)
        for i in range(n_top, -1, -1):
            cur = (0 if (sb > 0 and eb + i == 0) else 1 - b * B ** i) * cur
            pb[i] = cur
        s = mpmath.mpf(0)
        pa = qn = zp = mpmath.mpf(1)
        for k in range(n_top + 1):
            s += pa * pb[k] / qn * zp
            pa *= 0 if (sa > 0 and ea + k == 0) else 1 - a * B ** k
            qn *= 1 - B ** (k + 1)
            zp *= -(B ** k) * z
        return float(s * mpmath.exp(log_scale))

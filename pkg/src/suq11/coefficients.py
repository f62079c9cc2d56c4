"""The coefficient family a_p(x, y) on I_q^3 and its relations.

All Psi evaluations use base q^2.  Lattice arguments are exact (sign, exponent)
pairs, so the series can be evaluated in its best-conditioned form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .qlattice import (
    LatticePoint,
    LatticeWindow,
    QParam,
    chi,
    sign_power,
)
from .qseries import DEFAULT_TOL, SeriesValue, _log_poch_inf, poch_inf_value, psi_lattice, psi_lattice_series


@dataclass(frozen=True)
class APoint:
    p: LatticePoint
    x: LatticePoint
    y: LatticePoint

    def __post_init__(self) -> None:
        for v in (self.p, self.x, self.y):
            if not v.in_lattice:
                raise ValueError(f"{v} is not a point of I_q")

    @property
    def in_support(self) -> bool:
        return self.x.sign * self.y.sign == self.p.sign


@dataclass
class GramReport:
    theta: LatticePoint
    window: LatticeWindow
    labels: list
    gram: np.ndarray
    max_offdiag: float
    max_diag_dev: float

    @property
    def deviation(self) -> float:
        return max(self.max_offdiag, self.max_diag_dev)


def _qparam(q: QParam | float) -> QParam:
    return q if isinstance(q, QParam) else QParam(float(q))


def c_q(q: QParam | float, tol: float = DEFAULT_TOL) -> float:
    """(sqrt(2) q (q^2, -q^2; q^2)_inf)^{-1}."""
    qv = _qparam(q).q
    Q = qv * qv
    return 1.0 / (math.sqrt(2.0) * qv * poch_inf_value(Q, Q, tol) * poch_inf_value(-Q, Q, tol))


@lru_cache(maxsize=None)
def _log_minus_kappa_poch(q: float, sign: int, k: int) -> float:
    """log (-kappa(x); q^2)_inf for x = sign q^k in I_q (always positive)."""
    lg, _ = _log_poch_inf(-sign, k, 2.0 * math.log(q))
    return lg


def _a_parts(q: float, sp: int, kp: int, sx: int, kx: int, sy: int, ky: int):
    """(sign, a, b, z, log_scale) with a_p(x, y) = sign * exp(log_scale) * Psi(a; b; q^2, z)."""
    lq = math.log(q)
    c = kp + ky - kx
    sign = (-1 if (sx > 0 and sy < 0) else 1) * sign_power(-1, kp) * sign_power(-sy, kx)
    log_scale = (
        math.log(c_q(q))
        + ky * lq
        + ((c - 1) * (c - 2) // 2) * lq
        + 0.5
        * (
            _log_minus_kappa_poch(q, sp, kp)
            + _log_minus_kappa_poch(q, sy, ky)
            - _log_minus_kappa_poch(q, sx, kx)
        )
    )
    # Psi(-q^2/kappa(y); q^2 kappa(x/y); q^2; q^2 kappa(x/p)) in base Q = q^2
    a = (-sy, 1 - ky)
    b = (sx * sy, 1 + kx - ky)
    z = (sx * sp, 1 + kx - kp)
    return sign, a, b, z, log_scale


@lru_cache(maxsize=1_000_000)
def _a_cached(q: float, sp: int, kp: int, sx: int, kx: int, sy: int, ky: int) -> float:
    if sx * sy != sp:
        return 0.0
    sign, a, b, z, log_scale = _a_parts(q, sp, kp, sx, kx, sy, ky)
    return sign * psi_lattice(a, b, z, QParam(q, True), log_scale)


def a_series(args: APoint | tuple, q: QParam | float) -> SeriesValue:
    """a_p(x, y) with the error estimate and term count of its Psi evaluation."""
    if not isinstance(args, APoint):
        args = APoint(*args)
    qv = _qparam(q).q
    p, x, y = args.p, args.x, args.y
    if not args.in_support:
        return SeriesValue(0.0, 0.0, 1)
    sign, a, b, z, log_scale = _a_parts(qv, p.sign, p.exponent, x.sign, x.exponent, y.sign, y.exponent)
    sv = psi_lattice_series(a, b, z, QParam(qv, True), log_scale)
    return SeriesValue(sign * sv.value, sv.error_bound, sv.terms)


def a_coeff(args: APoint | tuple, q: QParam | float) -> float:
    """a_p(x, y); zero off the support sgn(xy) = sgn(p)."""
    if not isinstance(args, APoint):
        args = APoint(*args)
    p, x, y = args.p, args.x, args.y
    return _a_cached(_qparam(q).q, p.sign, p.exponent, x.sign, x.exponent, y.sign, y.exponent)


def a_opt(p: Optional[LatticePoint], x: Optional[LatticePoint], y: Optional[LatticePoint], q: float) -> float:
    """a_p(x, y) with the zero-extension convention for absent or off-lattice points."""
    if p is None or x is None or y is None:
        return 0.0
    if not (p.in_lattice and x.in_lattice and y.in_lattice):
        return 0.0
    return _a_cached(q, p.sign, p.exponent, x.sign, x.exponent, y.sign, y.exponent)


def symmetry_residuals(args: APoint | tuple, q: QParam | float) -> tuple[float, float, float]:
    if not isinstance(args, APoint):
        args = APoint(*args)
    qv = _qparam(q).q
    p, x, y = args.p, args.x, args.y
    v = a_opt(p, x, y, qv)
    r1 = (
        sign_power(-1, chi(y) + chi(p))
        * sign_power(x.sign, chi(x))
        * qv ** (chi(y) - chi(p))
        * a_opt(y, x, p, qv)
    )
    r2 = sign_power(p.sign, chi(p)) * sign_power(x.sign, chi(x)) * sign_power(y.sign, chi(y)) * a_opt(p, y, x, qv)
    r3 = (
        sign_power(-1, chi(x) + chi(p))
        * sign_power(y.sign, chi(y))
        * qv ** (chi(x) - chi(p))
        * a_opt(x, p, y, qv)
    )
    return tuple(abs(v - r) / (1.0 + abs(v) + abs(r)) for r in (r1, r2, r3))  # type: ignore[return-value]


def _shift(x: LatticePoint, k: int) -> Optional[LatticePoint]:
    """x * q^k when it lies in I_q."""
    y = x.shift(k)
    return y if y.in_lattice else None


def recurrence_residuals(args: APoint | tuple, q: QParam | float) -> tuple[float, float]:
    """Residuals of the alpha- and gamma-recurrences for a_p."""
    if not isinstance(args, APoint):
        args = APoint(*args)
    qv = _qparam(q).q
    p, x, y = args.p, args.x, args.y
    P, X, Y = p.value(qv), x.value(qv), y.value(qv)
    # sqrt(sgn p + p^-2) a_{qp}(x,y)
    #   = sqrt((sgn x + q^2/x^2)(sgn y + q^2/y^2)) a_p(x/q, y/q) + sgn(x) (q/xy) a_p(x,y)
    lhs1 = math.sqrt(p.sign + P ** -2) * a_opt(_shift(p, 1), x, y, qv)
    rad = (x.sign + qv * qv / X ** 2) * (y.sign + qv * qv / Y ** 2)
    rhs1 = (math.sqrt(rad) if rad > 0 else 0.0) * a_opt(p, _shift(x, -1), _shift(y, -1), qv) + x.sign * (
        qv / (X * Y)
    ) * a_opt(p, x, y, qv)
    # p^-1 a_p(x,y) = sgn(x) y^-1 sqrt(sgn x + 1/x^2) a_p(qx, y) + x^-1 sqrt(sgn y + q^2/y^2) a_p(x, y/q)
    lhs2 = a_opt(p, x, y, qv) / P
    rx = x.sign + 1.0 / X ** 2
    ry = y.sign + qv * qv / Y ** 2
    rhs2 = x.sign / Y * math.sqrt(max(rx, 0.0)) * a_opt(p, _shift(x, 1), y, qv) + 1.0 / X * math.sqrt(
        max(ry, 0.0)
    ) * a_opt(p, x, _shift(y, -1), qv)
    return (
        abs(lhs1 - rhs1) / (1.0 + abs(lhs1) + abs(rhs1)),
        abs(lhs2 - rhs2) / (1.0 + abs(lhs2) + abs(rhs2)),
    )


def line_points(theta: LatticePoint, window: LatticeWindow) -> list[tuple[LatticePoint, LatticePoint]]:
    """Pairs (x, theta x) with both coordinates in the window."""
    out = []
    for x in window:
        y = theta * x
        if y.in_lattice and y in window:
            out.append((x, y))
    return out


def default_p_list(theta: LatticePoint, window: LatticeWindow, radius: int = 4) -> list[LatticePoint]:
    return [p for p in window if p.sign == theta.sign and abs(p.exponent) <= radius]


def _report(theta, window, labels, g) -> GramReport:
    n = g.shape[0]
    dev = g - np.eye(n)
    off = dev - np.diag(np.diag(dev))
    return GramReport(
        theta=theta,
        window=window,
        labels=labels,
        gram=g,
        max_offdiag=float(np.max(np.abs(off))) if n > 1 else 0.0,
        max_diag_dev=float(np.max(np.abs(np.diag(dev)))),
    )


def orthogonality_gram(
    theta: LatticePoint,
    window: LatticeWindow,
    q: QParam | float,
    p_list: Optional[Sequence[LatticePoint]] = None,
) -> GramReport:
    """Gram of p -> a_p restricted to the line y = theta x, summed over the window."""
    qv = _qparam(q).q
    if p_list is None:
        p_list = default_p_list(theta, window)
    for p in p_list:
        if p.sign != theta.sign:
            raise ValueError("every p must share the sign of theta")
    pts = line_points(theta, window)
    rows = np.array([[a_opt(p, x, y, qv) for (x, y) in pts] for p in p_list])
    return _report(theta, window, list(p_list), rows @ rows.T)


def dual_gram(
    theta: LatticePoint,
    window: LatticeWindow,
    q: QParam | float,
    xy_list: Iterable[tuple[LatticePoint, LatticePoint]],
) -> GramReport:
    """Gram of (x, y) -> (p -> a_p(x, y)) over p in the window with sgn p = sgn theta."""
    qv = _qparam(q).q
    xy = list(xy_list)
    for x, y in xy:
        if not (x * theta == y):
            raise ValueError(f"({x}, {y}) is not on the line y = theta x")
    ps = window.of_sign(theta.sign)
    cols = np.array([[a_opt(p, x, y, qv) for p in ps] for (x, y) in xy])
    return _report(theta, window, xy, cols @ cols.T)


def central_xy(theta: LatticePoint, radius: int = 3) -> list[tuple[LatticePoint, LatticePoint]]:
    """Points (x, theta x) on the line with |chi(x)|, |chi(theta x)| <= radius."""
    out = []
    for k in range(-radius, radius + 1):
        for s in (1, -1):
            x = LatticePoint(s, k)
            y = theta * x
            if x.in_lattice and y.in_lattice and abs(y.exponent) <= radius:
                out.append((x, y))
    return out


# -- the second-order difference map L -----------------------------------------


def digamma_value(
    r: int, s: int, m: int, p: LatticePoint, lam: complex, x: Optional[LatticePoint], mu: complex,
    y: Optional[LatticePoint], q: float,
) -> complex:
    """Pointwise value of the eigenvector with labels (r, s, m, p) at (lam, x, mu, y)."""
    if x is None or y is None or not (x.in_lattice and y.in_lattice):
        return 0.0
    if y != LatticePoint(p.sign * x.sign, x.exponent + m):
        return 0.0
    return a_opt(p, x, y, q) * lam ** (r + chi(y) - chi(p)) * mu ** (s - chi(x) + chi(p))


def l_map_value(f, lam: complex, x: LatticePoint, mu: complex, y: LatticePoint, q: float) -> complex:
    """(L f)(lam, x, mu, y) by the three-term formula."""
    X, Y = x.value(q), y.value(q)
    sx, sy = x.sign, y.sign
    c0 = X ** -2 * (sy + Y ** -2) + (sx + q * q * X ** -2) * Y ** -2
    up = (sx + X ** -2) * (sy + Y ** -2)
    dn = (sx + q * q * X ** -2) * (sy + q * q * Y ** -2)
    out = c0 * f(lam, x, mu, y)
    out += sx / q * lam.conjugate() * mu / (X * Y) * math.sqrt(max(up, 0.0)) * f(lam, _shift(x, 1), mu, _shift(y, 1))
    out += sx * q * lam * mu.conjugate() / (X * Y) * math.sqrt(max(dn, 0.0)) * f(
        lam, _shift(x, -1), mu, _shift(y, -1)
    )
    return out


def second_order_eigen_residual(
    r: int,
    s: int,
    m: int,
    p: LatticePoint,
    sample: Sequence[tuple[LatticePoint, LatticePoint]],
    phases: Sequence[tuple[complex, complex]],
    q: QParam | float,
) -> float:
    """max |L digamma - p^-2 digamma| over sample points and phases."""
    qv = _qparam(q).q
    for pair in sample:
        if len(pair) != 2 or not all(isinstance(v, LatticePoint) and v.in_lattice for v in pair):
            raise ValueError(f"malformed sample point {pair!r}")

    def f(lam, x, mu, y):
        return digamma_value(r, s, m, p, lam, x, mu, y, qv)

    ev = p.value(qv) ** -2
    worst = 0.0
    for x, y in sample:
        for lam, mu in phases:
            lhs = l_map_value(f, complex(lam), x, complex(mu), y, qv)
            rhs = ev * f(complex(lam), x, complex(mu), y)
            worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs)))
    return worst

"""Coassociativity checks: the Omega model on I_{q^2}^3, the F/G families, the
difference operators gamma_l and gamma_r*, and both iterated comultiplications.

Grid points are LatticePoints read in base q^2.  (Delta (x) id)Delta(T) and
(id (x) Delta)Delta(T) are compared through matrix elements
<(1 (x) 1 (x) T) W v, W w> with W = (1 (x) V)(V (x) 1) or W = V_13 (1 (x) V); only
forward transforms are needed, so each vector costs O(window^2).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .coefficients import GramReport, a_opt, c_q
from .comult import _chain, _gen
from .operators import BasisVector, generator_action
from .qlattice import LatticePoint, LatticeWindow, QParam, chi
from .qseries import SeriesValue, _log_poch_inf, psi_lattice_series

GridFunction = dict  # (x, y) -> float, x and y LatticePoints in base q^2


def _qv(q: QParam | float) -> float:
    return q.q if isinstance(q, QParam) else float(q)


# -- the measure --------------------------------------------------------------------


@lru_cache(maxsize=None)
def _log_poch_minus(q: float, sign: int, k: int) -> float:
    """log (-x; q^2)_inf for x = sign q^{2k}."""
    lg, sg = _log_poch_inf(-sign, k, 2.0 * math.log(q))
    if sg <= 0:
        raise ValueError(f"(-x; q^2)_inf is not positive at x = {sign} q^(2*{k})")
    return lg


@dataclass(frozen=True)
class OmegaGrid:
    """K(theta) intersected with a window, with the weights Omega_theta."""

    theta: LatticePoint
    window: LatticeWindow
    q: float

    def points(self) -> list[tuple[LatticePoint, LatticePoint]]:
        out = []
        for x in self.window:
            for y in self.window:
                if (self.theta * x * y).in_lattice:
                    out.append((x, y))
        return out

    def __contains__(self, xy) -> bool:
        x, y = xy
        return x in self.window and y in self.window and (self.theta * x * y).in_lattice

    def weight(self, x: LatticePoint, y: LatticePoint) -> float:
        return omega_weight(self.theta, x, y, self.q)


def omega_weight(theta: LatticePoint, x: LatticePoint, y: LatticePoint, q: QParam | float) -> float:
    """|x||y|(-x,-y;q^2)_inf/(-theta x y;q^2)_inf."""
    qv = _qv(q)
    z = theta * x * y
    lg = (
        2.0 * (x.exponent + y.exponent) * math.log(qv)
        + _log_poch_minus(qv, x.sign, x.exponent)
        + _log_poch_minus(qv, y.sign, y.exponent)
        - _log_poch_minus(qv, z.sign, z.exponent)
    )
    return math.exp(lg)


# -- the F and G families --------------------------------------------------------------


@dataclass(frozen=True)
class FGIndex:
    kind: str  # "F" or "G"
    k: int
    m: int
    p: LatticePoint  # in I_{q^2}

    def __post_init__(self) -> None:
        if self.kind not in ("F", "G"):
            raise ValueError("kind must be 'F' or 'G'")
        if not self.p.in_lattice:
            raise ValueError(f"p = {self.p} is not a point of I_(q^2)")

    @property
    def theta(self) -> LatticePoint:
        return LatticePoint(self.p.sign, self.k)


@lru_cache(maxsize=None)
def _f_prefactor_log(q: float, k: int, m: int, sp: int, kp: int) -> float:
    """log of c_q^2 q^{(m+k+1)(m+k+2)/2} nu(kappa^-1(p) q^m) sqrt((-p;q^2)_inf)."""
    lq = math.log(q)
    c = kp + m
    return (
        2.0 * math.log(c_q(q))
        + ((m + k + 1) * (m + k + 2) / 2.0) * lq
        + ((c - 1) * (c - 2) // 2) * lq
        + 0.5 * _log_poch_minus(q, sp, kp)
    )


# F values are resolved to this relative accuracy, however small they are
_F_REL = 1e-14


def _f_series(q: float, k: int, m: int, sp: int, kp: int, sx: int, kx: int, sy: int, ky: int) -> SeriesValue:
    if not LatticePoint(sp * sy, ky - m).in_lattice:
        return SeriesValue(0.0, 0.0, 1)
    base = QParam(q, True)
    # Psi(-q^2/x; sgn(p) q^{2(1+k)} y; q^{2(1+m+k)} x)
    psi2 = psi_lattice_series((-sx, 1 - kx), (sp * sy, 1 + k + ky), (sx, 1 + m + k + kx), base, 0.0, rel_tol=_F_REL)
    if psi2.value == 0.0:
        return SeriesValue(0.0, 0.0, psi2.terms)
    # Psi(-q^2/p; q^{2(1-m)} y/|p|; sgn(p) q^{2(1-m)}), scaled by the prefactor and |psi2|
    lp = _f_prefactor_log(q, k, m, sp, kp) + math.log(abs(psi2.value))
    psi1 = psi_lattice_series((-sp, 1 - kp), (sy, 1 - m + ky - kp), (sp, 1 - m), base, lp, rel_tol=_F_REL)
    val = math.copysign(psi1.value, psi1.value * psi2.value)
    err = psi1.error_bound + abs(psi1.value) * psi2.error_bound / abs(psi2.value)
    return SeriesValue(val, err, psi1.terms + psi2.terms)


@lru_cache(maxsize=2_000_000)
def _f_cached(q: float, k: int, m: int, sp: int, kp: int, sx: int, kx: int, sy: int, ky: int) -> float:
    return _f_series(q, k, m, sp, kp, sx, kx, sy, ky).value


def fg_series(idx: FGIndex, x: LatticePoint, y: LatticePoint, q: QParam | float) -> SeriesValue:
    """fg_eval with the error estimate and the total term count of both Psi factors."""
    x, y, m = _fg_args(idx, x, y)
    return _f_series(_qv(q), idx.k, m, idx.p.sign, idx.p.exponent, x.sign, x.exponent, y.sign, y.exponent)


def _fg_args(idx: FGIndex, x: LatticePoint, y: LatticePoint):
    if not (x.in_lattice and y.in_lattice):
        raise ValueError("grid points must lie in I_(q^2)")
    if not (idx.theta * x * y).in_lattice:
        raise ValueError(f"({x}, {y}) is not in K(theta) for theta = {idx.theta}")
    if idx.kind == "G":
        return y, x, -idx.m
    return x, y, idx.m


def fg_eval(idx: FGIndex, x: LatticePoint, y: LatticePoint, q: QParam | float) -> float:
    """F^k_{m,p}(x, y) or G^k_{m,p}(x, y) = F^k_{-m,p}(y, x) on K(sgn(p) q^{2k})."""
    x, y, m = _fg_args(idx, x, y)
    return _f_cached(_qv(q), idx.k, m, idx.p.sign, idx.p.exponent, x.sign, x.exponent, y.sign, y.exponent)


def fg_grid(idx: FGIndex, grid: OmegaGrid) -> GridFunction:
    return {(x, y): fg_eval(idx, x, y, grid.q) for (x, y) in grid.points()}


# -- difference operators ------------------------------------------------------------


def _val(f: Mapping, x: Optional[LatticePoint], y: Optional[LatticePoint]) -> float:
    if x is None or y is None:
        return 0.0
    return f.get((x, y), 0.0)


def _sh(x: LatticePoint, k: int) -> Optional[LatticePoint]:
    y = x.shift(k)
    return y if y.in_lattice else None


def _gamma_terms(kind: str, th: float, f: Mapping, x: LatticePoint, y: LatticePoint, Q: float) -> list[float]:
    X, Y = x.value(Q), y.value(Q)
    if kind == "l":
        return [
            (1 + Y / Q) * _val(f, _sh(x, 1), _sh(y, -1)),
            -(1 + Y / Q) * _val(f, x, _sh(y, -1)),
            -(1 + th * X * Y) * _val(f, _sh(x, 1), y),
            _val(f, x, y),
        ]
    if kind == "r-star":
        return [
            (1 + X / Q) * _val(f, _sh(x, -1), _sh(y, 1)),
            -(1 + th * X * Y) * _val(f, x, _sh(y, 1)),
            -(1 + X / Q) * _val(f, _sh(x, -1), y),
            _val(f, x, y),
        ]
    raise ValueError("kind must be 'l' or 'r-star'")


def gamma_tilde_apply(
    kind: str, theta: LatticePoint, f: Mapping, points: Iterable[tuple[LatticePoint, LatticePoint]], q: QParam | float,
    with_scale: bool = False,
):
    """gamma_l (kind 'l') or gamma_r* (kind 'r-star') evaluated at the given points of K(theta).

    f is read with zero extension: values outside its table count as 0.  With
    with_scale, also return the sum of absolute term sizes at each point (the
    rounding scale of the four-term difference).
    """
    qv = _qv(q)
    Q = qv * qv
    th = theta.value(Q)
    pref = qv * abs(th) ** -0.5
    out: GridFunction = {}
    scale: GridFunction = {}
    for x, y in points:
        terms = _gamma_terms(kind, th, f, x, y, Q)
        d = pref / abs(x.value(Q) * y.value(Q))
        sg = 1.0 if x.sign * y.sign > 0 else -1.0
        out[(x, y)] = sg * d * math.fsum(terms)
        scale[(x, y)] = d * math.fsum(abs(t) for t in terms)
    return (out, scale) if with_scale else out


def _interior(grid: OmegaGrid, margin: int = 1) -> list[tuple[LatticePoint, LatticePoint]]:
    """Grid points whose one-step neighbours (within margin) all lie in the grid or off I_{q^2}."""
    out = []
    for x, y in grid.points():
        ok = True
        for dx in range(-margin, margin + 1):
            for dy in range(-margin, margin + 1):
                xx, yy = x.shift(dx), y.shift(dy)
                if xx.in_lattice and yy.in_lattice and (grid.theta * xx * yy).in_lattice and (xx, yy) not in grid:
                    ok = False
        if ok:
            out.append((x, y))
    return out


def eigen_shift_residual(kind: str, k: int, m: int, p: LatticePoint, grid: OmegaGrid) -> float:
    """Pointwise residual of gamma_l F_m = |p|^{-1/2} F_{m+1} (kind 'F') or
    gamma_r* G_{m+1} = |p|^{-1/2} G_m (kind 'G') on interior grid points.

    Each point's error is relative to the rounding scale of the difference
    quotient there (sum of absolute terms), which is what double precision can
    resolve when |x y| is small and the terms cancel.
    """
    q = grid.q
    pts = _interior(grid)
    P = abs(p.value(q * q))
    if kind == "F":
        src = fg_grid(FGIndex("F", k, m, p), grid)
        tgt = FGIndex("F", k, m + 1, p)
        img, sc = gamma_tilde_apply("l", grid.theta, src, pts, q, with_scale=True)
    elif kind == "G":
        src = fg_grid(FGIndex("G", k, m + 1, p), grid)
        tgt = FGIndex("G", k, m, p)
        img, sc = gamma_tilde_apply("r-star", grid.theta, src, pts, q, with_scale=True)
    else:
        raise ValueError("kind must be 'F' or 'G'")
    worst = 0.0
    for x, y in pts:
        exp = P ** -0.5 * fg_eval(tgt, x, y, q)
        den = max(sc[(x, y)], abs(exp))
        if den > 0:
            worst = max(worst, abs(img[(x, y)] - exp) / den)
    return worst


def omega_inner(f: Mapping, g: Mapping, grid: OmegaGrid) -> float:
    return math.fsum(v * g[k] * grid.weight(*k) for k, v in f.items() if k in g and v != 0 and g[k] != 0)


def adjointness_residual(grid: OmegaGrid, n_pairs: int = 5, support: int = 3, seed: int = 0) -> float:
    """|<gamma_l f, g> - <f, gamma_r* g>| / (||f|| ||g|| scale) for random f, g supported inside the grid."""
    rng = random.Random(seed)
    pts = _interior(grid, margin=2)
    if not pts:
        raise ValueError("grid too small for an interior support")
    worst = 0.0
    all_pts = grid.points()
    for _ in range(n_pairs):
        cx, cy = rng.choice(pts)
        box = [
            (x, y) for (x, y) in pts
            if abs(x.exponent - cx.exponent) <= support and abs(y.exponent - cy.exponent) <= support
            and x.sign == cx.sign and y.sign == cy.sign
        ]
        f = {xy: rng.gauss(0, 1) for xy in box}
        g = {xy: rng.gauss(0, 1) for xy in box}
        lf = gamma_tilde_apply("l", grid.theta, f, all_pts, grid.q)
        rg = gamma_tilde_apply("r-star", grid.theta, g, all_pts, grid.q)
        lhs = omega_inner(lf, g, grid)
        rhs = omega_inner(f, rg, grid)
        scale = max(math.fsum(abs(v * g.get(k, 0)) * grid.weight(*k) for k, v in lf.items()), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


# -- Grams and the Racah matrix ---------------------------------------------------------


def _check_theta(theta: LatticePoint, idx: FGIndex) -> None:
    if idx.theta != theta:
        raise ValueError(f"index {idx} does not belong to theta = {theta}")


def fg_gram(theta: LatticePoint, window: LatticeWindow, indices: Sequence[FGIndex], q: QParam | float) -> GramReport:
    """Gram of F or G functions under Omega_theta over K(theta) within the window."""
    grid = OmegaGrid(theta, window, _qv(q))
    for i in indices:
        _check_theta(theta, i)
    pts = grid.points()
    w = np.array([grid.weight(x, y) for x, y in pts])
    rows = np.array([[fg_eval(i, x, y, grid.q) for (x, y) in pts] for i in indices])
    g = (rows * w) @ rows.T
    dev = g - np.eye(len(indices))
    off = dev - np.diag(np.diag(dev))
    return GramReport(theta, window, list(indices), g, float(np.max(np.abs(off))) if len(indices) > 1 else 0.0,
                      float(np.max(np.abs(np.diag(dev)))))


@dataclass
class RacahReport:
    theta: LatticePoint
    f_labels: list
    g_labels: list
    matrix: np.ndarray
    orthogonality: float  # max |R R^T - I| over the rows kept for the check
    max_p_offdiag: float  # max |R| over entries with p1 != p2 (reported, never asserted)


def racah_matrix(
    theta: LatticePoint,
    window: LatticeWindow,
    m_range: Sequence[int],
    p_list: Sequence[LatticePoint],
    q: QParam | float,
    check_rows: Optional[Sequence[int]] = None,
) -> RacahReport:
    """R(m1,p1; m2,p2) = <F~_{m1,p1}, G~_{m2,p2}> under Omega_theta.

    The change of basis is unitary on the whole space; on a truncation only
    rows whose support lies inside the truncated index set satisfy R R^T = I,
    so the orthogonality check uses check_rows (default: the central m values).
    """
    qv = _qv(q)
    k = theta.exponent
    fl = [FGIndex("F", k, m, p) for p in p_list for m in m_range]
    gl = [FGIndex("G", k, m, p) for p in p_list for m in m_range]
    grid = OmegaGrid(theta, window, qv)
    pts = grid.points()
    w = np.array([grid.weight(x, y) for x, y in pts])
    F = np.array([[fg_eval(i, x, y, qv) for (x, y) in pts] for i in fl])
    G = np.array([[fg_eval(i, x, y, qv) for (x, y) in pts] for i in gl])
    R = (F * w) @ G.T
    if check_rows is None:
        mid = [m for m in m_range if abs(m - m_range[len(m_range) // 2]) <= 1]
        check_rows = [i for i, lab in enumerate(fl) if lab.m in mid]
    sub = R[list(check_rows), :]
    orth = float(np.max(np.abs(sub @ sub.T - np.eye(len(check_rows))))) if len(check_rows) else 0.0
    offp = [abs(R[i, j]) for i, a in enumerate(fl) for j, b in enumerate(gl) if a.p != b.p]
    return RacahReport(theta, fl, gl, R, orth, max(offp, default=0.0))


# -- iterated comultiplication -----------------------------------------------------------


ThreeLegVector = dict  # (BasisVector, BasisVector, BasisVector) -> complex


def _add(d: dict, k, c) -> None:
    if c != 0:
        d[k] = d.get(k, 0) + c


def w_left(vec: Mapping, window: LatticeWindow, q: QParam | float) -> dict:
    """(1 (x) V)(V (x) 1) v; keys (r, s, m, n, BasisVector(j, p'))."""
    qv = _qv(q)
    mid: dict = {}
    for (b1, b2, b3), c in vec.items():
        x, y = b1.p, b2.p
        for p in window.of_sign(x.sign * y.sign):
            a = a_opt(p, x, y, qv)
            if a:
                _add(mid, (b1.m - chi(y) + chi(p), b2.m + chi(x) - chi(p), BasisVector(chi(y) - chi(x), p), b3), a * c)
    out: dict = {}
    for (r, s, bm, bn), c in mid.items():
        p, z = bm.p, bn.p
        for p2 in window.of_sign(p.sign * z.sign):
            a = a_opt(p2, p, z, qv)
            if a:
                _add(out, (r, s, bm.m - chi(z) + chi(p2), bn.m + chi(p) - chi(p2), BasisVector(chi(z) - chi(p), p2)), a * c)
    return out


def w_right(vec: Mapping, window: LatticeWindow, q: QParam | float) -> dict:
    """V_13 (1 (x) V) v; keys (r, m, s, n, BasisVector(j, p'))."""
    qv = _qv(q)
    mid: dict = {}
    for (b1, b2, b3), c in vec.items():
        y, z = b2.p, b3.p
        for p in window.of_sign(y.sign * z.sign):
            a = a_opt(p, y, z, qv)
            if a:
                _add(mid, (b1, b2.m - chi(z) + chi(p), b3.m + chi(y) - chi(p), BasisVector(chi(z) - chi(y), p)), a * c)
    out: dict = {}
    for (b1, s, n, bm), c in mid.items():
        x, p = b1.p, bm.p
        for p2 in window.of_sign(x.sign * p.sign):
            a = a_opt(p2, x, p, qv)
            if a:
                _add(out, (b1.m - chi(p) + chi(p2), bm.m + chi(x) - chi(p2), s, n, BasisVector(chi(p) - chi(x), p2)), a * c)
    return out


@lru_cache(maxsize=1024)
def _legs_cached(key: tuple, window: LatticeWindow, qv: float) -> tuple[dict, dict]:
    v = dict(key)
    return w_left(v, window, qv), w_right(v, window, qv)


def w_both(vec: Mapping, window: LatticeWindow, q: QParam | float) -> tuple[dict, dict]:
    """(w_left, w_right) of vec, memoised on (vec, window, q); callers must not mutate."""
    return _legs_cached(tuple(sorted(vec.items())), window, _qv(q))


def _third(act: Callable, vec: Mapping) -> dict:
    out: dict = {}
    for key, c in vec.items():
        for b, w in act(key[-1]):
            if b.p.in_lattice:
                _add(out, key[:-1] + (b,), w * c)
    return out


def _inner(u: Mapping, v: Mapping) -> complex:
    if len(v) < len(u):
        return complex(sum(u[k] * complex(c).conjugate() for k, c in v.items() if k in u))
    return complex(sum(c * complex(v[k]).conjugate() for k, c in u.items() if k in v))


_DELTA0_WORDS = {
    # Delta_0 of each generator as elementary tensors of words; a word (a, b) means a b
    "alpha": lambda q: [(1.0, ("alpha",), ("alpha",)), (q, ("e", "gamma_dag"), ("gamma",))],
    "gamma": lambda q: [(1.0, ("gamma",), ("alpha",)), (1.0, ("e", "alpha_dag"), ("gamma",))],
    "alpha_dag": lambda q: [(1.0, ("alpha_dag",), ("alpha_dag",)), (q, ("gamma", "e"), ("gamma_dag",))],
    "gamma_dag": lambda q: [(1.0, ("gamma_dag",), ("alpha_dag",)), (1.0, ("alpha", "e"), ("gamma_dag",))],
    "e": lambda q: [(1.0, ("e",), ("e",))],
}


def delta0_word(word: tuple, q: float) -> list[tuple[float, tuple, tuple]]:
    """Delta_0 of a product of generators, using multiplicativity."""
    terms = [(1.0, (), ())]
    for letter in word:
        terms = [(c * d, u1 + v1, u2 + v2) for c, u1, u2 in terms for d, v1, v2 in _DELTA0_WORDS[letter](q)]
    return terms


def _word_action(letters: tuple, q: float):
    if not letters:
        return lambda b: [(b, 1.0)]
    return _chain(*[_gen(w, q) for w in letters])


def _legwise(vec: Mapping, acts: tuple) -> dict:
    out = dict(vec)
    for leg, act in enumerate(acts):
        nxt: dict = {}
        for key, c in out.items():
            for b, w in act(key[leg]):
                _add(nxt, key[:leg] + (b,) + key[leg + 1:], w * c)
        out = nxt
    return out


def delta2_0_apply(which: str, vec: Mapping, q: QParam | float) -> ThreeLegVector:
    """Delta_0^(2)(T_0) = (Delta_0 (x) id)Delta_0(T_0) applied leg-wise."""
    qv = _qv(q)
    out: ThreeLegVector = {}
    for c0, u1, u2 in delta0_word((which,), qv):
        for c1, v1, v2 in delta0_word(u1, qv):
            acts = (_word_action(v1, qv), _word_action(v2, qv), _word_action(u2, qv))
            for key, w in _legwise(vec, acts).items():
                _add(out, key, c0 * c1 * w)
    return out


def delta2_0_apply_right(which: str, vec: Mapping, q: QParam | float) -> ThreeLegVector:
    """(id (x) Delta_0)Delta_0(T_0), which must agree with delta2_0_apply exactly."""
    qv = _qv(q)
    out: ThreeLegVector = {}
    for c0, u1, u2 in delta0_word((which,), qv):
        for c1, v1, v2 in delta0_word(u2, qv):
            acts = (_word_action(u1, qv), _word_action(v1, qv), _word_action(v2, qv))
            for key, w in _legwise(vec, acts).items():
                _add(out, key, c0 * c1 * w)
    return out


def triple_basis(x: LatticePoint, y: LatticePoint, z: LatticePoint, r: int = 0, s: int = 0, n: int = 0) -> ThreeLegVector:
    return {(BasisVector(r, x), BasisVector(s, y), BasisVector(n, z)): 1.0}


def coassoc_matrix_elements(
    which: str, pairs: Sequence[tuple[Mapping, Mapping]], window: LatticeWindow, q: QParam | float
) -> list[tuple[complex, complex, complex]]:
    """(left pipeline, right pipeline, Delta_0^(2)) matrix elements <T v, w> for each (v, w)."""
    qv = _qv(q)
    act = lambda b: generator_action(which, b, qv)  # noqa: E731
    images: dict = {}

    def image(v):
        key = tuple(sorted(v.items()))
        if key not in images:
            lv, rv = w_both(v, window, qv)
            images[key] = (_third(act, lv), _third(act, rv), delta2_0_apply(which, v, qv))
        return images[key]

    out = []
    for v, w in pairs:
        tl, tr, t0 = image(v)
        lw, rw = w_both(w, window, qv)
        left = _inner(tl, lw)
        right = _inner(tr, rw)
        exact = _inner(t0, w)
        out.append((left, right, exact))
    return out


def default_coassoc_pairs(which: str, q: QParam | float, radius: int = 1) -> list[tuple[dict, dict]]:
    """Basis triples v near the centre paired with every basis vector hit by Delta_0^(2)(T)v."""
    pts = [LatticePoint(1, k) for k in range(-radius, radius + 1)] + [LatticePoint(-1, k) for k in range(1, radius + 1)]
    pairs = []
    for x in pts:
        for y in pts:
            for z in pts:
                v = triple_basis(x, y, z)
                img = delta2_0_apply(which, v, q)
                for key in sorted(img, key=str):
                    pairs.append((v, {key: 1.0}))
                # a vector the exact image misses: its element must also vanish
                pairs.append((v, triple_basis(x, y, z, 5, -5, 0)))
    return pairs


def coassoc_residual(which: str, pairs: Sequence[tuple[Mapping, Mapping]], window: LatticeWindow, q: QParam | float) -> float:
    """max over pairs of the spread between both iterated comultiplications and Delta_0^(2).

    For T = e the check is exact: every key of W v carries p' with
    sgn(p') = sgn(x y z), so (1 (x) 1 (x) e) W v = sgn(xyz) W v key by key, and
    (e (x) e (x) e) v = sgn(xyz) v.  The residual is the largest key-wise
    violation of that sign identity, which involves no rounding.
    """
    qv = _qv(q)
    if which == "e":
        worst = 0.0
        seen = set()
        for v, _ in pairs:
            key = tuple(sorted(v.items()))
            if key in seen:
                continue
            seen.add(key)
            for wv in w_both(v, window, qv):
                ev = _third(lambda b: generator_action("e", b, qv), wv)
                for (b1, b2, b3), c in v.items():
                    sg = b1.p.sign * b2.p.sign * b3.p.sign
                    for k, val in wv.items():
                        worst = max(worst, abs(ev.get(k, 0) - sg * val))
            exact = delta2_0_apply("e", v, qv)
            for (b1, b2, b3), c in v.items():
                sg = b1.p.sign * b2.p.sign * b3.p.sign
                worst = max(worst, abs(exact.get((b1, b2, b3), 0) - sg * c))
        return worst
    worst = 0.0
    for left, right, exact in coassoc_matrix_elements(which, pairs, window, qv):
        worst = max(worst, abs(left - right), abs(left - exact), abs(right - exact))
    return worst


def u_surrogate_residual(vectors: Sequence[Mapping], window: LatticeWindow, q: QParam | float) -> tuple[float, float]:
    """(max spread, max |element|) of <(1 (x) 1 (x) u) W v, W w> between the two pipelines.

    u = rho_{-1} has no Delta_0 formula, so only the two conjugated operators are
    compared with each other, on all pairs drawn from the given vectors.
    """
    qv = _qv(q)
    act = lambda b: generator_action("u", b, qv)  # noqa: E731
    legs = [w_both(v, window, qv) for v in vectors]
    images = [(_third(act, lv), _third(act, rv)) for lv, rv in legs]
    worst = size = 0.0
    for ul, ur in images:
        for lw, rw in legs:
            a, b = _inner(ul, lw), _inner(ur, rw)
            worst = max(worst, abs(a - b))
            size = max(size, abs(a))
    return worst, size


def central_triples(radius: int = 1) -> list[ThreeLegVector]:
    pts = [LatticePoint(1, k) for k in range(-radius, radius + 1)] + [LatticePoint(-1, k) for k in range(1, radius + 1)]
    return [triple_basis(x, y, z) for x in pts for y in pts for z in pts]

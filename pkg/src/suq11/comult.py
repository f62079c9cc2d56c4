"""The eigenvectors digamma_{r,s,m,p}, the unitary V and Delta(T) = V*(1 (x) 1 (x) T)V.

Two-leg vectors are dicts keyed by (BasisVector, BasisVector).  Fourier modes are
exact integers and are never truncated; only lattice coordinates are windowed.
Sums over p in V and over x in V* run over a LatticeWindow passed explicitly, so
truncation tails can be studied by growing that window.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .coefficients import a_opt
from .operators import BasisVector, SparseOperator, generator_action, vector_norm
from .qlattice import LatticePoint, LatticeWindow, QParam, chi, sign_power

TwoLegVector = dict  # (BasisVector, BasisVector) -> complex
Action = Callable[[BasisVector], Iterable[tuple[BasisVector, complex]]]


@dataclass(frozen=True, order=True)
class DigammaIndex:
    r: int
    s: int
    m: int
    p: LatticePoint

    def __post_init__(self) -> None:
        if not self.p.in_lattice:
            raise ValueError(f"p = {self.p} is not a point of I_q")

    def line_point(self, x: LatticePoint) -> LatticePoint:
        """y = sgn(p) q^m x."""
        return LatticePoint(self.p.sign * x.sign, x.exponent + self.m)


def _qv(q: QParam | float) -> float:
    return q.q if isinstance(q, QParam) else float(q)


def _add(vec: dict, key, c: complex) -> None:
    if c != 0:
        vec[key] = vec.get(key, 0) + c


def line_in_window(idx: DigammaIndex, window: LatticeWindow) -> list[tuple[LatticePoint, LatticePoint]]:
    out = []
    for x in window:
        y = idx.line_point(x)
        if y.in_lattice and y in window:
            out.append((x, y))
    return out


def digamma_vector(idx: DigammaIndex, window: LatticeWindow, q: QParam | float) -> TwoLegVector:
    """digamma_idx restricted to x, y in the window."""
    qv = _qv(q)
    p = idx.p
    vec: TwoLegVector = {}
    for x, y in line_in_window(idx, window):
        c = a_opt(p, x, y, qv)
        if c != 0:
            key = (BasisVector(idx.r + chi(y) - chi(p), x), BasisVector(idx.s - chi(x) + chi(p), y))
            vec[key] = complex(c)
    return vec


def v_forward(vec: Mapping, p_window: LatticeWindow, q: QParam | float) -> dict:
    """<vec, digamma_idx> for every idx reachable with p in p_window."""
    qv = _qv(q)
    out: dict = {}
    for (b1, b2), c in vec.items():
        x, y = b1.p, b2.p
        for p in p_window.of_sign(x.sign * y.sign):
            w = a_opt(p, x, y, qv)
            if w != 0:
                _add(out, DigammaIndex(b1.m - chi(y) + chi(p), b2.m + chi(x) - chi(p), chi(y) - chi(x), p), w * c)
    return out


def v_inverse(table: Mapping[DigammaIndex, complex], window: LatticeWindow, q: QParam | float) -> TwoLegVector:
    """sum_idx c_idx digamma_idx restricted to the window (the adjoint of v_forward)."""
    out: TwoLegVector = {}
    for idx, c in table.items():
        for key, w in digamma_vector(idx, window, q).items():
            _add(out, key, w * c)
    return out


def _third_leg(a: Union[str, SparseOperator, Action], q: float) -> Action:
    if isinstance(a, str):
        return lambda b: generator_action(a, b, q)
    if isinstance(a, SparseOperator):
        return a.column
    return a


def apply_third_leg(a: Union[str, SparseOperator, Action], table: Mapping[DigammaIndex, complex], q: QParam | float) -> dict:
    """(1 (x) 1 (x) a) on a coefficient table over (r, s, m, p)."""
    act = _third_leg(a, _qv(q))
    out: dict = {}
    for idx, c in table.items():
        for b, w in act(BasisVector(idx.m, idx.p)):
            if b.p.in_lattice:
                _add(out, DigammaIndex(idx.r, idx.s, b.m, b.p), w * c)
    return out


def delta_apply(
    a: Union[str, SparseOperator, Action], vec: Mapping, window: LatticeWindow, q: QParam | float
) -> TwoLegVector:
    """Delta(a) vec = V*(1 (x) 1 (x) a)V vec with V, V* summed over the window."""
    return v_inverse(apply_third_leg(a, v_forward(vec, window, q), q), window, q)


# -- leg-wise algebraic comultiplication ------------------------------------------


def _leg(vec: Mapping, leg: int, act: Action) -> TwoLegVector:
    out: TwoLegVector = {}
    for (b1, b2), c in vec.items():
        src = b1 if leg == 0 else b2
        for b, w in act(src):
            _add(out, (b, b2) if leg == 0 else (b1, b), w * c)
    return out


def _gen(which: str, q: float) -> Action:
    return lambda b: generator_action(which, b, q)


def _chain(*acts: Action) -> Action:
    """Composite action, rightmost applied first."""

    def run(b: BasisVector):
        vec = {b: 1.0}
        for act in reversed(acts):
            nxt: dict = {}
            for x, c in vec.items():
                for y, w in act(x):
                    _add(nxt, y, w * c)
            vec = nxt
        return list(vec.items())

    return run


def tensor_apply(terms: Sequence[tuple[complex, Action, Action]], vec: Mapping) -> TwoLegVector:
    """sum_k c_k (A_k (x) B_k) vec."""
    out: TwoLegVector = {}
    for c, a1, a2 in terms:
        for key, w in _leg(_leg(vec, 0, a1), 1, a2).items():
            _add(out, key, c * w)
    return out


def delta0_terms(which: str, q: QParam | float) -> list[tuple[complex, Action, Action]]:
    """The algebraic Delta_0 of alpha, gamma, e as a list of elementary tensors."""
    qv = _qv(q)
    g = {w: _gen(w, qv) for w in ("alpha", "alpha_dag", "gamma", "gamma_dag", "e")}
    if which == "alpha":
        return [(1.0, g["alpha"], g["alpha"]), (qv, _chain(g["e"], g["gamma_dag"]), g["gamma"])]
    if which == "gamma":
        return [(1.0, g["gamma"], g["alpha"]), (1.0, _chain(g["e"], g["alpha_dag"]), g["gamma"])]
    if which == "e":
        return [(1.0, g["e"], g["e"])]
    raise ValueError(f"Delta_0 is tabulated for alpha, gamma, e only, not {which!r}")


def delta0_apply(which: str, vec: Mapping, q: QParam | float) -> TwoLegVector:
    return tensor_apply(delta0_terms(which, q), vec)


def _diff_norm(u: Mapping, v: Mapping, keys: Optional[Iterable] = None) -> float:
    ks = set(u) | set(v) if keys is None else keys
    return math.sqrt(math.fsum(abs(u.get(k, 0) - v.get(k, 0)) ** 2 for k in ks))


def _inside(key, window: LatticeWindow) -> bool:
    return key[0].p in window and key[1].p in window


def hopf_inclusion_residual(
    which: str, sample: Sequence[Mapping], window: LatticeWindow, sum_window: LatticeWindow, q: QParam | float
) -> float:
    """max ||Delta(T)v - Delta_0(T_0)v|| / ||v|| over samples, compared on the window.

    Delta(T) is computed through V with sums over sum_window (which should
    contain the window); the comparison only looks at keys inside the window.
    """
    worst = 0.0
    for v in sample:
        lhs = delta_apply(which, v, sum_window, q)
        rhs = delta0_apply(which, v, q)
        keys = {k for k in set(lhs) | set(rhs) if _inside(k, window)}
        nv = vector_norm(v) or 1.0
        worst = max(worst, _diff_norm(lhs, rhs, keys) / nv)
    return worst


# -- eigen-actions and symmetries -----------------------------------------------


def eigen_action_residual(
    which: str, idx: DigammaIndex, window: LatticeWindow, sum_window: LatticeWindow, q: QParam | float
) -> float:
    """||Delta(T) digamma_idx - (expected multiple of a shifted digamma)|| on the window."""
    qv = _qv(q)
    src = digamma_vector(idx, sum_window, qv)
    lhs = delta_apply(which, src, sum_window, qv)
    p = idx.p
    P = p.value(qv)
    if which == "gamma":
        exp = {k: c / P for k, c in digamma_vector(DigammaIndex(idx.r, idx.s, idx.m + 1, p), sum_window, qv).items()}
    elif which == "alpha":
        c0 = math.sqrt(max(p.sign + P ** -2, 0.0))
        tgt = DigammaIndex(idx.r, idx.s, idx.m, p.shift(1))
        exp = {k: c0 * c for k, c in digamma_vector(tgt, sum_window, qv).items()}
    elif which == "e":
        exp = {k: p.sign * c for k, c in src.items()}
    else:
        raise ValueError(f"no eigen-action tabulated for {which!r}")
    keys = {k for k in set(lhs) | set(exp) if _inside(k, window)}
    return _diff_norm(lhs, exp, keys)


def e_tensor_e_residual(vec: Mapping, window: LatticeWindow, sum_window: LatticeWindow, q: QParam | float) -> float:
    """||Delta(e) vec - (e (x) e) vec|| on the window, with V summed over sum_window."""
    return hopf_inclusion_residual("e", [vec], window, sum_window, q)


def e_eigen_residual(idx: DigammaIndex, window: LatticeWindow, q: QParam | float) -> float:
    """||(e (x) e) digamma - sgn(p) digamma||, exact on any window."""
    v = digamma_vector(idx, window, q)
    w = delta0_apply("e", v, q)
    return _diff_norm(w, {k: idx.p.sign * c for k, c in v.items()})


def breve_j(vec: Mapping) -> dict:
    """J(zeta^n delta_x) = sgn(x)^chi(x) zeta^-n delta_x, antilinear, on one leg."""
    return {BasisVector(-b.m, b.p): sign_power(b.p.sign, chi(b.p)) * complex(c).conjugate() for b, c in vec.items()}


def flip_breve(vec: Mapping) -> TwoLegVector:
    """Sigma (J (x) J) on a two-leg vector."""
    out: TwoLegVector = {}
    for (b1, b2), c in vec.items():
        k1 = BasisVector(-b1.m, b1.p)
        k2 = BasisVector(-b2.m, b2.p)
        ph = sign_power(b1.p.sign, chi(b1.p)) * sign_power(b2.p.sign, chi(b2.p))
        _add(out, (k2, k1), ph * complex(c).conjugate())
    return out


def flip_symmetry_residual(
    sample: Sequence[DigammaIndex], window: LatticeWindow, q: QParam | float, combos: int = 5, seed: int = 0
) -> float:
    """Residual of Sigma(J (x) J) digamma_{r,s,m,p} = sgn(p)^chi(p) digamma_{-s,-r,-m,p}.

    Also checks random complex combinations of the sample through antilinearity.
    """
    qv = _qv(q)
    worst = 0.0
    for idx in sample:
        lhs = flip_breve(digamma_vector(idx, window, qv))
        ph = sign_power(idx.p.sign, chi(idx.p))
        rhs = {k: ph * c for k, c in digamma_vector(DigammaIndex(-idx.s, -idx.r, -idx.m, idx.p), window, qv).items()}
        worst = max(worst, _diff_norm(lhs, rhs))
    rng = random.Random(seed)
    for _ in range(combos if sample else 0):
        coef = {idx: complex(rng.gauss(0, 1), rng.gauss(0, 1)) for idx in rng.sample(list(sample), min(4, len(sample)))}
        v: TwoLegVector = {}
        rhs: TwoLegVector = {}
        for idx, c in coef.items():
            for k, w in digamma_vector(idx, window, qv).items():
                _add(v, k, c * w)
            ph = sign_power(idx.p.sign, chi(idx.p))
            for k, w in digamma_vector(DigammaIndex(-idx.s, -idx.r, -idx.m, idx.p), window, qv).items():
                _add(rhs, k, ph * c.conjugate() * w)
        worst = max(worst, _diff_norm(flip_breve(v), rhs) / (1.0 + vector_norm(v)))
    return worst


# -- index sets, unitarity and homomorphism defect --------------------------------


def admissible_indices(
    window: LatticeWindow, min_points: int = 12, rs_range: int = 1, p_radius: int = 3
) -> list[DigammaIndex]:
    """(r, s, m, p) whose supporting line meets the window in at least min_points points."""
    out = []
    ps = [p for p in window if abs(p.exponent) <= p_radius]
    ms = range(-(window.k_max - window.k_min), window.k_max - window.k_min + 1)
    for p in ps:
        for m in ms:
            probe = DigammaIndex(0, 0, m, p)
            if len(line_in_window(probe, window)) < min_points:
                continue
            for r in range(-rs_range, rs_range + 1):
                for s in range(-rs_range, rs_range + 1):
                    out.append(DigammaIndex(r, s, m, p))
    return out


def central_basis(radius: int = 2) -> list[TwoLegVector]:
    """Unit vectors zeta^0 delta_x (x) zeta^0 delta_y with |chi(x)|, |chi(y)| <= radius."""
    pts = [LatticePoint(1, k) for k in range(-radius, radius + 1)] + [LatticePoint(-1, k) for k in range(1, radius + 1)]
    return [{(BasisVector(0, x), BasisVector(0, y)): 1.0} for x in pts for y in pts]


def isometry_defect(sample: Sequence[Mapping], window: LatticeWindow, q: QParam | float) -> float:
    """max | ||V v||^2 - ||v||^2 | / ||v||^2 with V summed over the window."""
    worst = 0.0
    for v in sample:
        n2 = vector_norm(v) ** 2
        t = v_forward(v, window, q)
        worst = max(worst, abs(math.fsum(abs(c) ** 2 for c in t.values()) - n2) / n2)
    return worst


def co_isometry_defect(sample: Sequence[DigammaIndex], window: LatticeWindow, q: QParam | float) -> float:
    """max | ||digamma_idx||^2 - 1 | on the window (V* restricted to the admissible span)."""
    return max((abs(vector_norm(digamma_vector(i, window, q)) ** 2 - 1.0) for i in sample), default=0.0)


def homomorphism_defect(
    a: str, b: str, sample: Sequence[Mapping], window: LatticeWindow, sum_window: LatticeWindow, q: QParam | float
) -> float:
    """max ||Delta(ab)v - Delta(a)Delta(b)v|| / ||v|| on the window; reported, not asserted."""
    qv = _qv(q)
    ab = _chain(_gen(a, qv), _gen(b, qv))
    worst = 0.0
    for v in sample:
        lhs = delta_apply(ab, v, sum_window, qv)
        rhs = delta_apply(a, delta_apply(b, v, sum_window, qv), sum_window, qv)
        keys = {k for k in set(lhs) | set(rhs) if _inside(k, window)}
        worst = max(worst, _diff_norm(lhs, rhs, keys) / (vector_norm(v) or 1.0))
    return worst

"""Sparse realizations of alpha, gamma, e, u, w, rho_p, M_f and Phi(m, p, t).

Operators act on the truncation {zeta^m (x) delta_p : |m| <= M, p in window} of
L^2(T) (x) L^2(I_q).  Vectors are plain dicts BasisVector -> complex.  The
untruncated action of every generator is available through ``generator_action``
so that other modules can use it on arbitrary lattice labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from .qlattice import LatticePoint, LatticeWindow, QParam, translate

Vector = dict  # BasisVector -> complex
GENERATORS = ("alpha", "alpha_dag", "gamma", "gamma_dag", "e", "u", "w")


@dataclass(frozen=True, order=True)
class BasisVector:
    m: int
    p: LatticePoint

    def __str__(self) -> str:
        return f"zeta^{self.m} (x) delta_{self.p}"


@dataclass(frozen=True)
class TruncatedSpace:
    mode_max: int
    window: LatticeWindow

    def __post_init__(self) -> None:
        if self.mode_max < 0:
            raise ValueError("mode_max must be nonnegative")

    def __contains__(self, b: object) -> bool:
        return isinstance(b, BasisVector) and abs(b.m) <= self.mode_max and b.p in self.window

    def basis(self) -> list[BasisVector]:
        pts = self.window.points()
        return [BasisVector(m, p) for m in range(-self.mode_max, self.mode_max + 1) for p in pts]

    def __len__(self) -> int:
        return (2 * self.mode_max + 1) * len(self.window)


def _qv(q: QParam | float) -> float:
    return q.q if isinstance(q, QParam) else float(q)


def rho_action(p: LatticePoint, b: BasisVector) -> list[tuple[BasisVector, complex]]:
    """rho_p (zeta^m (x) delta_t) = zeta^m (x) delta_{t/p}, zero off I_q."""
    t = translate(p.inv(), b.p)
    return [] if t is None else [(BasisVector(b.m, t), 1.0)]


def generator_action(which: str, b: BasisVector, q: QParam | float) -> list[tuple[BasisVector, complex]]:
    """Untruncated action of a generator on one basis vector."""
    qv = _qv(q)
    p = b.p
    P = p.value(qv)
    if which == "alpha":
        c = math.sqrt(max(p.sign + P ** -2, 0.0))
        t = translate(LatticePoint(1, 1), p)
        return [] if (t is None or c == 0.0) else [(BasisVector(b.m, t), c)]
    if which == "alpha_dag":
        c = math.sqrt(max(p.sign + qv * qv * P ** -2, 0.0))
        t = translate(LatticePoint(1, -1), p)
        return [] if (t is None or c == 0.0) else [(BasisVector(b.m, t), c)]
    if which == "gamma":
        return [(BasisVector(b.m + 1, p), 1.0 / P)]
    if which == "gamma_dag":
        return [(BasisVector(b.m - 1, p), 1.0 / P)]
    if which == "e":
        return [(b, float(p.sign))]
    if which == "u":
        return rho_action(LatticePoint(-1, 0), b)
    if which == "w":
        return rho_action(LatticePoint(1, -1), b)
    raise ValueError(f"unknown generator {which!r}")


def phi_action(m: int, p: LatticePoint, t: LatticePoint, b: BasisVector) -> list[tuple[BasisVector, complex]]:
    """Phi(m, p, t)(zeta^r (x) delta_x) = delta_{x,t} zeta^{m+r} (x) delta_p."""
    return [(BasisVector(m + b.m, p), 1.0)] if b.p == t else []


@dataclass
class SparseOperator:
    """Column-sparse matrix on a TruncatedSpace; images outside it are dropped."""

    space: TruncatedSpace
    cols: dict = field(default_factory=dict)  # BasisVector -> list[(BasisVector, complex)]
    dropped: set = field(default_factory=set)  # inputs whose exact image left the space

    @classmethod
    def from_action(
        cls, space: TruncatedSpace, action: Callable[[BasisVector], Iterable[tuple[BasisVector, complex]]]
    ) -> "SparseOperator":
        op = cls(space)
        for b in space.basis():
            out = []
            for c, w in action(b):
                if w == 0:
                    continue
                if c in space:
                    out.append((c, complex(w)))
                else:
                    op.dropped.add(b)
            if out:
                op.cols[b] = out
        return op

    def column(self, b: BasisVector) -> list[tuple[BasisVector, complex]]:
        return self.cols.get(b, [])


def _check_space(a: SparseOperator, b: SparseOperator) -> None:
    if a.space != b.space:
        raise ValueError("operators live on different truncated spaces")


def identity(space: TruncatedSpace) -> SparseOperator:
    return SparseOperator.from_action(space, lambda b: [(b, 1.0)])


def build_generator(which: str, space: TruncatedSpace, q: QParam | float, p: Optional[LatticePoint] = None) -> SparseOperator:
    """alpha, alpha_dag, gamma, gamma_dag, e, u, w, or rho (with p)."""
    if which == "rho":
        if not isinstance(p, LatticePoint):
            raise ValueError("rho needs a lattice point p in +-q^Z")
        return SparseOperator.from_action(space, lambda b: rho_action(p, b))
    return SparseOperator.from_action(space, lambda b: generator_action(which, b, q))


def build_phi(m: int, p: LatticePoint, t: LatticePoint, space: TruncatedSpace) -> SparseOperator:
    if not (p.in_lattice and t.in_lattice):
        raise ValueError("Phi labels p, t must lie in I_q")
    return SparseOperator.from_action(space, lambda b: phi_action(m, p, t, b))


def build_multiplication(table: Mapping[tuple[int, LatticePoint], complex], space: TruncatedSpace) -> SparseOperator:
    """M_f for f = sum c_{j,t} zeta^j (x) delta_t given as {(j, t): c}."""

    def act(b: BasisVector):
        return [(BasisVector(b.m + j, t), c) for (j, t), c in table.items() if t == b.p]

    return SparseOperator.from_action(space, act)


def translate_table(p: LatticePoint, table: Mapping[tuple[int, LatticePoint], complex]) -> dict:
    """(T_p f)(lam, x) = f(lam, p x): the entry at t moves to t/p (dropped off I_q)."""
    out: dict = {}
    for (j, t), c in table.items():
        s = translate(p.inv(), t)
        if s is not None:
            out[(j, s)] = out.get((j, s), 0) + c
    return out


def apply(a: SparseOperator, vec: Mapping[BasisVector, complex]) -> Vector:
    out: Vector = {}
    for b, c in vec.items():
        if b not in a.space:
            raise ValueError(f"{b} is outside the operator's space")
        for d, w in a.column(b):
            out[d] = out.get(d, 0) + w * c
    return {k: v for k, v in out.items() if v != 0}


def compose(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    """a o b."""
    _check_space(a, b)
    op = SparseOperator(a.space)
    for x, col in b.cols.items():
        img = apply(a, dict(col))
        if img:
            op.cols[x] = list(img.items())
    op.dropped = set(b.dropped)
    op.dropped |= {x for x, col in b.cols.items() if any(y in a.dropped for y, _ in col)}
    return op


def adjoint(a: SparseOperator) -> SparseOperator:
    op = SparseOperator(a.space)
    rows: dict = {}
    for x, col in a.cols.items():
        for y, w in col:
            rows.setdefault(y, []).append((x, complex(w).conjugate()))
    op.cols = rows
    return op


def add(a: SparseOperator, b: SparseOperator, ca: complex = 1.0, cb: complex = 1.0) -> SparseOperator:
    _check_space(a, b)
    op = SparseOperator(a.space)
    for x in set(a.cols) | set(b.cols):
        v: dict = {}
        for y, w in a.column(x):
            v[y] = v.get(y, 0) + ca * w
        for y, w in b.column(x):
            v[y] = v.get(y, 0) + cb * w
        v = {k: c for k, c in v.items() if c != 0}
        if v:
            op.cols[x] = list(v.items())
    op.dropped = a.dropped | b.dropped
    return op


def scale(a: SparseOperator, c: complex) -> SparseOperator:
    op = SparseOperator(a.space)
    op.cols = {x: [(y, c * w) for y, w in col] for x, col in a.cols.items()} if c != 0 else {}
    op.dropped = set(a.dropped)
    return op


def vector_norm(vec: Mapping[BasisVector, complex]) -> float:
    return math.sqrt(math.fsum(abs(c) ** 2 for c in vec.values()))


def column_difference(a: SparseOperator, b: SparseOperator, x: BasisVector) -> float:
    d: dict = {}
    for y, w in a.column(x):
        d[y] = d.get(y, 0) + w
    for y, w in b.column(x):
        d[y] = d.get(y, 0) - w
    return vector_norm(d)


# -- relations -------------------------------------------------------------------


@dataclass
class RelationReport:
    residuals: dict  # relation name -> max interior residual
    interior: dict  # relation name -> number of interior basis vectors
    boundary: dict  # relation name -> number of excluded boundary vectors

    @property
    def residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0


class _Chain:
    """A product of generators evaluated exactly, with a flag for truncation."""

    def __init__(self, space: TruncatedSpace, q: float) -> None:
        self.space = space
        self.q = q

    def run(self, factors: list, b: BasisVector) -> tuple[Vector, bool]:
        """Apply factors right-to-left; factors are callables BasisVector -> list."""
        vec: Vector = {b: 1.0}
        clean = True
        for f in reversed(factors):
            out: Vector = {}
            for x, c in vec.items():
                for y, w in f(x):
                    if y not in self.space:
                        clean = False
                        continue
                    out[y] = out.get(y, 0) + w * c
            vec = out
        return vec, clean


def _combo(chain: _Chain, terms: list, b: BasisVector) -> tuple[Vector, float, bool]:
    """Sum of the terms applied to b, the largest term norm, and the interior flag."""
    total: Vector = {}
    scale_ = 0.0
    clean = True
    for coef, factors in terms:
        v, ok = chain.run(factors, b)
        clean = clean and ok
        scale_ = max(scale_, abs(coef) * vector_norm(v))
        for k, c in v.items():
            total[k] = total.get(k, 0) + coef * c
    return total, scale_, clean


def _rho_samples() -> list[LatticePoint]:
    return [LatticePoint(-1, 0), LatticePoint(1, -1), LatticePoint(1, 1), LatticePoint(-1, 1), LatticePoint(-1, -1)]


def relations_residual(space: TruncatedSpace, q: QParam | float) -> RelationReport:
    """Max interior residual of the defining relations and the rho-calculus.

    Residuals are relative to max(1, largest term norm), so entries like
    p^{-2} at the small end of the window do not inflate rounding error.

    A basis vector is interior for a relation when no intermediate image in any
    product of that relation leaves the truncated space.
    """
    qv = _qv(q)
    g = {w: (lambda b, w=w: generator_action(w, b, qv)) for w in GENERATORS}
    one = lambda b: [(b, 1.0)]  # noqa: E731
    rels: dict[str, list] = {
        "alpha*alpha - gamma*gamma = e": [(1, [g["alpha_dag"], g["alpha"]]), (-1, [g["gamma_dag"], g["gamma"]]), (-1, [g["e"]])],
        "alpha alpha* - q^2 gamma*gamma = e": [
            (1, [g["alpha"], g["alpha_dag"]]),
            (-qv * qv, [g["gamma_dag"], g["gamma"]]),
            (-1, [g["e"]]),
        ],
        "gamma*gamma = gamma gamma*": [(1, [g["gamma_dag"], g["gamma"]]), (-1, [g["gamma"], g["gamma_dag"]])],
        "alpha gamma = q gamma alpha": [(1, [g["alpha"], g["gamma"]]), (-qv, [g["gamma"], g["alpha"]])],
        "alpha gamma* = q gamma* alpha": [(1, [g["alpha"], g["gamma_dag"]]), (-qv, [g["gamma_dag"], g["alpha"]])],
        "alpha e = e alpha": [(1, [g["alpha"], g["e"]]), (-1, [g["e"], g["alpha"]])],
        "gamma e = e gamma": [(1, [g["gamma"], g["e"]]), (-1, [g["e"], g["gamma"]])],
        "w e = e w": [(1, [g["w"], g["e"]]), (-1, [g["e"], g["w"]])],
        "u e = -e u": [(1, [g["u"], g["e"]]), (1, [g["e"], g["u"]])],
        "e^2 = 1": [(1, [g["e"], g["e"]]), (-1, [one])],
        "u^2 = i_{-1}": [
            (1, [g["u"], g["u"]]),
            (-1, [lambda b: rho_action(LatticePoint(-1, 0), b), lambda b: rho_action(LatticePoint(-1, 0), b)]),
        ],
    }
    for p in _rho_samples():
        for t in _rho_samples():
            rp = lambda b, p=p: rho_action(p, b)  # noqa: E731
            rt = lambda b, t=t: rho_action(t, b)  # noqa: E731
            rpt = lambda b, p=p, t=t: rho_action(p * t, b)  # noqa: E731
            rt_adj = lambda b, t=t: rho_action(t.inv(), b)  # noqa: E731
            rels[f"rho_{p} rho_{t} = rho_{p * t} i_{t}"] = [(1, [rp, rt]), (-1, [rpt, rt_adj, rt])]
    fsample = {(1, LatticePoint(1, 0)): 0.5, (0, LatticePoint(-1, 2)): -1.25, (-1, LatticePoint(1, 3)): 2.0j}
    fmul = lambda tab: (lambda b: [(BasisVector(b.m + j, t), c) for (j, t), c in tab.items() if t == b.p])  # noqa: E731
    for p in _rho_samples():
        rp = lambda b, p=p: rho_action(p, b)  # noqa: E731
        rels[f"rho_{p} M_f = M_(T_p f) rho_{p}"] = [(1, [rp, fmul(fsample)]), (-1, [fmul(translate_table(p, fsample)), rp])]

    chain = _Chain(space, qv)
    residuals: dict = {}
    interior: dict = {}
    boundary: dict = {}
    basis = space.basis()
    for name, terms in rels.items():
        worst, n_in, n_out = 0.0, 0, 0
        for b in basis:
            vec, size, clean = _combo(chain, terms, b)
            if not clean:
                n_out += 1
                continue
            n_in += 1
            worst = max(worst, vector_norm(vec) / max(1.0, size))
        residuals[name] = worst
        interior[name] = n_in
        boundary[name] = n_out
    # adjoint rules on the truncation: e* = e, rho_p* = rho_{p^-1}, u* = u
    e = build_generator("e", space, qv)
    residuals["e* = e"] = max((column_difference(adjoint(e), e, b) for b in basis), default=0.0)
    u = build_generator("u", space, qv)
    residuals["u* = u"] = max((column_difference(adjoint(u), u, b) for b in basis), default=0.0)
    for p in _rho_samples():
        rp = build_generator("rho", space, qv, p)
        rinv = build_generator("rho", space, qv, p.inv())
        residuals[f"rho_{p}* = rho_{p.inv()}"] = max(column_difference(adjoint(rp), rinv, b) for b in basis)
    return RelationReport(residuals, interior, boundary)

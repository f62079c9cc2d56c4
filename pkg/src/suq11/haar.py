"""Haar weight layer: GNS vectors f_{m,p,t}, Lambda, phi, modular data, the
multiplicative unitary W*, left invariance, slice functionals and the antipode triple.

Everything that is exact in principle is computed exactly: PhiElement
coefficients are QScalar values, finite sums c * q^(a + i b) with Gaussian
rational c and rational a, b, so S, R, tau, sigma and phi compose without
rounding.  Only W*-related sums are numeric.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .coefficients import a_opt
from .comult import delta_apply
from .operators import BasisVector, phi_action
from .qlattice import LatticePoint, LatticeWindow, QParam, chi, sign_power

Rational = Union[int, Fraction]


def _qv(q: QParam | float) -> float:
    return q.q if isinstance(q, QParam) else float(q)


# -- exact scalars ----------------------------------------------------------------


@dataclass(frozen=True)
class QScalar:
    """sum_k c_k q^(a_k + i b_k) with Gaussian rational c_k; stored as a sorted tuple."""

    terms: tuple = ()  # ((a, b), (re, im)) with Fractions

    @classmethod
    def of(cls, c: Union[Rational, tuple] = 1, re_exp: Rational = 0, im_exp: Rational = 0) -> "QScalar":
        cr, ci = (c if isinstance(c, tuple) else (c, 0))
        return cls._build({(Fraction(re_exp), Fraction(im_exp)): (Fraction(cr), Fraction(ci))})

    @classmethod
    def _build(cls, d: Mapping) -> "QScalar":
        return cls(tuple(sorted((k, v) for k, v in d.items() if v != (0, 0))))

    def __add__(self, other: "QScalar") -> "QScalar":
        d = dict(self.terms)
        for k, (r, i) in other.terms:
            r0, i0 = d.get(k, (Fraction(0), Fraction(0)))
            d[k] = (r0 + r, i0 + i)
        return QScalar._build(d)

    def __neg__(self) -> "QScalar":
        return QScalar(tuple((k, (-r, -i)) for k, (r, i) in self.terms))

    def __sub__(self, other: "QScalar") -> "QScalar":
        return self + (-other)

    def __mul__(self, other: "QScalar") -> "QScalar":
        d: dict = {}
        for (a1, b1), (r1, i1) in self.terms:
            for (a2, b2), (r2, i2) in other.terms:
                k = (a1 + a2, b1 + b2)
                r0, i0 = d.get(k, (Fraction(0), Fraction(0)))
                d[k] = (r0 + r1 * r2 - i1 * i2, i0 + r1 * i2 + i1 * r2)
        return QScalar._build(d)

    def conjugate(self) -> "QScalar":
        return QScalar._build({(a, -b): (r, -i) for (a, b), (r, i) in self.terms})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def value(self, q: QParam | float) -> complex:
        lq = math.log(_qv(q))
        return sum(
            complex(float(r), float(i)) * complex(math.exp(float(a) * lq)) * complex(math.cos(float(b) * lq), math.sin(float(b) * lq))
            for (a, b), (r, i) in self.terms
        )


ZERO = QScalar()
UNIT = QScalar.of(1)


def _gauss(z) -> tuple[Fraction, Fraction]:
    """z as a Gaussian rational: accepts int, Fraction, complex with exact parts, or a pair."""
    if isinstance(z, tuple):
        return Fraction(z[0]), Fraction(z[1])
    if isinstance(z, complex):
        return Fraction(z.real).limit_denominator(10**6), Fraction(z.imag).limit_denominator(10**6)
    return Fraction(z), Fraction(0)


def _q_power_i(d: Rational, z) -> QScalar:
    """q^(i z d) for rational d and Gaussian rational z."""
    zr, zi = _gauss(z)
    d = Fraction(d)
    # i (zr + i zi) d = -zi d + i zr d
    return QScalar.of(1, -zi * d, zr * d)


# -- labels and elements ----------------------------------------------------------


@dataclass(frozen=True, order=True)
class GNSIndex:
    m: int
    p: LatticePoint
    t: LatticePoint

    def __post_init__(self) -> None:
        if not (self.p.in_lattice and self.t.in_lattice):
            raise ValueError(f"labels ({self.p}, {self.t}) must lie in I_q")

    def __str__(self) -> str:
        return f"({self.m},{self.p},{self.t})"


@dataclass(frozen=True)
class PhiElement:
    """Finite combination sum c_l Phi(l) with QScalar coefficients."""

    terms: tuple = ()  # ((GNSIndex, QScalar), ...), sorted by label

    @classmethod
    def from_dict(cls, d: Mapping[GNSIndex, QScalar]) -> "PhiElement":
        return cls(tuple(sorted(((k, v) for k, v in d.items() if not v.is_zero), key=lambda kv: kv[0])))

    @classmethod
    def single(cls, m: int, p: LatticePoint, t: LatticePoint, c: QScalar = UNIT) -> "PhiElement":
        return cls.from_dict({GNSIndex(m, p, t): c})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "PhiElement") -> "PhiElement":
        d = self.as_dict()
        for k, v in other.terms:
            d[k] = d.get(k, ZERO) + v
        return PhiElement.from_dict(d)

    def scale(self, c: QScalar) -> "PhiElement":
        return PhiElement.from_dict({k: v * c for k, v in self.terms})

    def __sub__(self, other: "PhiElement") -> "PhiElement":
        return self + other.scale(QScalar.of(-1))

    def __mul__(self, other: "PhiElement") -> "PhiElement":
        """Phi(m1,p1,t1) Phi(m2,p2,t2) = delta_{p2,t1} Phi(m1+m2,p1,t2)."""
        d: dict = {}
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                if k2.p == k1.t:
                    k = GNSIndex(k1.m + k2.m, k1.p, k2.t)
                    d[k] = d.get(k, ZERO) + c1 * c2
        return PhiElement.from_dict(d)

    def star(self) -> "PhiElement":
        return PhiElement.from_dict({GNSIndex(-k.m, k.t, k.p): c.conjugate() for k, c in self.terms})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def action(self, b: BasisVector, q: QParam | float) -> list[tuple[BasisVector, complex]]:
        """Action on zeta^r (x) delta_x (numeric coefficients)."""
        out = []
        for k, c in self.terms:
            for d, w in phi_action(k.m, k.p, k.t, b):
                out.append((d, w * c.value(q)))
        return out


def _map(x: PhiElement, f) -> PhiElement:
    """Linear extension of a label map f: GNSIndex -> (GNSIndex, QScalar)."""
    d: dict = {}
    for k, c in x.terms:
        k2, s = f(k)
        d[k2] = d.get(k2, ZERO) + c * s
    return PhiElement.from_dict(d)


# -- Lambda, phi, modular data ----------------------------------------------------


def lambda_map(x: PhiElement, q: QParam | float) -> dict:
    """Lambda(Phi(m,p,t)) = |t|^-1 f_{m,p,t}; returns {GNSIndex: complex}."""
    return {k: c.value(q) * _qv(q) ** (-k.t.exponent) for k, c in x.terms}


def lambda_exact(x: PhiElement) -> dict:
    return {k: c * QScalar.of(1, -k.t.exponent) for k, c in x.terms}


def weight_exact(x: PhiElement) -> QScalar:
    """phi(Phi(m,p,t)) = delta_{m,0} delta_{p,t} t^-2, linearly extended."""
    out = ZERO
    for k, c in x.terms:
        if k.m == 0 and k.p == k.t:
            out = out + c * QScalar.of(1, -2 * k.t.exponent)
    return out


def weight_value(x: PhiElement, q: QParam | float) -> complex:
    return weight_exact(x).value(q)


def modular_data(idx: GNSIndex) -> tuple[GNSIndex, int, QScalar]:
    """(J f_idx label, its phase, nabla eigenvalue |t/p|^2 as an exact q-power)."""
    return GNSIndex(-idx.m, idx.t, idx.p), 1, QScalar.of(1, 2 * (idx.t.exponent - idx.p.exponent))


def nabla_is(idx: GNSIndex, s) -> QScalar:
    """nabla^{is} on f_idx: |t/p|^{2is}."""
    return _q_power_i(2 * (idx.t.exponent - idx.p.exponent), s)


def modular_group(x: PhiElement, z) -> PhiElement:
    """sigma_z(Phi(m,p,t)) = |p^-1 t|^{2iz} Phi(m,p,t)."""
    return _map(x, lambda k: (k, _q_power_i(2 * (k.t.exponent - k.p.exponent), z)))


def modular_compatibility_residual(labels: Sequence[GNSIndex], s_values: Sequence) -> int:
    """Number of (label, s) where nabla^{is} on Lambda(Phi) differs from the sigma_s scalar."""
    bad = 0
    for k in labels:
        for s in s_values:
            sig = modular_group(PhiElement.single(k.m, k.p, k.t), s).as_dict().get(k, ZERO)
            if (sig - nabla_is(k, s)).terms:
                bad += 1
    return bad


def j_involution_residual(labels: Sequence[GNSIndex]) -> int:
    """Number of labels where J J f != f or J is not a bijection on the label set."""
    labels = list(dict.fromkeys(labels))
    bad = 0
    images = set()
    for k in labels:
        j1, ph1, _ = modular_data(k)
        j2, ph2, _ = modular_data(j1)
        if j2 != k or ph1 * ph2 != 1:
            bad += 1
        images.add(j1)
    return bad + (len(labels) - len(images))


# -- antipode family ----------------------------------------------------------------


def _flip_phase(k: GNSIndex) -> int:
    return sign_power(k.p.sign, chi(k.p)) * sign_power(k.t.sign, chi(k.t))


def antipode(x: PhiElement) -> PhiElement:
    """S(Phi(m,p,t)) = sgn(p)^chi(p) sgn(t)^chi(t) (-1)^m q^m Phi(m,t,p)."""
    return _map(x, lambda k: (GNSIndex(k.m, k.t, k.p), QScalar.of(_flip_phase(k) * sign_power(-1, k.m), k.m)))


def unitary_antipode(x: PhiElement) -> PhiElement:
    """R(Phi(m,p,t)) = sgn(p)^chi(p) sgn(t)^chi(t) (-1)^m Phi(m,t,p), linearly extended."""
    return _map(x, lambda k: (GNSIndex(k.m, k.t, k.p), QScalar.of(_flip_phase(k) * sign_power(-1, k.m))))


def scaling(x: PhiElement, z) -> PhiElement:
    """tau_z(Phi(m,p,t)) = q^{2miz} Phi(m,p,t)."""
    return _map(x, lambda k: (k, _q_power_i(2 * k.m, z)))


def breve_r(x: PhiElement) -> PhiElement:
    """J x* J with J the breve conjugation: Phi(m,p,t) -> sgn powers * Phi(m,t,p), linearly extended."""
    return _map(x, lambda k: (GNSIndex(k.m, k.t, k.p), QScalar.of(_flip_phase(k))))


def _diff(a: PhiElement, b: PhiElement) -> int:
    """Number of labels where the exact coefficients differ."""
    da, db = a.as_dict(), b.as_dict()
    return sum(1 for k in set(da) | set(db) if (da.get(k, ZERO) - db.get(k, ZERO)).terms)


def antipode_identities(sample: Sequence[PhiElement]) -> dict[str, int]:
    """Exact mismatch counts for the antipode algebra on the sample (all 0 when it holds)."""
    mi2 = (0, Fraction(-1, 2))
    checks = {
        "S^2 = tau_{-i}": lambda x: _diff(antipode(antipode(x)), scaling(x, (0, -1))),
        "S = R tau_{-i/2}": lambda x: _diff(antipode(x), unitary_antipode(scaling(x, mi2))),
        "R^2 = id": lambda x: _diff(unitary_antipode(unitary_antipode(x)), x),
        "tau group law": lambda x: _diff(scaling(scaling(x, (Fraction(1, 3), Fraction(1, 2))), (Fraction(-2), Fraction(1, 4))), scaling(x, (Fraction(-5, 3), Fraction(3, 4)))),
        "R tau = tau R": lambda x: _diff(unitary_antipode(scaling(x, (Fraction(1, 2), 0))), scaling(unitary_antipode(x), (Fraction(1, 2), 0))),
        "breve R = (-1)^m R": lambda x: _diff(
            breve_r(x), _map(unitary_antipode(x), lambda k: (k, QScalar.of(sign_power(-1, k.m))))
        ),
        "breve R^2 = id": lambda x: _diff(breve_r(breve_r(x)), x),
        "S anti-multiplicative": lambda x: _diff(antipode(x * x.star()), antipode(x.star()) * antipode(x)),
    }
    return {name: sum(f(x) for x in sample) for name, f in checks.items()}


def breve_r_weight_residual(sample: Sequence[PhiElement], q: QParam | float) -> float:
    """max |phi(x) - phi(R(x))|; computed exactly, so any nonzero value is a true mismatch."""
    worst = 0.0
    for x in sample:
        d = weight_exact(x) - weight_exact(breve_r(x))
        if d.terms:
            worst = max(worst, abs(d.value(q)), 1e-300)
    return worst


def random_labels(n: int, seed: int, radius: int = 4, mode_max: int = 6) -> list[GNSIndex]:
    rng = random.Random(seed)

    def point() -> LatticePoint:
        if rng.random() < 0.35:
            return LatticePoint(-1, rng.randint(1, radius))
        return LatticePoint(1, rng.randint(-radius, radius))

    return [GNSIndex(rng.randint(-mode_max, mode_max), point(), point()) for _ in range(n)]


def random_elements(n: int, seed: int, terms: int = 3) -> list[PhiElement]:
    """Random PhiElements with Gaussian rational coefficients, diagonal labels included."""
    rng = random.Random(seed)
    labels = random_labels(n * terms, seed + 1)
    out = []
    for i in range(n):
        d = {}
        for k in labels[i * terms:(i + 1) * terms]:
            if rng.random() < 0.3:
                k = GNSIndex(0, k.t, k.t)
            d[k] = QScalar.of((Fraction(rng.randint(-9, 9), rng.randint(1, 5)), Fraction(rng.randint(-9, 9), rng.randint(1, 5))))
        out.append(PhiElement.from_dict(d))
    return out


def i_operator_residual(sample: Sequence[PhiElement], space_points: Sequence[LatticePoint], modes: int, q: QParam | float) -> float:
    """max || R(x) - I x* I || on basis vectors, I(zeta^n delta_x) = (-1)^n sgn(x)^chi(x) zeta^-n delta_x."""
    qv = _qv(q)

    def i_op(vec: dict) -> dict:
        return {BasisVector(-b.m, b.p): sign_power(-1, b.m) * sign_power(b.p.sign, chi(b.p)) * complex(c).conjugate() for b, c in vec.items()}

    def act(x: PhiElement, vec: dict) -> dict:
        out: dict = {}
        for b, c in vec.items():
            for d, w in x.action(b, qv):
                out[d] = out.get(d, 0) + w * c
        return out

    worst = 0.0
    for x in sample:
        rx = unitary_antipode(x)
        xs = x.star()
        for n in range(-modes, modes + 1):
            for p in space_points:
                v = {BasisVector(n, p): 1.0}
                lhs = act(rx, v)
                rhs = i_op(act(xs, i_op(v)))
                for k in set(lhs) | set(rhs):
                    worst = max(worst, abs(lhs.get(k, 0) - rhs.get(k, 0)))
    return worst


# -- the multiplicative unitary --------------------------------------------------------


GNSPair = tuple  # (GNSIndex, GNSIndex)


def _w_point(p1: LatticePoint, p2: LatticePoint, t2: LatticePoint, m2: int, y: LatticePoint, z: LatticePoint) -> LatticePoint:
    """sgn(p2 t2)(y z / p1) q^{m2}."""
    return LatticePoint(p2.sign * t2.sign * y.sign * z.sign * p1.sign, y.exponent + z.exponent - p1.exponent + m2)


def w_star_apply(inp: GNSPair, window: LatticeWindow, q: QParam | float) -> dict:
    """W*(f_{m1,p1,t1} (x) f_{m2,p2,t2}) with y, z summed over the window."""
    qv = _qv(q)
    a, b = inp
    m1, p1, t1 = a.m, a.p, a.t
    m2, p2, t2 = b.m, b.p, b.t
    out: dict = {}
    T2 = qv ** t2.exponent
    for y in window:
        c1 = a_opt(t2, p1, y, qv)
        if c1 == 0:
            continue
        c1 *= T2 / qv ** y.exponent
        for z in window:
            w = _w_point(p1, p2, t2, m2, y, z)
            if not w.in_lattice:
                continue
            c2 = a_opt(p2, z, w, qv)
            if c2 == 0:
                continue
            k = p1.exponent + p2.exponent - t2.exponent - z.exponent
            key = (GNSIndex(m1 + m2 - k, z, t1), GNSIndex(k, w, y))
            out[key] = out.get(key, 0.0) + c1 * c2
    return out


def w_star_element(inp: GNSPair, out: GNSPair, q: QParam | float) -> float:
    """<W*(f_a (x) f_b), f_c (x) f_d>: the expansion has at most one term matching (c, d)."""
    qv = _qv(q)
    a, b = inp
    c, d = out
    z, y, w = c.p, d.t, d.p
    if c.t != a.t:
        return 0.0
    k = a.p.exponent + b.p.exponent - b.t.exponent - z.exponent
    if d.m != k or c.m != a.m + b.m - k:
        return 0.0
    if _w_point(a.p, b.p, b.t, b.m, y, z) != w:
        return 0.0
    return qv ** (b.t.exponent - y.exponent) * a_opt(b.t, a.p, y, qv) * a_opt(b.p, z, w, qv)


def central_pairs(n: int, seed: int, radius: int = 2, mode_max: int = 1) -> list[GNSPair]:
    labels = sorted(set(random_labels(4 * n, seed, radius=radius, mode_max=mode_max)))
    rng = random.Random(seed)
    pairs: set = set()
    while len(pairs) < n:
        pairs.add((rng.choice(labels), rng.choice(labels)))
    return sorted(pairs)


def w_star_gram(pairs: Sequence[GNSPair], window: LatticeWindow, q: QParam | float):
    """Gram matrix of the truncated images W*(f (x) f) over the given input pairs."""
    import numpy as np

    imgs = [w_star_apply(pr, window, q) for pr in pairs]
    n = len(imgs)
    g = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            a, b = imgs[i], imgs[j]
            if len(b) < len(a):
                a, b = b, a
            v = math.fsum(c * b[k] for k, c in a.items() if k in b)
            g[i, j] = g[j, i] = v
    return g


def w_star_isometry_defect(pairs: Sequence[GNSPair], window: LatticeWindow, q: QParam | float) -> float:
    import numpy as np

    g = w_star_gram(pairs, window, q)
    return float(np.max(np.abs(g - np.eye(len(pairs)))))


# -- left invariance -------------------------------------------------------------------


def _phi_third_leg(m: int, p: LatticePoint, t: LatticePoint):
    return lambda b: phi_action(m, p, t, b)


def left_invariance_sides(
    f1: GNSIndex, f2: GNSIndex, x: GNSIndex, v: LatticePoint, window: LatticeWindow, q: QParam | float
) -> tuple[dict, dict]:
    """Both sides of Lambda((omega pi (x) id)Delta(Phi) Phi(0,v,v)) = J pi(Phi(0,v,v)) J (omega (x) id)(W*) Lambda(Phi).

    omega = omega_{f1,f2}.  The left side conjugates the third leg through V (the
    comult pipeline); the right side reads the W* expansion.  Both are returned as
    {GNSIndex: value} over outputs f_{n,b,v}.
    """
    qv = _qv(q)
    lhs: dict = {}
    if f1.t == f2.t:
        start = {(BasisVector(f1.m, f1.p), BasisVector(0, v)): 1.0}
        img = delta_apply(_phi_third_leg(x.m, x.p, x.t), start, window, qv)
        scale = qv ** (-v.exponent)
        for (b1, b2), c in img.items():
            if b1 == BasisVector(f2.m, f2.p):
                lhs[GNSIndex(b2.m, b2.p, v)] = lhs.get(GNSIndex(b2.m, b2.p, v), 0) + scale * c
    rhs: dict = {}
    lam = qv ** (-x.t.exponent)
    for (c1, c2), w in w_star_apply((f1, x), window, qv).items():
        if c1 == f2 and c2.t == v:
            rhs[c2] = rhs.get(c2, 0) + lam * w
    return lhs, rhs


def left_invariance_residual(
    f1: GNSIndex, f2: GNSIndex, x: GNSIndex, v_list: Iterable[LatticePoint], window: LatticeWindow, q: QParam | float
) -> float:
    worst = 0.0
    for v in v_list:
        lhs, rhs = left_invariance_sides(f1, f2, x, v, window, q)
        for k in set(lhs) | set(rhs):
            worst = max(worst, abs(lhs.get(k, 0) - rhs.get(k, 0)))
    return worst


# -- slice functionals -------------------------------------------------------------------


def slice_functional_apply(
    m: tuple[int, int, int, int], p: LatticePoint, t: LatticePoint, g: GNSIndex, window: LatticeWindow, q: QParam | float
) -> dict:
    """(id (x) omega)(W*) f_g for the weighted sum of vector functionals omega over x, y in the window."""
    qv = _qv(q)
    m1, m2, m3, m4 = m
    out: dict = {}
    for x in window:
        for y in window:
            u = LatticePoint(p.sign * x.sign, x.exponent + m3)
            s = LatticePoint(t.sign * y.sign, y.exponent + m4)
            if not (u.in_lattice and s.in_lattice):
                continue
            coef = (
                sign_power(x.sign, chi(x)) * sign_power(y.sign, chi(y)) * sign_power(-1, chi(x) + chi(y))
                * qv ** (x.exponent + y.exponent) * a_opt(p, u, x, qv) * a_opt(t, s, y, qv)
            )
            if coef == 0:
                continue
            d = x.exponent - y.exponent
            fa = GNSIndex(m1 + d, u, s)
            fb = GNSIndex(m2 + d, x, y)
            # <W*(g (x) fa), h (x) fb>: h is fixed by the second leg
            k = fb.m
            zexp = g.p.exponent + fa.p.exponent - fa.t.exponent - k
            # w = sgn(p2 t2)(y z / p1) q^{m2} with p1 = g.p, (m2, p2, t2) = fa, y = fb.t, must equal fb.p
            zsign = fb.p.sign * fa.p.sign * fa.t.sign * fb.t.sign * g.p.sign
            z = LatticePoint(zsign, zexp)
            if not z.in_lattice:
                continue
            h = GNSIndex(g.m + fa.m - k, z, g.t)
            val = w_star_element((g, fa), (h, fb), qv)
            if val != 0:
                out[h] = out.get(h, 0.0) + coef * val
    return out


def slice_functional_expected(m: tuple[int, int, int, int], p: LatticePoint, t: LatticePoint, g: GNSIndex, q: QParam | float) -> dict:
    """t^2 q^{-m1-m3} (-1)^{m2} delta delta pi(Phi(m1-m2, p, t)) f_g."""
    qv = _qv(q)
    m1, m2, m3, m4 = m
    if chi(t) - chi(p) != m1 or m3 - m4 != m2 - m1 or g.p != t:
        return {}
    c = qv ** (2 * t.exponent - m1 - m3) * sign_power(-1, m2)
    return {GNSIndex(m1 - m2 + g.m, p, g.t): c}


def slice_functional_residual(
    m: tuple[int, int, int, int], p: LatticePoint, t: LatticePoint, tests: Sequence[GNSIndex], window: LatticeWindow, q: QParam | float
) -> float:
    worst = 0.0
    for g in tests:
        got = slice_functional_apply(m, p, t, g, window, q)
        exp = slice_functional_expected(m, p, t, g, q)
        for k in set(got) | set(exp):
            worst = max(worst, abs(got.get(k, 0) - exp.get(k, 0)))
    return worst

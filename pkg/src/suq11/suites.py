"""Check suites: run module checks under one configuration and collect CheckReports.

Every check has an id, its parameters, a residual and a tolerance, and passes
iff residual <= tolerance.  Report-only checks carry an infinite tolerance.
Random draws come from per-check generators seeded by (seed, check id), so a
suite is reproducible and independent of the order checks run in.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import coassoc, coefficients, comult, haar, operators, qseries
from .qlattice import LatticePoint, LatticeWindow, QParam

SUITES = (
    "qseries-identities",
    "ap-orthogonality",
    "operator-relations",
    "comult",
    "haar",
    "coassoc",
    "racah",
)

# nested window growths for the Gram sequences and the coassociativity sweep
GRAM_GROWTHS = (4, 8, 12)
COASSOC_GROWTHS = (4, 8, 12)
# interior relations are exact up to rounding of a few products
MACHINE_TOL = 1e-15


class ConfigError(ValueError):
    """Invalid run configuration or command-line usage."""


@dataclass(frozen=True)
class RunConfig:
    q: float = 0.5
    k_min: int = -8
    k_max: int = 14
    negative_k_max: int = 8
    mode_max: int = 6
    tol: Optional[float] = None  # overrides every asserted tolerance when set
    seed: int = 42
    output_format: str = "json"
    growth: int = 20  # extra lattice points on each side for truncated sums

    def __post_init__(self) -> None:
        if not (isinstance(self.q, (int, float)) and 0.0 < self.q < 1.0):
            raise ConfigError(f"q must satisfy 0 < q < 1, got {self.q}")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.k_min > self.k_max:
            raise ConfigError(f"empty window: kmin {self.k_min} > kmax {self.k_max}")
        if self.negative_k_max < 1:
            raise ConfigError("negkmax must be at least 1")
        if self.mode_max < 0:
            raise ConfigError("mmax must be nonnegative")
        if self.growth < 0:
            raise ConfigError("growth must be nonnegative")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.output_format!r}")

    @property
    def window(self) -> LatticeWindow:
        return LatticeWindow(self.k_min, self.k_max, self.negative_k_max)

    @property
    def sum_window(self) -> LatticeWindow:
        return self.window.grow(self.growth)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class CheckReport:
    check: str
    params: dict
    residual: float
    tolerance: float
    passed: bool
    runtime_ms: float = field(default=0.0, compare=False)

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
        }


class _Runner:
    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.reports: list[CheckReport] = []

    def rng(self, check: str) -> random.Random:
        return random.Random(f"{self.config.seed}:{check}")

    def check(
        self,
        check: str,
        params: dict,
        tolerance: float,
        fn: Callable[[], float | tuple[float, dict]],
        report_only: bool = False,
        fixed: bool = False,
    ) -> float:
        """Run fn and record its residual; fixed tolerances (exact counts) ignore --tol."""
        t0 = time.perf_counter()
        out = fn()
        ms = (time.perf_counter() - t0) * 1000.0
        residual, extra = (out if isinstance(out, tuple) else (out, {}))
        residual = float(residual)
        if report_only:
            tol = math.inf
        elif fixed or self.config.tol is None:
            tol = tolerance
        else:
            tol = self.config.tol
        ok = bool(residual <= tol)
        self.reports.append(CheckReport(check, {**params, **extra}, residual, tol, ok, round(ms, 3)))
        return residual


def _lp(x: LatticePoint) -> str:
    return str(x)


def _cplx(rng: random.Random, lo: float, hi: float) -> complex:
    """Random complex number with log-uniform modulus in [lo, hi]."""
    r = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    t = rng.uniform(0.0, 2.0 * math.pi)
    return complex(r * math.cos(t), r * math.sin(t))


# -- qseries ----------------------------------------------------------------------------


def identity_params(case: str, rng: random.Random) -> dict:
    """One random parameter set inside the domain of an identity."""
    if case == "theta":
        return {"a": _cplx(rng, 0.1, 3.0), "k": rng.randint(-8, 8)}
    if case == "psi_symmetry":
        return {"a": _cplx(rng, 0.05, 3.0), "b": _cplx(rng, 1e-3, 3.0), "z": _cplx(rng, 0.05, 3.0)}
    if case == "transform_shift":
        return {"a": _cplx(rng, 0.1, 2.0), "z": _cplx(rng, 0.1, 2.0), "k": rng.randint(-5, 5)}
    if case == "transform_terminating":
        return {"a": _cplx(rng, 0.05, 2.0), "z": _cplx(rng, 0.2, 2.0), "k": rng.randint(0, 6)}
    if case in ("contiguous1", "contiguous2"):
        return {"a": _cplx(rng, 0.05, 3.0), "b": _cplx(rng, 0.05, 3.0), "z": _cplx(rng, 0.05, 3.0)}
    if case == "heine":
        return {"a": _cplx(rng, 0.05, 2.0), "b": _cplx(rng, 0.05, 2.0), "z": _cplx(rng, 0.05, 0.9)}
    raise ValueError(f"no sampler for {case!r}")


def _jsonable(p: dict) -> dict:
    return {k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in p.items()}


LIMIT_CASES = (
    {"a": 0.4, "b": -0.2, "c": 0.3, "z": 0.5},
    {"a": -1.5, "b": 0.7, "c": -0.6, "z": -1.2},
)


def bound_grid() -> list[tuple[complex, int, complex]]:
    """50 (a, k, z) points for the bound dominance check."""
    avals = (0.0, 0.5, -2.0, 1 + 1j, 3j)
    zvals = (0.1, -0.5, 1.0, 2.0, -3.0, 0.5j, 1 + 1j, 4.0, -6.0, 10.0)
    ks = (0, 1, 3, 5)
    out = []
    for i, a in enumerate(avals):
        for j, z in enumerate(zvals):
            out.append((a, ks[(i + j) % len(ks)], z))
    return out


def _suite_qseries(r: _Runner) -> None:
    q = r.config.q
    for case in ("theta", "psi_symmetry", "transform_shift", "transform_terminating", "contiguous1", "contiguous2",
                 "heine"):
        cid = f"qseries.identity.{case}"

        def run(case=case, cid=cid):
            rng = r.rng(cid)
            worst, at = 0.0, None
            for _ in range(100):
                p = identity_params(case, rng)
                res = qseries.identity_residuals(case, p, q)
                if not res <= worst:
                    worst, at = res, p
            return worst, {"worst_params": _jsonable(at) if at else None}

        r.check(cid, {"q": q, "instances": 100}, 1e-10, run)

    for i, p in enumerate(LIMIT_CASES):
        seq = qseries.limit_residuals(p, q)
        r.check(f"qseries.limit.{i}", {"q": q, **p, "points": len(seq)}, 1e-8, lambda seq=seq: seq[-1])
        # monotone decay down to the rounding floor
        ups = sum(1 for u, v in zip(seq, seq[1:]) if v > u and v > 1e-14)
        r.check(f"qseries.limit.{i}.monotone", {"q": q, "sequence": seq}, 0, lambda ups=ups: ups, fixed=True)

    def bound():
        worst = 0.0
        for a, k, z in bound_grid():
            val = abs(qseries.psi(a, q ** (1 - k), z, q).value)
            worst = max(worst, val / qseries.psi_bound(a, k, z, q) - 1.0)
        return max(worst, 0.0)

    r.check("qseries.bound-dominance", {"q": q, "points": 50}, 1e-12, bound, fixed=True)


# -- a_p ----------------------------------------------------------------------------------

AP_THETAS = (LatticePoint(1, 2), LatticePoint(1, 0), LatticePoint(1, -2), LatticePoint(-1, 1), LatticePoint(-1, -1))


def random_triples(n: int, rng: random.Random, radius: int = 6) -> list[coefficients.APoint]:
    """In-support (p, x, y); every tenth triple has the boundary point x = -q."""

    def point() -> LatticePoint:
        if rng.random() < 0.3:
            return LatticePoint(-1, rng.randint(1, radius))
        return LatticePoint(1, rng.randint(-radius + 2, radius + 2))

    out = []
    for i in range(n):
        x = LatticePoint(-1, 1) if i % 10 == 0 else point()
        y = point()
        p = point()
        while p.sign != x.sign * y.sign:
            p = point()
        out.append(coefficients.APoint(p, x, y))
    return out


def _suite_ap(r: _Runner) -> None:
    q, w = r.config.q, r.config.window
    for th in AP_THETAS:
        tag = f"theta={_lp(th)}"
        p_list = coefficients.default_p_list(th, w)
        xy = coefficients.central_xy(th)
        params = {"q": q, "growths": list(GRAM_GROWTHS), "rows": len(p_list), "columns": len(xy)}
        ortho: list[float] = []
        dual: list[float] = []

        def sweep(th=th, p_list=p_list, xy=xy, ortho=ortho, dual=dual):
            for g in GRAM_GROWTHS:
                ortho.append(coefficients.orthogonality_gram(th, w.grow(g), q, p_list).deviation)
                dual.append(coefficients.dual_gram(th, w.grow(g), q, xy).deviation)
            return ortho[-1], {"sweep": list(ortho)}

        r.check(f"ap.orthonormality.{tag}", params, 1e-8, sweep)
        r.check(f"ap.duality.{tag}", {**params, "sweep": dual}, 1e-8, lambda v=dual[-1]: v)
        devs = [max(a, b) for a, b in zip(ortho, dual)]
        steps = sum(1 for a, b in zip(devs, devs[1:]) if not b < a)
        r.check(f"ap.nested-decrease.{tag}", {**params, "sweep": devs}, 0, lambda s=steps: s, fixed=True)

    triples = random_triples(200, r.rng("ap.triples"))
    boundary = sum(1 for t in triples if t.x == LatticePoint(-1, 1))
    tp = {"q": q, "triples": 200, "boundary_x=-q": boundary}
    r.check("ap.symmetry", tp, 1e-10, lambda: max(max(coefficients.symmetry_residuals(t, q)) for t in triples))
    r.check("ap.recurrence.alpha", tp, 1e-10, lambda: max(coefficients.recurrence_residuals(t, q)[0] for t in triples))
    r.check("ap.recurrence.gamma", tp, 1e-10, lambda: max(coefficients.recurrence_residuals(t, q)[1] for t in triples))

    p = LatticePoint(1, 1)
    pts = [(LatticePoint(1, k), LatticePoint(1, k + 1)) for k in range(-2, 3)]
    r.check(
        "ap.second-order-eigen",
        {"q": q, "r": 0, "s": 0, "m": 1, "p": _lp(p), "points": 5},
        1e-9,
        lambda: coefficients.second_order_eigen_residual(0, 0, 1, p, pts, [(1, 1), (1j, 1j), (1, 1j), (1j, 1)], q),
    )


# -- operators ---------------------------------------------------------------------------


def _suite_operators(r: _Runner) -> None:
    q = r.config.q
    space = operators.TruncatedSpace(r.config.mode_max, r.config.window)
    t0 = time.perf_counter()
    rep = operators.relations_residual(space, q)
    each = (time.perf_counter() - t0) * 1000.0 / max(len(rep.residuals), 1)
    for name, res in rep.residuals.items():
        r.check(
            f"operators.{name}",
            {"q": q, "interior": rep.interior.get(name), "boundary": rep.boundary.get(name)},
            MACHINE_TOL,
            lambda res=res: res,
            fixed=True,
        )
        r.reports[-1].runtime_ms = round(each, 3)


# -- comult ------------------------------------------------------------------------------


def _suite_comult(r: _Runner) -> None:
    q, w, sw = r.config.q, r.config.window, r.config.sum_window
    adm = comult.admissible_indices(w)
    sample = r.rng("comult.sample").sample(adm, min(30, len(adm)))
    base = {"q": q, "growth": r.config.growth}
    ip = {**base, "indices": len(sample), "admissible": len(adm)}
    for which in ("gamma", "alpha", "e"):
        r.check(
            f"comult.eigen.{which}", ip, 1e-9,
            lambda which=which: max(comult.eigen_action_residual(which, i, w, sw, q) for i in sample),
        )
    r.check("comult.e-tensor-e.digamma", ip, 0, lambda: max(comult.e_eigen_residual(i, w, q) for i in sample), fixed=True)
    cb = comult.central_basis(2)
    vp = {**base, "vectors": len(cb)}
    r.check("comult.e-tensor-e", vp, 1e-9, lambda: comult.hopf_inclusion_residual("e", cb, w, sw, q))
    for which in ("gamma", "alpha"):
        r.check(
            f"comult.hopf-inclusion.{which}", vp, 1e-9,
            lambda which=which: comult.hopf_inclusion_residual(which, cb, w, sw, q),
        )
    r.check("comult.flip-symmetry", ip, 1e-10, lambda: comult.flip_symmetry_residual(sample, w, q, seed=r.config.seed))
    r.check("comult.isometry", vp, 1e-8, lambda: comult.isometry_defect(cb, sw, q))
    r.check("comult.co-isometry", ip, 1e-8, lambda: comult.co_isometry_defect(sample, sw, q))
    few = comult.central_basis(1)[:5]
    r.check(
        "comult.homomorphism-defect",
        {**base, "vectors": len(few), "products": ["alpha gamma", "gamma_dag gamma"]},
        0,
        lambda: max(
            comult.homomorphism_defect("alpha", "gamma", few, w, sw, q),
            comult.homomorphism_defect("gamma_dag", "gamma", few, w, sw, q),
        ),
        report_only=True,
    )


# -- haar --------------------------------------------------------------------------------

_Q = LatticePoint
LEFT_INVARIANCE_SAMPLES = (
    (haar.GNSIndex(0, _Q(1, 1), _Q(1, 1)), haar.GNSIndex(0, _Q(1, 1), _Q(1, 1)), haar.GNSIndex(0, _Q(1, 1), _Q(1, 1))),
    # violates the vanishing condition: both sides are empty
    (haar.GNSIndex(1, _Q(-1, 2), _Q(1, 1)), haar.GNSIndex(0, _Q(1, 0), _Q(1, 1)), haar.GNSIndex(-1, _Q(-1, 1), _Q(1, 2))),
    (haar.GNSIndex(1, _Q(-1, 1), _Q(-1, 2)), haar.GNSIndex(0, _Q(1, -2), _Q(-1, 2)), haar.GNSIndex(1, _Q(1, 1), _Q(1, 2))),
    (haar.GNSIndex(0, _Q(1, 0), _Q(1, 2)), haar.GNSIndex(1, _Q(1, 1), _Q(1, 2)), haar.GNSIndex(1, _Q(1, 2), _Q(-1, 1))),
)
LEFT_INVARIANCE_V = tuple(_Q(1, k) for k in range(-3, 4)) + (_Q(-1, 1), _Q(-1, 2))
SLICE_CASES = (
    ((1, 1, -1, -1), _Q(1, 2), _Q(1, 3)),
    ((1, 0, -1, -1), _Q(1, 2), _Q(1, 3)),  # m3 - m4 != m2 - m1: slice vanishes
    ((0, 0, 0, 0), _Q(1, 2), _Q(1, 3)),  # chi(t/p) != m1: slice vanishes
)
SLICE_GROWTHS = (0, 4, 8)
SLICE_TESTS = (
    haar.GNSIndex(0, _Q(1, 3), _Q(1, 1)),
    haar.GNSIndex(1, _Q(1, 3), _Q(-1, 2)),
    haar.GNSIndex(0, _Q(1, 2), _Q(1, 2)),
)


def _suite_haar(r: _Runner) -> None:
    q, sw = r.config.q, r.config.sum_window
    base = {"q": q, "growth": r.config.growth}
    pairs = haar.central_pairs(50, r.config.seed)
    r.check("haar.w-star-gram", {**base, "pairs": 50}, 1e-6, lambda: haar.w_star_isometry_defect(pairs, sw, q))
    for i, (f1, f2, x) in enumerate(LEFT_INVARIANCE_SAMPLES):

        def li(f1=f1, f2=f2, x=x):
            size = 0.0
            for v in LEFT_INVARIANCE_V:
                lhs, _ = haar.left_invariance_sides(f1, f2, x, v, sw, q)
                size = max([size] + [abs(c) for c in lhs.values()])
            return haar.left_invariance_residual(f1, f2, x, LEFT_INVARIANCE_V, sw, q), {"max_abs_element": size}

        r.check(f"haar.left-invariance.{i}", {**base, "omega": [str(f1), str(f2)], "x": str(x)}, 1e-6, li)
    for i, (m, p, t) in enumerate(SLICE_CASES):

        def sl(m=m, p=p, t=t):
            # the functional sum has no explicit tail constant: its tail shows in the nested-window sweep
            growths = [g for g in SLICE_GROWTHS if g < r.config.growth] + [r.config.growth]
            sweep = [haar.slice_functional_residual(m, p, t, SLICE_TESTS, r.config.window.grow(g), q) for g in growths]
            return sweep[-1], {"sweep": sweep, "growths": growths}

        r.check(
            f"haar.slice-functional.{i}",
            {**base, "m": list(m), "p": _lp(p), "t": _lp(t), "tests": [str(g) for g in SLICE_TESTS]},
            1e-6,
            sl,
        )
    elems = haar.random_elements(100, r.config.seed)
    ids = haar.antipode_identities(elems)
    for name, bad in ids.items():
        r.check(f"haar.antipode.{name}", {"elements": 100, "unit": "mismatched labels"}, 0, lambda bad=bad: bad, fixed=True)
    r.check("haar.weight-breve-r", {"q": q, "elements": 100}, 0, lambda: haar.breve_r_weight_residual(elems, q), fixed=True)
    labels = haar.random_labels(100, r.config.seed)
    svals = [1, (0, Fraction(1, 2)), (Fraction(2, 3), 1)]
    r.check(
        "haar.modular-compatibility", {"labels": 100, "s": ["1", "i/2", "2/3+i"]}, 0,
        lambda: haar.modular_compatibility_residual(labels, svals), fixed=True,
    )
    r.check("haar.j-involution", {"labels": 100}, 0, lambda: haar.j_involution_residual(labels), fixed=True)
    pts = [_Q(1, k) for k in range(-3, 4)] + [_Q(-1, k) for k in range(1, 4)]
    r.check(
        "haar.i-operator", {"q": q, "elements": 10, "modes": 3}, 0,
        lambda: haar.i_operator_residual(elems[:10], pts, 3, q), fixed=True,
    )


# -- coassociativity -----------------------------------------------------------------------

# theta in base q^2: q^2, 1, q^-2, -1, -q^2
FG_THETAS = (LatticePoint(1, 1), LatticePoint(1, 0), LatticePoint(1, -1), LatticePoint(-1, 0), LatticePoint(-1, 1))


def _suite_coassoc(r: _Runner) -> None:
    q, w = r.config.q, r.config.window
    for th in FG_THETAS:
        tag = f"theta={_lp(th)}"
        k = th.exponent
        ps = [LatticePoint(th.sign, 1), LatticePoint(th.sign, 2)]
        grid = coassoc.OmegaGrid(th, w.grow(4), q)
        gp = {"q": q, "base": "q^2", "growth": 4, "m": [-1, 0, 1], "p": [_lp(p) for p in ps]}
        for kind in ("F", "G"):
            r.check(
                f"coassoc.eigen-shift.{kind}.{tag}", gp, 1e-8,
                lambda kind=kind: max(coassoc.eigen_shift_residual(kind, k, m, p, grid) for m in (-1, 0, 1) for p in ps),
            )
        for kind in ("F", "G"):
            idx = [coassoc.FGIndex(kind, k, m, p) for m in (-1, 0, 1) for p in ps]
            r.check(
                f"coassoc.gram.{kind}.{tag}", {**gp, "growth": 8}, 1e-6,
                lambda idx=idx: coassoc.fg_gram(th, w.grow(8), idx, q).deviation,
            )
        r.check(
            f"coassoc.adjointness.{tag}", {**gp, "pairs": 5}, 1e-12,
            lambda grid=grid: coassoc.adjointness_residual(grid, seed=r.config.seed),
        )

    base = {"q": q, "growths": list(COASSOC_GROWTHS)}
    pairs_e = coassoc.default_coassoc_pairs("e", q)
    r.check(
        "coassoc.e", {**base, "pairs": len(pairs_e)}, 0,
        lambda: max(coassoc.coassoc_residual("e", pairs_e, w.grow(g), q) for g in COASSOC_GROWTHS), fixed=True,
    )
    for which in ("gamma", "alpha"):
        pairs = coassoc.default_coassoc_pairs(which, q)
        sweep = []

        def run(which=which, pairs=pairs, sweep=sweep):
            for g in COASSOC_GROWTHS:
                sweep.append(coassoc.coassoc_residual(which, pairs, w.grow(g), q))
            return sweep[-1], {"sweep": list(sweep)}

        r.check(f"coassoc.{which}", {**base, "pairs": len(pairs)}, 1e-5, run)
        steps = sum(1 for a, b in zip(sweep, sweep[1:]) if not b < a)
        r.check(f"coassoc.{which}.decrease", {**base, "sweep": list(sweep)}, 0, lambda s=steps: s, fixed=True)
    vecs = coassoc.central_triples(1)
    g = COASSOC_GROWTHS[-1]

    def usur():
        spread, size = coassoc.u_surrogate_residual(vecs, w.grow(g), q)
        return spread, {"max_abs_element": size}

    r.check("coassoc.u-surrogate", {"q": q, "growth": g, "vectors": len(vecs)}, 1e-5, usur)


# -- Racah -------------------------------------------------------------------------------

RACAH_THETA = LatticePoint(1, 0)
RACAH_M = tuple(range(-7, 8))
RACAH_P = (LatticePoint(1, 1), LatticePoint(1, 2))


def _suite_racah(r: _Runner) -> None:
    q, w = r.config.q, r.config.window
    t0 = time.perf_counter()
    rep = coassoc.racah_matrix(RACAH_THETA, w.grow(4), list(RACAH_M), list(RACAH_P), q)
    ms = (time.perf_counter() - t0) * 1000.0
    params = {
        "q": q,
        "theta": _lp(RACAH_THETA),
        "growth": 4,
        "m": list(RACAH_M),
        "p": [_lp(p) for p in RACAH_P],
        "rows": [str(i) for i in rep.f_labels],
        "columns": [str(i) for i in rep.g_labels],
    }
    r.check("racah.orthogonality", params | {"matrix": rep.matrix.round(15).tolist()}, 0, lambda: rep.orthogonality, report_only=True)
    r.reports[-1].runtime_ms = round(ms, 3)
    r.check("racah.p-offdiagonal", {"q": q, "theta": _lp(RACAH_THETA)}, 0, lambda: rep.max_p_offdiag, report_only=True)


_SUITE_FUNCS = {
    "qseries-identities": _suite_qseries,
    "ap-orthogonality": _suite_ap,
    "operator-relations": _suite_operators,
    "comult": _suite_comult,
    "haar": _suite_haar,
    "coassoc": _suite_coassoc,
    "racah": _suite_racah,
}


def run_suite(name: str, config: RunConfig) -> list[CheckReport]:
    """Run one suite (or 'all') and return its reports sorted by check id."""
    if name == "all":
        names = SUITES
    elif name in _SUITE_FUNCS:
        names = (name,)
    else:
        raise ConfigError(f"unknown suite {name!r}; expected one of {', '.join(SUITES + ('all',))}")
    r = _Runner(config)
    for n in names:
        _SUITE_FUNCS[n](r)
    return sorted(r.reports, key=lambda rep: rep.check)

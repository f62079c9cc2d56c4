from __future__ import annotations

import math

import pytest

from suq11.comult import (
    DigammaIndex,
    admissible_indices,
    breve_j,
    central_basis,
    co_isometry_defect,
    delta0_apply,
    delta_apply,
    digamma_vector,
    e_eigen_residual,
    e_tensor_e_residual,
    eigen_action_residual,
    flip_breve,
    flip_symmetry_residual,
    hopf_inclusion_residual,
    homomorphism_defect,
    isometry_defect,
    v_forward,
    v_inverse,
)
from suq11.operators import BasisVector, vector_norm
from suq11.qlattice import LatticePoint, LatticeWindow
from suq11.suites import RunConfig

L = LatticePoint
Q = 0.5
REF = LatticeWindow(-8, 14, 8)
SUM = RunConfig().sum_window
IDX = DigammaIndex(0, 0, 1, L(1, 1))


def test_digamma_supported_on_its_line():
    for (b1, b2), _ in digamma_vector(IDX, REF, Q).items():
        assert b2.p == IDX.line_point(b1.p)
    with pytest.raises(ValueError):
        DigammaIndex(0, 0, 0, L(-1, 0))


def test_digamma_norm_tends_to_one():
    defects = [abs(vector_norm(digamma_vector(IDX, REF.grow(g), Q)) ** 2 - 1) for g in (0, 4, 8)]
    assert defects[0] > defects[1] > defects[2]
    assert abs(vector_norm(digamma_vector(IDX, SUM, Q)) ** 2 - 1) <= 1e-12


def test_v_forward_of_digamma_is_unit_coefficient():
    out = v_forward(digamma_vector(IDX, SUM, Q), SUM, Q)
    assert out[IDX] == pytest.approx(1.0, abs=1e-10)
    assert max(abs(c) for k, c in out.items() if k != IDX) <= 1e-10


def test_parseval_on_sum_window():
    v = {(BasisVector(0, L(1, 1)), BasisVector(1, L(-1, 2))): 0.6, (BasisVector(0, L(1, 0)), BasisVector(0, L(1, 2))): 0.8j}
    assert isometry_defect([v], SUM, Q) <= 1e-10


def test_v_inverse_is_adjoint_of_v_forward():
    table = {IDX: 1.0, DigammaIndex(1, -1, 0, L(-1, 2)): 0.5j}
    vec = v_inverse(table, SUM, Q)
    back = v_forward(vec, SUM, Q)
    for k, c in table.items():
        assert back[k] == pytest.approx(c, abs=1e-10)


def test_hopf_inclusion_example_gamma():
    v = {(BasisVector(0, L(1, 1)), BasisVector(0, L(1, 1))): 1.0}
    assert hopf_inclusion_residual("gamma", [v], REF, SUM, Q) <= 1e-9


def test_delta_of_image_matches_eigen_action():
    # Delta(gamma) on v_inverse(unit at idx) is p^-1 times the digamma with m + 1
    vec = v_inverse({IDX: 1.0}, SUM, Q)
    lhs = delta_apply("gamma", vec, SUM, Q)
    rhs = {k: c / IDX.p.value(Q) for k, c in digamma_vector(DigammaIndex(0, 0, 2, IDX.p), SUM, Q).items()}
    keys = {k for k in set(lhs) | set(rhs) if k[0].p in REF and k[1].p in REF}
    assert math.sqrt(sum(abs(lhs.get(k, 0) - rhs.get(k, 0)) ** 2 for k in keys)) <= 1e-9


def test_eigen_actions_on_sample():
    for idx in (IDX, DigammaIndex(1, 0, -2, L(-1, 1)), DigammaIndex(0, -1, 0, L(1, -2))):
        for which in ("gamma", "alpha", "e"):
            assert eigen_action_residual(which, idx, REF, SUM, Q) <= 1e-9
        assert e_eigen_residual(idx, REF, Q) == 0.0
    with pytest.raises(ValueError):
        eigen_action_residual("u", IDX, REF, SUM, Q)


def test_e_tensor_e():
    for v in central_basis(1):
        assert e_tensor_e_residual(v, REF, SUM, Q) <= 1e-9
        ee = delta0_apply("e", v, Q)
        (b1, b2), c = next(iter(v.items()))
        assert ee == {(b1, b2): b1.p.sign * b2.p.sign * c}


def test_flip_plain_when_phase_is_one():
    idx = DigammaIndex(1, -2, 1, L(1, 2))  # sgn(p)^chi(p) = 1
    lhs = flip_breve(digamma_vector(idx, REF, Q))
    rhs = digamma_vector(DigammaIndex(2, -1, -1, idx.p), REF, Q)
    assert set(lhs) == set(rhs)
    assert max(abs(lhs[k] - rhs[k]) for k in rhs) <= 1e-12


def test_flip_random_combinations():
    sample = [IDX, DigammaIndex(0, 1, -1, L(-1, 1)), DigammaIndex(-1, 0, 2, L(-1, 3)), DigammaIndex(1, 1, 0, L(1, 0))]
    assert flip_symmetry_residual(sample, REF, Q, combos=10, seed=1) <= 1e-10


def test_breve_j_is_an_involution():
    v = {BasisVector(2, L(-1, 3)): 1 + 2j, BasisVector(-1, L(1, -2)): 0.5}
    assert breve_j(breve_j(v)) == v


def test_admissible_indices_and_co_isometry():
    adm = admissible_indices(REF)
    assert adm and all(isinstance(i, DigammaIndex) for i in adm)
    assert co_isometry_defect(adm[:10], SUM, Q) <= 1e-8


def test_homomorphism_defect_is_finite_and_reported():
    v = central_basis(1)[:2]
    d = homomorphism_defect("alpha", "gamma", v, REF, SUM, Q)
    assert math.isfinite(d) and d >= 0

from __future__ import annotations

import frozen
import pytest

from suq11.coassoc import (
    FGIndex,
    OmegaGrid,
    adjointness_residual,
    central_triples,
    coassoc_residual,
    default_coassoc_pairs,
    delta2_0_apply,
    delta2_0_apply_right,
    eigen_shift_residual,
    fg_eval,
    fg_gram,
    fg_series,
    omega_weight,
    racah_matrix,
    triple_basis,
)
from suq11.qlattice import LatticePoint, LatticeWindow

L = LatticePoint
Q = 0.5
REF = LatticeWindow(-8, 14, 8)


@pytest.mark.parametrize("row", frozen.F_VALUES, ids=lambda r: f"k={r[0]},m={r[1]},p={r[2]}")
def test_f_matches_closed_form_oracle(row):
    k, m, p, x, y, ref = row
    sv = fg_series(FGIndex("F", k, m, L(*p)), L(*x), L(*y), Q)
    assert abs(sv.value - ref) <= 1e-12 * max(abs(ref), 1e-3)
    assert abs(sv.value - ref) <= sv.error_bound + 1e-15


def test_g_is_f_with_swapped_arguments():
    p = L(1, 1)
    for m in (-1, 0, 2):
        for x, y in ((L(1, 1), L(1, 2)), (L(1, 0), L(1, -1)), (L(-1, 1), L(-1, 2))):
            assert fg_eval(FGIndex("G", 1, m, p), x, y, Q) == fg_eval(FGIndex("F", 1, -m, p), y, x, Q)


def test_f_support_zero():
    # sgn(p y) |y| q^{-2m} outside I_{q^2}: p > 0, y < 0, m = 1 gives -q^0 = -1
    assert fg_eval(FGIndex("F", 0, 1, L(1, 1)), L(-1, 1), L(-1, 1), Q) == 0.0


def test_fg_rejects_points_outside_k_theta():
    with pytest.raises(ValueError):
        fg_eval(FGIndex("F", 0, 0, L(1, 1)), L(-1, 1), L(1, -1), Q)  # theta x y = -1
    with pytest.raises(ValueError):
        FGIndex("H", 0, 0, L(1, 1))
    with pytest.raises(ValueError):
        FGIndex("F", 0, 0, L(-1, 0))


def test_omega_weight_positive_and_grid_membership():
    th = L(1, 0)
    grid = OmegaGrid(th, LatticeWindow(-3, 4, 3), Q)
    pts = grid.points()
    assert pts and all((th * x * y).in_lattice for x, y in pts)
    assert all(omega_weight(th, x, y, Q) > 0 for x, y in pts[:20])


def test_eigen_shift_examples():
    grid = OmegaGrid(L(1, 1), REF.grow(4), Q)
    for m in (-1, 0, 1):
        assert eigen_shift_residual("F", 1, m, L(1, 1), grid) <= 1e-8
        assert eigen_shift_residual("G", 1, m, L(1, 2), grid) <= 1e-8
    with pytest.raises(ValueError):
        eigen_shift_residual("H", 1, 0, L(1, 1), grid)


def test_gram_example_theta_q2():
    idx = [FGIndex("F", 1, m, p) for m in (-1, 0, 1) for p in (L(1, 1), L(1, 2))]
    rep = fg_gram(L(1, 1), REF.grow(8), idx, Q)
    assert rep.deviation <= 1e-6
    with pytest.raises(ValueError):
        fg_gram(L(1, 0), REF, idx, Q)


def test_adjointness_example():
    assert adjointness_residual(OmegaGrid(L(-1, 1), REF.grow(4), Q), seed=3) <= 1e-12


def test_delta2_0_legs_agree_on_e():
    for v in central_triples(1)[:6]:
        assert delta2_0_apply("e", v, Q) == delta2_0_apply_right("e", v, Q)


def test_e_coassociativity_exact():
    pairs = default_coassoc_pairs("e", Q)
    assert coassoc_residual("e", pairs, REF.grow(4), Q) == 0.0


def test_triple_basis_is_unit():
    v = triple_basis(L(1, 1), L(-1, 1), L(1, 0), 1, 0, -1)
    assert list(v.values()) == [1.0]


def test_coassoc_reports(reports):
    rs = reports("coassoc")
    for which in ("alpha", "gamma"):
        r = rs[f"coassoc.{which}"]
        assert r.passed and r.residual <= 1e-5
        sweep = r.params["sweep"]
        assert all(b < a for a, b in zip(sweep, sweep[1:]))
    assert rs["coassoc.e"].residual == 0
    assert rs["coassoc.u-surrogate"].residual <= 1e-5
    assert all(r.passed for r in rs.values())


def test_racah_small_matrix_near_orthogonal():
    rep = racah_matrix(L(1, 0), REF.grow(4), list(range(-5, 6)), [L(1, 1)], Q)
    assert rep.matrix.shape == (11, 11)
    assert rep.orthogonality <= 1e-5
    assert rep.max_p_offdiag == 0.0

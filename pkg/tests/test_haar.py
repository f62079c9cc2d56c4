from __future__ import annotations

from fractions import Fraction

import frozen
import pytest

from suq11.haar import (
    GNSIndex,
    PhiElement,
    QScalar,
    antipode,
    antipode_identities,
    breve_r_weight_residual,
    i_operator_residual,
    j_involution_residual,
    lambda_map,
    left_invariance_sides,
    modular_compatibility_residual,
    modular_group,
    random_elements,
    random_labels,
    slice_functional_residual,
    unitary_antipode,
    w_star_apply,
    w_star_element,
    weight_value,
)
from suq11.qlattice import LatticePoint, LatticeWindow

L = LatticePoint
Q = 0.5
ORACLE_WINDOW = LatticeWindow(-10, 16, 10)


def G(t):
    m, p, tt = t
    return GNSIndex(m, L(*p), L(*tt))


def test_qscalar_arithmetic_exact():
    a = QScalar.of(2, 1)
    b = QScalar.of((1, 1), Fraction(1, 2), 3)
    assert (a + b - b) == a
    assert (a * QScalar.of(Fraction(1, 2), -1)).value(Q) == pytest.approx(1.0)
    assert b.conjugate().conjugate() == b


def test_phi_element_product_and_star():
    x = PhiElement.single(1, L(1, 1), L(-1, 2))
    y = PhiElement.single(-1, L(-1, 2), L(1, 0))
    assert x * y == PhiElement.single(0, L(1, 1), L(1, 0))
    assert (x * PhiElement.single(0, L(1, 3), L(1, 3))).is_zero
    assert x.star() == PhiElement.single(-1, L(-1, 2), L(1, 1))


def test_lambda_and_weight():
    x = PhiElement.single(0, L(1, 2), L(1, 2), QScalar.of(3))
    assert lambda_map(x, Q)[GNSIndex(0, L(1, 2), L(1, 2))] == pytest.approx(3 * Q**-2)
    assert weight_value(x, Q) == pytest.approx(3 * Q**-4)
    assert weight_value(PhiElement.single(1, L(1, 2), L(1, 2)), Q) == 0


def test_w_star_matches_double_loop_oracle():
    inp = (G((0, (1, 1), (1, 1))), G((0, (1, 1), (1, 1))))
    got = w_star_apply(inp, ORACLE_WINDOW, Q)
    for key, ref in frozen.W_STAR_00:
        k = (G(key[0]), G(key[1]))
        assert abs(got.get(k, 0.0) - ref) <= 1e-12 * max(1.0, abs(ref))
        assert w_star_element(inp, k, Q) == pytest.approx(got[k], rel=1e-13, abs=1e-300)
    oracle_keys = {(G(a), G(b)) for (a, b), _ in frozen.W_STAR_00}
    extra = [v for k, v in got.items() if k[1].p in ORACLE_WINDOW and k not in oracle_keys]
    assert max(map(abs, extra), default=0.0) <= 1e-6


def test_w_star_element_selection_rules():
    a, b = G((0, (1, 1), (1, 1))), G((1, (1, 2), (-1, 1)))
    assert w_star_element((a, b), (G((0, (1, 0), (1, 2))), G((0, (1, 0), (1, 0)))), Q) == 0.0


def test_w_star_gram_report(reports):
    r = reports("haar")["haar.w-star-gram"]
    assert r.passed and r.residual <= 1e-6


def test_left_invariance_reports(reports):
    rs = reports("haar")
    for i in range(4):
        assert rs[f"haar.left-invariance.{i}"].residual <= 1e-6


def test_left_invariance_vanishing_sample_is_empty():
    f1 = GNSIndex(1, L(-1, 2), L(1, 1))
    f2 = GNSIndex(0, L(1, 0), L(1, 1))
    x = GNSIndex(-1, L(-1, 1), L(1, 2))
    lhs, rhs = left_invariance_sides(f1, f2, x, L(1, 1), LatticeWindow(-6, 10, 6), Q)
    assert not any(abs(c) > 1e-15 for c in list(lhs.values()) + list(rhs.values()))


def test_slice_functional_example():
    tests = [GNSIndex(0, L(1, 3), L(1, 1)), GNSIndex(1, L(1, 3), L(-1, 2))]
    assert slice_functional_residual((1, 1, -1, -1), L(1, 2), L(1, 3), tests, LatticeWindow(-12, 18, 12), Q) <= 1e-6


def test_antipode_identities_exact():
    ids = antipode_identities(random_elements(100, 0))
    assert ids and all(v == 0 for v in ids.values())


def test_antipode_single_label():
    x = PhiElement.single(1, L(-1, 1), L(1, 2))
    # sgn(-q)^chi(-q) = -1, (-1)^1 = -1, so the phase is +1 and q^1 appears
    assert antipode(x) == PhiElement.single(1, L(1, 2), L(-1, 1), QScalar.of(1, 1))
    assert unitary_antipode(x) == PhiElement.single(1, L(1, 2), L(-1, 1))


def test_modular_group_half_i():
    x = PhiElement.single(0, L(1, 1), L(1, 3))
    got = modular_group(x, (0, Fraction(1, 2))).as_dict()[GNSIndex(0, L(1, 1), L(1, 3))]
    # |p^-1 t|^{2 i (i/2)} = |t/p|^-1 = q^-2
    assert got.value(Q) == pytest.approx(Q**-2)


def test_modular_and_involution_counts():
    labels = random_labels(100, 0)
    assert modular_compatibility_residual(labels, [1, (0, Fraction(1, 2)), (Fraction(2, 3), 1)]) == 0
    assert j_involution_residual(labels) == 0


def test_weight_and_i_operator():
    elems = random_elements(20, 4)
    assert breve_r_weight_residual(elems, Q) == 0.0
    pts = [L(1, k) for k in range(-2, 3)] + [L(-1, 1)]
    assert i_operator_residual(elems[:5], pts, 2, Q) <= 1e-12

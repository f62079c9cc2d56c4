from __future__ import annotations

import math
import random

import frozen
import oracles
import pytest

from suq11.qlattice import QParam
from suq11.qseries import (
    IDENTITIES,
    SeriesValue,
    identity_residuals,
    limit_residuals,
    phi_aux,
    poch_finite,
    poch_inf,
    psi,
    psi_bound,
    psi_lattice,
    psi_lattice_series,
    two_phi_one,
)

Q = 0.5


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# -- q-shifted factorials -----------------------------------------------------------


def test_poch_finite_examples():
    assert poch_finite(0.7, 0, Q) == 1
    assert poch_finite(Q, 1, Q) == 0.5
    assert poch_finite(-1, 2, Q) == 3


def test_poch_inf_zero_set_and_trivial():
    assert poch_inf(Q**-2, Q).value == 0
    assert poch_inf(0, Q).value == 1


def test_poch_inf_matches_product_oracle():
    sv = poch_inf(0.5, Q)
    assert rel(sv.value, frozen.POCH_INF_HALF) <= 1e-14
    assert abs(sv.value - frozen.POCH_INF_HALF) <= sv.error_bound + 1e-16


def test_series_value_validation():
    with pytest.raises(ValueError):
        SeriesValue(1.0, -1.0, 1)
    with pytest.raises(ValueError):
        psi(0, 0, 0, Q, tol=0)


# -- Psi ----------------------------------------------------------------------------


def test_psi_trivial_cases():
    b = 0.3
    assert psi(0.4, b, 0, Q).value == pytest.approx(poch_inf(b, Q).value, rel=1e-15)
    assert psi(1, b, 0.9, Q).value == pytest.approx(poch_inf(b, Q).value, rel=1e-15)


def test_psi_matches_brute_force_example():
    sv = psi(-2, 0.3, 0.7, Q)
    assert rel(sv.value, frozen.PSI_EXAMPLE) <= 1e-13
    assert abs(sv.value - frozen.PSI_EXAMPLE) <= sv.error_bound + 1e-15


def test_psi_oracle_live_spot_check():
    # one fresh oracle evaluation so the frozen table cannot drift unnoticed
    assert rel(psi(-2, 0.3, 0.7, Q).value, oracles.psi(-2, 0.3, 0.7, Q)) <= 1e-13


def test_psi_entire_probe():
    rng = random.Random(3)
    for _ in range(20):
        a, b, z = (complex(rng.uniform(-10, 10), rng.uniform(-10, 10)) / 1.5 for _ in range(3))
        coarse, fine = psi(a, b, z, Q, tol=1e-8), psi(a, b, z, Q, tol=1e-14)
        assert math.isfinite(abs(fine.value))
        assert fine.error_bound <= coarse.error_bound


def test_phi_aux_examples():
    assert phi_aux(0.2, 0, Q).value == pytest.approx(poch_inf(0.2, Q * Q).value, rel=1e-15)
    assert rel(phi_aux(0.2, -0.3, Q).value, frozen.PHI_AUX_EXAMPLE) <= 1e-13
    # w = 1 kills the r = 0 term only
    v = phi_aux(1.0, 0.7, Q).value
    assert v != 0 and math.isfinite(v)


def test_two_phi_one_examples():
    assert two_phi_one(0.3, 0.2, 0.1, 0, Q).value == 1
    sv = two_phi_one(Q**-3, 0.2, 0.1, 0.5, Q)
    assert sv.terms == 4
    with pytest.raises(ValueError):
        two_phi_one(0.1, 0.1, 0.1, 1.2, Q)
    with pytest.raises(ValueError):
        two_phi_one(0.1, 0.1, Q**-2, 0.2, Q)


def test_heine_instance():
    assert identity_residuals("heine", {"a": 0.4, "b": -0.2, "z": 0.3}, Q) <= 1e-12


def test_contiguous_instance():
    assert identity_residuals("contiguous1", {"a": 0.3, "b": -0.4, "z": 0.25}, Q) <= 1e-13


def test_theta_identity_special_cases():
    assert identity_residuals("theta", {"a": 0.7 + 0.2j, "k": 0}, Q) == 0
    assert identity_residuals("theta", {"a": Q**3, "k": 2}, Q) == 0
    with pytest.raises(ValueError):
        identity_residuals("theta", {"a": 0, "k": 1}, Q)


def test_limit_transition_monotone():
    seq = limit_residuals({"a": 0.4, "b": -0.2, "c": 0.3, "z": 0.5}, Q)
    assert seq[-1] <= 1e-8
    assert all(b <= a for a, b in zip(seq, seq[1:]))


def test_identity_cases_cover_all_families():
    families = {"theta", "psi_symmetry", "transform_shift", "transform_terminating", "contiguous1", "contiguous2", "limit"}
    assert families <= set(IDENTITIES)


# -- bound --------------------------------------------------------------------------


def test_psi_bound_examples():
    assert psi_bound(0.6, 0, 0, Q) == pytest.approx(poch_inf(-0.6, Q).value, rel=1e-15)
    assert abs(psi(0.6, Q, 0, Q).value) <= psi_bound(0.6, 0, 0, Q)
    for z in (0.5, -2.0, 4.0, 3j):
        assert abs(psi(0, Q, z, Q).value) <= psi_bound(0, 0, z, Q) * (1 + 1e-12)
    assert abs(psi(1 + 1j, Q**-2, 2, Q).value) <= psi_bound(1 + 1j, 3, 2, Q)
    with pytest.raises(ValueError):
        psi_bound(0.1, -1, 0.1, Q)


def test_psi_euler_zeros():
    # Psi(q;q;q,z) = (q;q)_inf (z;q)_inf, so z = q^-1 is an exact zero
    for z in (0.3, -1.5):
        assert psi(Q, Q, z, Q).value == pytest.approx(poch_inf(Q, Q).value * poch_inf(z, Q).value, rel=1e-13)
    sv = psi(Q, Q, 1 / Q, Q, rel_tol=1e-13)
    assert abs(sv.value) <= sv.error_bound <= 1e-60


def test_psi_rel_tol_resolves_cancellation():
    a, b, z = 1 + 1j, Q**-4, 0.1
    plain = psi(a, b, z, Q)
    fine = psi(a, b, z, Q, rel_tol=1e-13)
    ref = oracles.psi(a, b, z, Q)
    assert abs(fine.value - ref) <= 1e-13 * abs(ref)
    assert fine.error_bound <= 1e-13 * abs(fine.value)
    assert abs(plain.value - ref) <= plain.error_bound


def test_psi_rel_tol_matches_frozen_grid():
    for a, k, z, ref, _ in frozen.PSI_GRID:
        if abs(ref) > 1e-40:
            assert rel(psi(a, Q ** (1 - k), z, Q, rel_tol=1e-13).value, ref) <= 1e-12


def test_psi_bound_matches_oracle_on_grid():
    for a, k, z, _, bound in frozen.PSI_GRID:
        assert rel(psi_bound(a, k, z, Q), bound) <= 1e-13


# -- lattice Psi -------------------------------------------------------------------------


def test_psi_lattice_agrees_with_float_psi():
    base = QParam(Q, True)
    B = Q * Q
    for a, b, z in [((1, 2), (1, 1), (-1, 0)), ((-1, -1), (1, 3), (1, 1)), ((-1, 0), (-1, 2), (1, 2))]:
        lat = psi_lattice(a, b, z, base)
        ref = psi(a[0] * B ** a[1], b[0] * B ** b[1], z[0] * B ** z[1], B).value
        assert abs(lat - ref) <= 1e-13 * (1 + abs(ref))


def test_psi_lattice_series_terminating_has_no_tail():
    # a' = a z / b = 1 after the argument swap: a single term, no truncation tail
    sv = psi_lattice_series((-1, 0), (-1, 2), (1, 2), QParam(Q, True))
    assert sv.terms == 1
    assert sv.error_bound <= 1e-15 * abs(sv.value) * 8


def test_psi_lattice_rel_tol_resolves_tiny_values():
    base = QParam(Q, True)
    tiny = psi_lattice((-1, -6), (1, 5), (1, 6), base, log_scale=-60.0, rel_tol=1e-14)
    ref = oracles.psi(-(Q**-12), Q**10, Q**12, Q * Q) * math.exp(-60.0)
    assert rel(tiny, ref) <= 1e-12

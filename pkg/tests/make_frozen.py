"""Regenerate tests/frozen.py from the brute-force oracles (slow; not collected by pytest).

    python3 tests/make_frozen.py
"""

from __future__ import annotations

import os
import pprint

import oracles as o

Q = 0.5

# 50-point grid (a, k, z) for Psi(a; q^{1-k}; q, z)
A_VALS = (0.0, 0.5, -2.0, 1 + 1j, 3j)
Z_VALS = (0.1, -0.5, 1.0, 2.0, -3.0, 0.5j, 1 + 1j, 4.0, -6.0, 10.0)
K_VALS = (0, 1, 3, 5)
PSI_GRID = [(a, K_VALS[(i + j) % 4], z) for i, a in enumerate(A_VALS) for j, z in enumerate(Z_VALS)]

A_POINTS = [
    ((1, 2), (1, 1), (1, 1)),
    ((1, 1), (1, 2), (1, 2)),
    ((1, 1), (1, 2), (1, 3)),
    ((1, 0), (1, -8), (1, 0)),
    ((1, 0), (1, -8), (1, -8)),
    ((-1, 1), (-1, 2), (1, 1)),
    ((1, -2), (-1, 3), (-1, 1)),
    ((-1, 3), (1, -1), (-1, 4)),
]

F_POINTS = [
    (0, 0, (1, 1), (1, 1), (1, 1)),
    (1, -1, (-1, 1), (1, 2), (-1, 1)),
    (0, 1, (1, 2), (1, 0), (1, 1)),
    (-1, 0, (-1, 2), (-1, 1), (1, 2)),
]


def main() -> None:
    data = {
        "Q": Q,
        "POCH_INF_HALF": float(o.poch_inf(o.mpmath.mpf(0.5), o.mpmath.mpf(0.5), 200)),
        "PSI_EXAMPLE": o.psi(-2, 0.3, 0.7, Q),
        "PHI_AUX_EXAMPLE": o.phi_aux(0.2, -0.3, Q),
        "C_Q": float(o.c_q(Q)),
        "PSI_GRID": [(a, k, z, o.psi(a, Q ** (1 - k), z, Q), o.psi_bound(a, k, z, Q)) for a, k, z in PSI_GRID],
        "A_VALUES": [(p, x, y, o.a_p(p, x, y, Q)) for p, x, y in A_POINTS],
        "F_VALUES": [(k, m, p, x, y, o.f_function(k, m, p, x, y, Q)) for k, m, p, x, y in F_POINTS],
        # coefficients of W*(f (x) f), f = f_{0,q,q}, above 1e-6 (double loop over y, z in [-10, 16] / neg 10)
        "W_STAR_00": sorted(
            (k, v) for k, v in o.w_star_naive(((0, (1, 1), (1, 1)), (0, (1, 1), (1, 1))), Q).items() if abs(v) > 1e-6
        ),
    }
    path = os.path.join(os.path.dirname(__file__), "frozen.py")
    with open(path, "w") as fh:
        fh.write('"""Oracle values generated by make_frozen.py; do not edit by hand."""\n\n')
        for k, v in data.items():
            fh.write(f"{k} = {pprint.pformat(v, width=110)}\n\n")


if __name__ == "__main__":
    main()

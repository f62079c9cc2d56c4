"""Exact lattice points of I_q, I_{q^2} and the auxiliary scalar functions.

A point is the pair (sign, exponent); its value is sign * base**exponent where
base is q or q^2 depending on the QParam it is evaluated against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional


@dataclass(frozen=True)
class QParam:
    q: float
    base_squared: bool = False

    def __post_init__(self) -> None:
        if not (0.0 < self.q < 1.0):
            raise ValueError(f"q must lie in (0, 1), got {self.q!r}")

    @property
    def base(self) -> float:
        return self.q * self.q if self.base_squared else self.q

    def squared(self) -> "QParam":
        return QParam(self.q, True)

    def plain(self) -> "QParam":
        return QParam(self.q, False)


@dataclass(frozen=True, order=True)
class LatticePoint:
    sign: int
    exponent: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")

    def value(self, qp: QParam | float) -> float:
        base = qp.base if isinstance(qp, QParam) else qp
        return self.sign * base ** self.exponent

    @property
    def in_lattice(self) -> bool:
        """Membership in I_q (equivalently I_{q^2} in squared contexts)."""
        return self.sign == 1 or self.exponent >= 1

    def __mul__(self, other: "LatticePoint") -> "LatticePoint":
        return LatticePoint(self.sign * other.sign, self.exponent + other.exponent)

    def __truediv__(self, other: "LatticePoint") -> "LatticePoint":
        return LatticePoint(self.sign * other.sign, self.exponent - other.exponent)

    def __neg__(self) -> "LatticePoint":
        return LatticePoint(-self.sign, self.exponent)

    def inv(self) -> "LatticePoint":
        return LatticePoint(self.sign, -self.exponent)

    def shift(self, k: int) -> "LatticePoint":
        """Multiply by base**k."""
        return LatticePoint(self.sign, self.exponent + k)

    def __str__(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}{self.exponent}"

    @classmethod
    def parse(cls, text: str) -> "LatticePoint":
        """Parse the CLI encoding '+k' / '-k' meaning sign * q^k."""
        t = text.strip()
        if len(t) < 2 or t[0] not in "+-":
            raise ValueError(f"lattice point must look like +k or -k, got {text!r}")
        try:
            k = int(t[1:])
        except ValueError as exc:
            raise ValueError(f"bad exponent in lattice point {text!r} at position 1") from exc
        return cls(1 if t[0] == "+" else -1, k)


def pt(sign: int, exponent: int) -> LatticePoint:
    return LatticePoint(sign, exponent)


ONE = LatticePoint(1, 0)
MINUS_ONE = LatticePoint(-1, 0)


@dataclass(frozen=True)
class LatticeWindow:
    k_min: int
    k_max: int
    negative_k_max: int

    def __post_init__(self) -> None:
        if self.k_min > self.k_max:
            raise ValueError("k_min must not exceed k_max")
        if self.negative_k_max < 1:
            raise ValueError("negative_k_max must be at least 1")

    def points(self) -> list[LatticePoint]:
        """All window points sorted by value (ascending)."""
        neg = [LatticePoint(-1, k) for k in range(1, self.negative_k_max + 1)]
        pos = [LatticePoint(1, k) for k in range(self.k_max, self.k_min - 1, -1)]
        return neg + pos

    def __iter__(self) -> Iterator[LatticePoint]:
        return iter(self.points())

    def __len__(self) -> int:
        return (self.k_max - self.k_min + 1) + self.negative_k_max

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, LatticePoint):
            return False
        if x.sign > 0:
            return self.k_min <= x.exponent <= self.k_max
        return 1 <= x.exponent <= self.negative_k_max

    def of_sign(self, sign: int) -> list[LatticePoint]:
        return [x for x in self.points() if x.sign == sign]

    def grow(self, by: int) -> "LatticeWindow":
        return LatticeWindow(self.k_min - by, self.k_max + by, self.negative_k_max + by)


def chi(x: LatticePoint) -> int:
    """log_q |x| (or log_{q^2} in squared contexts)."""
    return x.exponent


def kappa(x: float) -> float:
    """Signed square sgn(x) x^2."""
    return x * abs(x)


def kappa_point(x: LatticePoint) -> LatticePoint:
    """kappa on I_q, read as a point of I_{q^2} (same exponent)."""
    return x


def nu(t: LatticePoint, qp: QParam | float) -> float:
    base = qp.base if isinstance(qp, QParam) else qp
    c = t.exponent
    return base ** ((c - 1) * (c - 2) // 2)


def sgn(x: float) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def s_sign(x: float, y: float) -> int:
    if x == 0 or y == 0:
        raise ValueError("s(x, y) needs nonzero arguments")
    return -1 if (x > 0 and y < 0) else 1


def s_point(x: LatticePoint, y: LatticePoint) -> int:
    return -1 if (x.sign > 0 and y.sign < 0) else 1


def sign_power(sign: int, k: int) -> int:
    """sign**k for sign = +-1 and any integer k."""
    return -1 if (sign < 0 and k % 2) else 1


def translate(p: LatticePoint, x: LatticePoint) -> Optional[LatticePoint]:
    """p * x when it lies in I_q, otherwise None (zero extension)."""
    y = p * x
    return y if y.in_lattice else None

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EisensteinInt:
    """u + v*zeta in Z[zeta], zeta a primitive cube root of unity (zeta^2 = -1 - zeta)."""

    u: int
    v: int = 0

    @classmethod
    def zeta_pow(cls, e: int) -> EisensteinInt:
        return _ZETA_POWERS[e % 3]

    def is_rational(self) -> bool:
        return self.v == 0

    def __int__(self) -> int:
        if self.v:
            raise ValueError(f"{self} is not a rational integer")
        return self.u

    def __add__(self, other: EisensteinInt | int) -> EisensteinInt:
        if isinstance(other, int):
            return EisensteinInt(self.u + other, self.v)
        if isinstance(other, EisensteinInt):
            return EisensteinInt(self.u + other.u, self.v + other.v)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> EisensteinInt:
        return EisensteinInt(-self.u, -self.v)

    def __sub__(self, other: EisensteinInt | int) -> EisensteinInt:
        return self + (-other)

    def __rsub__(self, other: int) -> EisensteinInt:
        return (-self) + other

    def __mul__(self, other: EisensteinInt | int) -> EisensteinInt:
        if isinstance(other, int):
            return EisensteinInt(self.u * other, self.v * other)
        if isinstance(other, EisensteinInt):
            # (a + b z)(c + d z) = ac + (ad + bc) z + bd z^2,  z^2 = -1 - z
            a, b, c, d = self.u, self.v, other.u, other.v
            bd = b * d
            return EisensteinInt(a * c - bd, a * d + b * c - bd)
        return NotImplemented

    __rmul__ = __mul__

    def times_zeta(self) -> EisensteinInt:
        # zeta (u + v zeta) = -v + (u - v) zeta
        return EisensteinInt(-self.v, self.u - self.v)

    def times_zeta2(self) -> EisensteinInt:
        # zeta^2 (u + v zeta) = (v - u) - u zeta
        return EisensteinInt(self.v - self.u, -self.u)

    def conj(self) -> EisensteinInt:
        # zeta -> zeta^2 = -1 - zeta
        return EisensteinInt(self.u - self.v, -self.v)

    def norm(self) -> int:
        return self.u * self.u - self.u * self.v + self.v * self.v

    def __str__(self) -> str:
        return f"{self.u}{self.v:+}ζ"


_ZETA_POWERS = (EisensteinInt(1, 0), EisensteinInt(0, 1), EisensteinInt(-1, -1))

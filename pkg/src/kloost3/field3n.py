"""Arithmetic in GF(3^n) backed by log/antilog tables.

Elements are handled as *packed indices*: the coefficient vector
``(c_0, ..., c_{n-1})`` in the power basis of the modulus maps to the integer
``sum(c_i * 3**i)``.  The packed index is the canonical array key for every
table in the package, so iterating ``range(ctx.q)`` visits the field in a
fixed order.  ``ctx.pack`` / ``ctx.coeffs`` convert between the two forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import UsageError

DEFAULT_MAX_N = 10


# ---------------------------------------------------------------------------
# Polynomials over F_3, little-endian coefficient lists


def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mod(a: Sequence[int], m: Sequence[int]) -> list[int]:
    """Remainder of ``a`` modulo the monic polynomial ``m``."""
    r = [c % 3 for c in a]
    dm = len(m) - 1
    for d in range(len(r) - 1, dm - 1, -1):
        c = r[d]
        if c:
            off = d - dm
            for i, mc in enumerate(m):
                r[off + i] = (r[off + i] - c * mc) % 3
    return _trim(r[:dm] if len(r) > dm else r)


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [c % 3 for c in out]


def _monic_polys(degree: int) -> Iterable[list[int]]:
    for low in itertools.product(range(3), repeat=degree):
        yield list(low) + [1]


def smallest_factor_degree(modulus: Sequence[int]) -> int | None:
    """Degree of the lowest-degree proper monic factor, or None if irreducible.

    ``modulus`` is the full little-endian coefficient list including the
    leading 1.
    """
    n = len(modulus) - 1
    for d in range(1, n // 2 + 1):
        for f in _monic_polys(d):
            if not _poly_mod(modulus, f):
                return d
    return None


def _prime_factors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    n: int
    modulus: tuple[int, ...]  # c_0..c_{n-1}; the leading 1 is implicit
    generator: int  # packed index

    @property
    def q(self) -> int:
        return 3**self.n

    def modulus_poly(self) -> list[int]:
        return list(self.modulus) + [1]

    def modulus_str(self) -> str:
        terms = []
        for i in range(self.n, -1, -1):
            c = 1 if i == self.n else self.modulus[i]
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            coef = "" if (c == 1 and i) else str(c)
            terms.append(coef + mono)
        return " + ".join(terms)


@dataclass(frozen=True, eq=False)
class FieldContext:
    """Immutable GF(3^n) context.  Build with :func:`build_field`."""

    spec: FieldSpec
    digits: np.ndarray  # (q, n) int8, digits[idx] = coefficients of idx
    antilog: np.ndarray  # (q-1,) packed index of generator**l
    log: np.ndarray  # (q,) exponent of each nonzero element; log[0] = -1
    trace_table: np.ndarray  # (q,) Tr(a) for every packed a
    _pow3: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def generator(self) -> int:
        return self.spec.generator

    # -- conversions ---------------------------------------------------------

    def pack(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.n:
            raise UsageError(f"expected {self.n} coefficients, got {len(coeffs)}")
        if any(c not in (0, 1, 2) for c in coeffs):
            raise UsageError(f"coefficients must lie in {{0,1,2}}: {tuple(coeffs)}")
        return sum(int(c) * 3**i for i, c in enumerate(coeffs))

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.digits[a])

    def pack_array(self, digit_rows: np.ndarray) -> np.ndarray:
        return (np.asarray(digit_rows, dtype=np.int64) % 3) @ self._pow3

    def parse(self, text: str) -> int:
        """Parse ``"c0,c1,...,c_{n-1}"`` or a packed integer index."""
        text = text.strip()
        if "," in text:
            return self.pack([int(t) for t in text.split(",")])
        a = int(text)
        if not 0 <= a < self.q:
            raise UsageError(f"packed index {a} out of range [0, {self.q})")
        return a

    def format(self, a: int) -> str:
        return ",".join(str(c) for c in self.coeffs(a))

    # -- arithmetic -------------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return int(self.pack_array(self.digits[a] + self.digits[b]))

    def sub(self, a: int, b: int) -> int:
        return int(self.pack_array(self.digits[a] - self.digits[b]))

    def neg(self, a: int) -> int:
        return int(self.pack_array(-self.digits[a].astype(np.int64)))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.antilog[(self.log[a] + self.log[b]) % (self.q - 1)])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 has no inverse in GF(3^n)")
            return 1 if e == 0 else 0
        return int(self.antilog[(int(self.log[a]) * e) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(3^n)")
        return self.pow(a, self.q - 2)

    def trace(self, a: int) -> int:
        return int(self.trace_table[a])

    def trace_level_set(self, r: int) -> frozenset[int]:
        return frozenset(int(i) for i in np.flatnonzero(self.trace_table == r % 3))

    def is_square(self, a: int) -> bool:
        return a == 0 or self.log[a] % 2 == 0

    def sqrt(self, a: int) -> int:
        if a == 0:
            return 0
        if not self.is_square(a):
            raise ValueError(f"{self.format(a)} is not a square in GF({self.q})")
        return int(self.antilog[self.log[a] // 2])

    # -- vectorised helpers used by sweeps ---------------------------------------

    def mul_vec(self, a: int, xs: np.ndarray) -> np.ndarray:
        """``a * x`` for every x in ``xs`` (packed arrays)."""
        xs = np.asarray(xs)
        if a == 0:
            return np.zeros_like(xs)
        out = self.antilog[(self.log[a] + self.log[xs]) % (self.q - 1)]
        return np.where(xs == 0, 0, out)

    def inverse_table(self) -> np.ndarray:
        """x -> x^(q-2), with 0 -> 0."""
        out = np.zeros(self.q, dtype=np.int64)
        nz = np.arange(1, self.q)
        out[nz] = self.antilog[(-self.log[nz]) % (self.q - 1)]
        return out

    def poly_mul(self, a: int, b: int) -> int:
        """Multiplication by schoolbook polynomial reduction (no tables)."""
        prod = _poly_mod(_poly_mul(self.coeffs(a), self.coeffs(b)), self.spec.modulus_poly())
        return self.pack(prod + [0] * (self.n - len(prod)))

    def trace_by_frobenius(self, a: int) -> int:
        """Tr(a) as the literal sum a + a^3 + ... + a^(3^(n-1))."""
        total, x = 0, a
        for _ in range(self.n):
            total = self.add(total, x)
            x = self.poly_mul(self.poly_mul(x, x), x)
        if total > 2:
            raise AssertionError(f"trace of {self.format(a)} left the prime field")
        return total


def _lex_tuples(n: int) -> Iterable[tuple[int, ...]]:
    """Coefficient tuples (c_0, ..., c_{n-1}) in increasing packed-index order."""
    for high_first in itertools.product(range(3), repeat=n):
        yield high_first[::-1]


def _default_modulus(n: int) -> tuple[int, ...]:
    for low in _lex_tuples(n):
        if smallest_factor_degree(list(low) + [1]) is None:
            return low
    raise AssertionError(f"no irreducible polynomial of degree {n}")  # unreachable


def build_field(
    n: int,
    modulus: Sequence[int] | None = None,
    *,
    max_n: int = DEFAULT_MAX_N,
) -> FieldContext:
    """Construct GF(3^n).

    Without ``modulus`` the irreducible polynomial with the smallest packed
    coefficient index ``sum(c_i * 3**i)`` is used (so ``x^3 + 2x + 1`` for
    n = 3).  The generator is the smallest packed index whose multiplicative
    order is ``3^n - 1``.
    """
    if n < 1:
        raise UsageError("n must be >= 1")
    if n > max_n:
        raise UsageError(f"n = {n} exceeds the configured cap {max_n}")
    if modulus is None:
        low = _default_modulus(n)
    else:
        low = tuple(int(c) % 3 for c in modulus)
        if len(low) == n + 1:
            if low[-1] != 1:
                raise UsageError("modulus must be monic")
            low = low[:-1]
        if len(low) != n:
            raise UsageError(f"modulus must have degree {n}")
        d = smallest_factor_degree(list(low) + [1])
        if d is not None:
            raise UsageError(f"modulus is reducible: it has a factor of degree {d}")
    mpoly = list(low) + [1]
    q = 3**n

    def mulmod(a: list[int], b: list[int]) -> list[int]:
        return _poly_mod(_poly_mul(a, b), mpoly)

    def powmod(a: list[int], e: int) -> list[int]:
        result, base = [1], a
        while e:
            if e & 1:
                result = mulmod(result, base)
            base = mulmod(base, base)
            e >>= 1
        return result

    cofactors = [(q - 1) // r for r in _prime_factors(q - 1)]
    gen_poly = None
    for cand in _lex_tuples(n):
        g = _trim(list(cand))
        if not g:
            continue
        if all(powmod(g, e) != [1] for e in cofactors):
            gen_poly = g
            break
    assert gen_poly is not None

    pow3 = 3 ** np.arange(n, dtype=np.int64)

    def pk(p: list[int]) -> int:
        return sum(c * 3**i for i, c in enumerate(p))

    antilog = np.empty(q - 1, dtype=np.int64)
    log = np.full(q, -1, dtype=np.int64)
    cur = [1]
    for ell in range(q - 1):
        idx = pk(cur)
        if log[idx] != -1:
            raise AssertionError("generator order is smaller than q - 1")
        antilog[ell] = idx
        log[idx] = ell
        cur = mulmod(cur, gen_poly)
    if cur != [1]:
        raise AssertionError("generator**(q-1) != 1")

    digits = ((np.arange(q, dtype=np.int64)[:, None] // pow3) % 3).astype(np.int8)

    # Tr is F_3-linear, so the trace of each basis monomial determines it.
    basis_tr = []
    for i in range(n):
        x = [0] * i + [1]
        total: list[int] = []
        for _ in range(n):
            total = _trim([((total[t] if t < len(total) else 0) + (x[t] if t < len(x) else 0)) % 3
                           for t in range(max(len(total), len(x)))])
            x = powmod(x, 3)
        if len(total) > 1:
            raise AssertionError("basis trace left the prime field")
        basis_tr.append(total[0] if total else 0)
    trace_table = (digits.astype(np.int64) @ np.array(basis_tr, dtype=np.int64)) % 3

    for arr in (digits, antilog, log, trace_table, pow3):
        arr.flags.writeable = False
    spec = FieldSpec(n=n, modulus=tuple(low), generator=pk(gen_poly))
    return FieldContext(
        spec=spec,
        digits=digits,
        antilog=antilog,
        log=log,
        trace_table=trace_table,
        _pow3=pow3,
    )

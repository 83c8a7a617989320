"""3-adic Gauss sums at finite precision.

The unramified ring W_k = (Z/3^k)[X]/(f) uses the field modulus f lifted to
integer coefficients.  Adjoining pi with pi^2 = -3 gives the ring where the
Gauss sums live; an element is u + v*pi with u, v in W_k.  All arithmetic is
exact modular integer arithmetic.

The primitive (q-1)-th root of unity is the Teichmuller lift of the field
generator, so omega(g^l) = xi^l holds by construction.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .congruence import Counterexample, VerifyReport
from .errors import ConsistencyError, UsageError
from .field3n import FieldContext
from .kloosterman import kloosterman_naive
from .traces import digits3, wt3


def val3(x: int) -> int | None:
    if x == 0:
        return None
    v = 0
    while x % 3 == 0:
        x //= 3
        v += 1
    return v


class UnramifiedRing:
    def __init__(self, ctx: FieldContext, k: int):
        if k < 1:
            raise UsageError("precision k must be >= 1")
        self.ctx = ctx
        self.n = ctx.n
        self.k = k
        self.mod = 3**k
        self.modulus = tuple(ctx.spec.modulus)  # lifted: same integers in {0,1,2}
        self._gauss: dict[int, RamifiedElem] = {}

    def __repr__(self) -> str:
        return f"UnramifiedRing(n={self.n}, k={self.k})"

    # -- element construction --------------------------------------------------

    def elem(self, coeffs: Sequence[int]) -> UnramifiedElem:
        return UnramifiedElem(self, tuple(c % self.mod for c in coeffs))

    def const(self, c: int) -> UnramifiedElem:
        return self.elem([c] + [0] * (self.n - 1))

    def lift(self, a: int) -> UnramifiedElem:
        """Naive lift of a field element: digits read as integers."""
        return self.elem(self.ctx.coeffs(a))

    @cached_property
    def zero(self) -> UnramifiedElem:
        return self.const(0)

    @cached_property
    def one(self) -> UnramifiedElem:
        return self.const(1)

    def _mul(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        n, m = self.n, self.mod
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        # X^n = -(c_0 + c_1 X + ... + c_{n-1} X^{n-1})
        for d in range(2 * n - 2, n - 1, -1):
            c = prod[d]
            if c:
                off = d - n
                for i, mc in enumerate(self.modulus):
                    prod[off + i] -= c * mc
        return tuple(c % m for c in prod[:n])

    # -- ramified constants ------------------------------------------------------

    @cached_property
    def pi(self) -> RamifiedElem:
        return RamifiedElem(self.zero, self.one)

    @cached_property
    def zeta(self) -> RamifiedElem:
        half = pow(2, -1, self.mod)
        return RamifiedElem(self.const(-half), self.const(-half))

    @cached_property
    def zeta_powers(self) -> tuple[RamifiedElem, RamifiedElem, RamifiedElem]:
        z = self.zeta
        return (RamifiedElem.from_int(self, 1), z, z * z)

    # -- Teichmuller ---------------------------------------------------------

    @cached_property
    def xi(self) -> UnramifiedElem:
        return teichmuller(self, self.ctx.generator)

    @cached_property
    def xi_powers(self) -> tuple[UnramifiedElem, ...]:
        out = [self.one]
        for _ in range(self.ctx.q - 2):
            out.append(out[-1] * self.xi)
        if out[-1] * self.xi != self.one:
            raise ConsistencyError("xi^(q-1) != 1")
        return tuple(out)

    def omega(self, a: int) -> UnramifiedElem:
        """Teichmuller character via the xi-power table (omega(0) = 0)."""
        if a == 0:
            return self.zero
        return self.xi_powers[int(self.ctx.log[a])]

    def omega_pow(self, a: int, e: int) -> UnramifiedElem:
        """omega(a)^e for any integer e (a != 0), or 0 when a = 0 and e > 0."""
        if a == 0:
            if e <= 0:
                raise ZeroDivisionError("omega(0)^e with e <= 0")
            return self.zero
        return self.xi_powers[(int(self.ctx.log[a]) * e) % (self.ctx.q - 1)]


class UnramifiedElem:
    __slots__ = ("ring", "c")

    def __init__(self, ring: UnramifiedRing, c: tuple[int, ...]):
        self.ring = ring
        self.c = c

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        m = self.ring.mod
        return UnramifiedElem(self.ring, tuple((a + b) % m for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        m = self.ring.mod
        return UnramifiedElem(self.ring, tuple(-a % m for a in self.c))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            m = self.ring.mod
            return UnramifiedElem(self.ring, tuple(a * other % m for a in self.c))
        return UnramifiedElem(self.ring, self.ring._mul(self.c, other.c))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result, base = self.ring.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        return isinstance(other, UnramifiedElem) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def val3(self) -> int | None:
        """Minimum 3-adic valuation of the coordinates; None when zero at this precision."""
        vals = [val3(x) for x in self.c if x]
        return min(vals) if vals else None

    def in_3ideal(self, e: int) -> bool:
        """True iff self is in (3^e)."""
        d = 3**e
        return all(x % d == 0 for x in self.c)

    def reduce(self) -> int:
        """Reduction mod 3, as a packed field index."""
        return self.ring.ctx.pack([x % 3 for x in self.c])

    def __repr__(self) -> str:
        return f"W{self.c}"


@dataclass(frozen=True)
class RamifiedElem:
    """u + v*pi with pi^2 = -3."""

    u: UnramifiedElem
    v: UnramifiedElem

    @classmethod
    def from_int(cls, ring: UnramifiedRing, c: int) -> RamifiedElem:
        return cls(ring.const(c), ring.zero)

    @property
    def ring(self) -> UnramifiedRing:
        return self.u.ring

    def _coerce(self, other) -> RamifiedElem:
        if isinstance(other, int):
            return RamifiedElem.from_int(self.ring, other)
        if isinstance(other, UnramifiedElem):
            return RamifiedElem(other, self.ring.zero)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return RamifiedElem(self.u + other.u, self.v + other.v)

    __radd__ = __add__

    def __neg__(self):
        return RamifiedElem(-self.u, -self.v)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return RamifiedElem(self.u * other, self.v * other)
        if isinstance(other, UnramifiedElem):
            return RamifiedElem(self.u * other, self.v * other)
        a, b, c, d = self.u, self.v, other.u, other.v
        return RamifiedElem(a * c - (b * d) * 3, a * d + b * c)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result, base = RamifiedElem.from_int(self.ring, 1), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        return self.u == other.u and self.v == other.v

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.v.is_zero()

    def val_pi(self) -> int | None:
        """pi-adic valuation; None when the element vanishes at this precision."""
        vu, vv = self.u.val3(), self.v.val3()
        cands = [2 * vu] if vu is not None else []
        if vv is not None:
            cands.append(1 + 2 * vv)
        return min(cands) if cands else None

    def in_pi_ideal(self, m: int) -> bool:
        """Membership in (pi^m); m must not exceed 2k to be decidable."""
        if m > 2 * self.ring.k:
            raise UsageError(f"(pi^{m}) needs precision k >= {math.ceil(m / 2)}, have k = {self.ring.k}")
        e, odd = divmod(m, 2)
        return self.u.in_3ideal(e + odd) and self.v.in_3ideal(e)

    def in_3ideal(self, e: int) -> bool:
        return self.in_pi_ideal(2 * e)


# ---------------------------------------------------------------------------
# Operations


def teichmuller(ring: UnramifiedRing, a: int) -> UnramifiedElem:
    """omega(a): the root of X^q = X congruent to a mod 3."""
    if a == 0:
        return ring.zero
    x = ring.lift(a)
    for _ in range(ring.k + 1):
        nxt = x ** ring.ctx.q
        if nxt == x:
            return x
        x = nxt
    raise ConsistencyError(f"Teichmuller iteration did not stabilise for {ring.ctx.format(a)}")


@dataclass(frozen=True)
class GaussSumRecord:
    j: int
    weight: int
    value: RamifiedElem


def _check_j(ring: UnramifiedRing, j: int) -> None:
    if not 1 <= j <= ring.ctx.q - 2:
        raise UsageError(f"j = {j} outside [1, q-2] = [1, {ring.ctx.q - 2}]")


def _logs_by_trace(ring: UnramifiedRing) -> list[list[int]]:
    ctx = ring.ctx
    groups: list[list[int]] = [[], [], []]
    for x in range(1, ctx.q):
        groups[ctx.trace(x)].append(int(ctx.log[x]))
    return groups


def gauss_value(ring: UnramifiedRing, j: int) -> RamifiedElem:
    """g(j) = -sum_{x != 0} omega(x)^(-j) zeta^Tr(x), cached per ring."""
    _check_j(ring, j)
    cached = ring._gauss.get(j)
    if cached is not None:
        return cached
    m = ring.ctx.q - 1
    if not hasattr(ring, "_trace_logs"):
        ring._trace_logs = _logs_by_trace(ring)
    n, mod = ring.n, ring.mod
    total = RamifiedElem.from_int(ring, 0)
    for t, logs in enumerate(ring._trace_logs):
        acc = [0] * n
        for ell in logs:
            for i, c in enumerate(ring.xi_powers[(-j * ell) % m].c):
                acc[i] += c
        s_t = UnramifiedElem(ring, tuple(c % mod for c in acc))
        total = total + ring.zeta_powers[t] * s_t
    value = -total
    ring._gauss[j] = value
    return value


def gauss_sum(ring: UnramifiedRing, j: int) -> GaussSumRecord:
    value = gauss_value(ring, j)
    w = wt3(j)
    v = value.val_pi()
    if (v is None and w < 2 * ring.k) or (v is not None and v != w):
        raise ConsistencyError(f"val_pi(g({j})) = {v}, expected wt_3 = {w}")
    return GaussSumRecord(j, w, value)


def gamma3(m: int, k: int) -> int:
    """Morita's Gamma_3 at a positive integer: (-1)^m prod_{t<m, 3 does not divide t} t, mod 3^k."""
    if m < 1:
        raise ValueError("gamma3 needs m >= 1")
    mod = 3**k
    prod = 1
    for t in range(1, m):
        if t % 3:
            prod = prod * t % mod
    return (-prod if m % 2 else prod) % mod


def gamma3_fractional(s: int, denom: int, k: int) -> int:
    """Gamma_3(s/denom) mod 3^k, reduced to an integer argument y = s/denom mod 3^k."""
    if math.gcd(denom, 3) != 1:
        raise ValueError("denominator must be prime to 3")
    if not 0 < s < denom:
        raise ValueError("need 0 < s < denom")
    mod = 3**k
    y = s * pow(denom, -1, mod) % mod
    return gamma3(y or mod, k)


def gross_koblitz_product(ring: UnramifiedRing, j: int) -> RamifiedElem:
    """pi^wt(j) * prod_i Gamma_3(<3^i j / (q-1)>)."""
    _check_j(ring, j)
    m = ring.ctx.q - 1
    prod = 1
    for i in range(ring.n):
        prod = prod * gamma3_fractional((3**i * j) % m, m, ring.k) % ring.mod
    return ring.pi ** wt3(j) * prod


def gross_koblitz_check(ring: UnramifiedRing, j: int) -> bool:
    return (gauss_value(ring, j) - gross_koblitz_product(ring, j)).in_3ideal(ring.k)


def stickelberger_required_k(j: int) -> int:
    return math.ceil((wt3(j) + 2) / 2)


def stickelberger_check(ring: UnramifiedRing, j: int) -> bool:
    """g(j) * prod(j_i!) = pi^wt(j)  mod pi^(wt(j) + 2)."""
    _check_j(ring, j)
    need = stickelberger_required_k(j)
    if ring.k < need:
        raise UsageError(f"Stickelberger check for j = {j} requires k >= {need}")
    w = wt3(j)
    fact = math.prod(math.factorial(d) for d in digits3(j, ring.n))
    return (gauss_value(ring, j) * fact - ring.pi ** w).in_pi_ideal(w + 2)


def _report(ring: UnramifiedRing, modulus: int, rule: str, results, t0: float) -> VerifyReport:
    bad = [(idx, pred, act) for idx, ok, pred, act in results if not ok]
    first = None
    if bad:
        idx, pred, act = bad[0]
        first = Counterexample(idx, tuple(digits3(idx, ring.n)), pred, act)
    return VerifyReport(ring.n, modulus, len(results), len(bad), first, time.perf_counter() - t0, rule)


def wt1lem_expected(weight: int) -> int:
    return {1: 6, 2: 9}.get(weight, 0)


def wt1lem_check(ring: UnramifiedRing) -> VerifyReport:
    """g(j)^2 = 6, 9, 0 mod 27 for wt_3(j) = 1, 2, >= 3."""
    if ring.k < 3:
        raise UsageError("the g(j)^2 mod 27 check requires k >= 3")
    t0 = time.perf_counter()
    results = []
    for j in range(1, ring.ctx.q - 1):
        g = gauss_value(ring, j)
        expected = wt1lem_expected(wt3(j))
        ok = (g * g - expected).in_3ideal(3)
        results.append((j, ok, expected, "g(j)^2 differs"))
    return _report(ring, 27, "g(j)^2 mod 27 by wt_3(j)", results, t0)


def valuation_check(ring: UnramifiedRing) -> VerifyReport:
    t0 = time.perf_counter()
    results = []
    for j in range(1, ring.ctx.q - 1):
        w = wt3(j)
        if w >= 2 * ring.k:
            raise UsageError(f"valuation of g({j}) needs k >= {w // 2 + 1}")
        v = gauss_value(ring, j).val_pi()
        results.append((j, v == w, w, v))
    return _report(ring, 0, "val_pi(g(j)) = wt_3(j)", results, t0)


def first_kl_sum(ring: UnramifiedRing, a: int) -> RamifiedElem:
    """-sum_{j=1}^{q-2} g(j)^2 omega(a)^j."""
    total = RamifiedElem.from_int(ring, 0)
    if a == 0:
        return total
    if not hasattr(ring, "_gauss_sq"):
        ring._gauss_sq = [None] + [gauss_value(ring, j) ** 2 for j in range(1, ring.ctx.q - 1)]
    for j in range(1, ring.ctx.q - 1):
        total = total + ring._gauss_sq[j] * ring.omega_pow(a, j)
    return -total


def hat_form(ring: UnramifiedRing, a: int) -> UnramifiedElem:
    """21 * sum_{wt(i)=1} omega^i(a) + 18 * sum_{wt(i)=2} omega^i(a)."""
    s1, s2 = ring.zero, ring.zero
    if a != 0:
        for i in range(1, ring.ctx.q - 1):
            w = wt3(i)
            if w == 1:
                s1 = s1 + ring.omega_pow(a, i)
            elif w == 2:
                s2 = s2 + ring.omega_pow(a, i)
    return s1 * 21 + s2 * 18


def fourier_congruence_check(
    ring: UnramifiedRing, a: int, k: int | None = None, kvalue: int | None = None
) -> bool:
    """K(a) = -sum g(j)^2 omega^j(a)  mod 3^k, and the weight-1/2 form mod 27 when n >= 3."""
    k = min(ring.k, ring.n) if k is None else k
    if k > ring.n:
        raise UsageError(f"the congruence holds mod q = 3^{ring.n}; k = {k} is too large")
    if k > ring.k:
        raise UsageError(f"ring precision {ring.k} is below requested k = {k}")
    K = kloosterman_naive(ring.ctx, a) if kvalue is None else kvalue
    ok = (first_kl_sum(ring, a) - K).in_3ideal(k)
    if ring.n >= 3 and ring.k >= 3:
        ok = ok and (hat_form(ring, a) - K).in_3ideal(3)
    return ok


def cong3_check(ring: UnramifiedRing) -> bool:
    """sum over Tr(z) = 1 of omega(z)^(-1) is 1 mod 3."""
    total = ring.zero
    for z in ring.ctx.trace_level_set(1):
        total = total + ring.omega_pow(z, -1)
    return (total - 1).in_3ideal(1)

"""Exponent index sets X, Y, Z and generalised S-traces.

For an exponent set S that is closed under multiplication by 3 modulo q-1,
``tau_S(a) = sum(a**s for s in S)`` is fixed by Frobenius and therefore lands
in the prime field.  The ordinary trace is the case S = {1, 3, ..., 3^(n-1)}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConsistencyError
from .field3n import FieldContext


def wt3(j: int) -> int:
    """Digit sum of ``j`` in base 3."""
    total = 0
    while j:
        j, d = divmod(j, 3)
        total += d
    return total


def digits3(j: int, n: int) -> list[int]:
    return [(j // 3**i) % 3 for i in range(n)]


@dataclass(frozen=True)
class IndexSetFamily:
    n: int
    q_minus_1: int
    w1: tuple[int, ...]
    x: tuple[int, ...]
    y: tuple[int, ...]
    z: tuple[int, ...]

    def as_dict(self) -> dict[str, list[int]]:
        return {"W1": list(self.w1), "X": list(self.x), "Y": list(self.y), "Z": list(self.z)}


def is_closed(s: Sequence[int], q_minus_1: int) -> bool:
    ss = set(s)
    return {(3 * r) % q_minus_1 for r in ss} == ss


def build_index_sets(n: int) -> IndexSetFamily:
    if n < 1:
        raise ValueError("n must be >= 1")
    m = 3**n - 1
    p = [3**i for i in range(n)]
    w1 = sorted({e % m for e in p})
    x = sorted({(a + b) % m for a, b in itertools.product(p, repeat=2)})
    y_raw = {a + b + c for a, b, c in itertools.combinations(p, 3)}
    z_raw = {2 * a + b for a, b in itertools.permutations(p, 2)}
    if n >= 3 and max(y_raw | z_raw) >= m:
        raise ConsistencyError("weight-3 exponent exceeded q - 2")
    y = sorted(r % m for r in y_raw)
    z = sorted({r % m for r in z_raw})
    fam = IndexSetFamily(n=n, q_minus_1=m, w1=tuple(w1), x=tuple(x), y=tuple(y), z=tuple(z))
    for name, s in (("W1", fam.w1), ("X", fam.x), ("Y", fam.y), ("Z", fam.z)):
        if not is_closed(s, m):
            raise ConsistencyError(f"index set {name} not closed under *3 mod {m}")
    return fam


def tau(ctx: FieldContext, s: Sequence[int], a: int) -> int:
    """The S-trace of ``a`` as an integer in {0, 1, 2}."""
    m = ctx.q - 1
    if not is_closed(s, m):
        raise ValueError(f"exponent set is not closed under multiplication by 3 mod {m}")
    total = 0
    for e in set(s):
        total = ctx.add(total, ctx.pow(a, e))
    if total > 2:
        raise ConsistencyError(f"tau_S({ctx.format(a)}) left the prime field")
    return total


def tau_table(ctx: FieldContext, s: Sequence[int]) -> np.ndarray:
    """tau_S(a) for every packed a, computed digit-wise in one pass per exponent."""
    m = ctx.q - 1
    if not is_closed(s, m):
        raise ValueError(f"exponent set is not closed under multiplication by 3 mod {m}")
    logs = ctx.log[1:]
    acc = np.zeros((ctx.q - 1, ctx.n), dtype=np.int64)
    for e in set(s):
        acc += ctx.digits[ctx.antilog[(logs * e) % m]]
    acc %= 3
    if acc[:, 1:].any():
        raise ConsistencyError("tau_S left the prime field")
    out = np.zeros(ctx.q, dtype=np.int64)
    out[1:] = acc[:, 0]
    if 0 in s:  # 0**0 == 1
        out[0] = 1
    return out


class TraceProfile(NamedTuple):
    tr: int
    tau_x: int
    tau_y: int
    tau_z: int


def _check_identity(tr, tau_x, tau_z) -> bool:
    return (tr * tau_x - tr - 2 * tau_z) % 3 == 0


def trace_profile(ctx: FieldContext, family: IndexSetFamily, a: int) -> TraceProfile:
    prof = TraceProfile(
        ctx.trace(a),
        tau(ctx, family.x, a),
        tau(ctx, family.y, a) if family.y else 0,
        tau(ctx, family.z, a) if family.z else 0,
    )
    if not _check_identity(prof.tr, prof.tau_x, prof.tau_z):
        raise ConsistencyError(f"Tr*tau_X != Tr + 2*tau_Z at {ctx.format(a)}: {prof}")
    return prof


@dataclass(frozen=True, eq=False)
class TraceTables:
    """Precomputed (Tr, tau_X, tau_Y, tau_Z) for every element of one field."""

    family: IndexSetFamily
    tr: np.ndarray
    tau_x: np.ndarray
    tau_y: np.ndarray
    tau_z: np.ndarray

    def profile(self, a: int) -> TraceProfile:
        return TraceProfile(int(self.tr[a]), int(self.tau_x[a]), int(self.tau_y[a]), int(self.tau_z[a]))

    def triples(self) -> set[tuple[int, int, int]]:
        """Distinct (Tr, tau_X, tau_Y) triples attained over the field."""
        packed = self.tr * 9 + self.tau_x * 3 + self.tau_y
        return {(int(v) // 9, (int(v) // 3) % 3, int(v) % 3) for v in np.unique(packed)}


def trace_tables(ctx: FieldContext, family: IndexSetFamily | None = None) -> TraceTables:
    family = family or build_index_sets(ctx.n)
    zeros = np.zeros(ctx.q, dtype=np.int64)
    tr = ctx.trace_table.astype(np.int64)
    tx = tau_table(ctx, family.x)
    ty = tau_table(ctx, family.y) if family.y else zeros
    tz = tau_table(ctx, family.z) if family.z else zeros
    bad = np.flatnonzero((tr * tx - tr - 2 * tz) % 3)
    if bad.size:
        raise ConsistencyError(f"Tr*tau_X != Tr + 2*tau_Z at packed index {int(bad[0])}")
    for arr in (tr, tx, ty, tz):
        arr.flags.writeable = False
    return TraceTables(family, tr, tx, ty, tz)

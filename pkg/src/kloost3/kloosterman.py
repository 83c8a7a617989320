"""Ternary Kloosterman sums K(a) = sum_x zeta^Tr(x^(q-2) + a x) over GF(3^n).

Two independent routes are provided: a direct per-``a`` count and a radix-3
transform over the additive group that produces all q values at once.  The
x = 0 term is included (0^(q-2) = 0), matching a sum over the whole field.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Literal

import numpy as np

from .eisenstein import EisensteinInt
from .errors import ConsistencyError
from .field3n import FieldContext


@lru_cache(maxsize=16)
def _inverse_trace(ctx: FieldContext) -> np.ndarray:
    """Tr(x^(q-2)) for every packed x."""
    out = ctx.trace_table[ctx.inverse_table()].astype(np.int64)
    out.flags.writeable = False
    return out


def trace_counts(ctx: FieldContext, a: int) -> tuple[int, int, int]:
    """(N_0, N_1, N_2) with N_t = #{x : Tr(x^(q-2) + a x) = t}."""
    xs = np.arange(ctx.q)
    e = (_inverse_trace(ctx) + ctx.trace_table[ctx.mul_vec(a, xs)]) % 3
    n0, n1, n2 = np.bincount(e, minlength=3)
    return int(n0), int(n1), int(n2)


def kloosterman_naive(ctx: FieldContext, a: int) -> int:
    n0, n1, n2 = trace_counts(ctx, a)
    if n1 != n2:
        raise ConsistencyError(f"K({ctx.format(a)}) is not real: N1={n1}, N2={n2}")
    # N0 + N1 zeta + N2 zeta^2 = N0 - N1 when N1 == N2
    return n0 - n1


def kloosterman_naive_many(
    ctx: FieldContext, elements: Iterable[int], workers: int = 1
) -> dict[int, int]:
    elements = list(elements)
    if workers <= 1:
        return {a: kloosterman_naive(ctx, a) for a in elements}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return dict(zip(elements, pool.map(lambda a: kloosterman_naive(ctx, a), elements)))


# ---------------------------------------------------------------------------
# Fast path


def trace_gram(ctx: FieldContext) -> np.ndarray:
    """G[i, j] = Tr(x^i * x^j) in the power basis."""
    n = ctx.n
    g = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            g[i, j] = ctx.trace(ctx.mul(3**i, 3**j))
    return g


def radix3_transform(
    u: np.ndarray, v: np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray, int]:
    """Character transform over (Z/3)^n on packed indices, in Z[zeta].

    Input value at index x is u[x] + v[x] zeta; output at index w is
    sum_x value(x) * zeta^(w . x) with the dot product taken digit-wise.
    Returns the transformed (u, v) and the butterfly count.
    """
    u = np.array(u, dtype=np.int64)
    v = np.array(v, dtype=np.int64)
    q = 3**n
    butterflies = 0
    for stage in range(n):
        stride = 3**stage
        shape = (q // (3 * stride), 3, stride)
        U, V = u.reshape(shape), v.reshape(shape)
        u0, u1, u2 = U[:, 0, :].copy(), U[:, 1, :].copy(), U[:, 2, :].copy()
        v0, v1, v2 = V[:, 0, :].copy(), V[:, 1, :].copy(), V[:, 2, :].copy()
        # zeta*(a+bz) = -b + (a-b)z ;  zeta^2*(a+bz) = (b-a) - a z
        U[:, 0, :] = u0 + u1 + u2
        V[:, 0, :] = v0 + v1 + v2
        U[:, 1, :] = u0 - v1 + (v2 - u2)
        V[:, 1, :] = v0 + (u1 - v1) - u2
        U[:, 2, :] = u0 + (v1 - u1) - v2
        V[:, 2, :] = v0 - u1 + (u2 - v2)
        butterflies += q // 3
    return u, v, butterflies


def radix3_transform_reference(values: list[EisensteinInt], n: int) -> tuple[list[EisensteinInt], int]:
    """Same transform on EisensteinInt objects; slow, for cross-checking."""
    vals = list(values)
    butterflies = 0
    for stage in range(n):
        stride = 3**stage
        for block in range(0, len(vals), 3 * stride):
            for off in range(stride):
                i0 = block + off
                i1, i2 = i0 + stride, i0 + 2 * stride
                x0, x1, x2 = vals[i0], vals[i1], vals[i2]
                vals[i0] = x0 + x1 + x2
                vals[i1] = x0 + x1.times_zeta() + x2.times_zeta2()
                vals[i2] = x0 + x1.times_zeta2() + x2.times_zeta()
                butterflies += 1
    return vals, butterflies


@dataclass(frozen=True, eq=False)
class KloostermanTable:
    n: int
    values: np.ndarray
    provenance: Literal["naive", "fast"]
    butterflies: int | None = None
    modulus: tuple[int, ...] = field(default=())

    def __getitem__(self, a: int) -> int:
        return int(self.values[a])

    def __len__(self) -> int:
        return len(self.values)

    def check_invariants(self, ctx: FieldContext) -> None:
        vals = self.values
        if (vals % 3).any():
            raise ConsistencyError("a Kloosterman value is not divisible by 3")
        if (vals * vals > 4 * ctx.q).any():
            raise ConsistencyError("a Kloosterman value exceeds 2*sqrt(q)")
        cubes = np.array([ctx.pow(a, 3) for a in range(ctx.q)])
        if (vals[cubes] != vals).any():
            raise ConsistencyError("K(a^3) != K(a)")


def kloosterman_all_naive(ctx: FieldContext, workers: int = 1) -> KloostermanTable:
    vals = kloosterman_naive_many(ctx, range(ctx.q), workers)
    arr = np.array([vals[a] for a in range(ctx.q)], dtype=np.int64)
    arr.flags.writeable = False
    return KloostermanTable(ctx.n, arr, "naive", modulus=ctx.spec.modulus)


def kloosterman_all_fast(
    ctx: FieldContext, backend: Literal["numpy", "python"] = "numpy"
) -> KloostermanTable:
    e = _inverse_trace(ctx)
    if backend == "numpy":
        u = np.where(e == 0, 1, np.where(e == 1, 0, -1))
        v = np.where(e == 0, 0, np.where(e == 1, 1, -1))
        fu, fv, bfly = radix3_transform(u, v, ctx.n)
    elif backend == "python":
        out, bfly = radix3_transform_reference([EisensteinInt.zeta_pow(int(t)) for t in e], ctx.n)
        fu = np.array([z.u for z in out], dtype=np.int64)
        fv = np.array([z.v for z in out], dtype=np.int64)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if fv.any():
        bad = int(np.flatnonzero(fv)[0])
        raise ConsistencyError(f"transform output {bad} has nonzero zeta part {int(fv[bad])}")
    # Tr(a x) = sum_i w_i x_i with w = G a, so K(a) is the transform at w.
    w = ctx.pack_array(ctx.digits.astype(np.int64) @ trace_gram(ctx).T)
    vals = fu[w]
    vals.flags.writeable = False
    return KloostermanTable(ctx.n, vals, "fast", butterflies=bfly, modulus=ctx.spec.modulus)


# ---------------------------------------------------------------------------


@dataclass
class CoverageReport:
    n: int
    bound: int  # floor(2 sqrt(q))
    attained: list[int]
    missing: list[int]  # multiples of 3 in (-2 sqrt q, 2 sqrt q) never attained
    closed_bound_ok: bool
    strict_exceptions: list[int]  # packed a with |K(a)| == 2 sqrt(q)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "bound": self.bound,
            "attained": self.attained,
            "missing": self.missing,
            "closed_bound_ok": self.closed_bound_ok,
            "strict_exceptions": self.strict_exceptions,
        }


def value_coverage(table: KloostermanTable) -> CoverageReport:
    q = 3**table.n
    bound = math.isqrt(4 * q)
    vals = table.values
    sq = vals * vals
    attained = sorted({int(v) for v in vals})
    strict = [int(a) for a in np.flatnonzero(sq == 4 * q)]
    top = (bound // 3) * 3
    open_range = [m for m in range(-top, top + 1, 3) if m * m < 4 * q]
    seen = set(attained)
    missing = [m for m in open_range if m not in seen]
    return CoverageReport(
        n=table.n,
        bound=bound,
        attained=attained,
        missing=missing,
        closed_bound_ok=bool((sq <= 4 * q).all()),
        strict_exceptions=strict,
    )


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("KLOOST3_PARALLEL", "1")))
    except ValueError:
        return 1

"""Closed-form residues of K(a) and exhaustive sweeps against actual values.

All residues are canonical, in ``[0, m)``; Python's ``%`` already does that
for negative K.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .errors import ConsistencyError, UsageError
from .field3n import FieldContext
from .kloosterman import KloostermanTable
from .traces import TraceProfile, TraceTables, trace_tables

MODULI = (2, 9, 18, 27, 54)
MIN_N = {2: 1, 9: 2, 18: 2, 27: 3, 54: 3}


@dataclass(frozen=True)
class CongruencePrediction:
    modulus: int
    residue: int
    rule: str


def predict_mod9(tr: int) -> int:
    return 3 * (tr % 3)


def predict_mod2(ctx: FieldContext, a: int) -> int:
    if a == 0:
        return 0
    if ctx.is_square(a) and ctx.trace(ctx.sqrt(a)) != 0:
        return 0
    return 1


# 9-row table: residue for (Tr, selector) where the selector is
# tau_Y + 2 tau_X (Tr=0), tau_Y (Tr=1), tau_Y + tau_X (Tr=2), all mod 3.
_MOD27_TABLE = {
    (0, 0): 0, (0, 1): 9, (0, 2): 18,
    (1, 2): 3, (1, 0): 12, (1, 1): 21,
    (2, 2): 6, (2, 0): 15, (2, 1): 24,
}


def mod27_polynomial(p: TraceProfile) -> int:
    t, x, y = p.tr, p.tau_x, p.tau_y
    return (21 * t**3 + 18 * t + 18 * x + 9 * t * x + 9 * y) % 27


def mod27_tau_z_form(p: TraceProfile) -> int:
    return (21 * p.tr**3 + 18 * p.tau_z + 9 * p.tau_y + 18 * p.tau_x) % 27


def mod27_table(p: TraceProfile) -> int:
    selector = {0: p.tau_y + 2 * p.tau_x, 1: p.tau_y, 2: p.tau_y + p.tau_x}[p.tr]
    return _MOD27_TABLE[(p.tr, selector % 3)]


def predict_mod27(profile: TraceProfile) -> int:
    r = mod27_polynomial(profile)
    r_z, r_t = mod27_tau_z_form(profile), mod27_table(profile)
    if not r == r_z == r_t:
        raise ConsistencyError(
            f"mod-27 forms disagree for {profile}: polynomial={r}, tau_Z form={r_z}, table={r_t}"
        )
    return r


def crt(r1: int, m1: int, r2: int, m2: int) -> int:
    """Unique residue mod m1*m2 (coprime moduli)."""
    return (r1 + m1 * ((r2 - r1) * pow(m1, -1, m2))) % (m1 * m2)


# Mod-18 rows keyed by (Tr, "a is a square with Tr(sqrt a) != 0").
_MOD18_TABLE = {
    (0, True): 0, (1, False): 3, (2, True): 6,
    (0, False): 9, (1, True): 12, (2, False): 15,
}


def predict_mod18(ctx: FieldContext, a: int) -> int:
    if a == 0:
        raise ValueError("the mod-18 classification covers nonzero a only")
    tr = ctx.trace(a)
    r = crt(predict_mod9(tr), 9, predict_mod2(ctx, a), 2)
    even_row = ctx.is_square(a) and ctx.trace(ctx.sqrt(a)) != 0
    if _MOD18_TABLE[(tr, even_row)] != r:
        raise ConsistencyError(f"mod-18 CRT {r} disagrees with table at {ctx.format(a)}")
    return r


def predict_mod54(ctx: FieldContext, a: int, profile: TraceProfile) -> int:
    if ctx.n < 3:
        raise UsageError("mod 54 requires n >= 3")
    return crt(predict_mod27(profile), 27, predict_mod2(ctx, a), 2)


def predict(ctx: FieldContext, tables: TraceTables, modulus: int, a: int) -> int | None:
    """Predicted residue of K(a) mod ``modulus``; None where the rule does not apply."""
    if modulus == 2:
        return predict_mod2(ctx, a)
    if modulus == 9:
        return predict_mod9(int(tables.tr[a]))
    if modulus == 18:
        return None if a == 0 else predict_mod18(ctx, a)
    if modulus == 27:
        return predict_mod27(tables.profile(a))
    if modulus == 54:
        return predict_mod54(ctx, a, tables.profile(a))
    raise UsageError(f"unsupported modulus {modulus}; choose from {MODULI}")


def require_n(modulus: int, n: int) -> None:
    need = MIN_N.get(modulus)
    if need is None:
        raise UsageError(f"unsupported modulus {modulus}; choose from {MODULI}")
    if n < need:
        raise UsageError(f"mod {modulus} requires n ≥ {need} (got n = {n})")


# ---------------------------------------------------------------------------
# Sweeps


@dataclass(frozen=True)
class Counterexample:
    index: int
    coeffs: tuple[int, ...]
    predicted: int | str
    actual: int | str


@dataclass
class VerifyReport:
    n: int
    modulus: int
    total: int
    mismatches: int
    first_counterexample: Counterexample | None
    elapsed: float = 0.0  # seconds
    rule: str = ""

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def merge(self, other: VerifyReport) -> VerifyReport:
        if (self.n, self.modulus, self.rule) != (other.n, other.modulus, other.rule):
            raise ValueError("cannot merge reports for different sweeps")
        firsts = [c for c in (self.first_counterexample, other.first_counterexample) if c]
        return VerifyReport(
            n=self.n,
            modulus=self.modulus,
            total=self.total + other.total,
            mismatches=self.mismatches + other.mismatches,
            first_counterexample=min(firsts, key=lambda c: c.index) if firsts else None,
            elapsed=self.elapsed + other.elapsed,
            rule=self.rule,
        )

    def as_dict(self) -> dict:
        ce = self.first_counterexample
        return {
            "n": self.n,
            "modulus": self.modulus,
            "rule": self.rule,
            "total": self.total,
            "mismatches": self.mismatches,
            "first_counterexample": None if ce is None else {
                "index": ce.index,
                "coeffs": ",".join(map(str, ce.coeffs)),
                "predicted": ce.predicted,
                "actual": ce.actual,
            },
            "elapsed_ms": round(self.elapsed * 1000, 3),
        }

    def summary(self) -> str:
        status = "ok" if self.ok else "FAIL"
        line = (f"[{status}] n={self.n} mod {self.modulus} ({self.rule}): "
                f"{self.total} checked, {self.mismatches} mismatches, {self.elapsed * 1000:.1f} ms")
        if self.first_counterexample:
            ce = self.first_counterexample
            line += f"; first at {ce.index} ({','.join(map(str, ce.coeffs))}): predicted {ce.predicted}, actual {ce.actual}"
        return line


RULES = {
    2: "K mod 2 by squareness of a and Tr(sqrt a)",
    9: "K mod 9 = 3 Tr(a)",
    18: "K mod 18 by Tr(a) and squareness (a != 0)",
    27: "K mod 27 by Tr, tau_X, tau_Y",
    54: "K mod 54 = CRT(mod 27, mod 2)",
}
NINE_DIVIDES_RULE = "9 | K(a) iff Tr(a) = 0"


def _sweep(
    ctx: FieldContext,
    modulus: int,
    rule: str,
    check: Callable[[int], tuple[bool, int | str, int | str] | None],
    workers: int,
) -> VerifyReport:
    def run(chunk: range) -> VerifyReport:
        t0 = time.perf_counter()
        total = bad = 0
        first = None
        for a in chunk:
            res = check(a)
            if res is None:
                continue
            total += 1
            good, pred, actual = res
            if not good:
                bad += 1
                if first is None:
                    first = Counterexample(a, ctx.coeffs(a), pred, actual)
        return VerifyReport(ctx.n, modulus, total, bad, first, time.perf_counter() - t0, rule)

    if workers <= 1:
        return run(range(ctx.q))
    step = -(-ctx.q // workers)
    chunks = [range(s, min(s + step, ctx.q)) for s in range(0, ctx.q, step)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run, chunks))
    out = parts[0]
    for p in parts[1:]:
        out = out.merge(p)
    return out


def _check_table(ctx: FieldContext, table: KloostermanTable) -> None:
    if table.n != ctx.n or len(table) != ctx.q:
        raise UsageError("Kloosterman table does not belong to this field")
    if table.modulus and tuple(table.modulus) != ctx.spec.modulus:
        raise UsageError("Kloosterman table was built with a different modulus")


def verify_sweep(
    ctx: FieldContext,
    modulus: int,
    table: KloostermanTable,
    tables: TraceTables | None = None,
    workers: int = 1,
) -> VerifyReport:
    require_n(modulus, ctx.n)
    _check_table(ctx, table)
    tables = tables or trace_tables(ctx)

    def check(a: int):
        pred = predict(ctx, tables, modulus, a)
        if pred is None:
            return None
        actual = table[a] % modulus
        return pred == actual, pred, actual

    return _sweep(ctx, modulus, RULES[modulus], check, workers)


def verify_nine_divides(
    ctx: FieldContext, table: KloostermanTable, workers: int = 1
) -> VerifyReport:
    require_n(9, ctx.n)
    _check_table(ctx, table)

    def check(a: int):
        divisible = table[a] % 9 == 0
        tr_zero = ctx.trace(a) == 0
        return divisible == tr_zero, f"Tr={ctx.trace(a)}", f"K={table[a]}"

    return _sweep(ctx, 9, NINE_DIVIDES_RULE, check, workers)


def applicable_moduli(n: int, requested=MODULI) -> tuple[list[int], list[int]]:
    """Split requested moduli into (runnable, skipped) for this n."""
    run, skip = [], []
    for m in requested:
        (run if n >= MIN_N[m] else skip).append(m)
    return run, skip

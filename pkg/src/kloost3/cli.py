"""kloost3 command line: table, verify, gauss, bench, field-info.

Exit codes: 0 when every check passes, 1 on any mismatch, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import tempfile
import time
from dataclasses import dataclass

from .congruence import (
    MODULI,
    applicable_moduli,
    predict,
    require_n,
    verify_nine_divides,
    verify_sweep,
)
from .errors import ConsistencyError, UsageError
from .field3n import DEFAULT_MAX_N, FieldContext, build_field
from .kloosterman import (
    default_workers,
    kloosterman_all_fast,
    kloosterman_all_naive,
    kloosterman_naive_many,
    value_coverage,
)
from .padic import (
    UnramifiedRing,
    cong3_check,
    fourier_congruence_check,
    gross_koblitz_check,
    stickelberger_check,
    stickelberger_required_k,
    valuation_check,
    wt1lem_check,
)
from .traces import build_index_sets, trace_tables, wt3

DEFAULT_SEED = 20240601
GAUSS_CHECKS = ("valuation", "stickelberger", "gross-koblitz", "wt1lem", "firstkl", "cong3")


@dataclass
class RunConfig:
    n: int
    modulus_override: tuple[int, ...] | None
    mod_targets: tuple[int, ...]
    k: int
    fmt: str | None
    out: str | None
    parallel: int
    seed: int
    max_n: int


def _parse_modulus(text: str | None) -> tuple[int, ...] | None:
    if not text:
        return None
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse modulus {text!r}; expected comma-separated coefficients c0,...")


def _parse_mods(values: list[str] | None, default: tuple[int, ...]) -> tuple[int, ...]:
    if not values:
        return default
    out: list[int] = []
    for v in values:
        for tok in v.split(","):
            tok = tok.strip()
            if tok == "all":
                out.extend(MODULI)
            elif tok.isdigit() and int(tok) in MODULI:
                out.append(int(tok))
            else:
                raise UsageError(f"unsupported modulus {tok!r}; choose from {MODULI} or 'all'")
    return tuple(sorted(set(out)))


def _config(args: argparse.Namespace, default_mods: tuple[int, ...] = MODULI) -> RunConfig:
    if args.n is None:
        raise UsageError("--n is required")
    return RunConfig(
        n=args.n,
        modulus_override=_parse_modulus(args.modulus),
        mod_targets=_parse_mods(getattr(args, "mod", None), default_mods),
        k=args.k,
        fmt=args.format,
        out=args.out,
        parallel=args.parallel if args.parallel else default_workers(),
        seed=args.seed,
        max_n=args.max_n,
    )


def _field(cfg: RunConfig) -> FieldContext:
    return build_field(cfg.n, cfg.modulus_override, max_n=cfg.max_n)


def _emit(text: str, out: str | None) -> None:
    """Write to ``out`` atomically (temp file + rename), or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".kloost3-", suffix=".tmp")
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------


def cmd_table(cfg: RunConfig) -> int:
    ctx = _field(cfg)
    requested = cfg.mod_targets
    mods, skipped = applicable_moduli(ctx.n, requested)
    for m in skipped:
        _warn(f"mod {m} requires n >= {3 if m in (27, 54) else 2}; column omitted")
    table = kloosterman_all_fast(ctx)
    tt = trace_tables(ctx)
    rows = []
    for a in range(ctx.q):
        K = table[a]
        row = {
            "index": a,
            "coeffs": ctx.format(a),
            "Tr": int(tt.tr[a]),
            "tauX": int(tt.tau_x[a]),
            "tauY": int(tt.tau_y[a]),
            "tauZ": int(tt.tau_z[a]),
            "K": K,
        }
        for m in mods:
            pred = predict(ctx, tt, m, a)
            row[f"K_mod{m}"] = K % m
            row[f"pred_mod{m}"] = "" if pred is None else pred
            row[f"match_mod{m}"] = "" if pred is None else str(pred == K % m).lower()
        rows.append(row)
    fmt = cfg.fmt or "csv"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps({"n": ctx.n, "modulus": list(ctx.spec.modulus), "rows": rows}, indent=1) + "\n"
    else:
        raise UsageError(f"table supports --format csv or json, not {fmt}")
    _emit(text, cfg.out)
    mismatched = any(r[f"match_mod{m}"] == "false" for r in rows for m in mods)
    return 1 if mismatched else 0


def cmd_verify(cfg: RunConfig, samples: int) -> int:
    ctx = _field(cfg)
    explicit = cfg.mod_targets != MODULI
    if explicit:
        for m in cfg.mod_targets:
            require_n(m, ctx.n)
        mods = list(cfg.mod_targets)
    else:
        mods, skipped = applicable_moduli(ctx.n)
        for m in skipped:
            _warn(f"mod {m} skipped: requires larger n")
    table = kloosterman_all_fast(ctx)
    tt = trace_tables(ctx)
    reports = [verify_sweep(ctx, m, table, tt, workers=cfg.parallel) for m in mods]
    if ctx.n >= 2 and (not explicit or 9 in mods):
        reports.append(verify_nine_divides(ctx, table, workers=cfg.parallel))

    rng = random.Random(cfg.seed)
    pts = sorted(rng.sample(range(ctx.q), min(samples, ctx.q)))
    naive = kloosterman_naive_many(ctx, pts, cfg.parallel)
    oracle_bad = [a for a in pts if naive[a] != table[a]]
    triples = tt.triples()
    coverage = value_coverage(table)

    ok = all(r.ok for r in reports) and not oracle_bad and coverage.closed_bound_ok
    payload = {
        "seed": cfg.seed,
        "n": ctx.n,
        "modulus": list(ctx.spec.modulus),
        "reports": [r.as_dict() for r in reports],
        "oracle_check": {"samples": len(pts), "mismatches": len(oracle_bad),
                         "first": oracle_bad[0] if oracle_bad else None},
        "profile_coverage": {"distinct_triples": len(triples), "complete": len(triples) == 27},
        "value_coverage": coverage.as_dict(),
        "ok": ok,
    }
    if (cfg.fmt or "text") == "json":
        text = json.dumps(payload, indent=1) + "\n"
    else:
        lines = [f"# seed={cfg.seed} n={ctx.n} modulus={ctx.spec.modulus_str()}"]
        lines += [r.summary() for r in reports]
        lines.append(f"[{'ok' if not oracle_bad else 'FAIL'}] fast vs naive on {len(pts)} seeded samples: "
                     f"{len(oracle_bad)} mismatches")
        lines.append(f"profile coverage: {len(triples)}/27 (Tr, tauX, tauY) triples attained")
        lines.append(f"[{'ok' if coverage.closed_bound_ok else 'FAIL'}] |K| <= {coverage.bound}; "
                     f"|K| = 2 sqrt(q) at {len(coverage.strict_exceptions)} elements; "
                     f"multiples of 3 never attained in the open range: {coverage.missing or 'none'}")
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out)
    return 0 if ok else 1


def cmd_gauss(cfg: RunConfig, checks: list[str], samples: int) -> int:
    ctx = _field(cfg)
    if "all" in checks:
        checks = list(GAUSS_CHECKS)
    q = ctx.q
    js = range(1, q - 1)
    results = []

    def j_report(name: str, k: int, fn) -> dict:
        ring = UnramifiedRing(ctx, k)
        failing = [j for j in js if not fn(ring, j)]
        return {"check": name, "k": k, "total": len(js), "passed": len(js) - len(failing),
                "failed": len(failing), "first_failing_j": failing[0] if failing else None}

    for name in checks:
        if name == "valuation":
            max_w = max(wt3(j) for j in js)
            k = max(cfg.k, max_w // 2 + 1)
            rep = valuation_check(UnramifiedRing(ctx, k))
            results.append({"check": name, "k": k, "total": rep.total, "passed": rep.total - rep.mismatches,
                            "failed": rep.mismatches,
                            "first_failing_j": rep.first_counterexample.index if rep.first_counterexample else None})
        elif name == "stickelberger":
            k = max(cfg.k, max(stickelberger_required_k(j) for j in js))
            results.append(j_report(name, k, stickelberger_check))
        elif name == "gross-koblitz":
            results.append(j_report(name, cfg.k, gross_koblitz_check))
        elif name == "wt1lem":
            if cfg.k < 3:
                raise UsageError("wt1lem requires --k >= 3")
            rep = wt1lem_check(UnramifiedRing(ctx, cfg.k))
            results.append({"check": name, "k": cfg.k, "total": rep.total, "passed": rep.total - rep.mismatches,
                            "failed": rep.mismatches,
                            "first_failing_j": rep.first_counterexample.index if rep.first_counterexample else None})
        elif name == "firstkl":
            k = min(cfg.k, ctx.n)
            ring = UnramifiedRing(ctx, max(cfg.k, 3) if ctx.n >= 3 else k)
            table = kloosterman_all_fast(ctx)
            if samples and samples < q:
                pts = sorted(random.Random(cfg.seed).sample(range(q), samples))
            else:
                pts = list(range(q))
            failing = [a for a in pts if not fourier_congruence_check(ring, a, k, kvalue=table[a])]
            results.append({"check": name, "k": k, "total": len(pts), "passed": len(pts) - len(failing),
                            "failed": len(failing), "first_failing_a": failing[0] if failing else None})
        elif name == "cong3":
            ok = cong3_check(UnramifiedRing(ctx, cfg.k))
            results.append({"check": name, "k": cfg.k, "total": 1, "passed": int(ok), "failed": int(not ok)})
        else:
            raise UsageError(f"unknown check {name!r}")
    ok = all(r["failed"] == 0 for r in results)
    payload = {"seed": cfg.seed, "n": ctx.n, "modulus": list(ctx.spec.modulus), "checks": results, "ok": ok}
    if (cfg.fmt or "json") == "json":
        text = json.dumps(payload, indent=1) + "\n"
    else:
        lines = [f"# seed={cfg.seed} n={ctx.n} modulus={ctx.spec.modulus_str()}"]
        for r in results:
            lines.append(f"[{'ok' if r['failed'] == 0 else 'FAIL'}] {r['check']} (k={r['k']}): "
                         f"{r['passed']}/{r['total']} passed")
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out)
    return 0 if ok else 1


def cmd_bench(cfg: RunConfig, naive_max_n: int) -> int:
    ctx = _field(cfg)
    t0 = time.perf_counter()
    fast = kloosterman_all_fast(ctx)
    t_fast = time.perf_counter() - t0
    t_naive = None
    equal = None
    if ctx.n <= naive_max_n:
        t0 = time.perf_counter()
        naive = kloosterman_all_naive(ctx, cfg.parallel)
        t_naive = time.perf_counter() - t0
        equal = bool((naive.values == fast.values).all())
    payload = {
        "seed": cfg.seed,
        "n": ctx.n,
        "q": ctx.q,
        "butterflies": fast.butterflies,
        "expected_butterflies": ctx.n * 3 ** (ctx.n - 1),
        "fast_ms": round(t_fast * 1000, 3),
        "naive_ms": None if t_naive is None else round(t_naive * 1000, 3),
        "tables_equal": equal,
    }
    if (cfg.fmt or "text") == "json":
        text = json.dumps(payload, indent=1) + "\n"
    else:
        naive_txt = "skipped" if t_naive is None else f"{t_naive * 1000:.1f} ms"
        text = (f"# seed={cfg.seed} n={ctx.n} q={ctx.q}\n"
                f"fast: {t_fast * 1000:.1f} ms, {fast.butterflies} butterflies\n"
                f"naive: {naive_txt}\n"
                f"tables equal: {equal}\n")
    _emit(text, cfg.out)
    return 1 if equal is False else 0


def cmd_field_info(cfg: RunConfig) -> int:
    ctx = _field(cfg)
    fam = build_index_sets(ctx.n)
    payload = {
        "n": ctx.n,
        "q": ctx.q,
        "modulus": list(ctx.spec.modulus),
        "modulus_poly": ctx.spec.modulus_str(),
        "generator": {"index": ctx.generator, "coeffs": ctx.format(ctx.generator)},
        "X": list(fam.x),
        "Y": list(fam.y),
        "Z": list(fam.z),
    }
    if (cfg.fmt or "json") == "json":
        text = json.dumps(payload) + "\n"
    else:
        text = "\n".join(f"{k}: {v}" for k, v in payload.items()) + "\n"
    _emit(text, cfg.out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="extension degree n of GF(3^n)")
    common.add_argument("--modulus", help="irreducible modulus as c0,c1,...,c_{n-1} (leading 1 implicit)")
    common.add_argument("--k", type=int, default=3, help="3-adic precision exponent (default 3)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--parallel", type=int, default=0,
                        help="worker threads (default: $KLOOST3_PARALLEL or 1)")
    common.add_argument("--format", choices=("csv", "json", "text"))
    common.add_argument("--out", help="output path (written atomically); default stdout")
    common.add_argument("--max-n", type=int, default=DEFAULT_MAX_N, help="cap on n (default %(default)s)")

    parser = argparse.ArgumentParser(prog="kloost3", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common], help="per-element CSV/JSON table")
    p.add_argument("--mod", action="append", help="moduli to tabulate (default 9,18,27,54)")

    p = sub.add_parser("verify", parents=[common], help="exhaustive congruence sweeps")
    p.add_argument("--mod", action="append", help="one of 2, 9, 18, 27, 54, all (default all)")
    p.add_argument("--samples", type=int, default=200, help="seeded naive-vs-fast spot checks")

    p = sub.add_parser("gauss", parents=[common], help="3-adic Gauss sum checks")
    p.add_argument("--check", action="append", choices=GAUSS_CHECKS + ("all",))
    p.add_argument("--samples", type=int, default=50, help="sampled a for firstkl when q is larger")

    p = sub.add_parser("bench", parents=[common], help="naive vs fast timing")
    p.add_argument("--naive-max-n", type=int, default=7, help="skip the naive pass above this n")

    sub.add_parser("field-info", parents=[common], help="modulus, generator and index sets")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "table":
            return cmd_table(_config(args, default_mods=(9, 18, 27, 54)))
        if args.command == "verify":
            return cmd_verify(_config(args), args.samples)
        if args.command == "gauss":
            cfg = _config(args)
            return cmd_gauss(cfg, args.check or ["all"], args.samples if cfg.n >= 4 else 0)
        if args.command == "bench":
            return cmd_bench(_config(args), args.naive_max_n)
        if args.command == "field-info":
            return cmd_field_info(_config(args))
    except UsageError as exc:
        print(f"kloost3: error: {exc}", file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"kloost3: internal consistency failure: {exc}", file=sys.stderr)
        return 1
    parser.error(f"unknown command {args.command}")
    return 2


if __name__ == "__main__":
    sys.exit(main())

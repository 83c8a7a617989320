"""Ternary Kloosterman sums over GF(3^n) and their congruences mod 9, 18, 27, 54."""

from .congruence import (
    VerifyReport,
    predict_mod2,
    predict_mod9,
    predict_mod18,
    predict_mod27,
    predict_mod54,
    verify_nine_divides,
    verify_sweep,
)
from .eisenstein import EisensteinInt
from .errors import ConsistencyError, UsageError
from .field3n import FieldContext, FieldSpec, build_field
from .kloosterman import (
    KloostermanTable,
    kloosterman_all_fast,
    kloosterman_all_naive,
    kloosterman_naive,
    value_coverage,
)
from .traces import TraceProfile, build_index_sets, tau, trace_profile, trace_tables, wt3

__all__ = [
    "ConsistencyError",
    "EisensteinInt",
    "FieldContext",
    "FieldSpec",
    "KloostermanTable",
    "TraceProfile",
    "UsageError",
    "VerifyReport",
    "build_field",
    "build_index_sets",
    "kloosterman_all_fast",
    "kloosterman_all_naive",
    "kloosterman_naive",
    "predict_mod2",
    "predict_mod9",
    "predict_mod18",
    "predict_mod27",
    "predict_mod54",
    "tau",
    "trace_profile",
    "trace_tables",
    "value_coverage",
    "verify_nine_divides",
    "verify_sweep",
    "wt3",
]

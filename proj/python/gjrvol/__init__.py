"""GJR-GARCH estimation under skewed Student-t innovations."""

from ._core import (
    GjrvolError,
    conditional_variances,
    describe,
    fit,
    load_returns,
    presets,
    region_count,
    regime_check,
    regimes,
    simulate,
    skst_cdf,
    skst_pdf,
    skst_quantile,
    skst_sample,
    survival,
)

__all__ = [
    "GjrvolError",
    "conditional_variances",
    "describe",
    "fit",
    "load_returns",
    "presets",
    "region_count",
    "regime_check",
    "regimes",
    "simulate",
    "skst_cdf",
    "skst_pdf",
    "skst_quantile",
    "skst_sample",
    "survival",
]

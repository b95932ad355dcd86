"""Replication-level output analysis.

Confidence-interval half widths at a stated confidence level, the
specified-precision sequential replication method, paired comparisons of
two configurations with or without common random numbers, and the
half-width-by-replication-level table comparing default-stream and
dedicated-stream models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import betaincinv

from .errors import ComparisonError, ConfigurationError, InsufficientDataError
from .model import (
    DECISION_FIELDS,
    ModelConfig,
    run_replications,
)
from .rng import derive_master_seed

_INDEPENDENT_ARM_TAG = 0x1D9D  # key-space tag for the no-CRN comparison arm


def t_quantile(df: int, p: float) -> float:
    """Student-t inverse CDF via the inverse regularized incomplete beta.

    Accurate to better than 1e-6 absolute for df up to 10,000.
    """
    if df < 1:
        raise ConfigurationError("degrees of freedom must be >= 1")
    if not 0.0 < p < 1.0:
        raise ConfigurationError("p must be in (0, 1)")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_quantile(df, 1.0 - p)
    x = float(betaincinv(0.5 * df, 0.5, 2.0 * (1.0 - p)))
    return math.sqrt(df * (1.0 - x) / x)


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    sd: float  # sample standard deviation, n-1 divisor
    confidence: float
    half_width: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "sd": self.sd,
            "confidence": self.confidence,
            "half_width": self.half_width,
        }


def summarize(values, confidence: float = 0.95) -> SummaryStats:
    """Mean, sample sd and confidence half width of a replication batch."""
    values = list(values)
    n = len(values)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 values, got {n}")
    if not 0.0 < confidence < 1.0:
        raise ConfigurationError("confidence must be in (0, 1)")
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        hw = 0.0
    else:
        hw = t_quantile(n - 1, 1.0 - (1.0 - confidence) / 2.0) * sd / math.sqrt(n)
    return SummaryStats(n=n, mean=mean, sd=sd, confidence=confidence, half_width=hw)


@dataclass(frozen=True)
class PrecisionResult:
    target_half_width: float
    achieved: bool
    n_used: int
    final: SummaryStats

    def to_dict(self) -> dict:
        return {
            "target_half_width": self.target_half_width,
            "achieved": self.achieved,
            "n_used": self.n_used,
            "final": self.final.to_dict(),
        }


def replicate_to_precision(config: ModelConfig, seed: int, confidence: float,
                           target_half_width: float, n0: int, n_max: int,
                           threads: int = 1) -> PrecisionResult:
    """Grow the replication count until the half width meets the target.

    Starts at n0 and projects the next count as n * (half_width/target)^2,
    capped at n_max. Replication i always uses replication index i, so the
    result does not depend on the growth path and already-run replications
    are reused.
    """
    if n0 < 2:
        raise ConfigurationError("n0 must be >= 2")
    if n_max < n0:
        raise ConfigurationError("n_max must be >= n0")
    if target_half_width <= 0:
        raise ConfigurationError("target half width must be > 0")

    costs: list[float] = []
    n = n0
    while True:
        new = run_replications(config, seed, range(len(costs), n), threads=threads)
        costs.extend(out.total_usage_cost for out in new)
        stats = summarize(costs, confidence)
        if stats.half_width <= target_half_width or n >= n_max:
            break
        n = min(n_max, math.ceil(n * (stats.half_width / target_half_width) ** 2))
    return PrecisionResult(
        target_half_width=target_half_width,
        achieved=stats.half_width <= target_half_width,
        n_used=n,
        final=stats,
    )


@dataclass(frozen=True)
class PairedResult:
    n: int
    mean_diff: float
    var_a: float
    var_b: float
    var_diff: float
    covariance: float
    half_width_diff: float
    crn: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean_diff": self.mean_diff,
            "var_a": self.var_a,
            "var_b": self.var_b,
            "var_diff": self.var_diff,
            "covariance": self.covariance,
            "half_width_diff": self.half_width_diff,
            "crn": self.crn,
        }


def check_comparable(config_a: ModelConfig, config_b: ModelConfig) -> None:
    """Reject config pairs differing in anything but decision fields."""
    a = config_a.to_dict()
    b = config_b.to_dict()
    confounded = [
        field for field in a
        if field not in DECISION_FIELDS and a[field] != b[field]
    ]
    if confounded:
        raise ComparisonError(
            "configs differ in non-decision fields, comparison would be "
            f"confounded: {confounded}"
        )


def paired_comparison(config_a: ModelConfig, config_b: ModelConfig, n: int,
                      crn: bool, seed: int, confidence: float = 0.95,
                      threads: int = 1) -> PairedResult:
    """Compare two configurations replication-by-replication.

    With crn, replication i of both configs uses identical stream keys;
    without, config B runs in a disjoint seed-derived key space.
    """
    if n < 2:
        raise ConfigurationError("n must be >= 2")
    check_comparable(config_a, config_b)
    seed_b = seed if crn else derive_master_seed(seed, _INDEPENDENT_ARM_TAG)
    outs_a = run_replications(config_a, seed, range(n), threads=threads)
    outs_b = run_replications(config_b, seed_b, range(n), threads=threads)
    costs_a = [o.total_usage_cost for o in outs_a]
    costs_b = [o.total_usage_cost for o in outs_b]
    diffs = [a - b for a, b in zip(costs_a, costs_b)]

    stats_a = summarize(costs_a, confidence)
    stats_b = summarize(costs_b, confidence)
    mean_diff = stats_a.mean - stats_b.mean
    cov = math.fsum(
        (a - stats_a.mean) * (b - stats_b.mean) for a, b in zip(costs_a, costs_b)
    ) / (n - 1)
    var_diff = math.fsum((d - (math.fsum(diffs) / n)) ** 2 for d in diffs) / (n - 1)
    if var_diff == 0.0:
        hw = 0.0
    else:
        hw = (t_quantile(n - 1, 1.0 - (1.0 - confidence) / 2.0)
              * math.sqrt(var_diff / n))
    return PairedResult(
        n=n,
        mean_diff=mean_diff,
        var_a=stats_a.sd ** 2,
        var_b=stats_b.sd ** 2,
        var_diff=var_diff,
        covariance=cov,
        half_width_diff=hw,
        crn=crn,
    )


@dataclass(frozen=True)
class HalfwidthRow:
    replications: int
    halfwidth_default_stream: float
    halfwidth_crn: float
    difference: float


@dataclass(frozen=True)
class HalfwidthTable:
    """Half widths of Total Usage Cost by replication level for the
    default-stream and dedicated-streams models.

    first_minus_last_* is the first-level minus last-level half width per
    model; sum_of_level_differences sums the per-level differences.
    """

    rows: tuple
    first_minus_last_default_stream: float
    first_minus_last_crn: float
    sum_of_level_differences: float
    confidence: float

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "replications": r.replications,
                    "halfwidth_default_stream": r.halfwidth_default_stream,
                    "halfwidth_crn": r.halfwidth_crn,
                    "difference": r.difference,
                }
                for r in self.rows
            ],
            "first_minus_last_halfwidth_default_stream":
                self.first_minus_last_default_stream,
            "first_minus_last_halfwidth_crn": self.first_minus_last_crn,
            "sum_of_level_differences": self.sum_of_level_differences,
            "confidence": self.confidence,
        }


def halfwidth_table(config_default_stream: ModelConfig,
                    config_dedicated: ModelConfig, levels,
                    confidence: float = 0.95, seed: int = 12345,
                    threads: int = 1) -> HalfwidthTable:
    """Compare half-width decay over replication levels between the
    default-stream model and the dedicated-streams model.

    Replication i of each model is computed once and shared by every
    level containing it (levels are nested prefixes by construction).
    """
    levels = list(levels)
    if not levels:
        raise ConfigurationError("levels must be non-empty")
    if any(lv < 2 for lv in levels):
        raise ConfigurationError("every level must be >= 2")
    if levels != sorted(levels) or len(set(levels)) != len(levels):
        raise ConfigurationError("levels must be strictly ascending")

    top = levels[-1]
    costs = {}
    for name, config in (("default", config_default_stream),
                         ("crn", config_dedicated)):
        outs = run_replications(config, seed, range(top), threads=threads)
        costs[name] = [o.total_usage_cost for o in outs]

    rows = []
    for lv in levels:
        hw_default = summarize(costs["default"][:lv], confidence).half_width
        hw_crn = summarize(costs["crn"][:lv], confidence).half_width
        rows.append(HalfwidthRow(lv, hw_default, hw_crn, hw_default - hw_crn))

    return HalfwidthTable(
        rows=tuple(rows),
        first_minus_last_default_stream=(
            rows[0].halfwidth_default_stream - rows[-1].halfwidth_default_stream
        ),
        first_minus_last_crn=rows[0].halfwidth_crn - rows[-1].halfwidth_crn,
        sum_of_level_differences=math.fsum(r.difference for r in rows),
        confidence=confidence,
    )

"""Valuation statistics of bivariate integer polynomials on p x p blocks."""

from ._core import (
    BlockCounts,
    BudgetExceeded,
    Curve,
    DiscrepancyReport,
    ExpSumReport,
    OracleBoundExceeded,
    ParseError,
    PairJointCounts,
    PoissonComparison,
    RankTupleCounts,
    block_count,
    block_histogram,
    block_histogram_naive,
    count_rank_tuples,
    discrepancy,
    enumerate_curve,
    etk_functional,
    exp_sum,
    exp_sum_scan,
    pair_joint,
    parse_polynomial,
    poisson_compare,
    prop5_identity,
    run,
    stirling2,
    bell,
    total_val1,
    valuation,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]

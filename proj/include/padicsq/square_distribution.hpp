#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "padicsq/block_counts.hpp"
#include "padicsq/curve.hpp"

namespace padicsq {

/// Number of p x p blocks (k, l) by their X value.
struct BlockHistogram {
    std::uint64_t p = 0;
    std::uint64_t m = 0;
    std::map<std::uint64_t, std::uint64_t> counts;

    std::uint64_t total_blocks() const;
    /// Sum of X over all blocks.
    std::uint64_t total_mass() const;

    friend bool operator==(const BlockHistogram&, const BlockHistogram&) = default;
};

class EmptyHistogram : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SweepOptions {
    unsigned threads = 1;
    /// Rows of the counter grid held in memory at once; 0 keeps the whole grid.
    std::uint64_t band_rows = 0;
};

/**
 * X over all blocks by incrementing, for each curve point, the cells (k, l)
 * where alpha + k*a + l*b = 0 mod p.  Zero-gradient points hit every cell
 * when alpha = 0 and none otherwise.  O(m*p + p^2).
 */
BlockHistogram block_histogram_sweep(const CurveData& cd, const SweepOptions& options = {});

/// Direct evaluation of f mod p^2 at every translate of every curve point.
BlockHistogram block_histogram_naive(const Polynomial& f, const PrimeModulus& pm,
                                     std::uint64_t oracle_bound = kDefaultOracleBound);

/// Stirling number of the second kind, 0 <= i <= k <= 30.
mpz_class stirling2(int k, int i);

/// Bell number B_k = sum_i S(k, i), the k-th moment of Poisson(1).
mpz_class bell(int k);

/// E[X^k] over the blocks as an exact rational.
mpq_class empirical_moment(const BlockHistogram& h, int k);

struct PoissonComparison {
    double tv_distance = 0;
    double chi_square = 0;
    int chi_square_dof = 0;
    std::vector<double> empirical_moments;       ///< orders 1..K
    std::vector<mpq_class> exact_moments;        ///< orders 1..K
    std::vector<mpz_class> bell_targets;         ///< orders 1..K
};

inline constexpr int kMaxMoment = 8;

/**
 * Compares the block histogram with Poisson(1).
 *
 * Total variation folds the Poisson tail beyond the largest observed value
 * into one overflow bin; chi-square pools consecutive bins until each
 * expected count is at least 5.
 */
PoissonComparison poisson_compare(const BlockHistogram& h, int max_moment);

/// e^{-1} / j!
double poisson_pmf(std::uint64_t j);

/// Joint distribution of the indicators Y = [nu_p > 1] for two points.
struct IndicatorJointPmf {
    mpq_class p11;  ///< both Y = 1
    mpq_class p10;
    mpq_class p01;
    mpq_class p00;  ///< both Y = 0

    double correlation() const;
};

IndicatorJointPmf indicator_joint_pmf(const PairJointCounts& counts, std::uint64_t p);

}  // namespace padicsq

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "padicsq/curve.hpp"

namespace padicsq {

inline constexpr std::uint64_t kDefaultOracleBound = 101;

/// An exhaustive oracle was asked to run above its configured prime bound.
class OracleBoundExceeded : public std::runtime_error {
public:
    OracleBoundExceeded(std::string what, std::uint64_t p, std::uint64_t bound);
    std::uint64_t p() const { return p_; }
    std::uint64_t bound() const { return bound_; }

private:
    std::uint64_t p_;
    std::uint64_t bound_;
};

/// Naive tuple enumeration would exceed its work budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A closed form was applied to a jet with vanishing gradient.
class DegenerateJet : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Valuation pattern of one curve point over its p^2 translates (x+kp, y+lp).
struct BlockCounts {
    std::uint64_t val1 = 0;    ///< translates with nu_p(f) = 1
    std::uint64_t valgt1 = 0;  ///< translates with nu_p(f) > 1

    friend bool operator==(const BlockCounts&, const BlockCounts&) = default;
};

/**
 * Closed form from the first-order Taylor expansion modulo p^2.
 *
 * Smooth jet: (p(p-1), p).  Zero gradient: the block is constant mod p^2, so
 * (p^2, 0) when alpha != 0 and (0, p^2) when alpha = 0.
 */
BlockCounts block_count_closed_form(const JetVector& jet, const PrimeModulus& pm);

/// Exhaustive count over all (k, l) in [0,p)^2.
BlockCounts block_count_oracle(const Polynomial& f, const PrimeModulus& pm, const CurvePoint& pt,
                               std::uint64_t oracle_bound = kDefaultOracleBound);

/// Sum of closed-form val1 counts: the number of nu_p(f) = 1 points in [0,p^2)^2.
std::uint64_t total_val1_in_p2_square(const CurveData& cd);

/// Direct count of nu_p(f) = 1 over [0,p^2)^2; O(p^4) evaluations.
std::uint64_t total_val1_oracle(const Polynomial& f, const PrimeModulus& pm,
                                std::uint64_t oracle_bound = kDefaultOracleBound);

/// Joint valuation pattern of two points over the shared translates.
struct PairJointCounts {
    std::uint64_t n_11 = 0;  ///< both valuations equal 1
    std::uint64_t n_g1 = 0;  ///< first > 1, second = 1
    std::uint64_t n_1g = 0;  ///< first = 1, second > 1
    std::uint64_t n_gg = 0;  ///< both > 1

    std::uint64_t total() const { return n_11 + n_g1 + n_1g + n_gg; }
    friend bool operator==(const PairJointCounts&, const PairJointCounts&) = default;
};

/**
 * Indicator of nu_p(f(x+kp, y+lp)) > 1 over the p^2 translates of a curve
 * point, packed as a bitset indexed by k*p + l.  An exact zero counts as > 1.
 */
class TranslateProfile {
public:
    TranslateProfile(const Polynomial& f, const PrimeModulus& pm, const CurvePoint& pt);

    std::uint64_t cells() const { return cells_; }
    bool high(std::uint64_t k, std::uint64_t l) const;
    std::uint64_t count_high() const;
    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    std::uint64_t p_;
    std::uint64_t cells_;
    std::vector<std::uint64_t> words_;
};

PairJointCounts pair_joint_from_profiles(const TranslateProfile& first, const TranslateProfile& second);

/// Counts for two smooth jets by the rank class of their stacked 2x3 matrix.
PairJointCounts pair_joint_closed_form(const JetVector& j1, const JetVector& j2, const PrimeModulus& pm);

PairJointCounts pair_joint_oracle(const Polynomial& f, const PrimeModulus& pm, const CurvePoint& pt1,
                                  const CurvePoint& pt2, std::uint64_t oracle_bound = kDefaultOracleBound);

/**
 * Rank classification of the k x 3 matrix whose rows are jets.
 *
 * Rank-2 matrices are split by whether the left k x 2 (gradient) block has
 * rank 2.  Rank0 only occurs when every row is the zero jet.
 */
enum class RankClass { Rank0, Rank1, Rank2FirstTwoIndep, Rank2FirstTwoDep, Rank3 };

std::string to_string(RankClass rc);

/// Rank over F_p of a matrix given as rows of width `cols` (entries reduced mod p).
std::size_t rank_mod_p(std::vector<std::uint64_t> entries, std::size_t cols, std::uint64_t p);

RankClass rank_class(std::span<const JetVector> rows, std::uint64_t p);

struct RankTupleCounts {
    int k = 0;
    std::uint64_t m = 0;
    std::uint64_t m_k1 = 0;  ///< rank 1
    std::uint64_t m_k2 = 0;  ///< rank 2 with independent gradient columns
    std::uint64_t rank0 = 0;
    /// Rank-1 tuples whose gradient columns vanish; these have no block solutions.
    std::uint64_t rank1_zero_gradient = 0;

    friend bool operator==(const RankTupleCounts&, const RankTupleCounts&) = default;
};

enum class TupleAlgorithm { Naive, Aggregated };

inline constexpr std::uint64_t kDefaultTupleBudget = 200'000'000;

/**
 * Counts ordered k-tuples of pairwise-distinct curve points by rank class.
 *
 * Naive walks every tuple.  Aggregated (k <= 3) groups jets by projective
 * line and, for k = 3, by the p^2 planes {alpha = s*a + t*b} that avoid the
 * alpha axis, which are exactly the planes whose gradient block has rank 2.
 */
RankTupleCounts count_rank_tuples(const CurveData& cd, int k, TupleAlgorithm algorithm,
                                  std::uint64_t budget = kDefaultTupleBudget, unsigned threads = 1);

/// Bezout-type ceiling for m_{2,1} that depends only on deg f.
std::uint64_t rank1_pair_ceiling(const Polynomial& f);

struct Prop5Check {
    mpq_class lhs;  ///< sum over tuples of P(all Y = 1), from direct evaluation
    mpq_class rhs;  ///< m_{k,2}/p^2 + m_{k,1}/p
    bool holds() const { return lhs == rhs; }
};

/// Largest prime accepted by prop5_identity_check for a given k.
std::uint64_t prop5_prime_bound(int k);

/**
 * Sum of E[Y_{l1} ... Y_{lk}] over ordered distinct tuples, computed from
 * translate profiles, against the rank-count expression.
 */
Prop5Check prop5_identity_check(const CurveData& cd, int k);

}  // namespace padicsq

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "padicsq/curve.hpp"

namespace padicsq {

class EmptyCurve : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Half-open axis-aligned box [lo, hi) in F_p^3 with the volume used to normalize it.
struct Box {
    std::array<std::uint64_t, 3> lo{};
    std::array<std::uint64_t, 3> hi{};
    double volume = 0;

    bool contains(const JetVector& v) const;
};

/**
 * Test boxes for the box-restricted discrepancy bounds.
 *
 * `thirds` splits each coordinate by floor(3v/p) into 27 cells and weights
 * each by the continuous volume (p/3)^3.  `grid` uses integer cubes of side
 * s = floor(p/3) (or a chosen side) anchored at {0, s, 2s}^3.
 */
class BoxFamily {
public:
    static BoxFamily thirds(std::uint64_t p);
    static BoxFamily grid(std::uint64_t p, std::uint64_t side = 0);
    /// Parses "thirds", "grid" or "grid:<side>".
    static BoxFamily from_name(const std::string& name, std::uint64_t p);

    /// Appends [0,p)^3 with volume p^3; both candidates vanish on it.
    BoxFamily& with_whole_space();

    const std::string& name() const { return name_; }
    std::uint64_t p() const { return p_; }
    std::uint64_t side() const { return side_; }
    const std::vector<Box>& boxes() const { return boxes_; }

private:
    BoxFamily(std::string name, std::uint64_t p, std::uint64_t side) : name_(std::move(name)), p_(p), side_(side) {}

    std::string name_;
    std::uint64_t p_;
    std::uint64_t side_;
    std::vector<Box> boxes_;
};

enum class JetSemantics { Multiset, Set };

struct BoxDiscrepancy {
    std::uint64_t count = 0;
    double delta = 0;  ///< | count/m - |E|/p^3 |
    double d = 0;      ///< | count/|E| * p^3/m - 1 |
};

struct DiscrepancyReport {
    std::string family;
    std::uint64_t p = 0;
    std::uint64_t side = 0;
    std::uint64_t m = 0;  ///< normalizing mass (points, or distinct jets under set semantics)
    double delta_lower = 0;
    double d_lower = 0;
    std::size_t delta_witness = 0;  ///< index into the family's boxes
    std::size_t d_witness = 0;
    std::vector<BoxDiscrepancy> per_box;
};

DiscrepancyReport discrepancy_lower_bounds(const CurveData& cd, const BoxFamily& family,
                                           JetSemantics semantics = JetSemantics::Multiset);

DiscrepancyReport discrepancy_lower_bounds(std::span<const JetVector> jets, std::uint64_t p,
                                           const BoxFamily& family,
                                           JetSemantics semantics = JetSemantics::Multiset);

/**
 * 1/L + (1/m) sum_{0<|a|<=L} |sum_v e_p(a.v)| / r(a), the bracket of the
 * Erdos-Turan-Koksma bound with its unspecified constant taken as 1.
 */
double etk_functional(std::span<const JetVector> jets, std::uint64_t p, int L);
double etk_functional(const CurveData& cd, int L);

/// Evaluates sum_{(x,y) in C_p} e_{p^2}(f(x+kp, y+lp)) for many (k, l).
class ExpSumEvaluator {
public:
    explicit ExpSumEvaluator(const CurveData& cd);

    std::complex<double> operator()(std::uint64_t k, std::uint64_t l) const;

private:
    const CurveData* cd_;
    ModEvaluator f_mod_p2_;
};

/// Pairwise (tree) sum; the association order depends only on the length.
std::complex<double> pairwise_sum(std::span<const std::complex<double>> terms);

double exp_sum(const CurveData& cd, std::uint64_t k, std::uint64_t l);

struct ExpSumReport {
    std::uint64_t p = 0;
    std::uint64_t samples = 0;
    double max_modulus = 0;
    std::uint64_t argmax_k = 0;
    std::uint64_t argmax_l = 0;
    double normalized = 0;  ///< max_modulus / sqrt(p)
};

/**
 * Maximum |S(k,l)| over `sample_count` pairs drawn from mt19937_64(seed), or
 * over all p^2 pairs when sample_count >= p^2.  Ties keep the first pair seen.
 */
ExpSumReport exp_sum_scan(const CurveData& cd, std::uint64_t sample_count, std::uint64_t seed,
                          unsigned threads = 1);

}  // namespace padicsq

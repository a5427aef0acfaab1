#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "padicsq/polynomial.hpp"

namespace padicsq {

struct CurvePoint {
    std::uint64_t x = 0;
    std::uint64_t y = 0;

    friend auto operator<=>(const CurvePoint&, const CurvePoint&) = default;
};

/// (f_x mod p, f_y mod p, (f / p) mod p) at a point of the curve mod p.
struct JetVector {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint64_t alpha = 0;

    /// Gradient vanishes mod p.
    bool degenerate() const { return a == 0 && b == 0; }
    bool is_zero() const { return degenerate() && alpha == 0; }

    friend auto operator<=>(const JetVector&, const JetVector&) = default;
};

/// Points of {f = 0} over F_p in (x, y) order, with their jets.
struct CurveData {
    CurveData(PrimeModulus pm_, Polynomial f_) : pm(pm_), f(std::move(f_)) {}

    PrimeModulus pm;
    Polynomial f;
    std::vector<CurvePoint> points;
    std::vector<JetVector> jets;

    std::size_t m() const { return points.size(); }
    std::uint64_t p() const { return pm.p(); }
};

/// Number of worker threads to use for a requested count (0 = hardware).
unsigned resolve_threads(unsigned requested);

/**
 * Exhaustive scan of [0,p)^2 for zeros of f mod p.
 *
 * Rows x are split across `threads` workers; the result does not depend on the
 * worker count.
 */
CurveData enumerate_curve(const Polynomial& f, const PrimeModulus& pm, unsigned threads = 1);

/// Jet of f at a point with f(x, y) = 0 mod p, computed through f mod p^2.
JetVector jet_at(const Polynomial& f, const PrimeModulus& pm, std::uint64_t x, std::uint64_t y);

/// Indices of points whose gradient is non-zero mod p.
std::vector<std::size_t> smooth_points(const CurveData& cd);

/// True when the constant term of f vanishes mod p.
bool constant_term_vanishes(const Polynomial& f, const PrimeModulus& pm);

/// CSV with header `x,y,fx,fy,alpha`, one row per point.
void write_curve_csv(std::ostream& out, const CurveData& cd);

}  // namespace padicsq

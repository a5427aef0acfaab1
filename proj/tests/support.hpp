#pragma once

// Independent reference computations used by the unit tests.  Everything here
// goes through exact mpz arithmetic on the term map so that it shares no code
// path with the modular evaluators under test.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "padicsq/curve.hpp"
#include "padicsq/polynomial.hpp"

namespace testsupport {

inline const std::vector<std::string> kSuite = {
    "x+y+1", "x^3+y^2+x*y+1", "x^3+y^3+x^2*y+y+1", "x^3+x*y+x+y+1", "y^2*x+x*y+x+y+1",
};

inline const std::string kTablePoly = "x^3+y^2+x*y+1";

inline mpz_class exact(const padicsq::Polynomial& f, std::int64_t x, std::int64_t y) {
    mpz_class s = 0;
    for (const auto& [mono, c] : f.terms()) {
        mpz_class t = c, xx = static_cast<long>(x), yy = static_cast<long>(y), px, py;
        mpz_pow_ui(px.get_mpz_t(), xx.get_mpz_t(), mono.i);
        mpz_pow_ui(py.get_mpz_t(), yy.get_mpz_t(), mono.j);
        s += t * px * py;
    }
    return s;
}

inline std::uint64_t residue(const mpz_class& v, std::uint64_t m) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), m);
    return r.get_ui();
}

// Partial derivative rebuilt from the term map, without the library routine.
inline padicsq::Polynomial derive(const padicsq::Polynomial& f, bool in_x) {
    padicsq::Polynomial d;
    for (const auto& [mono, c] : f.terms()) {
        const std::uint32_t e = in_x ? mono.i : mono.j;
        if (e == 0) continue;
        if (in_x) d.add_term(mono.i - 1, mono.j, c * e);
        else d.add_term(mono.i, mono.j - 1, c * e);
    }
    return d;
}

inline std::uint32_t exact_valuation(mpz_class v, std::uint64_t p, std::uint32_t cap) {
    if (v == 0) return cap;
    std::uint32_t n = 0;
    while (n < cap && mpz_divisible_ui_p(v.get_mpz_t(), p)) {
        v /= p;
        ++n;
    }
    return n;
}

struct RefPoint {
    std::uint64_t x, y, a, b, alpha;
};

inline std::vector<RefPoint> reference_curve(const padicsq::Polynomial& f, std::uint64_t p) {
    const auto fx = derive(f, true), fy = derive(f, false);
    std::vector<RefPoint> out;
    for (std::uint64_t x = 0; x < p; ++x) {
        for (std::uint64_t y = 0; y < p; ++y) {
            const mpz_class v = exact(f, x, y);
            if (residue(v, p) != 0) continue;
            const mpz_class q = v / static_cast<unsigned long>(p);
            out.push_back({x, y, residue(exact(fx, x, y), p), residue(exact(fy, x, y), p), residue(q, p)});
        }
    }
    return out;
}

// Random polynomial with signed coefficients and small degree.
inline padicsq::Polynomial random_polynomial(std::mt19937_64& rng, int max_deg = 4, int terms = 5) {
    padicsq::Polynomial f;
    std::uniform_int_distribution<int> deg(0, max_deg), coef(-50, 50);
    for (int t = 0; t < terms; ++t) {
        const int c = coef(rng);
        if (c != 0) f.add_term(deg(rng), deg(rng), c);
    }
    return f;
}

}  // namespace testsupport

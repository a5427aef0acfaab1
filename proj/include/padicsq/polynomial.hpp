#pragma once

#include <cstddef>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace padicsq {

/// Exponent pair (i, j) of the monomial x^i y^j.
struct Monomial {
    std::uint32_t i = 0;
    std::uint32_t j = 0;

    friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

enum class Variable { X, Y };

/**
 * Sparse bivariate polynomial with exact integer coefficients.
 *
 * The term map never stores a zero coefficient, so two polynomials are equal
 * exactly when their term maps are equal.
 */
class Polynomial {
public:
    using TermMap = std::map<Monomial, mpz_class>;

    Polynomial() = default;

    /// Adds c * x^i y^j, dropping the term if the coefficient cancels.
    void add_term(std::uint32_t i, std::uint32_t j, const mpz_class& c);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Total degree; 0 for constants and for the zero polynomial.
    std::uint32_t degree() const;
    std::uint32_t degree_in(Variable v) const;

    /// Coefficient of x^i y^j (zero when absent).
    mpz_class coefficient(std::uint32_t i, std::uint32_t j) const;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    TermMap terms_;
};

enum class ParseErrorKind { Syntax, UnsupportedVariable, NegativeExponent };

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, std::size_t position, const std::string& what);

    ParseErrorKind kind() const { return kind_; }
    /// Zero-based offset into the input where parsing failed.
    std::size_t position() const { return position_; }

private:
    ParseErrorKind kind_;
    std::size_t position_;
};

/**
 * Parses a sum of signed monomials over x and y.
 *
 * Accepts integer coefficients, optional `*` between factors, `^` with a
 * non-negative integer exponent and arbitrary whitespace.  Parentheses and
 * other identifiers are rejected.  Like terms are collected.
 */
Polynomial parse_polynomial(std::string_view text);

/// Canonical text: terms by (i, j) descending, explicit `*` and `^`.
std::string to_string(const Polynomial& poly);

Polynomial partial_derivative(const Polynomial& poly, Variable var);

/// Exact value at an integer point.
mpz_class eval_exact(const Polynomial& poly, const mpz_class& x, const mpz_class& y);

/**
 * Residue of P(x, y) modulo a machine-word modulus, in [0, modulus).
 *
 * Coefficients are reduced once at construction and powers are tabulated per
 * call, so evaluation costs O(#terms) multiplications in 64/128-bit words.
 */
class ModEvaluator {
public:
    ModEvaluator(const Polynomial& poly, std::uint64_t modulus);

    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t operator()(std::int64_t x, std::int64_t y) const;

    /// Coefficients of the univariate polynomial P(x, .) by ascending y-degree.
    std::vector<std::uint64_t> specialize_x(std::int64_t x) const;

    /// Horner evaluation of a row produced by specialize_x.
    std::uint64_t eval_row(const std::vector<std::uint64_t>& row, std::int64_t y) const;

private:
    struct Term {
        std::uint32_t i;
        std::uint32_t j;
        std::uint64_t c;
    };

    std::uint64_t reduce(std::int64_t v) const;

    std::uint64_t modulus_;
    std::uint32_t max_i_ = 0;
    std::uint32_t max_j_ = 0;
    std::vector<Term> terms_;
};

std::uint64_t eval_mod(const Polynomial& poly, std::int64_t x, std::int64_t y,
                       std::uint64_t modulus);

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    std::uint64_t s = a + b;
    if (s < a || s >= m) s -= m;
    return s;
}

inline std::uint64_t neg_mod(std::uint64_t a, std::uint64_t m) { return a == 0 ? 0 : m - a; }

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Inverse of a modulo the prime p; a must be non-zero mod p.
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p);

/// Deterministic Miller-Rabin over the full 64-bit range.
bool is_prime(std::uint64_t n);

/// Odd prime modulus together with its square.
class PrimeModulus {
public:
    /// Throws std::invalid_argument unless p is an odd prime with p^2 < 2^64.
    explicit PrimeModulus(std::uint64_t p);

    std::uint64_t p() const { return p_; }
    std::uint64_t p_squared() const { return p_squared_; }

    friend bool operator==(const PrimeModulus&, const PrimeModulus&) = default;

private:
    std::uint64_t p_;
    std::uint64_t p_squared_;
};

/**
 * p-adic valuation of an evaluated value.
 *
 * A valuation is finite (exact), saturated (at least the requested cap; the
 * value is known to be non-zero) or infinite (the value is exactly zero).
 */
class Valuation {
public:
    enum class Kind { Finite, AtLeast, Infinite };

    static Valuation finite(std::uint32_t v) { return {Kind::Finite, v}; }
    static Valuation at_least(std::uint32_t cap) { return {Kind::AtLeast, cap}; }
    static Valuation infinite() { return {Kind::Infinite, 0}; }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_infinite() const { return kind_ == Kind::Infinite; }
    /// Exact value when finite, the cap when saturated.
    std::uint32_t value() const { return value_; }

    /// True when the valuation is known to be >= n.
    bool at_least_value(std::uint32_t n) const;
    /// True when the valuation is known to equal n exactly.
    bool equals(std::uint32_t n) const { return kind_ == Kind::Finite && value_ == n; }

    friend bool operator==(const Valuation&, const Valuation&) = default;

    /// Infinite exceeds every integer; a saturated value is unordered against n >= cap.
    friend std::partial_ordering operator<=>(const Valuation& v, std::uint32_t n);

private:
    Valuation(Kind kind, std::uint32_t value) : kind_(kind), value_(value) {}

    Kind kind_;
    std::uint32_t value_;
};

inline constexpr std::uint32_t kDefaultValuationCap = 4;

/// nu_p(P(x, y)) reported exactly below `cap`, saturated at `cap` otherwise.
Valuation valuation(const Polynomial& poly, std::int64_t x, std::int64_t y,
                    const PrimeModulus& pm, std::uint32_t cap = kDefaultValuationCap);

}  // namespace padicsq

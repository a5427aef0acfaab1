#include "padicsq/polynomial.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>

namespace padicsq {

void Polynomial::add_term(std::uint32_t i, std::uint32_t j, const mpz_class& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(Monomial{i, j}, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

std::uint32_t Polynomial::degree() const {
    std::uint32_t d = 0;
    for (const auto& [mono, c] : terms_) d = std::max(d, mono.i + mono.j);
    return d;
}

std::uint32_t Polynomial::degree_in(Variable v) const {
    std::uint32_t d = 0;
    for (const auto& [mono, c] : terms_) d = std::max(d, v == Variable::X ? mono.i : mono.j);
    return d;
}

mpz_class Polynomial::coefficient(std::uint32_t i, std::uint32_t j) const {
    auto it = terms_.find(Monomial{i, j});
    return it == terms_.end() ? mpz_class(0) : it->second;
}

ParseError::ParseError(ParseErrorKind kind, std::size_t position, const std::string& what)
    : std::runtime_error(what + " at position " + std::to_string(position)),
      kind_(kind),
      position_(position) {}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Polynomial run() {
        Polynomial poly;
        skip_ws();
        if (at_end()) fail(ParseErrorKind::Syntax, "empty polynomial");
        bool first = true;
        while (!at_end()) {
            int sign = 1;
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1 : 1;
                ++pos_;
                skip_ws();
            } else if (!first) {
                fail(ParseErrorKind::Syntax, "expected '+' or '-'");
            }
            parse_term(poly, sign);
            first = false;
            skip_ws();
        }
        return poly;
    }

private:
    void parse_term(Polynomial& poly, int sign) {
        mpz_class coeff = sign;
        std::uint32_t i = 0, j = 0;
        bool have_factor = false;
        for (;;) {
            skip_ws();
            if (at_end()) break;
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                coeff *= parse_integer();
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                std::string name;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                    name += text_[pos_++];
                if (name != "x" && name != "y")
                    fail(ParseErrorKind::UnsupportedVariable, "unsupported variable '" + name + "'", start);
                std::uint32_t e = parse_exponent();
                (name == "x" ? i : j) += e;
            } else {
                if (!have_factor) fail(ParseErrorKind::Syntax, std::string("unexpected character '") + c + "'");
                break;
            }
            have_factor = true;
            skip_ws();
            if (at_end()) break;
            if (peek() == '*') {
                ++pos_;
                skip_ws();
                if (at_end() || !(std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                    fail(ParseErrorKind::Syntax, "expected factor after '*'");
                continue;
            }
            if (peek() == '+' || peek() == '-') break;
            // implicit multiplication, e.g. "2x" or "x y"
        }
        if (!have_factor) fail(ParseErrorKind::Syntax, "expected term");
        poly.add_term(i, j, coeff);
    }

    std::uint32_t parse_exponent() {
        skip_ws();
        if (at_end() || peek() != '^') return 1;
        ++pos_;
        skip_ws();
        if (!at_end() && peek() == '-') fail(ParseErrorKind::NegativeExponent, "negative exponent");
        if (!at_end() && peek() == '+') {
            ++pos_;
            skip_ws();
        }
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
            fail(ParseErrorKind::Syntax, "expected exponent");
        std::size_t start = pos_;
        mpz_class e = parse_integer();
        if (e > std::numeric_limits<std::uint32_t>::max() / 2)
            fail(ParseErrorKind::Syntax, "exponent too large", start);
        return static_cast<std::uint32_t>(e.get_ui());
    }

    mpz_class parse_integer() {
        std::string digits;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) digits += text_[pos_++];
        return mpz_class(digits, 10);
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    [[noreturn]] void fail(ParseErrorKind kind, const std::string& what) const { fail(kind, what, pos_); }
    [[noreturn]] void fail(ParseErrorKind kind, const std::string& what, std::size_t at) const {
        throw ParseError(kind, at, what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text) { return Parser(text).run(); }

std::string to_string(const Polynomial& poly) {
    if (poly.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto it = poly.terms().rbegin(); it != poly.terms().rend(); ++it) {
        const auto& [mono, c] = *it;
        mpz_class mag = abs(c);
        if (first) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        first = false;

        std::vector<std::string> factors;
        bool constant = mono.i == 0 && mono.j == 0;
        if (mag != 1 || constant) factors.push_back(mag.get_str());
        auto power = [&](const char* var, std::uint32_t e) {
            if (e == 0) return;
            factors.push_back(e == 1 ? std::string(var) : std::string(var) + "^" + std::to_string(e));
        };
        power("x", mono.i);
        power("y", mono.j);
        for (std::size_t k = 0; k < factors.size(); ++k) {
            if (k) out += "*";
            out += factors[k];
        }
    }
    return out;
}

Polynomial partial_derivative(const Polynomial& poly, Variable var) {
    Polynomial d;
    for (const auto& [mono, c] : poly.terms()) {
        if (var == Variable::X) {
            if (mono.i > 0) d.add_term(mono.i - 1, mono.j, c * mono.i);
        } else {
            if (mono.j > 0) d.add_term(mono.i, mono.j - 1, c * mono.j);
        }
    }
    return d;
}

mpz_class eval_exact(const Polynomial& poly, const mpz_class& x, const mpz_class& y) {
    mpz_class sum = 0, xp, yp;
    for (const auto& [mono, c] : poly.terms()) {
        mpz_pow_ui(xp.get_mpz_t(), x.get_mpz_t(), mono.i);
        mpz_pow_ui(yp.get_mpz_t(), y.get_mpz_t(), mono.j);
        sum += c * xp * yp;
    }
    return sum;
}

ModEvaluator::ModEvaluator(const Polynomial& poly, std::uint64_t modulus) : modulus_(modulus) {
    if (modulus < 2) throw std::invalid_argument("modulus must be at least 2");
    mpz_class m;
    mpz_import(m.get_mpz_t(), 1, 1, sizeof(modulus), 0, 0, &modulus);
    for (const auto& [mono, c] : poly.terms()) {
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
        if (r == 0) continue;
        std::uint64_t rv = 0;
        mpz_export(&rv, nullptr, 1, sizeof(rv), 0, 0, r.get_mpz_t());
        terms_.push_back({mono.i, mono.j, rv});
        max_i_ = std::max(max_i_, mono.i);
        max_j_ = std::max(max_j_, mono.j);
    }
}

std::uint64_t ModEvaluator::reduce(std::int64_t v) const {
    if (v >= 0) return static_cast<std::uint64_t>(v) % modulus_;
    std::uint64_t r = (0 - static_cast<std::uint64_t>(v)) % modulus_;
    return r == 0 ? 0 : modulus_ - r;
}

namespace {

// Power tables live on the stack for the usual small degrees.
template <typename Fn>
std::uint64_t with_powers(std::uint32_t max_deg, std::uint64_t base, std::uint64_t m, Fn&& fn) {
    auto fill = [&](std::uint64_t* pw) {
        pw[0] = 1 % m;
        for (std::uint32_t e = 1; e <= max_deg; ++e) pw[e] = mul_mod(pw[e - 1], base, m);
        return fn(pw);
    };
    if (max_deg < 32) {
        std::array<std::uint64_t, 32> buf;
        return fill(buf.data());
    }
    std::vector<std::uint64_t> buf(max_deg + 1);
    return fill(buf.data());
}

}  // namespace

std::uint64_t ModEvaluator::operator()(std::int64_t x, std::int64_t y) const {
    const std::uint64_t m = modulus_;
    const std::uint64_t xr = reduce(x), yr = reduce(y);
    return with_powers(max_i_, xr, m, [&](const std::uint64_t* xp) {
        return with_powers(max_j_, yr, m, [&](const std::uint64_t* yp) {
            std::uint64_t acc = 0;
            for (const auto& t : terms_) acc = add_mod(acc, mul_mod(t.c, mul_mod(xp[t.i], yp[t.j], m), m), m);
            return acc;
        });
    });
}

std::vector<std::uint64_t> ModEvaluator::specialize_x(std::int64_t x) const {
    std::vector<std::uint64_t> row(max_j_ + 1, 0);
    const std::uint64_t m = modulus_;
    with_powers(max_i_, reduce(x), m, [&](const std::uint64_t* xp) {
        for (const auto& t : terms_) row[t.j] = add_mod(row[t.j], mul_mod(t.c, xp[t.i], m), m);
        return std::uint64_t{0};
    });
    return row;
}

std::uint64_t ModEvaluator::eval_row(const std::vector<std::uint64_t>& row, std::int64_t y) const {
    const std::uint64_t m = modulus_;
    const std::uint64_t yr = reduce(y);
    std::uint64_t acc = 0;
    for (auto it = row.rbegin(); it != row.rend(); ++it) acc = add_mod(mul_mod(acc, yr, m), *it, m);
    return acc;
}

std::uint64_t eval_mod(const Polynomial& poly, std::int64_t x, std::int64_t y, std::uint64_t modulus) {
    return ModEvaluator(poly, modulus)(x, y);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) throw std::domain_error("inverse of zero");
    return pow_mod(a, p - 2, p);
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These witnesses are deterministic for every n < 2^64.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeModulus::PrimeModulus(std::uint64_t p) : p_(p), p_squared_(0) {
    if (p < 3 || !is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not an odd prime");
    if (p > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("prime " + std::to_string(p) + " too large: p^2 must fit in 64 bits");
    p_squared_ = p * p;
}

bool Valuation::at_least_value(std::uint32_t n) const {
    switch (kind_) {
        case Kind::Infinite: return true;
        case Kind::AtLeast:
        case Kind::Finite: return value_ >= n;
    }
    return false;
}

std::partial_ordering operator<=>(const Valuation& v, std::uint32_t n) {
    switch (v.kind()) {
        case Valuation::Kind::Infinite: return std::partial_ordering::greater;
        case Valuation::Kind::Finite: return v.value() <=> n;
        case Valuation::Kind::AtLeast:
            return n < v.value() ? std::partial_ordering::greater : std::partial_ordering::unordered;
    }
    return std::partial_ordering::unordered;
}

Valuation valuation(const Polynomial& poly, std::int64_t x, std::int64_t y, const PrimeModulus& pm,
                    std::uint32_t cap) {
    if (cap == 0) throw std::invalid_argument("valuation cap must be at least 1");
    const std::uint64_t p = pm.p();

    // Fast path: reduce modulo p^cap when it fits in a machine word.
    std::uint64_t pc = 1;
    bool fits = true;
    for (std::uint32_t e = 0; e < cap; ++e) {
        if (pc > std::numeric_limits<std::uint64_t>::max() / p) {
            fits = false;
            break;
        }
        pc *= p;
    }
    if (fits) {
        std::uint64_t r = eval_mod(poly, x, y, pc);
        if (r != 0) {
            std::uint32_t v = 0;
            while (r % p == 0) {
                r /= p;
                ++v;
            }
            return Valuation::finite(v);
        }
    }

    mpz_class value = eval_exact(poly, mpz_class(static_cast<long>(x)), mpz_class(static_cast<long>(y)));
    if (value == 0) return Valuation::infinite();
    mpz_class pz = static_cast<unsigned long>(p);
    std::uint32_t v = 0;
    while (v < cap && mpz_divisible_p(value.get_mpz_t(), pz.get_mpz_t())) {
        value /= pz;
        ++v;
    }
    return v < cap ? Valuation::finite(v) : Valuation::at_least(cap);
}

}  // namespace padicsq

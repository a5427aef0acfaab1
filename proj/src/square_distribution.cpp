#include "padicsq/square_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace padicsq {

std::uint64_t BlockHistogram::total_blocks() const {
    std::uint64_t s = 0;
    for (const auto& [x, c] : counts) s += c;
    return s;
}

std::uint64_t BlockHistogram::total_mass() const {
    std::uint64_t s = 0;
    for (const auto& [x, c] : counts) s += x * c;
    return s;
}

namespace {

// Each curve point's contribution to the grid, with inverses hoisted.
struct SweepLine {
    enum class Kind { SolveL, RowOnly, ColumnOnly, Everywhere } kind;
    std::uint64_t alpha, a, b;
    std::uint64_t inv = 0;    // of b for SolveL/ColumnOnly, of a for RowOnly
    std::uint64_t fixed = 0;  // row k (RowOnly) or column l (ColumnOnly)
};

std::vector<SweepLine> sweep_lines(const CurveData& cd) {
    const std::uint64_t p = cd.p();
    std::vector<SweepLine> lines;
    for (const auto& j : cd.jets) {
        SweepLine s{SweepLine::Kind::Everywhere, j.alpha, j.a, j.b};
        if (j.b != 0) {
            s.inv = inv_mod(j.b, p);
            if (j.a != 0) {
                s.kind = SweepLine::Kind::SolveL;
            } else {
                s.kind = SweepLine::Kind::ColumnOnly;
                s.fixed = mul_mod(neg_mod(j.alpha, p), s.inv, p);
            }
        } else if (j.a != 0) {
            s.kind = SweepLine::Kind::RowOnly;
            s.inv = inv_mod(j.a, p);
            s.fixed = mul_mod(neg_mod(j.alpha, p), s.inv, p);
        } else if (j.alpha != 0) {
            continue;  // f = alpha*p != 0 mod p^2 on the whole block
        }
        lines.push_back(s);
    }
    return lines;
}

void fill_band(const std::vector<SweepLine>& lines, std::uint64_t p, std::uint64_t row_lo, std::uint64_t row_hi,
               std::uint32_t* band /* rows [row_lo,row_hi) of the grid */) {
    for (const auto& s : lines) {
        switch (s.kind) {
            case SweepLine::Kind::SolveL:
                for (std::uint64_t k = row_lo; k < row_hi; ++k) {
                    // l = -(alpha + k a) / b
                    const std::uint64_t num = add_mod(s.alpha, mul_mod(k, s.a, p), p);
                    const std::uint64_t l = mul_mod(neg_mod(num, p), s.inv, p);
                    ++band[(k - row_lo) * p + l];
                }
                break;
            case SweepLine::Kind::ColumnOnly:
                for (std::uint64_t k = row_lo; k < row_hi; ++k) ++band[(k - row_lo) * p + s.fixed];
                break;
            case SweepLine::Kind::RowOnly:
                if (s.fixed >= row_lo && s.fixed < row_hi) {
                    std::uint32_t* row = band + (s.fixed - row_lo) * p;
                    for (std::uint64_t l = 0; l < p; ++l) ++row[l];
                }
                break;
            case SweepLine::Kind::Everywhere:
                for (std::uint64_t c = 0; c < (row_hi - row_lo) * p; ++c) ++band[c];
                break;
        }
    }
}

}  // namespace

BlockHistogram block_histogram_sweep(const CurveData& cd, const SweepOptions& options) {
    const std::uint64_t p = cd.p();
    BlockHistogram h{p, cd.m(), {}};
    const auto lines = sweep_lines(cd);
    const std::uint64_t band_rows = options.band_rows == 0 ? p : std::min(options.band_rows, p);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(options.threads), band_rows));

    std::vector<std::uint32_t> grid(band_rows * p);
    for (std::uint64_t lo = 0; lo < p; lo += band_rows) {
        const std::uint64_t hi = std::min(p, lo + band_rows);
        std::fill(grid.begin(), grid.end(), 0);
        const std::uint64_t rows = hi - lo;
        if (workers <= 1) {
            fill_band(lines, p, lo, hi, grid.data());
        } else {
            // Each line visits a row at most once per cell, so row sub-bands never overlap.
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                const std::uint64_t a = lo + rows * w / workers, b = lo + rows * (w + 1) / workers;
                pool.emplace_back([&, a, b] { fill_band(lines, p, a, b, grid.data() + (a - lo) * p); });
            }
        }
        std::vector<std::uint64_t> dense;
        for (std::uint64_t c = 0; c < rows * p; ++c) {
            if (grid[c] >= dense.size()) dense.resize(grid[c] + 1, 0);
            ++dense[grid[c]];
        }
        for (std::uint64_t x = 0; x < dense.size(); ++x) {
            if (dense[x]) h.counts[x] += dense[x];
        }
    }
    return h;
}

BlockHistogram block_histogram_naive(const Polynomial& f, const PrimeModulus& pm, std::uint64_t oracle_bound) {
    if (pm.p() > oracle_bound) throw OracleBoundExceeded("block_histogram_naive", pm.p(), oracle_bound);
    const std::uint64_t p = pm.p();
    const ModEvaluator mod_p(f, p), mod_p2(f, pm.p_squared());

    std::vector<CurvePoint> curve;
    for (std::uint64_t x = 0; x < p; ++x) {
        for (std::uint64_t y = 0; y < p; ++y) {
            if (mod_p(static_cast<std::int64_t>(x), static_cast<std::int64_t>(y)) == 0) curve.push_back({x, y});
        }
    }

    BlockHistogram h{p, curve.size(), {}};
    for (std::uint64_t k = 0; k < p; ++k) {
        for (std::uint64_t l = 0; l < p; ++l) {
            std::uint64_t x_value = 0;
            for (const auto& pt : curve) {
                const auto xx = static_cast<std::int64_t>(pt.x + k * p), yy = static_cast<std::int64_t>(pt.y + l * p);
                if (mod_p2(xx, yy) == 0) ++x_value;
            }
            ++h.counts[x_value];
        }
    }
    return h;
}

mpz_class stirling2(int k, int i) {
    if (k < 0 || i < 0 || k > 30) throw std::invalid_argument("stirling2 requires 0 <= i <= k <= 30");
    if (i > k) return 0;
    std::vector<mpz_class> row(static_cast<std::size_t>(k) + 1, 0);
    row[0] = 1;
    for (int n = 1; n <= k; ++n) {
        for (int j = std::min(n, k); j >= 1; --j) row[j] = j * row[j] + row[j - 1];
        row[0] = 0;
    }
    return row[static_cast<std::size_t>(i)];
}

mpz_class bell(int k) {
    mpz_class s = 0;
    for (int i = 0; i <= k; ++i) s += stirling2(k, i);
    return s;
}

mpq_class empirical_moment(const BlockHistogram& h, int k) {
    const std::uint64_t n = h.total_blocks();
    if (n == 0) throw EmptyHistogram("histogram has no blocks");
    mpz_class num = 0, xp;
    for (const auto& [x, c] : h.counts) {
        mpz_ui_pow_ui(xp.get_mpz_t(), x, static_cast<unsigned long>(k));
        num += xp * static_cast<unsigned long>(c);
    }
    mpq_class q(num, mpz_class(static_cast<unsigned long>(n)));
    q.canonicalize();
    return q;
}

double poisson_pmf(std::uint64_t j) { return std::exp(-1.0 - std::lgamma(static_cast<double>(j) + 1.0)); }

PoissonComparison poisson_compare(const BlockHistogram& h, int max_moment) {
    if (max_moment < 0 || max_moment > kMaxMoment)
        throw std::invalid_argument("max_moment must be in [0, " + std::to_string(kMaxMoment) + "]");
    const std::uint64_t n = h.total_blocks();
    if (n == 0) throw EmptyHistogram("histogram has no blocks");
    const double total = static_cast<double>(n);
    const std::uint64_t largest = h.counts.rbegin()->first;

    auto observed = [&](std::uint64_t j) -> double {
        auto it = h.counts.find(j);
        return it == h.counts.end() ? 0.0 : static_cast<double>(it->second);
    };

    PoissonComparison out;
    double head = 0;
    double tv = 0;
    for (std::uint64_t j = 0; j <= largest; ++j) {
        const double q = poisson_pmf(j);
        head += q;
        tv += std::abs(observed(j) / total - q);
    }
    tv += std::max(0.0, 1.0 - head);  // overflow bin: no observations beyond the largest value
    out.tv_distance = 0.5 * tv;

    // Pool bins left to right until each expected count reaches 5; the last
    // group absorbs the infinite tail.
    std::vector<std::pair<double, double>> groups;  // (observed, expected)
    double obs = 0, exp_count = 0, cum = 0;
    for (std::uint64_t j = 0;; ++j) {
        const double q = poisson_pmf(j);
        obs += observed(j);
        exp_count += q * total;
        cum += q;
        const double rest = std::max(0.0, 1.0 - cum) * total;
        if (j >= largest && (rest < 5.0 || q * total < 1e-12)) {
            groups.push_back({obs, exp_count + rest});
            break;
        }
        if (exp_count >= 5.0) {
            groups.push_back({obs, exp_count});
            obs = exp_count = 0;
        }
    }
    if (groups.size() > 1 && groups.back().second < 5.0) {
        const auto last = groups.back();
        groups.pop_back();
        groups.back().first += last.first;
        groups.back().second += last.second;
    }
    for (const auto& [o, e] : groups) out.chi_square += (o - e) * (o - e) / e;
    out.chi_square_dof = static_cast<int>(groups.size()) - 1;

    for (int k = 1; k <= max_moment; ++k) {
        out.exact_moments.push_back(empirical_moment(h, k));
        out.empirical_moments.push_back(out.exact_moments.back().get_d());
        out.bell_targets.push_back(bell(k));
    }
    return out;
}

IndicatorJointPmf indicator_joint_pmf(const PairJointCounts& c, std::uint64_t p) {
    const mpz_class p2 = mpz_class(static_cast<unsigned long>(p)) * static_cast<unsigned long>(p);
    auto q = [&](std::uint64_t n) {
        mpq_class r(mpz_class(static_cast<unsigned long>(n)), p2);
        r.canonicalize();
        return r;
    };
    return {q(c.n_gg), q(c.n_g1), q(c.n_1g), q(c.n_11)};
}

double IndicatorJointPmf::correlation() const {
    const mpq_class m1 = p11 + p10, m2 = p11 + p01;
    const mpq_class cov = p11 - m1 * m2;
    const mpq_class v1 = m1 * (1 - m1), v2 = m2 * (1 - m2);
    if (v1 == 0 || v2 == 0) return 0.0;
    return cov.get_d() / std::sqrt(v1.get_d() * v2.get_d());
}

}  // namespace padicsq

#include "padicsq/block_counts.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <thread>

namespace padicsq {

OracleBoundExceeded::OracleBoundExceeded(std::string what, std::uint64_t p, std::uint64_t bound)
    : std::runtime_error(what + ": prime " + std::to_string(p) + " exceeds oracle bound " + std::to_string(bound)),
      p_(p),
      bound_(bound) {}

namespace {

void check_oracle_bound(const char* who, const PrimeModulus& pm, std::uint64_t bound) {
    if (pm.p() > bound) throw OracleBoundExceeded(who, pm.p(), bound);
}

// n (n-1) ... (n-k+1)
std::uint64_t falling(std::uint64_t n, int k) {
    std::uint64_t r = 1;
    for (int i = 0; i < k; ++i) {
        if (n < static_cast<std::uint64_t>(i)) return 0;
        r *= n - static_cast<std::uint64_t>(i);
    }
    return r;
}

template <typename Fn>
void parallel_bands(std::uint64_t n, unsigned threads, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, n)));
    if (workers <= 1) {
        fn(0u, std::uint64_t{0}, n);
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back([&, w] { fn(w, n * w / workers, n * (w + 1) / workers); });
}

}  // namespace

BlockCounts block_count_closed_form(const JetVector& jet, const PrimeModulus& pm) {
    const std::uint64_t p = pm.p();
    if (!jet.degenerate()) return {p * (p - 1), p};
    if (jet.alpha != 0) return {p * p, 0};
    return {0, p * p};
}

BlockCounts block_count_oracle(const Polynomial& f, const PrimeModulus& pm, const CurvePoint& pt,
                               std::uint64_t oracle_bound) {
    check_oracle_bound("block_count_oracle", pm, oracle_bound);
    const std::uint64_t p = pm.p();
    BlockCounts counts;
    for (std::uint64_t k = 0; k < p; ++k) {
        for (std::uint64_t l = 0; l < p; ++l) {
            const Valuation v = valuation(f, static_cast<std::int64_t>(pt.x + k * p),
                                          static_cast<std::int64_t>(pt.y + l * p), pm, 2);
            if (v.equals(1)) {
                ++counts.val1;
            } else if (v.at_least_value(2)) {
                ++counts.valgt1;
            }
        }
    }
    return counts;
}

std::uint64_t total_val1_in_p2_square(const CurveData& cd) {
    std::uint64_t s = 0;
    for (const auto& jet : cd.jets) s += block_count_closed_form(jet, cd.pm).val1;
    return s;
}

std::uint64_t total_val1_oracle(const Polynomial& f, const PrimeModulus& pm, std::uint64_t oracle_bound) {
    check_oracle_bound("total_val1_oracle", pm, oracle_bound);
    const std::uint64_t p = pm.p(), p2 = pm.p_squared();
    const ModEvaluator ev(f, p2);
    std::uint64_t count = 0;
    for (std::uint64_t x = 0; x < p2; ++x) {
        const auto row = ev.specialize_x(static_cast<std::int64_t>(x));
        for (std::uint64_t y = 0; y < p2; ++y) {
            const std::uint64_t r = ev.eval_row(row, static_cast<std::int64_t>(y));
            if (r % p == 0 && r != 0) ++count;
        }
    }
    return count;
}

TranslateProfile::TranslateProfile(const Polynomial& f, const PrimeModulus& pm, const CurvePoint& pt)
    : p_(pm.p()), cells_(pm.p_squared()), words_((cells_ + 63) / 64, 0) {
    // nu >= 1 holds on every translate of a curve point, so nu > 1 iff p^2 | f.
    const ModEvaluator ev(f, pm.p_squared());
    for (std::uint64_t k = 0; k < p_; ++k) {
        const auto row = ev.specialize_x(static_cast<std::int64_t>(pt.x + k * p_));
        for (std::uint64_t l = 0; l < p_; ++l) {
            if (ev.eval_row(row, static_cast<std::int64_t>(pt.y + l * p_)) == 0) {
                const std::uint64_t idx = k * p_ + l;
                words_[idx / 64] |= std::uint64_t{1} << (idx % 64);
            }
        }
    }
}

bool TranslateProfile::high(std::uint64_t k, std::uint64_t l) const {
    const std::uint64_t idx = k * p_ + l;
    return (words_[idx / 64] >> (idx % 64)) & 1;
}

std::uint64_t TranslateProfile::count_high() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
}

PairJointCounts pair_joint_from_profiles(const TranslateProfile& first, const TranslateProfile& second) {
    PairJointCounts c;
    const auto& a = first.words();
    const auto& b = second.words();
    for (std::size_t i = 0; i < a.size(); ++i) {
        c.n_gg += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
        c.n_g1 += static_cast<std::uint64_t>(std::popcount(a[i] & ~b[i]));
        c.n_1g += static_cast<std::uint64_t>(std::popcount(~a[i] & b[i]));
    }
    c.n_11 = first.cells() - c.n_gg - c.n_g1 - c.n_1g;
    return c;
}

PairJointCounts pair_joint_closed_form(const JetVector& j1, const JetVector& j2, const PrimeModulus& pm) {
    if (j1.degenerate() || j2.degenerate())
        throw DegenerateJet("pair_joint_closed_form requires non-vanishing gradients");
    const std::uint64_t p = pm.p();
    const std::array<JetVector, 2> rows{j1, j2};
    switch (rank_class(rows, p)) {
        case RankClass::Rank2FirstTwoIndep: return {(p - 1) * (p - 1), p - 1, p - 1, 1};
        case RankClass::Rank1: return {p * (p - 1), 0, 0, p};
        case RankClass::Rank2FirstTwoDep: return {p * (p - 2), p, p, 0};
        default: break;
    }
    throw DegenerateJet("unexpected rank class for two smooth jets");
}

PairJointCounts pair_joint_oracle(const Polynomial& f, const PrimeModulus& pm, const CurvePoint& pt1,
                                  const CurvePoint& pt2, std::uint64_t oracle_bound) {
    check_oracle_bound("pair_joint_oracle", pm, oracle_bound);
    return pair_joint_from_profiles(TranslateProfile(f, pm, pt1), TranslateProfile(f, pm, pt2));
}

std::string to_string(RankClass rc) {
    switch (rc) {
        case RankClass::Rank0: return "Rank0";
        case RankClass::Rank1: return "Rank1";
        case RankClass::Rank2FirstTwoIndep: return "Rank2FirstTwoIndep";
        case RankClass::Rank2FirstTwoDep: return "Rank2FirstTwoDep";
        case RankClass::Rank3: return "Rank3";
    }
    return "?";
}

std::size_t rank_mod_p(std::vector<std::uint64_t> entries, std::size_t cols, std::uint64_t p) {
    if (cols == 0) return 0;
    const std::size_t rows = entries.size() / cols;
    auto at = [&](std::size_t r, std::size_t c) -> std::uint64_t& { return entries[r * cols + c]; };
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rank;
        while (pivot < rows && at(pivot, c) % p == 0) ++pivot;
        if (pivot == rows) continue;
        if (pivot != rank) {
            for (std::size_t j = 0; j < cols; ++j) std::swap(at(pivot, j), at(rank, j));
        }
        const std::uint64_t inv = inv_mod(at(rank, c), p);
        for (std::size_t j = c; j < cols; ++j) at(rank, j) = mul_mod(at(rank, j) % p, inv, p);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            const std::uint64_t factor = at(r, c) % p;
            if (factor == 0) continue;
            for (std::size_t j = c; j < cols; ++j)
                at(r, j) = add_mod(at(r, j) % p, p - mul_mod(factor, at(rank, j), p), p);
        }
        ++rank;
    }
    return rank;
}

RankClass rank_class(std::span<const JetVector> rows, std::uint64_t p) {
    std::vector<std::uint64_t> full, left;
    full.reserve(rows.size() * 3);
    left.reserve(rows.size() * 2);
    for (const auto& j : rows) {
        full.insert(full.end(), {j.a % p, j.b % p, j.alpha % p});
        left.insert(left.end(), {j.a % p, j.b % p});
    }
    switch (rank_mod_p(std::move(full), 3, p)) {
        case 0: return RankClass::Rank0;
        case 1: return RankClass::Rank1;
        case 2:
            return rank_mod_p(std::move(left), 2, p) == 2 ? RankClass::Rank2FirstTwoIndep
                                                           : RankClass::Rank2FirstTwoDep;
        default: return RankClass::Rank3;
    }
}

namespace {

// Scale a non-zero vector so its first non-zero coordinate is 1.
JetVector projective_rep(const JetVector& v, std::uint64_t p) {
    std::uint64_t lead = v.a != 0 ? v.a : (v.b != 0 ? v.b : v.alpha);
    const std::uint64_t inv = inv_mod(lead, p);
    return {mul_mod(v.a, inv, p), mul_mod(v.b, inv, p), mul_mod(v.alpha, inv, p)};
}

template <typename Key>
std::vector<std::uint64_t> class_sizes(std::vector<Key> keys) {
    std::sort(keys.begin(), keys.end());
    std::vector<std::uint64_t> sizes;
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        sizes.push_back(j - i);
        i = j;
    }
    return sizes;
}

RankTupleCounts count_naive(const CurveData& cd, int k, std::uint64_t budget, unsigned threads) {
    const std::uint64_t m = cd.m(), p = cd.p();
    long double work = 1;
    for (int i = 0; i < k; ++i) work *= static_cast<long double>(m);
    if (work > static_cast<long double>(budget))
        throw BudgetExceeded("naive tuple count needs m^k = " + std::to_string(static_cast<double>(work)) +
                             " > budget " + std::to_string(budget));

    const unsigned workers = resolve_threads(threads);
    std::vector<RankTupleCounts> partial(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, m)));
    parallel_bands(m, workers, [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
        RankTupleCounts& acc = partial[w];
        std::vector<JetVector> rows(static_cast<std::size_t>(k));
        std::vector<std::size_t> idx(static_cast<std::size_t>(k));
        std::function<void(int)> rec = [&](int depth) {
            if (depth == k) {
                switch (rank_class(rows, p)) {
                    case RankClass::Rank0: ++acc.rank0; break;
                    case RankClass::Rank1:
                        ++acc.m_k1;
                        if (std::all_of(rows.begin(), rows.end(), [](const JetVector& j) { return j.degenerate(); }))
                            ++acc.rank1_zero_gradient;
                        break;
                    case RankClass::Rank2FirstTwoIndep: ++acc.m_k2; break;
                    default: break;
                }
                return;
            }
            for (std::size_t i = 0; i < m; ++i) {
                if (std::find(idx.begin(), idx.begin() + depth, i) != idx.begin() + depth) continue;
                idx[depth] = i;
                rows[depth] = cd.jets[i];
                rec(depth + 1);
            }
        };
        for (std::uint64_t first = lo; first < hi; ++first) {
            idx[0] = first;
            rows[0] = cd.jets[first];
            rec(1);
        }
    });

    RankTupleCounts out{k, m};
    for (const auto& part : partial) {
        out.m_k1 += part.m_k1;
        out.m_k2 += part.m_k2;
        out.rank0 += part.rank0;
        out.rank1_zero_gradient += part.rank1_zero_gradient;
    }
    return out;
}

RankTupleCounts count_aggregated(const CurveData& cd, int k, unsigned threads) {
    if (k < 1 || k > 3) throw std::invalid_argument("aggregated tuple count supports k in {1,2,3}");
    const std::uint64_t m = cd.m(), p = cd.p();
    RankTupleCounts out{k, m};

    std::uint64_t zeros = 0;
    std::vector<std::array<std::uint64_t, 3>> lines;  // projective classes of non-zero jets
    std::vector<std::array<std::uint64_t, 2>> grad_dirs;
    for (const auto& j : cd.jets) {
        if (j.is_zero()) {
            ++zeros;
            continue;
        }
        const JetVector rep = projective_rep(j, p);
        lines.push_back({rep.a, rep.b, rep.alpha});
        if (!j.degenerate()) {
            const std::uint64_t inv = inv_mod(j.a != 0 ? j.a : j.b, p);
            grad_dirs.push_back({mul_mod(j.a, inv, p), mul_mod(j.b, inv, p)});
        }
    }

    // Rank <= 1: all rows on one line through the origin (zero rows allowed).
    const std::uint64_t all_zero = falling(zeros, k);
    out.rank0 = all_zero;
    std::uint64_t line_tuples_smooth = 0;  // summed over lines with non-zero gradient
    {
        auto sorted = lines;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            const std::uint64_t t = falling(j - i + zeros, k) - all_zero;
            out.m_k1 += t;
            if (sorted[i][0] == 0 && sorted[i][1] == 0) {
                out.rank1_zero_gradient += t;
            } else {
                line_tuples_smooth += t;
            }
            i = j;
        }
    }

    if (k == 1) return out;

    if (k == 2) {
        // Independent gradients <=> different gradient directions.
        const std::uint64_t n = grad_dirs.size();
        std::uint64_t same = 0;
        for (std::uint64_t s : class_sizes(std::move(grad_dirs))) same += s * s;
        out.m_k2 = n * n - same;
        return out;
    }

    // k == 3: tally jets with non-zero gradient on every plane alpha = s*a + t*b.
    if (p > 46341) throw BudgetExceeded("plane table for k=3 needs p^2 counters; p too large");
    std::vector<std::uint32_t> hits(p * p, 0);
    parallel_bands(p, resolve_threads(threads), [&](unsigned, std::uint64_t lo, std::uint64_t hi) {
        for (const auto& j : cd.jets) {
            if (j.degenerate()) continue;
            if (j.b != 0) {
                const std::uint64_t binv = inv_mod(j.b, p);
                for (std::uint64_t s = lo; s < hi; ++s) {
                    const std::uint64_t t = mul_mod(add_mod(j.alpha, p - mul_mod(s, j.a, p), p), binv, p);
                    ++hits[s * p + t];
                }
            } else {
                const std::uint64_t s = mul_mod(j.alpha, inv_mod(j.a, p), p);
                if (s < lo || s >= hi) continue;
                for (std::uint64_t t = 0; t < p; ++t) ++hits[s * p + t];
            }
        }
    });
    unsigned __int128 plane_tuples = 0;
    for (std::uint32_t h : hits) plane_tuples += falling(zeros + h, k);
    const unsigned __int128 non_spanning =
        static_cast<unsigned __int128>(p) * p * all_zero + static_cast<unsigned __int128>(p) * line_tuples_smooth;
    out.m_k2 = static_cast<std::uint64_t>(plane_tuples - non_spanning);
    return out;
}

}  // namespace

RankTupleCounts count_rank_tuples(const CurveData& cd, int k, TupleAlgorithm algorithm, std::uint64_t budget,
                                  unsigned threads) {
    if (k < 1) throw std::invalid_argument("tuple length k must be at least 1");
    return algorithm == TupleAlgorithm::Naive ? count_naive(cd, k, budget, threads)
                                              : count_aggregated(cd, k, threads);
}

std::uint64_t rank1_pair_ceiling(const Polynomial& f) {
    // f, f(r,s), the gradient determinant and the alpha-compatibility equation.
    const std::uint64_t d = std::max<std::uint64_t>(f.degree(), 1);
    return d * d * std::max<std::uint64_t>(2 * (d - 1), 1) * (2 * d - 1);
}

std::uint64_t prop5_prime_bound(int k) {
    switch (k) {
        case 1: return kDefaultOracleBound;
        case 2: return 31;
        case 3: return 13;
        default: return 7;
    }
}

Prop5Check prop5_identity_check(const CurveData& cd, int k) {
    if (k < 1) throw std::invalid_argument("tuple length k must be at least 1");
    check_oracle_bound("prop5_identity_check", cd.pm, prop5_prime_bound(k));
    const std::uint64_t p = cd.p();
    const std::size_t m = cd.m();

    std::vector<TranslateProfile> profiles;
    profiles.reserve(m);
    for (const auto& pt : cd.points) profiles.emplace_back(cd.f, cd.pm, pt);
    const std::size_t words = (cd.pm.p_squared() + 63) / 64;

    // Sum over ordered distinct tuples of #{(k,l) : every Y = 1}.
    mpz_class solutions = 0;
    std::vector<std::size_t> idx(static_cast<std::size_t>(k));
    std::vector<std::vector<std::uint64_t>> acc(static_cast<std::size_t>(k) + 1,
                                                std::vector<std::uint64_t>(words, ~std::uint64_t{0}));
    // Mask off padding bits past p^2.
    if (cd.pm.p_squared() % 64 != 0)
        acc[0][words - 1] = (std::uint64_t{1} << (cd.pm.p_squared() % 64)) - 1;
    std::function<void(int)> rec = [&](int depth) {
        if (depth == k) {
            std::uint64_t c = 0;
            for (auto w : acc[static_cast<std::size_t>(depth)]) c += static_cast<std::uint64_t>(std::popcount(w));
            solutions += static_cast<unsigned long>(c);
            return;
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (std::find(idx.begin(), idx.begin() + depth, i) != idx.begin() + depth) continue;
            idx[static_cast<std::size_t>(depth)] = i;
            const auto& prev = acc[static_cast<std::size_t>(depth)];
            auto& next = acc[static_cast<std::size_t>(depth) + 1];
            const auto& bits = profiles[i].words();
            for (std::size_t w = 0; w < words; ++w) next[w] = prev[w] & bits[w];
            rec(depth + 1);
        }
    };
    rec(0);

    const RankTupleCounts counts = count_rank_tuples(cd, k, TupleAlgorithm::Naive);
    const mpz_class pz = static_cast<unsigned long>(p);
    Prop5Check check;
    check.lhs = mpq_class(solutions, pz * pz);
    check.rhs = mpq_class(mpz_class(static_cast<unsigned long>(counts.m_k2)), pz * pz) +
                mpq_class(mpz_class(static_cast<unsigned long>(counts.m_k1)), pz);
    check.lhs.canonicalize();
    check.rhs.canonicalize();
    return check;
}

}  // namespace padicsq

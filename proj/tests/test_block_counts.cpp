#include <doctest.h>

#include <functional>
#include <map>

#include "padicsq/block_counts.hpp"
#include "support.hpp"

using namespace padicsq;

namespace {

// high[i][k*p+l] = nu_p(f(x_i+kp, y_i+lp)) > 1, by exact arithmetic.
std::vector<std::vector<bool>> reference_high(const Polynomial& f, std::uint64_t p,
                                              const std::vector<testsupport::RefPoint>& pts) {
    std::vector<std::vector<bool>> out;
    for (const auto& pt : pts) {
        std::vector<bool> row(p * p);
        for (std::uint64_t k = 0; k < p; ++k)
            for (std::uint64_t l = 0; l < p; ++l)
                row[k * p + l] = testsupport::exact_valuation(
                                     testsupport::exact(f, pt.x + k * p, pt.y + l * p), p, 2) >= 2;
        out.push_back(std::move(row));
    }
    return out;
}

// Sum over ordered distinct k-tuples of P(all Y = 1).
mpq_class reference_tuple_expectation(const std::vector<std::vector<bool>>& high, std::uint64_t p, int k) {
    const std::size_t m = high.size();
    mpz_class total = 0;
    std::vector<std::size_t> idx;
    std::function<void()> rec = [&] {
        if (static_cast<int>(idx.size()) == k) {
            for (std::uint64_t c = 0; c < p * p; ++c) {
                bool all = true;
                for (auto i : idx) all = all && high[i][c];
                if (all) ++total;
            }
            return;
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (std::find(idx.begin(), idx.end(), i) != idx.end()) continue;
            idx.push_back(i);
            rec();
            idx.pop_back();
        }
    };
    rec();
    mpq_class q(total, mpz_class(static_cast<unsigned long>(p * p)));
    q.canonicalize();
    return q;
}

}  // namespace

TEST_CASE("single-point closed forms") {
    const PrimeModulus p5(5), p3(3);
    CHECK(block_count_closed_form({1, 2, 3}, p5) == BlockCounts{20, 5});
    CHECK(block_count_closed_form({0, 0, 3}, p5) == BlockCounts{25, 0});
    CHECK(block_count_closed_form({0, 0, 0}, p5) == BlockCounts{0, 25});
    CHECK(block_count_closed_form({0, 0, 0}, p3) == BlockCounts{0, 9});
    CHECK(block_count_closed_form({0, 0, 2}, p3) == BlockCounts{9, 0});
}

TEST_CASE("single-point oracle examples") {
    const Polynomial lin = parse_polynomial("x+y+1");
    CHECK(block_count_oracle(lin, PrimeModulus(5), {1, 3}) == BlockCounts{20, 5});
    CHECK(block_count_oracle(lin, PrimeModulus(3), {0, 2}) == BlockCounts{6, 3});
    // f = 3 + 9x: zero gradient mod 3, alpha = 1 everywhere on the block.
    CHECK(block_count_oracle(parse_polynomial("9x+3"), PrimeModulus(3), {0, 0}) == BlockCounts{9, 0});
    // f = 9x: zero gradient mod 3, alpha = 0.
    CHECK(block_count_oracle(parse_polynomial("9x"), PrimeModulus(3), {0, 0}) == BlockCounts{0, 9});
    CHECK_THROWS_AS(block_count_oracle(lin, PrimeModulus(103), {0, 102}), OracleBoundExceeded);
}

TEST_CASE("closed form equals oracle at every curve point, degenerate points included") {
    for (const auto& s : testsupport::kSuite) {
        const Polynomial f = parse_polynomial(s);
        for (std::uint64_t p : {5ULL, 7ULL, 11ULL, 13ULL}) {
            const PrimeModulus pm(p);
            const CurveData cd = enumerate_curve(f, pm);
            for (std::size_t i = 0; i < cd.m(); ++i)
                CHECK(block_count_closed_form(cd.jets[i], pm) == block_count_oracle(f, pm, cd.points[i]));
        }
    }
}

TEST_CASE("whole-square totals") {
    CHECK(total_val1_in_p2_square(enumerate_curve(parse_polynomial("x+y+1"), PrimeModulus(5))) == 100);
    CHECK(total_val1_in_p2_square(enumerate_curve(parse_polynomial("1"), PrimeModulus(5))) == 0);
    const Polynomial f = parse_polynomial(testsupport::kTablePoly);
    for (std::uint64_t p : {5ULL, 7ULL}) {
        const PrimeModulus pm(p);
        const CurveData cd = enumerate_curve(f, pm);
        std::uint64_t ref = 0;
        for (std::uint64_t x = 0; x < p * p; ++x)
            for (std::uint64_t y = 0; y < p * p; ++y)
                if (testsupport::exact_valuation(testsupport::exact(f, x, y), p, 2) == 1) ++ref;
        CHECK(total_val1_oracle(f, pm) == ref);
        CHECK(total_val1_in_p2_square(cd) == ref);
        CHECK(ref == cd.m() * p * (p - 1));
    }
    // Degenerate point at p = 5 contributes p^2 instead of p(p-1).
    const Polynomial g = parse_polynomial("x^3+y^3+x^2*y+y+1");
    const PrimeModulus p5(5);
    const CurveData cd = enumerate_curve(g, p5);
    CHECK(total_val1_in_p2_square(cd) == total_val1_oracle(g, p5));
    CHECK(total_val1_in_p2_square(cd) == (cd.m() - 1) * 20 + 25);
}

TEST_CASE("pair closed forms") {
    const PrimeModulus p5(5);
    CHECK(pair_joint_closed_form({1, 0, 0}, {0, 1, 0}, p5) == PairJointCounts{16, 4, 4, 1});
    CHECK(pair_joint_closed_form({1, 2, 3}, {2, 4, 1}, p5) == PairJointCounts{20, 0, 0, 5});
    CHECK(pair_joint_closed_form({1, 2, 0}, {2, 4, 1}, p5) == PairJointCounts{15, 5, 5, 0});
    CHECK_THROWS_AS(pair_joint_closed_form({0, 0, 1}, {1, 1, 1}, p5), DegenerateJet);
}

TEST_CASE("pair oracle on the linear curve and on identical points") {
    const Polynomial lin = parse_polynomial("x+y+1");
    const PrimeModulus p5(5);
    const CurveData cd = enumerate_curve(lin, p5);
    for (std::size_t i = 0; i < cd.m(); ++i) {
        for (std::size_t j = 0; j < cd.m(); ++j) {
            const auto oracle = pair_joint_oracle(lin, p5, cd.points[i], cd.points[j]);
            CHECK(oracle.total() == 25);
            if (i == j) {
                CHECK(oracle.n_g1 == 0);
                CHECK(oracle.n_1g == 0);
                CHECK(oracle.n_11 + oracle.n_gg == 25);
            } else {
                CHECK(oracle == pair_joint_closed_form(cd.jets[i], cd.jets[j], p5));
            }
        }
    }
}

TEST_CASE("pair closed forms match profiles for every smooth pair at p = 11") {
    const Polynomial f = parse_polynomial(testsupport::kTablePoly);
    const PrimeModulus pm(11);
    const CurveData cd = enumerate_curve(f, pm);
    std::vector<TranslateProfile> prof;
    for (const auto& pt : cd.points) prof.emplace_back(f, pm, pt);
    std::map<RankClass, int> seen;
    for (auto i : smooth_points(cd)) {
        for (auto j : smooth_points(cd)) {
            if (i == j) continue;
            const std::array<JetVector, 2> rows{cd.jets[i], cd.jets[j]};
            ++seen[rank_class(rows, 11)];
            CHECK(pair_joint_closed_form(cd.jets[i], cd.jets[j], pm) == pair_joint_from_profiles(prof[i], prof[j]));
        }
    }
    CHECK(seen.count(RankClass::Rank2FirstTwoIndep) == 1);
}

TEST_CASE("translate profile agrees with exact valuations") {
    const Polynomial f = parse_polynomial("x^3+y^3+x^2*y+y+1");
    for (std::uint64_t p : {5ULL, 7ULL}) {
        const PrimeModulus pm(p);
        const auto ref = testsupport::reference_curve(f, p);
        const auto high = reference_high(f, p, ref);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            const TranslateProfile prof(f, pm, {ref[i].x, ref[i].y});
            for (std::uint64_t k = 0; k < p; ++k)
                for (std::uint64_t l = 0; l < p; ++l) CHECK(prof.high(k, l) == high[i][k * p + l]);
        }
    }
}

TEST_CASE("rank classes") {
    const std::vector<JetVector> indep{{1, 0, 0}, {0, 1, 0}};
    const std::vector<JetVector> rank1{{1, 2, 3}, {2, 4, 6}};
    const std::vector<JetVector> dep{{1, 2, 0}, {2, 4, 1}};
    const std::vector<JetVector> zero{{0, 0, 0}, {0, 0, 0}};
    const std::vector<JetVector> full{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK(rank_class(indep, 7) == RankClass::Rank2FirstTwoIndep);
    CHECK(rank_class(rank1, 7) == RankClass::Rank1);
    CHECK(rank_class(dep, 7) == RankClass::Rank2FirstTwoDep);
    CHECK(rank_class(zero, 7) == RankClass::Rank0);
    CHECK(rank_class(full, 7) == RankClass::Rank3);
    CHECK(rank_mod_p({1, 2, 3, 2, 4, 6}, 3, 7) == 1);
    CHECK(rank_mod_p({1, 2, 3, 2, 4, 6}, 3, 5) == 1);
    CHECK(rank_mod_p({1, 2, 3, 2, 4, 7}, 3, 5) == 2);
}

TEST_CASE("tuple counts: k = 1") {
    const CurveData cd = enumerate_curve(parse_polynomial(testsupport::kTablePoly), PrimeModulus(13));
    const auto c = count_rank_tuples(cd, 1, TupleAlgorithm::Aggregated);
    CHECK(c.m_k2 == 0);
    CHECK(c.m_k1 == cd.m());
}

TEST_CASE("tuple counts: aggregated equals naive") {
    for (const auto& s : testsupport::kSuite) {
        const Polynomial f = parse_polynomial(s);
        for (std::uint64_t p : {5ULL, 7ULL, 11ULL, 13ULL, 31ULL}) {
            const CurveData cd = enumerate_curve(f, PrimeModulus(p));
            for (int k : {1, 2, 3}) {
                CAPTURE(s);
                CAPTURE(p);
                CAPTURE(k);
                CHECK(count_rank_tuples(cd, k, TupleAlgorithm::Aggregated) ==
                      count_rank_tuples(cd, k, TupleAlgorithm::Naive, kDefaultTupleBudget, 4));
            }
        }
    }
    // Synthetic jets with repeated gradients, zero jets and degenerate nonzero jets.
    CurveData cd(PrimeModulus(7), parse_polynomial("1"));
    const std::vector<JetVector> jets{{1, 2, 3}, {2, 4, 6}, {2, 4, 1}, {0, 0, 0}, {0, 0, 0}, {0, 0, 5},
                                      {3, 1, 0}, {6, 2, 0}, {1, 0, 4}, {0, 1, 4}, {5, 5, 5}, {1, 1, 1}};
    for (std::size_t i = 0; i < jets.size(); ++i) {
        cd.points.push_back({i, 0});
        cd.jets.push_back(jets[i]);
    }
    for (int k : {1, 2, 3, 4}) {
        CAPTURE(k);
        if (k == 4) {
            CHECK_THROWS(count_rank_tuples(cd, k, TupleAlgorithm::Aggregated));
            continue;
        }
        CHECK(count_rank_tuples(cd, k, TupleAlgorithm::Aggregated) ==
              count_rank_tuples(cd, k, TupleAlgorithm::Naive));
    }
}

TEST_CASE("tuple counts: naive respects its budget") {
    const CurveData cd = enumerate_curve(parse_polynomial(testsupport::kTablePoly), PrimeModulus(211));
    CHECK_THROWS_AS(count_rank_tuples(cd, 3, TupleAlgorithm::Naive, 1000), BudgetExceeded);
}

TEST_CASE("tuple counts at larger primes, naive cross-checked") {
    // Frozen after cross-checking against the naive O(m^2) and O(m^3) scans.
    const Polynomial f = parse_polynomial(testsupport::kTablePoly);
    const CurveData c503 = enumerate_curve(f, PrimeModulus(503), 0);
    const auto agg2 = count_rank_tuples(c503, 2, TupleAlgorithm::Aggregated);
    CHECK(agg2 == count_rank_tuples(c503, 2, TupleAlgorithm::Naive, kDefaultTupleBudget, 0));
    CHECK(agg2.m == 530);
    CHECK(agg2.m_k1 == 2);
    CHECK(agg2.m_k2 == 279752);

    const CurveData c211 = enumerate_curve(f, PrimeModulus(211), 0);
    const auto agg3 = count_rank_tuples(c211, 3, TupleAlgorithm::Aggregated);
    CHECK(agg3 == count_rank_tuples(c211, 3, TupleAlgorithm::Naive, kDefaultTupleBudget, 0));
    CHECK(agg3.m == 233);
    CHECK(agg3.m_k1 == 0);
    CHECK(agg3.m_k2 == 59340);
}

TEST_CASE("Bezout ceiling for rank-1 pairs") {
    CHECK(rank1_pair_ceiling(parse_polynomial(testsupport::kTablePoly)) == 180);
    const Polynomial f = parse_polynomial(testsupport::kTablePoly);
    for (std::uint64_t p : {101ULL, 211ULL, 503ULL, 1009ULL, 2003ULL}) {
        const auto c = count_rank_tuples(enumerate_curve(f, PrimeModulus(p), 0), 2, TupleAlgorithm::Aggregated);
        CHECK(c.m_k1 <= rank1_pair_ceiling(f));
    }
}

TEST_CASE("tuple expectation identity against direct translate evaluation") {
    for (const auto& s : testsupport::kSuite) {
        const Polynomial f = parse_polynomial(s);
        for (std::uint64_t p : {5ULL, 7ULL}) {
            const auto ref = testsupport::reference_curve(f, p);
            const auto high = reference_high(f, p, ref);
            const CurveData cd = enumerate_curve(f, PrimeModulus(p));
            for (int k : {2, 3}) {
                CAPTURE(s);
                CAPTURE(p);
                CAPTURE(k);
                const Prop5Check chk = prop5_identity_check(cd, k);
                CHECK(chk.lhs == reference_tuple_expectation(high, p, k));
                CHECK(chk.holds());
            }
            // k = 1: E[Y] = 1/p for every point with a nonzero jet.
            const Prop5Check one = prop5_identity_check(cd, 1);
            CHECK(one.lhs == reference_tuple_expectation(high, p, 1));
        }
    }
    const CurveData smooth = enumerate_curve(parse_polynomial(testsupport::kTablePoly), PrimeModulus(7));
    const Prop5Check one = prop5_identity_check(smooth, 1);
    CHECK(one.lhs == mpq_class(smooth.m(), 7));
    CHECK(one.holds());
}

TEST_CASE("identity check refuses large primes") {
    const CurveData cd = enumerate_curve(parse_polynomial(testsupport::kTablePoly), PrimeModulus(37));
    CHECK_THROWS_AS(prop5_identity_check(cd, 2), OracleBoundExceeded);
    CHECK(prop5_prime_bound(3) == 13);
}

#include "padicsq/equidistribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace padicsq {

bool Box::contains(const JetVector& v) const {
    const std::array<std::uint64_t, 3> c{v.a, v.b, v.alpha};
    for (int i = 0; i < 3; ++i) {
        if (c[i] < lo[i] || c[i] >= hi[i]) return false;
    }
    return true;
}

BoxFamily BoxFamily::thirds(std::uint64_t p) {
    BoxFamily fam("thirds", p, p / 3);
    // v lies in cell c iff c*p <= 3v < (c+1)*p, i.e. ceil(c*p/3) <= v < ceil((c+1)*p/3).
    auto edge = [p](std::uint64_t c) { return (c * p + 2) / 3; };
    const double third = static_cast<double>(p) / 3.0;
    const double volume = third * third * third;
    for (std::uint64_t i = 0; i < 3; ++i)
        for (std::uint64_t j = 0; j < 3; ++j)
            for (std::uint64_t k = 0; k < 3; ++k)
                fam.boxes_.push_back({{edge(i), edge(j), edge(k)}, {edge(i + 1), edge(j + 1), edge(k + 1)}, volume});
    return fam;
}

BoxFamily BoxFamily::grid(std::uint64_t p, std::uint64_t side) {
    if (side == 0) side = p / 3;
    if (side == 0 || side > p) throw std::invalid_argument("grid box side must be in [1, p]");
    BoxFamily fam(side == p / 3 ? "grid" : "grid:" + std::to_string(side), p, side);
    const double volume = std::pow(static_cast<double>(side), 3);
    std::vector<std::uint64_t> anchors;
    for (std::uint64_t a : {std::uint64_t{0}, side, 2 * side}) {
        if (a + side <= p) anchors.push_back(a);
    }
    for (auto i : anchors)
        for (auto j : anchors)
            for (auto k : anchors) fam.boxes_.push_back({{i, j, k}, {i + side, j + side, k + side}, volume});
    return fam;
}

BoxFamily BoxFamily::from_name(const std::string& name, std::uint64_t p) {
    if (name == "thirds") return thirds(p);
    if (name == "grid") return grid(p);
    if (name.rfind("grid:", 0) == 0) {
        const std::string tail = name.substr(5);
        if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad box family '" + name + "'");
        return grid(p, std::stoull(tail));
    }
    throw std::invalid_argument("unknown box family '" + name + "' (expected thirds, grid or grid:<side>)");
}

BoxFamily& BoxFamily::with_whole_space() {
    const double pd = static_cast<double>(p_);
    boxes_.push_back({{0, 0, 0}, {p_, p_, p_}, pd * pd * pd});
    return *this;
}

DiscrepancyReport discrepancy_lower_bounds(std::span<const JetVector> jets, std::uint64_t p,
                                           const BoxFamily& family, JetSemantics semantics) {
    std::vector<JetVector> pts(jets.begin(), jets.end());
    if (semantics == JetSemantics::Set) {
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    }
    if (pts.empty()) throw EmptyCurve("discrepancy needs at least one curve point");

    DiscrepancyReport rep;
    rep.family = family.name();
    rep.p = p;
    rep.side = family.side();
    rep.m = pts.size();
    const double m = static_cast<double>(rep.m);
    const double cube = std::pow(static_cast<double>(p), 3);

    for (std::size_t b = 0; b < family.boxes().size(); ++b) {
        const Box& box = family.boxes()[b];
        BoxDiscrepancy r;
        r.count = static_cast<std::uint64_t>(
            std::count_if(pts.begin(), pts.end(), [&](const JetVector& v) { return box.contains(v); }));
        const double c = static_cast<double>(r.count);
        r.delta = std::abs(c / m - box.volume / cube);
        r.d = std::abs(c / box.volume * cube / m - 1.0);
        if (r.delta > rep.delta_lower) {
            rep.delta_lower = r.delta;
            rep.delta_witness = b;
        }
        if (r.d > rep.d_lower) {
            rep.d_lower = r.d;
            rep.d_witness = b;
        }
        rep.per_box.push_back(r);
    }
    return rep;
}

DiscrepancyReport discrepancy_lower_bounds(const CurveData& cd, const BoxFamily& family, JetSemantics semantics) {
    return discrepancy_lower_bounds(cd.jets, cd.p(), family, semantics);
}

double etk_functional(std::span<const JetVector> jets, std::uint64_t p, int L) {
    if (L < 1 || L > 32) throw std::invalid_argument("ETK truncation L must be in [1, 32]");
    if (jets.empty()) throw EmptyCurve("ETK functional needs at least one curve point");

    std::vector<std::complex<double>> unit(p);
    for (std::uint64_t r = 0; r < p; ++r)
        unit[r] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(p));

    auto residue = [p](int a) { return a >= 0 ? static_cast<std::uint64_t>(a) % p : neg_mod(static_cast<std::uint64_t>(-a) % p, p); };

    double sum = 0;
    std::vector<std::complex<double>> terms(jets.size());
    for (int a1 = -L; a1 <= L; ++a1) {
        for (int a2 = -L; a2 <= L; ++a2) {
            for (int a3 = -L; a3 <= L; ++a3) {
                if (a1 == 0 && a2 == 0 && a3 == 0) continue;
                const std::uint64_t c1 = residue(a1), c2 = residue(a2), c3 = residue(a3);
                for (std::size_t i = 0; i < jets.size(); ++i) {
                    const auto& v = jets[i];
                    const std::uint64_t r =
                        add_mod(add_mod(mul_mod(c1, v.a, p), mul_mod(c2, v.b, p), p), mul_mod(c3, v.alpha, p), p);
                    terms[i] = unit[r];
                }
                const double weight = 1.0 / (std::max(std::abs(a1), 1) * std::max(std::abs(a2), 1) *
                                             static_cast<double>(std::max(std::abs(a3), 1)));
                sum += weight * std::abs(pairwise_sum(terms));
            }
        }
    }
    return 1.0 / L + sum / static_cast<double>(jets.size());
}

double etk_functional(const CurveData& cd, int L) { return etk_functional(cd.jets, cd.p(), L); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> terms) {
    if (terms.empty()) return {0.0, 0.0};
    if (terms.size() <= 8) {
        std::complex<double> s{0.0, 0.0};
        for (const auto& t : terms) s += t;
        return s;
    }
    const std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

ExpSumEvaluator::ExpSumEvaluator(const CurveData& cd) : cd_(&cd), f_mod_p2_(cd.f, cd.pm.p_squared()) {}

std::complex<double> ExpSumEvaluator::operator()(std::uint64_t k, std::uint64_t l) const {
    const std::uint64_t p = cd_->p();
    const double q = static_cast<double>(cd_->pm.p_squared());
    std::vector<std::complex<double>> terms;
    terms.reserve(cd_->m());
    for (const auto& pt : cd_->points) {
        const std::uint64_t v =
            f_mod_p2_(static_cast<std::int64_t>(pt.x + k * p), static_cast<std::int64_t>(pt.y + l * p));
        terms.push_back(std::polar(1.0, 2.0 * std::numbers::pi * (static_cast<double>(v) / q)));
    }
    return pairwise_sum(terms);
}

double exp_sum(const CurveData& cd, std::uint64_t k, std::uint64_t l) {
    if (k >= cd.p() || l >= cd.p()) throw std::invalid_argument("exp_sum requires 0 <= k, l < p");
    return std::abs(ExpSumEvaluator(cd)(k, l));
}

ExpSumReport exp_sum_scan(const CurveData& cd, std::uint64_t sample_count, std::uint64_t seed, unsigned threads) {
    if (sample_count == 0) throw std::invalid_argument("exp_sum_scan needs at least one sample");
    const std::uint64_t p = cd.p();
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    if (sample_count >= cd.pm.p_squared()) {
        for (std::uint64_t k = 0; k < p; ++k)
            for (std::uint64_t l = 0; l < p; ++l) pairs.emplace_back(k, l);
    } else {
        std::mt19937_64 rng(seed);
        pairs.reserve(sample_count);
        for (std::uint64_t s = 0; s < sample_count; ++s) {
            const std::uint64_t k = rng() % p;
            const std::uint64_t l = rng() % p;
            pairs.emplace_back(k, l);
        }
    }

    const ExpSumEvaluator eval(cd);
    std::vector<double> moduli(pairs.size());
    const unsigned workers =
        static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(resolve_threads(threads), pairs.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < pairs.size(); i += workers)
                    moduli[i] = std::abs(eval(pairs[i].first, pairs[i].second));
            });
        }
    }

    ExpSumReport rep;
    rep.p = p;
    rep.samples = pairs.size();
    rep.max_modulus = -1;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (moduli[i] > rep.max_modulus) {
            rep.max_modulus = moduli[i];
            rep.argmax_k = pairs[i].first;
            rep.argmax_l = pairs[i].second;
        }
    }
    rep.normalized = rep.max_modulus / std::sqrt(static_cast<double>(p));
    return rep;
}

}  // namespace padicsq

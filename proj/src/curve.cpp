#include "padicsq/curve.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

namespace padicsq {

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace {

struct JetEvaluators {
    JetEvaluators(const Polynomial& f, const PrimeModulus& pm)
        : f_mod_p2(f, pm.p_squared()),
          fx_mod_p(partial_derivative(f, Variable::X), pm.p()),
          fy_mod_p(partial_derivative(f, Variable::Y), pm.p()),
          p(pm.p()) {}

    JetVector operator()(std::uint64_t x, std::uint64_t y) const {
        const auto xi = static_cast<std::int64_t>(x), yi = static_cast<std::int64_t>(y);
        std::uint64_t v = f_mod_p2(xi, yi);
        return JetVector{fx_mod_p(xi, yi), fy_mod_p(xi, yi), (v / p) % p};
    }

    ModEvaluator f_mod_p2;
    ModEvaluator fx_mod_p;
    ModEvaluator fy_mod_p;
    std::uint64_t p;
};

}  // namespace

JetVector jet_at(const Polynomial& f, const PrimeModulus& pm, std::uint64_t x, std::uint64_t y) {
    return JetEvaluators(f, pm)(x, y);
}

CurveData enumerate_curve(const Polynomial& f, const PrimeModulus& pm, unsigned threads) {
    CurveData cd(pm, f);
    const std::uint64_t p = pm.p();
    const ModEvaluator f_mod_p(f, p);
    const JetEvaluators jets(f, pm);

    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), p));
    std::vector<std::vector<CurvePoint>> chunks(workers);
    auto scan = [&](unsigned w) {
        // Contiguous row bands keep each chunk sorted.
        const std::uint64_t lo = p * w / workers, hi = p * (w + 1) / workers;
        for (std::uint64_t x = lo; x < hi; ++x) {
            const auto row = f_mod_p.specialize_x(static_cast<std::int64_t>(x));
            for (std::uint64_t y = 0; y < p; ++y) {
                if (f_mod_p.eval_row(row, static_cast<std::int64_t>(y)) == 0) chunks[w].push_back({x, y});
            }
        }
    };
    if (workers == 1) {
        scan(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan, w);
    }

    for (auto& chunk : chunks) cd.points.insert(cd.points.end(), chunk.begin(), chunk.end());
    cd.jets.reserve(cd.points.size());
    for (const auto& pt : cd.points) cd.jets.push_back(jets(pt.x, pt.y));
    return cd;
}

std::vector<std::size_t> smooth_points(const CurveData& cd) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < cd.jets.size(); ++i) {
        if (!cd.jets[i].degenerate()) idx.push_back(i);
    }
    return idx;
}

bool constant_term_vanishes(const Polynomial& f, const PrimeModulus& pm) {
    mpz_class c = f.coefficient(0, 0);
    return mpz_divisible_ui_p(c.get_mpz_t(), pm.p()) != 0;
}

void write_curve_csv(std::ostream& out, const CurveData& cd) {
    out << "x,y,fx,fy,alpha\n";
    for (std::size_t i = 0; i < cd.m(); ++i) {
        const auto& pt = cd.points[i];
        const auto& j = cd.jets[i];
        out << pt.x << ',' << pt.y << ',' << j.a << ',' << j.b << ',' << j.alpha << '\n';
    }
}

}  // namespace padicsq

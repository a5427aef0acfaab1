#include "padicsq/reporting.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "padicsq/curve.hpp"
#include "padicsq/equidistribution.hpp"
#include "padicsq/square_distribution.hpp"

namespace padicsq {

namespace {

constexpr std::pair<Command, const char*> kCommandNames[] = {
    {Command::Curve, "curve"},   {Command::Blocks, "blocks"},           {Command::Ranks, "ranks"},
    {Command::Discrepancy, "discrepancy"}, {Command::Expsum, "expsum"}, {Command::Verify, "verify"},
    {Command::Scatter, "scatter"},
};

/// A user-facing configuration problem; the message names the flag.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace

std::string to_string(Command c) {
    for (const auto& [cmd, name] : kCommandNames) {
        if (cmd == c) return name;
    }
    return "?";
}

std::optional<Command> parse_command(const std::string& name) {
    for (const auto& [cmd, n] : kCommandNames) {
        if (name == n) return cmd;
    }
    return std::nullopt;
}

nlohmann::json to_json(const RunConfig& cfg) {
    return {
        {"command", to_string(cfg.command)},
        {"poly", cfg.poly_text},
        {"prime", cfg.prime},
        {"k", cfg.k},
        {"algorithm", cfg.algorithm},
        {"range", cfg.range},
        {"samples", cfg.sample_count},
        {"seed", cfg.seed},
        {"format", cfg.format == OutputFormat::Csv ? "csv" : "json"},
        {"out", cfg.out_path},
        {"oracle_bound", cfg.oracle_bound},
        {"threads", cfg.threads},
        {"family", cfg.family},
        {"set_semantics", cfg.set_semantics},
        {"etk_L", cfg.etk_L},
        {"max_moment", cfg.max_moment},
        {"band_rows", cfg.band_rows},
    };
}

bool VerifyReport::pass() const {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

std::string format_significant(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

void write_csv(std::ostream& out, const Table& table) {
    auto line = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
        out << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
}

Table read_csv(std::istream& in) {
    Table t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (first) {
            t.header = std::move(fields);
            first = false;
        } else if (!line.empty()) {
            t.rows.push_back(std::move(fields));
        }
    }
    return t;
}

std::vector<CurvePoint> scatter_points(const Polynomial& f, const PrimeModulus& pm, std::uint64_t range) {
    if (range > kMaxScatterRange)
        throw RangeTooLarge("--range: " + std::to_string(range) + " exceeds the limit " +
                            std::to_string(kMaxScatterRange));
    const std::uint64_t p = pm.p();
    const ModEvaluator ev(f, pm.p_squared());
    std::vector<CurvePoint> pts;
    for (std::uint64_t x = 0; x < range; ++x) {
        const auto row = ev.specialize_x(static_cast<std::int64_t>(x));
        for (std::uint64_t y = 0; y < range; ++y) {
            const std::uint64_t r = ev.eval_row(row, static_cast<std::int64_t>(y));
            if (r != 0 && r % p == 0) pts.push_back({x, y});
        }
    }
    return pts;
}

VerifyReport verify(const Polynomial& f, const PrimeModulus& pm, std::uint64_t oracle_bound, unsigned threads) {
    if (pm.p() > oracle_bound) throw OracleBoundExceeded("verify", pm.p(), oracle_bound);
    const std::uint64_t p = pm.p();
    const CurveData cd = enumerate_curve(f, pm, threads);
    VerifyReport rep;

    {
        VerifyCheck c;
        c.name = "block_count_closed_form";
        for (std::size_t i = 0; i < cd.m(); ++i) {
            ++c.compared;
            if (block_count_closed_form(cd.jets[i], pm) != block_count_oracle(f, pm, cd.points[i], oracle_bound))
                ++c.mismatches;
        }
        rep.checks.push_back(c);
    }
    {
        VerifyCheck c;
        c.name = "total_val1_in_p2_square";
        const std::uint64_t closed = total_val1_in_p2_square(cd), oracle = total_val1_oracle(f, pm, oracle_bound);
        c.compared = 1;
        c.mismatches = closed != oracle;
        c.detail = std::to_string(closed) + " vs " + std::to_string(oracle);
        rep.checks.push_back(c);
    }

    std::vector<TranslateProfile> profiles;
    profiles.reserve(cd.m());
    for (const auto& pt : cd.points) profiles.emplace_back(f, pm, pt);
    {
        VerifyCheck c;
        c.name = "pair_joint_closed_form";
        const auto smooth = smooth_points(cd);
        for (auto i : smooth) {
            for (auto j : smooth) {
                if (i == j) continue;
                ++c.compared;
                if (pair_joint_closed_form(cd.jets[i], cd.jets[j], pm) !=
                    pair_joint_from_profiles(profiles[i], profiles[j]))
                    ++c.mismatches;
            }
        }
        rep.checks.push_back(c);
    }
    for (int k : {2, 3}) {
        VerifyCheck c;
        c.name = "prop5_identity_k" + std::to_string(k);
        if (p > prop5_prime_bound(k)) {
            c.skipped = true;
            c.detail = "p above " + std::to_string(prop5_prime_bound(k));
        } else {
            const Prop5Check chk = prop5_identity_check(cd, k);
            c.compared = 1;
            c.mismatches = !chk.holds();
            c.detail = chk.lhs.get_str() + " vs " + chk.rhs.get_str();
        }
        rep.checks.push_back(c);
    }
    {
        VerifyCheck c;
        c.name = "rank_tuples_naive_vs_aggregated";
        for (int k : {1, 2, 3}) {
            try {
                const auto naive = count_rank_tuples(cd, k, TupleAlgorithm::Naive, kDefaultTupleBudget, threads);
                ++c.compared;
                if (naive != count_rank_tuples(cd, k, TupleAlgorithm::Aggregated, kDefaultTupleBudget, threads))
                    ++c.mismatches;
            } catch (const BudgetExceeded&) {
                c.detail += "k=" + std::to_string(k) + " over budget; ";
            }
        }
        rep.checks.push_back(c);
    }
    const BlockHistogram sweep = block_histogram_sweep(cd, SweepOptions{threads, 0});
    {
        VerifyCheck c;
        c.name = "sweep_vs_naive";
        c.compared = sweep.total_blocks();
        c.mismatches = !(sweep == block_histogram_naive(f, pm, oracle_bound));
        rep.checks.push_back(c);
    }
    {
        VerifyCheck c;
        c.name = "histogram_conservation";
        std::uint64_t high = 0;
        for (const auto& j : cd.jets) high += block_count_closed_form(j, pm).valgt1;
        c.compared = 2;
        c.mismatches = (sweep.total_blocks() != pm.p_squared()) + (sweep.total_mass() != high);
        rep.checks.push_back(c);
    }
    for (auto& c : rep.checks) c.pass = c.mismatches == 0;
    return rep;
}

namespace {

struct Outcome {
    Table table;
    nlohmann::json summary = nlohmann::json::object();
    std::string line;  // one-line human summary
    int code = exit_code::kOk;
};

std::string u64(std::uint64_t v) { return std::to_string(v); }

Outcome run_curve(const RunConfig& cfg, const Polynomial& f, const PrimeModulus& pm) {
    const CurveData cd = enumerate_curve(f, pm, cfg.threads);
    Outcome o;
    o.table.header = {"x", "y", "fx", "fy", "alpha"};
    for (std::size_t i = 0; i < cd.m(); ++i) {
        const auto& pt = cd.points[i];
        const auto& j = cd.jets[i];
        o.table.rows.push_back({u64(pt.x), u64(pt.y), u64(j.a), u64(j.b), u64(j.alpha)});
    }
    const auto smooth = smooth_points(cd).size();
    o.summary = {{"p", pm.p()}, {"m", cd.m()}, {"smooth", smooth}, {"degenerate", cd.m() - smooth}};
    o.line = "curve: p=" + u64(pm.p()) + " m=" + u64(cd.m()) + " degenerate=" + u64(cd.m() - smooth);
    return o;
}

Outcome run_blocks(const RunConfig& cfg, const Polynomial& f, const PrimeModulus& pm, std::ostream& err) {
    if (cfg.max_moment < 1 || cfg.max_moment > kMaxMoment)
        throw ValidationError("--max-moment: must be in [1, " + std::to_string(kMaxMoment) + "]");
    if (pm.p() > kLargeGridWarning && cfg.band_rows == 0)
        err << "warning: p > " << kLargeGridWarning << " holds a " << 4 * pm.p_squared() / (1 << 20)
            << " MiB counter grid; pass --band-rows to stream it\n";
    const CurveData cd = enumerate_curve(f, pm, cfg.threads);
    const BlockHistogram h = block_histogram_sweep(cd, SweepOptions{cfg.threads, cfg.band_rows});
    const PoissonComparison cmp = poisson_compare(h, cfg.max_moment);

    Outcome o;
    o.table.header = {"x_value", "block_count", "poisson_expected"};
    const std::uint64_t largest = h.counts.rbegin()->first;
    const double blocks = static_cast<double>(h.total_blocks());
    for (std::uint64_t j = 0; j <= largest; ++j) {
        auto it = h.counts.find(j);
        o.table.rows.push_back({u64(j), u64(it == h.counts.end() ? 0 : it->second),
                                format_significant(blocks * poisson_pmf(j), 12)});
    }
    nlohmann::json bell_targets = nlohmann::json::array();
    for (const auto& b : cmp.bell_targets) bell_targets.push_back(b.get_ui());
    nlohmann::json exact = nlohmann::json::array();
    for (const auto& q : cmp.exact_moments) exact.push_back(q.get_str());
    o.summary = {{"p", pm.p()},
                 {"m", cd.m()},
                 {"tv_distance", cmp.tv_distance},
                 {"chi_square", cmp.chi_square},
                 {"chi_square_dof", cmp.chi_square_dof},
                 {"moments", cmp.empirical_moments},
                 {"moments_exact", exact},
                 {"bell", bell_targets}};
    o.line = "blocks: p=" + u64(pm.p()) + " m=" + u64(cd.m()) + " tv=" + format_significant(cmp.tv_distance, 6) +
             " chi2=" + format_significant(cmp.chi_square, 6);
    return o;
}

Outcome run_ranks(const RunConfig& cfg, const Polynomial& f, const PrimeModulus& pm) {
    TupleAlgorithm algo;
    if (cfg.algorithm == "aggregated") {
        algo = TupleAlgorithm::Aggregated;
        if (cfg.k < 1 || cfg.k > 3) throw ValidationError("--k: must be 1, 2 or 3 for the aggregated algorithm");
    } else if (cfg.algorithm == "naive") {
        algo = TupleAlgorithm::Naive;
        if (cfg.k < 1) throw ValidationError("--k: must be at least 1");
    } else {
        throw ValidationError("--algorithm: expected aggregated or naive, got '" + cfg.algorithm + "'");
    }
    const CurveData cd = enumerate_curve(f, pm, cfg.threads);
    const RankTupleCounts rc = count_rank_tuples(cd, cfg.k, algo, kDefaultTupleBudget, cfg.threads);
    const double p2 = static_cast<double>(pm.p_squared());

    Outcome o;
    o.table.header = {"p", "k", "m", "m_k1", "m_k2", "m_k2_over_p2"};
    o.table.rows.push_back({u64(pm.p()), std::to_string(cfg.k), u64(cd.m()), u64(rc.m_k1), u64(rc.m_k2),
                            format_significant(static_cast<double>(rc.m_k2) / p2, 12)});
    std::uint64_t zero_jets = 0;
    for (const auto& j : cd.jets) zero_jets += j.is_zero();
    o.summary = {{"p", pm.p()},         {"k", cfg.k},          {"m", cd.m()},
                 {"m_k1", rc.m_k1},     {"m_k2", rc.m_k2},     {"rank0", rc.rank0},
                 {"rank1_zero_gradient", rc.rank1_zero_gradient}, {"zero_jets", zero_jets}};
    o.line = "ranks: p=" + u64(pm.p()) + " k=" + std::to_string(cfg.k) + " m_k1=" + u64(rc.m_k1) +
             " m_k2=" + u64(rc.m_k2);
    return o;
}

nlohmann::json box_json(const Box& b) { return {{"lo", b.lo}, {"hi", b.hi}, {"volume", b.volume}}; }

Outcome run_discrepancy(const RunConfig& cfg, const Polynomial& f, const PrimeModulus& pm) {
    BoxFamily family = [&] {
        try {
            return BoxFamily::from_name(cfg.family, pm.p());
        } catch (const std::invalid_argument& e) {
            throw ValidationError(std::string("--family: ") + e.what());
        }
    }();
    const std::size_t self_test = family.boxes().size();
    family.with_whole_space();
    if (cfg.etk_L < 0 || cfg.etk_L > 32) throw ValidationError("--etk: L must be in [1, 32]");

    const CurveData cd = enumerate_curve(f, pm, cfg.threads);
    if (cd.m() == 0) throw ValidationError("--poly: curve is empty mod " + u64(pm.p()) + "; discrepancy undefined");
    const auto rep =
        discrepancy_lower_bounds(cd, family, cfg.set_semantics ? JetSemantics::Set : JetSemantics::Multiset);

    Outcome o;
    o.table.header = {"p", "side", "delta_lower", "d_lower", "inv_sqrt_p"};
    o.table.rows.push_back({u64(pm.p()), u64(rep.side), format_fixed(rep.delta_lower, 11),
                            format_fixed(rep.d_lower, 11),
                            format_fixed(1.0 / std::sqrt(static_cast<double>(pm.p())), 11)});
    o.summary = {{"p", pm.p()},
                 {"m", rep.m},
                 {"family", rep.family},
                 {"boxes", self_test},
                 {"semantics", cfg.set_semantics ? "set" : "multiset"},
                 {"delta_lower", rep.delta_lower},
                 {"d_lower", rep.d_lower},
                 {"delta_witness", box_json(family.boxes()[rep.delta_witness])},
                 {"d_witness", box_json(family.boxes()[rep.d_witness])},
                 {"whole_space_delta", rep.per_box[self_test].delta},
                 {"whole_space_d", rep.per_box[self_test].d}};
    if (cfg.etk_L > 0) {
        o.summary["etk_L"] = cfg.etk_L;
        o.summary["etk_functional_C1"] = etk_functional(cd, cfg.etk_L);
    }
    o.line = "discrepancy: p=" + u64(pm.p()) + " family=" + rep.family + " delta>=" +
             format_fixed(rep.delta_lower, 11) + " D>=" + format_fixed(rep.d_lower, 11);
    return o;
}

Outcome run_expsum(const RunConfig& cfg, const Polynomial& f, const PrimeModulus& pm) {
    if (cfg.sample_count == 0) throw ValidationError("--samples: must be at least 1");
    const CurveData cd = enumerate_curve(f, pm, cfg.threads);
    const ExpSumReport rep = exp_sum_scan(cd, cfg.sample_count, cfg.seed, cfg.threads);
    Outcome o;
    o.table.header = {"p", "samples", "max_modulus", "normalized", "argmax_k", "argmax_l"};
    o.table.rows.push_back({u64(rep.p), u64(rep.samples), format_significant(rep.max_modulus, 12),
                            format_significant(rep.normalized, 12), u64(rep.argmax_k), u64(rep.argmax_l)});
    o.summary = {{"p", rep.p}, {"m", cd.m()}, {"samples", rep.samples}, {"max_modulus", rep.max_modulus},
                 {"normalized", rep.normalized}, {"argmax", {rep.argmax_k, rep.argmax_l}}};
    o.line = "expsum: p=" + u64(rep.p) + " samples=" + u64(rep.samples) +
             " max|S|/sqrt(p)=" + format_significant(rep.normalized, 6);
    return o;
}

Outcome run_verify(const RunConfig& cfg, const Polynomial& f, const PrimeModulus& pm) {
    const VerifyReport rep = verify(f, pm, cfg.oracle_bound, cfg.threads);
    Outcome o;
    o.table.header = {"check", "status", "compared", "mismatches"};
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        const std::string status = c.skipped ? "skipped" : (c.pass ? "pass" : "FAIL");
        o.table.rows.push_back({c.name, status, u64(c.compared), u64(c.mismatches)});
        checks.push_back({{"name", c.name}, {"status", status}, {"compared", c.compared},
                          {"mismatches", c.mismatches}, {"detail", c.detail}});
    }
    o.summary = {{"p", pm.p()}, {"pass", rep.pass()}, {"checks", checks}};
    o.line = std::string("verify: p=") + u64(pm.p()) + (rep.pass() ? " all checks pass" : " FAILED");
    o.code = rep.pass() ? exit_code::kOk : exit_code::kVerifyFailed;
    return o;
}

Outcome run_scatter(const RunConfig& cfg, const Polynomial& f, const PrimeModulus& pm) {
    const auto pts = scatter_points(f, pm, cfg.range);
    Outcome o;
    o.table.header = {"x", "y"};
    for (const auto& pt : pts) o.table.rows.push_back({u64(pt.x), u64(pt.y)});
    o.summary = {{"p", pm.p()}, {"range", cfg.range}, {"points", pts.size()}};
    o.line = "scatter: p=" + u64(pm.p()) + " range=" + u64(cfg.range) + " points=" + u64(pts.size());
    return o;
}

nlohmann::json typed_field(const std::string& s) {
    if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) return std::stoull(s);
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size()) return d;
    return s;
}

void emit(const RunConfig& cfg, const Outcome& o, std::ostream& out) {
    nlohmann::json summary = o.summary;
    summary["config"] = to_json(cfg);
    auto write_payload = [&](std::ostream& os) {
        if (cfg.format == OutputFormat::Csv) {
            write_csv(os, o.table);
            return;
        }
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : o.table.rows) {
            nlohmann::json obj = nlohmann::json::object();
            for (std::size_t i = 0; i < o.table.header.size() && i < r.size(); ++i)
                obj[o.table.header[i]] = typed_field(r[i]);
            rows.push_back(std::move(obj));
        }
        nlohmann::json doc = {{"config", to_json(cfg)}, {"rows", rows}, {"summary", o.summary}};
        os << doc.dump(2) << '\n';
    };
    if (cfg.out_path.empty()) {
        write_payload(out);
        return;
    }
    std::ofstream file(cfg.out_path);
    if (!file) throw ValidationError("--out: cannot open '" + cfg.out_path + "' for writing");
    write_payload(file);
    if (cfg.format == OutputFormat::Csv) {
        std::ofstream side(cfg.out_path + ".summary.json");
        side << summary.dump(2) << '\n';
    }
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        Polynomial f;
        try {
            f = parse_polynomial(cfg.poly_text);
        } catch (const ParseError& e) {
            throw ValidationError(std::string("--poly: ") + e.what());
        }
        if (cfg.prime < 3 || !is_prime(cfg.prime))
            throw ValidationError("--prime: " + std::to_string(cfg.prime) + " is not an odd prime");
        std::optional<PrimeModulus> pm;
        try {
            pm.emplace(cfg.prime);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(std::string("--prime: ") + e.what());
        }
        if (cfg.oracle_bound < 3) throw ValidationError("--oracle-bound: must be at least 3");
        if (constant_term_vanishes(f, *pm))
            err << "warning: constant term of f vanishes mod " << cfg.prime
                << "; closed forms assume a non-zero constant term\n";

        Outcome o;
        switch (cfg.command) {
            case Command::Curve: o = run_curve(cfg, f, *pm); break;
            case Command::Blocks: o = run_blocks(cfg, f, *pm, err); break;
            case Command::Ranks: o = run_ranks(cfg, f, *pm); break;
            case Command::Discrepancy: o = run_discrepancy(cfg, f, *pm); break;
            case Command::Expsum: o = run_expsum(cfg, f, *pm); break;
            case Command::Verify: o = run_verify(cfg, f, *pm); break;
            case Command::Scatter: o = run_scatter(cfg, f, *pm); break;
        }
        emit(cfg, o, out);
        err << o.line << '\n';
        return o.code;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kValidation;
    } catch (const OracleBoundExceeded& e) {
        err << "error: " << e.what() << " (raise --oracle-bound)\n";
        return exit_code::kOracleBudget;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kOracleBudget;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kValidation;
    }
}

}  // namespace padicsq

#include <sstream>
#include <tuple>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "padicsq/block_counts.hpp"
#include "padicsq/equidistribution.hpp"
#include "padicsq/reporting.hpp"
#include "padicsq/square_distribution.hpp"

namespace py = pybind11;
using namespace padicsq;

namespace {

using Jet = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>;

JetVector to_jet(const Jet& j) { return {std::get<0>(j), std::get<1>(j), std::get<2>(j)}; }

py::object to_fraction(const mpq_class& q) {
    static py::object fraction = py::module_::import("fractions").attr("Fraction");
    return fraction(q.get_str());
}

py::int_ to_int(const mpz_class& z) {
    static py::object int_type = py::module_::import("builtins").attr("int");
    return int_type(z.get_str());
}

CurveData curve_of(const std::string& poly, std::uint64_t p, unsigned threads) {
    return enumerate_curve(parse_polynomial(poly), PrimeModulus(p), threads);
}

TupleAlgorithm algorithm_of(const std::string& name) {
    if (name == "aggregated") return TupleAlgorithm::Aggregated;
    if (name == "naive") return TupleAlgorithm::Naive;
    throw std::invalid_argument("algorithm must be 'aggregated' or 'naive'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Valuation statistics of bivariate integer polynomials on p x p blocks";

    py::register_exception<OracleBoundExceeded>(m, "OracleBoundExceeded", PyExc_RuntimeError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("parse_polynomial", [](const std::string& text) { return to_string(parse_polynomial(text)); },
          "Canonical form of a polynomial in x and y.", py::arg("text"));

    m.def(
        "valuation",
        [](const std::string& poly, std::int64_t x, std::int64_t y, std::uint64_t p, std::uint32_t cap) -> py::object {
            const Valuation v = valuation(parse_polynomial(poly), x, y, PrimeModulus(p), cap);
            if (v.is_infinite()) return py::float_(INFINITY);
            if (v.is_finite()) return py::int_(v.value());
            return py::make_tuple(">=", v.value());
        },
        "nu_p(f(x, y)): an int, (\">=\", cap) when saturated, or inf for an exact zero.", py::arg("poly"),
        py::arg("x"), py::arg("y"), py::arg("p"), py::arg("cap") = kDefaultValuationCap);

    py::class_<CurveData>(m, "Curve")
        .def_property_readonly("p", &CurveData::p)
        .def_property_readonly("m", &CurveData::m)
        .def_property_readonly("polynomial", [](const CurveData& c) { return to_string(c.f); })
        .def_property_readonly("points",
                               [](const CurveData& c) {
                                   std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
                                   for (const auto& pt : c.points) out.emplace_back(pt.x, pt.y);
                                   return out;
                               })
        .def_property_readonly("jets",
                               [](const CurveData& c) {
                                   std::vector<Jet> out;
                                   for (const auto& j : c.jets) out.emplace_back(j.a, j.b, j.alpha);
                                   return out;
                               })
        .def("__len__", &CurveData::m)
        .def("__repr__", [](const CurveData& c) {
            return "<Curve " + to_string(c.f) + " mod " + std::to_string(c.p()) + ", m=" + std::to_string(c.m()) +
                   ">";
        });

    m.def("enumerate_curve", &curve_of, "Points of f = 0 mod p with their jets.", py::arg("poly"), py::arg("p"),
          py::arg("threads") = 0);

    py::class_<BlockCounts>(m, "BlockCounts")
        .def_readonly("val1", &BlockCounts::val1)
        .def_readonly("valgt1", &BlockCounts::valgt1)
        .def("__eq__", [](const BlockCounts& a, const BlockCounts& b) { return a == b; })
        .def("__repr__", [](const BlockCounts& b) {
            return "BlockCounts(val1=" + std::to_string(b.val1) + ", valgt1=" + std::to_string(b.valgt1) + ")";
        });

    m.def(
        "block_count", [](const Jet& jet, std::uint64_t p) { return block_count_closed_form(to_jet(jet), PrimeModulus(p)); },
        "Closed-form translate counts for one jet (a, b, alpha).", py::arg("jet"), py::arg("p"));

    m.def("total_val1", &total_val1_in_p2_square, "Points of [0,p^2)^2 with nu_p(f) = 1, from the curve.",
          py::arg("curve"));

    py::class_<PairJointCounts>(m, "PairJointCounts")
        .def_readonly("n_11", &PairJointCounts::n_11)
        .def_readonly("n_g1", &PairJointCounts::n_g1)
        .def_readonly("n_1g", &PairJointCounts::n_1g)
        .def_readonly("n_gg", &PairJointCounts::n_gg)
        .def("__eq__", [](const PairJointCounts& a, const PairJointCounts& b) { return a == b; })
        .def("__repr__", [](const PairJointCounts& c) {
            std::ostringstream os;
            os << "PairJointCounts(n_11=" << c.n_11 << ", n_g1=" << c.n_g1 << ", n_1g=" << c.n_1g
               << ", n_gg=" << c.n_gg << ")";
            return os.str();
        });

    m.def(
        "pair_joint",
        [](const Jet& a, const Jet& b, std::uint64_t p) {
            return pair_joint_closed_form(to_jet(a), to_jet(b), PrimeModulus(p));
        },
        "Closed-form joint translate counts for two smooth jets.", py::arg("jet1"), py::arg("jet2"), py::arg("p"));

    py::class_<RankTupleCounts>(m, "RankTupleCounts")
        .def_readonly("k", &RankTupleCounts::k)
        .def_readonly("m", &RankTupleCounts::m)
        .def_readonly("m_k1", &RankTupleCounts::m_k1)
        .def_readonly("m_k2", &RankTupleCounts::m_k2)
        .def_readonly("rank0", &RankTupleCounts::rank0)
        .def_readonly("rank1_zero_gradient", &RankTupleCounts::rank1_zero_gradient)
        .def("__repr__", [](const RankTupleCounts& c) {
            std::ostringstream os;
            os << "RankTupleCounts(k=" << c.k << ", m=" << c.m << ", m_k1=" << c.m_k1 << ", m_k2=" << c.m_k2 << ")";
            return os.str();
        });

    m.def(
        "count_rank_tuples",
        [](const CurveData& cd, int k, const std::string& algorithm, unsigned threads) {
            py::gil_scoped_release release;
            return count_rank_tuples(cd, k, algorithm_of(algorithm), kDefaultTupleBudget, threads);
        },
        "Rank-classified counts of ordered distinct k-tuples of curve points.", py::arg("curve"), py::arg("k"),
        py::arg("algorithm") = "aggregated", py::arg("threads") = 0);

    m.def(
        "prop5_identity",
        [](const CurveData& cd, int k) {
            const Prop5Check c = prop5_identity_check(cd, k);
            return py::make_tuple(to_fraction(c.lhs), to_fraction(c.rhs));
        },
        "(lhs, rhs) of the tuple-expectation identity as Fractions.", py::arg("curve"), py::arg("k"));

    m.def(
        "block_histogram",
        [](const CurveData& cd, unsigned threads, std::uint64_t band_rows) {
            py::gil_scoped_release release;
            return block_histogram_sweep(cd, SweepOptions{threads, band_rows}).counts;
        },
        "{X value: number of blocks} over all p^2 blocks, by line sweep.", py::arg("curve"), py::arg("threads") = 0,
        py::arg("band_rows") = 0);

    m.def(
        "block_histogram_naive",
        [](const std::string& poly, std::uint64_t p, std::uint64_t oracle_bound) {
            return block_histogram_naive(parse_polynomial(poly), PrimeModulus(p), oracle_bound).counts;
        },
        "Block histogram by direct valuation of every cell.", py::arg("poly"), py::arg("p"),
        py::arg("oracle_bound") = kDefaultOracleBound);

    py::class_<PoissonComparison>(m, "PoissonComparison")
        .def_readonly("tv_distance", &PoissonComparison::tv_distance)
        .def_readonly("chi_square", &PoissonComparison::chi_square)
        .def_readonly("chi_square_dof", &PoissonComparison::chi_square_dof)
        .def_readonly("empirical_moments", &PoissonComparison::empirical_moments)
        .def_property_readonly("exact_moments",
                               [](const PoissonComparison& c) {
                                   py::list out;
                                   for (const auto& q : c.exact_moments) out.append(to_fraction(q));
                                   return out;
                               })
        .def_property_readonly("bell_targets", [](const PoissonComparison& c) {
            py::list out;
            for (const auto& b : c.bell_targets) out.append(to_int(b));
            return out;
        });

    m.def(
        "poisson_compare",
        [](const std::map<std::uint64_t, std::uint64_t>& counts, std::uint64_t p, int max_moment) {
            BlockHistogram h;
            h.p = p;
            h.counts = counts;
            return poisson_compare(h, max_moment);
        },
        "Compare a block histogram with Poisson(1).", py::arg("counts"), py::arg("p"), py::arg("max_moment") = 4);

    m.def("stirling2", [](int k, int i) { return to_int(stirling2(k, i)); }, py::arg("k"), py::arg("i"));
    m.def("bell", [](int k) { return to_int(bell(k)); }, py::arg("k"));

    py::class_<DiscrepancyReport>(m, "DiscrepancyReport")
        .def_readonly("family", &DiscrepancyReport::family)
        .def_readonly("p", &DiscrepancyReport::p)
        .def_readonly("side", &DiscrepancyReport::side)
        .def_readonly("m", &DiscrepancyReport::m)
        .def_readonly("delta_lower", &DiscrepancyReport::delta_lower)
        .def_readonly("d_lower", &DiscrepancyReport::d_lower)
        .def_readonly("delta_witness", &DiscrepancyReport::delta_witness)
        .def_readonly("d_witness", &DiscrepancyReport::d_witness)
        .def_property_readonly("counts", [](const DiscrepancyReport& r) {
            std::vector<std::uint64_t> out;
            for (const auto& b : r.per_box) out.push_back(b.count);
            return out;
        });

    m.def(
        "discrepancy",
        [](const CurveData& cd, const std::string& family, bool set_semantics, bool whole_space) {
            BoxFamily fam = BoxFamily::from_name(family, cd.p());
            if (whole_space) fam.with_whole_space();
            return discrepancy_lower_bounds(cd, fam, set_semantics ? JetSemantics::Set : JetSemantics::Multiset);
        },
        "Box-restricted discrepancy lower bounds of the jet set.", py::arg("curve"), py::arg("family") = "thirds",
        py::arg("set_semantics") = false, py::arg("whole_space") = false);

    m.def("etk_functional", py::overload_cast<const CurveData&, int>(&etk_functional),
          "Erdos-Turan-Koksma bracket with constant 1.", py::arg("curve"), py::arg("L"));

    m.def("exp_sum", &exp_sum, "|sum over the curve of e_{p^2}(f(x+kp, y+lp))|.", py::arg("curve"), py::arg("k"),
          py::arg("l"));

    py::class_<ExpSumReport>(m, "ExpSumReport")
        .def_readonly("p", &ExpSumReport::p)
        .def_readonly("samples", &ExpSumReport::samples)
        .def_readonly("max_modulus", &ExpSumReport::max_modulus)
        .def_readonly("argmax_k", &ExpSumReport::argmax_k)
        .def_readonly("argmax_l", &ExpSumReport::argmax_l)
        .def_readonly("normalized", &ExpSumReport::normalized);

    m.def(
        "exp_sum_scan",
        [](const CurveData& cd, std::uint64_t samples, std::uint64_t seed, unsigned threads) {
            py::gil_scoped_release release;
            return exp_sum_scan(cd, samples, seed, threads);
        },
        "Maximum exponential sum over sampled (k, l).", py::arg("curve"), py::arg("samples") = 2000,
        py::arg("seed") = 0, py::arg("threads") = 0);

    m.def(
        "verify",
        [](const std::string& poly, std::uint64_t p, std::uint64_t oracle_bound) {
            const VerifyReport rep = verify(parse_polynomial(poly), PrimeModulus(p), oracle_bound, 0);
            py::list out;
            for (const auto& c : rep.checks) {
                py::dict d;
                d["name"] = c.name;
                d["status"] = c.skipped ? "skipped" : (c.pass ? "pass" : "fail");
                d["compared"] = c.compared;
                d["mismatches"] = c.mismatches;
                d["detail"] = c.detail;
                out.append(d);
            }
            return out;
        },
        "Closed forms against exhaustive oracles.", py::arg("poly"), py::arg("p"),
        py::arg("oracle_bound") = kDefaultOracleBound);

    m.def(
        "run",
        [](const std::string& command, const std::string& poly, std::uint64_t prime, const py::kwargs& kw) {
            RunConfig cfg;
            const auto cmd = parse_command(command);
            if (!cmd) throw std::invalid_argument("unknown command '" + command + "'");
            cfg.command = *cmd;
            cfg.poly_text = poly;
            cfg.prime = prime;
            for (const auto& [key, value] : kw) {
                const std::string k = py::str(key);
                if (k == "k") cfg.k = value.cast<int>();
                else if (k == "algorithm") cfg.algorithm = value.cast<std::string>();
                else if (k == "range") cfg.range = value.cast<std::uint64_t>();
                else if (k == "samples") cfg.sample_count = value.cast<std::uint64_t>();
                else if (k == "seed") cfg.seed = value.cast<std::uint64_t>();
                else if (k == "format") cfg.format = value.cast<std::string>() == "json" ? OutputFormat::Json : OutputFormat::Csv;
                else if (k == "out") cfg.out_path = value.cast<std::string>();
                else if (k == "oracle_bound") cfg.oracle_bound = value.cast<std::uint64_t>();
                else if (k == "threads") cfg.threads = value.cast<unsigned>();
                else if (k == "family") cfg.family = value.cast<std::string>();
                else if (k == "set_semantics") cfg.set_semantics = value.cast<bool>();
                else if (k == "etk") cfg.etk_L = value.cast<int>();
                else if (k == "max_moment") cfg.max_moment = value.cast<int>();
                else if (k == "band_rows") cfg.band_rows = value.cast<std::uint64_t>();
                else throw std::invalid_argument("unknown option '" + k + "'");
            }
            std::ostringstream out, err;
            const int code = run(cfg, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        "Run a CLI command in-process; returns (exit_code, stdout, stderr).", py::arg("command"), py::arg("poly"),
        py::arg("prime"));
}

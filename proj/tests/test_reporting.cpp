#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "padicsq/reporting.hpp"
#include "support.hpp"

using namespace padicsq;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cmd(Command cmd, const std::string& poly, std::uint64_t p, void (*tweak)(RunConfig&) = nullptr) {
    RunConfig cfg;
    cfg.command = cmd;
    cfg.poly_text = poly;
    cfg.prime = p;
    if (tweak) tweak(cfg);
    std::ostringstream out, err;
    const int code = run(cfg, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("command names") {
    for (Command c : {Command::Curve, Command::Blocks, Command::Ranks, Command::Discrepancy, Command::Expsum,
                      Command::Verify, Command::Scatter})
        CHECK(parse_command(to_string(c)) == c);
    CHECK_FALSE(parse_command("plot").has_value());
}

TEST_CASE("validation errors exit with 2") {
    CHECK(run_cmd(Command::Blocks, "x+y+1", 4).code == exit_code::kValidation);
    CHECK(run_cmd(Command::Blocks, "x+y+1", 2).code == exit_code::kValidation);
    const Result bad_poly = run_cmd(Command::Curve, "x+z", 5);
    CHECK(bad_poly.code == exit_code::kValidation);
    CHECK(bad_poly.err.find("--poly") != std::string::npos);
    CHECK(run_cmd(Command::Ranks, "x+y+1", 5, [](RunConfig& c) { c.k = 4; }).code == exit_code::kValidation);
    CHECK(run_cmd(Command::Ranks, "x+y+1", 5, [](RunConfig& c) { c.algorithm = "fast"; }).code ==
          exit_code::kValidation);
    CHECK(run_cmd(Command::Discrepancy, "x+y+1", 5, [](RunConfig& c) { c.family = "sliding"; }).code ==
          exit_code::kValidation);
    const Result range = run_cmd(Command::Scatter, "x+y+1", 5, [](RunConfig& c) { c.range = 10001; });
    CHECK(range.code == exit_code::kValidation);
    CHECK(range.err.find("--range") != std::string::npos);
    CHECK(run_cmd(Command::Expsum, "x+y+1", 5, [](RunConfig& c) { c.sample_count = 0; }).code ==
          exit_code::kValidation);
    CHECK(run_cmd(Command::Discrepancy, "1", 5).code == exit_code::kValidation);
}

TEST_CASE("oracle and budget errors exit with 3") {
    const Result r = run_cmd(Command::Verify, testsupport::kTablePoly, 211);
    CHECK(r.code == exit_code::kOracleBudget);
    CHECK(r.err.find("oracle") != std::string::npos);
    CHECK(run_cmd(Command::Verify, testsupport::kTablePoly, 37, [](RunConfig& c) { c.oracle_bound = 31; }).code ==
          exit_code::kOracleBudget);
    CHECK(run_cmd(Command::Verify, testsupport::kTablePoly, 37, [](RunConfig& c) { c.oracle_bound = 37; }).code ==
          exit_code::kOk);
    CHECK(run_cmd(Command::Ranks, testsupport::kTablePoly, 1009, [](RunConfig& c) {
              c.k = 4;
              c.algorithm = "naive";
          }).code == exit_code::kOracleBudget);
}

TEST_CASE("verify passes across the suite") {
    for (const auto& s : testsupport::kSuite) {
        for (std::uint64_t p : {5ULL, 7ULL, 11ULL, 13ULL}) {
            CAPTURE(s);
            CAPTURE(p);
            const VerifyReport rep = verify(parse_polynomial(s), PrimeModulus(p), kDefaultOracleBound, 2);
            for (const auto& c : rep.checks) {
                CAPTURE(c.name);
                CHECK(c.mismatches == 0);
            }
            CHECK(rep.pass());
        }
    }
    CHECK(run_cmd(Command::Verify, testsupport::kTablePoly, 11).code == exit_code::kOk);
}

TEST_CASE("scatter") {
    const Result r = run_cmd(Command::Scatter, "x+y+1", 5, [](RunConfig& c) { c.range = 5; });
    CHECK(r.code == 0);
    CHECK(r.out == "x,y\n0,4\n1,3\n2,2\n3,1\n4,0\n");
    CHECK(run_cmd(Command::Scatter, "x+y+1", 5, [](RunConfig& c) { c.range = 0; }).out == "x,y\n");

    const Polynomial f = parse_polynomial("x^3+y^3+x^2*y+y+1");
    const PrimeModulus pm(17);
    const auto pts = scatter_points(f, pm, 289);
    std::size_t ref = 0;
    for (std::uint64_t x = 0; x < 289; ++x)
        for (std::uint64_t y = 0; y < 289; ++y)
            ref += testsupport::exact_valuation(testsupport::exact(f, x, y), 17, 2) == 1;
    CHECK(pts.size() == ref);
    CHECK(std::is_sorted(pts.begin(), pts.end()));
    CHECK_THROWS_AS(scatter_points(f, pm, kMaxScatterRange + 1), RangeTooLarge);
}

TEST_CASE("number formatting") {
    CHECK(format_fixed(0.0108800953871, 11) == "0.01088009539");
    CHECK(format_significant(1.10569979724123, 12) == "1.10569979724");
}

TEST_CASE("CSV payloads round-trip") {
    const Result disc = run_cmd(Command::Discrepancy, testsupport::kTablePoly, 1009);
    REQUIRE(disc.code == 0);
    std::istringstream in(disc.out);
    const Table t = read_csv(in);
    CHECK(t.header == std::vector<std::string>{"p", "side", "delta_lower", "d_lower", "inv_sqrt_p"});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0] == std::vector<std::string>{"1009", "336", "0.01088009539", "0.29376257545", "0.03148142750"});
    CHECK(disc.err.find("family=thirds") != std::string::npos);
    std::ostringstream again;
    write_csv(again, t);
    CHECK(again.str() == disc.out);

    for (Command c : {Command::Curve, Command::Blocks, Command::Ranks, Command::Expsum, Command::Verify}) {
        const Result r = run_cmd(c, testsupport::kTablePoly, 13);
        REQUIRE(r.code == 0);
        std::istringstream is(r.out);
        std::ostringstream os;
        write_csv(os, read_csv(is));
        CHECK(os.str() == r.out);
    }

    const Result blocks = run_cmd(Command::Blocks, testsupport::kTablePoly, 211);
    std::istringstream bs(blocks.out);
    const Table bt = read_csv(bs);
    CHECK(bt.header == std::vector<std::string>{"x_value", "block_count", "poisson_expected"});
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < bt.rows.size(); ++i) {
        CHECK(bt.rows[i][0] == std::to_string(i));
        total += std::stoull(bt.rows[i][1]);
    }
    CHECK(total == 211 * 211);

    const Result ranks = run_cmd(Command::Ranks, testsupport::kTablePoly, 503);
    CHECK(ranks.out == "p,k,m,m_k1,m_k2,m_k2_over_p2\n503,2,530,2,279752,1.10569979724\n");
}

TEST_CASE("JSON output embeds the configuration") {
    const Result r = run_cmd(Command::Expsum, testsupport::kTablePoly, 101, [](RunConfig& c) {
        c.format = OutputFormat::Json;
        c.seed = 9;
    });
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["config"]["seed"] == 9);
    CHECK(doc["config"]["command"] == "expsum");
    CHECK(doc["config"]["poly"] == testsupport::kTablePoly);
    REQUIRE(doc["rows"].size() == 1);
    CHECK(doc["rows"][0]["samples"] == 2000);
    CHECK(doc["rows"][0]["normalized"].get<double>() <= 10.0);
}

TEST_CASE("output files and summary sidecar") {
    const auto dir = std::filesystem::temp_directory_path() / "padicsq_test_reporting";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "curve.csv").string();
    const Result r =
        run_cmd(Command::Curve, "x+y+1", 7, [](RunConfig& c) { c.out_path = "/nonexistent-dir/curve.csv"; });
    CHECK(r.code == exit_code::kValidation);

    RunConfig cfg;
    cfg.command = Command::Curve;
    cfg.poly_text = "x+y+1";
    cfg.prime = 7;
    cfg.out_path = path;
    std::ostringstream out, err;
    REQUIRE(run(cfg, out, err) == 0);
    CHECK(out.str().empty());
    std::ifstream csv(path);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x,y,fx,fy,alpha");
    std::ifstream side(path + ".summary.json");
    REQUIRE(side.good());
    const auto doc = nlohmann::json::parse(side);
    CHECK(doc["config"]["prime"] == 7);
    CHECK(doc["m"] == 7);
    std::filesystem::remove_all(dir);
}

TEST_CASE("warning when the constant term vanishes") {
    const Result r = run_cmd(Command::Curve, "x+y+5", 5);
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
}

#ifdef PADICSQ_CLI_PATH
TEST_CASE("command-line exit codes") {
    auto status = [](const std::string& args) {
        const std::string cmd = std::string(PADICSQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("verify --poly \"x^3+y^2+x*y+1\" --prime 11") == 0);
    CHECK(status("blocks --poly \"x^3+y^2+x*y+1\" --prime 4") == 2);
    CHECK(status("blocks --poly \"x^3+y^2+x*y+1\"") == 2);
    CHECK(status("blocks --poly x --prime 5 --format xml") == 2);
    CHECK(status("frobnicate --poly x --prime 5") == 2);
    CHECK(status("verify --poly \"x^3+y^2+x*y+1\" --prime 211") == 3);
    CHECK(status("--help") == 0);
}
#endif

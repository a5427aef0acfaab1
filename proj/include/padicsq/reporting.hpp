#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "padicsq/block_counts.hpp"
#include "padicsq/polynomial.hpp"

namespace padicsq {

enum class Command { Curve, Blocks, Ranks, Discrepancy, Expsum, Verify, Scatter };
enum class OutputFormat { Csv, Json };

std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

inline constexpr std::uint64_t kMaxScatterRange = 10'000;
inline constexpr std::uint64_t kLargeGridWarning = 8'000;

struct RunConfig {
    std::string poly_text;
    std::uint64_t prime = 0;
    Command command = Command::Curve;
    int k = 2;                      // ranks
    std::string algorithm = "aggregated";
    std::uint64_t range = 0;        // scatter
    std::uint64_t sample_count = 2000;
    std::uint64_t seed = 0;
    OutputFormat format = OutputFormat::Csv;
    std::string out_path;           // empty: write to the supplied stream
    std::uint64_t oracle_bound = kDefaultOracleBound;
    unsigned threads = 0;           // 0: hardware concurrency
    std::string family = "thirds";  // discrepancy
    bool set_semantics = false;
    int etk_L = 0;                  // discrepancy: also report the ETK bracket when > 0
    int max_moment = 4;             // blocks
    std::uint64_t band_rows = 0;    // blocks: streaming band height, 0 = whole grid
};

nlohmann::json to_json(const RunConfig& cfg);

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kOracleBudget = 3;
inline constexpr int kVerifyFailed = 4;
}  // namespace exit_code

struct VerifyCheck {
    std::string name;
    bool pass = true;
    bool skipped = false;
    std::uint64_t compared = 0;
    std::uint64_t mismatches = 0;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool pass() const;
};

/// Closed forms against their exhaustive oracles at one prime.
VerifyReport verify(const Polynomial& f, const PrimeModulus& pm, std::uint64_t oracle_bound,
                    unsigned threads = 0);

class RangeTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Points of [0,range)^2 where nu_p(f) = 1, in (x, y) order.
std::vector<CurvePoint> scatter_points(const Polynomial& f, const PrimeModulus& pm, std::uint64_t range);

/// Tabular payload of one command: a CSV header plus rows of already-formatted fields.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& out, const Table& table);
/// Parses CSV produced by write_csv (no quoting).
Table read_csv(std::istream& in);

/// Formats with a fixed number of significant digits (printf %.Ng).
std::string format_significant(double v, int digits);
/// Formats with a fixed number of digits after the decimal point.
std::string format_fixed(double v, int decimals);

/**
 * Validates the configuration, runs the command and writes its payload.
 *
 * The payload goes to cfg.out_path when set (plus a `<out>.summary.json`
 * sidecar in CSV mode) and to `out` otherwise; a one-line summary and any
 * warnings go to `err`.  Returns one of the exit_code constants.
 */
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace padicsq

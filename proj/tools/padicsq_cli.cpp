// Command-line front end: one subcommand per report.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "padicsq/reporting.hpp"

int main(int argc, char** argv) {
    using padicsq::Command;
    padicsq::RunConfig cfg;
    std::string format = "csv";

    CLI::App app{"p-adic valuation statistics of bivariate polynomials over p x p blocks"};
    app.require_subcommand(1);

    const std::map<Command, std::string> help = {
        {Command::Curve, "points of f = 0 mod p with their jets (x,y,fx,fy,alpha)"},
        {Command::Blocks, "histogram of X over all p^2 blocks against Poisson(1)"},
        {Command::Ranks, "rank-classified tuple counts m_k1, m_k2"},
        {Command::Discrepancy, "box-restricted lower bounds for the discrepancies of the jet set"},
        {Command::Expsum, "sampled maximum of the exponential sums over translated curves"},
        {Command::Verify, "closed forms against exhaustive oracles"},
        {Command::Scatter, "points of [0,range)^2 where nu_p(f) = 1"},
    };

    std::map<CLI::App*, Command> commands;
    for (const auto& [cmd, text] : help) {
        CLI::App* sub = app.add_subcommand(padicsq::to_string(cmd), text);
        commands[sub] = cmd;
        sub->add_option("--poly", cfg.poly_text, "polynomial in x and y, e.g. \"x^3+y^2+x*y+1\"")->required();
        sub->add_option("--prime", cfg.prime, "odd prime p")->required();
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", cfg.out_path, "output file (default: stdout)");
        sub->add_option("--threads", cfg.threads, "worker threads, 0 = all cores");
        sub->add_option("--oracle-bound", cfg.oracle_bound, "largest prime accepted by exhaustive oracles");
        switch (cmd) {
            case Command::Ranks:
                sub->add_option("--k", cfg.k, "tuple length");
                sub->add_option("--algorithm", cfg.algorithm, "aggregated or naive");
                break;
            case Command::Scatter:
                sub->add_option("--range", cfg.range, "side of the scanned square [0,range)^2")->required();
                break;
            case Command::Expsum:
                sub->add_option("--samples", cfg.sample_count, "number of (k,l) pairs; >= p^2 scans all");
                sub->add_option("--seed", cfg.seed, "seed for the pair sampler");
                break;
            case Command::Discrepancy:
                sub->add_option("--family", cfg.family, "box family: thirds, grid or grid:<side>");
                sub->add_flag("--set-semantics", cfg.set_semantics, "count repeated jets once");
                sub->add_option("--etk", cfg.etk_L, "also report the ETK bracket truncated at L");
                break;
            case Command::Blocks:
                sub->add_option("--max-moment", cfg.max_moment, "highest empirical moment reported");
                sub->add_option("--band-rows", cfg.band_rows, "stream the counter grid in bands of this many rows");
                break;
            default: break;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return padicsq::exit_code::kValidation;
    }

    for (const auto& [sub, cmd] : commands) {
        if (sub->parsed()) cfg.command = cmd;
    }
    cfg.format = format == "json" ? padicsq::OutputFormat::Json : padicsq::OutputFormat::Csv;
    return padicsq::run(cfg, std::cout, std::cerr);
}

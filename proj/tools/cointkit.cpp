// cointkit.cpp
// Command-line front end. `analyze` runs the full test pipeline on a panel
// CSV and writes the report; `simulate` generates a synthetic panel from a
// JSON process description.
//
// Exit codes: 0 success, 1 analysis failure (report still written),
// 2 usage / configuration / I-O failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "cointkit/report.hpp"
#include "cointkit/sim_json.hpp"

namespace {

int run_analyze(const std::string& config_path, const std::string& input_override,
                const std::string& out_override, const std::string& format,
                std::optional<std::uint64_t> seed_override,
                const std::vector<std::string>& only, std::optional<int> threads_override) {
    cointkit::AnalysisConfig config;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cointkit: cannot open config '" << config_path << "'\n";
                return 2;
            }
            nlohmann::json j;
            in >> j;
            config = cointkit::config_from_json(j);
        }
        if (!input_override.empty()) config.input_path = input_override;
        if (!out_override.empty()) config.output_dir = out_override;
        if (seed_override) config.seed = *seed_override;
        if (!only.empty()) config.tests = only;
        if (threads_override) config.threads = *threads_override;
        if (config.input_path.empty()) {
            std::cerr << "cointkit: no input file (use --input or the config file)\n";
            return 2;
        }
        for (const auto& t : config.tests) {
            bool known = false;
            for (const char* k :
                 {"stats", "unitroot", "stability", "gh", "rank", "causality", "integration",
                  "bivariate"})
                known = known || t == k;
            if (!known) {
                std::cerr << "cointkit: unknown test '" << t << "'\n";
                return 2;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "cointkit: config parse error: " << e.what() << '\n';
        return 2;
    } catch (const cointkit::error& e) {
        std::cerr << "cointkit: " << e.what() << '\n';
        return 2;
    }

    cointkit::ReportDocument doc;
    try {
        doc = cointkit::run_pipeline(config);
    } catch (const cointkit::io_error& e) {
        std::cerr << "cointkit: " << e.what() << '\n';
        return 2;
    } catch (const cointkit::configuration_error& e) {
        std::cerr << "cointkit: " << e.what() << '\n';
        return 2;
    } catch (const cointkit::error& e) {
        std::cerr << "cointkit: analysis failed: " << e.what() << '\n';
        return 1;
    }

    try {
        const auto files = cointkit::write_report(doc, format, config.output_dir);
        for (const auto& f : files) std::cout << "wrote " << config.output_dir << '/' << f << '\n';
    } catch (const cointkit::error& e) {
        std::cerr << "cointkit: " << e.what() << '\n';
        return 2;
    }
    return doc.any_block_failed() ? 1 : 0;
}

int run_simulate(const std::string& spec_path, const std::string& out_path) {
    try {
        std::ifstream in(spec_path);
        if (!in) {
            std::cerr << "cointkit: cannot open spec '" << spec_path << "'\n";
            return 2;
        }
        nlohmann::json j;
        in >> j;
        const auto spec = cointkit::dgp_spec_from_json(j);
        const auto panel = cointkit::generate(spec);
        cointkit::write_panel_csv_file(panel, out_path);
        std::cout << "wrote " << out_path << " (" << panel.dims() << " markets, "
                  << panel.size() << " observations)\n";
        return 0;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "cointkit: spec parse error: " << e.what() << '\n';
        return 2;
    } catch (const cointkit::error& e) {
        std::cerr << "cointkit: " << e.what() << '\n';
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cointkit - cointegration and market integration toolkit"};
    app.set_version_flag("--version", cointkit::kToolkitVersion);
    app.require_subcommand(1);

    std::string config_path, input_path, out_dir, format = "text";
    std::vector<std::string> only;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;

    auto* analyze = app.add_subcommand("analyze", "run the test pipeline on a panel CSV");
    analyze->add_option("--config", config_path, "JSON analysis configuration");
    analyze->add_option("--input", input_path, "panel CSV (overrides config)");
    analyze->add_option("--out", out_dir, "output directory (overrides config)");
    analyze->add_option("--format", format, "report format: text or csv-bundle")
        ->check(CLI::IsMember({"text", "csv-bundle"}));
    analyze->add_option("--seed", seed, "seed echoed into the report (overrides config)");
    analyze->add_option("--only", only, "subset of tests to run (repeatable)");
    analyze->add_option("--threads", threads, "worker threads for grid and matrix stages");

    std::string spec_path, sim_out = "panel.csv";
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic panel CSV");
    simulate->add_option("--spec", spec_path, "JSON process description")->required();
    simulate->add_option("--out", sim_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (analyze->parsed())
        return run_analyze(config_path, input_path, out_dir, format, seed, only, threads);
    return run_simulate(spec_path, sim_out);
}

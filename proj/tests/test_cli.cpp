#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cointkit/report.hpp"
#include "cointkit/unit_root.hpp"

using namespace cointkit;
namespace fs = std::filesystem;

namespace {

std::string data_path(const std::string& name) {
    return std::string(COINTKIT_TEST_DATA_DIR) + "/" + name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

AnalysisConfig golden_config() {
    std::ifstream in(data_path("golden_config.json"));
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    auto config = config_from_json(j);
    config.input_path = data_path("g7_synthetic.csv");
    return config;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("cointkit_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("config json round trip and validation") {
    auto config = golden_config();
    CHECK(config.lag_order == 2);
    CHECK(config.numeraire == "US");
    CHECK(config.alignment.first_to_close.count("Japan") == 1);
    CHECK(config.gh_models.size() == 3);

    nlohmann::json bad{{"inptu", "x.csv"}};
    CHECK_THROWS_AS(config_from_json(bad), configuration_error);

    nlohmann::json bad_sig{{"significance", 0.07}};
    CHECK_THROWS_AS(config_from_json(bad_sig), configuration_error);

    nlohmann::json bad_test{{"tests", {"unitroot", "nope"}}};
    CHECK_THROWS_AS(config_from_json(bad_test), configuration_error);
}

TEST_CASE("golden report: byte-identical, repeatable, thread-invariant") {
    auto config = golden_config();
    const std::string golden = slurp(data_path("golden_report.txt"));

    config.threads = 1;
    auto doc1 = run_pipeline(config);
    CHECK(render_report_text(doc1) == golden);

    // Second consecutive run.
    auto doc2 = run_pipeline(config);
    CHECK(render_report_text(doc2) == golden);

    // Concurrent execution mode.
    config.threads = 2;
    auto doc3 = run_pipeline(config);
    CHECK(render_report_text(doc3) == golden);
}

TEST_CASE("golden report values agree with direct module calls") {
    auto config = golden_config();
    auto doc = run_pipeline(config);

    // Rebuild the working panel exactly as the pipeline does.
    MarketPanel raw = read_panel_csv_file(config.input_path);
    std::vector<ObservationSeries> ordered;
    ordered.push_back(raw.at("US"));
    for (const auto& s : raw.series)
        if (s.name != "US") ordered.push_back(s);
    raw.series = ordered;
    MarketPanel panel = raw;
    for (auto& s : panel.series) s = log_transform(rebase_to_relative(s, config.base_date));
    auto aligned = apply_closing_time_alignment(panel, config.alignment);
    panel = aligned.view();

    SUBCASE("unit root block") {
        const auto adf = adf_test(panel.at("US"), config.adf_levels);
        CHECK(doc.unit_root.rows.front().adf == adf.statistic);
        CHECK(doc.unit_root.rows.front().adf_T == adf.effective_T);
        CHECK(doc.unit_root.effective_T == adf.effective_T);
        const auto kpss = kpss_test(panel.at("US"), config.kpss_levels);
        CHECK(doc.unit_root.rows.front().kpss == kpss.statistic);
    }
    SUBCASE("break test block") {
        std::vector<ObservationSeries> x_set(panel.series.begin() + 1, panel.series.end());
        auto gh = gh_test(panel.series.front(), x_set, BreakModelKind::level_shift,
                          GhStatistic::adf_star, config.gh_trim);
        CHECK(doc.gh.rows.front().value == gh.statistic);
        CHECK(doc.gh.rows.front().break_index == gh.breakpoint->break_index);
        CHECK(doc.gh.effective_T == gh.effective_T);
    }
    SUBCASE("rank and integration blocks") {
        auto rank = johansen_rank_test(panel, 2, config.johansen_deterministic, 0.05);
        CHECK(doc.selected_rank == rank.selected_rank);
        CHECK(doc.rank_ladder.rows.front().trace == rank.trace_stats.front());
        CHECK(doc.rank_ladder.effective_T == rank.effective_T);

        auto sum = var_sum_integration_test(panel, 2, 0);
        CHECK(doc.integration.rows.front().coef_sum == sum.sum);
        CHECK(doc.integration.rows.front().sum_statistic == sum.statistic);
        CHECK(doc.integration.effective_T == sum.effective_T);
    }
    SUBCASE("causality block") {
        auto cell = granger_test(panel, "US", "Canada", 2, CausalityMode::levels_var);
        bool found = false;
        for (const auto& c : doc.causality.rows) {
            if (c.cause == "US" && c.effect == "Canada") {
                CHECK(c.statistic == cell.statistic);
                CHECK(c.df_den == cell.df_den);
                found = true;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("metadata-only run and block subsetting") {
    auto config = golden_config();
    config.tests.clear();
    auto doc = run_pipeline(config);
    CHECK_FALSE(doc.unit_root.present);
    CHECK_FALSE(doc.gh.present);
    CHECK_FALSE(doc.any_block_failed());
    CHECK(doc.observations == 419);

    config.tests = {"unitroot"};
    auto doc2 = run_pipeline(config);
    CHECK(doc2.unit_root.present);
    CHECK_FALSE(doc2.gh.present);
}

TEST_CASE("missing market in config is a configuration error") {
    auto config = golden_config();
    config.numeraire = "Mars";
    CHECK_THROWS_AS(run_pipeline(config), configuration_error);

    auto config2 = golden_config();
    config2.alignment.first_to_close.insert("Venus");
    CHECK_THROWS_AS(run_pipeline(config2), configuration_error);
}

TEST_CASE("write_report: determinism and csv bundle shape") {
    auto config = golden_config();
    auto doc = run_pipeline(config);

    const auto dir1 = fresh_dir("bundle1");
    const auto dir2 = fresh_dir("bundle2");
    auto files1 = write_report(doc, "csv-bundle", dir1.string());
    auto files2 = write_report(doc, "csv-bundle", dir2.string());
    REQUIRE(files1 == files2);

    // Five table files plus one metadata file for a full seven-market run.
    CHECK(files1.size() == 6);
    std::size_t csvs = 0;
    for (const auto& f : files1)
        if (f.size() > 4 && f.substr(f.size() - 4) == ".csv") ++csvs;
    CHECK(csvs == 5);

    for (const auto& f : files1) CHECK(slurp(dir1 / f) == slurp(dir2 / f));

    auto text_files = write_report(doc, "text", dir1.string());
    CHECK(text_files == std::vector<std::string>{"report.txt"});
    CHECK_THROWS_AS(write_report(doc, "yaml", dir1.string()), configuration_error);
}

TEST_CASE("profile export writes one csv per statistic and model") {
    auto config = golden_config();
    config.tests = {"gh"};
    config.export_profiles = true;
    const auto dir = fresh_dir("profiles");
    config.output_dir = dir.string();
    auto doc = run_pipeline(config);
    REQUIRE(doc.gh.present);
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(dir / "profiles")) {
        ++count;
        std::ifstream in(entry.path());
        std::string header;
        std::getline(in, header);
        CHECK(header == "tau,break_index,statistic");
    }
    CHECK(count == 9);  // three statistics x three models
}

TEST_CASE("text report renders the starred-statistic convention") {
    auto config = golden_config();
    auto doc = run_pipeline(config);
    const std::string text = render_report_text(doc);
    // At least one unit-root difference row is significant at 1%.
    CHECK(text.find("**") != std::string::npos);
    CHECK(text.find("significance markers: ** at 1%, * at 5%") != std::string::npos);
}

#ifdef COINTKIT_CLI
TEST_CASE("cli process exit codes") {
    const std::string cli = COINTKIT_CLI;
    const auto out = fresh_dir("cli_out");
    auto run = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };

    CHECK(run("analyze --input /nonexistent.csv --out " + out.string()) == 2);
    CHECK(run("analyze") == 2);          // no input
    CHECK(run("bogus-subcommand") == 2); // usage
    CHECK(run("analyze --config " + data_path("golden_config.json") + " --input " +
              data_path("g7_synthetic.csv") + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "report.txt"));

    // --only restricts the pipeline to the named stages.
    CHECK(run("analyze --config " + data_path("golden_config.json") + " --input " +
              data_path("g7_synthetic.csv") + " --out " + out.string() +
              " --only unitroot --format csv-bundle") == 0);
    CHECK(fs::exists(out / "t1_unit_root.csv"));
    CHECK_FALSE(fs::exists(out / "t2_cointegration.csv"));
    CHECK(run("analyze --only nonsense --input " + data_path("g7_synthetic.csv")) == 2);

    // Simulate subcommand round trip.
    const auto spec_file = out / "dgp.json";
    {
        std::ofstream os(spec_file);
        os << R"({"kind":"random_walk","dims":2,"T":40,"seed":5})";
    }
    const auto panel_file = out / "panel.csv";
    CHECK(run("simulate --spec " + spec_file.string() + " --out " + panel_file.string()) == 0);
    auto panel = read_panel_csv_file(panel_file.string());
    CHECK(panel.dims() == 2);
    CHECK(panel.size() == 40);
    CHECK(run("simulate --spec /nonexistent.json --out " + panel_file.string()) == 2);
}
#endif

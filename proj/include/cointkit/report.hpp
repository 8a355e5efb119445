// report.hpp
// End-to-end pipeline: ingest a market panel, transform it, run the full
// test sequence, and render the five report tables plus a notes block that
// records every runtime decision (lags, bandwidths, rank, modes, effective
// samples). Rendering is deterministic: identical inputs, configuration and
// seed produce byte-identical files.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cointkit/causality.hpp"
#include "cointkit/cointegration.hpp"
#include "cointkit/csv.hpp"
#include "cointkit/parallel.hpp"
#include "cointkit/regression.hpp"
#include "cointkit/series.hpp"
#include "cointkit/stability.hpp"
#include "cointkit/unit_root.hpp"
#include "cointkit/vecm.hpp"

namespace cointkit {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct AnalysisConfig {
    std::string input_path;
    std::string base_date;       // empty: keep levels as ingested
    std::string numeraire;       // empty: first column
    int lag_order = 2;
    Deterministic adf_levels = Deterministic::constant_and_trend;
    Deterministic adf_differences = Deterministic::constant;
    Deterministic kpss_levels = Deterministic::constant_and_trend;
    Deterministic kpss_differences = Deterministic::constant;
    std::vector<BreakModelKind> gh_models{BreakModelKind::level_shift,
                                          BreakModelKind::level_shift_with_trend,
                                          BreakModelKind::regime_shift};
    double gh_trim = 0.15;
    double significance = 0.05;
    AlignmentRoles alignment;
    std::vector<std::string> tests{"stats",     "unitroot",    "stability", "gh",
                                   "rank",      "causality",   "integration", "bivariate"};
    std::optional<int> rank;  // fixed cointegration rank; unset: trace-selected
    VecmDeterministic johansen_deterministic = VecmDeterministic::restricted_constant;
    CausalityMode causality_mode = CausalityMode::levels_var;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    bool export_profiles = false;
    int threads = 1;
};

namespace detail {

inline Deterministic deterministic_from_string(const std::string& s) {
    if (s == "none") return Deterministic::none;
    if (s == "constant") return Deterministic::constant;
    if (s == "constant_and_trend") return Deterministic::constant_and_trend;
    throw configuration_error("config: unknown deterministic spec '" + s + "'");
}

inline BreakModelKind break_model_from_string(const std::string& s) {
    if (s == "C") return BreakModelKind::level_shift;
    if (s == "C/T") return BreakModelKind::level_shift_with_trend;
    if (s == "C/S") return BreakModelKind::regime_shift;
    throw configuration_error("config: unknown break model '" + s + "'");
}

inline const std::vector<std::string>& known_tests() {
    static const std::vector<std::string> names{"stats",     "unitroot",  "stability",
                                                "gh",        "rank",      "causality",
                                                "integration", "bivariate"};
    return names;
}

} // namespace detail

inline AnalysisConfig config_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known{
        "input",          "base_date",   "numeraire",  "lag_order",
        "adf_deterministic_levels",      "adf_deterministic_differences",
        "kpss_deterministic_levels",     "kpss_deterministic_differences",
        "gh_models",      "gh_trim",     "significance", "alignment",
        "tests",          "rank",        "johansen_deterministic",
        "causality_mode", "seed",        "output_dir", "export_profiles", "threads"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw configuration_error("config: unknown key '" + it.key() + "'");

    AnalysisConfig c;
    c.input_path = j.value("input", "");
    c.base_date = j.value("base_date", "");
    c.numeraire = j.value("numeraire", "");
    c.lag_order = j.value("lag_order", 2);
    if (j.contains("adf_deterministic_levels"))
        c.adf_levels = detail::deterministic_from_string(j["adf_deterministic_levels"]);
    if (j.contains("adf_deterministic_differences"))
        c.adf_differences = detail::deterministic_from_string(j["adf_deterministic_differences"]);
    if (j.contains("kpss_deterministic_levels"))
        c.kpss_levels = detail::deterministic_from_string(j["kpss_deterministic_levels"]);
    if (j.contains("kpss_deterministic_differences"))
        c.kpss_differences =
            detail::deterministic_from_string(j["kpss_deterministic_differences"]);
    if (j.contains("gh_models")) {
        c.gh_models.clear();
        for (const auto& m : j["gh_models"])
            c.gh_models.push_back(detail::break_model_from_string(m.get<std::string>()));
    }
    c.gh_trim = j.value("gh_trim", 0.15);
    c.significance = j.value("significance", 0.05);
    if (c.significance != 0.01 && c.significance != 0.05 && c.significance != 0.10)
        throw configuration_error("config: significance must be 0.01, 0.05 or 0.10");
    if (j.contains("alignment")) {
        const auto& a = j["alignment"];
        for (auto it = a.begin(); it != a.end(); ++it)
            if (it.key() != "first_to_close" && it.key() != "last_to_close")
                throw configuration_error("config: unknown alignment key '" + it.key() + "'");
        if (a.contains("first_to_close"))
            for (const auto& n : a["first_to_close"])
                c.alignment.first_to_close.insert(n.get<std::string>());
        if (a.contains("last_to_close"))
            for (const auto& n : a["last_to_close"])
                c.alignment.last_to_close.insert(n.get<std::string>());
    }
    if (j.contains("tests")) {
        c.tests.clear();
        for (const auto& t : j["tests"]) {
            const std::string name = t.get<std::string>();
            bool ok = false;
            for (const auto& k : detail::known_tests()) ok = ok || k == name;
            if (!ok) throw configuration_error("config: unknown test '" + name + "'");
            c.tests.push_back(name);
        }
    }
    if (j.contains("rank") && !j["rank"].is_null()) c.rank = j["rank"].get<int>();
    if (j.contains("johansen_deterministic")) {
        const std::string s = j["johansen_deterministic"];
        if (s == "restricted_constant")
            c.johansen_deterministic = VecmDeterministic::restricted_constant;
        else if (s == "unrestricted_constant")
            c.johansen_deterministic = VecmDeterministic::unrestricted_constant;
        else
            throw configuration_error("config: unknown johansen_deterministic '" + s + "'");
    }
    if (j.contains("causality_mode")) {
        const std::string s = j["causality_mode"];
        if (s == "levels_var")
            c.causality_mode = CausalityMode::levels_var;
        else if (s == "vecm")
            c.causality_mode = CausalityMode::vecm;
        else
            throw configuration_error("config: unknown causality_mode '" + s + "'");
    }
    c.seed = j.value("seed", 0ULL);
    c.output_dir = j.value("output_dir", ".");
    c.export_profiles = j.value("export_profiles", false);
    c.threads = j.value("threads", 1);
    return c;
}

inline nlohmann::json config_to_json(const AnalysisConfig& c) {
    nlohmann::json j;
    j["input"] = c.input_path;
    j["base_date"] = c.base_date;
    j["numeraire"] = c.numeraire;
    j["lag_order"] = c.lag_order;
    j["adf_deterministic_levels"] = to_string(c.adf_levels);
    j["adf_deterministic_differences"] = to_string(c.adf_differences);
    j["kpss_deterministic_levels"] = to_string(c.kpss_levels);
    j["kpss_deterministic_differences"] = to_string(c.kpss_differences);
    nlohmann::json models = nlohmann::json::array();
    for (auto m : c.gh_models) models.push_back(to_string(m));
    j["gh_models"] = models;
    j["gh_trim"] = c.gh_trim;
    j["significance"] = c.significance;
    j["alignment"] = {{"first_to_close", c.alignment.first_to_close},
                      {"last_to_close", c.alignment.last_to_close}};
    j["tests"] = c.tests;
    if (c.rank)
        j["rank"] = *c.rank;
    else
        j["rank"] = nullptr;
    j["johansen_deterministic"] = to_string(c.johansen_deterministic);
    j["causality_mode"] = to_string(c.causality_mode);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["export_profiles"] = c.export_profiles;
    j["threads"] = c.threads;
    return j;
}

// ---------------------------------------------------------------------------
// Report document
// ---------------------------------------------------------------------------

struct StatsRow {
    std::string variable;
    SummaryStats stats;
};

struct UnitRootRow {
    std::string variable;
    double adf = 0.0;
    int adf_lags = 0;
    std::optional<double> adf_reject_at;
    long adf_T = 0;
    double kpss = 0.0;
    int kpss_bandwidth = 0;
    std::optional<double> kpss_reject_at;
    long kpss_T = 0;
};

struct StabilityRow {
    std::string variable;
    bool cusum_stable = true;
    std::string cusum_crossing_date;  // empty when stable
    bool cusumq_stable = true;
    std::string cusumq_crossing_date;
};

struct GhRow {
    std::string statistic;  // ADF*, Zt*, Za*
    std::string model;      // C, C/T, C/S
    double value = 0.0;
    std::optional<double> reject_at;
    double tau = 0.0;
    long break_index = 0;
    std::string break_date;
    int lags = 0;
    long effective_T = 0;
};

struct RankLadderRow {
    int r = 0;
    double eigenvalue = 0.0;
    double trace = 0.0;
    double critical_value = 0.0;
};

struct IntegrationRow {
    std::string variable;
    double coef_sum = 0.0;
    double sum_statistic = 0.0;
    double sum_pvalue = 1.0;
    bool has_beta = false;
    double beta = 0.0;
    double beta_se = 0.0;  // zero for the numeraire row
    std::optional<double> beta_reject_at;
};

struct BivariateRow {
    std::string var1;
    std::string var2;
    double statistic = 0.0;
    double pvalue = 1.0;
};

template <typename Row>
struct Block {
    bool present = false;
    std::string error;  // annotation when the stage failed
    std::vector<Row> rows;
    long effective_T = 0;
};

struct ReportDocument {
    std::string version = kToolkitVersion;
    std::string config_echo;  // canonical JSON
    std::vector<std::string> markets;
    long observations = 0;
    std::string start_date;
    std::string end_date;
    std::vector<std::string> notes;

    Block<StatsRow> descriptive;
    Block<UnitRootRow> unit_root;          // levels
    Block<UnitRootRow> unit_root_diff;     // first differences
    Block<StabilityRow> stability;
    Block<GhRow> gh;
    Block<RankLadderRow> rank_ladder;
    int selected_rank = 0;
    int used_rank = 0;
    std::string vecm_dump;  // structured model dump, embedded verbatim
    Block<IntegrationRow> integration;     // T4
    double lop_statistic = 0.0;            // multivariate proportionality test
    double lop_pvalue = 1.0;
    Block<CausalityOutcome> causality;     // T3
    Block<BivariateRow> bivariate;         // T5

    bool any_block_failed() const {
        return !descriptive.error.empty() || !unit_root.error.empty() ||
               !unit_root_diff.error.empty() || !stability.error.empty() || !gh.error.empty() ||
               !rank_ladder.error.empty() || !integration.error.empty() ||
               !causality.error.empty() || !bivariate.error.empty();
    }
};

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace detail {

inline bool wants(const AnalysisConfig& c, const std::string& test) {
    for (const auto& t : c.tests)
        if (t == test) return true;
    return false;
}

inline std::string stars(std::optional<double> reject_at) {
    if (!reject_at) return "";
    if (*reject_at <= 0.01) return "**";
    if (*reject_at <= 0.05) return "*";
    return "";
}

inline std::string stars_from_pvalue(double p) {
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

inline std::string fmt(double v, int decimals = 5, int width = 0) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%*.*f", width, decimals, v);
    return buf;
}

} // namespace detail

/// Runs the configured test sequence on the input panel. Failures inside one
/// stage annotate that stage's block and the pipeline continues.
inline ReportDocument run_pipeline(const AnalysisConfig& config) {
    const int saved_threads = default_threads();
    default_threads() = std::max(1, config.threads);
    struct ThreadGuard {
        int saved;
        ~ThreadGuard() { default_threads() = saved; }
    } guard{saved_threads};

    MarketPanel raw = read_panel_csv_file(config.input_path);

    // Numeraire first: beta normalization and the break-test regressand key
    // off panel order.
    if (!config.numeraire.empty()) {
        if (!raw.has(config.numeraire))
            throw configuration_error("config: numeraire '" + config.numeraire +
                                      "' not in the input panel");
        std::vector<ObservationSeries> ordered;
        ordered.push_back(raw.at(config.numeraire));
        for (const auto& s : raw.series)
            if (s.name != config.numeraire) ordered.push_back(s);
        raw.series = std::move(ordered);
    }
    for (const auto& n : config.alignment.first_to_close)
        if (!raw.has(n)) throw configuration_error("config: unknown market '" + n + "' in roles");
    for (const auto& n : config.alignment.last_to_close)
        if (!raw.has(n)) throw configuration_error("config: unknown market '" + n + "' in roles");

    ReportDocument doc;
    {
        // Echo the analysis parameters only; file locations and worker
        // counts must not change the report bytes.
        nlohmann::json echo = config_to_json(config);
        echo.erase("output_dir");
        echo.erase("threads");
        echo["input"] = std::filesystem::path(config.input_path).filename().string();
        doc.config_echo = echo.dump();
    }

    // Transform chain: rebase (optional) then natural logs.
    MarketPanel panel = raw;
    if (!config.base_date.empty()) {
        for (auto& s : panel.series) s = rebase_to_relative(s, config.base_date);
        doc.notes.push_back("levels rebased to 100 at " + config.base_date);
    }
    for (auto& s : panel.series) s = log_transform(s);

    // Closing-time alignment: trims the working sample and records the
    // dependent -> regressor lag map.
    const auto aligned = apply_closing_time_alignment(panel, config.alignment);
    if (aligned.max_lag > 0) {
        panel = aligned.view();
        for (const auto& [dep, regs] : aligned.lag_offsets) {
            std::string line = "alignment for dependent " + dep + ":";
            for (const auto& [reg, off] : regs)
                line += " " + reg + (off > 0 ? "(-1d)" : "(0d)");
            doc.notes.push_back(line);
        }
    } else {
        doc.notes.push_back("alignment: none (no closing-time roles configured)");
    }

    doc.markets = panel.names();
    doc.observations = static_cast<long>(panel.size());
    doc.start_date = panel.calendar.front();
    doc.end_date = panel.calendar.back();

    const int i = static_cast<int>(panel.dims());
    const int p = config.lag_order;

    if (detail::wants(config, "stats")) {
        try {
            for (const auto& s : panel.series)
                doc.descriptive.rows.push_back({s.name, descriptive_stats(s)});
            doc.descriptive.present = true;
            doc.descriptive.effective_T = doc.observations;
        } catch (const error& e) {
            doc.descriptive.error = e.what();
        }
    }

    if (detail::wants(config, "unitroot")) {
        try {
            for (const auto& s : panel.series) {
                UnitRootRow row;
                row.variable = s.name;
                auto adf = adf_test(s, config.adf_levels);
                auto kpss = kpss_test(s, config.kpss_levels);
                row.adf = adf.statistic;
                row.adf_lags = adf.lags_used;
                row.adf_reject_at = adf.reject_at;
                row.adf_T = adf.effective_T;
                row.kpss = kpss.statistic;
                row.kpss_bandwidth = kpss.lags_used;
                row.kpss_reject_at = kpss.reject_at;
                row.kpss_T = kpss.effective_T;
                doc.unit_root.rows.push_back(row);
            }
            doc.unit_root.present = true;
            doc.unit_root.effective_T = doc.unit_root.rows.front().adf_T;
        } catch (const error& e) {
            doc.unit_root.error = e.what();
        }
        try {
            for (const auto& s : panel.series) {
                const auto d = difference(s, 1);
                UnitRootRow row;
                row.variable = "d." + s.name;
                auto adf = adf_test(d, config.adf_differences);
                auto kpss = kpss_test(d, config.kpss_differences);
                row.adf = adf.statistic;
                row.adf_lags = adf.lags_used;
                row.adf_reject_at = adf.reject_at;
                row.adf_T = adf.effective_T;
                row.kpss = kpss.statistic;
                row.kpss_bandwidth = kpss.lags_used;
                row.kpss_reject_at = kpss.reject_at;
                row.kpss_T = kpss.effective_T;
                doc.unit_root_diff.rows.push_back(row);
            }
            doc.unit_root_diff.present = true;
            doc.unit_root_diff.effective_T = doc.unit_root_diff.rows.front().adf_T;
        } catch (const error& e) {
            doc.unit_root_diff.error = e.what();
        }
    }

    if (detail::wants(config, "stability")) {
        try {
            for (const auto& s : panel.series) {
                StabilityRow row;
                row.variable = s.name;
                const auto cusum = cusum_test(s.values);
                const auto cusumq = cusum_sq_test(s.values);
                row.cusum_stable = cusum.stable;
                if (!cusum.stable)
                    row.cusum_crossing_date =
                        panel.calendar[static_cast<std::size_t>(cusum.k + cusum.first_crossing)];
                row.cusumq_stable = cusumq.stable;
                if (!cusumq.stable)
                    row.cusumq_crossing_date =
                        panel.calendar[static_cast<std::size_t>(cusumq.k + cusumq.first_crossing)];
                doc.stability.rows.push_back(row);
            }
            doc.stability.present = true;
            doc.stability.effective_T = doc.observations;
        } catch (const error& e) {
            doc.stability.error = e.what();
        }
    }

    if (detail::wants(config, "gh") && i >= 2) {
        try {
            const auto& y = panel.series.front();
            std::vector<ObservationSeries> x_set(panel.series.begin() + 1, panel.series.end());
            doc.notes.push_back("break-test regressand: " + y.name +
                                " (first configured market)");
            for (auto stat : {GhStatistic::adf_star, GhStatistic::zt_star, GhStatistic::za_star}) {
                for (auto model : config.gh_models) {
                    auto outcome = gh_test(y, x_set, model, stat, config.gh_trim);
                    GhRow row;
                    row.statistic = to_string(stat);
                    row.model = to_string(model);
                    row.value = outcome.statistic;
                    row.reject_at = outcome.reject_at;
                    row.tau = outcome.breakpoint->tau;
                    row.break_index = outcome.breakpoint->break_index;
                    row.break_date =
                        panel.calendar[static_cast<std::size_t>(outcome.breakpoint->break_index)];
                    row.lags = outcome.lags_used;
                    row.effective_T = outcome.effective_T;
                    doc.gh.rows.push_back(row);
                    if (config.export_profiles) {
                        std::filesystem::create_directories(
                            std::filesystem::path(config.output_dir) / "profiles");
                        std::string fname = std::string("gh_") +
                                            (stat == GhStatistic::adf_star
                                                 ? "adf"
                                                 : (stat == GhStatistic::zt_star ? "zt" : "za")) +
                                            "_" +
                                            (model == BreakModelKind::level_shift
                                                 ? "c"
                                                 : (model == BreakModelKind::level_shift_with_trend
                                                        ? "ct"
                                                        : "cs")) +
                                            ".csv";
                        std::ofstream os(std::filesystem::path(config.output_dir) / "profiles" /
                                         fname);
                        write_profile_csv(outcome, os);
                    }
                }
            }
            doc.gh.present = true;
            doc.gh.effective_T = doc.gh.rows.front().effective_T;
        } catch (const error& e) {
            doc.gh.error = e.what();
        }
    }

    std::optional<VecmModel> vecm;
    if (detail::wants(config, "rank") && i >= 2) {
        try {
            auto rank = johansen_rank_test(panel, p, config.johansen_deterministic,
                                           config.significance);
            for (int r = 0; r < i; ++r) {
                RankLadderRow row;
                row.r = r;
                row.eigenvalue = rank.eigenvalues[static_cast<std::size_t>(r)];
                row.trace = rank.trace_stats[static_cast<std::size_t>(r)];
                row.critical_value =
                    rank.critical_values[static_cast<std::size_t>(r)].at(config.significance);
                doc.rank_ladder.rows.push_back(row);
            }
            doc.rank_ladder.present = true;
            doc.rank_ladder.effective_T = rank.effective_T;
            doc.selected_rank = rank.selected_rank;
            doc.used_rank = config.rank ? *config.rank : rank.selected_rank;
            doc.notes.push_back("trace-selected rank: " + std::to_string(rank.selected_rank) +
                                (config.rank ? " (overridden to " + std::to_string(*config.rank) +
                                                   " by configuration)"
                                             : ""));
            if (doc.used_rank >= 1 && doc.used_rank <= i - 1) {
                vecm = vecm_estimate(panel, p, doc.used_rank, config.johansen_deterministic);
                doc.vecm_dump = dump_model(*vecm);
                doc.notes.push_back("vecm estimated at rank " + std::to_string(doc.used_rank) +
                                    ", lag order " + std::to_string(p) + " (" +
                                    to_string(config.johansen_deterministic) + "), T' = " +
                                    std::to_string(vecm->effective_T));
                doc.notes.push_back(
                    "beta standard errors: analytic covariance of the concentrated "
                    "likelihood (not bootstrapped)");
            } else {
                doc.notes.push_back("vecm skipped: rank " + std::to_string(doc.used_rank) +
                                    " outside 1.." + std::to_string(i - 1));
            }
        } catch (const error& e) {
            doc.rank_ladder.error = e.what();
        }
    }

    if (detail::wants(config, "causality") && i >= 2) {
        try {
            const VecmModel* model_ptr = nullptr;
            if (config.causality_mode == CausalityMode::vecm) {
                if (!vecm)
                    throw configuration_error(
                        "causality: vecm mode needs the rank stage and rank >= 1");
                model_ptr = &*vecm;
            }
            doc.causality.rows = causality_matrix(panel, p, config.causality_mode, model_ptr);
            doc.causality.present = true;
            doc.causality.effective_T = doc.causality.rows.front().effective_T;
            doc.notes.push_back(std::string("causality mode: ") +
                                to_string(config.causality_mode) + ", " + std::to_string(p) +
                                " lags");
        } catch (const error& e) {
            doc.causality.error = e.what();
        }
    }

    if (detail::wants(config, "integration") && i >= 2) {
        try {
            for (int v = 0; v < i; ++v) {
                auto sum = var_sum_integration_test(panel, p, v);
                IntegrationRow row;
                row.variable = panel.series[static_cast<std::size_t>(v)].name;
                row.coef_sum = sum.sum;
                row.sum_statistic = sum.statistic;
                row.sum_pvalue = sum.pvalue;
                doc.integration.effective_T = sum.effective_T;
                if (vecm) {
                    row.has_beta = true;
                    row.beta = vecm->beta(v, 0);
                    row.beta_se = vecm->beta_std_error(v, 0);
                    if (row.beta_se > 0.0) {
                        const double z = row.beta / row.beta_se;
                        const double pv = chi_square_survival(z * z, 1);
                        if (pv < 0.01)
                            row.beta_reject_at = 0.01;
                        else if (pv < 0.05)
                            row.beta_reject_at = 0.05;
                    }
                }
                doc.integration.rows.push_back(row);
            }
            if (vecm) {
                auto lop = beta_restriction_test(
                    *vecm, sum_to_zero_restriction(vecm->levels_dim, i));
                doc.lop_statistic = lop.statistic;
                doc.lop_pvalue = lop.pvalue;
                doc.notes.push_back(
                    "system proportionality test: variable weights of relation 1 sum to zero "
                    "given unit numeraire; chi2(" +
                    std::to_string(lop.df) + ") = " + detail::fmt(lop.statistic) +
                    ", p = " + detail::fmt(lop.pvalue, 6));
            } else {
                doc.notes.push_back(
                    "system proportionality test skipped (no vecm at usable rank)");
            }
            doc.notes.push_back("var-sum equations estimated without a free constant");
            doc.integration.present = true;
        } catch (const error& e) {
            doc.integration.error = e.what();
        }
    }

    if (detail::wants(config, "bivariate") && i >= 2) {
        try {
            for (int a = 0; a < i; ++a) {
                for (int b = a + 1; b < i; ++b) {
                    MarketPanel pair;
                    pair.calendar = panel.calendar;
                    pair.series = {panel.series[static_cast<std::size_t>(a)],
                                   panel.series[static_cast<std::size_t>(b)]};
                    auto model = vecm_estimate(pair, p, 1, config.johansen_deterministic);
                    auto res =
                        beta_restriction_test(model, pair_proportionality_restriction(
                                                         model.levels_dim, 0, 1));
                    BivariateRow row;
                    row.var1 = pair.series[0].name;
                    row.var2 = pair.series[1].name;
                    row.statistic = res.statistic;
                    row.pvalue = res.pvalue;
                    doc.bivariate.rows.push_back(row);
                    doc.bivariate.effective_T = model.effective_T;
                }
            }
            doc.bivariate.present = true;
            doc.notes.push_back("bivariate tests: rank fixed at 1 per pair, " +
                                std::to_string(p) + " lags, H0: weights (1, -1) with free "
                                "relation constant");
        } catch (const error& e) {
            doc.bivariate.error = e.what();
        }
    }

    return doc;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace detail {

inline void render_block_header(std::ostringstream& os, const std::string& title) {
    os << '\n' << title << '\n' << std::string(title.size(), '-') << '\n';
}

// Emits a snprintf'ed row with trailing padding spaces stripped.
inline void put_line(std::ostringstream& os, const char* buf) {
    std::string s(buf);
    while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
    os << s << '\n';
}

} // namespace detail

/// Deterministic fixed-width text rendering of the report.
inline std::string render_report_text(const ReportDocument& doc) {
    std::ostringstream os;
    os << "cointkit analysis report\n";
    os << "========================\n";
    os << "version: " << doc.version << '\n';
    os << "markets:";
    for (const auto& m : doc.markets) os << ' ' << m;
    os << '\n';
    os << "sample: " << doc.start_date << " .. " << doc.end_date << " ("
       << doc.observations << " observations)\n";
    os << "config: " << doc.config_echo << '\n';

    auto annotate = [&os](const std::string& name, const std::string& err) {
        if (!err.empty()) os << "[" << name << "] FAILED: " << err << '\n';
    };
    annotate("stats", doc.descriptive.error);
    annotate("unitroot", doc.unit_root.error);
    annotate("unitroot.diff", doc.unit_root_diff.error);
    annotate("stability", doc.stability.error);
    annotate("gh", doc.gh.error);
    annotate("rank", doc.rank_ladder.error);
    annotate("causality", doc.causality.error);
    annotate("integration", doc.integration.error);
    annotate("bivariate", doc.bivariate.error);

    if (doc.descriptive.present) {
        detail::render_block_header(os, "Descriptive statistics (log levels)");
        os << "variable        mean     variance     skewness  exc.kurtosis  jarque-bera\n";
        for (const auto& r : doc.descriptive.rows) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%-10s %10.5f %12.5f %12.5f %13.5f %12.5f\n",
                          r.variable.c_str(), r.stats.mean, r.stats.variance, r.stats.skewness,
                          r.stats.excess_kurtosis, r.stats.jarque_bera);
            detail::put_line(os, buf);
        }
    }

    auto unit_root_rows = [&os](const Block<UnitRootRow>& block) {
        for (const auto& r : block.rows) {
            char buf[200];
            std::snprintf(buf, sizeof(buf), "%-10s %12.5f%-3s %4d %8ld %12.5f%-3s %4d %8ld\n",
                          r.variable.c_str(), r.adf,
                          detail::stars(r.adf_reject_at).c_str(), r.adf_lags, r.adf_T, r.kpss,
                          detail::stars(r.kpss_reject_at).c_str(), r.kpss_bandwidth, r.kpss_T);
            detail::put_line(os, buf);
        }
    };
    if (doc.unit_root.present || doc.unit_root_diff.present) {
        detail::render_block_header(os, "T1  Unit root and stationarity tests");
        os << "variable            ADF     lags     T_eff         KPSS       bw    T_eff\n";
        if (doc.unit_root.present) unit_root_rows(doc.unit_root);
        if (doc.unit_root_diff.present) unit_root_rows(doc.unit_root_diff);
    }

    if (doc.stability.present) {
        detail::render_block_header(os, "Parameter stability (cusum / cusum-sq, 5%)");
        for (const auto& r : doc.stability.rows) {
            os << r.variable << ": cusum "
               << (r.cusum_stable ? "stable" : "break at " + r.cusum_crossing_date)
               << ", cusum-sq "
               << (r.cusumq_stable ? "stable" : "break at " + r.cusumq_crossing_date) << '\n';
        }
    }

    if (doc.gh.present) {
        detail::render_block_header(os, "T2  Break cointegration tests");
        os << "statistic  model       value        breakpoint (tau, date)  lags/bw    T_eff\n";
        for (const auto& r : doc.gh.rows) {
            char buf[200];
            std::snprintf(buf, sizeof(buf), "%-9s  %-5s %12.5f%-3s  (%.4f, %s)  %6d %8ld\n",
                          r.statistic.c_str(), r.model.c_str(), r.value,
                          detail::stars(r.reject_at).c_str(), r.tau, r.break_date.c_str(),
                          r.lags, r.effective_T);
            detail::put_line(os, buf);
        }
    }

    if (doc.rank_ladder.present) {
        detail::render_block_header(os, "Johansen trace ladder");
        os << "r      eigenvalue        trace     critical\n";
        for (const auto& r : doc.rank_ladder.rows) {
            char buf[120];
            std::snprintf(buf, sizeof(buf), "%-4d %12.5f %12.5f %12.5f\n", r.r, r.eigenvalue,
                          r.trace, r.critical_value);
            detail::put_line(os, buf);
        }
        os << "selected rank: " << doc.selected_rank << ", used rank: " << doc.used_rank
           << ", T_eff: " << doc.rank_ladder.effective_T << '\n';
        if (!doc.vecm_dump.empty()) os << '\n' << doc.vecm_dump;
    }

    if (doc.causality.present) {
        detail::render_block_header(os, "T3  Granger causality (rows cause columns)");
        std::ostringstream csv;
        write_causality_csv(doc.causality.rows, doc.markets, csv);
        os << csv.str();
        os << "F degrees of freedom: (" << doc.causality.rows.front().df_num << ", "
           << doc.causality.rows.front().df_den << "), T_eff: " << doc.causality.effective_T
           << '\n';
    }

    if (doc.integration.present) {
        detail::render_block_header(os, "T4  Multivariate integration tests");
        os << "variable      sum a_ih    chi2(1)     p-value           beta    std.err\n";
        for (const auto& r : doc.integration.rows) {
            char buf[200];
            if (r.has_beta) {
                std::snprintf(buf, sizeof(buf),
                              "%-10s %11.5f %10.5f%-3s %9.6f %14.5f %10.5f%-3s\n",
                              r.variable.c_str(), r.coef_sum, r.sum_statistic,
                              detail::stars_from_pvalue(r.sum_pvalue).c_str(), r.sum_pvalue,
                              r.beta, r.beta_se, detail::stars(r.beta_reject_at).c_str());
            } else {
                std::snprintf(buf, sizeof(buf), "%-10s %11.5f %10.5f%-3s %9.6f %14s %10s\n",
                              r.variable.c_str(), r.coef_sum, r.sum_statistic,
                              detail::stars_from_pvalue(r.sum_pvalue).c_str(), r.sum_pvalue, "-",
                              "-");
            }
            detail::put_line(os, buf);
        }
        if (doc.integration.rows.front().has_beta)
            os << "system proportionality: chi2(1) = " << detail::fmt(doc.lop_statistic)
               << ", p = " << detail::fmt(doc.lop_pvalue, 6) << '\n';
        os << "T_eff: " << doc.integration.effective_T << '\n';
    }

    if (doc.bivariate.present) {
        detail::render_block_header(os, "T5  Bivariate integration tests");
        os << "variable 1   variable 2      chi2(1)     p-value\n";
        for (const auto& r : doc.bivariate.rows) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%-12s %-12s %10.5f  %9.6f %s\n", r.var1.c_str(),
                          r.var2.c_str(), r.statistic, r.pvalue,
                          detail::stars_from_pvalue(r.pvalue).c_str());
            detail::put_line(os, buf);
        }
        os << "T_eff: " << doc.bivariate.effective_T << '\n';
    }

    detail::render_block_header(os, "Notes");
    for (const auto& n : doc.notes) os << "- " << n << '\n';
    os << "significance markers: ** at 1%, * at 5%\n";
    return os.str();
}

/// Writes the report. `text` produces report.txt; `csv-bundle` writes one CSV
/// per table block present plus metadata.txt. Returns the file names written.
inline std::vector<std::string> write_report(const ReportDocument& doc, const std::string& format,
                                             const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::vector<std::string> written;
    auto open = [&](const std::string& name) {
        std::ofstream os(fs::path(out_dir) / name, std::ios::binary);
        if (!os) throw io_error("report: cannot write '" + name + "' in " + out_dir);
        written.push_back(name);
        return os;
    };

    if (format == "text") {
        auto os = open("report.txt");
        os << render_report_text(doc);
        return written;
    }
    if (format != "csv-bundle")
        throw configuration_error("report: unknown format '" + format + "'");

    {
        auto os = open("metadata.txt");
        os << "version: " << doc.version << '\n';
        os << "markets:";
        for (const auto& m : doc.markets) os << ' ' << m;
        os << '\n';
        os << "sample: " << doc.start_date << " .. " << doc.end_date << " ("
           << doc.observations << " observations)\n";
        os << "config: " << doc.config_echo << '\n';
        os << "selected_rank: " << doc.selected_rank << '\n';
        os << "used_rank: " << doc.used_rank << '\n';
        for (const auto& n : doc.notes) os << "note: " << n << '\n';
        if (!doc.vecm_dump.empty()) os << doc.vecm_dump;
    }
    if (doc.unit_root.present || doc.unit_root_diff.present) {
        auto os = open("t1_unit_root.csv");
        os << "variable,adf,adf_sig,adf_lags,adf_T,kpss,kpss_sig,kpss_bandwidth,kpss_T\n";
        auto rows = [&os](const Block<UnitRootRow>& b) {
            for (const auto& r : b.rows) {
                char buf[240];
                std::snprintf(buf, sizeof(buf), "%s,%.5f,%s,%d,%ld,%.5f,%s,%d,%ld\n",
                              r.variable.c_str(), r.adf, detail::stars(r.adf_reject_at).c_str(),
                              r.adf_lags, r.adf_T, r.kpss,
                              detail::stars(r.kpss_reject_at).c_str(), r.kpss_bandwidth,
                              r.kpss_T);
                os << buf;
            }
        };
        rows(doc.unit_root);
        rows(doc.unit_root_diff);
    }
    if (doc.gh.present) {
        auto os = open("t2_cointegration.csv");
        os << "statistic,model,value,sig,tau,break_index,break_date,lags_or_bandwidth,T_eff\n";
        for (const auto& r : doc.gh.rows) {
            char buf[240];
            std::snprintf(buf, sizeof(buf), "%s,%s,%.5f,%s,%.6f,%ld,%s,%d,%ld\n",
                          r.statistic.c_str(), r.model.c_str(), r.value,
                          detail::stars(r.reject_at).c_str(), r.tau, r.break_index,
                          r.break_date.c_str(), r.lags, r.effective_T);
            os << buf;
        }
    }
    if (doc.causality.present) {
        auto os = open("t3_causality.csv");
        write_causality_csv(doc.causality.rows, doc.markets, os);
    }
    if (doc.integration.present) {
        auto os = open("t4_integration.csv");
        os << "variable,coef_sum,chi2,pvalue,sig,beta,beta_se,beta_sig\n";
        for (const auto& r : doc.integration.rows) {
            char buf[240];
            if (r.has_beta) {
                std::snprintf(buf, sizeof(buf), "%s,%.5f,%.5f,%.6f,%s,%.5f,%.5f,%s\n",
                              r.variable.c_str(), r.coef_sum, r.sum_statistic, r.sum_pvalue,
                              detail::stars_from_pvalue(r.sum_pvalue).c_str(), r.beta, r.beta_se,
                              detail::stars(r.beta_reject_at).c_str());
            } else {
                std::snprintf(buf, sizeof(buf), "%s,%.5f,%.5f,%.6f,%s,,,\n", r.variable.c_str(),
                              r.coef_sum, r.sum_statistic, r.sum_pvalue,
                              detail::stars_from_pvalue(r.sum_pvalue).c_str());
            }
            os << buf;
        }
    }
    if (doc.bivariate.present) {
        auto os = open("t5_bivariate.csv");
        os << "variable1,variable2,chi2,pvalue,sig\n";
        for (const auto& r : doc.bivariate.rows) {
            char buf[200];
            std::snprintf(buf, sizeof(buf), "%s,%s,%.5f,%.6f,%s\n", r.var1.c_str(),
                          r.var2.c_str(), r.statistic, r.pvalue,
                          detail::stars_from_pvalue(r.pvalue).c_str());
            os << buf;
        }
    }
    return written;
}

} // namespace cointkit

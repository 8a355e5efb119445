// sim_json.hpp
// Declarative JSON documents for DgpSpec. Field names mirror the struct;
// unknown keys are a hard error so typos in experiment files cannot pass
// silently.

#pragma once

#include <json.hpp>
#include <set>
#include <string>

#include "cointkit/simulate.hpp"

namespace cointkit {

namespace detail {

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw configuration_error("dgp spec: " + what + " must be an array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols) throw configuration_error("dgp spec: ragged " + what);
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    return m;
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

} // namespace detail

inline DgpSpec dgp_spec_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known{
        "kind",   "dims",         "T",     "alpha",      "beta", "relation_intercept",
        "gamma",  "break_tau",    "shift_vector", "innovation_cov", "seed", "burn_in"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw configuration_error("dgp spec: unknown key '" + it.key() + "'");

    DgpSpec spec;
    const std::string kind = j.value("kind", "random_walk");
    if (kind == "random_walk")
        spec.kind = DgpKind::random_walk;
    else if (kind == "cointegrated_system")
        spec.kind = DgpKind::cointegrated_system;
    else if (kind == "break_shift")
        spec.kind = DgpKind::break_shift;
    else
        throw configuration_error("dgp spec: unknown kind '" + kind + "'");

    spec.dims = j.value("dims", 1);
    spec.T = j.value("T", 100L);
    spec.seed = j.value("seed", 0ULL);
    spec.burn_in = j.value("burn_in", -1L);
    spec.break_tau = j.value("break_tau", 0.4);
    if (j.contains("alpha")) spec.alpha = detail::matrix_from_json(j["alpha"], "alpha");
    if (j.contains("beta")) spec.beta = detail::matrix_from_json(j["beta"], "beta");
    if (j.contains("relation_intercept")) {
        const auto& arr = j["relation_intercept"];
        spec.relation_intercept.resize(static_cast<Eigen::Index>(arr.size()));
        for (std::size_t i = 0; i < arr.size(); ++i)
            spec.relation_intercept(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    if (j.contains("gamma"))
        for (const auto& g : j["gamma"])
            spec.gamma.push_back(detail::matrix_from_json(g, "gamma"));
    if (j.contains("shift_vector")) {
        const auto& arr = j["shift_vector"];
        if (arr.size() != 2) throw configuration_error("dgp spec: shift_vector needs 2 entries");
        spec.shift_vector = Eigen::Vector2d(arr[0].get<double>(), arr[1].get<double>());
    }
    if (j.contains("innovation_cov"))
        spec.innovation_cov = detail::matrix_from_json(j["innovation_cov"], "innovation_cov");
    return spec;
}

inline nlohmann::json dgp_spec_to_json(const DgpSpec& spec) {
    nlohmann::json j;
    j["kind"] = to_string(spec.kind);
    j["dims"] = spec.dims;
    j["T"] = spec.T;
    j["seed"] = spec.seed;
    j["burn_in"] = spec.burn_in;
    j["break_tau"] = spec.break_tau;
    if (spec.alpha.size() > 0) j["alpha"] = detail::matrix_to_json(spec.alpha);
    if (spec.beta.size() > 0) j["beta"] = detail::matrix_to_json(spec.beta);
    if (spec.relation_intercept.size() > 0) {
        nlohmann::json arr = nlohmann::json::array();
        for (Eigen::Index i = 0; i < spec.relation_intercept.size(); ++i)
            arr.push_back(spec.relation_intercept(i));
        j["relation_intercept"] = arr;
    }
    if (!spec.gamma.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& g : spec.gamma) arr.push_back(detail::matrix_to_json(g));
        j["gamma"] = arr;
    }
    if (spec.kind == DgpKind::break_shift)
        j["shift_vector"] = {spec.shift_vector(0), spec.shift_vector(1)};
    if (spec.innovation_cov.size() > 0)
        j["innovation_cov"] = detail::matrix_to_json(spec.innovation_cov);
    return j;
}

} // namespace cointkit

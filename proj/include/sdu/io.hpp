#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sdu/harness.hpp"
#include "sdu/instance.hpp"
#include "sdu/objective.hpp"

namespace sdu {

namespace detail {

inline nlohmann::json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("parse error in " + path.string() + ": " + e.what());
    }
    return j;
}

inline void write_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

template <typename T>
T get_field(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError(where + ": missing field \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(where + "." + key + ": wrong type");
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(where + "." + key + ": wrong type");
    }
}

}  // namespace detail

inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["cells"] = nlohmann::json::array();
    for (const Cell& cell : inst.cells) {
        nlohmann::json c = {{"id", cell.id}, {"x", cell.x},         {"y", cell.y},
                            {"mu", cell.mu}, {"sigma", cell.sigma}};
        if (!cell.samples.empty()) c["samples"] = cell.samples;
        j["cells"].push_back(std::move(c));
    }
    j["candidates"] = nlohmann::json::array();
    for (const Candidate& cand : inst.candidates) {
        nlohmann::json c = {{"id", cand.id},       {"x", cand.x},
                            {"y", cand.y},         {"kappa", cand.kappa},
                            {"gamma", cand.gamma}};
        if (!cand.samples.empty()) c["samples"] = cand.samples;
        j["candidates"].push_back(std::move(c));
    }
    nlohmann::json d = nlohmann::json::array();
    for (int i = 0; i < inst.n(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int s = 0; s < inst.m(); ++s) row.push_back(inst.d(i, s));
        d.push_back(std::move(row));
    }
    j["costs"] = {{"d", std::move(d)}};
    return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("instance: top-level JSON must be an object");
    std::vector<Cell> cells;
    if (!j.contains("cells") || !j.at("cells").is_array() || j.at("cells").empty())
        throw ValidationError("instance.cells: must be a nonempty array");
    const nlohmann::json& jc = j.at("cells");
    for (std::size_t i = 0; i < jc.size(); ++i) {
        const std::string where = "cells[" + std::to_string(i) + "]";
        const nlohmann::json& rec = jc.at(i);
        Cell cell;
        cell.id = detail::get_field<int>(rec, "id", where);
        cell.x = detail::get_field<double>(rec, "x", where);
        cell.y = detail::get_field<double>(rec, "y", where);
        cell.mu = detail::get_field<double>(rec, "mu", where);
        cell.sigma = detail::get_field<double>(rec, "sigma", where);
        cell.samples = detail::get_or<std::vector<double>>(rec, "samples", {}, where);
        cells.push_back(std::move(cell));
    }
    std::vector<Candidate> candidates;
    if (!j.contains("candidates") || !j.at("candidates").is_array() ||
        j.at("candidates").empty())
        throw ValidationError("instance.candidates: must be a nonempty array");
    const nlohmann::json& js = j.at("candidates");
    for (std::size_t s = 0; s < js.size(); ++s) {
        const std::string where = "candidates[" + std::to_string(s) + "]";
        const nlohmann::json& rec = js.at(s);
        Candidate cand;
        cand.id = detail::get_field<int>(rec, "id", where);
        cand.x = detail::get_field<double>(rec, "x", where);
        cand.y = detail::get_field<double>(rec, "y", where);
        cand.kappa = detail::get_field<double>(rec, "kappa", where);
        cand.gamma = detail::get_field<double>(rec, "gamma", where);
        cand.samples = detail::get_or<std::vector<double>>(rec, "samples", {}, where);
        candidates.push_back(std::move(cand));
    }
    if (j.contains("costs")) {
        const nlohmann::json& jd = j.at("costs");
        if (!jd.is_object() || !jd.contains("d"))
            throw ValidationError("instance.costs: must be an object with field \"d\"");
        CostMatrix costs;
        costs.n = static_cast<int>(cells.size());
        costs.m = static_cast<int>(candidates.size());
        const nlohmann::json& rows = jd.at("d");
        if (!rows.is_array() || rows.size() != cells.size())
            throw ValidationError("costs.d: expected " + std::to_string(cells.size()) +
                                  " rows");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const nlohmann::json& row = rows.at(i);
            if (!row.is_array() || row.size() != candidates.size())
                throw ValidationError("costs.d[" + std::to_string(i) + "]: expected " +
                                      std::to_string(candidates.size()) + " columns");
            for (std::size_t s = 0; s < row.size(); ++s) {
                if (!row.at(s).is_number())
                    throw ValidationError("costs.d[" + std::to_string(i) + "][" +
                                          std::to_string(s) + "]: must be a number");
                costs.d.push_back(row.at(s).get<double>());
            }
        }
        return Instance::create(std::move(cells), std::move(candidates), std::move(costs));
    }
    return Instance::create(std::move(cells), std::move(candidates));
}

inline void save_instance(const Instance& inst, const std::filesystem::path& path) {
    detail::write_file(path, instance_to_json(inst));
}

inline Instance load_instance(const std::filesystem::path& path) {
    return instance_from_json(detail::parse_file(path));
}

inline nlohmann::json deployment_to_json(const Deployment& dep) {
    return nlohmann::json{{"servers", dep.servers},
                          {"assignment", dep.assignment.server_of}};
}

inline Deployment deployment_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("deployment: top-level JSON must be an object");
    Deployment dep;
    dep.servers = detail::get_field<std::vector<int>>(j, "servers", "deployment");
    dep.assignment.server_of =
        detail::get_field<std::vector<int>>(j, "assignment", "deployment");
    return dep;
}

inline void save_deployment(const Deployment& dep, const std::filesystem::path& path) {
    detail::write_file(path, deployment_to_json(dep));
}

inline Deployment load_deployment(const std::filesystem::path& path) {
    return deployment_from_json(detail::parse_file(path));
}

inline nlohmann::json backtest_report_to_json(const BacktestReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const BacktestRow& row : report.rows)
        rows.push_back({{"algo", row.algo},
                        {"adjusted_pi", row.adjusted_pi},
                        {"mean_f", row.mean_f},
                        {"mean_g", row.mean_g},
                        {"period_f", row.period_f}});
    return nlohmann::json{
        {"lambda", report.lambda},
        {"norm", {{"a", report.norm.a}, {"b", report.norm.b}, {"n_random", report.norm.n_random}}},
        {"rows", std::move(rows)}};
}

inline BacktestReport backtest_report_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("report: top-level JSON must be an object");
    BacktestReport report;
    report.lambda = detail::get_field<double>(j, "lambda", "report");
    if (!j.contains("norm") || !j.at("norm").is_object())
        throw ValidationError("report.norm: must be an object");
    const nlohmann::json& norm = j.at("norm");
    report.norm.a = detail::get_field<double>(norm, "a", "report.norm");
    report.norm.b = detail::get_field<double>(norm, "b", "report.norm");
    report.norm.n_random = detail::get_field<int>(norm, "n_random", "report.norm");
    if (!j.contains("rows") || !j.at("rows").is_array())
        throw ValidationError("report.rows: must be an array");
    const nlohmann::json& rows = j.at("rows");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string where = "report.rows[" + std::to_string(r) + "]";
        const nlohmann::json& rec = rows.at(r);
        BacktestRow row;
        row.algo = detail::get_field<std::string>(rec, "algo", where);
        row.adjusted_pi = detail::get_field<double>(rec, "adjusted_pi", where);
        row.mean_f = detail::get_field<double>(rec, "mean_f", where);
        row.mean_g = detail::get_field<double>(rec, "mean_g", where);
        row.period_f = detail::get_or<std::vector<double>>(rec, "period_f", {}, where);
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline void save_backtest_report(const BacktestReport& report,
                                 const std::filesystem::path& path) {
    detail::write_file(path, backtest_report_to_json(report));
}

inline BacktestReport load_backtest_report(const std::filesystem::path& path) {
    return backtest_report_from_json(detail::parse_file(path));
}

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("sweep config: top-level JSON must be an object");
    SweepConfig config;
    config.n_cells = detail::get_or(j, "n_cells", config.n_cells, "sweep");
    config.grid_side = detail::get_or(j, "grid_side", config.grid_side, "sweep");
    config.t_periods = detail::get_or(j, "t_periods", config.t_periods, "sweep");
    config.k_list = detail::get_or(j, "k", config.k_list, "sweep");
    config.lambda_list = detail::get_or(j, "lambda", config.lambda_list, "sweep");
    config.kappa_list = detail::get_or(j, "kappa", config.kappa_list, "sweep");
    config.gamma_list = detail::get_or(j, "gamma", config.gamma_list, "sweep");
    config.seed_list = detail::get_or(j, "seeds", config.seed_list, "sweep");
    config.norm_samples = detail::get_or(j, "norm_samples", config.norm_samples, "sweep");
    config.threads = detail::get_or(j, "threads", config.threads, "sweep");
    config.validate();
    return config;
}

inline SweepConfig load_sweep_config(const std::filesystem::path& path) {
    return sweep_config_from_json(detail::parse_file(path));
}

}  // namespace sdu

#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eael/closed_form.hpp"
#include "eael/model.hpp"
#include "eael/simulate.hpp"

namespace eael {

/// Shortest decimal form that parses back to the identical double; never
/// locale-dependent.
inline std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline nlohmann::json model_to_json(const TransitionModel& m) {
    nlohmann::json j;
    const int L = m.dim();
    j["L"] = L;
    j["fitness"] = m.levels.fitness;
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < L; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int jj = 0; jj < L; ++jj) row.push_back(m.R(i, jj));
        rows.push_back(std::move(row));
    }
    j["R"] = std::move(rows);
    j["r"] = m.r;
    return j;
}

inline TransitionModel model_from_json(const nlohmann::json& j) {
    if (!j.contains("L") || !j.contains("fitness") || !j.contains("R") || !j.contains("r"))
        throw std::invalid_argument("model json: required fields are L, fitness, R, r");
    const int L = j.at("L").get<int>();
    if (L < 1) throw std::invalid_argument("model json: L must be >= 1");
    Vec fitness = j.at("fitness").get<Vec>();
    if (static_cast<int>(fitness.size()) != L + 1)
        throw std::invalid_argument("model json: fitness must list L+1 values, optimum first");
    TransitionModel m{make_levels(std::move(fitness)), Matrix(L, L), j.at("r").get<Vec>()};
    if (static_cast<int>(m.r.size()) != L)
        throw std::invalid_argument("model json: r must list L values");
    const auto& rows = j.at("R");
    if (!rows.is_array() || static_cast<int>(rows.size()) != L)
        throw std::invalid_argument("model json: R must be an LxL array of rows");
    for (int i = 0; i < L; ++i) {
        const auto& row = rows.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != L)
            throw std::invalid_argument("model json: R must be an LxL array of rows");
        for (int jj = 0; jj < L; ++jj) m.R(i, jj) = row.at(jj).get<double>();
    }
    return m;
}

inline void save_model_json(const TransitionModel& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << model_to_json(m).dump(2) << "\n";
}

inline TransitionModel load_model_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    is >> j;
    return model_from_json(j);
}

inline std::string trajectory_csv(const ErrorTrajectory& tr) {
    std::string out = "t,e_exact\n";
    for (std::size_t t = 0; t < tr.values.size(); ++t)
        out += std::to_string(t) + "," + fmt_double(tr.values[t]) + "\n";
    return out;
}

inline std::string empirical_csv(const EmpiricalTrajectory& emp) {
    std::string out = "t,e_mc,stderr\n";
    for (std::size_t t = 0; t < emp.mean_error.size(); ++t)
        out += std::to_string(t) + "," + fmt_double(emp.mean_error[t]) + "," +
               fmt_double(emp.std_error[t]) + "\n";
    return out;
}

inline std::string bound_csv(const Vec& values) {
    std::string out = "t,bound\n";
    for (std::size_t t = 0; t < values.size(); ++t)
        out += std::to_string(t) + "," + fmt_double(values[t]) + "\n";
    return out;
}

inline std::string terms_csv(const ClosedFormError& cf) {
    std::string out = "c,lambda,binom_degree,shift\n";
    for (const auto& t : cf.terms)
        out += fmt_double(t.c) + "," + fmt_double(t.lambda) + "," +
               std::to_string(t.binom_degree) + "," + std::to_string(t.shift) + "\n";
    return out;
}

/// Generic two-or-more-column numeric CSV with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    CsvTable tab;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(path + ": empty csv");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) tab.header.push_back(cell);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": non-numeric cell '" + cell + "'");
            }
        }
        if (row.size() != tab.header.size())
            throw std::runtime_error(path + ": ragged csv row");
        tab.rows.push_back(std::move(row));
    }
    return tab;
}

} // namespace eael

#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eael/bounds.hpp"
#include "eael/builders.hpp"
#include "eael/model.hpp"
#include "eael/model_io.hpp"
#include "eael/simulate.hpp"
#include "eael/spectral.hpp"

namespace eael::cli {

namespace detail {

inline void write_out(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    os << text;
}

inline Problem parse_problem(const std::string& s) {
    if (s == "onemax") return Problem::OneMax;
    if (s == "needle") return Problem::Needle;
    if (s == "leadingones") return Problem::LeadingOnes;
    if (s == "mono") return Problem::Mono;
    throw std::invalid_argument("unknown problem '" + s + "' (onemax|needle|leadingones|mono)");
}

inline Algo parse_algo(const std::string& s) {
    if (s == "obse") return Algo::OBSE;
    if (s == "bwse") return Algo::BWSE;
    if (s == "bwne") return Algo::BWNE;
    throw std::invalid_argument("unknown algorithm '" + s + "' (obse|bwse|bwne)");
}

inline std::function<double(int)> parse_mono_f(const std::string& s) {
    if (s == "identity") return mono_identity;
    if (s == "square") return mono_square;
    if (s == "log") return mono_log;
    throw std::invalid_argument("unknown mono transform '" + s + "' (identity|square|log)");
}

inline Distribution parse_model_init(const std::string& s, int L) {
    if (s == "worst") return init_worst(L);
    if (s == "uniform") return init_uniform(L);
    if (s.rfind("level:", 0) == 0) {
        const int k = std::stoi(s.substr(6));
        return init_level(L, k);
    }
    throw std::invalid_argument("unknown init '" + s + "' (worst|uniform|level:<k>)");
}

inline void parse_sim_init(const std::string& s, SimConfig& cfg) {
    if (s == "all-zeros") { cfg.init = SimInit::AllZeros; return; }
    if (s == "uniform") { cfg.init = SimInit::UniformRandom; return; }
    if (s.rfind("bits:", 0) == 0) {
        const std::string bits = s.substr(5);
        if (bits.empty() || bits.size() > 64)
            throw std::invalid_argument("bits: string must have 1..64 characters");
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') v |= 1ULL << i;
            else if (bits[i] != '0')
                throw std::invalid_argument("bits: string may contain only 0 and 1");
        }
        cfg.init = SimInit::FixedBitstring;
        cfg.fixed_bits = v;
        return;
    }
    throw std::invalid_argument("unknown init '" + s + "' (all-zeros|uniform|bits:<01-string>)");
}

inline std::vector<int> parse_ts(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

inline nlohmann::json trajectory_json(const ErrorTrajectory& tr) {
    nlohmann::json j;
    std::vector<int> ts(tr.values.size());
    for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = static_cast<int>(i);
    j["t"] = ts;
    j["e_exact"] = tr.values;
    return j;
}

inline nlohmann::json terms_json(const ClosedFormError& cf) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : cf.terms)
        arr.push_back({{"c", t.c},
                       {"lambda", t.lambda},
                       {"binom_degree", t.binom_degree},
                       {"shift", t.shift}});
    return arr;
}

inline Vec bound_values(const BoundExpression& b, double e0, int t_max) {
    Vec v(t_max + 1);
    for (int t = 0; t <= t_max; ++t) v[t] = b.value(e0, t);
    return v;
}

struct BoundOutput {
    Vec values;
    std::string summary;          // "rho=..." or terms csv
    nlohmann::json extra;         // json fields besides t/bound
};

inline void emit_bound(const BoundOutput& bo, const std::string& out, const std::string& format) {
    if (format == "json") {
        nlohmann::json j = bo.extra;
        std::vector<int> ts(bo.values.size());
        for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = static_cast<int>(i);
        j["t"] = ts;
        j["bound"] = bo.values;
        write_out(j.dump(2) + "\n", out);
        return;
    }
    write_out(bound_csv(bo.values), out);
    if (!bo.summary.empty()) {
        if (out.empty()) std::cout << bo.summary;
        else std::cout << bo.summary;
    }
}

} // namespace detail

/// Entry point shared by the binary and the tests. argv[0] is expected to
/// be the program name. Returns the process exit code: 0 success, 1 bad
/// input or infeasible request, 2 a comparison flagged discrepancies.
inline int run(const std::vector<std::string>& argv_in) {
    CLI::App app{"Exact error trajectories, convergence bounds, and Monte Carlo "
                 "checks for elitist (1+1) evolutionary algorithms on level chains"};
    app.require_subcommand(1);

    // ---- model ----
    auto* model_cmd = app.add_subcommand("model", "Build or inspect level-chain models");
    model_cmd->require_subcommand(1);
    auto* model_build = model_cmd->add_subcommand("build", "Construct a built-in model as JSON");
    std::string mb_problem, mb_algo = "obse", mb_mono = "identity", mb_out;
    int mb_n = 0;
    model_build->add_option("--problem", mb_problem)->required();
    model_build->add_option("--algo", mb_algo)->required();
    model_build->add_option("--n", mb_n)->required();
    model_build->add_option("--mono-f", mb_mono);
    model_build->add_option("--out", mb_out);

    // ---- exact ----
    auto* exact_cmd = app.add_subcommand("exact", "Exact per-generation error");
    exact_cmd->require_subcommand(1);
    auto* exact_traj = exact_cmd->add_subcommand("trajectory", "Iterate the chain");
    std::string et_model, et_init = "worst", et_out, et_format = "csv";
    int et_tmax = 100;
    exact_traj->add_option("--model", et_model)->required();
    exact_traj->add_option("--init", et_init);
    exact_traj->add_option("--t-max", et_tmax);
    exact_traj->add_option("--out", et_out);
    exact_traj->add_option("--format", et_format)->check(CLI::IsMember({"csv", "json"}));

    auto* exact_cf = exact_cmd->add_subcommand("closed-form", "Spectral closed form");
    std::string ec_model, ec_init = "worst", ec_method = "auto", ec_out, ec_format = "csv";
    exact_cf->add_option("--model", ec_model)->required();
    exact_cf->add_option("--init", ec_init);
    exact_cf->add_option("--method", ec_method)
        ->check(CLI::IsMember({"auto", "diagonal", "symmetric", "power-factors"}));
    exact_cf->add_option("--out", ec_out);
    exact_cf->add_option("--format", ec_format)->check(CLI::IsMember({"csv", "json"}));

    // ---- bound ----
    auto* bound_cmd = app.add_subcommand("bound", "Upper bounds on the error trajectory");
    bound_cmd->require_subcommand(1);

    auto* b_rate = bound_cmd->add_subcommand("rate", "Worst-ratio geometric bound");
    std::string br_model, br_init = "worst", br_out, br_format = "csv";
    int br_tmax = 100;
    bool br_trivial = false;
    b_rate->add_option("--model", br_model)->required();
    b_rate->add_option("--init", br_init);
    b_rate->add_option("--t-max", br_tmax);
    b_rate->add_option("--out", br_out);
    b_rate->add_option("--format", br_format)->check(CLI::IsMember({"csv", "json"}));
    b_rate->add_flag("--allow-trivial", br_trivial,
                     "Fall back to the flat max-error bound on plateau levels");

    auto* b_aux = bound_cmd->add_subcommand("auxiliary", "Bound through a slower bidiagonal chain");
    std::string ba_model, ba_choice = "maximal", ba_init = "worst", ba_out, ba_format = "csv";
    int ba_tmax = 100;
    b_aux->add_option("--model", ba_model)->required();
    b_aux->add_option("--choice", ba_choice)->check(CLI::IsMember({"maximal", "paper-bwse"}));
    b_aux->add_option("--init", ba_init);
    b_aux->add_option("--t-max", ba_tmax);
    b_aux->add_option("--out", ba_out);
    b_aux->add_option("--format", ba_format)->check(CLI::IsMember({"csv", "json"}));

    auto* b_pf = bound_cmd->add_subcommand("power-factor", "Level-resolved spectral bound");
    std::string bp_model, bp_init = "worst", bp_choice = "maximal", bp_out, bp_format = "csv";
    int bp_tmax = 100;
    double bp_eps = -1.0;
    b_pf->add_option("--model", bp_model)->required();
    b_pf->add_option("--init", bp_init);
    b_pf->add_option("--choice", bp_choice)->check(CLI::IsMember({"maximal", "paper-bwse"}));
    b_pf->add_option("--epsilon", bp_eps, "Diagonal separation for tied rates");
    b_pf->add_option("--t-max", bp_tmax);
    b_pf->add_option("--out", bp_out);
    b_pf->add_option("--format", bp_format)->check(CLI::IsMember({"csv", "json"}));

    auto* b_an = bound_cmd->add_subcommand("rate-analytic", "Problem-specific analytic rate");
    std::string an_problem, an_algo = "bwse", an_out, an_format = "csv";
    int an_n = 0, an_tmax = 100;
    b_an->add_option("--problem", an_problem)->required();
    b_an->add_option("--algo", an_algo);
    b_an->add_option("--n", an_n)->required();
    b_an->add_option("--t-max", an_tmax);
    b_an->add_option("--out", an_out);
    b_an->add_option("--format", an_format)->check(CLI::IsMember({"csv", "json"}));

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo runs of the actual EA");
    std::string sm_problem, sm_algo, sm_mono = "identity", sm_init = "all-zeros", sm_out,
                sm_format = "csv";
    int sm_n = 0, sm_tmax = 100;
    long sm_runs = 10000;
    std::uint64_t sm_seed = 12345;
    sim_cmd->add_option("--problem", sm_problem)->required();
    sim_cmd->add_option("--algo", sm_algo)->required();
    sim_cmd->add_option("--n", sm_n)->required();
    sim_cmd->add_option("--mono-f", sm_mono);
    sim_cmd->add_option("--runs", sm_runs);
    sim_cmd->add_option("--t-max", sm_tmax);
    sim_cmd->add_option("--seed", sm_seed);
    sim_cmd->add_option("--init", sm_init);
    sim_cmd->add_option("--out", sm_out);
    sim_cmd->add_option("--format", sm_format)->check(CLI::IsMember({"csv", "json"}));

    // ---- compare ----
    auto* cmp_cmd = app.add_subcommand("compare", "Check empirical means against a reference");
    std::string cp_ref, cp_emp, cp_mode, cp_ts, cp_out, cp_format = "csv";
    cmp_cmd->add_option("--reference", cp_ref)->required();
    cmp_cmd->add_option("--empirical", cp_emp)->required();
    cmp_cmd->add_option("--mode", cp_mode)->required()->check(CLI::IsMember({"exact", "bound"}));
    cmp_cmd->add_option("--ts", cp_ts, "Comma-separated generations to sample (default: all)");
    cmp_cmd->add_option("--out", cp_out);
    cmp_cmd->add_option("--format", cp_format)->check(CLI::IsMember({"csv", "json"}));

    // ---- report ----
    auto* rep_cmd = app.add_subcommand("report", "Prebuilt summaries");
    rep_cmd->require_subcommand(1);
    auto* rep_t1 = rep_cmd->add_subcommand(
        "table1", "Normalized closed-form coefficients for three fitness shapes, n=4");
    std::string r1_out, r1_format = "csv";
    rep_t1->add_option("--out", r1_out);
    rep_t1->add_option("--format", r1_format)->check(CLI::IsMember({"csv", "json"}));

    std::vector<const char*> argv;
    argv.reserve(argv_in.size());
    for (const auto& s : argv_in) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's many parse-error codes onto the documented
        // contract: 0 success (covers --help), 1 unusable input.
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*model_build) {
            ProblemSpec spec{detail::parse_problem(mb_problem), detail::parse_algo(mb_algo), mb_n,
                             detail::parse_mono_f(mb_mono)};
            const TransitionModel m = build_model(spec);
            const auto report = validate_model(m);
            if (!report.empty()) {
                for (const auto& line : report) std::cerr << "invalid model: " << line << "\n";
                return 1;
            }
            if (mb_out.empty()) std::cout << model_to_json(m).dump(2) << "\n";
            else save_model_json(m, mb_out);
            return 0;
        }

        if (*exact_traj) {
            const TransitionModel m = load_model_json(et_model);
            const Distribution p0 = detail::parse_model_init(et_init, m.dim());
            const ErrorTrajectory tr = exact_trajectory(m, p0, et_tmax);
            if (et_format == "json") detail::write_out(detail::trajectory_json(tr).dump(2) + "\n", et_out);
            else detail::write_out(trajectory_csv(tr), et_out);
            return 0;
        }

        if (*exact_cf) {
            const TransitionModel m = load_model_json(ec_model);
            const Distribution p0 = detail::parse_model_init(ec_init, m.dim());
            ClosedFormError cf;
            if (ec_method == "power-factors") {
                cf = triangular_closed_form(m, p0);
            } else if (ec_method == "diagonal") {
                if (!is_diagonal(m.R)) throw std::invalid_argument("model matrix is not diagonal");
                cf = diagonalizable_closed_form(m, p0);
            } else if (ec_method == "symmetric") {
                if (!is_symmetric(m.R)) throw std::invalid_argument("model matrix is not symmetric");
                cf = diagonalizable_closed_form(m, p0);
            } else {  // auto
                if (is_diagonal(m.R) || is_symmetric(m.R)) cf = diagonalizable_closed_form(m, p0);
                else if (is_upper_triangular(m.R)) cf = triangular_closed_form(m, p0);
                else
                    throw std::invalid_argument(
                        "model matrix is neither diagonal, symmetric, nor upper triangular; "
                        "no closed form available");
            }
            if (ec_format == "json") {
                nlohmann::json j;
                j["terms"] = detail::terms_json(cf);
                j["formula"] = render_formula(cf);
                detail::write_out(j.dump(2) + "\n", ec_out);
            } else {
                detail::write_out(terms_csv(cf) + "formula=" + render_formula(cf) + "\n", ec_out);
            }
            return 0;
        }

        if (*b_rate) {
            const TransitionModel m = load_model_json(br_model);
            const Distribution p0 = detail::parse_model_init(br_init, m.dim());
            const double e0 = initial_error(m, p0);
            detail::BoundOutput bo;
            try {
                const BoundExpression b = rate_bound(m);
                bo.values = detail::bound_values(b, e0, br_tmax);
                bo.summary = "rho=" + fmt_double(b.rate) + "\n";
                bo.extra["rho"] = b.rate;
                bo.extra["provenance"] = "rate";
            } catch (const std::invalid_argument&) {
                if (!br_trivial) throw;
                const double flat = trivial_error_bound(m);
                bo.values.assign(br_tmax + 1, flat);
                bo.summary = "rho=1 (flat fallback at max level error)\n";
                bo.extra["rho"] = 1.0;
                bo.extra["provenance"] = "trivial-max";
            }
            detail::emit_bound(bo, br_out, br_format);
            return 0;
        }

        if (*b_aux) {
            const TransitionModel m = load_model_json(ba_model);
            const Distribution p0 = detail::parse_model_init(ba_init, m.dim());
            TransitionModel aux =
                (ba_choice == "paper-bwse")
                    ? [&] { const Vec up = bwse_onestep_up_probs(m); return build_bidiagonal_auxiliary(m, &up); }()
                    : build_bidiagonal_auxiliary(m);
            const BoundExpression b = auxiliary_rate_bound(m, aux);
            detail::BoundOutput bo;
            bo.values = detail::bound_values(b, initial_error(m, p0), ba_tmax);
            bo.summary = "rho=" + fmt_double(b.rate) + "\n";
            bo.extra["rho"] = b.rate;
            bo.extra["provenance"] = "auxiliary-rate";
            detail::emit_bound(bo, ba_out, ba_format);
            return 0;
        }

        if (*b_pf) {
            const TransitionModel m = load_model_json(bp_model);
            const Distribution p0 = detail::parse_model_init(bp_init, m.dim());
            TransitionModel aux =
                (bp_choice == "paper-bwse")
                    ? [&] { const Vec up = bwse_onestep_up_probs(m); return build_bidiagonal_auxiliary(m, &up); }()
                    : build_bidiagonal_auxiliary(m);
            const ClosedFormError cf = power_factor_bound(m, aux, p0, bp_eps);
            detail::BoundOutput bo;
            bo.values.resize(bp_tmax + 1);
            for (int t = 0; t <= bp_tmax; ++t) bo.values[t] = evaluate_closed_form(cf, t);
            bo.summary = terms_csv(cf);
            bo.extra["terms"] = detail::terms_json(cf);
            detail::emit_bound(bo, bp_out, bp_format);
            return 0;
        }

        if (*b_an) {
            const Problem prob = detail::parse_problem(an_problem);
            const BoundExpression b = analytic_rate_bound(prob, detail::parse_algo(an_algo), an_n);
            // worst start: every bit wrong, so the initial error equals n
            const double e0 = static_cast<double>(an_n);
            detail::BoundOutput bo;
            bo.values = detail::bound_values(b, e0, an_tmax);
            bo.summary = "rho=" + fmt_double(b.rate) + "\n";
            bo.extra["rho"] = b.rate;
            bo.extra["provenance"] = "analytic";
            detail::emit_bound(bo, an_out, an_format);
            return 0;
        }

        if (*sim_cmd) {
            SimConfig cfg;
            cfg.spec = ProblemSpec{detail::parse_problem(sm_problem), detail::parse_algo(sm_algo),
                                   sm_n, detail::parse_mono_f(sm_mono)};
            cfg.runs = sm_runs;
            cfg.t_max = sm_tmax;
            cfg.seed = sm_seed;
            detail::parse_sim_init(sm_init, cfg);
            const EmpiricalTrajectory emp = simulate(cfg);
            if (sm_format == "json") {
                nlohmann::json j;
                std::vector<int> ts(emp.mean_error.size());
                for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = static_cast<int>(i);
                j["t"] = ts;
                j["e_mc"] = emp.mean_error;
                j["stderr"] = emp.std_error;
                j["runs"] = emp.runs;
                detail::write_out(j.dump(2) + "\n", sm_out);
            } else {
                detail::write_out(empirical_csv(emp), sm_out);
            }
            return 0;
        }

        if (*cmp_cmd) {
            const CsvTable ref = read_csv(cp_ref);
            const CsvTable emp = read_csv(cp_emp);
            if (ref.header.size() < 2) throw std::runtime_error("reference csv needs t,value columns");
            if (emp.header.size() < 3) throw std::runtime_error("empirical csv needs t,e_mc,stderr");
            int max_t = -1;
            for (const auto& row : ref.rows) max_t = std::max(max_t, static_cast<int>(row[0]));
            Vec reference(max_t + 1, std::numeric_limits<double>::quiet_NaN());
            for (const auto& row : ref.rows) reference[static_cast<int>(row[0])] = row[1];
            EmpiricalTrajectory et;
            int emax = -1;
            for (const auto& row : emp.rows) emax = std::max(emax, static_cast<int>(row[0]));
            et.mean_error.assign(emax + 1, 0.0);
            et.std_error.assign(emax + 1, 0.0);
            for (const auto& row : emp.rows) {
                et.mean_error[static_cast<int>(row[0])] = row[1];
                et.std_error[static_cast<int>(row[0])] = row[2];
            }
            std::vector<int> ts;
            if (!cp_ts.empty()) ts = detail::parse_ts(cp_ts);
            else {
                for (int t = 0; t <= std::min(max_t, emax); ++t)
                    if (!std::isnan(reference[t])) ts.push_back(t);
            }
            const CompareMode mode = (cp_mode == "exact") ? CompareMode::Exact : CompareMode::Bound;
            const ComparisonReport rep = compare_trajectories(reference, et, ts, mode);
            if (cp_format == "json") {
                nlohmann::json rows = nlohmann::json::array();
                for (const auto& en : rep.entries)
                    rows.push_back({{"t", en.t},
                                    {"reference", en.reference},
                                    {"e_mc", en.mean},
                                    {"stderr", en.std_error},
                                    {"z", en.std_error > 0 ? en.z : 0.0},
                                    {"flagged", en.flagged}});
                nlohmann::json j{{"entries", rows}, {"max_abs_z", rep.max_abs_z},
                                 {"any_flag", rep.any_flag}};
                detail::write_out(j.dump(2) + "\n", cp_out);
            } else {
                std::string out = "t,reference,e_mc,stderr,z,flag\n";
                for (const auto& en : rep.entries)
                    out += std::to_string(en.t) + "," + fmt_double(en.reference) + "," +
                           fmt_double(en.mean) + "," + fmt_double(en.std_error) + "," +
                           fmt_double(en.z) + "," + (en.flagged ? "1" : "0") + "\n";
                detail::write_out(out, cp_out);
            }
            return rep.any_flag ? 2 : 0;
        }

        if (*rep_t1) {
            struct Row { std::string name; std::function<double(int)> f; };
            const std::vector<Row> shapes{{"identity", mono_identity},
                                          {"square", mono_square},
                                          {"log", mono_log}};
            const int n = 4;
            std::string csv = "function,c_over_fopt,lambda,binom_degree,shift\n";
            nlohmann::json jrows = nlohmann::json::array();
            for (const auto& shape : shapes) {
                const TransitionModel m = build_mono_obse(n, shape.f);
                const ClosedFormError cf = triangular_closed_form(m, init_worst(n));
                const double f_opt = m.levels.f_opt();
                for (const auto& term : cf.terms) {
                    csv += shape.name + "," + fmt_double(term.c / f_opt) + "," +
                           fmt_double(term.lambda) + "," + std::to_string(term.binom_degree) +
                           "," + std::to_string(term.shift) + "\n";
                    jrows.push_back({{"function", shape.name},
                                     {"c_over_fopt", term.c / f_opt},
                                     {"lambda", term.lambda},
                                     {"binom_degree", term.binom_degree},
                                     {"shift", term.shift}});
                }
            }
            if (r1_format == "json") detail::write_out(nlohmann::json{{"rows", jrows}}.dump(2) + "\n", r1_out);
            else detail::write_out(csv, r1_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand selected\n";
    return 1;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args);
}

} // namespace eael::cli

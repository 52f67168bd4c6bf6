// Command-line front end: problem solving, hypothesis audits, and the
// fractional-operator utility. Exit codes: 0 success/converged,
// 2 hypothesis violation, 3 non-convergence, 4 parse/validation/IO error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fhde/fhde.hpp"

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("FHDE_LOG");
    if (env == nullptr) return LogLevel::info;
    const std::string v(env);
    if (v == "quiet") return LogLevel::quiet;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::info;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[fhde] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) std::cerr << "[fhde:debug] " << msg << "\n";
}

struct Overrides {
    std::optional<double> alpha, beta, tol;
    std::optional<int> grid_n, max_iter;
    std::optional<std::string> mode;
    bool strict = false;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--alpha", ov.alpha, "Override derivative order (0, 1)");
    cmd->add_option("--beta", ov.beta, "Override integral order (> 0)");
    cmd->add_option("--grid-n", ov.grid_n, "Override number of subintervals");
    cmd->add_option("--tol", ov.tol, "Override stopping tolerance");
    cmd->add_option("--max-iter", ov.max_iter, "Override iteration cap");
    cmd->add_option("--mode", ov.mode, "Inner solve mode: picard | rootfind")
        ->check(CLI::IsMember({"picard", "rootfind"}));
    cmd->add_flag("--strict", ov.strict, "Abort on hypothesis violations before solving");
}

fhde::SolveMode apply_overrides(fhde::ProblemFile& pf, const Overrides& ov) {
    if (ov.alpha) pf.spec.alpha = *ov.alpha;
    if (ov.beta) pf.spec.beta = *ov.beta;
    if (ov.grid_n) pf.spec.grid_n = *ov.grid_n;
    if (ov.tol) pf.spec.tol = *ov.tol;
    if (ov.max_iter) pf.spec.max_iter = *ov.max_iter;
    if (ov.mode) pf.mode = (*ov.mode == "picard") ? fhde::SolveMode::picard
                                                  : fhde::SolveMode::rootfind;
    fhde::validate_problem(pf.spec);
    return pf.mode;
}

int status_exit_code(fhde::SolveStatus s) {
    switch (s) {
        case fhde::SolveStatus::converged: return 0;
        case fhde::SolveStatus::hypothesis_violation: return 2;
        case fhde::SolveStatus::max_iter_exceeded: return 3;
    }
    return 4;
}

int run_solve(const std::string& problem_path, const std::string& out_csv,
              const std::string& out_report, const Overrides& ov) {
    auto pf = fhde::load_problem_file(problem_path);
    fhde::SolverOptions opt;
    opt.mode = apply_overrides(pf, ov);
    opt.strict = ov.strict;

    log_info("solving '" + pf.spec.name + "' (n=" + std::to_string(pf.spec.grid_n) +
             ", mode=" + fhde::to_string(opt.mode) + ")");

    const auto start = std::chrono::steady_clock::now();
    const fhde::SolveReport rep = fhde::outer_solve(pf.spec, opt);
    const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();

    for (size_t k = 0; k < rep.inner_traces.size(); ++k)
        log_debug("outer sweep " + std::to_string(k + 1) + ": inner steps " +
                  std::to_string(rep.inner_traces[k].steps));

    const bool solved = rep.status != fhde::SolveStatus::hypothesis_violation || !opt.strict;
    std::string solution_file;
    if (solved) {
        std::ofstream csv(out_csv, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write '" + out_csv + "'");
        fhde::write_solution_csv(csv, rep.solution);
        solution_file = out_csv;
    }

    std::ofstream rj(out_report, std::ios::binary);
    if (!rj) throw std::runtime_error("cannot write '" + out_report + "'");
    rj << fhde::run_report_json(pf.spec, opt, rep, solution_file, wall_ms).dump(2) << "\n";

    char residual_str[32];
    std::snprintf(residual_str, sizeof(residual_str), "%.3e", rep.residual);
    log_info("status " + std::string(fhde::to_string(rep.status)) + ", residual " +
             residual_str + ", outer iterations " + std::to_string(rep.iterations_outer));
    return status_exit_code(rep.status);
}

int run_check(const std::string& problem_path, const Overrides& ov) {
    auto pf = fhde::load_problem_file(problem_path);
    apply_overrides(pf, ov);
    const auto rep = fhde::check_hypotheses(pf.spec);
    std::cout << fhde::format_hypothesis_text(pf.spec.name, rep);
    return rep.all_pass() ? 0 : 2;
}

int run_frac(const std::string& expr_src, const std::string& op, double alpha, double t0,
             double a, int n, const std::string& out_csv) {
    const fhde::Expr e = fhde::parse(expr_src);
    const fhde::VarSet vars = fhde::variables_used(e);
    if (vars.x || vars.y)
        throw std::invalid_argument("frac: expression may only use variable t");

    const fhde::Grid grid(t0, a, n);
    const auto u = fhde::GridFunction::sample(grid, [&](double t) {
        return fhde::eval(e, t, 0.0, 0.0);
    });
    const fhde::GridFunction result = op == "integral"
                                          ? fhde::rl_integral(u, fhde::FracOrder{alpha})
                                          : fhde::rl_derivative(u, fhde::FracOrder{alpha});

    std::ofstream csv(out_csv, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write '" + out_csv + "'");
    fhde::write_value_csv(csv, result);
    log_info("wrote " + out_csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver and verification laboratory for hybrid initial value problems\n"
                 "D^alpha[x - f(t,x)] = g(t, x, I^beta x) with x(t0) = x0"};
    app.require_subcommand(1);

    std::string problem_path, out_csv = "solution.csv", out_report = "report.json";
    Overrides ov;

    auto* solve = app.add_subcommand("solve", "Solve a problem file and emit CSV + report");
    solve->add_option("problem", problem_path, "Problem file")->required();
    solve->add_option("-o,--out-csv", out_csv, "Solution CSV path");
    solve->add_option("-r,--out-report", out_report, "Run report JSON path");
    add_override_flags(solve, ov);

    auto* check = app.add_subcommand("check", "Audit the solvability hypotheses");
    check->add_option("problem", problem_path, "Problem file")->required();
    add_override_flags(check, ov);

    std::string frac_expr, frac_op;
    double frac_alpha = 0.5, frac_t0 = 0.0, frac_a = 1.0;
    int frac_n = 2000;
    auto* frac = app.add_subcommand("frac", "Apply a fractional operator to an expression in t");
    frac->add_option("--expr", frac_expr, "Expression over t")->required();
    frac->add_option("--op", frac_op, "integral | derivative")
        ->required()
        ->check(CLI::IsMember({"integral", "derivative"}));
    frac->add_option("--alpha", frac_alpha, "Operator order");
    frac->add_option("--t0", frac_t0, "Interval start");
    frac->add_option("--a", frac_a, "Interval length");
    frac->add_option("--n", frac_n, "Number of subintervals");
    frac->add_option("-o,--out-csv", out_csv, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 4;
    }

    try {
        if (solve->parsed()) return run_solve(problem_path, out_csv, out_report, ov);
        if (check->parsed()) return run_check(problem_path, ov);
        if (frac->parsed())
            return run_frac(frac_expr, frac_op, frac_alpha, frac_t0, frac_a, frac_n, out_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 4;
}

#pragma once

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "fhde/grid.hpp"
#include "fhde/problem.hpp"
#include "fhde/solver.hpp"

namespace fhde {

namespace detail {

/// 17 significant digits, '.' decimal separator regardless of locale.
inline std::string format_sig17(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// Solution CSV: header "t,x", one row per node, 17 significant digits,
/// newline-terminated rows. Byte-identical across runs on identical inputs.
inline void write_solution_csv(std::ostream& os, const GridFunction& u) {
    os << "t,x\n";
    for (int i = 0; i < u.size(); ++i)
        os << detail::format_sig17(u.grid().node(i)) << ',' << detail::format_sig17(u[i])
           << '\n';
}

/// Value CSV for the fractional-operator utility: header "t,value".
inline void write_value_csv(std::ostream& os, const GridFunction& u) {
    os << "t,value\n";
    for (int i = 0; i < u.size(); ++i)
        os << detail::format_sig17(u.grid().node(i)) << ',' << detail::format_sig17(u[i])
           << '\n';
}

/// Reads a two-column CSV (with header) back into node/value vectors.
struct CsvColumns {
    std::vector<double> t;
    std::vector<double> value;
};

inline CsvColumns read_csv_columns(std::istream& is) {
    CsvColumns out;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: missing header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("csv: malformed row");
        double tv = 0.0, xv = 0.0;
        auto r1 = std::from_chars(line.data(), line.data() + comma, tv);
        auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), xv);
        if (r1.ec != std::errc() || r2.ec != std::errc())
            throw std::runtime_error("csv: malformed number in row");
        out.t.push_back(tv);
        out.value.push_back(xv);
    }
    return out;
}

inline nlohmann::json witness_to_json(const Witness& w) {
    nlohmann::json j;
    j["t"] = w.t;
    j["x"] = w.x;
    if (w.x2) j["x2"] = *w.x2;
    if (w.y) j["y"] = *w.y;
    return j;
}

inline nlohmann::json check_to_json(const HypothesisCheck& c) {
    nlohmann::json j;
    j["verdict"] = to_string(c.verdict);
    j["margin"] = c.margin;
    j["witness"] = witness_to_json(c.witness);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline nlohmann::json hypotheses_to_json(const HypothesisReport& h) {
    nlohmann::json j;
    j["strictly_increasing"] = check_to_json(h.strictly_increasing);
    j["arctan_contraction"] = check_to_json(h.arctan_contraction);
    j["offset_nonnegative"] = check_to_json(h.offset_nonnegative);
    j["source_bounded"] = check_to_json(h.source_bounded);
    j["f_nondecreasing_in_x"] = check_to_json(h.f_nondecreasing_in_x);
    return j;
}

/// Machine-readable run report. Everything except wall_time_ms is a pure
/// function of the inputs.
inline nlohmann::json run_report_json(const ProblemSpec& p, const SolverOptions& opt,
                                      const SolveReport& rep, const std::string& solution_file,
                                      long long wall_time_ms) {
    nlohmann::json j;
    j["name"] = p.name;
    j["status"] = to_string(rep.status);
    j["residual"] = rep.residual;
    j["iterations_outer"] = rep.iterations_outer;
    nlohmann::json inner = nlohmann::json::array();
    for (const auto& tr : rep.inner_traces) inner.push_back(tr.steps);
    j["inner_iterations"] = inner;
    j["M"] = rep.bounds.M;
    j["L"] = rep.bounds.L;
    j["h_norm"] = rep.bounds.h_norm;
    j["hypotheses"] = hypotheses_to_json(rep.hypothesis);
    j["solution_file"] = solution_file;
    j["wall_time_ms"] = wall_time_ms;
    j["parameters"] = {
        {"t0", p.t0},         {"a", p.a},
        {"x0", p.x0},         {"alpha", p.alpha},
        {"beta", p.beta},     {"grid_n", p.grid_n},
        {"tol", p.tol},       {"max_iter", p.max_iter},
        {"mode", to_string(opt.mode)},
        {"strict", opt.strict},
        {"f", to_string(p.f)}, {"g", to_string(p.g)}, {"h", to_string(p.h)},
    };
    return j;
}

inline void format_check_line(std::ostream& os, const char* label, const HypothesisCheck& c) {
    os << "  " << label << ": " << to_string(c.verdict) << "  margin=" << c.margin
       << "  at (t=" << c.witness.t << ", x=" << c.witness.x;
    if (c.witness.x2) os << ", x'=" << *c.witness.x2;
    if (c.witness.y) os << ", y=" << *c.witness.y;
    os << ")\n";
}

/// Human-readable audit summary for the check subcommand.
inline std::string format_hypothesis_text(const std::string& name, const HypothesisReport& h) {
    std::ostringstream os;
    os << "hypothesis audit: " << name << "\n";
    format_check_line(os, "strictly_increasing  ", h.strictly_increasing);
    format_check_line(os, "arctan_contraction   ", h.arctan_contraction);
    format_check_line(os, "offset_nonnegative   ", h.offset_nonnegative);
    format_check_line(os, "source_bounded       ", h.source_bounded);
    format_check_line(os, "f_nondecreasing_in_x ", h.f_nondecreasing_in_x);
    os << "result: " << (h.all_pass() ? "pass" : "fail") << "\n";
    return os.str();
}

}  // namespace fhde

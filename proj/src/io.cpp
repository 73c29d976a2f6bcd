#include "mvu/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace mvu {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

[[noreturn]] void bad_csv(const std::string& msg) {
  throw ValidationError(ErrorCode::invalid_argument, "csv: " + msg);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s) {
  if (s.empty() || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') bad_csv("not a number: '" + s + "'");
  return v;
}

bool parse_flag(const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  bad_csv("expected 0 or 1, got '" + s + "'");
}

// Reads the header and returns the data rows split into fields.
std::vector<std::vector<std::string>> read_table(std::istream& in, const char* header,
                                                 std::size_t columns) {
  std::string line;
  if (!std::getline(in, line) || line != header) bad_csv("unexpected header '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != columns) bad_csv("wrong field count in '" + line + "'");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

void write_solution_csv(std::ostream& out, const EquilibriumSolution& sol) {
  const auto& e = sol.exposure;
  const auto& p = sol.policy;
  out << kSolutionHeader << '\n';
  for (std::size_t i = 0; i < e.grid.size(); ++i) {
    out << format_double(e.grid.node(i)) << ',' << format_double(e.pi_tilde[i]) << ','
        << format_double(e.a[i]) << ',' << format_double(e.f[i]) << ',' << format_double(p.m[i])
        << ',' << format_double(p.c_star[i]) << ',' << format_double(p.K[i]) << ','
        << (p.clamped[i] ? 1 : 0) << '\n';
  }
}

std::vector<SolutionRow> read_solution_csv(std::istream& in) {
  std::vector<SolutionRow> out;
  for (const auto& f : read_table(in, kSolutionHeader, 8)) {
    out.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                   parse_double(f[4]), parse_double(f[5]), parse_double(f[6]), parse_flag(f[7])});
  }
  return out;
}

void write_report_csv(std::ostream& out, const EquilibriumReport& report) {
  out << kReportHeader << '\n';
  for (const GapCell& c : report.cells) {
    const GapEstimate& g = c.estimate;
    out << format_double(g.point.t) << ',' << format_double(g.point.x) << ','
        << format_double(g.perturbation.c_pert) << ',' << format_double(g.perturbation.pi_pert)
        << ',' << format_double(g.h) << ',' << format_double(g.gap) << ','
        << format_double(g.se) << ',' << (c.pass ? 1 : 0) << '\n';
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::vector<ReportRow> out;
  for (const auto& f : read_table(in, kReportHeader, 8)) {
    out.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                   parse_double(f[4]), parse_double(f[5]), parse_double(f[6]), parse_flag(f[7])});
  }
  return out;
}

void write_paths_csv(std::ostream& out, const PathEnsemble& ensemble) {
  out << kPathsHeader << '\n';
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    out << i << ',' << format_double(ensemble.terminal_wealth[i]) << ','
        << format_double(ensemble.utility_integral[i]) << '\n';
  }
}

std::vector<PathRow> read_paths_csv(std::istream& in) {
  std::vector<PathRow> out;
  for (const auto& f : read_table(in, kPathsHeader, 3)) {
    out.push_back({static_cast<std::size_t>(std::stoull(f[0])), parse_double(f[1]),
                   parse_double(f[2])});
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.param << ',' << format_double(r.value) << ',' << format_double(r.t) << ','
        << format_double(r.pi_tilde) << ',' << format_double(r.c_star) << ','
        << format_double(r.K) << ',' << r.status << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::vector<SweepRow> out;
  for (const auto& f : read_table(in, kSweepHeader, 7)) {
    out.push_back({f[0], parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                   parse_double(f[4]), parse_double(f[5]), f[6]});
  }
  return out;
}

}  // namespace mvu

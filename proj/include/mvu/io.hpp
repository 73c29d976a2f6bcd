#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mvu/mc_engine.hpp"
#include "mvu/solver.hpp"
#include "mvu/verifier.hpp"

namespace mvu {

/// 17 significant digits, '.' decimal point; round-trips every double.
std::string format_double(double v);

inline constexpr const char* kSolutionHeader = "t,pi_tilde,a,f,m,c_star,K,clamped";
inline constexpr const char* kReportHeader = "t,x,c_pert,pi_pert,h,gap,se,pass";
inline constexpr const char* kPathsHeader = "path_id,X_T,utility_integral";
inline constexpr const char* kSweepHeader = "param,value,t,pi_tilde,c_star,K,status";

struct SolutionRow {
  double t, pi_tilde, a, f, m, c_star, K;
  bool clamped;
};

struct ReportRow {
  double t, x, c_pert, pi_pert, h, gap, se;
  bool pass;
};

struct PathRow {
  std::size_t path_id;
  double terminal_wealth, utility_integral;
};

/// Failed sweep values carry NaN in the numeric columns and the error code in status.
struct SweepRow {
  std::string param;
  double value, t, pi_tilde, c_star, K;
  std::string status;
};

void write_solution_csv(std::ostream& out, const EquilibriumSolution& sol);
std::vector<SolutionRow> read_solution_csv(std::istream& in);

void write_report_csv(std::ostream& out, const EquilibriumReport& report);
std::vector<ReportRow> read_report_csv(std::istream& in);

void write_paths_csv(std::ostream& out, const PathEnsemble& ensemble);
std::vector<PathRow> read_paths_csv(std::istream& in);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

}  // namespace mvu

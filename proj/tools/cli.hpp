#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ssos/moment.hpp"
#include "ssos/resolve.hpp"
#include "ssos/variety.hpp"

namespace ssos::cli {

enum ExitCode : int {
  kConverged = 0,
  kInputError = 1,
  kNotConverged = 2,
  kInfeasibleKkt = 3,
  kCertificateFailed = 4,
};

/// Malformed problem or certificate input; pointer is a JSON pointer.
class InputError : public std::runtime_error {
 public:
  InputError(std::string pointer, const std::string& message)
      : std::runtime_error(pointer.empty() ? message : pointer + ": " + message),
        pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Problem file:
///   {"variables": [...], "objective": "...",
///    "variety": {"generators": [...], "dimension": d}       or
///    "inequalities": [...]                                  (g_j >= 0),
///    "morphism": "cusp" | {"name", "source": {...}, "components": [...]},
///    "options": {"k_min", "k_max", "tol_gap", "tol_feas", "samples", "seed"}}
struct Problem {
  std::vector<std::string> varnames;
  Polynomial objective;
  std::optional<VarietySpec> variety;
  std::optional<std::vector<Polynomial>> inequalities;
  std::optional<ResolutionMorphism> morphism;
  PipelineOptions options;
  nlohmann::json source;
};

Problem parse_problem(const nlohmann::json& j);
Problem load_problem(const std::string& path);

/// Objective and generators the KKT system is built from, after pullback
/// or slack transform.
struct PreparedProblem {
  Polynomial h0;
  std::vector<Polynomial> generators;
  std::vector<std::string> varnames;
};
PreparedProblem prepare(const Problem& p);

enum class ReportStatus { Converged, NotConverged, InfeasibleKkt };
std::string to_string(ReportStatus s);
ReportStatus report_status(const PipelineReport& rep);
int exit_code(ReportStatus s);

/// Runs the pipeline for a problem and returns the report JSON.  The
/// certificate, when one is available, is written to certificate_path.
nlohmann::json solve_report(const Problem& p, const std::optional<std::string>& certificate_path);

/// Entry point of the singular-sos binary.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ssos::cli

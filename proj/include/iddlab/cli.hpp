#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "iddlab/cf.hpp"
#include "iddlab/laplace.hpp"

namespace iddlab::cli {

inline constexpr const char* kReportSchema = "iddlab-report/1";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { ok = 0, input_error = 1, numeric_error = 2, assertion_failed = 3 };

/// Parsed sample file: one finite decimal per line, '#' comments and blank
/// lines skipped.
struct Samples {
  std::vector<double> values;
  double mean = 0.0;
  double variance = 0.0;  // population variance of the sample
};

/// Throws InputError naming the 1-based line of the first bad entry.
Samples parse_samples(std::istream& in);
Samples ingest(const std::string& path);

/// "symgamma:shape=1", "gauss:variance=2", "stable:alpha=1.5,scale=1",
/// "cpoisson:rate=3,jump=1".
FamilyParams parse_family(const std::string& spec);

/// "gamma:shape=1", "poisson:rate=2", "stable:alpha=0.5,scale=1", "drift:sigma=2".
SubordinatorParams parse_subordinator(const std::string& spec);

/// JSON text with every floating value written with 17 significant digits.
/// Non-finite values are written as the strings "inf", "-inf", "nan".
std::string dump_report(const nlohmann::json& report, int indent = 2);

/// Entry point behind the `iddlab` executable. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iddlab::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanesim/telemetry.hpp"

namespace lanesim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

[[nodiscard]] nlohmann::json metrics_to_json(const MetricsReport& m);

/// Plot-ready series derived from a run log.
struct RunReport {
  std::string scatter_csv;  // curvature,smoothed_deg over the correlation samples
  std::string trace_csv;    // t,offset_px over every sample
  std::string summary_json;
};

/// Throws InvalidInput on an empty log.
[[nodiscard]] RunReport build_report(const RunLog& log);

/// Runs one command line (args excludes the program name). Output files go
/// where the flags say; progress lines go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lanesim::cli

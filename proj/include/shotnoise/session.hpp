#pragma once

// Browsing-session logs.
//
// File format (UTF-8, line oriented):
//
//   duration_seconds=<positive decimal>
//   <timestamp_seconds>
//   <timestamp_seconds>,<mark>
//   ...
//
// Blank lines and lines starting with '#' are ignored anywhere. Timestamps
// lie in (0, duration] and may appear in any order; marks default to 1.

#include <filesystem>
#include <istream>
#include <vector>

#include "shotnoise/analytics.hpp"
#include "shotnoise/shot_noise.hpp"

namespace shotnoise {

struct SessionEvent {
  double timestamp;
  double mark = 1.0;
};

struct SessionLog {
  double duration;
  std::vector<SessionEvent> events;  // sorted by timestamp
};

struct SessionAnalysis {
  RetentionReport report;
  Trajectory trajectory;
};

// Throws FormatError carrying the offending 1-based line number.
SessionLog parse_session_log(std::istream& in);
SessionLog read_session_log(const std::filesystem::path& path);

// lambda_hat = events / duration, SRQ = lambda_hat / mu. DomainError when mu == 0.
SessionAnalysis analyze_session(const SessionLog& log, double mu, double grid_step = kDefaultGridStep);

}  // namespace shotnoise

#include "shotnoise/session.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>

#include "shotnoise/errors.hpp"

namespace shotnoise {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t line, const char* what) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw FormatError(line, std::string("non-numeric ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

SessionLog parse_session_log(std::istream& in) {
  constexpr std::string_view kHeader = "duration_seconds=";

  SessionLog log{0.0, {}};
  bool have_header = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (!have_header) {
      if (!line.starts_with(kHeader)) {
        throw FormatError(line_no, "expected 'duration_seconds=<value>' header");
      }
      log.duration = parse_number(line.substr(kHeader.size()), line_no, "duration");
      if (log.duration <= 0.0) throw FormatError(line_no, "duration must be > 0");
      have_header = true;
      continue;
    }

    SessionEvent ev;
    const auto comma = line.find(',');
    ev.timestamp = parse_number(line.substr(0, comma), line_no, "timestamp");
    if (comma != std::string_view::npos) {
      ev.mark = parse_number(line.substr(comma + 1), line_no, "mark");
      if (ev.mark <= 0.0) throw FormatError(line_no, "mark must be > 0");
    }
    if (!(ev.timestamp > 0.0 && ev.timestamp <= log.duration)) {
      throw FormatError(line_no, "timestamp " + std::string(trim(line.substr(0, comma))) +
                                     " outside (0, duration]");
    }
    log.events.push_back(ev);
  }
  if (!have_header) throw FormatError(line_no + 1, "missing 'duration_seconds=<value>' header");

  std::stable_sort(log.events.begin(), log.events.end(),
                   [](const SessionEvent& a, const SessionEvent& b) { return a.timestamp < b.timestamp; });
  return log;
}

SessionLog read_session_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(0, "cannot open '" + path.string() + "'");
  return parse_session_log(in);
}

SessionAnalysis analyze_session(const SessionLog& log, double mu, double grid_step) {
  if (!std::isfinite(log.duration) || log.duration <= 0.0) throw ParameterError("duration must be > 0");
  const double lambda_hat = static_cast<double>(log.events.size()) / log.duration;
  RetentionReport report = make_report(lambda_hat, mu);

  std::vector<double> times, marks;
  times.reserve(log.events.size());
  marks.reserve(log.events.size());
  for (const auto& ev : log.events) {
    times.push_back(ev.timestamp);
    marks.push_back(ev.mark);
  }
  return {report, evaluate_events(times, marks, mu, log.duration, grid_step)};
}

}  // namespace shotnoise

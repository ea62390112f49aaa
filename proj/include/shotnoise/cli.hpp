#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "shotnoise/montecarlo.hpp"
#include "shotnoise/shot_noise.hpp"

namespace shotnoise::cli {

enum ExitCode : int { kSuccess = 0, kArgumentError = 2, kInputError = 3 };

// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "none" | "constant:V" | "geometric:P"; ParameterError otherwise.
std::optional<MarkDistribution> parse_mark_spec(std::string_view spec);

// One "mu,sites,duration" triple per line; '#' comments and blanks ignored.
std::vector<Scenario> parse_scenarios(std::istream& in);

// %.10g, with "inf"/"-inf"/"nan" spelled out.
std::string format_number(double v);

}  // namespace shotnoise::cli

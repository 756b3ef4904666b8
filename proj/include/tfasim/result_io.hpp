// SPDX-License-Identifier: Apache-2.0
//
// Result persistence: a key=value echo of the resolved configuration (readable
// back through the CLI's --config option), per-scheme CSV tables, a sweep
// summary, and a complete JSON record that round-trips losslessly.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfasim/experiment.hpp"

namespace tfasim::io {

// Fixed-format double with enough digits to round-trip exactly (%.17g).
std::string format_double(double value);

// Compact text codecs shared by the CLI flags and the config echo:
// positions as "x,y|x,y|...", number lists separated by `sep`.
std::string encode_positions(const std::vector<Eigen::Vector2d>& positions);
std::vector<Eigen::Vector2d> parse_positions(const std::string& text);
std::string join_doubles(const std::vector<double>& values, char sep);
std::vector<double> parse_doubles(const std::string& text, char sep = ',');

// key=value lines mirroring the CLI flags; feeding the text back through
// --config reproduces the run.
std::string scenario_to_config_text(const harness::Scenario& scenario);

nlohmann::ordered_json scenario_to_json(const harness::Scenario& scenario);
harness::Scenario scenario_from_json(const nlohmann::json& j);

// Complete record of one or more runs (a single run is a one-point sweep).
nlohmann::ordered_json to_json(const std::vector<harness::ExperimentResult>& results);
std::vector<harness::ExperimentResult> experiments_from_json(const nlohmann::json& j);

std::string slot_utilities_csv(const harness::SchemeResult& result);
std::string sweep_summary_csv(const std::vector<harness::ExperimentResult>& results);

// Writes config.resolved, association_coeffs_<scheme>.csv and
// slot_utilities_<scheme>.csv per scheme (suffixed with the power point when
// sweeping), sweep_summary.csv, and result.json into output_dir.
void emit_results(const std::vector<harness::ExperimentResult>& results,
                  const std::filesystem::path& output_dir);

} // namespace tfasim::io

// Copyright 2026 The cqrabi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cqrabi/protocols.hpp"

namespace cqrabi {

// ------------------------------------------------------------------ config

/// A parsed configuration file.
///
/// Format: one `key = value` per line, `#` starts a comment. Frequencies
/// and rates are given as f = w / 2pi in GHz, times in ns. Numbers are
/// parsed as C-locale decimals.
struct ParsedConfig {
  ExperimentConfig experiment;
  std::string out;         // empty unless the file sets `out`
  bool protocol_set = false;
  RegimeReport regime;
};

/// Throws ConfigError for unknown, duplicate or missing keys, malformed
/// values, invalid parameters and hard regime failures.
ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);

/// Inverse of parse_config for the keys it understands.
std::string format_config(const ExperimentConfig& cfg);

Protocol parse_protocol(const std::string& name);

// ------------------------------------------------------------------ output

/// printf("%.12g").
std::string format_number(double v);

/// Rounds every series value, time and summary value to 12 significant
/// digits, the precision of the CSV files.
void quantize(ExperimentResult& r);

struct SeriesTable {
  std::vector<std::string> columns;  // without "t"
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // [column][row]
};

std::string series_csv(const ExperimentResult& r);
std::string summary_csv(const ExperimentResult& r);
std::string meta_text(const ExperimentConfig& cfg, const ExperimentResult& r);
/// Polyline chart of every series against t (ns).
std::string plot_svg(const ExperimentResult& r);

SeriesTable parse_series_csv(const std::string& text);
SeriesTable read_series_csv(const std::string& path);

/// Writes series.csv, summary.csv, plot.svg and meta.txt into `dir`.
void write_outputs(const std::string& dir, const ExperimentConfig& cfg, const ExperimentResult& r);

// -------------------------------------------------------------- validation

struct ValidationCheck {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Self-test of core identities: su(2) algebra, frame round trips,
/// displacement group law, rearrangement involution, Magnus propagator
/// against a time-ordered product, entangling power, CNOT equivalence and
/// the depolarizing process fidelity.
std::vector<ValidationCheck> run_validation_suite();

// -------------------------------------------------------------------- run

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitValidation = 3 };

struct RunOptions {
  std::string subcommand;  // scan, gate, cat, ghz, validate
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trajectories;
  std::optional<int> fock_dim;
};

/// Executes one CLI invocation; messages go to stdout/stderr.
int run_command(const RunOptions& options);

}  // namespace cqrabi

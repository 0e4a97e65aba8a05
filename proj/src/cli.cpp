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

#include "cqrabi/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace cqrabi {

namespace {

constexpr double kGHz = kTwoPi * 1e9;  // rad/s per config frequency unit
constexpr double kNs = 1e-9;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a finite decimal number");
  }
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + v + "' is not an unsigned integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

DynamicsMode parse_mode(const std::string& v) {
  if (v == "effective") return DynamicsMode::effective;
  if (v == "full_unitary") return DynamicsMode::full_unitary;
  if (v == "full_dissipative") return DynamicsMode::full_dissipative;
  throw ConfigError("unknown dynamics mode '" + v + "'");
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "n_qubits", "omega_r",     "epsilon",   "g",       "Omega_x",    "omega_x",           "Omega_z",
      "omega_z",  "gamma",       "kappa",     "protocol", "modes",     "engine",            "trajectories",
      "seed",     "t_end",       "samples",   "fock_dim", "full_model", "convergence_check", "step_fraction",
      "out"};
  return keys;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

const char* const kSeriesOrder[] = {"F_ideal", "F_full", "F_diss"};

}  // namespace

// ------------------------------------------------------------------ config

Protocol parse_protocol(const std::string& name) {
  if (name == "scan" || name == "fidelity_scan") return Protocol::fidelity_scan;
  if (name == "gate") return Protocol::gate;
  if (name == "cat") return Protocol::cat;
  if (name == "ghz") return Protocol::ghz;
  throw ConfigError("unknown protocol '" + name + "'");
}

ParsedConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    if (!kv.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
  }
  for (const char* req : {"n_qubits", "omega_r", "epsilon", "g", "Omega_x", "omega_x"}) {
    if (!kv.count(req)) throw ConfigError(std::string("missing key '") + req + "'");
  }
  const auto get = [&](const char* k) -> const std::string* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  const auto freq = [&](const char* k, double fallback) {
    const std::string* v = get(k);
    return v ? parse_double(k, *v) * kGHz : fallback;
  };

  ParsedConfig pc;
  ExperimentConfig& c = pc.experiment;
  SystemParams& p = c.params;
  const std::int64_t n = parse_int("n_qubits", kv["n_qubits"]);
  if (n < 1 || n > 16) throw ConfigError("n_qubits must be between 1 and 16");
  p.n_qubits = static_cast<int>(n);
  p.omega_r = freq("omega_r", 0.0);
  p.epsilon = freq("epsilon", 0.0);
  p.g = freq("g", 0.0);
  p.Omega_x = freq("Omega_x", 0.0);
  p.omega_x = freq("omega_x", 0.0);
  p.Omega_z = freq("Omega_z", 0.0);
  p.omega_z = freq("omega_z", 0.5 * p.Omega_x);
  p.gamma = freq("gamma", 0.0);
  p.kappa = freq("kappa", 0.0);

  if (const auto* v = get("protocol")) {
    c.protocol = parse_protocol(*v);
    pc.protocol_set = true;
  }
  if (const auto* v = get("modes")) {
    c.modes.clear();
    std::istringstream ms(*v);
    std::string item;
    while (std::getline(ms, item, ',')) {
      const DynamicsMode m = parse_mode(trim(item));
      if (!c.has(m)) c.modes.push_back(m);
    }
  }
  if (const auto* v = get("engine")) {
    if (*v == "dense") {
      c.engine = DissipativeEngine::dense;
    } else if (*v == "mcwf") {
      c.engine = DissipativeEngine::mcwf;
    } else {
      throw ConfigError("unknown engine '" + *v + "'");
    }
  }
  if (const auto* v = get("full_model")) {
    if (*v == "lab") {
      c.full_model = FullModel::lab;
    } else if (*v == "first_rwa") {
      c.full_model = FullModel::first_rwa;
    } else {
      throw ConfigError("unknown full_model '" + *v + "'");
    }
  }
  if (const auto* v = get("trajectories")) c.trajectories = parse_int("trajectories", *v);
  if (const auto* v = get("seed")) c.seed = parse_uint("seed", *v);
  if (const auto* v = get("t_end")) c.t_end = parse_double("t_end", *v) * kNs;
  if (const auto* v = get("samples")) c.samples = parse_int("samples", *v);
  if (const auto* v = get("fock_dim")) {
    const std::int64_t f = parse_int("fock_dim", *v);
    if (f < 0 || f > 100000) throw ConfigError("fock_dim out of range");
    c.fock_dim = static_cast<int>(f);
  }
  if (const auto* v = get("convergence_check")) c.convergence_check = parse_bool("convergence_check", *v);
  if (const auto* v = get("step_fraction")) {
    c.integrator.step_fraction = parse_double("step_fraction", *v);
    if (!(c.integrator.step_fraction > 0.0 && c.integrator.step_fraction <= 0.25)) {
      throw ConfigError("step_fraction must lie in (0, 0.25]");
    }
  }
  if (const auto* v = get("out")) pc.out = *v;

  c.validate();
  pc.regime = check_regime(p);
  if (pc.regime.hard_fail) throw ConfigError("parameters violate the effective-model regime:\n" + pc.regime.describe());
  return pc;
}

ParsedConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string format_config(const ExperimentConfig& c) {
  const SystemParams& p = c.params;
  std::ostringstream out;
  const auto f = [&](const char* k, double v) { out << k << " = " << format_number(v / kGHz) << '\n'; };
  out << "n_qubits = " << p.n_qubits << '\n';
  f("omega_r", p.omega_r);
  f("epsilon", p.epsilon);
  f("g", p.g);
  f("Omega_x", p.Omega_x);
  f("omega_x", p.omega_x);
  f("Omega_z", p.Omega_z);
  f("omega_z", p.omega_z);
  f("gamma", p.gamma);
  f("kappa", p.kappa);
  out << "protocol = " << to_string(c.protocol) << '\n';
  out << "modes = ";
  for (std::size_t i = 0; i < c.modes.size(); ++i) out << (i ? ", " : "") << to_string(c.modes[i]);
  out << '\n';
  out << "engine = " << to_string(c.engine) << '\n';
  out << "trajectories = " << c.trajectories << '\n';
  out << "seed = " << c.seed << '\n';
  out << "t_end = " << format_number(c.t_end / kNs) << '\n';
  out << "samples = " << c.samples << '\n';
  out << "fock_dim = " << c.fock_dim << '\n';
  out << "full_model = " << to_string(c.full_model) << '\n';
  out << "convergence_check = " << (c.convergence_check ? "true" : "false") << '\n';
  out << "step_fraction = " << format_number(c.integrator.step_fraction) << '\n';
  return out.str();
}

// ------------------------------------------------------------------ output

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void quantize(ExperimentResult& r) {
  for (auto& t : r.times) t = round12(t);
  for (auto& s : r.series)
    for (auto& v : s.values) v = round12(v);
  for (auto& kv : r.summary) kv.second = round12(kv.second);
}

std::string series_csv(const ExperimentResult& r) {
  std::vector<const Series*> cols;
  for (const char* name : kSeriesOrder) {
    for (const auto& s : r.series) {
      if (s.name == name) cols.push_back(&s);
    }
  }
  std::ostringstream out;
  out << 't';
  for (const auto* s : cols) out << ',' << s->name;
  out << '\n';
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out << format_number(r.times[i]);
    for (const auto* s : cols) out << ',' << format_number(s->values.at(i));
    out << '\n';
  }
  return out.str();
}

std::string summary_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& [k, v] : r.summary) out << k << ',' << format_number(v) << '\n';
  return out.str();
}

std::string meta_text(const ExperimentConfig& cfg, const ExperimentResult& r) {
  std::ostringstream out;
  out << "# run parameters (frequencies in GHz, f = w / 2pi; times in ns)\n";
  out << format_config(cfg);
  out << "# run record\n";
  for (const auto& [k, v] : r.meta) out << k << " = " << v << '\n';
  out << "# regime check\n";
  std::istringstream lines(r.regime.describe());
  std::string line;
  while (std::getline(lines, line)) out << "regime: " << line << '\n';
  return out.str();
}

std::string plot_svg(const ExperimentResult& r) {
  const double w = 640.0, h = 400.0, left = 70.0, right = 20.0, top = 20.0, bottom = 50.0;
  const double pw = w - left - right, ph = h - top - bottom;
  double t0 = r.times.empty() ? 0.0 : r.times.front();
  double t1 = r.times.empty() ? 1.0 : r.times.back();
  if (!(t1 > t0)) t1 = t0 + 1e-9;
  double lo = 1.0, hi = 1.0;
  for (const auto& s : r.series)
    for (double v : s.values) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!(hi > lo)) lo = hi - 1e-3;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const auto x = [&](double t) { return left + pw * (t - t0) / (t1 - t0); };
  const auto y = [&](double v) { return top + ph * (hi - v) / (hi - lo); };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << ' ' << h << "\">\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double tv = t0 + (t1 - t0) * k / 4.0;
    const double fv = lo + (hi - lo) * k / 4.0;
    out << "<line x1=\"" << num(x(tv)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x(tv)) << "\" y2=\""
        << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x(tv)) << "\" y=\"" << num(top + ph + 20)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_number(round12(tv / kNs)) << "</text>\n";
    out << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y(fv)) << "\" x2=\"" << num(left) << "\" y2=\""
        << num(y(fv)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y(fv) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_number(round12(fv)).substr(0, 8) << "</text>\n";
  }
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(h - 10)
      << "\" font-size=\"12\" text-anchor=\"middle\">t (ns)</text>\n";
  const char* colors[] = {"black", "red", "blue"};
  int idx = 0;
  for (const char* name : kSeriesOrder) {
    for (const auto& s : r.series) {
      if (s.name != name) continue;
      out << "<polyline fill=\"none\" stroke=\"" << colors[idx % 3] << "\" points=\"";
      for (std::size_t i = 0; i < s.values.size() && i < r.times.size(); ++i) {
        out << (i ? " " : "") << num(x(r.times[i])) << ',' << num(y(s.values[i]));
      }
      out << "\"/>\n";
      out << "<text x=\"" << num(left + pw - 80) << "\" y=\"" << num(top + 15 + 15 * idx) << "\" font-size=\"12\" fill=\""
          << colors[idx % 3] << "\">" << s.name << "</text>\n";
      ++idx;
    }
  }
  out << "</svg>\n";
  return out.str();
}

SeriesTable parse_series_csv(const std::string& text) {
  SeriesTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("series csv is empty");
  {
    std::istringstream hs(line);
    std::string col;
    std::getline(hs, col, ',');
    if (col != "t") throw ConfigError("series csv must start with column 't'");
    while (std::getline(hs, col, ',')) t.columns.push_back(col);
  }
  t.values.assign(t.columns.size(), {});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    t.times.push_back(parse_double("t", cell));
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (!std::getline(ls, cell, ',')) throw ConfigError("series csv row has too few cells");
      t.values[c].push_back(parse_double(t.columns[c], cell));
    }
  }
  return t;
}

SeriesTable read_series_csv(const std::string& path) { return parse_series_csv(read_file(path)); }

void write_outputs(const std::string& dir, const ExperimentConfig& cfg, const ExperimentResult& r) {
  const std::filesystem::path d(dir);
  std::filesystem::create_directories(d);
  write_file(d / "series.csv", series_csv(r));
  write_file(d / "summary.csv", summary_csv(r));
  write_file(d / "plot.svg", plot_svg(r));
  write_file(d / "meta.txt", meta_text(cfg, r));
}

// -------------------------------------------------------------------- run

int run_command(const RunOptions& o) {
  if (o.subcommand == "validate") {
    const auto checks = run_validation_suite();
    bool ok = true;
    std::ostringstream csv;
    csv << "check,error,tolerance,pass\n";
    for (const auto& c : checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " (error " << format_number(c.error) << ", tolerance "
                << format_number(c.tolerance) << ")\n";
      csv << c.name << ',' << format_number(c.error) << ',' << format_number(c.tolerance) << ','
          << (c.pass ? 1 : 0) << '\n';
      ok = ok && c.pass;
    }
    if (!o.out_dir.empty()) {
      std::filesystem::create_directories(o.out_dir);
      write_file(std::filesystem::path(o.out_dir) / "validation.csv", csv.str());
    }
    std::cout << (ok ? "validation passed\n" : "validation FAILED\n");
    return ok ? kExitOk : kExitValidation;
  }
  try {
    const Protocol protocol = parse_protocol(o.subcommand);
    if (o.config_path.empty()) throw ConfigError("--config is required");
    ParsedConfig pc = load_config(o.config_path);
    if (pc.protocol_set && pc.experiment.protocol != protocol) {
      throw ConfigError("config selects protocol '" + to_string(pc.experiment.protocol) + "' but the subcommand is '" +
                        o.subcommand + "'");
    }
    ExperimentConfig cfg = pc.experiment;
    cfg.protocol = protocol;
    if (o.seed) cfg.seed = *o.seed;
    if (o.trajectories) cfg.trajectories = *o.trajectories;
    if (o.fock_dim) cfg.fock_dim = *o.fock_dim;
    cfg.validate();
    const std::string out = !o.out_dir.empty() ? o.out_dir : pc.out;
    if (out.empty()) throw ConfigError("no output directory: pass --out or set 'out' in the config");
    ExperimentResult r = run_experiment(cfg);
    quantize(r);
    write_outputs(out, cfg, r);
    for (const auto& [k, v] : r.summary) std::cout << k << " = " << format_number(v) << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalBudgetError& e) {
    std::cerr << "numerical budget exceeded: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace cqrabi

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "model.hpp"
#include "simulator.hpp"
#include "version.hpp"

namespace relaysec {

using Json = nlohmann::ordered_json;

enum class SchemeSelection { Oft, Noft, Both };
enum class OutputFormat { Csv, Json };

struct SweepAxis {
  enum class Kind { SnrDb, EavesdropperDensity, NHops };
  Kind kind = Kind::SnrDb;
  double min = 0.0;
  double max = 0.0;
  int points = 0;
  bool log_spacing = false;

  std::vector<double> values() const {
    if (points < 1) throw std::invalid_argument("sweep: points must be >= 1");
    if (points == 1) return {min};
    if (log_spacing && !(min > 0.0 && max > 0.0))
      throw std::invalid_argument("sweep: log spacing needs positive endpoints");
    std::vector<double> out(points);
    if (log_spacing) {
      const double l0 = std::log(min), l1 = std::log(max);
      for (int i = 0; i < points; ++i)
        out[i] = std::exp(l0 + (l1 - l0) * i / (points - 1));
    } else {
      for (int i = 0; i < points; ++i) out[i] = min + (max - min) * i / (points - 1);
    }
    return out;
  }
};

struct SimSpec {
  bool requested = false;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  MobilityModel mobility = MobilityModel::IndependentPerHop;
  double region_width_m = 2000.0;
  double region_height_m = 2000.0;
  std::uint64_t slot_cap = 1000000;
};

// One experiment, fully described: scenario, what to run, where the output
// goes.  Built from an INI file and/or command-line flags; snr is stored on
// the linear scale (dB only ever appears at the parsing boundary).
struct ExperimentSpec {
  NetworkConfig config;
  SchemeSelection schemes = SchemeSelection::Both;
  std::optional<SweepAxis> sweep;
  SimSpec sim;
  std::string out_path;  // empty: stdout
  OutputFormat format = OutputFormat::Csv;
  int n_hops = 0;  // 0 = not set
  int n_max = 50;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    // stoull would wrap a negative input around instead of rejecting it
    if (value.empty() || value[0] == '-') throw std::invalid_argument("");
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
  }
}

}  // namespace detail

// INI-style experiment file: [network], [run], [sweep], [sim], [output]
// sections, '#' or ';' comments, key = value.  Unknown sections or keys are
// errors; typos in an experiment description should not pass silently.
inline ExperimentSpec load_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  ExperimentSpec spec;
  SweepAxis sweep;
  bool sweep_seen = false;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw std::invalid_argument("config: malformed section at line " + std::to_string(line_no));
      section = s.substr(1, s.size() - 2);
      if (section != "network" && section != "run" && section != "sweep" && section != "sim" &&
          section != "output")
        throw std::invalid_argument("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value at line " + std::to_string(line_no));
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (section == "network") {
      if (key == "length_m")
        spec.config.length_m = detail::parse_double(key, value);
      else if (key == "alpha")
        spec.config.path_loss_exp = detail::parse_double(key, value);
      else if (key == "snr_db")
        spec.config.snr = db_to_linear(detail::parse_double(key, value));
      else if (key == "eavesdropper_density")
        spec.config.eavesdropper_density = detail::parse_double(key, value);
      else if (key == "max_secrecy_outage")
        spec.config.max_secrecy_outage = detail::parse_double(key, value);
      else
        throw std::invalid_argument("config: unknown key '" + key + "' in [network]");
    } else if (section == "run") {
      if (key == "scheme") {
        if (value == "oft")
          spec.schemes = SchemeSelection::Oft;
        else if (value == "noft")
          spec.schemes = SchemeSelection::Noft;
        else if (value == "both")
          spec.schemes = SchemeSelection::Both;
        else
          throw std::invalid_argument("config: scheme must be oft, noft, or both");
      } else if (key == "hops")
        spec.n_hops = static_cast<int>(detail::parse_u64(key, value));
      else if (key == "n_max")
        spec.n_max = static_cast<int>(detail::parse_u64(key, value));
      else
        throw std::invalid_argument("config: unknown key '" + key + "' in [run]");
    } else if (section == "sweep") {
      sweep_seen = true;
      if (key == "axis") {
        if (value == "snr_db")
          sweep.kind = SweepAxis::Kind::SnrDb;
        else if (value == "eavesdropper_density")
          sweep.kind = SweepAxis::Kind::EavesdropperDensity;
        else if (value == "n_hops")
          sweep.kind = SweepAxis::Kind::NHops;
        else
          throw std::invalid_argument(
              "config: axis must be snr_db, eavesdropper_density, or n_hops");
      } else if (key == "min")
        sweep.min = detail::parse_double(key, value);
      else if (key == "max")
        sweep.max = detail::parse_double(key, value);
      else if (key == "points")
        sweep.points = static_cast<int>(detail::parse_u64(key, value));
      else if (key == "spacing") {
        if (value == "linear")
          sweep.log_spacing = false;
        else if (value == "log")
          sweep.log_spacing = true;
        else
          throw std::invalid_argument("config: spacing must be linear or log");
      } else
        throw std::invalid_argument("config: unknown key '" + key + "' in [sweep]");
    } else if (section == "sim") {
      spec.sim.requested = true;
      if (key == "trials")
        spec.sim.trials = detail::parse_u64(key, value);
      else if (key == "seed")
        spec.sim.seed = detail::parse_u64(key, value);
      else if (key == "mobility") {
        if (value == "independent")
          spec.sim.mobility = MobilityModel::IndependentPerHop;
        else if (value == "fixed")
          spec.sim.mobility = MobilityModel::FixedAcrossHops;
        else
          throw std::invalid_argument("config: mobility must be independent or fixed");
      } else if (key == "region_width_m")
        spec.sim.region_width_m = detail::parse_double(key, value);
      else if (key == "region_height_m")
        spec.sim.region_height_m = detail::parse_double(key, value);
      else if (key == "slot_cap")
        spec.sim.slot_cap = detail::parse_u64(key, value);
      else
        throw std::invalid_argument("config: unknown key '" + key + "' in [sim]");
    } else if (section == "output") {
      if (key == "path")
        spec.out_path = value;
      else if (key == "format") {
        if (value == "csv")
          spec.format = OutputFormat::Csv;
        else if (value == "json")
          spec.format = OutputFormat::Json;
        else
          throw std::invalid_argument("config: format must be csv or json");
      } else
        throw std::invalid_argument("config: unknown key '" + key + "' in [output]");
    } else {
      throw std::invalid_argument("config: key outside any section at line " +
                                  std::to_string(line_no));
    }
  }
  if (sweep_seen) spec.sweep = sweep;
  return spec;
}

// Locale-independent, full round-trip double formatting.
inline std::string format_double(double v) {
  std::array<char, 40> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

// Result table: ordered metadata, fixed column order, one JSON object per
// row.  Renders to CSV (one '#' metadata line, then header, then rows) or to
// a JSON document; both render byte-identically across runs.
struct Table {
  Json meta = Json::object();
  std::vector<std::string> columns;
  std::vector<Json> rows;

  Json& add_row() {
    rows.push_back(Json::object());
    return rows.back();
  }
};

namespace detail {

inline std::string render_cell(const Json& cell) {
  if (cell.is_null()) return "";
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_boolean()) return cell.get<bool>() ? "1" : "0";
  if (cell.is_number_integer()) return std::to_string(cell.get<std::int64_t>());
  if (cell.is_number_unsigned()) return std::to_string(cell.get<std::uint64_t>());
  return format_double(cell.get<double>());
}

}  // namespace detail

inline std::string render_csv(const Table& table) {
  std::string out = "#";
  for (const auto& [key, value] : table.meta.items()) {
    out += ' ';
    out += key;
    out += '=';
    out += detail::render_cell(value);
  }
  out += '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const Json& row : table.rows) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out += ',';
      if (row.contains(table.columns[i])) out += detail::render_cell(row.at(table.columns[i]));
    }
    out += '\n';
  }
  return out;
}

inline std::string render_json(const Table& table) {
  Json doc = Json::object();
  doc["meta"] = table.meta;
  doc["columns"] = table.columns;
  doc["rows"] = table.rows;
  return doc.dump(2) + "\n";
}

inline std::string render_table(const Table& table, OutputFormat format) {
  return format == OutputFormat::Csv ? render_csv(table) : render_json(table);
}

}  // namespace relaysec

#pragma once

// File formats: RFC 4180 CSV in and out, the JSON model file, JSON reports
// for the simulation and bootstrap drivers, and the raw-to-hourly
// aggregation used to prepare interval data for fitting.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mixcirc/bootstrap.hpp"
#include "mixcirc/dataset.hpp"
#include "mixcirc/errors.hpp"
#include "mixcirc/mixture.hpp"
#include "mixcirc/simulate.hpp"

namespace mixcirc {

using json = nlohmann::json;

// ---------------------------------------------------------------- numbers

// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_missing(std::string_view s) {
  s = trim(s);
  if (s.empty()) return true;
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower == "na" || lower == "nan" || lower == "n/a" || lower == "null";
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return value;
}

// -------------------------------------------------------------------- CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return static_cast<int>(j);
    }
    std::string have;
    for (const std::string& h : header) {
      if (!have.empty()) have += ", ";
      have += "'" + h + "'";
    }
    throw DomainError("column '" + name + "' not found; file has " + have);
  }
};

// RFC 4180 reader: quoted fields may contain commas, doubled quotes, and
// line breaks. A trailing newline does not create an empty final row.
inline CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;

  const auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  const auto end_row = [&] {
    end_field();
    records.push_back(std::move(row));
    row.clear();
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        end_field();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !field.empty() || !row.empty()) end_row();
        break;
      default:
        field += c;
        row_has_content = true;
        break;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field at end of input");
  if (row_has_content || !field.empty() || !row.empty()) end_row();
  if (records.empty()) throw ParseError("empty input, expected a header row");

  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != table.header.size()) {
      throw ParseError("row " + std::to_string(i + 1) + " has " +
                           std::to_string(records[i].size()) + " fields, header has " +
                           std::to_string(table.header.size()),
                       static_cast<long>(i + 1));
    }
    table.rows.push_back(std::move(records[i]));
  }
  return table;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << csv_escape(row[j]);
    }
    out << '\n';
  };
  write_row(header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw DomainError("write_csv_file: row width does not match the header");
    }
    write_row(row);
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

// -------------------------------------------------------- dataset loading

enum class AngleUnit { Radians, Degrees };

inline double to_radians(double value, AngleUnit unit) {
  return unit == AngleUnit::Degrees ? value * kPi / 180.0 : value;
}

inline std::string angle_unit_name(AngleUnit unit) {
  return unit == AngleUnit::Degrees ? "degrees" : "radians";
}

inline AngleUnit angle_unit_from_name(const std::string& name) {
  if (name == "radians") return AngleUnit::Radians;
  if (name == "degrees") return AngleUnit::Degrees;
  throw DomainError("angle unit must be 'radians' or 'degrees', got '" + name + "'");
}

struct ColumnSpec {
  std::string response;
  std::vector<std::string> circular;
  std::vector<std::string> linear;
  AngleUnit unit = AngleUnit::Radians;
};

struct LoadedDataset {
  Dataset data;
  int dropped_rows = 0;
};

// Reads the declared columns, dropping any row with a missing value in them.
// The response and circular covariates are converted to radians; responses
// are wrapped by the Dataset itself, covariates keep their raw scale. Row
// numbers in errors count the header as row 1.
inline LoadedDataset load_dataset_csv(const std::string& path, const ColumnSpec& spec) {
  if (spec.response.empty()) throw DomainError("load_dataset_csv: no response column named");
  const CsvTable table = read_csv_file(path);

  std::vector<int> idx;
  idx.push_back(table.column(spec.response));
  for (const std::string& name : spec.circular) idx.push_back(table.column(name));
  for (const std::string& name : spec.linear) idx.push_back(table.column(name));

  const int q = static_cast<int>(spec.circular.size());
  const int p = static_cast<int>(spec.linear.size());
  std::vector<double> theta;
  std::vector<double> circ, lin;
  int dropped = 0;

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    bool missing = false;
    for (int id : idx) {
      if (is_missing(row[static_cast<std::size_t>(id)])) {
        missing = true;
        break;
      }
    }
    if (missing) {
      ++dropped;
      continue;
    }
    std::vector<double> values;
    values.reserve(idx.size());
    for (std::size_t v = 0; v < idx.size(); ++v) {
      const std::string& cell = row[static_cast<std::size_t>(idx[v])];
      const std::optional<double> parsed = parse_double(cell);
      if (!parsed) {
        throw ParseError("row " + std::to_string(i + 2) + " column '" +
                             table.header[static_cast<std::size_t>(idx[v])] +
                             "': cannot parse '" + cell + "' as a number",
                         static_cast<long>(i + 2));
      }
      values.push_back(*parsed);
    }
    theta.push_back(to_radians(values[0], spec.unit));
    for (int j = 0; j < q; ++j) circ.push_back(to_radians(values[static_cast<std::size_t>(1 + j)], spec.unit));
    for (int j = 0; j < p; ++j) lin.push_back(values[static_cast<std::size_t>(1 + q + j)]);
  }

  const int n = static_cast<int>(theta.size());
  if (n == 0) throw DomainError("load_dataset_csv: no usable rows in '" + path + "'");

  Eigen::VectorXd theta_v(n);
  Eigen::MatrixXd circ_m(n, q), lin_m(n, p);
  for (int i = 0; i < n; ++i) {
    theta_v[i] = theta[static_cast<std::size_t>(i)];
    for (int j = 0; j < q; ++j) circ_m(i, j) = circ[static_cast<std::size_t>(i * q + j)];
    for (int j = 0; j < p; ++j) lin_m(i, j) = lin[static_cast<std::size_t>(i * p + j)];
  }
  return {Dataset(std::move(theta_v), std::move(circ_m), std::move(lin_m), spec.circular,
                  spec.linear),
          dropped};
}

// --------------------------------------------------------- model file JSON

inline constexpr int kModelFormatVersion = 1;

inline json components_to_json(const std::vector<ComponentParams>& comps) {
  json arr = json::array();
  for (const ComponentParams& c : comps) {
    json beta = json::array();
    for (Eigen::Index d = 0; d < c.beta.size(); ++d) beta.push_back(c.beta[d]);
    arr.push_back({{"pi", c.pi}, {"mu", c.mu}, {"kappa", c.kappa}, {"beta", std::move(beta)}});
  }
  return arr;
}

inline std::vector<ComponentParams> components_from_json(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw ParseError("model: 'components' must be a nonempty array");
  std::vector<ComponentParams> comps;
  for (const json& item : arr) {
    ComponentParams c;
    c.pi = item.at("pi").get<double>();
    c.mu = item.at("mu").get<double>();
    c.kappa = item.at("kappa").get<double>();
    const json& beta = item.at("beta");
    c.beta.resize(static_cast<Eigen::Index>(beta.size()));
    for (std::size_t d = 0; d < beta.size(); ++d) {
      c.beta[static_cast<Eigen::Index>(d)] = beta[d].get<double>();
    }
    comps.push_back(std::move(c));
  }
  return comps;
}

struct StoredModel {
  MixtureFit fit;
  ColumnSpec columns;
  int n = 0;
  int q = 0;
  int p = 0;
};

inline json model_to_json(const MixtureFit& fit, const ColumnSpec& columns, const Dataset& data) {
  json j;
  j["format"] = "mixcirc-fit";
  j["version"] = kModelFormatVersion;
  j["k"] = fit.k();
  j["q"] = data.q();
  j["p"] = data.p();
  j["n"] = data.n();
  j["df"] = fit.df;
  j["loglik"] = fit.loglik;
  j["bic"] = fit.bic;
  j["columns"] = {{"response", columns.response},
                  {"circular", columns.circular},
                  {"linear", columns.linear},
                  {"angle_unit", angle_unit_name(columns.unit)}};
  j["components"] = components_to_json(fit.components);
  j["diagnostics"] = {{"converged", fit.diagnostics.converged},
                      {"iterations", fit.diagnostics.iterations},
                      {"final_loglik", fit.diagnostics.final_loglik},
                      {"kappa_capped", fit.diagnostics.flags.kappa_capped},
                      {"hessian_regularized", fit.diagnostics.flags.hessian_regularized},
                      {"step_halved", fit.diagnostics.flags.step_halved},
                      {"restarts_used", fit.restarts_used},
                      {"start_logliks", fit.start_logliks},
                      {"loglik_trace", fit.diagnostics.loglik_trace}};
  return j;
}

inline StoredModel model_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != std::string("mixcirc-fit")) {
    throw ParseError("model: missing or wrong 'format' tag, expected 'mixcirc-fit'");
  }
  if (j.value("version", 0) != kModelFormatVersion) {
    throw ParseError("model: unsupported version " + std::to_string(j.value("version", 0)));
  }
  StoredModel m;
  m.n = j.at("n").get<int>();
  m.q = j.at("q").get<int>();
  m.p = j.at("p").get<int>();
  m.fit.components = components_from_json(j.at("components"));
  if (static_cast<int>(m.fit.components.size()) != j.at("k").get<int>()) {
    throw ParseError("model: 'k' does not match the number of components");
  }
  for (const ComponentParams& c : m.fit.components) {
    if (c.beta.size() != 2 * m.q + m.p) {
      throw ParseError("model: coefficient length does not match 2q+p");
    }
  }
  m.fit.df = j.at("df").get<int>();
  m.fit.loglik = j.at("loglik").get<double>();
  m.fit.bic = j.at("bic").get<double>();
  const json& cols = j.at("columns");
  m.columns.response = cols.at("response").get<std::string>();
  m.columns.circular = cols.at("circular").get<std::vector<std::string>>();
  m.columns.linear = cols.at("linear").get<std::vector<std::string>>();
  m.columns.unit = angle_unit_from_name(cols.at("angle_unit").get<std::string>());
  if (static_cast<int>(m.columns.circular.size()) != m.q ||
      static_cast<int>(m.columns.linear.size()) != m.p) {
    throw ParseError("model: column lists do not match q and p");
  }
  const json& diag = j.at("diagnostics");
  m.fit.diagnostics.converged = diag.at("converged").get<bool>();
  m.fit.diagnostics.iterations = diag.at("iterations").get<int>();
  m.fit.diagnostics.final_loglik = diag.at("final_loglik").get<double>();
  m.fit.diagnostics.flags.kappa_capped = diag.at("kappa_capped").get<bool>();
  m.fit.diagnostics.flags.hessian_regularized = diag.at("hessian_regularized").get<bool>();
  m.fit.diagnostics.flags.step_halved = diag.at("step_halved").get<bool>();
  m.fit.restarts_used = diag.value("restarts_used", 0);
  m.fit.start_logliks = diag.value("start_logliks", std::vector<double>{});
  m.fit.diagnostics.loglik_trace = diag.value("loglik_trace", std::vector<double>{});
  return m;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

inline void save_model(const std::string& path, const MixtureFit& fit, const ColumnSpec& columns,
                       const Dataset& data) {
  write_json_file(path, model_to_json(fit, columns, data));
}

inline StoredModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

// ------------------------------------------------------------ scenarios

// Scenario file: {"name": ..., "q": 1, "p": 1, "components": [...],
// "covariates": {"linear": [lo, hi], "circular": [lo, hi]}} with components
// shaped like the model file. Ranges are optional and default to the
// built-in ones.
inline ScenarioSpec scenario_from_json(const json& j) {
  ScenarioSpec spec;
  spec.name = j.value("name", std::string("scenario"));
  spec.q = j.at("q").get<int>();
  spec.p = j.at("p").get<int>();
  spec.components = components_from_json(j.at("components"));
  if (j.contains("covariates")) {
    const json& cov = j.at("covariates");
    if (cov.contains("linear")) {
      spec.ranges.linear_lo = cov.at("linear").at(0).get<double>();
      spec.ranges.linear_hi = cov.at("linear").at(1).get<double>();
    }
    if (cov.contains("circular")) {
      spec.ranges.circular_lo = cov.at("circular").at(0).get<double>();
      spec.ranges.circular_hi = cov.at("circular").at(1).get<double>();
    }
  }
  validate_scenario(spec);
  return spec;
}

// ------------------------------------------------------------ JSON reports

inline json monte_carlo_report_to_json(const MonteCarloReport& report) {
  json j;
  j["scenario"] = report.scenario;
  j["summaries"] = json::array();
  for (const MonteCarloSummary& s : report.summaries) {
    json rmse = json::object();
    for (std::size_t i = 0; i < s.parameter.size(); ++i) {
      rmse[s.parameter[i]] = s.rmse[static_cast<Eigen::Index>(i)];
    }
    j["summaries"].push_back({{"n", s.n},
                              {"replications", s.replications},
                              {"failures", s.failures},
                              {"rmse", std::move(rmse)},
                              {"class_error_mean", s.class_error_mean},
                              {"class_error_sd", s.class_error_sd},
                              {"ari_mean", s.ari_mean},
                              {"ari_sd", s.ari_sd}});
  }
  j["replicates"] = json::array();
  for (const ReplicateRecord& r : report.replicates) {
    json rec = {{"n", r.n},       {"replicate", r.replicate},    {"ok", r.ok},
                {"note", r.note}, {"loglik", r.loglik},          {"class_error", r.class_error},
                {"ari", r.ari}};
    if (r.ok) {
      json errors = json::array();
      for (Eigen::Index i = 0; i < r.errors.size(); ++i) errors.push_back(r.errors[i]);
      rec["errors"] = std::move(errors);
    }
    j["replicates"].push_back(std::move(rec));
  }
  return j;
}

inline json bootstrap_result_to_json(const BootstrapResult& result) {
  json j;
  j["requested"] = result.requested;
  j["failed"] = result.failed;
  j["capped_replicates"] = result.capped_replicates;
  j["failure_notes"] = result.failure_notes;
  j["parameters"] = json::array();
  for (std::size_t i = 0; i < result.parameter.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    j["parameters"].push_back({{"name", result.parameter[i]},
                               {"estimate", result.estimate[idx]},
                               {"se", result.se[idx]},
                               {"ci_lower", result.ci_lower[idx]},
                               {"ci_upper", result.ci_upper[idx]}});
  }
  return j;
}

inline json bic_scan_to_json(const BicScanResult& scan) {
  json j;
  j["selected_k"] = scan.selected_k;
  j["rows"] = json::array();
  for (const BicRow& row : scan.rows) {
    j["rows"].push_back({{"k", row.k},
                         {"ok", row.ok},
                         {"loglik", row.loglik},
                         {"df", row.df},
                         {"bic", row.bic},
                         {"note", row.note}});
  }
  return j;
}

// -------------------------------------------------------- hourly aggregate

struct HourlyOptions {
  std::string timestamp;
  std::string direction;
  std::vector<std::string> linear;
  AngleUnit unit = AngleUnit::Degrees;
  // strptime-style format; empty tries a list of common ISO-like formats.
  std::string time_format;
};

struct HourlyRow {
  std::string hour;
  int hour_of_day = 0;
  double direction = 0.0;
  bool direction_ok = true;
  std::vector<double> linear_means;
  int n_obs = 0;
  double hour_angle = 0.0;
};

struct HourlyResult {
  std::vector<HourlyRow> rows;
  std::string direction_name;
  std::vector<std::string> linear_names;
  int flagged = 0;
  int dropped = 0;
};

namespace detail {

inline std::optional<std::tm> parse_timestamp(const std::string& text, const std::string& format) {
  std::tm tm{};
  std::istringstream ss{std::string(trim(text))};
  ss >> std::get_time(&tm, format.c_str());
  if (ss.fail()) return std::nullopt;
  return tm;
}

inline const std::vector<std::string>& default_time_formats() {
  static const std::vector<std::string> formats = {
      "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M",
      "%Y/%m/%d %H:%M:%S", "%Y/%m/%d %H:%M"};
  return formats;
}

}  // namespace detail

// Collapses sub-hourly records onto calendar hours: circular mean for the
// direction, arithmetic means for linear columns, plus the hour-of-day
// mapped onto the circle as hour * 2*pi/24. Hours whose directions cancel
// to a zero resultant are kept but flagged, with the direction left empty.
// Rows with missing cells are dropped; an unparseable timestamp is an error
// (pass time_format when the data uses an uncommon layout).
inline HourlyResult hourly_aggregate(const CsvTable& table, const HourlyOptions& options) {
  const int ts_col = table.column(options.timestamp);
  const int dir_col = table.column(options.direction);
  std::vector<int> lin_cols;
  for (const std::string& name : options.linear) lin_cols.push_back(table.column(name));

  const std::vector<std::string> formats = options.time_format.empty()
                                               ? detail::default_time_formats()
                                               : std::vector<std::string>{options.time_format};

  struct Accumulator {
    int hour_of_day = 0;
    double sin_sum = 0.0;
    double cos_sum = 0.0;
    std::vector<double> linear_sums;
    int count = 0;
  };
  std::map<std::string, Accumulator> groups;
  int dropped = 0;

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string& ts_cell = row[static_cast<std::size_t>(ts_col)];
    if (is_missing(ts_cell)) {
      ++dropped;
      continue;
    }
    std::optional<std::tm> tm;
    for (const std::string& fmt : formats) {
      tm = detail::parse_timestamp(ts_cell, fmt);
      if (tm) break;
    }
    if (!tm) {
      throw ParseError("row " + std::to_string(i + 2) + ": cannot parse timestamp '" + ts_cell +
                           "'; pass an explicit time format if the layout is unusual",
                       static_cast<long>(i + 2));
    }

    bool missing = is_missing(row[static_cast<std::size_t>(dir_col)]);
    for (int c : lin_cols) missing = missing || is_missing(row[static_cast<std::size_t>(c)]);
    if (missing) {
      ++dropped;
      continue;
    }

    const std::optional<double> dir = parse_double(row[static_cast<std::size_t>(dir_col)]);
    if (!dir) {
      throw ParseError("row " + std::to_string(i + 2) + " column '" + options.direction +
                           "': cannot parse '" + row[static_cast<std::size_t>(dir_col)] +
                           "' as a number",
                       static_cast<long>(i + 2));
    }
    std::vector<double> lin_values;
    for (std::size_t c = 0; c < lin_cols.size(); ++c) {
      const std::string& cell = row[static_cast<std::size_t>(lin_cols[c])];
      const std::optional<double> v = parse_double(cell);
      if (!v) {
        throw ParseError("row " + std::to_string(i + 2) + " column '" + options.linear[c] +
                             "': cannot parse '" + cell + "' as a number",
                         static_cast<long>(i + 2));
      }
      lin_values.push_back(*v);
    }

    char key[32];
    std::snprintf(key, sizeof(key), "%04d-%02d-%02d %02d", tm->tm_year + 1900, tm->tm_mon + 1,
                  tm->tm_mday, tm->tm_hour);
    Accumulator& acc = groups[key];
    if (acc.count == 0) {
      acc.hour_of_day = tm->tm_hour;
      acc.linear_sums.assign(lin_cols.size(), 0.0);
    }
    const double rad = to_radians(*dir, options.unit);
    acc.sin_sum += std::sin(rad);
    acc.cos_sum += std::cos(rad);
    for (std::size_t c = 0; c < lin_values.size(); ++c) acc.linear_sums[c] += lin_values[c];
    acc.count += 1;
  }

  HourlyResult out;
  out.direction_name = options.direction;
  out.linear_names = options.linear;
  out.dropped = dropped;
  for (const auto& [key, acc] : groups) {
    HourlyRow row;
    row.hour = key;
    row.hour_of_day = acc.hour_of_day;
    row.n_obs = acc.count;
    row.hour_angle = acc.hour_of_day * kTwoPi / 24.0;
    const double resultant = std::hypot(acc.sin_sum, acc.cos_sum);
    if (resultant > 1e-12 * acc.count) {
      row.direction = wrap_angle(std::atan2(acc.sin_sum, acc.cos_sum));
    } else {
      row.direction = std::numeric_limits<double>::quiet_NaN();
      row.direction_ok = false;
      ++out.flagged;
    }
    for (double s : acc.linear_sums) row.linear_means.push_back(s / acc.count);
    out.rows.push_back(std::move(row));
  }
  return out;
}

// Fit-ready CSV: the aggregated direction (radians) under its original
// column name, the hour mapped onto the circle as `hour_angle`, the linear
// means under their original names. Flagged hours write an empty direction,
// which the dataset loader then drops.
inline void write_hourly_csv(const std::string& path, const HourlyResult& result) {
  std::vector<std::string> header = {"hour", result.direction_name, "hour_angle"};
  for (const std::string& name : result.linear_names) header.push_back(name);
  header.push_back("n_obs");
  header.push_back("direction_ok");

  std::vector<std::vector<std::string>> rows;
  for (const HourlyRow& row : result.rows) {
    std::vector<std::string> cells;
    cells.push_back(row.hour);
    cells.push_back(row.direction_ok ? format_double(row.direction) : "");
    cells.push_back(format_double(row.hour_angle));
    for (double v : row.linear_means) cells.push_back(format_double(v));
    cells.push_back(std::to_string(row.n_obs));
    cells.push_back(row.direction_ok ? "1" : "0");
    rows.push_back(std::move(cells));
  }
  write_csv_file(path, header, rows);
}

}  // namespace mixcirc

// Command-line front end: data ingestion, fitting, model selection,
// clustering, simulation studies, bootstrap inference, correlation tables,
// and the hourly preprocessing step for raw wind-style records.
//
// Artifacts go to files named by --out*; stdout carries the same payload as
// JSON so commands compose in pipelines. Failures print a one-line JSON
// error record on stderr and exit nonzero.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixcirc/mixcirc.hpp"

namespace {

using mixcirc::json;

struct DataArgs {
  std::string path;
  std::string response;
  std::vector<std::string> circular;
  std::vector<std::string> linear;
  std::string unit = "radians";
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--data", a.path, "CSV file with a header row")->required();
  cmd->add_option("--response", a.response, "Angular response column")->required();
  cmd->add_option("--circular", a.circular, "Circular covariate columns (comma separated)")
      ->delimiter(',');
  cmd->add_option("--linear", a.linear, "Linear covariate columns (comma separated)")
      ->delimiter(',');
  cmd->add_option("--unit", a.unit, "Unit of the response and circular columns: radians|degrees")
      ->capture_default_str();
}

struct EmArgs {
  double tol = mixcirc::EmOptions{}.tol;
  int max_iter = mixcirc::EmOptions{}.max_iter;
};

void add_em_options(CLI::App* cmd, EmArgs& a) {
  cmd->add_option("--tol", a.tol, "EM convergence tolerance on the log-likelihood")
      ->capture_default_str();
  cmd->add_option("--max-iter", a.max_iter, "EM iteration cap")->capture_default_str();
}

mixcirc::EmOptions em_options(const EmArgs& a) {
  mixcirc::EmOptions o;
  o.tol = a.tol;
  o.max_iter = a.max_iter;
  return o;
}

mixcirc::ColumnSpec column_spec(const DataArgs& a) {
  mixcirc::ColumnSpec spec;
  spec.response = a.response;
  spec.circular = a.circular;
  spec.linear = a.linear;
  spec.unit = mixcirc::angle_unit_from_name(a.unit);
  return spec;
}

mixcirc::LoadedDataset load_data(const std::string& path, const mixcirc::ColumnSpec& spec) {
  const mixcirc::LoadedDataset loaded = mixcirc::load_dataset_csv(path, spec);
  if (loaded.dropped_rows > 0) {
    std::cerr << "note: dropped " << loaded.dropped_rows << " rows with missing values\n";
  }
  return loaded;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

void write_cluster_csv(const std::string& path, const Eigen::MatrixXd& gamma,
                       const std::vector<int>& labels) {
  std::vector<std::string> header = {"row", "label"};
  for (Eigen::Index k = 0; k < gamma.cols(); ++k) {
    header.push_back("gamma_" + std::to_string(k + 1));
  }
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
    std::vector<std::string> cells = {std::to_string(i),
                                      std::to_string(labels[static_cast<std::size_t>(i)])};
    for (Eigen::Index k = 0; k < gamma.cols(); ++k) {
      cells.push_back(mixcirc::format_double(gamma(i, k)));
    }
    rows.push_back(std::move(cells));
  }
  mixcirc::write_csv_file(path, header, rows);
}

int run_fit(const DataArgs& data_args, const EmArgs& em_args, int k, int restarts,
            std::uint64_t seed, int threads, const std::string& out,
            const std::string& resp_out) {
  const mixcirc::ColumnSpec spec = column_spec(data_args);
  const mixcirc::LoadedDataset loaded = load_data(data_args.path, spec);
  const mixcirc::MixtureFit fit = mixcirc::multi_start_fit(loaded.data, k, restarts, seed,
                                                           em_options(em_args), nullptr, threads);
  mixcirc::save_model(out, fit, spec, loaded.data);
  if (!resp_out.empty()) {
    write_cluster_csv(resp_out, fit.responsibilities, mixcirc::map_cluster(fit.responsibilities));
  }
  emit(mixcirc::model_to_json(fit, spec, loaded.data));
  return 0;
}

int run_select_k(const DataArgs& data_args, const EmArgs& em_args, int kmax, int restarts,
                 std::uint64_t seed, int threads, const std::string& out_json,
                 const std::string& out_csv, const std::string& out_model) {
  const mixcirc::ColumnSpec spec = column_spec(data_args);
  const mixcirc::LoadedDataset loaded = load_data(data_args.path, spec);
  const mixcirc::BicScanResult scan =
      mixcirc::bic_scan(loaded.data, kmax, restarts, seed, em_options(em_args), threads);

  const json j = mixcirc::bic_scan_to_json(scan);
  if (!out_json.empty()) mixcirc::write_json_file(out_json, j);
  if (!out_csv.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const mixcirc::BicRow& row : scan.rows) {
      rows.push_back({std::to_string(row.k), row.ok ? "1" : "0",
                      row.ok ? mixcirc::format_double(row.loglik) : "",
                      std::to_string(row.df), row.ok ? mixcirc::format_double(row.bic) : "",
                      row.note});
    }
    mixcirc::write_csv_file(out_csv, {"k", "ok", "loglik", "df", "bic", "note"}, rows);
  }
  if (!out_model.empty()) mixcirc::save_model(out_model, scan.best, spec, loaded.data);
  emit(j);
  return 0;
}

int run_cluster(const std::string& model_path, const std::string& data_path,
                const std::string& out) {
  const mixcirc::StoredModel model = mixcirc::load_model(model_path);
  const mixcirc::LoadedDataset loaded = load_data(data_path, model.columns);
  const mixcirc::EStepResult es = mixcirc::e_step(loaded.data, model.fit.components);
  const std::vector<int> labels = mixcirc::map_cluster(es.gamma);
  write_cluster_csv(out, es.gamma, labels);

  std::vector<int> counts(model.fit.components.size(), 0);
  for (int label : labels) counts[static_cast<std::size_t>(label)] += 1;
  emit(json{{"n", loaded.data.n()},
            {"k", model.fit.k()},
            {"loglik", es.loglik},
            {"counts", counts},
            {"out", out}});
  return 0;
}

int run_simulate(int scenario_id, const std::string& scenario_file,
                 const std::vector<int>& n_values, int reps, int restarts, const EmArgs& em_args,
                 std::uint64_t seed, int threads, const std::string& out) {
  if (scenario_id == 0 && scenario_file.empty()) {
    throw mixcirc::DomainError("simulate: give --scenario or --scenario-file");
  }
  const mixcirc::ScenarioSpec spec =
      scenario_file.empty() ? mixcirc::builtin_scenario(scenario_id)
                            : mixcirc::scenario_from_json(mixcirc::read_json_file(scenario_file));
  mixcirc::MonteCarloOptions options;
  options.restarts = restarts;
  options.em = em_options(em_args);
  options.threads = threads;
  const mixcirc::MonteCarloReport report = mixcirc::monte_carlo(spec, n_values, reps, seed, options);
  const json j = mixcirc::monte_carlo_report_to_json(report);
  if (!out.empty()) mixcirc::write_json_file(out, j);
  emit(j);
  return 0;
}

int run_bootstrap(const std::string& model_path, const std::string& data_path, int b,
                  int restarts, const EmArgs& em_args, std::uint64_t seed, int threads,
                  const std::string& out, const std::string& out_csv) {
  const mixcirc::StoredModel model = mixcirc::load_model(model_path);
  const mixcirc::LoadedDataset loaded = load_data(data_path, model.columns);
  mixcirc::BootstrapOptions options;
  options.restarts = restarts;
  options.em = em_options(em_args);
  options.threads = threads;
  const mixcirc::BootstrapResult result =
      mixcirc::parametric_bootstrap(model.fit, loaded.data, b, seed, options);

  const json j = mixcirc::bootstrap_result_to_json(result);
  if (!out.empty()) mixcirc::write_json_file(out, j);
  if (!out_csv.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < result.parameter.size(); ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      rows.push_back({result.parameter[i], mixcirc::format_double(result.estimate[idx]),
                      mixcirc::format_double(result.se[idx]),
                      mixcirc::format_double(result.ci_lower[idx]),
                      mixcirc::format_double(result.ci_upper[idx])});
    }
    mixcirc::write_csv_file(out_csv, {"parameter", "estimate", "se", "ci_lower", "ci_upper"},
                            rows);
  }
  emit(j);
  return 0;
}

int run_correlations(const DataArgs& data_args, const std::string& out_csv) {
  const mixcirc::ColumnSpec spec = column_spec(data_args);
  const mixcirc::LoadedDataset loaded = load_data(data_args.path, spec);
  const mixcirc::Dataset& d = loaded.data;

  std::vector<mixcirc::CorrelationInput> cols;
  cols.push_back({spec.response, d.theta(), true});
  for (int j = 0; j < d.q(); ++j) {
    cols.push_back({d.circular_names()[static_cast<std::size_t>(j)], d.circular_cov().col(j), true});
  }
  for (int j = 0; j < d.p(); ++j) {
    cols.push_back({d.linear_names()[static_cast<std::size_t>(j)], d.linear_cov().col(j), false});
  }
  const Eigen::MatrixXd r = mixcirc::correlation_matrix(cols);

  json names = json::array();
  for (const auto& c : cols) names.push_back(c.name);
  json matrix = json::array();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < r.cols(); ++j) row.push_back(r(i, j));
    matrix.push_back(std::move(row));
  }
  const json j = {{"variables", std::move(names)}, {"matrix", std::move(matrix)}};

  if (!out_csv.empty()) {
    std::vector<std::string> header = {"variable"};
    for (const auto& c : cols) header.push_back(c.name);
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      std::vector<std::string> cells = {cols[static_cast<std::size_t>(i)].name};
      for (Eigen::Index jj = 0; jj < r.cols(); ++jj) {
        cells.push_back(mixcirc::format_double(r(i, jj)));
      }
      rows.push_back(std::move(cells));
    }
    mixcirc::write_csv_file(out_csv, header, rows);
  }
  emit(j);
  return 0;
}

int run_aggregate_hourly(const std::string& data_path, const std::string& timestamp,
                         const std::string& direction, const std::vector<std::string>& linear,
                         const std::string& unit, const std::string& time_format,
                         const std::string& out) {
  mixcirc::HourlyOptions options;
  options.timestamp = timestamp;
  options.direction = direction;
  options.linear = linear;
  options.unit = mixcirc::angle_unit_from_name(unit);
  options.time_format = time_format;

  const mixcirc::CsvTable table = mixcirc::read_csv_file(data_path);
  const mixcirc::HourlyResult result = mixcirc::hourly_aggregate(table, options);
  mixcirc::write_hourly_csv(out, result);
  emit(json{{"rows", result.rows.size()},
            {"flagged", result.flagged},
            {"dropped", result.dropped},
            {"out", out}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite mixtures of von Mises circular regressions"};
  app.require_subcommand(0, 1);
  app.set_config("--config", "", "Read options from an INI file");

  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Master RNG seed")
      ->envname("MIXCIRC_SEED")
      ->capture_default_str();
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads for restarts and replicates")
      ->capture_default_str();
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  // fit ----------------------------------------------------------------
  CLI::App* fit = app.add_subcommand("fit", "Fit a K-component mixture by multi-start EM");
  fit->fallthrough()->configurable();
  DataArgs fit_data;
  EmArgs fit_em;
  add_data_options(fit, fit_data);
  add_em_options(fit, fit_em);
  int fit_k = 0;
  int fit_restarts = 50;
  std::string fit_out = "fit.json";
  std::string fit_resp;
  fit->add_option("--k", fit_k, "Number of components")->required()->check(CLI::PositiveNumber);
  fit->add_option("--restarts", fit_restarts, "Random EM starts")->capture_default_str();
  fit->add_option("--out", fit_out, "Model file to write")->capture_default_str();
  fit->add_option("--responsibilities", fit_resp, "Also write a per-row posterior CSV");

  // select-k -----------------------------------------------------------
  CLI::App* select = app.add_subcommand("select-k", "Scan K = 1..kmax and pick the BIC minimum");
  select->fallthrough()->configurable();
  DataArgs sel_data;
  EmArgs sel_em;
  add_data_options(select, sel_data);
  add_em_options(select, sel_em);
  int sel_kmax = 0;
  int sel_restarts = 50;
  std::string sel_json, sel_csv, sel_model;
  select->add_option("--kmax", sel_kmax, "Largest K to try")->required()->check(CLI::PositiveNumber);
  select->add_option("--restarts", sel_restarts, "Random EM starts per K")->capture_default_str();
  select->add_option("--out-json", sel_json, "Scan report file");
  select->add_option("--out-csv", sel_csv, "Scan table file");
  select->add_option("--out-model", sel_model, "Model file for the winning fit");

  // cluster ------------------------------------------------------------
  CLI::App* cluster = app.add_subcommand("cluster", "MAP-classify rows under a saved model");
  cluster->fallthrough()->configurable();
  std::string clu_model, clu_data;
  std::string clu_out = "clusters.csv";
  cluster->add_option("--model", clu_model, "Model file from fit or select-k")->required();
  cluster->add_option("--data", clu_data, "CSV file with the model's columns")->required();
  cluster->add_option("--out", clu_out, "Labels + posteriors CSV")->capture_default_str();

  // simulate -----------------------------------------------------------
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo study on a scenario");
  simulate->fallthrough()->configurable();
  int sim_scenario = 0;
  std::string sim_file;
  std::vector<int> sim_n;
  int sim_reps = 10;
  int sim_restarts = 10;
  EmArgs sim_em;
  std::string sim_out;
  CLI::Option* sim_s =
      simulate->add_option("--scenario", sim_scenario, "Built-in scenario id (1-4)")
          ->check(CLI::Range(1, 4));
  CLI::Option* sim_f = simulate->add_option("--scenario-file", sim_file, "Scenario JSON file");
  sim_s->excludes(sim_f);
  sim_f->excludes(sim_s);
  simulate->add_option("--n", sim_n, "Sample sizes (comma separated)")
      ->required()
      ->delimiter(',');
  simulate->add_option("--reps", sim_reps, "Replications per sample size")->capture_default_str();
  simulate->add_option("--restarts", sim_restarts, "Random EM starts per replicate")
      ->capture_default_str();
  add_em_options(simulate, sim_em);
  simulate->add_option("--out", sim_out, "Report file");

  // bootstrap ----------------------------------------------------------
  CLI::App* bootstrap = app.add_subcommand("bootstrap", "Parametric bootstrap SEs and CIs");
  bootstrap->fallthrough()->configurable();
  std::string boot_model, boot_data, boot_out, boot_csv;
  int boot_b = 1000;
  int boot_restarts = 10;
  EmArgs boot_em;
  bootstrap->add_option("--model", boot_model, "Model file from fit or select-k")->required();
  bootstrap->add_option("--data", boot_data, "CSV file with the model's columns")->required();
  bootstrap->add_option("--b", boot_b, "Bootstrap replicates")->capture_default_str();
  bootstrap->add_option("--restarts", boot_restarts, "Random EM starts per replicate refit")
      ->capture_default_str();
  add_em_options(bootstrap, boot_em);
  bootstrap->add_option("--out", boot_out, "Report file");
  bootstrap->add_option("--out-csv", boot_csv, "SE/CI table file");

  // correlations ---------------------------------------------------------
  CLI::App* correlations =
      app.add_subcommand("correlations", "Pairwise association matrix of the named columns");
  correlations->fallthrough()->configurable();
  DataArgs cor_data;
  std::string cor_csv;
  add_data_options(correlations, cor_data);
  correlations->add_option("--out-csv", cor_csv, "Matrix file");

  // aggregate-hourly -----------------------------------------------------
  CLI::App* hourly = app.add_subcommand(
      "aggregate-hourly", "Collapse sub-hourly records onto calendar hours");
  hourly->fallthrough()->configurable();
  std::string hr_data, hr_ts, hr_dir, hr_fmt;
  std::vector<std::string> hr_linear;
  std::string hr_unit = "degrees";
  std::string hr_out = "hourly.csv";
  hourly->add_option("--data", hr_data, "Raw CSV file")->required();
  hourly->add_option("--timestamp", hr_ts, "Timestamp column")->required();
  hourly->add_option("--direction", hr_dir, "Direction column")->required();
  hourly->add_option("--linear", hr_linear, "Columns to average arithmetically")->delimiter(',');
  hourly->add_option("--unit", hr_unit, "Unit of the direction column")->capture_default_str();
  hourly->add_option("--time-format", hr_fmt, "strptime-style timestamp format");
  hourly->add_option("--out", hr_out, "Aggregated CSV file")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }

  if (print_config) {
    std::cout << app.config_to_str(true, false);
    return 0;
  }

  try {
    if (fit->parsed()) {
      return run_fit(fit_data, fit_em, fit_k, fit_restarts, seed, threads, fit_out, fit_resp);
    }
    if (select->parsed()) {
      return run_select_k(sel_data, sel_em, sel_kmax, sel_restarts, seed, threads, sel_json,
                          sel_csv, sel_model);
    }
    if (cluster->parsed()) return run_cluster(clu_model, clu_data, clu_out);
    if (simulate->parsed()) {
      return run_simulate(sim_scenario, sim_file, sim_n, sim_reps, sim_restarts, sim_em, seed,
                          threads, sim_out);
    }
    if (bootstrap->parsed()) {
      return run_bootstrap(boot_model, boot_data, boot_b, boot_restarts, boot_em, seed, threads,
                           boot_out, boot_csv);
    }
    if (correlations->parsed()) return run_correlations(cor_data, cor_csv);
    if (hourly->parsed()) {
      return run_aggregate_hourly(hr_data, hr_ts, hr_dir, hr_linear, hr_unit, hr_fmt, hr_out);
    }
    std::cerr << json{{"error", "usage"}, {"message", "no command given; see --help"}}.dump()
              << '\n';
    return 1;
  } catch (const mixcirc::Error& e) {
    std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
}

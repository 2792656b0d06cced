#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixcirc/io.hpp"
#include "mixcirc/simulate.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using mixcirc::kPi;
using mixcirc::kTwoPi;
using json = mixcirc::json;

namespace {

// Scratch directory wiped when the test case ends. The binary is
// single-threaded, so a plain counter keeps paths unique.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("mixcirc-io-test-" + std::to_string(++counter));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("numeric and token helpers round-trip", "[io]") {
  for (double v : {0.1, 1.0 / 3.0, kPi, 2e-308, 1.7976931348623157e308,
                   -123.45678901234567, 42.0, 0.0}) {
    const auto back = mixcirc::parse_double(mixcirc::format_double(v));
    REQUIRE(back.has_value());
    CHECK(*back == v);
  }
  CHECK(mixcirc::format_double(2.0) == "2");
  CHECK(mixcirc::format_double(0.5) == "0.5");

  CHECK(mixcirc::trim("  a b\t ") == "a b");
  CHECK(mixcirc::trim("") == "");
  CHECK(mixcirc::trim(" \t\r\n ") == "");
  CHECK(mixcirc::trim("x") == "x");

  for (const char* s : {"", "  ", "na", "NA", "NaN", "nan", "n/a", "N/A", "null", "NULL"}) {
    CHECK(mixcirc::is_missing(s));
  }
  for (const char* s : {"0", "none", "nah", "na1", "-"}) {
    CHECK_FALSE(mixcirc::is_missing(s));
  }

  CHECK(mixcirc::parse_double("3.5") == 3.5);
  CHECK(mixcirc::parse_double(" 2.0 ") == 2.0);
  CHECK(mixcirc::parse_double("1e-3") == 1e-3);
  CHECK(mixcirc::parse_double("-0.25") == -0.25);
  CHECK_FALSE(mixcirc::parse_double("abc").has_value());
  CHECK_FALSE(mixcirc::parse_double("3.5x").has_value());
  CHECK_FALSE(mixcirc::parse_double("1 2").has_value());
  CHECK_FALSE(mixcirc::parse_double("").has_value());
  // from_chars grammar: no leading plus sign.
  CHECK_FALSE(mixcirc::parse_double("+1").has_value());
}

TEST_CASE("csv parser handles quoting, blank lines, and malformed input", "[io]") {
  SECTION("plain rows, CRLF line endings, trailing newline") {
    const mixcirc::CsvTable t = mixcirc::parse_csv("a,b\r\n1,2\r\n3,4\r\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2"});
    CHECK(t.rows[1] == std::vector<std::string>{"3", "4"});

    const mixcirc::CsvTable no_nl = mixcirc::parse_csv("a,b\n1,2");
    CHECK(no_nl.rows.size() == 1);
  }

  SECTION("quoted commas, embedded line breaks, doubled quotes") {
    const mixcirc::CsvTable t =
        mixcirc::parse_csv("a,b\n\"x,y\",\"l1\nl2\"\n7,\"he said \"\"hi\"\"\"\n");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "x,y");
    CHECK(t.rows[0][1] == "l1\nl2");
    CHECK(t.rows[1][0] == "7");
    CHECK(t.rows[1][1] == "he said \"hi\"");
  }

  SECTION("blank lines are skipped, explicit empty fields are kept") {
    const mixcirc::CsvTable t = mixcirc::parse_csv("a,b\n\n1,\n\n\"\",2\n");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", ""});
    CHECK(t.rows[1] == std::vector<std::string>{"", "2"});
  }

  SECTION("malformed input carries the offending row") {
    CHECK_THROWS_AS(mixcirc::parse_csv(""), mixcirc::ParseError);
    CHECK_THROWS_AS(mixcirc::parse_csv("a,b\n\"unterminated"), mixcirc::ParseError);
    try {
      mixcirc::parse_csv("a,b\n1,2\n1,2,3\n");
      FAIL("expected ParseError");
    } catch (const mixcirc::ParseError& e) {
      CHECK(e.row == 3);
      CHECK_THAT(e.what(), ContainsSubstring("row 3 has 3 fields, header has 2"));
    }
  }

  SECTION("column lookup names what the file actually has") {
    const mixcirc::CsvTable t = mixcirc::parse_csv("alpha,beta\n1,2\n");
    CHECK(t.column("alpha") == 0);
    CHECK(t.column("beta") == 1);
    try {
      t.column("gamma");
      FAIL("expected DomainError");
    } catch (const mixcirc::DomainError& e) {
      CHECK_THAT(e.what(), ContainsSubstring("'gamma' not found"));
      CHECK_THAT(e.what(), ContainsSubstring("'alpha', 'beta'"));
    }
  }
}

TEST_CASE("csv writer escapes fields and round-trips through the parser", "[io]") {
  CHECK(mixcirc::csv_escape("plain") == "plain");
  CHECK(mixcirc::csv_escape("a,b") == "\"a,b\"");
  CHECK(mixcirc::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(mixcirc::csv_escape("two\nlines") == "\"two\nlines\"");

  TempDir tmp;
  const std::vector<std::string> header = {"name", "value"};
  const std::vector<std::vector<std::string>> rows = {
      {"a,b", "1"}, {"say \"hi\"", ""}, {"two\nlines", "-3.5"}};
  const std::string path = tmp.file("cells.csv");
  mixcirc::write_csv_file(path, header, rows);

  const mixcirc::CsvTable back = mixcirc::read_csv_file(path);
  CHECK(back.header == header);
  CHECK(back.rows == rows);

  CHECK_THROWS_AS(mixcirc::write_csv_file(path, header, {{"lonely"}}), mixcirc::DomainError);
  CHECK_THROWS_AS(mixcirc::read_csv_file(tmp.file("absent.csv")), mixcirc::IoError);
  CHECK_THROWS_AS(
      mixcirc::write_csv_file(tmp.file("no-such-dir/out.csv"), header, rows),
      mixcirc::IoError);
}

TEST_CASE("angle units convert and names round-trip", "[io]") {
  CHECK_THAT(mixcirc::to_radians(180.0, mixcirc::AngleUnit::Degrees), WithinAbs(kPi, 1e-15));
  CHECK_THAT(mixcirc::to_radians(-90.0, mixcirc::AngleUnit::Degrees),
             WithinAbs(-kPi / 2.0, 1e-15));
  CHECK(mixcirc::to_radians(2.5, mixcirc::AngleUnit::Radians) == 2.5);

  CHECK(mixcirc::angle_unit_name(mixcirc::AngleUnit::Degrees) == "degrees");
  CHECK(mixcirc::angle_unit_name(mixcirc::AngleUnit::Radians) == "radians");
  CHECK(mixcirc::angle_unit_from_name("degrees") == mixcirc::AngleUnit::Degrees);
  CHECK(mixcirc::angle_unit_from_name("radians") == mixcirc::AngleUnit::Radians);
  CHECK_THROWS_AS(mixcirc::angle_unit_from_name("gradians"), mixcirc::DomainError);
}

TEST_CASE("dataset loader converts units, drops missing rows, reports bad cells", "[io]") {
  TempDir tmp;
  const std::string path = tmp.file("wind.csv");
  write_text(path,
             "direction,wdir,speed\n"
             "90,370,4.5\n"
             "NA,10,1.0\n"
             "-90,55,2.25\n"
             "180,100,\n"
             "45,200,3.5\n");

  mixcirc::ColumnSpec spec;
  spec.response = "direction";
  spec.circular = {"wdir"};
  spec.linear = {"speed"};
  spec.unit = mixcirc::AngleUnit::Degrees;

  const mixcirc::LoadedDataset loaded = mixcirc::load_dataset_csv(path, spec);
  CHECK(loaded.dropped_rows == 2);
  const mixcirc::Dataset& d = loaded.data;
  REQUIRE(d.n() == 3);
  CHECK(d.q() == 1);
  CHECK(d.p() == 1);
  CHECK(d.circular_names() == std::vector<std::string>{"wdir"});
  CHECK(d.linear_names() == std::vector<std::string>{"speed"});

  // Response converts to radians and wraps onto [0, 2*pi).
  CHECK_THAT(d.theta()[0], WithinAbs(kPi / 2.0, 1e-12));
  CHECK_THAT(d.theta()[1], WithinAbs(3.0 * kPi / 2.0, 1e-12));
  CHECK_THAT(d.theta()[2], WithinAbs(kPi / 4.0, 1e-12));
  // Circular covariates convert but stay unwrapped: 370 degrees exceeds 2*pi.
  CHECK_THAT(d.circular_cov()(0, 0), WithinAbs(370.0 * kPi / 180.0, 1e-12));
  CHECK(d.circular_cov()(0, 0) > kTwoPi);
  // Linear covariates pass through untouched.
  CHECK(d.linear_cov()(0, 0) == 4.5);
  CHECK(d.linear_cov()(1, 0) == 2.25);
  CHECK(d.linear_cov()(2, 0) == 3.5);

  SECTION("radians pass through unconverted") {
    const std::string rad = tmp.file("rad.csv");
    write_text(rad, "direction,wdir,speed\n1.5,2.0,0.25\n");
    mixcirc::ColumnSpec rspec = spec;
    rspec.unit = mixcirc::AngleUnit::Radians;
    const mixcirc::LoadedDataset r = mixcirc::load_dataset_csv(rad, rspec);
    CHECK(r.data.theta()[0] == 1.5);
    CHECK(r.data.circular_cov()(0, 0) == 2.0);
  }

  SECTION("an unparseable cell names its row and column") {
    const std::string bad = tmp.file("bad.csv");
    write_text(bad, "direction,wdir,speed\n10,20,1.0\n30,40,oops\n");
    try {
      mixcirc::load_dataset_csv(bad, spec);
      FAIL("expected ParseError");
    } catch (const mixcirc::ParseError& e) {
      CHECK(e.row == 3);
      CHECK_THAT(e.what(), ContainsSubstring("row 3 column 'speed'"));
      CHECK_THAT(e.what(), ContainsSubstring("cannot parse 'oops'"));
    }
  }

  SECTION("a file with no usable rows is rejected") {
    const std::string empty = tmp.file("empty.csv");
    write_text(empty, "direction,wdir,speed\nNA,1,2\n3,NA,4\n");
    CHECK_THROWS_AS(mixcirc::load_dataset_csv(empty, spec), mixcirc::DomainError);
  }

  SECTION("the response column must be named") {
    mixcirc::ColumnSpec unnamed = spec;
    unnamed.response.clear();
    CHECK_THROWS_AS(mixcirc::load_dataset_csv(path, unnamed), mixcirc::DomainError);
  }
}

namespace {

mixcirc::MixtureFit sample_fit() {
  mixcirc::ComponentParams a;
  a.pi = 0.3;
  a.mu = 1.25;
  a.kappa = 4.5;
  a.beta = (Eigen::VectorXd(3) << 0.2, -0.1, 0.3).finished();
  mixcirc::ComponentParams b;
  b.pi = 0.7;
  b.mu = 4.0;
  b.kappa = 6.25;
  b.beta = (Eigen::VectorXd(3) << 0.1, 0.2, -0.25).finished();

  mixcirc::MixtureFit fit;
  fit.components = {a, b};
  fit.loglik = -812.5;
  fit.df = 11;
  fit.bic = 1699.25;
  fit.diagnostics.converged = true;
  fit.diagnostics.iterations = 17;
  fit.diagnostics.final_loglik = -812.5;
  fit.diagnostics.flags.kappa_capped = false;
  fit.diagnostics.flags.hessian_regularized = true;
  fit.diagnostics.flags.step_halved = false;
  fit.diagnostics.loglik_trace = {-900.0, -820.0, -812.5};
  fit.restarts_used = 5;
  fit.start_logliks = {-900.0, -850.25, -812.5};
  return fit;
}

mixcirc::Dataset sample_dataset() {
  Eigen::VectorXd theta(5);
  theta << 0.1, 1.2, 2.3, 3.4, 4.5;
  Eigen::MatrixXd circ(5, 1), lin(5, 1);
  circ << 1.0, 2.0, 3.0, 4.0, 5.0;
  lin << -0.2, -0.1, 0.0, 0.1, 0.2;
  return mixcirc::Dataset(theta, circ, lin, {"wdir"}, {"speed"});
}

}  // namespace

TEST_CASE("model files round-trip exactly and reject malformed content", "[io]") {
  const mixcirc::MixtureFit fit = sample_fit();
  const mixcirc::Dataset data = sample_dataset();
  mixcirc::ColumnSpec cols;
  cols.response = "direction";
  cols.circular = {"wdir"};
  cols.linear = {"speed"};
  cols.unit = mixcirc::AngleUnit::Degrees;

  TempDir tmp;
  const std::string path = tmp.file("fit.json");
  mixcirc::save_model(path, fit, cols, data);
  const mixcirc::StoredModel m = mixcirc::load_model(path);

  CHECK(m.n == 5);
  CHECK(m.q == 1);
  CHECK(m.p == 1);
  REQUIRE(m.fit.k() == 2);
  for (int k = 0; k < 2; ++k) {
    const auto& in = fit.components[static_cast<std::size_t>(k)];
    const auto& out = m.fit.components[static_cast<std::size_t>(k)];
    CHECK(out.pi == in.pi);
    CHECK(out.mu == in.mu);
    CHECK(out.kappa == in.kappa);
    CHECK(out.beta == in.beta);
  }
  CHECK(m.fit.loglik == fit.loglik);
  CHECK(m.fit.df == fit.df);
  CHECK(m.fit.bic == fit.bic);
  CHECK(m.fit.diagnostics.converged == fit.diagnostics.converged);
  CHECK(m.fit.diagnostics.iterations == fit.diagnostics.iterations);
  CHECK(m.fit.diagnostics.final_loglik == fit.diagnostics.final_loglik);
  CHECK(m.fit.diagnostics.flags.kappa_capped == fit.diagnostics.flags.kappa_capped);
  CHECK(m.fit.diagnostics.flags.hessian_regularized == fit.diagnostics.flags.hessian_regularized);
  CHECK(m.fit.diagnostics.flags.step_halved == fit.diagnostics.flags.step_halved);
  CHECK(m.fit.diagnostics.loglik_trace == fit.diagnostics.loglik_trace);
  CHECK(m.fit.restarts_used == fit.restarts_used);
  CHECK(m.fit.start_logliks == fit.start_logliks);
  CHECK(m.columns.response == "direction");
  CHECK(m.columns.circular == cols.circular);
  CHECK(m.columns.linear == cols.linear);
  CHECK(m.columns.unit == mixcirc::AngleUnit::Degrees);

  SECTION("malformed documents are rejected with a reason") {
    const json good = mixcirc::model_to_json(fit, cols, data);

    json wrong_format = good;
    wrong_format["format"] = "other";
    CHECK_THROWS_AS(mixcirc::model_from_json(wrong_format), mixcirc::ParseError);

    json no_format = good;
    no_format.erase("format");
    CHECK_THROWS_AS(mixcirc::model_from_json(no_format), mixcirc::ParseError);

    json wrong_version = good;
    wrong_version["version"] = mixcirc::kModelFormatVersion + 1;
    CHECK_THROWS_AS(mixcirc::model_from_json(wrong_version), mixcirc::ParseError);

    json wrong_k = good;
    wrong_k["k"] = 3;
    CHECK_THROWS_AS(mixcirc::model_from_json(wrong_k), mixcirc::ParseError);

    json short_beta = good;
    short_beta["components"][0]["beta"] = {0.2, -0.1};
    CHECK_THROWS_AS(mixcirc::model_from_json(short_beta), mixcirc::ParseError);

    json extra_column = good;
    extra_column["columns"]["circular"] = {"wdir", "extra"};
    CHECK_THROWS_AS(mixcirc::model_from_json(extra_column), mixcirc::ParseError);

    json no_components = good;
    no_components["components"] = json::array();
    CHECK_THROWS_AS(mixcirc::model_from_json(no_components), mixcirc::ParseError);
  }

  SECTION("json file plumbing reports the path") {
    const std::string broken = tmp.file("broken.json");
    write_text(broken, "{ not json");
    try {
      mixcirc::read_json_file(broken);
      FAIL("expected ParseError");
    } catch (const mixcirc::ParseError& e) {
      CHECK_THAT(e.what(), ContainsSubstring(broken));
    }
    CHECK_THROWS_AS(mixcirc::read_json_file(tmp.file("absent.json")), mixcirc::IoError);
    CHECK_THROWS_AS(mixcirc::write_json_file(tmp.file("no-dir/x.json"), json::object()),
                    mixcirc::IoError);
  }
}

TEST_CASE("scenario files parse with defaults and run the validator", "[io]") {
  json j;
  j["name"] = "demo";
  j["q"] = 1;
  j["p"] = 1;
  j["components"] = json::array(
      {{{"pi", 0.4}, {"mu", 1.0}, {"kappa", 3.0}, {"beta", {0.1, 0.2, 0.3}}},
       {{"pi", 0.6}, {"mu", 4.0}, {"kappa", 5.0}, {"beta", {-0.1, 0.0, 0.2}}}});
  j["covariates"] = {{"linear", {-1.0, 1.0}}, {"circular", {0.0, kTwoPi}}};

  const mixcirc::ScenarioSpec s = mixcirc::scenario_from_json(j);
  CHECK(s.name == "demo");
  CHECK(s.q == 1);
  CHECK(s.p == 1);
  REQUIRE(s.k() == 2);
  CHECK(s.components[0].pi == 0.4);
  CHECK(s.components[1].mu == 4.0);
  CHECK(s.components[0].beta[2] == 0.3);
  CHECK(s.ranges.linear_lo == -1.0);
  CHECK(s.ranges.linear_hi == 1.0);
  CHECK(s.ranges.circular_lo == 0.0);
  CHECK(s.ranges.circular_hi == kTwoPi);

  SECTION("name and ranges fall back to defaults") {
    json bare = j;
    bare.erase("name");
    bare.erase("covariates");
    const mixcirc::ScenarioSpec d = mixcirc::scenario_from_json(bare);
    CHECK(d.name == "scenario");
    CHECK(d.ranges.linear_lo == -0.5);
    CHECK(d.ranges.linear_hi == 0.5);
    CHECK(d.ranges.circular_lo == kPi / 3.0);
    CHECK(d.ranges.circular_hi == 8.0 * kPi / 3.0);
  }

  SECTION("the scenario validator still runs") {
    json bad = j;
    bad["components"][0]["pi"] = 0.9;
    CHECK_THROWS_AS(mixcirc::scenario_from_json(bad), mixcirc::DomainError);
  }
}

TEST_CASE("report serializers expose the documented shapes", "[io]") {
  SECTION("bic scan") {
    mixcirc::BicScanResult scan;
    mixcirc::BicRow r1;
    r1.k = 1;
    r1.ok = false;
    r1.note = "empty_component: boom";
    mixcirc::BicRow r2;
    r2.k = 2;
    r2.ok = true;
    r2.loglik = -800.0;
    r2.df = 11;
    r2.bic = 1675.5;
    scan.rows = {r1, r2};
    scan.selected_k = 2;

    const json j = mixcirc::bic_scan_to_json(scan);
    CHECK(j["selected_k"] == 2);
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["ok"] == false);
    CHECK(j["rows"][0]["note"] == "empty_component: boom");
    CHECK(j["rows"][1]["bic"] == 1675.5);
    // NaN placeholders on failed rows serialize as null, keeping the dump valid JSON.
    CHECK(json::parse(j.dump())["rows"][0]["loglik"].is_null());
  }

  SECTION("bootstrap") {
    mixcirc::BootstrapResult r;
    r.parameter = {"pi_1", "mu_1"};
    r.estimate = (Eigen::VectorXd(2) << 0.3, 1.25).finished();
    r.se = (Eigen::VectorXd(2) << 0.04, 0.09).finished();
    r.ci_lower = (Eigen::VectorXd(2) << 0.22, 1.05).finished();
    r.ci_upper = (Eigen::VectorXd(2) << 0.38, 1.45).finished();
    r.requested = 10;
    r.failed = 1;
    r.capped_replicates = 2;
    r.failure_notes = {"fitting_failed: no start converged"};

    const json j = mixcirc::bootstrap_result_to_json(r);
    CHECK(j["requested"] == 10);
    CHECK(j["failed"] == 1);
    CHECK(j["capped_replicates"] == 2);
    CHECK(j["failure_notes"].size() == 1);
    REQUIRE(j["parameters"].size() == 2);
    CHECK(j["parameters"][1]["name"] == "mu_1");
    CHECK(j["parameters"][1]["estimate"] == 1.25);
    CHECK(j["parameters"][1]["se"] == 0.09);
    CHECK(j["parameters"][0]["ci_lower"] == 0.22);
    CHECK(j["parameters"][0]["ci_upper"] == 0.38);
  }

  SECTION("simulation study") {
    mixcirc::MonteCarloReport report;
    report.scenario = "scenario-1";
    mixcirc::MonteCarloSummary s;
    s.n = 100;
    s.replications = 4;
    s.failures = 1;
    s.parameter = {"pi_1"};
    s.rmse = (Eigen::VectorXd(1) << 0.05).finished();
    s.class_error_mean = 0.08;
    s.class_error_sd = 0.01;
    s.ari_mean = 0.8;
    s.ari_sd = 0.05;
    report.summaries = {s};

    mixcirc::ReplicateRecord ok;
    ok.n = 100;
    ok.replicate = 0;
    ok.ok = true;
    ok.loglik = -120.0;
    ok.class_error = 0.08;
    ok.ari = 0.8;
    ok.errors = (Eigen::VectorXd(1) << 0.02).finished();
    mixcirc::ReplicateRecord failed;
    failed.n = 100;
    failed.replicate = 1;
    failed.ok = false;
    failed.note = "empty_component: collapsed";
    report.replicates = {ok, failed};

    const json j = mixcirc::monte_carlo_report_to_json(report);
    CHECK(j["scenario"] == "scenario-1");
    REQUIRE(j["summaries"].size() == 1);
    CHECK(j["summaries"][0]["n"] == 100);
    CHECK(j["summaries"][0]["failures"] == 1);
    CHECK(j["summaries"][0]["rmse"]["pi_1"] == 0.05);
    REQUIRE(j["replicates"].size() == 2);
    CHECK(j["replicates"][0]["ok"] == true);
    REQUIRE(j["replicates"][0].contains("errors"));
    CHECK(j["replicates"][0]["errors"][0] == 0.02);
    CHECK_FALSE(j["replicates"][1].contains("errors"));
    CHECK(j["replicates"][1]["note"] == "empty_component: collapsed");
  }
}

TEST_CASE("hourly aggregation forms circular means per calendar hour", "[io]") {
  const mixcirc::CsvTable table = mixcirc::parse_csv(
      "time,dir,spd\n"
      "2024-01-05 03:10:00,350,4\n"
      "2024-01-05T03:40:00,10,6\n"
      "2024/01/05 04:05,0,1\n"
      "2024-01-05 04:55:00,180,3\n"
      "2024-01-06 05:00,90,2.5\n"
      "2024-01-05 06:00,NA,7\n"
      ",45,8\n"
      "2024-01-05 07:00,30,\n");

  mixcirc::HourlyOptions opts;
  opts.timestamp = "time";
  opts.direction = "dir";
  opts.linear = {"spd"};
  opts.unit = mixcirc::AngleUnit::Degrees;

  const mixcirc::HourlyResult result = mixcirc::hourly_aggregate(table, opts);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.flagged == 1);
  CHECK(result.dropped == 3);
  CHECK(result.direction_name == "dir");
  CHECK(result.linear_names == std::vector<std::string>{"spd"});

  // 350 and 10 degrees average to north; the key orders rows chronologically.
  const mixcirc::HourlyRow& h3 = result.rows[0];
  CHECK(h3.hour == "2024-01-05 03");
  CHECK(h3.hour_of_day == 3);
  CHECK(h3.n_obs == 2);
  CHECK(h3.direction_ok);
  CHECK(std::abs(mixcirc::wrap_signed(h3.direction)) < 1e-12);
  CHECK(h3.linear_means[0] == 5.0);
  CHECK_THAT(h3.hour_angle, WithinAbs(3.0 * kTwoPi / 24.0, 1e-15));

  // Opposing directions cancel: the hour is kept but flagged.
  const mixcirc::HourlyRow& h4 = result.rows[1];
  CHECK(h4.hour == "2024-01-05 04");
  CHECK_FALSE(h4.direction_ok);
  CHECK(std::isnan(h4.direction));
  CHECK(h4.linear_means[0] == 2.0);
  CHECK(h4.n_obs == 2);

  const mixcirc::HourlyRow& h5 = result.rows[2];
  CHECK(h5.hour == "2024-01-06 05");
  CHECK(h5.hour_of_day == 5);
  CHECK_THAT(h5.direction, WithinAbs(kPi / 2.0, 1e-12));
  CHECK(h5.linear_means[0] == 2.5);

  SECTION("an explicit time format overrides the built-in list") {
    const mixcirc::CsvTable dotted = mixcirc::parse_csv(
        "time,dir,spd\n05.01.2024 03:00,10,1\n");
    CHECK_THROWS_AS(mixcirc::hourly_aggregate(dotted, opts), mixcirc::ParseError);
    mixcirc::HourlyOptions custom = opts;
    custom.time_format = "%d.%m.%Y %H:%M";
    const mixcirc::HourlyResult r = mixcirc::hourly_aggregate(dotted, custom);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].hour == "2024-01-05 03");
  }

  SECTION("bad cells name their row") {
    const mixcirc::CsvTable bad_ts = mixcirc::parse_csv(
        "time,dir,spd\n2024-01-05 03:00,1,1\nnot-a-time,2,2\n");
    try {
      mixcirc::hourly_aggregate(bad_ts, opts);
      FAIL("expected ParseError");
    } catch (const mixcirc::ParseError& e) {
      CHECK(e.row == 3);
      CHECK_THAT(e.what(), ContainsSubstring("timestamp"));
    }

    const mixcirc::CsvTable bad_dir = mixcirc::parse_csv(
        "time,dir,spd\n2024-01-05 03:00,east,1\n");
    try {
      mixcirc::hourly_aggregate(bad_dir, opts);
      FAIL("expected ParseError");
    } catch (const mixcirc::ParseError& e) {
      CHECK_THAT(e.what(), ContainsSubstring("column 'dir'"));
      CHECK_THAT(e.what(), ContainsSubstring("'east'"));
    }
  }

  SECTION("the written csv is fit-ready and the loader drops flagged hours") {
    TempDir tmp;
    const std::string path = tmp.file("hourly.csv");
    mixcirc::write_hourly_csv(path, result);

    const mixcirc::CsvTable back = mixcirc::read_csv_file(path);
    CHECK(back.header == std::vector<std::string>{"hour", "dir", "hour_angle", "spd",
                                                  "n_obs", "direction_ok"});
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[1][1] == "");
    CHECK(back.rows[1][5] == "0");
    CHECK(back.rows[0][5] == "1");
    CHECK(back.rows[2][4] == "1");

    mixcirc::ColumnSpec spec;
    spec.response = "dir";
    spec.circular = {"hour_angle"};
    spec.linear = {"spd"};
    spec.unit = mixcirc::AngleUnit::Radians;
    const mixcirc::LoadedDataset loaded = mixcirc::load_dataset_csv(path, spec);
    CHECK(loaded.dropped_rows == 1);
    REQUIRE(loaded.data.n() == 2);
    CHECK(std::abs(mixcirc::wrap_signed(loaded.data.theta()[0])) < 1e-9);
    CHECK_THAT(loaded.data.theta()[1], WithinAbs(kPi / 2.0, 1e-12));
    // format_double is round-trip exact, so the covariate survives unchanged.
    CHECK(loaded.data.circular_cov()(1, 0) == h5.hour_angle);
    CHECK(loaded.data.linear_cov()(0, 0) == 5.0);
  }
}

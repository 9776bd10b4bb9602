#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "infobound/cli.hpp"

using infobound::CliCommand;
using infobound::ExperimentSpec;
using infobound::Json;
using infobound::SchemaError;
using infobound::kExitBoundViolated;
using infobound::kExitOk;
using infobound::kExitSchemaError;
using infobound::parse_channel_arg;
using infobound::parse_model_arg;
using infobound::run_command;
using infobound::spec_from_config_json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

// Runs the installed binary through the shell; stdout and stderr are merged
// unless a redirection suffix says otherwise.
CliResult run_cli(const std::string& args, const std::string& redirect = "2>&1") {
  const std::string cmd = std::string(INFOBOUND_CLI_PATH) + " " + args + " " + redirect;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.output.append(buf, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (const char c : text) lines += c == '\n';
  return lines;
}

}  // namespace

// ---------------------------------------------------------------------------
// Descriptor parsing (in process)

TEST_CASE("descriptor strings expand to the json forms") {
  CHECK(parse_model_arg("bernoulli") == Json{{"family", "bernoulli"}});
  CHECK(parse_model_arg("gaussian:0.5:3") ==
        Json{{"family", "gaussian_location"}, {"sigma", 0.5}, {"dim", 3}});
  CHECK(parse_model_arg("gaussian") ==
        Json{{"family", "gaussian_location"}, {"sigma", 1.0}});
  CHECK(parse_model_arg(R"({"family":"bernoulli"})") == Json{{"family", "bernoulli"}});

  CHECK(parse_channel_arg("bsc:0.25") == Json{{"channel", "bsc"}, {"p", 0.25}});
  CHECK(parse_channel_arg("awgn:1.5:2") ==
        Json{{"channel", "awgn"}, {"sigma_noise", 1.5}, {"dim", 2}});
  CHECK(parse_channel_arg("quantizer:3:-1:1:dither") ==
        Json{{"channel", "quantizer"},
             {"bits", 3},
             {"range", {-1.0, 1.0}},
             {"dither", true}});
  CHECK(parse_channel_arg("identity:4") == Json{{"channel", "identity"}, {"size", 4}});

  CHECK_THROWS_AS(parse_model_arg("cauchy"), SchemaError);
  CHECK_THROWS_AS(parse_model_arg("gaussian:abc"), SchemaError);
  CHECK_THROWS_AS(parse_channel_arg("bsc"), SchemaError);
  CHECK_THROWS_AS(parse_channel_arg("quantizer:3:-1:1:fuzz"), SchemaError);
  CHECK_THROWS_AS(parse_channel_arg("{not json"), SchemaError);
}

TEST_CASE("config documents resolve to fully populated specs") {
  const Json config = {{"command", "js-bound"},
                       {"model", {{"family", "bernoulli"}}},
                       {"channel", {{"channel", "bsc"}, {"p", 0.25}}},
                       {"theta0", 0.4},
                       {"theta1", {0.6}},
                       {"n_nodes", 3},
                       {"quad_nodes", 32},
                       {"seed", 11},
                       {"mi_method", "exact"},
                       {"format", "csv"},
                       {"allow_inconclusive", true}};
  const ExperimentSpec spec = spec_from_config_json(config);
  CHECK(spec.command == CliCommand::kJsBound);
  CHECK(spec.theta0 == std::vector<double>{0.4});
  CHECK(spec.theta1 == std::vector<double>{0.6});
  CHECK(spec.n_nodes == 3);
  CHECK(spec.quad_nodes == 32);
  REQUIRE(spec.seed.has_value());
  CHECK(*spec.seed == 11);
  CHECK(spec.format == "csv");
  CHECK(spec.allow_inconclusive == true);

  CHECK_THROWS_AS(spec_from_config_json(Json::array()), SchemaError);
  CHECK_THROWS_AS(spec_from_config_json(Json{{"command", "dance"}}), SchemaError);
  CHECK_THROWS_AS(spec_from_config_json(Json{{"command", "report"}, {"theta", "x"}}),
                  SchemaError);
}

TEST_CASE("run_command surfaces schema problems as exit code 2") {
  ExperimentSpec spec;
  spec.command = CliCommand::kVerifyFisherBound;
  spec.model = Json{{"family", "bernoulli"}};
  spec.channel = Json{{"channel", "bsc"}, {"p", 0.25}};
  std::ostringstream out, err;

  // Missing theta.
  CHECK(run_command(spec, out, err) == kExitSchemaError);
  CHECK(err.str().find("theta") != std::string::npos);

  // Inadmissible theta.
  spec.theta = {1.5};
  err.str("");
  CHECK(run_command(spec, out, err) == kExitSchemaError);

  // Monte Carlo without a seed.
  spec.theta = {0.5};
  spec.mi_method = "mc";
  err.str("");
  CHECK(run_command(spec, out, err) == kExitSchemaError);
  CHECK(err.str().find("seed") != std::string::npos);

  // A valid exact run through the same entry point.
  spec.mi_method = "exact";
  out.str("");
  err.str("");
  CHECK(run_command(spec, out, err) == kExitOk);
  const Json summary = Json::parse(out.str());
  CHECK(summary["lhs"] == 1.0);
  CHECK(summary["verdict"] == "holds");
}

// ---------------------------------------------------------------------------
// The installed binary, end to end

TEST_CASE("cli: exact bound check emits json and exits zero") {
  const CliResult r =
      run_cli("verify-fisher-bound --model bernoulli --channel bsc:0.25 --theta 0.5");
  CHECK(r.exit_code == kExitOk);
  const Json summary = Json::parse(r.output);
  CHECK(summary["lhs"] == 1.0);
  CHECK(summary["rhs"].get<double>() == doctest::Approx(1.0464962875290957).epsilon(1e-14));
  CHECK(summary["verdict"] == "holds");
  CHECK(summary["components"]["subgaussian_n"] == 2.0);
}

TEST_CASE("cli: csv format produces the exact sweep row") {
  const CliResult r = run_cli(
      "verify-fisher-bound --model bernoulli --channel bsc:0.25 --theta 0.5 --format csv");
  CHECK(r.exit_code == kExitOk);
  CHECK(r.output ==
        "name,param1,param2,lhs,rhs,slack,verdict\n"
        "fisher_information_vs_mi:matrix,0.5,0,1,1.04649628753,0.0464962875291,holds\n");
}

TEST_CASE("cli: capacity of the flagship binary channel") {
  const CliResult r = run_cli("capacity --channel bsc:0.25");
  CHECK(r.exit_code == kExitOk);
  const Json summary = Json::parse(r.output);
  CHECK(summary["capacity_nats"].get<double>() ==
        doctest::Approx(0.13081203594113697).epsilon(1e-10));
  // The symmetric channel's optimum is the uniform input.
  CHECK(summary["input_pmf"][0].get<double>() == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("cli: monte carlo requires a seed and reports it on stderr") {
  const CliResult r = run_cli(
      "verify-fisher-bound --model bernoulli --channel bsc:0.25 --theta 0.5 --mi-method mc",
      "2>&1 1>/dev/null");
  CHECK(r.exit_code == kExitSchemaError);
  CHECK(r.output.find("seed") != std::string::npos);
}

TEST_CASE("cli: seeded runs are byte reproducible") {
  const std::string cmd =
      "verify-fisher-bound --model gaussian:1 --channel awgn:1 --theta 0.3 "
      "--mi-method mc --mc-samples 50000 --seed 7";
  const CliResult a = run_cli(cmd);
  const CliResult b = run_cli(cmd);
  CHECK(a.exit_code == kExitOk);
  CHECK(a.output == b.output);
  const Json summary = Json::parse(a.output);
  CHECK(summary["uncertainty"].get<double>() > 0.0);
  CHECK(summary["verdict"] == "holds");
}

TEST_CASE("cli: two-point divergence bound along a bernoulli path") {
  const CliResult r = run_cli(
      "js-bound --model bernoulli --channel bsc:0.25 --theta0 0.4 --theta1 0.6 "
      "--n 1 --quad-nodes 16");
  CHECK(r.exit_code == kExitOk);
  const Json summary = Json::parse(r.output);
  CHECK(summary["lhs"].get<double>() ==
        doctest::Approx(0.010016733692713713).epsilon(1e-12));
  CHECK(summary["rhs"].get<double>() ==
        doctest::Approx(0.016142962228244496).epsilon(1e-12));
  CHECK(summary["components"]["subgaussian_n"] == 2.5);
  CHECK(summary["verdict"] == "holds");
}

TEST_CASE("cli: distributed simulation attaches the minimax consistency check") {
  const CliResult r = run_cli(
      "simulate-distributed --model gaussian:1 --channel awgn:1 --theta 0.3 "
      "--n 10 --trials 2000 --seed 5");
  CHECK(r.exit_code == kExitOk);
  const Json summary = Json::parse(r.output);
  CHECK(summary["estimator"] == "averaging");
  CHECK(summary["empirical_mse"].get<double>() == doctest::Approx(0.2).epsilon(0.1));
  CHECK(summary["mi_total_nats"].get<double>() ==
        doctest::Approx(10 * 0.34657359027997264).epsilon(1e-12));
  CHECK(summary.contains("lower_bound"));
  CHECK(summary["consistency"]["verdict"] == "holds");
}

TEST_CASE("cli: tightness experiment reproduces the frozen ratio") {
  const CliResult r = run_cli("tightness --sigma 1 --sigma-noise 1 --n 10 --trials 2000 --seed 99");
  CHECK(r.exit_code == kExitOk);
  const Json summary = Json::parse(r.output);
  CHECK(summary["ratio_closed_form"].get<double>() ==
        doctest::Approx(0.29759998338733856).epsilon(1e-12));
  CHECK(summary["detail"]["closed_form_mse"].get<double>() ==
        doctest::Approx(0.2).epsilon(1e-14));
  CHECK(summary["consistency"]["verdict"] == "holds");
}

TEST_CASE("cli: the standard sweep holds at every grid cell") {
  const CliResult json_run = run_cli("report");
  CHECK(json_run.exit_code == kExitOk);
  const Json summary = Json::parse(json_run.output);
  CHECK(summary["rows"] == 215);
  CHECK(summary["holds"] == 215);
  CHECK(summary["violated"] == 0);
  CHECK(summary["inconclusive"] == 0);
  CHECK(summary["min_slack"].get<double>() >= 0.0);

  const CliResult csv_run = run_cli("report --format csv");
  CHECK(csv_run.exit_code == kExitOk);
  CHECK(count_lines(csv_run.output) == 216);  // header + one line per cell
  CHECK(csv_run.output.find(",violated") == std::string::npos);
  CHECK(csv_run.output.find(",inconclusive") == std::string::npos);
}

TEST_CASE("cli: config file route matches the flag route") {
  const std::filesystem::path path = temp_file("infobound_cli_config.json");
  {
    std::ofstream out(path);
    out << Json{{"command", "capacity"}, {"channel", {{"channel", "bsc"}, {"p", 0.25}}}};
  }
  const CliResult from_config = run_cli("--config " + path.string());
  const CliResult from_flags = run_cli("capacity --channel bsc:0.25");
  CHECK(from_config.exit_code == kExitOk);
  CHECK(from_config.output == from_flags.output);
  std::filesystem::remove(path);

  const std::filesystem::path bad = temp_file("infobound_cli_bad.json");
  {
    std::ofstream out(bad);
    out << "{not json";
  }
  CHECK(run_cli("--config " + bad.string()).exit_code == kExitSchemaError);
  std::filesystem::remove(bad);
  CHECK(run_cli("--config /nonexistent/config.json").exit_code == kExitSchemaError);
}

TEST_CASE("cli: --out writes the artifact and keeps the summary on stdout") {
  const std::filesystem::path path = temp_file("infobound_cli_artifact.csv");
  const CliResult r = run_cli(
      "verify-fisher-bound --model bernoulli --channel bsc:0.25 --theta 0.5 "
      "--format csv --out " +
      path.string());
  CHECK(r.exit_code == kExitOk);
  const Json summary = Json::parse(r.output);  // stdout stays machine readable
  CHECK(summary["verdict"] == "holds");
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream artifact;
  artifact << in.rdbuf();
  CHECK(artifact.str().find("name,param1,param2") == 0);
  std::filesystem::remove(path);
}

TEST_CASE("cli: every shipped example config parses, runs, and emits valid output") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(INFOBOUND_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    INFO("config: ", entry.path().string());
    const CliResult r = run_cli("--config " + entry.path().string());
    CHECK(r.exit_code == kExitOk);
    REQUIRE_FALSE(r.output.empty());
    if (r.output.front() == '{') {
      Json parsed;
      CHECK_NOTHROW(parsed = Json::parse(r.output));
      CHECK(parsed.is_object());
    } else {
      // CSV payloads start with their header row.
      CHECK(r.output.find(',') != std::string::npos);
      CHECK(r.output.back() == '\n');
    }
  }
  CHECK(seen >= 5);  // one example per subcommand family
}

TEST_CASE("cli: bad invocations exit with the schema code") {
  CHECK(run_cli("verify-fisher-bound --model bernoulli --channel warp:1 --theta 0.5")
            .exit_code == kExitSchemaError);
  CHECK(run_cli("verify-fisher-bound --model bernoulli --channel bsc:0.25 --theta 1.5")
            .exit_code == kExitSchemaError);
  CHECK(run_cli("capacity --channel awgn:1").exit_code == kExitSchemaError);
  CHECK(run_cli("").exit_code == kExitSchemaError);  // no subcommand: help + error
  CHECK(run_cli("--help").exit_code == 0);
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iddlab/cli.hpp"
#include "iddlab/errors.hpp"

using namespace iddlab;
using nlohmann::json;

namespace {

const std::string kData = IDDLAB_TEST_DATA_DIR;

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  const auto r = run_cli(std::move(args));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  return json::parse(r.out);
}

}  // namespace

TEST_CASE("parse_samples") {
  std::istringstream two("1\n-1\n");
  const auto s = cli::parse_samples(two);
  CHECK(s.values == std::vector<double>{1.0, -1.0});
  CHECK(s.mean == 0.0);
  CHECK(s.variance == 1.0);

  std::istringstream header("# header\n0\n");
  const auto h = cli::parse_samples(header);
  CHECK(h.values == std::vector<double>{0.0});
  CHECK(h.variance == 0.0);

  std::istringstream messy("  2.5 \n\n+1e-3\r\n# c\n");
  CHECK(cli::parse_samples(messy).values == std::vector<double>{2.5, 1e-3});
}

TEST_CASE("parse_samples errors name the line") {
  std::istringstream bad("0.5\n-0.25\nabc\n");
  try {
    cli::parse_samples(bad);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream inf("1\ninf\n");
  CHECK_THROWS_AS(cli::parse_samples(inf), InputError);
  std::istringstream trailing("1.5x\n");
  CHECK_THROWS_AS(cli::parse_samples(trailing), InputError);
  std::istringstream empty("# nothing\n\n");
  CHECK_THROWS_AS(cli::parse_samples(empty), InputError);
  CHECK_THROWS_AS(cli::ingest(kData + "/does_not_exist.txt"), InputError);
}

TEST_CASE("parse_family and parse_subordinator") {
  CHECK(std::get<SymmetrizedGamma>(cli::parse_family("symgamma:shape=0.5")).shape == 0.5);
  CHECK(std::get<Gaussian>(cli::parse_family("gauss:variance=2")).variance == 2.0);
  const auto st = std::get<SymmetricStable>(cli::parse_family("stable:alpha=1.5,scale=2"));
  CHECK(st.alpha == 1.5);
  CHECK(st.scale == 2.0);
  CHECK(std::get<CompoundPoissonSym>(cli::parse_family("cpoisson:rate=3,jump=1")).rate == 3.0);
  CHECK_THROWS_AS(cli::parse_family("weird:x=1"), InputError);
  CHECK_THROWS_AS(cli::parse_family("gauss:variance=-1"), InputError);
  CHECK_THROWS_AS(cli::parse_family("gauss:mean=1"), InputError);
  CHECK_THROWS_AS(cli::parse_family("gauss:variance=1,variance=2"), InputError);

  CHECK(std::get<Drift>(cli::parse_subordinator("drift:sigma=2")).sigma == 2.0);
  CHECK(std::get<GammaSub>(cli::parse_subordinator("gamma:shape=1")).shape == 1.0);
  CHECK_THROWS_AS(cli::parse_subordinator("stable:alpha=1.5"), InputError);
}

TEST_CASE("dump_report writes 17 significant digits and non-finite strings") {
  const json j = {{"a", 0.1}, {"b", std::numeric_limits<double>::infinity()}, {"c", std::nan("")}, {"d", 3}};
  const auto text = cli::dump_report(j);
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(text.find("\"inf\"") != std::string::npos);
  CHECK(text.find("\"nan\"") != std::string::npos);
  CHECK(json::parse(text)["d"] == 3);
  CHECK(json::parse(text)["a"].get<double>() == 0.1);
}

TEST_CASE("report layout") {
  const auto j = run_json({"detect", "--family", "symgamma", "--shape", "1"});
  CHECK(j["schema"] == cli::kReportSchema);
  CHECK(j["command"] == "detect");
  CHECK(j["config"]["family"] == "symgamma");
  CHECK(j["meta"]["version"] == cli::kVersion);
  CHECK(j["result"]["gaussian_component"] == false);
  CHECK(j["diagnostics"].is_array());
}

TEST_CASE("detect with a convolved Gaussian") {
  const auto j = run_json({"detect", "--family", "cpoisson", "--rate", "3", "--convolve", "gauss:variance=1.4"});
  CHECK(j["result"]["gaussian_component"] == true);
  CHECK(std::abs(j["result"]["a_hat"].get<double>() - 0.7) < 1e-4);
}

TEST_CASE("rescale fixed point") {
  const auto j = run_json({"rescale", "--family", "gauss", "--variance", "2", "--m", "10", "--check-fixed-point"});
  CHECK(j["result"]["fixed_point"] == true);
  CHECK(j["result"]["t"].size() == 101);
}

TEST_CASE("config file sits between defaults and flags") {
  const auto cfg = kData + "/rescale_config.json";
  const auto from_file = run_json({"--config", cfg, "rescale", "--family", "symgamma"});
  CHECK(from_file["config"]["m"] == 4);
  CHECK(from_file["config"]["t-max"] == 5.0);
  CHECK(from_file["result"]["limit_deviation"]["T"] == 5.0);

  const auto flag_wins = run_json({"--config", cfg, "rescale", "--family", "symgamma", "--m", "9"});
  CHECK(flag_wins["config"]["m"] == 9);
  CHECK(flag_wins["config"]["t-max"] == 5.0);

  const auto defaults = run_json({"rescale", "--family", "symgamma"});
  CHECK(defaults["config"]["m"] == 1);
  CHECK(defaults["config"]["t-max"] == 10.0);

  // A config key the subcommand does not know is reported, not fatal.
  const auto other = run_json({"--config", cfg, "detect", "--family", "symgamma"});
  CHECK(other["diagnostics"].size() == 2);
}

TEST_CASE("empirical from sample files") {
  const auto two = run_json({"empirical", "--samples", kData + "/two_points.txt"});
  CHECK(two["result"]["moments"]["mu2"] == 1.0);
  CHECK(two["result"]["positive_on_grid"] == false);

  const auto zero = run_json({"empirical", "--samples", kData + "/header_only_zero.txt"});
  CHECK(zero["result"]["moments"]["mu2"] == 0.0);
  CHECK(zero["result"]["positive_on_grid"] == true);

  const auto bad = run_cli({"empirical", "--samples", kData + "/bad_line3.txt"});
  CHECK(bad.code == cli::input_error);
  CHECK(bad.err.find("line 3") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"nonsense"}).code == cli::input_error);
  CHECK(run_cli({"detect", "--family", "gauss", "--variance", "-1"}).code == cli::input_error);
  CHECK(run_cli({"detect", "--family", "gauss", "--schedule", "1", "2"}).code == cli::input_error);
  // Near-degenerate law: auto truncation fails.
  CHECK(run_cli({"distance", "--family", "cpoisson", "--rate", "0.01", "--vs", "gauss:variance=1", "--metric",
                 "kolmogorov"})
            .code == cli::numeric_error);
  const auto held = run_cli({"bound-check", "--family", "symgamma", "--m", "4", "--assert"});
  CHECK(held.code == cli::ok);
}

TEST_CASE("laplace subcommand") {
  const auto j = run_json({"laplace", "--lfamily", "gamma", "--shape", "1", "--lconvolve", "drift:sigma=2", "--m",
                           "100"});
  CHECK(j["result"]["support"]["touches_zero"] == false);
  CHECK(std::abs(j["result"]["limit"]["sup"].get<double>() - 0.020286026849453208) < 1e-9);
  CHECK(j["result"]["shape"]["root_rescaled"]["convex"] == true);
}

TEST_CASE("runs are deterministic apart from the timestamp") {
  const std::vector<std::string> args{"distance", "--family", "symgamma", "--vs", "gauss:variance=2", "--metric",
                                      "both"};
  auto a = run_json(args);
  auto b = run_json(args);
  CHECK(cli::dump_report(a["result"]) == cli::dump_report(b["result"]));
  a["meta"].erase("timestamp");
  b["meta"].erase("timestamp");
  CHECK(cli::dump_report(a) == cli::dump_report(b));
}

TEST_CASE("--output writes the report to a file") {
  const auto path = std::filesystem::temp_directory_path() / "iddlab_test_report.json";
  std::filesystem::remove(path);
  const auto r = run_cli({"--output", path.string(), "kurtosis", "--family", "symgamma", "--m", "5"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const auto j = json::parse(in);
  CHECK(j["result"]["kappa_m"].get<double>() == doctest::Approx(15.0));
  std::filesystem::remove(path);
}

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cartanflow/cli.hpp"
#include "cartanflow/errors.hpp"
#include "cartanflow/matrix_json.hpp"
#include "cartanflow/slice.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cartanflow::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cartanflow_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Every diagnostic is one JSON line.
void check_error_line(const std::string& err, const std::string& category) {
  REQUIRE_FALSE(err.empty());
  CHECK(err.find('\n') == err.size() - 1);
  const auto j = json::parse(err);
  CHECK(j.at("error") == category);
  CHECK(j.at("message").is_string());
}

}  // namespace

TEST_CASE("spaces list prints one descriptor per class") {
  const auto r = invoke({"spaces", "list", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j.size() == 8);
  CHECK(j[0].at("class") == "aiii");
  CHECK(j[0].at("dim_p") == 12);
  CHECK(j[0].at("real_rank") == 2);
  CHECK(j[0].at("dim_M") == 2);
  CHECK(j[0].at("positive_roots").size() == 6);
  const auto text = invoke({"spaces", "list", "--format", "text"});
  CHECK(text.code == 0);
  CHECK(text.out.find("aiii  (3,2)") != std::string::npos);
  CHECK(json::parse(invoke({"spaces", "list", "--limit", "2"}).out).size() == 15);
}

TEST_CASE("decompose validates parameters") {
  const auto r = invoke({"decompose", "--class", "aiii", "--m", "1", "--n", "2", "--seed", "1"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  check_error_line(r.err, "validation");
  CHECK(invoke({"decompose", "--class", "nope", "--m", "1", "--n", "1", "--seed", "1"}).code == 2);
  CHECK(invoke({"decompose", "--class", "aiii", "--m", "2", "--n", "1"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  check_error_line(invoke({"density", "--class", "aiii"}).err, "usage");
}

TEST_CASE("decompose from a seed") {
  const std::vector<std::string> args = {"decompose", "--class", "aiii", "--m", "3", "--n", "2", "--seed", "5",
                                         "--exact-slice"};
  const auto r = invoke(args);
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j.at("q").size() == 2);
  CHECK(j.at("residual").get<double>() < 1e-12);
  CHECK(j.at("meta").at("seed") == 5);
  CHECK(j.at("meta").at("tool") == "cartanflow");
  CHECK(j.contains("r_canonical"));
  CHECK(invoke(args).out == r.out);
}

TEST_CASE("decompose from matrix files") {
  const auto s = cartanflow::make_space(cartanflow::SpaceKind::bdi, 3, 2);
  cartanflow::SplitMix64 rng(8);
  const auto x = cartanflow::random_p(s, rng);
  const auto y = cartanflow::random_p(s, rng);
  const auto xp = scratch("x.json"), yp = scratch("y.json");
  std::ofstream(xp) << cartanflow::matrix_to_json(x).dump();
  std::ofstream(yp) << cartanflow::matrix_to_json(y).dump();
  const auto r = invoke({"decompose", "--class", "bdi", "--m", "3", "--n", "2", "--input", xp.string(), "--momentum",
                         yp.string(), "--exact-slice"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const auto k = cartanflow::matrix_from_json(j.at("k"));
  CHECK(cartanflow::frobenius_norm(k.adjoint() * k - cartanflow::Cmat::Identity(5, 5)) < 1e-12);
  const auto missing = invoke({"decompose", "--class", "bdi", "--m", "3", "--n", "2", "--input", xp.string(),
                               "--exact-slice"});
  CHECK(missing.code == 2);
  const auto wrong = invoke({"decompose", "--class", "aiii", "--m", "2", "--n", "1", "--input", xp.string()});
  CHECK(wrong.code == 2);
}

TEST_CASE("density reports the calibrated constant") {
  const auto r = invoke({"density", "--class", "aiii", "--m", "2", "--n", "1", "--q", "2", "--method", "both"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j.at("closed").get<double>() == doctest::Approx(8.0));
  CHECK(j.at("numeric").get<double>() == doctest::Approx(16.0));
  CHECK(j.at("ratio").get<double>() == doctest::Approx(j.at("constant").get<double>()));
  const auto numeric = json::parse(invoke({"density", "--class", "bdi", "--m", "3", "--n", "2", "--q", "2,1",
                                           "--method", "numeric"})
                                       .out);
  CHECK_FALSE(numeric.contains("closed"));
  CHECK(invoke({"density", "--class", "bdi", "--m", "3", "--n", "2", "--q", "1,2"}).code == 2);
  CHECK(invoke({"density", "--class", "bdi", "--m", "3", "--n", "2", "--q", "2"}).code == 2);
  CHECK(invoke({"density", "--class", "bdi", "--m", "3", "--n", "2", "--q", "2,x"}).code == 2);
}

TEST_CASE("sample writes a CSV atomically") {
  const auto path = scratch("hist.csv");
  fs::remove(path);
  const std::vector<std::string> base = {"sample", "--class", "aiii", "--m", "2", "--n", "1", "--count", "5000",
                                         "--bins", "16", "--seed", "7", "--out", path.string()};
  const auto r = invoke(base);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const std::string csv = slurp(path);
  CHECK(csv.find("# class: aiii\n") != std::string::npos);
  CHECK(csv.find("# seed: 7\n") != std::string::npos);
  CHECK(csv.find("# version: ") != std::string::npos);
  CHECK(csv.find("bin_lo,bin_hi,count,empirical_density,theoretical_density\n") != std::string::npos);
  for (const auto& entry : fs::directory_iterator(path.parent_path())) {
    CHECK(entry.path().filename().string().find(".tmp.") == std::string::npos);
  }
  auto threaded = base;
  threaded.push_back("--threads");
  threaded.push_back("4");
  threaded[threaded.size() - 3] = scratch("hist4.csv").string();
  REQUIRE(invoke(threaded).code == 0);
  CHECK(slurp(scratch("hist4.csv")) == csv);
}

TEST_CASE("failed runs leave no output file") {
  const auto path = scratch("never.csv");
  fs::remove(path);
  const auto r = invoke({"sample", "--class", "aiii", "--m", "2", "--n", "1", "--bins", "1", "--out", path.string()});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(path));
  CHECK(invoke({"sample", "--class", "aiii", "--m", "2", "--n", "1", "--threads", "0"}).code == 2);
}

TEST_CASE("thread count resolution") {
  using cartanflow::cli::resolve_threads;
  CHECK(resolve_threads(3) == 3);
  CHECK_THROWS_AS(resolve_threads(0), cartanflow::ValidationError);
  ::setenv("CARTANFLOW_THREADS", "2", 1);
  CHECK(resolve_threads(std::nullopt) == 2);
  CHECK(resolve_threads(5) == 5);
  ::setenv("CARTANFLOW_THREADS", "two", 1);
  CHECK_THROWS_AS(resolve_threads(std::nullopt), cartanflow::ValidationError);
  ::unsetenv("CARTANFLOW_THREADS");
  CHECK(resolve_threads(std::nullopt) == 1);
}

TEST_CASE("rank-two sample output has per-coordinate sections") {
  const auto r = invoke({"sample", "--class", "ai", "--n", "3", "--count", "100", "--bins", "4", "--seed", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# coordinate 1\n") != std::string::npos);
  CHECK(r.out.find("# coordinate 2\n") != std::string::npos);
  CHECK(r.out.find(",nan\n") != std::string::npos);
}

TEST_CASE("flow CSV columns") {
  const auto r = invoke({"flow", "--class", "aiii", "--m", "2", "--n", "1", "--seed", "3", "--t-max", "0.5",
                         "--steps", "50", "--compare"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("t,q_1,H,l_spec_1,l_spec_2,l_spec_3,deviation\n") != std::string::npos);
  CHECK(r.out.find("# status: complete\n") != std::string::npos);
  std::size_t rows = 0;
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty() && line[0] != '#' && line[0] != 't') ++rows;
  }
  CHECK(rows == 51);
  CHECK(invoke({"flow", "--class", "aiii", "--m", "2", "--n", "1", "--seed", "3", "--steps", "0"}).code == 2);
}

TEST_CASE("verify-density") {
  const auto r = invoke({"verify-density", "--class", "bdi", "--m", "2", "--n", "1", "--count", "20000"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j.at("constant_ratio_ok") == true);
  CHECK(j.at("pass") == true);
  CHECK(j.at("ks_statistic").get<double>() < j.at("threshold").get<double>());
  const auto rank2 = json::parse(invoke({"verify-density", "--class", "ai", "--n", "3", "--count", "10"}).out);
  CHECK(rank2.at("ks_statistic").is_null());
}

TEST_CASE("help and version") {
  CHECK(invoke({"--help"}).code == 0);
  const auto v = invoke({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find(cartanflow::cli::kToolVersion) != std::string::npos);
}

// Golden tests: the CLI must reproduce direct library calls bit-for-bit.

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "spdcone/harness.hpp"
#include "spdcone/json_io.hpp"

using namespace spdcone;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(SPDCONE_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

const char* kIdentity2 = R"('{"n":2,"entries":[[1,0],[0,1]]}')";
const char* kScaled16 = R"('{"n":2,"entries":[[16,0],[0,16]]}')";

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream f(path);
  f << content;
  return path.string();
}

}  // namespace

TEST_CASE("cli dist matches the library bit-for-bit") {
  const CliResult r =
      run_cli(std::string("dist ") + kIdentity2 + " " + kScaled16);
  REQUIRE(r.exit_code == 0);
  const json out = json::parse(r.out);
  const double d16[] = {16.0, 16.0};
  const double expect =
      dist_cone(embed(SPDMatrix::identity(2)), embed(SPDMatrix::diag(d16)));
  CHECK(out["distance"].get<double>() == expect);

  const CliResult same =
      run_cli(std::string("dist ") + kIdentity2 + " " + kIdentity2);
  CHECK(json::parse(same.out)["distance"].get<double>() == 0.0);
}

TEST_CASE("cli dist of apex against a matrix is the matrix radius") {
  const CliResult r = run_cli(std::string("dist '{\"apex\":true}' ") + kScaled16);
  REQUIRE(r.exit_code == 0);
  const double d16[] = {16.0, 16.0};
  CHECK(json::parse(r.out)["distance"].get<double>() ==
        embed(SPDMatrix::diag(d16)).radius());

  // apex alone, no dimension anywhere: input error
  const CliResult bad = run_cli("dist '{\"apex\":true}' '{\"apex\":true}'");
  CHECK(bad.exit_code == 2);
  const CliResult ok = run_cli("--n 2 dist '{\"apex\":true}' '{\"apex\":true}'");
  CHECK(ok.exit_code == 0);
}

TEST_CASE("cli geodesic sampling and midpoint") {
  // K = 1: endpoints only
  const CliResult ends = run_cli(std::string("geodesic --steps 1 ") +
                                 kIdentity2 + " " + kScaled16);
  REQUIRE(ends.exit_code == 0);
  CHECK(json::parse(ends.out)["samples"].size() == 2);

  const CliResult r = run_cli(std::string("geodesic --steps 2 ") + kIdentity2 +
                              " " + kScaled16);
  REQUIRE(r.exit_code == 0);
  const json out = json::parse(r.out);
  REQUIRE(out["samples"].size() == 3);
  const double d = out["distance"].get<double>();
  for (const json& s : out["samples"])
    CHECK(std::abs(s["cumulative_length"].get<double>() -
                   s["s"].get<double>() * d) <= 1e-9);

  const CliResult m = run_cli(std::string("midpoint ") + kIdentity2 + " " +
                              kScaled16);
  REQUIRE(m.exit_code == 0);
  const json mj = json::parse(m.out);
  const double d16[] = {16.0, 16.0};
  const ConePoint expect = geodesic_cone(embed(SPDMatrix::identity(2)),
                                         embed(SPDMatrix::diag(d16)), 0.5);
  CHECK(mj["midpoint"]["r"].get<double>() == expect.radius());
}

TEST_CASE("cli mean of two points is the midpoint") {
  const CliResult r =
      run_cli(std::string("mean ") + kIdentity2 + " " + kScaled16);
  REQUIRE(r.exit_code == 0);
  const json out = json::parse(r.out);
  const double d16[] = {16.0, 16.0};
  const ConePoint mid = geodesic_cone(embed(SPDMatrix::identity(2)),
                                      embed(SPDMatrix::diag(d16)), 0.5);
  CHECK(out["mean"]["r"].get<double>() ==
        doctest::Approx(mid.radius()).epsilon(1e-12));
  CHECK(out["residual_ok"].get<bool>());

  const CliResult w = run_cli(std::string("mean --weights 1,3 ") + kIdentity2 +
                              " " + kScaled16);
  REQUIRE(w.exit_code == 0);
  const ConePoint q = geodesic_cone(embed(SPDMatrix::identity(2)),
                                    embed(SPDMatrix::diag(d16)), 0.75);
  CHECK(json::parse(w.out)["mean"]["r"].get<double>() ==
        doctest::Approx(q.radius()).epsilon(1e-12));

  // the mean of a single input is the input
  const CliResult one = run_cli(std::string("mean ") + kScaled16);
  REQUIRE(one.exit_code == 0);
  CHECK(json::parse(one.out)["mean"]["r"].get<double>() ==
        embed(SPDMatrix::diag(d16)).radius());
}

TEST_CASE("cli field pipeline: validate, dist, csv import") {
  const std::string field_a = temp_file("spdcone_test_a.json", R"({
    "n": 2, "atoms": [
      {"id": "p", "weight": 0.5, "value": {"n":2, "entries":[[1,0],[0,1]]}},
      {"id": "q", "weight": 0.5, "value": {"n":2, "entries":[[2,0.5],[0.5,1]]}}
    ]})");
  const std::string field_b = temp_file("spdcone_test_b.json", R"({
    "n": 2, "atoms": [
      {"id": "p", "weight": 0.5, "value": {"apex": true}},
      {"id": "q", "weight": 0.5, "value": {"n":2, "entries":[[1,0],[0,4]]}}
    ]})");

  CHECK(run_cli("validate " + field_a).exit_code == 0);

  const CliResult d = run_cli("dist " + field_a + " " + field_b);
  REQUIRE(d.exit_code == 0);
  const json out = json::parse(d.out);
  CHECK(out["kind"] == "field");
  CHECK(out["per_atom"].size() == 2);

  // CSV import equals the JSON route for matrix-valued fields
  const std::string csv = temp_file("spdcone_test_c.csv",
                                    "id,weight,e00,e01,e10,e11\n"
                                    "p,0.5,1,0,0,1\n"
                                    "q,0.5,2,0.5,0.5,1\n");
  const CliResult dc = run_cli("dist " + csv + " " + field_b);
  REQUIRE(dc.exit_code == 0);
  CHECK(json::parse(dc.out)["distance"] == out["distance"]);

  // two single-atom fields give the same number as dist on their values
  const std::string single_a = temp_file("spdcone_test_sa.json", R"({
    "n": 2, "atoms": [
      {"id": "x", "weight": 1.0, "value": {"n":2, "entries":[[1,0],[0,1]]}}]})");
  const std::string single_b = temp_file("spdcone_test_sb.json", R"({
    "n": 2, "atoms": [
      {"id": "x", "weight": 1.0, "value": {"n":2, "entries":[[16,0],[0,16]]}}]})");
  const CliResult ds = run_cli("dist " + single_a + " " + single_b);
  const CliResult dp =
      run_cli(std::string("dist ") + kIdentity2 + " " + kScaled16);
  CHECK(json::parse(ds.out)["distance"] == json::parse(dp.out)["distance"]);

  const std::string bad = temp_file("spdcone_test_bad.json", R"({
    "n": 2, "atoms": [
      {"id": "p", "weight": 0.5, "value": {"n":2, "entries":[[1,2],[2,1]]}}
    ]})");
  CHECK(run_cli("validate " + bad).exit_code == 2);

  // mixing a field with a point is an input error
  CHECK(run_cli("dist " + field_a + " " + std::string(kIdentity2)).exit_code == 2);
}

TEST_CASE("cli cat0-check is reproducible and CI-friendly") {
  const std::string args = "--seed 7 cat0-check --suite cn_cone --samples 100";
  const CliResult r1 = run_cli(args);
  const CliResult r2 = run_cli(args);
  CHECK(r1.exit_code == 0);
  CHECK(r1.out == r2.out);
  const json rep = json::parse(r1.out);
  CHECK(rep["pass"].get<bool>());
  CHECK(rep["samples"].get<int>() == 100);

  // absurd tolerance forces a nonzero exit
  const CliResult fail =
      run_cli("--seed 7 --tolerance -0.5 cat0-check --suite cn_cone --samples 50");
  CHECK(fail.exit_code == 1);

  const CliResult all = run_cli("--seed 3 cat0-check --suite all --samples 30");
  CHECK(all.exit_code == 0);
  CHECK(json::parse(all.out)["suites"].size() == 5);
}

TEST_CASE("cli oracle-check in affine calibration mode") {
  const CliResult r = run_cli(
      "--seed 11 oracle-check --metric affine --pairs 3 --nodes 32 --n 2");
  CHECK(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["suite"] == "oracle_affine");
  CHECK(rep["pass"].get<bool>());
}

TEST_CASE("cli info and output modes") {
  const CliResult r = run_cli(std::string("info ") + kScaled16);
  REQUIRE(r.exit_code == 0);
  const json out = json::parse(r.out);
  CHECK(out["kind"] == "point");
  CHECK(out["n"] == 2);
  CHECK(out["apex"] == false);

  const CliResult csv =
      run_cli(std::string("--output csv dist ") + kIdentity2 + " " + kScaled16);
  REQUIRE(csv.exit_code == 0);
  CHECK(csv.out.find("key,value") != std::string::npos);

  CHECK(run_cli("dist '{\"nonsense\":1}' " + std::string(kIdentity2)).exit_code ==
        2);
  CHECK(run_cli("dist not_a_file.json " + std::string(kIdentity2)).exit_code == 2);
}

#include "catch_amalgamated.hpp"

#include "critval/cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace critval::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("critval-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

JobConfig job(const std::string& cmd, std::vector<std::string> args) {
  JobConfig c;
  c.command = cmd;
  c.args = std::move(args);
  return c;
}

}  // namespace

TEST_CASE("SHA-256 known answers") {
  REQUIRE(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  REQUIRE(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config validation and seeding") {
  JobConfig c = job("critical", {"12", "2"});
  REQUIRE_NOTHROW(c.validate());
  c.precision = 19;
  REQUIRE_THROWS(c.validate());
  c.precision = 50;
  c.terms = 99;
  REQUIRE_THROWS(c.validate());
  c.terms = 0;
  JobConfig d = c;
  REQUIRE(c.seed() == d.seed());
  d.precision = 60;
  REQUIRE(c.seed() != d.seed());
  d.cache_dir = "/elsewhere";
  d.precision = 50;
  REQUIRE(c.seed() == d.seed());  // the cache location does not change results
  REQUIRE(run(c).exit_code == kOk);
  c.precision = 10;
  REQUIRE(run(c).exit_code == kRefused);
}

TEST_CASE("coefficient cache: write, hit, corruption") {
  fs::path dir = scratch_dir("cache");
  JobConfig c = job("coeffs", {"12", "100"});
  c.cache_dir = dir.string();
  auto first = run(c);
  REQUIRE(first.exit_code == kOk);
  REQUIRE(first.report["schema"] == 1);
  REQUIRE(first.report["files"].size() == 1);
  REQUIRE(first.report["files"][0]["status"] == "written");
  fs::path file = first.report["files"][0]["path"].get<std::string>();
  std::string bytes = slurp(file);
  REQUIRE(bytes.find("\n2 -24\n") != std::string::npos);
  REQUIRE(bytes.find("\n11 534612\n") != std::string::npos);

  auto second = run(c);
  REQUIRE(second.report["files"][0]["status"] == "hit");
  REQUIRE(slurp(file) == bytes);

  {
    std::ofstream out(file, std::ios::app);
    out << "101 0\n";
  }
  auto third = run(c);
  REQUIRE(third.report["files"][0]["status"] == "regenerated");
  REQUIRE(slurp(file) == bytes);

  fs::remove(fs::path(file.string() + ".sha256"));
  REQUIRE(run(c).report["files"][0]["status"] == "regenerated");

  JobConfig e = job("coeffs", {"2", "10"});
  e.cache_dir = dir.string();
  auto empty = run(e);
  REQUIRE(empty.exit_code == kOk);
  REQUIRE(empty.text.find("empty space") != std::string::npos);

  JobConfig two = job("coeffs", {"24", "120"});
  two.cache_dir = dir.string();
  REQUIRE(run(two).report["files"].size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("cache directory falls back to the environment") {
  ::setenv(kCacheEnv, "/tmp/critval-env-cache", 1);
  JobConfig c;
  REQUIRE(c.resolved_cache_dir() == fs::path("/tmp/critval-env-cache"));
  c.cache_dir = "/x";
  REQUIRE(c.resolved_cache_dir() == fs::path("/x"));
  ::unsetenv(kCacheEnv);
}

TEST_CASE("critical and euler-check exit codes") {
  auto ok = run(job("critical", {"12", "2"}));
  REQUIRE(ok.exit_code == kOk);
  REQUIRE(ok.report["classical_m"] == "18");
  REQUIRE(run(job("critical", {"3", "1"})).exit_code == kOk);
  auto refused = run(job("critical", {"2", "1"}));
  REQUIRE(refused.exit_code == kRefused);
  REQUIRE(refused.text.find("k >= 4") != std::string::npos);

  JobConfig e = job("euler-check", {"12", "2"});
  auto rep = run(e);
  REQUIRE(rep.exit_code == kOk);
  REQUIRE(rep.report["all_pass"] == true);
  REQUIRE(run(job("euler-check", {"12", "5"})).exit_code == kRefused);
  e.args = {"12", "5"};
  e.assume_functoriality = true;
  e.prime_bound = 20;
  REQUIRE(run(e).exit_code == kOk);
  REQUIRE(run(job("nonsense", {})).exit_code == kRefused);
  REQUIRE(run(job("critical", {"12"})).exit_code == kRefused);
}

TEST_CASE("lvalue reports, poles and JSON output") {
  fs::path dir = scratch_dir("json");
  JobConfig z = job("lvalue", {"zeta", "1", "trivial", "2"});
  z.json_path = (dir / "z.json").string();
  z.seed_from_config = true;
  auto r = run(z);
  REQUIRE(r.exit_code == kOk);
  auto j = nlohmann::json::parse(slurp(z.json_path));
  REQUIRE(j["schema"] == 1);
  REQUIRE(j["probe_seed"] == z.seed());
  REQUIRE(j["value"]["certified_digits"].get<int>() >= 50);
  REQUIRE(run(z).report.dump() == r.report.dump());  // deterministic

  auto pole = run(job("lvalue", {"zeta", "1", "trivial", "1"}));
  REQUIRE(pole.exit_code == kRefused);
  REQUIRE(pole.report["pole"] == true);

  JobConfig d = job("lvalue", {"12", "1", "trivial", "10"});
  d.precision = 30;
  auto dv = run(d);
  REQUIRE(dv.exit_code == kOk);
  REQUIRE(dv.report["analytic_point"] == "9/2");
  auto gp = run(job("lvalue", {"12", "1", "trivial", "0"}));
  REQUIRE(gp.exit_code == kRefused);
  fs::remove_all(dir);
}

TEST_CASE("twist verification through the command layer") {
  JobConfig t = job("verify-twist", {"12", "1", "5.2"});
  t.precision = 30;
  auto r = run(t);
  REQUIRE(r.exit_code == kOk);
  REQUIRE(r.report["verdict"] == "recognized");
  auto odd = job("verify-twist", {"12", "1", "4.1"});
  odd.precision = 30;
  REQUIRE(run(odd).exit_code == kRefused);
  auto f = job("verify-twist", {"12", "3", "5.2"});
  REQUIRE(run(f).exit_code == kRefused);
  auto tiny = job("verify-twist", {"12", "1", "5.2"});
  tiny.terms = 100;
  REQUIRE(run(tiny).exit_code == kInsufficient);
}

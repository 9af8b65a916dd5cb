#pragma once

// Command layer behind the critval executable: job configuration, the
// coefficient cache and report emission.  Every command returns its exit
// code together with the JSON report and a human-readable text.

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace critval::cli {

enum ExitCode : int {
  kOk = 0,
  kNotRecognized = 2,
  kRefused = 3,
  kInsufficient = 4,
};

/// Environment variable holding the default cache directory.
inline constexpr const char* kCacheEnv = "CRITVAL_CACHE_DIR";

struct JobConfig {
  std::string command;
  std::vector<std::string> args;
  int precision = 50;         // P, digits
  std::size_t terms = 0;      // M; 0 = sized automatically
  long prime_bound = 100;
  std::string cache_dir;      // empty = $CRITVAL_CACHE_DIR or ./critval-cache
  bool assume_functoriality = false;
  bool exploratory = false;
  std::string json_path;
  bool seed_from_config = false;
  int probes = 2;             // functional-equation probes for lvalue

  /// Throws std::invalid_argument when P < 20 or 0 < M < 100.
  void validate() const;
  /// Canonical JSON of everything that influences results.
  nlohmann::json canonical() const;
  /// First 8 bytes of SHA-256(canonical().dump()).
  std::uint64_t seed() const;
  std::filesystem::path resolved_cache_dir() const;
};

struct CommandResult {
  int exit_code = kOk;
  nlohmann::json report;
  std::string text;
};

std::string sha256_hex(const std::string& bytes);

/// Coefficient files keyed by (weight, M) with a SHA-256 sidecar.  Writes
/// go through one mutex and an atomic rename; a file whose content does not
/// match its sidecar is regenerated.
class CoefficientCache {
 public:
  explicit CoefficientCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  struct Entry {
    std::filesystem::path path;
    std::string status;  // "hit", "written", "regenerated"
    std::string sha256;
    std::string label;
  };
  /// All newforms of level 1 and weight k to M coefficients.
  std::vector<Entry> level_one(int k, std::size_t M);

  static std::string file_name(int k, std::size_t M, std::size_t orbit, std::size_t member);
  const std::filesystem::path& dir() const { return dir_; }

 private:
  bool valid(const std::filesystem::path& file) const;
  void write_atomic(const std::filesystem::path& file, const std::string& bytes);

  std::filesystem::path dir_;
  static std::mutex write_mu_;
};

CommandResult cmd_coeffs(const JobConfig& cfg, int k, std::size_t M);
CommandResult cmd_critical(const JobConfig& cfg, int k, int n);
CommandResult cmd_euler_check(const JobConfig& cfg, int k, int n);
/// form: "zeta", a weight (first newform of level 1) or a coefficient file.
/// s: the classical point, "p/q" or decimal.
CommandResult cmd_lvalue(const JobConfig& cfg, const std::string& form, int r, const std::string& xi,
                         const std::string& s);
CommandResult cmd_verify_twist(const JobConfig& cfg, int k, int n, const std::string& xi);
CommandResult cmd_verify_galois(const JobConfig& cfg, int k, int n, const std::string& xi1, const std::string& xi2);

/// Dispatches cfg.command with cfg.args, mapping library exceptions to exit
/// codes.  Writes the report to cfg.json_path when set.
CommandResult run(const JobConfig& cfg);

}  // namespace critval::cli

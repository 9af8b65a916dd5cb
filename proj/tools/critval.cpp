#include "critval/cli/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace critval::cli;
  CLI::App app{"critval: critical values of symmetric power L-functions"};
  app.require_subcommand(1);

  JobConfig cfg;
  bool print_json = false;
  app.add_option("--precision", cfg.precision, "target digits P (>= 20)");
  app.add_option("--terms", cfg.terms, "coefficient budget M (>= 100; default automatic)");
  app.add_option("--prime-bound", cfg.prime_bound, "largest prime for euler-check");
  app.add_option("--cache-dir", cfg.cache_dir, std::string("coefficient cache (default $") + kCacheEnv + ")");
  app.add_flag("--assume-functoriality", cfg.assume_functoriality, "allow Sym^r with r >= 5");
  app.add_flag("--exploratory", cfg.exploratory, "allow odd twists and non-predicted points");
  app.add_option("--json", cfg.json_path, "write the JSON report here");
  app.add_flag("--seed-from-config", cfg.seed_from_config, "seed probe points from the config hash");
  app.add_option("--probes", cfg.probes, "functional-equation probes for lvalue");
  app.add_flag("--print-json", print_json, "print the JSON report instead of text");

  std::vector<std::string> args;
  struct Sub {
    const char* name;
    const char* help;
    const char* usage;
  };
  const Sub subs[] = {
      {"coeffs", "write newform coefficients of weight k to the cache", "k M"},
      {"critical", "critical set and twist recipe for (k, n)", "k n"},
      {"euler-check", "exact Clebsch-Gordan factorization up to --prime-bound", "k n"},
      {"lvalue", "L(Sym^r f x xi, s) at a classical point", "zeta|k|file r xi s"},
      {"verify-twist", "twist-ratio recognition", "k n xi"},
      {"verify-galois", "Galois equivariance of the double ratio", "k n xi1 xi2"},
  };
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->fallthrough();
    sc->add_option("args", args, s.usage)->required();
    sc->callback([&cfg, name = std::string(s.name)] { cfg.command = name; });
  }
  CLI11_PARSE(app, argc, argv);
  cfg.args = args;

  CommandResult res;
  try {
    res = run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "critval: " << e.what() << "\n";
    return 1;
  }
  if (print_json)
    std::cout << res.report.dump(2) << "\n";
  else
    std::cout << res.text;
  return res.exit_code;
}

#include "critval/cli/commands.hpp"

#include "critval/arch/arch.hpp"
#include "critval/characters/character.hpp"
#include "critval/euler/euler.hpp"
#include "critval/eval/lfunction.hpp"
#include "critval/modform/newform.hpp"
#include "critval/recognize/recognize.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace critval::cli {

namespace fs = std::filesystem;
using num::Complex;
using num::PrecisionScope;
using num::Real;

std::mutex CoefficientCache::write_mu_;

// ---------------------------------------------------------------------------
// Config

void JobConfig::validate() const {
  if (precision < 20) throw std::invalid_argument("--precision must be at least 20 digits");
  if (terms != 0 && terms < 100) throw std::invalid_argument("--terms must be at least 100");
  if (prime_bound < 2) throw std::invalid_argument("--prime-bound must be at least 2");
}

nlohmann::json JobConfig::canonical() const {
  return {{"command", command},
          {"args", args},
          {"precision", precision},
          {"terms", terms},
          {"prime_bound", prime_bound},
          {"assume_functoriality", assume_functoriality},
          {"exploratory", exploratory},
          {"probes", probes}};
}

std::uint64_t JobConfig::seed() const {
  std::string h = sha256_hex(canonical().dump());
  return std::stoull(h.substr(0, 16), nullptr, 16);
}

fs::path JobConfig::resolved_cache_dir() const {
  if (!cache_dir.empty()) return cache_dir;
  if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
  return "critval-cache";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

// ---------------------------------------------------------------------------
// Cache

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path sidecar(const fs::path& p) { return fs::path(p.string() + ".sha256"); }

}  // namespace

std::string CoefficientCache::file_name(int k, std::size_t M, std::size_t orbit, std::size_t member) {
  return "level1.k" + std::to_string(k) + ".o" + std::to_string(orbit) + ".m" + std::to_string(member) + ".M" +
         std::to_string(M) + ".txt";
}

bool CoefficientCache::valid(const fs::path& file) const {
  std::error_code ec;
  if (!fs::exists(file, ec) || !fs::exists(sidecar(file), ec)) return false;
  std::string want = read_file(sidecar(file));
  while (!want.empty() && std::isspace(static_cast<unsigned char>(want.back()))) want.pop_back();
  return sha256_hex(read_file(file)) == want;
}

void CoefficientCache::write_atomic(const fs::path& file, const std::string& bytes) {
  std::lock_guard<std::mutex> lock(write_mu_);
  fs::create_directories(file.parent_path());
  auto put = [](const fs::path& target, const std::string& data) {
    fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << data;
      if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
  };
  put(file, bytes);
  put(sidecar(file), sha256_hex(bytes) + "\n");
}

std::vector<CoefficientCache::Entry> CoefficientCache::level_one(int k, std::size_t M) {
  const int dim = mf::cusp_dimension(k);
  std::vector<Entry> out;
  if (dim == 0) return out;
  // Orbit layout is unknown before generation; count files against the
  // dimension.
  std::vector<fs::path> expected;
  bool all_valid = true, any_present = false;
  for (std::size_t o = 0;; ++o) {
    bool found = false;
    for (std::size_t m = 0;; ++m) {
      fs::path p = dir_ / file_name(k, M, o, m);
      std::error_code ec;
      if (!fs::exists(p, ec)) break;
      found = any_present = true;
      expected.push_back(p);
      if (!valid(p)) all_valid = false;
    }
    if (!found) break;
  }
  if (any_present && all_valid && expected.size() == static_cast<std::size_t>(dim)) {
    for (const auto& p : expected) {
      out.push_back({p, "hit", sha256_hex(read_file(p)), p.stem().string()});
    }
    return out;
  }
  auto orbits = mf::level_one_newforms(k, M);
  for (std::size_t o = 0; o < orbits.size(); ++o)
    for (std::size_t m = 0; m < orbits[o].members.size(); ++m) {
      fs::path p = dir_ / file_name(k, M, o, m);
      std::string bytes = mf::format_coefficients(orbits[o].members[m]);
      std::error_code ec;
      const bool existed = fs::exists(p, ec);
      std::string status = "written";
      if (existed) {
        if (valid(p) && read_file(p) == bytes) {
          out.push_back({p, "hit", sha256_hex(bytes), p.stem().string()});
          continue;
        }
        status = "regenerated";
      }
      write_atomic(p, bytes);
      out.push_back({p, status, sha256_hex(bytes), p.stem().string()});
    }
  return out;
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

nlohmann::json cjson(const Complex& z) { return {{"re", z.re.to_string()}, {"im", z.im.to_string()}}; }

/// "7/2", "10", "-1.25" as an exact rational.
mpq_class parse_point(const std::string& text) {
  std::string t = text;
  if (t.find('.') == std::string::npos) {
    mpq_class q;
    if (q.set_str(t, 10) != 0) throw std::invalid_argument("cannot parse point '" + text + "'");
    q.canonicalize();
    return q;
  }
  bool neg = !t.empty() && t[0] == '-';
  if (neg || (!t.empty() && t[0] == '+')) t = t.substr(1);
  auto dot = t.find('.');
  std::string ip = t.substr(0, dot), fp = t.substr(dot + 1);
  if (ip.empty()) ip = "0";
  for (char c : ip + fp)
    if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("cannot parse point '" + text + "'");
  mpz_class num(ip + fp), den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
  mpq_class q(neg ? mpz_class(-num) : num, den);
  q.canonicalize();
  return q;
}

std::vector<mf::NewformOrbit> forms(int k, std::size_t M) {
  if (mf::cusp_dimension(k) == 0)
    throw recognize::PreconditionRefusal("S_" + std::to_string(k) + "(SL2(Z)) is an empty space");
  return mf::level_one_newforms(k, M);
}

int verdict_code(recognize::Verdict v) {
  switch (v) {
    case recognize::Verdict::Recognized: return kOk;
    case recognize::Verdict::NotRecognized: return kNotRecognized;
    case recognize::Verdict::Inconclusive: return kInsufficient;
  }
  return kNotRecognized;
}

recognize::ExperimentOptions experiment_options(const JobConfig& cfg) {
  recognize::ExperimentOptions o;
  o.precision = cfg.precision;
  o.terms = cfg.terms;
  o.assume_functoriality = cfg.assume_functoriality;
  o.exploratory = cfg.exploratory;
  return o;
}

/// Coefficients the twisted L-function at the predicted point needs.
std::size_t experiment_terms(const JobConfig& cfg, int k, int n, long conductor) {
  if (cfg.terms) return cfg.terms;
  const int r = 2 * n - 1;
  mpq_class s = arch::classical_critical_point(k, n) - mpq_class(static_cast<long>(r) * (k - 1), 2);
  PrecisionScope scope(cfg.precision + 30);
  return recognize::suggested_terms(k, r, conductor, 1, Complex(Real(s)), cfg.precision + 10);
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

CommandResult cmd_coeffs(const JobConfig& cfg, int k, std::size_t M) {
  CommandResult res;
  nlohmann::json j{{"command", "coeffs"}, {"weight", k}, {"terms", M}};
  if (M < 1) throw recognize::PreconditionRefusal("M must be positive");
  if (mf::cusp_dimension(k) == 0) {
    res.text = "S_" + std::to_string(k) + "(SL2(Z)) is an empty space (dimension 0); no file written\n";
    j["dimension"] = 0;
    j["files"] = nlohmann::json::array();
    j["message"] = "empty space";
    res.report = j;
    return res;
  }
  CoefficientCache cache(cfg.resolved_cache_dir());
  auto entries = cache.level_one(k, M);
  nlohmann::json files = nlohmann::json::array();
  std::ostringstream os;
  for (const auto& e : entries) {
    files.push_back({{"path", e.path.string()}, {"status", e.status}, {"sha256", e.sha256}, {"label", e.label}});
    os << e.status << "  " << e.path.string() << "\n";
  }
  j["dimension"] = mf::cusp_dimension(k);
  j["files"] = files;
  res.report = j;
  res.text = os.str();
  return res;
}

CommandResult cmd_critical(const JobConfig&, int k, int n) {
  CommandResult res;
  arch::CriticalDatum d = arch::twist_recipe(k, n);
  res.report = arch::to_json(d);
  res.report["command"] = "critical";
  res.text = arch::critical_table_text(k, k, n, n);
  return res;
}

CommandResult cmd_euler_check(const JobConfig& cfg, int k, int n) {
  CommandResult res;
  auto orbits = forms(k, static_cast<std::size_t>(cfg.prime_bound) + 1);
  nlohmann::json reports = nlohmann::json::array();
  bool pass = true;
  std::ostringstream os;
  for (const auto& orb : orbits) {
    const auto& f = orb.members.front();
    euler::CGReport r = euler::verify_clebsch_gordan(f, n, cfg.prime_bound, cfg.assume_functoriality);
    pass = pass && r.all_pass();
    reports.push_back(euler::to_json(r));
    os << f.label << "  n=" << n << "  primes<=" << cfg.prime_bound << "  checked=" << r.records.size()
       << "  " << (r.all_pass() ? "all-pass" : "MISMATCH") << "\n";
  }
  res.report = {{"command", "euler-check"}, {"weight", k}, {"n", n}, {"prime_bound", cfg.prime_bound},
                {"forms", reports}, {"all_pass", pass}};
  res.text = os.str();
  res.exit_code = pass ? kOk : kNotRecognized;
  return res;
}

CommandResult cmd_lvalue(const JobConfig& cfg, const std::string& form, int r, const std::string& xi_label,
                         const std::string& s_text) {
  CommandResult res;
  const int P = cfg.precision;
  PrecisionScope scope(P + 40);
  const mpq_class s_cl = parse_point(s_text);
  eval::LFunctionSpec L;
  mpq_class shift = 0;
  std::string form_label;
  if (form == "zeta") {
    if (r != 1 && r != 0) throw recognize::PreconditionRefusal("zeta takes r = 1 (or 0)");
    const Complex s{Real(s_cl)};
    std::size_t M = cfg.terms;
    if (!M) M = std::max<std::size_t>(200, 2 * eval::required_terms(eval::zeta_spec(1), s, P + 10));
    L = eval::zeta_spec(M);
    form_label = "zeta";
  } else {
    const auto xi = chars::DirichletCharacter::parse(xi_label);
    mf::Newform f;
    std::error_code ec;
    const bool numeric_weight = !form.empty() && form.find_first_not_of("0123456789") == std::string::npos;
    if (!numeric_weight && fs::exists(form, ec)) {
      f = mf::load_coefficients(form);
    } else if (numeric_weight) {
      const int k = std::stoi(form);
      shift = mpq_class(static_cast<long>(r) * (k - 1), 2);
      std::size_t M = cfg.terms;
      if (!M) M = recognize::suggested_terms(k, r, chars::primitivize(xi).conductor(), 1, Complex(Real(s_cl - shift)),
                                             P + 10);
      f = forms(k, M).front().members.front();
    } else {
      throw recognize::PreconditionRefusal("form must be 'zeta', a weight, or a coefficient file");
    }
    shift = mpq_class(static_cast<long>(r) * (f.weight - 1), 2);
    std::size_t M = cfg.terms ? cfg.terms : f.coefficient_count();
    if (M > f.coefficient_count())
      throw eval::InsufficientTerms("the form has " + std::to_string(f.coefficient_count()) + " coefficients", M);
    L = eval::build_lfunction(f, r, xi, M, cfg.assume_functoriality);
    form_label = f.label;
  }
  const mpq_class s_an = s_cl - shift;
  const Complex s{Real(s_an)};
  nlohmann::json j{{"command", "lvalue"}, {"form", form_label}, {"r", r}, {"character", xi_label},
                   {"classical_point", s_cl.get_str()}, {"analytic_point", s_an.get_str()}};
  if (eval::is_gamma_pole(L.gamma, s)) {
    res.exit_code = kRefused;
    j["pole"] = true;
    j["message"] = "the gamma factor has a pole at the requested point";
    res.report = j;
    res.text = "pole: gamma factor of " + L.id + " is singular at s = " + s_an.get_str() + " (analytic)\n";
    return res;
  }
  for (const auto& pt : L.poles)
    if (pt.location == s_an) {
      res.exit_code = kRefused;
      j["pole"] = true;
      j["message"] = "the L-function has a pole at the requested point";
      j["residue"] = pt.residue.get_str();
      res.report = j;
      res.text = "pole: " + L.id + " has a pole at s = " + s_an.get_str() + " with residue " +
                 pt.residue.get_str() + "\n";
      return res;
    }
  if (!L.root_number) {
    eval::RootNumberResult rn = eval::solve_root_number(L, 30);
    j["root_number_residual_log10"] = rn.residual;
  }
  eval::EvalOptions eo;
  eo.digits = P;
  eval::EvalResult er = eval::evaluate(L, s, eo);
  j["pole"] = false;
  j["value"] = eval::to_json(er, L.id, P);
  j["root_number"] = cjson(*L.root_number);
  j["conductor"] = L.conductor;
  const std::uint64_t seed = cfg.seed_from_config ? cfg.seed() : 0;
  j["probe_seed"] = seed;
  nlohmann::json probes = nlohmann::json::array();
  double worst = -1e300;
  for (const Complex& z : eval::probe_points(seed, cfg.probes)) {
    double fe = eval::fe_residual(L, z, std::min(P, 40), 0.83);
    worst = std::max(worst, fe);
    probes.push_back({{"s", cjson(z)}, {"log10_residual", fe}});
  }
  j["fe_probes"] = probes;
  res.report = j;
  std::ostringstream os;
  os << L.id << " at s = " << s_an.get_str() << " (classical " << s_cl.get_str() << ")\n"
     << "  L = " << er.full_value.re.to_string(P) << (er.full_value.im.sign() < 0 ? " - " : " + ")
     << abs(er.full_value.im).to_string(P) << "i\n"
     << "  certified digits " << er.certified_digits << ", terms " << er.terms << "\n";
  res.text = os.str();
  res.exit_code = er.certified ? kOk : kInsufficient;
  return res;
}

CommandResult cmd_verify_twist(const JobConfig& cfg, int k, int n, const std::string& xi_label) {
  CommandResult res;
  const auto xi = chars::DirichletCharacter::parse(xi_label);
  if (n < 1) throw recognize::PreconditionRefusal("n must be at least 1");
  if (2 * n - 1 >= 5 && !cfg.assume_functoriality)
    throw eval::FunctorialityRequired("Sym^" + std::to_string(2 * n - 1) + " needs --assume-functoriality");
  arch::twist_recipe(k, n);  // refuses k below the interlacing bound
  const std::size_t M = experiment_terms(cfg, k, n, chars::primitivize(xi).conductor());
  auto f = forms(k, M).front().members.front();
  recognize::TwistReport rep = recognize::twist_ratio_experiment(f, n, xi, experiment_options(cfg));
  res.report = rep.json;
  res.report["command"] = "verify-twist";
  res.exit_code = verdict_code(rep.recognition.verdict);
  std::ostringstream os;
  os << "Sym^" << 2 * n - 1 << " " << f.label << " twisted by " << xi.label() << " at m = "
     << rep.json.value("classical_point", "") << "\n"
     << "  ratio = " << rep.ratio.re.to_string(30) << "\n"
     << "  verdict: " << recognize::to_string(rep.recognition.verdict);
  if (rep.recognition.rational) os << "  r = " << rep.recognition.rational->get_str();
  os << "  log10 residual " << rep.recognition.log10_residual << "\n  " << rep.json.value("label", "") << "\n";
  res.text = os.str();
  return res;
}

CommandResult cmd_verify_galois(const JobConfig& cfg, int k, int n, const std::string& xi1, const std::string& xi2) {
  CommandResult res;
  const auto a = chars::DirichletCharacter::parse(xi1);
  const auto b = chars::DirichletCharacter::parse(xi2);
  if (n < 1) throw recognize::PreconditionRefusal("n must be at least 1");
  arch::twist_recipe(k, n);
  const long cond = std::max(chars::primitivize(a).conductor(), chars::primitivize(b).conductor());
  const std::size_t M = experiment_terms(cfg, k, n, cond);
  const mf::NewformOrbit* orbit = nullptr;
  auto orbits = forms(k, M);
  for (const auto& o : orbits)
    if (o.members.size() > 1) {
      orbit = &o;
      break;
    }
  if (!orbit) throw recognize::PreconditionRefusal("weight " + std::to_string(k) + " has no conjugate newforms");
  recognize::GaloisReport rep = recognize::galois_equivariance_experiment(*orbit, n, a, b, experiment_options(cfg));
  res.report = rep.json;
  res.report["command"] = "verify-galois";
  bool inconclusive = false;
  for (const auto& r : rep.recognitions) inconclusive = inconclusive || r.verdict == recognize::Verdict::Inconclusive;
  res.exit_code = rep.equivariant ? kOk : (inconclusive ? kInsufficient : kNotRecognized);
  std::ostringstream os;
  os << "weight " << k << " orbit of size " << orbit->members.size() << ", double ratio " << a.label() << " / "
     << b.label() << "\n";
  for (std::size_t i = 0; i < rep.recognitions.size(); ++i)
    os << "  member " << i << ": " << recognize::to_string(rep.recognitions[i].verdict) << "  log10 residual "
       << rep.recognitions[i].log10_residual << "\n";
  if (std::isnan(rep.log10_equivariance_residual))
    os << "  equivariance not checked (member 0 not recognized)";
  else
    os << "  equivariance log10 residual " << rep.log10_equivariance_residual;
  os << "\n  " << rep.json.value("label", "")
     << "\n";
  res.text = os.str();
  return res;
}

// ---------------------------------------------------------------------------
// Dispatch

namespace {

void need(const JobConfig& cfg, std::size_t n, const char* usage) {
  if (cfg.args.size() != n) throw std::invalid_argument(std::string("usage: critval ") + usage);
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

CommandResult refusal(int code, const std::string& kind, const std::string& msg) {
  CommandResult r;
  r.exit_code = code;
  r.report = {{"error", kind}, {"message", msg}};
  r.text = kind + ": " + msg + "\n";
  return r;
}

}  // namespace

CommandResult run(const JobConfig& cfg) {
  CommandResult res;
  try {
    cfg.validate();
    const auto& a = cfg.args;
    if (cfg.command == "coeffs") {
      need(cfg, 2, "coeffs <k> <M>");
      res = cmd_coeffs(cfg, to_int(a[0]), static_cast<std::size_t>(std::stoull(a[1])));
    } else if (cfg.command == "critical") {
      need(cfg, 2, "critical <k> <n>");
      res = cmd_critical(cfg, to_int(a[0]), to_int(a[1]));
    } else if (cfg.command == "euler-check") {
      need(cfg, 2, "euler-check <k> <n>");
      res = cmd_euler_check(cfg, to_int(a[0]), to_int(a[1]));
    } else if (cfg.command == "lvalue") {
      need(cfg, 4, "lvalue <zeta|k|file> <r> <xi> <s>");
      res = cmd_lvalue(cfg, a[0], to_int(a[1]), a[2], a[3]);
    } else if (cfg.command == "verify-twist") {
      need(cfg, 3, "verify-twist <k> <n> <xi>");
      res = cmd_verify_twist(cfg, to_int(a[0]), to_int(a[1]), a[2]);
    } else if (cfg.command == "verify-galois") {
      need(cfg, 4, "verify-galois <k> <n> <xi1> <xi2>");
      res = cmd_verify_galois(cfg, to_int(a[0]), to_int(a[1]), a[2], a[3]);
    } else {
      throw std::invalid_argument("unknown command '" + cfg.command + "'");
    }
  } catch (const recognize::PrecisionRefusal& e) {
    res = refusal(kInsufficient, "precision", e.what());
    res.report["required_precision"] = e.required;
  } catch (const eval::InsufficientTerms& e) {
    res = refusal(kInsufficient, "insufficient-terms", e.what());
    res.report["required_terms"] = e.required;
  } catch (const eval::RootNumberFailure& e) {
    res = refusal(kInsufficient, "root-number", e.what());
  } catch (const eval::KernelCrossoverFailure& e) {
    res = refusal(kInsufficient, "kernel-crossover", e.what());
  } catch (const eval::FunctorialityRequired& e) {
    res = refusal(kRefused, "functoriality-required", e.what());
  } catch (const euler::FunctorialityRequired& e) {
    res = refusal(kRefused, "functoriality-required", e.what());
  } catch (const eval::GammaPole& e) {
    res = refusal(kRefused, "pole", e.what());
  } catch (const recognize::DivisionHazard& e) {
    res = refusal(kRefused, "division-hazard", e.what());
  } catch (const arch::UnsupportedCase& e) {
    res = refusal(kRefused, "unsupported", e.what());
  } catch (const mf::UnsupportedDegree& e) {
    res = refusal(kRefused, "unsupported", e.what());
  } catch (const mf::IngestError& e) {
    res = refusal(kRefused, "ingest", e.what());
  } catch (const std::invalid_argument& e) {
    res = refusal(kRefused, "refused", e.what());
  } catch (const std::out_of_range& e) {
    res = refusal(kInsufficient, "insufficient", e.what());
  } catch (const std::length_error& e) {
    res = refusal(kInsufficient, "too-large", e.what());
  }
  res.report["schema"] = 1;
  res.report["config"] = cfg.canonical();
  res.report["exit_code"] = res.exit_code;
  if (!cfg.json_path.empty()) {
    std::ofstream out(cfg.json_path);
    if (!out) throw std::runtime_error("cannot write " + cfg.json_path);
    out << res.report.dump(2) << "\n";
  }
  return res;
}

}  // namespace critval::cli

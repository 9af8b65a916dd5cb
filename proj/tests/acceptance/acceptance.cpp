// Acceptance run: one PASS/FAIL line per criterion.  Criterion 9 only warns.
// Usage: acceptance [criterion ...]   (default: all)

#include "../support/oracles.hpp"

#include "critval/arch/arch.hpp"
#include "critval/characters/character.hpp"
#include "critval/cli/commands.hpp"
#include "critval/euler/euler.hpp"
#include "critval/eval/lfunction.hpp"
#include "critval/modform/newform.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace critval;
using num::Complex;
using num::PrecisionScope;
using num::Real;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;
int warnings = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const std::string& id, const Outcome& o, bool warn_only = false) {
  const char* tag = o.pass ? "PASS" : (warn_only ? "WARN" : "FAIL");
  std::printf("[%s] criterion %s: %s\n", tag, id.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) (warn_only ? warnings : failures) += 1;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double log10_abs_diff(const Complex& a, const Complex& b) {
  Real d = abs(a - b);
  return d.is_zero() ? -1000 : d.log10_abs();
}

std::vector<int> level_one_weights() {
  std::vector<int> ks;
  for (int k = 12; k <= 26; k += 2)
    if (mf::cusp_dimension(k) > 0) ks.push_back(k);
  return ks;
}

// ---------------------------------------------------------------------------

Outcome c1_clebsch_gordan() {
  auto t0 = std::chrono::steady_clock::now();
  long checked = 0, mismatches = 0;
  for (int k : level_one_weights())
    for (const auto& orb : mf::level_one_newforms(k, 200))
      for (const auto& f : orb.members)
        for (int n = 1; n <= 4; ++n) {
          auto rep = euler::verify_clebsch_gordan(f, n, 200);
          for (const auto& r : rep.records) {
            ++checked;
            if (!r.equal) ++mismatches;
          }
        }
  double t = seconds_since(t0);
  return {mismatches == 0 && checked > 0 && t < 60,
          std::to_string(checked) + " prime checks, " + std::to_string(mismatches) + " mismatches, " +
              fmt("%.1f s", t) + " (limit 60 s)"};
}

Outcome c2_hecke() {
  auto t0 = std::chrono::steady_clock::now();
  int forms = 0;
  std::string bad;
  for (int k : level_one_weights())
    for (const auto& orb : mf::level_one_newforms(k, 100000))
      for (const auto& f : orb.members) {
        ++forms;
        if (auto v = mf::check_invariants(f, {50, true, true}); v && bad.empty()) bad = f.label + ": " + v->detail;
      }
  return {bad.empty() && forms > 0, std::to_string(forms) + " forms to M = 100000, Ramanujan tolerance 1e-40" +
                                        (bad.empty() ? "" : "; violation " + bad) + fmt(", %.1f s", seconds_since(t0))};
}

Outcome c3_gauss() {
  PrecisionScope scope(70);
  double worst_norm = -1000;
  int count = 0;
  std::vector<chars::DirichletCharacter> prim;
  for (long c = 1; c <= 200; ++c)
    for (const auto& chi : chars::enumerate_characters(c)) {
      if (!chi.is_primitive()) continue;
      Complex g = chars::gauss_sum(chi, 50);
      worst_norm = std::max(worst_norm, log10_abs_diff(Complex(norm(g)), Complex(Real(c))));
      ++count;
      prim.push_back(chi);
    }
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<std::size_t> pick(0, prim.size() - 1);
  double worst_mult = -1000;
  int pairs = 0;
  while (pairs < 50) {
    const auto& a = prim[pick(rng)];
    const auto& b = prim[pick(rng)];
    if (oracle::gcd(a.conductor(), b.conductor()) != 1 || a.conductor() * b.conductor() > 4000) continue;
    auto ab = chars::character_product(a, b);
    Complex lhs = chars::gauss_sum(ab, 50);
    Complex rhs = a.value(b.conductor()) * b.value(a.conductor()) * chars::gauss_sum(a, 50) * chars::gauss_sum(b, 50);
    worst_mult = std::max(worst_mult, log10_abs_diff(lhs, rhs));
    ++pairs;
  }
  return {worst_norm < -45 && worst_mult < -45,
          std::to_string(count) + " primitive characters, worst log10 ||g|^2 - c| = " + fmt("%.1f", worst_norm) +
              "; 50 coprime pairs, worst log10 multiplicativity residual = " + fmt("%.1f", worst_mult)};
}

std::vector<mpq_class> listed_critical_set(int k) {
  std::vector<mpq_class> out;
  int lo = k % 2 == 0 ? 1 - k : 2 - k, hi = k % 2 == 0 ? k - 3 : k - 2;
  for (int t = lo; t <= hi; t += 2) {
    mpq_class v(t, 2);
    v.canonicalize();
    out.push_back(v);
  }
  return out;
}

Outcome c4_critical_sets() {
  int rows = 0, bad = 0;
  std::vector<int> ks;
  for (int k = 4; k <= 12; k += 2) ks.push_back(k);
  for (int k = 3; k <= 11; k += 2) ks.push_back(k);
  for (int k : ks)
    for (int n = 1; n <= 4; ++n) {
      ++rows;
      auto d = arch::twist_recipe(k, n);
      auto fp = arch::critical_set_first_principles(d.pair_atoms(), d.dual_pair_atoms());
      mpq_class m((2 * n - 1) * (k - 1) + (k % 2 == 0 ? 3 : 2), 2);
      m.canonicalize();
      if (fp != listed_critical_set(k) || arch::classical_critical_point(k, n) != m) ++bad;
    }
  return {bad == 0, std::to_string(rows) + " (k, n) rows, " + std::to_string(bad) + " disagreements"};
}

// ζ(s) by Euler–Maclaurin, real s > 1.
Real zeta_em(const Real& s, long N, int m) {
  std::vector<mpq_class> B(2 * m + 1);
  B[0] = 1;
  for (int n = 1; n <= 2 * m; ++n) {
    mpq_class acc = 0;
    mpz_class binom = 1;
    for (int k = 0; k < n; ++k) {
      acc += mpq_class(binom) * B[k];
      binom = binom * (n + 1 - k) / (k + 1);
    }
    B[n] = -acc / (n + 1);
  }
  Real sum = 0;
  for (long n = 1; n < N; ++n) sum += pow(Real(n), -s);
  Real Ns = pow(Real(N), -s);
  sum += Ns * Real(N) / (s - Real(1)) + Ns / 2L;
  Real rising = s, fact = 2, Npow = Ns / Real(N);
  for (int j = 1; j <= m; ++j) {
    if (j > 1) {
      rising = rising * (s + Real(2 * j - 3)) * (s + Real(2 * j - 2));
      fact *= (2 * j - 1) * (2 * j);
      Npow = Npow / Real(N * N);
    }
    sum += Real(B[2 * j]) * rising * Npow / fact;
  }
  return sum;
}

void c5_evaluator() {
  PrecisionScope scope(90);
  const auto triv = chars::DirichletCharacter::trivial(1);

  {  // 5a
    auto t0 = std::chrono::steady_clock::now();
    auto Z = eval::zeta_spec(1000);
    eval::solve_root_number(Z, 30);
    eval::EvalOptions eo;
    eo.digits = 50;
    auto r = eval::evaluate(Z, Complex(2), eo);
    double t = seconds_since(t0);
    double err = log10_abs_diff(r.value, Complex(zeta_em(Real(2), 60, 30)));
    report("5a", {err < -40 && t < 5, "zeta(2) vs Euler-Maclaurin: log10 error " + fmt("%.1f", err) +
                                          " (need < -40), " + fmt("%.2f s", t) + " (limit 5 s)"});
  }

  auto delta = mf::level_one_newforms(12, 60000)[0].members[0];
  {  // 5b
    const std::size_t N = 10000;
    auto tau = oracle::ramanujan_tau(N);
    Real direct = 0;
    for (std::size_t n = 1; n <= N; ++n) direct += Real(tau[n]) / pow(Real(static_cast<long>(n)), 10L);
    auto L = eval::build_lfunction(delta, 1, triv, 60000);
    eval::solve_root_number(L, 30);
    eval::EvalOptions eo;
    eo.digits = 50;
    auto r = eval::evaluate(L, Complex(Real(mpq_class(9, 2))), eo);
    double diff = log10_abs_diff(r.value, Complex(direct));
    report("5b", {diff < -25, "L(Delta, 10) vs direct series with 10^4 terms: log10 |difference| = " +
                                  fmt("%.1f", diff) + " (need < -25)"});
    // |τ(n)| ≤ d(n) n^{11/2} ≤ 2 n^6, so the tail past N is at most 2/(3 N^3).
    double tail = std::log10(2.0 / (3.0 * std::pow(double(N), 3)));
    report("5b-tail", {diff <= tail, "difference " + fmt("%.1f", diff) +
                                         " within the rigorous truncation bound of the 10^4-term series, log10 " +
                                         fmt("%.1f", tail)});
  }

  {  // 5c, 5d
    struct Case {
      std::string name;
      eval::LFunctionSpec L;
      Complex s;
    };
    std::vector<Case> cases;
    cases.push_back({"zeta", eval::zeta_spec(2000), Complex(2)});
    for (int r = 1; r <= 3; ++r)
      cases.push_back({"Sym^" + std::to_string(r) + " Delta", eval::build_lfunction(delta, r, triv, 60000),
                       Complex(Real(mpq_class(3, 2)))});
    double worst_fe = -1000, worst_dbl = -1000;
    bool skipped = false;
    std::ostringstream det;
    for (auto& c : cases) {
      eval::solve_root_number(c.L, 30);
      double fe = -1000;
      for (const auto& z : eval::probe_points(0xC0FFEE, 10)) fe = std::max(fe, eval::fe_residual(c.L, z, 50, 0.83));
      eval::EvalOptions eo;
      eo.digits = 50;
      auto r = eval::evaluate(c.L, c.s, eo);
      if (std::isnan(r.doubling_residual)) skipped = true;
      worst_fe = std::max(worst_fe, fe);
      worst_dbl = std::max(worst_dbl, std::isnan(r.doubling_residual) ? 0.0 : r.doubling_residual);
      det << " " << c.name << " (degree " << c.L.degree << "): FE " << fmt("%.1f", fe) << ", doubling "
          << fmt("%.1f", r.doubling_residual) << ";";
    }
    report("5c", {worst_fe < -40, "functional-equation residual at 10 seeded probes, worst log10 " +
                                      fmt("%.1f", worst_fe) + " (need < -40);" + det.str()});
    report("5d", {!skipped && worst_dbl < -45,
                  "term-doubling stability, worst log10 " + fmt("%.1f", worst_dbl) + " (need < -45)"});
  }
}

cli::JobConfig job(const std::string& cmd, std::vector<std::string> args, int precision) {
  cli::JobConfig c;
  c.command = cmd;
  c.args = std::move(args);
  c.precision = precision;
  return c;
}

std::string recognized_value(const nlohmann::json& rec) {
  if (rec.contains("rational")) return rec["rational"].get<std::string>();
  if (rec.contains("field_value")) return rec["field_value"].dump();
  return "-";
}

Outcome twist_case(int n, const std::string& xi, int precision, double need_residual, double limit_s,
                   bool functoriality, const std::string& save_as = "") {
  auto t0 = std::chrono::steady_clock::now();
  auto cfg = job("verify-twist", {"12", std::to_string(n), xi}, precision);
  cfg.assume_functoriality = functoriality;
  if (!save_as.empty()) cfg.json_path = save_as;
  auto res = cli::run(cfg);
  double t = seconds_since(t0);
  const auto& j = res.report;
  std::ostringstream os;
  os << "Sym^" << 2 * n - 1 << " Delta x " << xi << " at " << precision << " digits: exit " << res.exit_code;
  if (!j.contains("recognition")) {
    os << " (" << j.value("message", std::string("no report")) << ")";
    return {false, os.str()};
  }
  const auto& rec = j["recognition"];
  double resid = rec.value("log10_residual", 0.0);
  bool rational = rec.contains("rational");
  os << ", r = " << recognized_value(rec) << ", log10 residual " << fmt("%.1f", resid) << ", " << fmt("%.0f s", t);
  if (limit_s > 0) os << " (limit " << fmt("%.0f", limit_s) << " s)";
  bool ok = res.exit_code == cli::kOk && rational && resid < need_residual && (limit_s <= 0 || t < limit_s);
  return {ok, os.str()};
}

Outcome c6_shimura() {
  Outcome o = twist_case(1, "5.2", 50, -30, 120, false);
  return o;
}

std::vector<std::pair<long, std::string>> even_quadratic(const std::vector<long>& conductors) {
  std::vector<std::pair<long, std::string>> out;
  for (long q : conductors)
    for (const auto& c : chars::enumerate_characters(q, 1))
      if (c.order() == 2 && c.is_primitive()) out.push_back({q, c.label()});
  return out;
}

Outcome c8_galois() {
  auto chi = even_quadratic({5, 8});
  auto res = cli::run(job("verify-galois", {"24", "1", chi[0].second, chi[1].second}, 90));
  const auto& j = res.report;
  std::ostringstream os;
  os << "weight 24 pair, double ratio " << chi[0].second << " / " << chi[1].second << ": exit " << res.exit_code;
  if (!j.contains("field_polynomial")) {
    os << " (" << j.value("message", std::string("no report")) << ")";
    return {false, os.str()};
  }
  // the field must be Q(√144169): discriminant 144169 times a rational square
  std::vector<mpz_class> fp;
  for (const auto& c : j["field_polynomial"]) fp.emplace_back(c.get<std::string>());
  bool field_ok = false;
  if (fp.size() == 3) {
    mpz_class disc = fp[1] * fp[1] - 4 * fp[0] * fp[2];
    if (disc > 0 && disc % 144169 == 0) field_ok = mpz_perfect_square_p(mpz_class(disc / 144169).get_mpz_t()) != 0;
  }
  const auto& eqj = j["log10_equivariance_residual"];
  double eq = eqj.is_number() ? eqj.get<double>() : 0.0;
  double worst_rec = -1000;
  bool all_rec = true;
  for (const auto& m : j["members"]) {
    all_rec = all_rec && m["recognition"]["verdict"] == "recognized";
    worst_rec = std::max(worst_rec, m["recognition"].value("log10_residual", 0.0));
  }
  bool exchanged = true;
  for (const auto& c : j["equivariance"]) exchanged = exchanged && c["independently_recognized_equal"] == true;
  os << ", field Q(sqrt 144169) " << (field_ok ? "yes" : "no") << ", members recognized " << (all_rec ? "yes" : "no")
     << " (worst log10 residual " << fmt("%.1f", worst_rec) << "), sigma exchanges the values "
     << (exchanged ? "yes" : "no") << " (log10 residual " << fmt("%.1f", eq) << ")";
  return {res.exit_code == cli::kOk && field_ok && all_rec && exchanged && worst_rec < -25 && eq < -25, os.str()};
}

Outcome c10_kim_shahidi() {
  PrecisionScope scope(60);
  const auto triv = chars::DirichletCharacter::trivial(1);
  std::ostringstream os;
  bool ok = true;
  for (int r : {5, 7}) {
    auto cfg = job("lvalue", {"12", std::to_string(r), "trivial", ""}, 30);
    cfg.assume_functoriality = true;
    cfg.probes = 0;
    for (const mpq_class& an : {mpq_class(11, 10), mpq_class(3, 2)}) {
      // classical point = analytic + r(k−1)/2
      mpq_class cl = an + mpq_class(r * 11, 2);
      cl.canonicalize();
      cfg.args[3] = cl.get_str();
      auto res = cli::run(cfg);
      double lv = -1000;
      if (res.report.contains("value")) {
        const auto& v = res.report["value"];
        Complex z(Real(std::string_view(v["full_value_re"].get<std::string>())),
                  Real(std::string_view(v["full_value_im"].get<std::string>())));
        lv = abs(z).log10_abs();
      }
      bool good = res.exit_code == cli::kOk && lv > -20;
      ok = ok && good;
      os << " Sym^" << r << " at s = " << an.get_d() << ": exit " << res.exit_code << ", log10 |L| = " << fmt("%.2f", lv) << ";";
    }
  }
  return {ok, "under --assume-functoriality," + os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) only.insert(argv[i]);
  auto want = [&](const std::string& id) { return only.empty() || only.count(id) > 0; };
  auto run = [&](const std::string& id, const std::function<Outcome()>& fn, bool warn_only = false) {
    if (!want(id)) return;
    try {
      report(id, fn(), warn_only);
    } catch (const std::exception& e) {
      report(id, {false, std::string("exception: ") + e.what()}, warn_only);
    }
  };

  run("1", c1_clebsch_gordan);
  run("2", c2_hecke);
  run("3", c3_gauss);
  run("4", c4_critical_sets);
  if (want("5")) {
    try {
      c5_evaluator();
    } catch (const std::exception& e) {
      report("5", {false, std::string("exception: ") + e.what()});
    }
  }
  run("6", c6_shimura);
  char sub = 'a';
  for (const auto& [q, label] : even_quadratic({5, 8, 12, 13})) {
    std::string id = std::string("7") + sub++;
    if (!want("7") && !want(id)) continue;
    try {
      report(id, twist_case(2, label, 60, -30, 1800, false));
    } catch (const std::exception& e) {
      report(id, {false, std::string("exception: ") + e.what()});
    }
  }
  run("8", c8_galois);
  run("9", [] { return twist_case(3, "5.2", 30, -15, 0, true, "acceptance_criterion9_report.json"); }, true);
  run("10", c10_kim_shahidi);

  std::printf("acceptance: %d failed, %d warnings\n", failures, warnings);
  return failures == 0 ? 0 : 1;
}

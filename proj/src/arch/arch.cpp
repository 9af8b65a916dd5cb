#include "critval/arch/arch.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace critval::arch {

namespace {

bool is_integer(const mpq_class& q) { return q.get_den() == 1; }

std::string q_str(const mpq_class& q) { return q.get_str(); }

void require_weight(int k) {
  if (k % 2 == 0 && k < 4)
    throw UnsupportedCase("weight " + std::to_string(k) + " unsupported: needs k >= 4 for even k (k >= 3 for odd k)");
  if (k % 2 != 0 && k < 3)
    throw UnsupportedCase("weight " + std::to_string(k) + " unsupported: needs k >= 4 for even k (k >= 3 for odd k)");
}

}  // namespace

int ArchParameter::total_degree() const {
  int d = 0;
  for (const auto& s : summands) d += s.degree();
  return d;
}

bool ArchParameter::is_regular() const {
  std::vector<long> bs;
  for (const auto& s : summands)
    if (s.kind == Summand::Induced) {
      if (s.value <= 0) return false;
      bs.push_back(s.value);
    }
  std::sort(bs.begin(), bs.end());
  return std::adjacent_find(bs.begin(), bs.end()) == bs.end();
}

std::string ArchParameter::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < summands.size(); ++i) {
    if (i) out += " + ";
    const auto& s = summands[i];
    out += s.kind == Summand::Induced ? "I(" + std::to_string(s.value) + ")" : "eps^" + std::to_string(s.value);
  }
  if (norm_shift != 0) out = "(" + out + ") |.|^" + q_str(norm_shift);
  return out;
}

bool GammaAtom::has_pole_at(const mpq_class& s) const {
  mpq_class z = s + shift;
  if (!is_integer(z) || z > 0) return false;
  if (kind == C) return true;
  // Γ_R(z) = π^{−z/2}Γ(z/2): poles at z ∈ {0, −2, −4, …}.
  return mpz_class(z.get_num() % 2) == 0;
}

std::string GammaAtom::to_string() const {
  std::string out = kind == C ? "Gamma_C(s" : "Gamma_R(s";
  if (shift > 0) out += "+" + q_str(shift);
  if (shift < 0) out += q_str(shift);
  return out + ")";
}

ArchParameter sym_arch_parameter(int k, int r, const mpq_class& norm_shift, int sign_twist) {
  if (r < 0) throw std::invalid_argument("sym_arch_parameter: r must be >= 0");
  ArchParameter p;
  p.norm_shift = norm_shift;
  const long b = k - 1;
  if (r % 2 == 0) {
    // ε^{r(k−1)/2} ⊕ ⊕_{a=1}^{r/2} I(χ_{2a(k−1)})
    p.summands.push_back(Summand::sign(static_cast<long>(r / 2) * b + sign_twist));
    for (int a = 1; a <= r / 2; ++a) p.summands.push_back(Summand::induced(2L * a * b));
  } else {
    for (int a = 1; a <= (r + 1) / 2; ++a) p.summands.push_back(Summand::induced((2L * a - 1) * b));
  }
  return p;
}

std::vector<GammaAtom> gamma_shifts(const ArchParameter& p) {
  std::vector<GammaAtom> out;
  for (const auto& s : p.summands) {
    if (s.kind == Summand::Induced)
      out.push_back({GammaAtom::C, p.norm_shift + mpq_class(s.value, 2)});
    else
      out.push_back({GammaAtom::R, p.norm_shift + s.value});
  }
  for (auto& a : out) a.shift.canonicalize();
  return out;
}

ArchParameter tensor(const ArchParameter& a, const ArchParameter& b) {
  ArchParameter out;
  out.norm_shift = a.norm_shift + b.norm_shift;
  for (const auto& x : a.summands)
    for (const auto& y : b.summands) {
      if (x.kind == Summand::Sign && y.kind == Summand::Sign) {
        out.summands.push_back(Summand::sign(x.value + y.value));
      } else if (x.kind == Summand::Induced && y.kind == Summand::Induced) {
        out.summands.push_back(Summand::induced(x.value + y.value));
        long d = std::abs(x.value - y.value);
        if (d == 0) {
          out.summands.push_back(Summand::sign(0));
          out.summands.push_back(Summand::sign(1));
        } else {
          out.summands.push_back(Summand::induced(d));
        }
      } else {
        out.summands.push_back(Summand::induced(x.kind == Summand::Induced ? x.value : y.value));
      }
    }
  return out;
}

ArchParameter dual(const ArchParameter& p) {
  ArchParameter out = p;
  out.norm_shift = -p.norm_shift;
  return out;
}

std::vector<mpq_class> critical_set_table(int k, int n) {
  require_weight(k);
  if (n < 1) throw UnsupportedCase("n must be >= 1");
  // Even k: (1−k)/2 … (k−3)/2.  Odd k: (2−k)/2 … (k−2)/2.
  mpq_class lo = k % 2 == 0 ? mpq_class(1 - k, 2) : mpq_class(2 - k, 2);
  mpq_class hi = k % 2 == 0 ? mpq_class(k - 3, 2) : mpq_class(k - 2, 2);
  lo.canonicalize();
  hi.canonicalize();
  std::vector<mpq_class> out;
  for (mpq_class s = lo; s <= hi; s += 1) out.push_back(s);
  return out;
}

std::vector<mpq_class> critical_set_first_principles(const std::vector<GammaAtom>& pair,
                                                     const std::vector<GammaAtom>& dual_pair,
                                                     const mpq_class& offset, long window) {
  if (window <= 0) {
    mpq_class m = 0;
    for (const auto* list : {&pair, &dual_pair})
      for (const auto& a : *list) m = std::max(m, mpq_class(abs(a.shift)));
    mpz_class c = m.get_num() / m.get_den() + 3;
    window = c.get_si();
  }
  if (window <= 0) throw std::invalid_argument("critical_set_first_principles: empty scan window");
  mpz_class base = offset.get_num() / offset.get_den();
  mpq_class frac = offset - mpq_class(base);
  std::vector<mpq_class> out;
  for (long j = -window - 1; j <= window; ++j) {
    mpq_class s = frac + j;
    if (abs(s) > window) continue;
    bool ok = true;
    for (const auto& a : pair) ok = ok && !a.has_pole_at(s);
    for (const auto& a : dual_pair) ok = ok && !a.has_pole_at(1 - s);
    if (ok) out.push_back(s);
  }
  return out;
}

mpq_class classical_critical_point(int k, int n) {
  require_weight(k);
  if (n < 1) throw UnsupportedCase("n must be >= 1");
  long base = (2L * n - 1) * (k - 1);
  mpq_class m(base + (k % 2 == 0 ? 3 : 2), 2);
  m.canonicalize();
  return m;
}

std::string TwistDescriptor::to_string() const {
  std::vector<std::string> parts;
  if (theta_power != 0) parts.push_back("theta^" + std::to_string(theta_power));
  if (with_xi) parts.push_back("xi");
  if (norm != 0) parts.push_back("|.|^" + q_str(norm));
  if (parts.empty()) return "1";
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += " (x) " + parts[i];
  return out;
}

std::vector<mpq_class> Weight::components() const {
  // ρ_len = ((len−1)/2, (len−3)/2, …, −(len−1)/2)
  std::vector<mpq_class> out;
  for (int i = 0; i < length; ++i) {
    mpq_class r(length - 1 - 2 * i, 2);
    r.canonicalize();
    out.push_back(coeff * r + shift);
  }
  return out;
}

std::string Weight::to_string() const {
  std::string out = std::to_string(coeff) + "rho_" + std::to_string(length);
  if (shift > 0) out += "+" + q_str(shift);
  if (shift < 0) out += q_str(shift);
  return out;
}

bool interlaces(const Weight& mu, const Weight& lambda) {
  if (mu.length != lambda.length + 1) return false;
  auto m = mu.components();
  std::vector<mpq_class> mv(m.rbegin(), m.rend());
  for (auto& x : mv) x = -x;
  auto l = lambda.components();
  for (std::size_t i = 0; i < l.size(); ++i)
    if (!(mv[i] >= l[i] && l[i] >= mv[i + 1])) return false;
  return true;
}

ArchParameter CriticalDatum::pi_parameter() const {
  return sym_arch_parameter(k, n, pi_twist.norm, pi_twist.theta_power % 2);
}

ArchParameter CriticalDatum::sigma_parameter() const {
  return sym_arch_parameter(k, n - 1, sigma_twist.norm, sigma_twist.theta_power % 2);
}

std::vector<GammaAtom> CriticalDatum::pair_atoms() const {
  return gamma_shifts(tensor(pi_parameter(), sigma_parameter()));
}

std::vector<GammaAtom> CriticalDatum::dual_pair_atoms() const {
  return gamma_shifts(dual(tensor(pi_parameter(), sigma_parameter())));
}

CriticalDatum twist_recipe(int k, int n) {
  if (n < 1) throw UnsupportedCase("n must be >= 1");
  if (k < 2) throw UnsupportedCase("weight must be >= 2");
  CriticalDatum d;
  d.k = k;
  d.n = n;
  d.xi_label = "xi";
  d.theta_label = "theta";
  const bool k_even = k % 2 == 0, n_even = n % 2 == 0;
  d.parity_case = std::string(k_even ? "k-even" : "k-odd") + "," + (n_even ? "n-even" : "n-odd");
  d.mu = {k - 2, n + 1, 0};
  d.lambda = {k - 2, n, 0};
  auto sgn = [](long e) { return e % 2 == 0 ? 1 : -1; };
  const mpq_class half(1, 2);
  if (n_even) {
    d.epsilon = sgn(static_cast<long>(n) * (n + 1) / 2);
    d.eta = -d.epsilon;
    d.sigma_twist.with_xi = true;
    d.sigma_twist.norm = k_even ? mpq_class(1) : half;
    d.lambda.shift = d.sigma_twist.norm;
    if (k_even) d.pi_twist.theta_power = n / 2;
  } else {
    d.eta = sgn(static_cast<long>(n) * (n - 1) / 2);
    d.epsilon = d.eta;
    d.pi_twist.with_xi = true;
    d.pi_twist.norm = k_even ? mpq_class(1) : half;
    d.mu.shift = d.pi_twist.norm;
    if (k_even) d.sigma_twist.theta_power = (n - 1) / 2;
  }
  if (!interlaces(d.mu, d.lambda)) {
    std::string msg = "interlacing mu^v > lambda fails for k = " + std::to_string(k) + ", n = " +
                      std::to_string(n) + " (mu = " + d.mu.to_string() + ", lambda = " + d.lambda.to_string() +
                      "); the recipe needs k >= 4 for even k and k >= 3 for odd k";
    throw InterlacingFailure(msg);
  }
  d.critical_set = critical_set_table(k, n);
  d.classical_m = classical_critical_point(k, n);
  return d;
}

CriticalDatum twist_recipe(int k, int n, const chars::DirichletCharacter& xi, const chars::DirichletCharacter& theta) {
  if (theta.order() != 2 || theta.is_even())
    throw UnsupportedCase("theta must be an odd quadratic character, got " + theta.label());
  CriticalDatum d = twist_recipe(k, n);
  d.xi_label = xi.label();
  d.theta_label = theta.label();
  // ξ only ever twists an all-induced parameter here, so its parity does
  // not enter the gamma factors.
  return d;
}

int gauss_exponent(int n, int /*k*/, long m) {
  if (n < 0) throw std::invalid_argument("gauss_exponent: n must be >= 0");
  if (n % 2 != 0) return (n + 1) / 2;
  return m % 2 != 0 ? n / 2 : n / 2 + 1;
}

std::string format_half_integer(const mpq_class& q) { return q_str(q); }

nlohmann::json to_json(const std::vector<GammaAtom>& atoms) {
  auto arr = nlohmann::json::array();
  for (const auto& a : atoms) arr.push_back({{"type", a.kind == GammaAtom::C ? "C" : "R"}, {"shift", q_str(a.shift)}});
  return arr;
}

nlohmann::json to_json(const CriticalDatum& d) {
  nlohmann::json j;
  j["k"] = d.k;
  j["n"] = d.n;
  j["parity_case"] = d.parity_case;
  j["xi"] = d.xi_label;
  j["theta"] = d.theta_label;
  j["pi"] = "Sym^" + std::to_string(d.n) + " (x) " + d.pi_twist.to_string();
  j["sigma"] = "Sym^" + std::to_string(d.n - 1) + " (x) " + d.sigma_twist.to_string();
  j["pi_twist"] = {{"theta_power", d.pi_twist.theta_power},
                   {"xi", d.pi_twist.with_xi},
                   {"norm", q_str(d.pi_twist.norm)}};
  j["sigma_twist"] = {{"theta_power", d.sigma_twist.theta_power},
                      {"xi", d.sigma_twist.with_xi},
                      {"norm", q_str(d.sigma_twist.norm)}};
  auto comps = [](const Weight& w) {
    auto arr = nlohmann::json::array();
    for (const auto& c : w.components()) arr.push_back(q_str(c));
    return arr;
  };
  j["mu"] = {{"form", d.mu.to_string()}, {"components", comps(d.mu)}};
  j["lambda"] = {{"form", d.lambda.to_string()}, {"components", comps(d.lambda)}};
  j["epsilon"] = d.epsilon;
  j["eta"] = d.eta;
  auto cs = nlohmann::json::array();
  for (const auto& s : d.critical_set) cs.push_back(q_str(s));
  j["critical_set"] = cs;
  j["classical_m"] = q_str(d.classical_m);
  j["gamma_pair"] = to_json(d.pair_atoms());
  j["gamma_dual_pair"] = to_json(d.dual_pair_atoms());
  return j;
}

std::string critical_table_text(int k_lo, int k_hi, int n_lo, int n_hi) {
  std::ostringstream os;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-3s %-2s %-13s %-28s %-28s %-12s %-14s %-4s %-4s %-16s %-4s %s\n", "k", "n", "case",
                "Pi", "Sigma", "mu", "lambda", "eps", "eta", "critical", "m", "gexp");
  os << buf;
  for (int k = k_lo; k <= k_hi; ++k)
    for (int n = n_lo; n <= n_hi; ++n) {
      try {
        CriticalDatum d = twist_recipe(k, n);
        std::string pi = "Sym^" + std::to_string(n) + " (x) " + d.pi_twist.to_string();
        std::string sigma = "Sym^" + std::to_string(n - 1) + " (x) " + d.sigma_twist.to_string();
        std::string crit = "[" + q_str(d.critical_set.front()) + ".." + q_str(d.critical_set.back()) + "]";
        long m = d.classical_m.get_num().get_si() / d.classical_m.get_den().get_si();
        std::snprintf(buf, sizeof buf, "%-3d %-2d %-13s %-28s %-28s %-12s %-14s %-4d %-4d %-16s %-4s %d\n", k, n,
                      d.parity_case.c_str(), pi.c_str(), sigma.c_str(), d.mu.to_string().c_str(),
                      d.lambda.to_string().c_str(), d.epsilon, d.eta, crit.c_str(), q_str(d.classical_m).c_str(),
                      gauss_exponent(2 * n - 1, k, m));
        os << buf;
      } catch (const UnsupportedCase& e) {
        std::snprintf(buf, sizeof buf, "%-3d %-2d refused: %s\n", k, n, e.what());
        os << buf;
      }
    }
  return os.str();
}

}  // namespace critval::arch

#include "critval/recognize/recognize.hpp"

#include "critval/arch/arch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace critval::recognize {

using num::PrecisionScope;

// ---------------------------------------------------------------------------
// LLL

namespace {

mpz_class round_q(const mpq_class& q) {
  mpq_class h = q + mpq_class(1, 2);
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
  return r;
}

mpq_class dot(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
  mpq_class s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Gso {
  std::vector<std::vector<mpq_class>> mu;
  std::vector<mpq_class> B;

  void compute(const std::vector<std::vector<mpz_class>>& b) {
    const std::size_t n = b.size();
    std::vector<std::vector<mpq_class>> bs(n);
    mu.assign(n, std::vector<mpq_class>(n, 0));
    B.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<mpq_class> v(b[i].begin(), b[i].end());
      for (std::size_t j = 0; j < i; ++j) {
        std::vector<mpq_class> bi(b[i].begin(), b[i].end());
        mu[i][j] = dot(bi, bs[j]) / B[j];
        for (std::size_t t = 0; t < v.size(); ++t) v[t] -= mu[i][j] * bs[j][t];
      }
      bs[i] = std::move(v);
      B[i] = dot(bs[i], bs[i]);
    }
  }
};

}  // namespace

void lll_reduce(std::vector<std::vector<mpz_class>>& b, const mpq_class& delta) {
  const std::size_t n = b.size();
  if (n < 2) return;
  Gso g;
  g.compute(b);
  std::size_t k = 1;
  while (k < n) {
    for (std::size_t jj = k; jj-- > 0;) {
      mpz_class q = round_q(g.mu[k][jj]);
      if (q == 0) continue;
      for (std::size_t t = 0; t < b[k].size(); ++t) b[k][t] -= q * b[jj][t];
      for (std::size_t i = 0; i < jj; ++i) g.mu[k][i] -= q * g.mu[jj][i];
      g.mu[k][jj] -= q;
    }
    if (g.B[k] >= (delta - g.mu[k][k - 1] * g.mu[k][k - 1]) * g.B[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      g.compute(b);
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Recognized:
      return "recognized";
    case Verdict::NotRecognized:
      return "not-recognized";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Relation search

namespace {

struct Relation {
  std::vector<mpz_class> c;
  double log10_residual = 0;
  double log10_height = 0;
};

double log10_mpz(const mpz_class& v) {
  if (v == 0) return -1e300;
  long e = 0;
  double d = mpz_get_d_2exp(&e, v.get_mpz_t());
  return std::log10(std::abs(d)) + e * std::log10(2.0);
}

// Short vectors of the lattice spanned by (e_i | C·Re x_i, C·Im x_i).
std::vector<Relation> relations(const std::vector<Complex>& xs, int precision) {
  const std::size_t n = xs.size();
  bool real = true;
  double lmax = 0;
  for (const auto& x : xs) {
    if (x.im.log10_abs() > -(precision - 2)) real = false;
    lmax = std::max(lmax, abs(x).log10_abs());
  }
  const long scale_digits = std::max<long>(5, precision - 3 - static_cast<long>(std::ceil(std::max(0.0, lmax))));
  const Real C = num::pow10(scale_digits);
  std::vector<std::vector<mpz_class>> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i].assign(n, 0);
    b[i][i] = 1;
    b[i].push_back(num::to_mpz_rounded(xs[i].re * C));
    if (!real) b[i].push_back(num::to_mpz_rounded(xs[i].im * C));
  }
  lll_reduce(b);
  std::vector<Relation> out;
  for (const auto& row : b) {
    Relation r;
    r.c.assign(row.begin(), row.begin() + static_cast<long>(n));
    bool any = false;
    mpz_class h = 0;
    for (const auto& v : r.c) {
      if (v != 0) any = true;
      if (abs(v) > h) h = abs(v);
    }
    if (!any) continue;
    Complex s(0);
    for (std::size_t i = 0; i < n; ++i) s += xs[i] * Real(r.c[i]);
    r.log10_residual = abs(s).log10_abs();
    if (!std::isfinite(r.log10_residual)) r.log10_residual = -(precision + 10);
    r.log10_height = log10_mpz(h);
    out.push_back(std::move(r));
  }
  return out;
}

mpz_class effective_height(const mpz_class& H, int precision, const Thresholds& th) {
  mpz_class cap;
  mpz_ui_pow_ui(cap.get_mpz_t(), 10, static_cast<unsigned long>(std::floor(th.height_exponent * precision)));
  return H > 0 ? std::min(H, cap) : cap;
}

void normalize_sign(std::vector<mpz_class>& c) {
  mpz_class g = 0;
  for (const auto& v : c) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  if (g > 1)
    for (auto& v : c) v /= g;
  for (std::size_t i = c.size(); i-- > 0;)
    if (c[i] != 0) {
      if (c[i] < 0)
        for (auto& v : c) v = -v;
      break;
    }
}

}  // namespace

RecognitionResult recognize_algebraic(const Complex& z_in, int degree_bound, const mpz_class& height_bound, int precision,
                                      const Thresholds& th) {
  if (degree_bound < 1) throw std::invalid_argument("recognize_algebraic: degree bound must be at least 1");
  if (precision < 10 * degree_bound)
    throw PrecisionRefusal("recognize_algebraic: precision " + std::to_string(precision) + " is below the guard for degree " +
                               std::to_string(degree_bound) + "; need at least " + std::to_string(10 * degree_bound) +
                               " digits",
                           10 * degree_bound);
  PrecisionScope scope(precision + 10);
  RecognitionResult res;
  res.input = z_in;
  res.precision = precision;
  res.degree_bound = degree_bound;
  res.height_bound = height_bound;
  res.effective_height = effective_height(height_bound, precision, th);
  res.digits_consumed = precision;
  Complex z = z_in;
  z.round_to(num::digits_to_bits(precision));
  const double lz = std::log10(1 + abs(z).to_double());
  const double lH = log10_mpz(res.effective_height);
  const double res_cut = -th.residual_exponent * precision;
  bool near_miss = false;
  std::optional<Relation> best_fail;
  for (int d = 1; d <= degree_bound; ++d) {
    std::vector<Complex> xs{Complex(1)};
    for (int i = 1; i <= d; ++i) xs.push_back(xs.back() * z);
    for (auto& r : relations(xs, precision)) {
      if (r.c.back() == 0) continue;  // found at a lower degree already
      double margin = -r.log10_residual - (d + 1) * r.log10_height - d * lz;
      bool ok_res = r.log10_residual < res_cut;
      bool ok_h = r.log10_height <= lH + 1e-12;
      bool ok_m = margin >= th.margin_exponent * precision;
      if (ok_res && ok_h && ok_m) {
        normalize_sign(r.c);
        res.candidate = r.c;
        res.log10_residual = r.log10_residual;
        res.margin = margin;
        if (d == 1) {
          mpq_class q(-r.c[0], r.c[1]);
          q.canonicalize();
          res.rational = q;
          Real diff = abs(z - Complex(Real(q)));
          res.log10_residual = diff.is_zero() ? -(precision + 10) : diff.log10_abs();
        }
        res.verdict = Verdict::Recognized;
        return res;
      }
      if (ok_res && ok_h) near_miss = true;
      if (!best_fail || r.log10_residual < best_fail->log10_residual) best_fail = r;
    }
  }
  res.verdict = near_miss ? Verdict::Inconclusive : Verdict::NotRecognized;
  if (best_fail) {
    res.log10_residual = best_fail->log10_residual;
    res.margin = -best_fail->log10_residual - (best_fail->c.size()) * best_fail->log10_height;
  }
  res.note = near_miss ? "a relation within the bounds fits but misses the significance margin"
                       : "no relation of degree <= " + std::to_string(degree_bound) + " and height <= " +
                             res.effective_height.get_str() + " at " + std::to_string(precision) + " digits";
  return res;
}

RecognitionResult recognize_in_field(const Complex& z_in, const exact::FieldPtr& K, int embedding,
                                     const mpz_class& height_bound, int precision, const Thresholds& th) {
  const int n = K->degree();
  if (precision < 10 * n)
    throw PrecisionRefusal("recognize_in_field: precision " + std::to_string(precision) +
                               " is below the guard; need at least " + std::to_string(10 * n) + " digits",
                           10 * n);
  PrecisionScope scope(precision + 10);
  RecognitionResult res;
  res.input = z_in;
  res.precision = precision;
  res.degree_bound = n;
  res.height_bound = height_bound;
  res.effective_height = effective_height(height_bound, precision, th);
  res.digits_consumed = precision;
  Complex z = z_in;
  z.round_to(num::digits_to_bits(precision));
  const Complex theta = K->embeddings().at(embedding);
  double lt = std::log10(1 + abs(theta).to_double());
  // z·c_z + Σ c_i θ^i = 0.
  std::vector<Complex> xs{z, Complex(1)};
  for (int i = 1; i < n; ++i) xs.push_back(xs.back() * theta);
  const double lH = log10_mpz(res.effective_height);
  const double lz = std::log10(1 + abs(z).to_double());
  bool near_miss = false;
  std::optional<Relation> best_fail;
  for (auto& r : relations(xs, precision)) {
    if (r.c[0] == 0) continue;
    double margin = -r.log10_residual - (n + 1) * r.log10_height - (n - 1) * lt - lz;
    bool ok_res = r.log10_residual < -th.residual_exponent * precision;
    bool ok_h = r.log10_height <= lH + 1e-12;
    bool ok_m = margin >= th.margin_exponent * precision;
    if (ok_res && ok_h && ok_m) {
      normalize_sign(r.c);
      std::vector<mpq_class> coords;
      for (int i = 0; i < n; ++i) {
        mpq_class q(-r.c[i + 1], r.c[0]);
        q.canonicalize();
        coords.push_back(q);
      }
      res.field_value = K->from_coords(coords);
      if (n == 1) res.rational = coords[0];
      res.candidate = r.c;
      Complex diff = z - K->embed(*res.field_value, embedding);
      Real ad = abs(diff);
      res.log10_residual = ad.is_zero() ? -(precision + 10) : ad.log10_abs();
      res.margin = margin;
      res.verdict = Verdict::Recognized;
      return res;
    }
    if (ok_res && ok_h) near_miss = true;
    if (!best_fail || r.log10_residual < best_fail->log10_residual) best_fail = r;
  }
  res.verdict = near_miss ? Verdict::Inconclusive : Verdict::NotRecognized;
  if (best_fail) res.log10_residual = best_fail->log10_residual;
  res.note = near_miss ? "a relation within the bounds fits but misses the significance margin"
                       : "no element with coordinates of height <= " + res.effective_height.get_str() + " at " +
                             std::to_string(precision) + " digits";
  return res;
}

nlohmann::json to_json(const RecognitionResult& r, const exact::NumberField* K) {
  nlohmann::json j;
  j["input_re"] = r.input.re.to_string();
  j["input_im"] = r.input.im.to_string();
  j["precision"] = r.precision;
  j["degree_bound"] = r.degree_bound;
  j["height_bound"] = r.height_bound.get_str();
  j["effective_height_bound"] = r.effective_height.get_str();
  if (r.candidate.empty()) {
    j["candidate"] = "none";
  } else {
    std::vector<std::string> c;
    for (const auto& v : r.candidate) c.push_back(v.get_str());
    j["candidate"] = c;
  }
  if (r.rational) j["rational"] = r.rational->get_str();
  if (r.field_value && K) j["field_value"] = K->format(*r.field_value);
  j["log10_residual"] = r.log10_residual;
  j["residual_threshold_log10"] = -0.6 * r.precision;
  j["margin"] = r.margin;
  j["verdict"] = to_string(r.verdict);
  j["digits_consumed"] = r.digits_consumed;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

// ---------------------------------------------------------------------------
// Ratios

Complex twist_ratio(const Complex& twisted, const Complex& untwisted, const Complex& gauss, int exponent) {
  return twisted / (pow(gauss, exponent) * untwisted);
}

Complex double_ratio(const Complex& tw1, const Complex& tw2, const Complex& untwisted, const Complex& g1,
                     const Complex& g2, int exponent) {
  return twist_ratio(tw1, untwisted, g1, exponent) / twist_ratio(tw2, untwisted, g2, exponent);
}

std::size_t suggested_terms(int weight, int r, long xi_conductor, long level, const Complex& s, int digits) {
  eval::LFunctionSpec L;
  L.degree = r + 1;
  L.ramanujan_degree = r + 1;
  L.gamma = arch::gamma_shifts(arch::sym_arch_parameter(weight, r, 0, 0));
  long q = 1;
  for (int i = 0; i <= r; ++i) q *= xi_conductor * level;
  L.conductor = q;
  std::size_t M = std::max(eval::required_terms(L, s, digits + 3, 0.83), eval::required_terms(L, s, digits + 3, 1.0));
  return std::max<std::size_t>(200, static_cast<std::size_t>(2.2 * static_cast<double>(M)));
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

std::string cstr(const Complex& z) { return z.re.to_string() + (z.im.sign() < 0 ? " - " : " + ") + abs(z.im).to_string() + "i"; }

nlohmann::json lvalue_json(const LValueRecord& rec, int digits) {
  nlohmann::json j = eval::to_json(rec.result, rec.spec_id, digits);
  j["root_number"] = cstr(rec.root.epsilon);
  j["root_number_residual_log10"] = rec.root.residual;
  j["conductor"] = rec.conductor;
  return j;
}

LValueRecord compute_lvalue(const mf::Newform& f, int r, const chars::DirichletCharacter& xi, const Complex& s,
                            const ExperimentOptions& opt, int digits) {
  std::size_t terms = opt.terms;
  if (terms == 0) terms = suggested_terms(f.weight, r, chars::primitivize(xi).conductor(), f.level, s, digits);
  if (terms > f.coefficient_count())
    throw eval::InsufficientTerms("the form has " + std::to_string(f.coefficient_count()) + " coefficients, need " +
                                      std::to_string(terms),
                                  terms);
  eval::LFunctionSpec L = eval::build_lfunction(f, r, xi, terms, opt.assume_functoriality);
  LValueRecord rec;
  rec.root = eval::solve_root_number(L, 30);
  rec.conductor = L.conductor;
  eval::EvalOptions eo;
  eo.digits = digits;
  rec.result = eval::evaluate(L, s, eo);
  rec.spec_id = L.id;
  return rec;
}

void hazard_check(const LValueRecord& rec, int precision) {
  double lv = abs(rec.result.value).log10_abs();
  if (!(lv > -precision / 2.0))
    throw DivisionHazard("L-value " + rec.spec_id + " is below 10^-" + std::to_string(precision / 2) +
                         " (log10 |L| = " + std::to_string(lv) + "); the ratio is not defined numerically");
}

// Q(φ) when ξ is at most quadratic, otherwise nullopt (degree bound only).
int ratio_field_degree(const mf::Newform& f, const chars::DirichletCharacter& xi) {
  long m = xi.order();
  long phi = m;
  long t = m;
  for (long p = 2; p * p <= t; ++p)
    if (t % p == 0) {
      phi = phi / p * (p - 1);
      while (t % p == 0) t /= p;
    }
  if (t > 1) phi = phi / t * (t - 1);
  return f.field->degree() * static_cast<int>(phi);
}

}  // namespace

TwistReport twist_ratio_experiment(const mf::Newform& f, int n, const chars::DirichletCharacter& xi,
                                   const ExperimentOptions& opt) {
  if (n < 1) throw PreconditionRefusal("n must be at least 1");
  const int r = 2 * n - 1;
  if (r >= 5 && !opt.assume_functoriality)
    throw eval::FunctorialityRequired("Sym^" + std::to_string(r) +
                                      " needs --assume-functoriality (automorphy is only known for r <= 4)");
  const bool odd = !xi.is_even();
  if (odd && !opt.exploratory)
    throw PreconditionRefusal("the twist " + xi.label() +
                              " is odd; the ratio prediction is stated for even characters (use --exploratory)");
  const mpq_class m_pred = arch::classical_critical_point(f.weight, n);
  const mpq_class m = opt.classical_point.value_or(m_pred);
  const bool exploratory = odd || m != m_pred;
  const mpq_class shift(static_cast<long>(r) * (f.weight - 1), 2);
  const mpq_class s_an = m - shift;
  const int P = opt.precision;
  const int digits = P + 10;
  PrecisionScope scope(digits + 20);
  const Complex s = Complex(Real(s_an));

  TwistReport rep;
  rep.exploratory = exploratory;
  LValueRecord tw = compute_lvalue(f, r, xi, s, opt, digits);
  LValueRecord un = compute_lvalue(f, r, chars::DirichletCharacter::trivial(1), s, opt, digits);
  hazard_check(un, P);
  const int e = arch::gauss_exponent(r, f.weight, m.get_num().get_si() / std::max<long>(1, m.get_den().get_si()));
  const Complex g = chars::gauss_sum(xi, digits);
  rep.ratio = twist_ratio(tw.result.value, un.result.value, g, e);

  const int ratio_deg = ratio_field_degree(f, xi);
  if (ratio_deg == f.field->degree())
    rep.recognition = recognize_in_field(rep.ratio, f.field, f.embedding, opt.height_bound, P, opt.thresholds);
  else
    rep.recognition = recognize_algebraic(rep.ratio, ratio_deg, opt.height_bound, P, opt.thresholds);

  nlohmann::json j;
  j["schema"] = 1;
  j["experiment"] = "twist-ratio";
  j["form"] = f.label;
  j["weight"] = f.weight;
  j["n"] = n;
  j["symmetric_power"] = r;
  j["character"] = xi.label();
  j["character_parity"] = odd ? "odd" : "even";
  j["classical_point"] = m.get_str();
  j["predicted_point"] = m_pred.get_str();
  j["analytic_point"] = s_an.get_str();
  j["gauss_exponent"] = e;
  j["gauss_sum"] = {{"re", g.re.to_string()}, {"im", g.im.to_string()}};
  j["twisted"] = lvalue_json(tw, digits);
  j["untwisted"] = lvalue_json(un, digits);
  j["ratio"] = {{"re", rep.ratio.re.to_string()}, {"im", rep.ratio.im.to_string()}};
  j["ratio_field_degree"] = ratio_deg;
  j["recognition"] = to_json(rep.recognition, f.field.get());
  j["verdict"] = to_string(rep.recognition.verdict);
  j["label"] = exploratory ? "exploratory: outside the stated hypotheses"
                           : (rep.recognition.verdict == Verdict::Recognized
                                  ? "numerically consistent with the predicted algebraicity (evidence, not proof)"
                                  : "prediction not confirmed at these bounds");
  j["normalization"] =
      "finite parts divide out exactly the assembled gamma atoms; any fixed convention factor cancels in the ratio";
  rep.json = std::move(j);
  return rep;
}

GaloisReport galois_equivariance_experiment(const mf::NewformOrbit& orbit, int n, const chars::DirichletCharacter& xi1,
                                            const chars::DirichletCharacter& xi2, const ExperimentOptions& opt) {
  if (orbit.members.empty()) throw PreconditionRefusal("empty orbit");
  if (n < 1) throw PreconditionRefusal("n must be at least 1");
  const int r = 2 * n - 1;
  if (r >= 5 && !opt.assume_functoriality)
    throw eval::FunctorialityRequired("Sym^" + std::to_string(r) + " needs --assume-functoriality");
  if ((!xi1.is_even() || !xi2.is_even()) && !opt.exploratory)
    throw PreconditionRefusal("both twists must be even characters (use --exploratory)");
  const auto& f0 = orbit.members[0];
  const auto K = f0.field;
  if (ratio_field_degree(f0, xi1) != K->degree() || ratio_field_degree(f0, xi2) != K->degree())
    throw PreconditionRefusal("Galois experiment supports characters of order <= 2");
  const mpq_class m = opt.classical_point.value_or(arch::classical_critical_point(f0.weight, n));
  const mpq_class s_an = m - mpq_class(static_cast<long>(r) * (f0.weight - 1), 2);
  const int P = opt.precision;
  const int digits = P + 10;
  PrecisionScope scope(digits + 20);
  const Complex s = Complex(Real(s_an));
  const int e = arch::gauss_exponent(r, f0.weight, m.get_num().get_si() / std::max<long>(1, m.get_den().get_si()));
  const Complex g1 = chars::gauss_sum(xi1, digits), g2 = chars::gauss_sum(xi2, digits);

  GaloisReport rep;
  nlohmann::json members = nlohmann::json::array();
  for (const auto& f : orbit.members) {
    LValueRecord a = compute_lvalue(f, r, xi1, s, opt, digits);
    LValueRecord b = compute_lvalue(f, r, xi2, s, opt, digits);
    LValueRecord u = compute_lvalue(f, r, chars::DirichletCharacter::trivial(1), s, opt, digits);
    hazard_check(b, P);
    hazard_check(u, P);
    Complex D = double_ratio(a.result.value, b.result.value, u.result.value, g1, g2, e);
    rep.double_ratios.push_back(D);
    rep.recognitions.push_back(recognize_in_field(D, K, f.embedding, opt.height_bound, P, opt.thresholds));
    members.push_back({{"form", f.label},
                       {"twist1", lvalue_json(a, digits)},
                       {"twist2", lvalue_json(b, digits)},
                       {"untwisted", lvalue_json(u, digits)},
                       {"double_ratio", {{"re", D.re.to_string()}, {"im", D.im.to_string()}}},
                       {"recognition", to_json(rep.recognitions.back(), K.get())}});
  }
  // σ_i applied exactly to the element recognized for member 0.
  double worst = std::numeric_limits<double>::quiet_NaN();
  bool all = rep.recognitions[0].verdict == Verdict::Recognized;
  nlohmann::json checks = nlohmann::json::array();
  if (all) {
    const auto& alpha = *rep.recognitions[0].field_value;
    for (std::size_t i = 0; i < orbit.members.size(); ++i) {
      exact::FieldElem sa = i < orbit.sigma.size() ? K->apply(orbit.sigma[i], alpha) : alpha;
      Complex v = K->embed(sa, orbit.members[i].embedding);
      Real d = abs(v - rep.double_ratios[i]);
      double l = d.is_zero() ? -(P + 10) : d.log10_abs();
      worst = std::isnan(worst) ? l : std::max(worst, l);
      bool exact_match = rep.recognitions[i].field_value && *rep.recognitions[i].field_value == sa;
      if (!exact_match) all = false;
      checks.push_back({{"member", i},
                        {"sigma_alpha", K->format(sa)},
                        {"log10_residual", l},
                        {"independently_recognized_equal", exact_match}});
    }
  }
  rep.log10_equivariance_residual = worst;
  rep.equivariant = all && worst < -0.6 * P;
  nlohmann::json j;
  j["schema"] = 1;
  j["experiment"] = "galois-equivariance";
  j["weight"] = f0.weight;
  j["n"] = n;
  std::vector<std::string> fpoly;
  for (const auto& c : K->poly()) fpoly.push_back(c.get_str());
  j["field_polynomial"] = fpoly;
  j["characters"] = {xi1.label(), xi2.label()};
  j["classical_point"] = m.get_str();
  j["gauss_exponent"] = e;
  j["members"] = members;
  j["equivariance"] = checks;
  if (std::isnan(worst))
    j["log10_equivariance_residual"] = nullptr;
  else
    j["log10_equivariance_residual"] = worst;
  j["verdict"] = rep.equivariant ? "recognized" : "not-recognized";
  j["label"] = rep.equivariant ? "numerically consistent with the predicted Galois equivariance (evidence, not proof)"
                               : "equivariance not confirmed at these bounds";
  rep.json = std::move(j);
  return rep;
}

}  // namespace critval::recognize

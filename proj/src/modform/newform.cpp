#include "critval/modform/newform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace critval::mf {

using exact::FieldElem;
using exact::NumberField;
using exact::QPoly;
using exact::ZSeries;
using num::Complex;
using num::PrecisionScope;
using num::Real;

num::Complex Newform::a_numeric(std::size_t n) const { return field->embed(a(n), embedding); }

FieldElem Newform::hecke_det(long p) const {
  if (level % p == 0) throw std::invalid_argument("hecke_det: p divides the level");
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(weight - 1));
  if (nebentypus.is_trivial()) return field->from_int(pk);
  auto e = nebentypus.exp(p);
  auto it = omega_values.find(*e);
  if (it == omega_values.end())
    throw std::logic_error("hecke_det: nebentypus value not prepared for p = " + std::to_string(p));
  return field->mul_int(it->second, pk);
}

void Newform::prepare() {
  omega_values.clear();
  omega_values.emplace(0, field->one());
  if (nebentypus.is_trivial()) return;
  const long m = nebentypus.order();
  const std::size_t M = coefficient_count();
  for (long p = 2; static_cast<std::size_t>(p * p) <= M && static_cast<long>(omega_values.size()) < m; ++p) {
    bool prime = true;
    for (long d = 2; d * d <= p; ++d)
      if (p % d == 0) prime = false;
    if (!prime || level % p == 0) continue;
    long e = *nebentypus.exp(p);
    if (omega_values.count(e)) continue;
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(weight - 1));
    FieldElem det = field->sub(field->mul(a(p), a(p)), a(p * p));
    omega_values.emplace(e, field->div_int(det, pk));
  }
  if (static_cast<long>(omega_values.size()) < m)
    throw IngestError({"nebentypus", {},
                       "not enough coefficients to pin down every nebentypus value exactly "
                       "(need a_{p^2} for a prime in each class)"});
}

int cusp_dimension(int k) {
  if (k < 12 || (k & 1)) return 0;
  if (k % 12 == 2) return k / 12 - 1;
  return k / 12;
}

namespace {

std::mutex g_series_mu;
std::map<std::tuple<char, int, std::size_t>, ZSeries> g_series_cache;

const ZSeries& cached(char tag, int e, std::size_t len);

ZSeries compute_series(char tag, int e, std::size_t len) {
  if (e == 0) {
    ZSeries one(len);
    if (len) one[0] = 1;
    return one;
  }
  if (e > 1) return exact::series_mul(cached(tag, e - 1, len), cached(tag, 1, len), len);
  if (tag == '4') return exact::eisenstein(4, len);
  if (tag == '6') return exact::eisenstein(6, len);
  const ZSeries& e4c = cached('4', 3, len);
  const ZSeries& e6s = cached('6', 2, len);
  ZSeries d(len);
  for (std::size_t i = 0; i < len; ++i) {
    d[i] = e4c[i] - e6s[i];
    mpz_divexact_ui(d[i].get_mpz_t(), d[i].get_mpz_t(), 1728);
  }
  return d;
}

// Caller must not hold g_series_mu.
const ZSeries& cached(char tag, int e, std::size_t len) {
  auto key = std::make_tuple(tag, e, len);
  {
    std::lock_guard<std::mutex> lock(g_series_mu);
    auto it = g_series_cache.find(key);
    if (it != g_series_cache.end()) return it->second;
  }
  ZSeries s = compute_series(tag, e, len);
  std::lock_guard<std::mutex> lock(g_series_mu);
  return g_series_cache.emplace(key, std::move(s)).first->second;
}

// Null-space vector of a square matrix over K with rank n − 1, scaled so
// that its first entry is 1.
std::vector<FieldElem> kernel_vector(const NumberField& K, std::vector<std::vector<FieldElem>> m) {
  const std::size_t n = m.size();
  std::vector<int> pivot_col;
  std::size_t row = 0;
  std::vector<bool> is_pivot(n, false);
  for (std::size_t col = 0; col < n && row < n; ++col) {
    std::size_t piv = row;
    while (piv < n && m[piv][col].is_zero()) ++piv;
    if (piv == n) continue;
    std::swap(m[piv], m[row]);
    FieldElem inv = K.inv(m[row][col]);
    for (auto& x : m[row]) x = K.mul(x, inv);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row || m[r][col].is_zero()) continue;
      FieldElem f = m[r][col];
      for (std::size_t c = 0; c < n; ++c) m[r][c] = K.sub(m[r][c], K.mul(f, m[row][c]));
    }
    pivot_col.push_back(static_cast<int>(col));
    is_pivot[col] = true;
    ++row;
  }
  std::size_t free_col = n;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) {
      free_col = c;
      break;
    }
  if (free_col == n) throw std::logic_error("kernel_vector: matrix is nonsingular");
  std::vector<FieldElem> v(n, K.zero());
  v[free_col] = K.one();
  for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = K.neg(m[r][free_col]);
  if (v[0].is_zero()) throw std::logic_error("kernel_vector: eigenvector has vanishing first entry");
  FieldElem inv0 = K.inv(v[0]);
  for (auto& x : v) x = K.mul(x, inv0);
  return v;
}

}  // namespace

std::vector<ZSeries> victor_miller_basis(int weight, std::size_t n_terms) {
  const int d = (weight >= 4 && !(weight & 1)) ? cusp_dimension(weight) : 0;
  if (d == 0) return {};
  const std::size_t len = n_terms + 1;
  std::vector<ZSeries> g;
  for (int j = 1; j <= d; ++j) {
    int rem = weight - 12 * j;
    int b = (rem % 4 == 0) ? 0 : 1;
    int a = (rem - 6 * b) / 4;
    ZSeries s = cached('D', j, len);
    if (a > 0) s = exact::series_mul(s, cached('4', a, len), len);
    if (b > 0) s = exact::series_mul(s, cached('6', 1, len), len);
    g.push_back(std::move(s));
  }
  for (int i = d - 1; i >= 0; --i) {
    for (int j = i + 1; j < d; ++j) {
      if (static_cast<std::size_t>(j + 1) >= len) break;
      mpz_class c = g[i][j + 1];
      if (c == 0) continue;
      for (std::size_t n = 0; n < len; ++n) g[i][n] -= c * g[j][n];
    }
  }
  return g;
}

std::vector<NewformOrbit> level_one_newforms(int weight, std::size_t n_terms, int degree_bound) {
  const int d = (weight >= 4 && !(weight & 1)) ? cusp_dimension(weight) : 0;
  if (d == 0) return {};
  if (d > degree_bound)
    throw UnsupportedDegree("Hecke eigenvalue field of weight " + std::to_string(weight) + " has degree " +
                            std::to_string(d) + " > configured bound " + std::to_string(degree_bound));
  const std::size_t terms = std::max<std::size_t>(n_terms, 2 * static_cast<std::size_t>(d) + 1);
  auto basis = victor_miller_basis(weight, terms);

  mpz_class two_k1;
  mpz_ui_pow_ui(two_k1.get_mpz_t(), 2, static_cast<unsigned long>(weight - 1));
  std::vector<std::vector<mpq_class>> A(d, std::vector<mpq_class>(d));
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      int n = i + 1;
      mpz_class c = basis[j][2 * n];
      if (n % 2 == 0) c += two_k1 * basis[j][n / 2];
      A[i][j] = c;
    }
  }
  QPoly cp = exact::charpoly(A);
  exact::ZPoly zp;
  for (const auto& c : cp) {
    if (c.get_den() != 1) throw std::logic_error("Hecke polynomial is not integral");
    zp.push_back(c.get_num());
  }

  exact::FieldPtr K;
  if (d == 1) {
    K = NumberField::rationals();
  } else {
    K = std::make_shared<const NumberField>(zp);
    if (!K->is_irreducible())
      throw UnsupportedDegree("Hecke polynomial of weight " + std::to_string(weight) +
                              " is reducible; several Galois orbits are not supported");
  }
  FieldElem theta = d == 1 ? K->from_rational(-cp[0]) : K->gen();
  std::vector<QPoly> autos = K->automorphisms();

  NewformOrbit orbit;
  for (std::size_t s = 0; s < autos.size(); ++s) {
    FieldElem lambda = d == 1 ? theta : K->apply(autos[s], theta);
    std::vector<std::vector<FieldElem>> m(d, std::vector<FieldElem>(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        m[i][j] = K->from_rational(A[i][j]);
        if (i == j) m[i][j] = K->sub(m[i][j], lambda);
      }
    std::vector<FieldElem> v = d == 1 ? std::vector<FieldElem>{K->one()} : kernel_vector(*K, m);

    Newform f;
    f.weight = weight;
    f.level = 1;
    f.field = K;
    f.embedding = 0;
    f.label = std::to_string(weight) + ".1.a" + (autos.size() > 1 ? "." + std::to_string(s) : "");
    f.coeffs.assign(n_terms + 1, K->zero());
    for (std::size_t n = 1; n <= n_terms; ++n) {
      if (d == 1) {
        f.coeffs[n] = K->from_int(basis[0][n]);
        continue;
      }
      // a_n = Σ_j v_j g_j(n) with a common denominator.
      FieldElem acc = K->zero();
      for (int j = 0; j < d; ++j)
        if (basis[j][n] != 0) acc = K->add(acc, K->mul_int(v[j], basis[j][n]));
      f.coeffs[n] = std::move(acc);
    }
    f.prepare();
    orbit.members.push_back(std::move(f));
    orbit.sigma.push_back(autos[s]);
  }
  return {orbit};
}

std::optional<InvariantViolation> check_invariants(const Newform& f, const CheckOptions& opt) {
  const auto& K = *f.field;
  const std::size_t M = f.coefficient_count();
  if (M < 1) return InvariantViolation{"normalization", {1}, "no coefficients"};
  if (f.a(1) != K.one()) return InvariantViolation{"normalization", {1}, "not normalized: a_1 != 1"};

  std::vector<std::uint32_t> spf(M + 1, 0);
  for (std::size_t i = 2; i <= M; ++i) {
    if (spf[i]) continue;
    for (std::size_t j = i; j <= M; j += i)
      if (!spf[j]) spf[j] = static_cast<std::uint32_t>(i);
  }

  // Multiplicativity: a_n = a_{p^e} a_{n/p^e} for the smallest prime p | n.
  // By induction this is equivalent to a_{mn} = a_m a_n for all coprime
  // m, n with mn ≤ M.
  for (std::size_t n = 2; n <= M; ++n) {
    std::size_t p = spf[n];
    std::size_t pe = 1;
    std::size_t m = n;
    while (m % p == 0) {
      m /= p;
      pe *= p;
    }
    if (m == 1) continue;
    if (f.a(n) != K.mul(f.a(pe), f.a(m)))
      return InvariantViolation{"multiplicativity",
                                {static_cast<long>(pe), static_cast<long>(m)},
                                "multiplicativity fails: a_" + std::to_string(n) + " != a_" + std::to_string(pe) +
                                    " * a_" + std::to_string(m) + " for coprime (" + std::to_string(pe) + "," +
                                    std::to_string(m) + ")"};
  }

  // Prime-power recursion at good primes.
  for (std::size_t p = 2; p * p <= M; ++p) {
    if (spf[p] != p || f.level % static_cast<long>(p) == 0) continue;
    FieldElem det = f.hecke_det(static_cast<long>(p));
    std::size_t prev = 1, cur = p;
    for (int j = 1; cur * p <= M; ++j) {
      std::size_t next = cur * p;
      FieldElem rhs = K.sub(K.mul(f.a(p), f.a(cur)), K.mul(det, f.a(prev)));
      if (f.a(next) != rhs)
        return InvariantViolation{"hecke_recursion",
                                  {static_cast<long>(p), j},
                                  "prime-power recursion fails at p = " + std::to_string(p) + ", j = " +
                                      std::to_string(j) + " (a_" + std::to_string(next) + ")"};
      prev = cur;
      cur = next;
    }
  }

  // Nebentypus values: the exact elements must embed to the declared
  // character values.
  if (!f.nebentypus.is_trivial()) {
    PrecisionScope scope(opt.digits);
    for (const auto& [e, val] : f.omega_values) {
      Complex want = Complex::root_of_unity(e, f.nebentypus.order());
      Complex got = K.embed(val, f.embedding);
      if (num::abs(got - want) > num::pow10(-(opt.digits - 10)))
        return InvariantViolation{"nebentypus", {e},
                                  "a_p^2 - a_{p^2} does not match the declared character value exp(2 pi i " +
                                      std::to_string(e) + "/" + std::to_string(f.nebentypus.order()) + ")"};
    }
  }

  if (opt.ramanujan) {
    // Absolute tolerance 10^-(P-10): work with enough digits that this is
    // meaningful next to |a_p| ~ p^{(k-1)/2}.
    const double top = (f.weight - 1) / 2.0 * std::log10(static_cast<double>(M)) + 2;
    PrecisionScope scope(opt.digits + static_cast<int>(top) + 5);
    const Real tol = num::pow10(-(opt.digits - 10));
    const int n_emb = opt.all_embeddings ? K.degree() : 1;
    for (int e = 0; e < n_emb; ++e) {
      int emb = opt.all_embeddings ? e : f.embedding;
      for (std::size_t p = 2; p <= M; ++p) {
        if (spf[p] != p || f.level % static_cast<long>(p) == 0) continue;
        Real ap = num::abs(K.embed(f.a(p), emb));
        Real bound = num::sqrt(num::pow(Real(static_cast<long>(p)), static_cast<long>(f.weight - 1))) * 2;
        if (ap > bound + tol)
          return InvariantViolation{"ramanujan", {static_cast<long>(p), emb},
                                    "Ramanujan bound fails at p = " + std::to_string(p) + " under embedding " +
                                        std::to_string(emb)};
      }
    }
  }
  return std::nullopt;
}

Newform parse_coefficients(std::istream& in) {
  auto fail = [](const std::string& msg) -> IngestError { return IngestError({"format", {}, msg}); };
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (!toks.empty()) rows.push_back(std::move(toks));
  }
  std::size_t r = 0;
  auto expect_key = [&](const std::string& key) -> const std::vector<std::string>& {
    if (r >= rows.size() || rows[r][0] != key) throw fail("expected '" + key + "' line");
    return rows[r++];
  };
  const auto& head = expect_key("MFCOEFF");
  if (head.size() != 2 || head[1] != "1") throw fail("unsupported header; expected 'MFCOEFF 1'");

  Newform f;
  auto parse_long = [&](const std::string& s, const std::string& what) {
    try {
      std::size_t used = 0;
      long v = std::stol(s, &used);
      if (used != s.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw fail("bad integer for " + what + ": '" + s + "'");
    }
  };
  const auto& kl = expect_key("k");
  if (kl.size() != 2) throw fail("malformed 'k' line");
  f.weight = static_cast<int>(parse_long(kl[1], "k"));
  if (f.weight < 1) throw fail("weight must be positive");
  const auto& nl = expect_key("N");
  if (nl.size() != 2) throw fail("malformed 'N' line");
  f.level = parse_long(nl[1], "N");
  if (f.level < 1) throw fail("level must be positive");
  const auto& cl = expect_key("chi");
  if (cl.size() != 2) throw fail("malformed 'chi' line");
  f.chi_token = cl[1];
  try {
    if (f.chi_token == "trivial") {
      f.nebentypus = chars::DirichletCharacter::trivial(f.level);
    } else {
      f.nebentypus = chars::DirichletCharacter::parse(f.chi_token);
      if (f.nebentypus.modulus() != f.level) throw fail("character modulus differs from the level");
    }
  } catch (const IngestError&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(e.what());
  }
  if (f.nebentypus.parity() != ((f.weight % 2 == 0) ? 1 : -1))
    throw IngestError({"nebentypus", {}, "nebentypus parity does not match the weight"});
  const auto& fl = expect_key("field");
  exact::ZPoly poly;
  try {
    std::string joined;
    for (std::size_t i = 1; i < fl.size(); ++i) joined += fl[i] + " ";
    poly = exact::parse_zpoly(joined);
    auto K = std::make_shared<const NumberField>(poly);
    if (!K->is_irreducible()) throw fail("field polynomial is reducible");
    f.field = K->degree() == 1 && poly == exact::ZPoly{0, 1} ? NumberField::rationals() : K;
  } catch (const IngestError&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(std::string("bad field line: ") + e.what());
  }
  if (r < rows.size() && rows[r][0] == "embedding") {
    if (rows[r].size() != 2) throw fail("malformed 'embedding' line");
    f.embedding = static_cast<int>(parse_long(rows[r][1], "embedding"));
    if (f.embedding < 0 || f.embedding >= f.field->degree()) throw fail("embedding index out of range");
    ++r;
  }
  f.coeffs.push_back(f.field->zero());
  const int d = f.field->degree();
  for (; r < rows.size(); ++r) {
    const auto& row = rows[r];
    long n = parse_long(row[0], "coefficient index");
    if (n != static_cast<long>(f.coeffs.size()))
      throw fail("coefficient index " + std::to_string(n) + " out of sequence (expected " +
                 std::to_string(f.coeffs.size()) + ")");
    if (static_cast<int>(row.size()) != d + 1)
      throw fail("coefficient line " + std::to_string(n) + " must have " + std::to_string(d) + " entries");
    try {
      f.coeffs.push_back(f.field->parse({row.begin() + 1, row.end()}));
    } catch (const std::exception& e) {
      throw fail("coefficient " + std::to_string(n) + ": " + e.what());
    }
  }
  if (f.coeffs.size() < 2) throw fail("no coefficients");
  f.label = std::to_string(f.weight) + "." + std::to_string(f.level) + ".file";
  if (f.a(1) != f.field->one()) throw IngestError({"normalization", {1}, "not normalized: a_1 != 1"});
  f.prepare();
  CheckOptions opt;
  if (auto v = check_invariants(f, opt)) throw IngestError(*v);
  return f;
}

Newform load_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError({"io", {}, "cannot open '" + path + "'"});
  return parse_coefficients(in);
}

std::string format_coefficients(const Newform& f) {
  std::ostringstream out;
  out << "MFCOEFF 1\n";
  out << "k " << f.weight << "\n";
  out << "N " << f.level << "\n";
  out << "chi " << f.chi_token << "\n";
  out << "field " << exact::format_zpoly(f.field->poly()) << "\n";
  if (f.embedding != 0) out << "embedding " << f.embedding << "\n";
  for (std::size_t n = 1; n <= f.coefficient_count(); ++n) out << n << " " << f.field->format(f.a(n)) << "\n";
  return out.str();
}

void write_coefficients(const Newform& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << format_coefficients(f);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace critval::mf

#include "critval/exact/qseries.hpp"

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <stdexcept>

namespace critval::exact {

namespace {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

// Montgomery arithmetic for an odd modulus below 2^30.
struct Mont {
  u32 p;
  u32 pinv;  // -p^{-1} mod 2^32
  u32 r2;    // 2^64 mod p

  explicit Mont(u32 mod) : p(mod) {
    u32 inv = mod;
    for (int i = 0; i < 5; ++i) inv *= 2 - mod * inv;
    pinv = 0u - inv;
    r2 = static_cast<u32>((static_cast<unsigned __int128>(1) << 64) % mod);
  }
  u32 reduce(u64 t) const {
    u32 m = static_cast<u32>(t) * pinv;
    u32 r = static_cast<u32>((t + static_cast<u64>(m) * p) >> 32);
    return r >= p ? r - p : r;
  }
  u32 mul(u32 a, u32 b) const { return reduce(static_cast<u64>(a) * b); }
  u32 to(u32 a) const { return mul(a, r2); }
  u32 from(u32 a) const { return reduce(a); }
  u32 add(u32 a, u32 b) const {
    u32 s = a + b;
    return s >= p ? s - p : s;
  }
  u32 sub(u32 a, u32 b) const { return a >= b ? a - b : a + p - b; }
  u32 pow(u32 a, u64 e) const {  // a in Montgomery form
    u32 r = to(1);
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
};

struct NttPrime {
  u32 p;
  u32 g;  // primitive root (plain form)
};

constexpr int kTwoAdicity = 22;

const std::vector<NttPrime>& ntt_primes(std::size_t count) {
  static std::mutex mu;
  static std::vector<NttPrime> primes;
  static u64 next_c = (u64{1} << (30 - kTwoAdicity)) - 1;
  std::lock_guard<std::mutex> lock(mu);
  while (primes.size() < count) {
    if (next_c == 0) throw std::runtime_error("ran out of NTT primes");
    u64 c = next_c--;
    u64 p = (c << kTwoAdicity) + 1;
    if (p >= (1ull << 30)) continue;
    mpz_class pz(static_cast<unsigned long>(p));
    if (mpz_probab_prime_p(pz.get_mpz_t(), 30) == 0) continue;
    // Prime factors of p-1 = c·2^kTwoAdicity.
    std::vector<u64> factors{2};
    u64 cc = c;
    for (u64 f = 2; f * f <= cc; ++f) {
      if (cc % f == 0) {
        if (f != 2) factors.push_back(f);
        while (cc % f == 0) cc /= f;
      }
    }
    if (cc > 1 && cc != 2) factors.push_back(cc);
    Mont m(static_cast<u32>(p));
    for (u32 g = 2;; ++g) {
      bool ok = true;
      for (u64 f : factors)
        if (m.from(m.pow(m.to(g), (p - 1) / f)) == 1) ok = false;
      if (ok) {
        primes.push_back({static_cast<u32>(p), g});
        break;
      }
    }
  }
  return primes;
}

void ntt(std::vector<u32>& a, const Mont& m, u32 root, bool invert) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // root is a primitive 2^kTwoAdicity-th root of unity in Montgomery form.
  for (std::size_t len = 2; len <= n; len <<= 1) {
    u32 w = root;
    for (std::size_t l = len; l < (std::size_t{1} << kTwoAdicity); l <<= 1) w = m.mul(w, w);
    if (invert) w = m.pow(w, (std::size_t{1} << kTwoAdicity) - 1);
    std::vector<u32> tw(len / 2);
    tw[0] = m.to(1);
    for (std::size_t k = 1; k < len / 2; ++k) tw[k] = m.mul(tw[k - 1], w);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        u32 u = a[i + k];
        u32 v = m.mul(a[i + k + len / 2], tw[k]);
        a[i + k] = m.add(u, v);
        a[i + k + len / 2] = m.sub(u, v);
      }
    }
  }
  if (invert) {
    u32 ninv = m.pow(m.to(static_cast<u32>(n % m.p)), m.p - 2);
    for (auto& x : a) x = m.mul(x, ninv);
  }
}

std::size_t max_bits(const ZSeries& a) {
  std::size_t b = 0;
  for (const auto& c : a) b = std::max(b, mpz_sizeinbase(c.get_mpz_t(), 2));
  return b;
}

}  // namespace

ZSeries series_mul_naive(const ZSeries& a, const ZSeries& b, std::size_t len) {
  ZSeries out(len);
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

ZSeries series_mul(const ZSeries& a_in, const ZSeries& b_in, std::size_t len) {
  const std::size_t la = std::min(a_in.size(), len);
  const std::size_t lb = std::min(b_in.size(), len);
  if (la == 0 || lb == 0) return ZSeries(len);
  if (std::min(la, lb) <= 32) return series_mul_naive(a_in, b_in, len);

  // |c_n| ≤ min(la, lb)·max|a|·max|b|; need the CRT modulus above twice that.
  std::size_t bits = max_bits(a_in) + max_bits(b_in) + 2;
  for (std::size_t t = std::min(la, lb); t > 1; t >>= 1) ++bits;
  const std::size_t nprimes = bits / 29 + 2;
  const auto& primes = ntt_primes(nprimes);

  std::size_t n = 1;
  while (n < la + lb - 1) n <<= 1;
  if (n > (std::size_t{1} << kTwoAdicity)) throw std::length_error("series too long for NTT");
  const std::size_t out_len = std::min(len, la + lb - 1);

  std::vector<std::vector<u32>> residues(nprimes);
  for (std::size_t k = 0; k < nprimes; ++k) {
    const Mont m(primes[k].p);
    u32 root = m.pow(m.to(primes[k].g), (primes[k].p - 1) >> kTwoAdicity);
    std::vector<u32> fa(n, 0), fb(n, 0);
    for (std::size_t i = 0; i < la; ++i) fa[i] = m.to(static_cast<u32>(mpz_fdiv_ui(a_in[i].get_mpz_t(), m.p)));
    for (std::size_t i = 0; i < lb; ++i) fb[i] = m.to(static_cast<u32>(mpz_fdiv_ui(b_in[i].get_mpz_t(), m.p)));
    ntt(fa, m, root, false);
    ntt(fb, m, root, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] = m.mul(fa[i], fb[i]);
    ntt(fa, m, root, true);
    residues[k].resize(out_len);
    for (std::size_t i = 0; i < out_len; ++i) residues[k][i] = m.from(fa[i]);
  }

  // Garner: x = t0 + p0 (t1 + p1 (t2 + ...)).
  std::vector<std::vector<u64>> inv(nprimes, std::vector<u64>(nprimes));
  for (std::size_t i = 0; i < nprimes; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      mpz_class r, pi(primes[i].p), pj(primes[j].p);
      mpz_invert(r.get_mpz_t(), pj.get_mpz_t(), pi.get_mpz_t());
      inv[i][j] = r.get_ui();
    }
  mpz_class modulus = 1;
  for (std::size_t k = 0; k < nprimes; ++k) modulus *= primes[k].p;
  mpz_class half = modulus / 2;

  ZSeries out(len);
  std::vector<u64> t(nprimes);
  for (std::size_t i = 0; i < out_len; ++i) {
    for (std::size_t k = 0; k < nprimes; ++k) {
      const u64 pk = primes[k].p;
      u64 x = residues[k][i];
      for (std::size_t j = 0; j < k; ++j) {
        x = (x + pk - t[j] % pk) % pk;
        x = x * inv[k][j] % pk;
      }
      t[k] = x;
    }
    mpz_class& c = out[i];
    c = static_cast<unsigned long>(t[nprimes - 1]);
    for (std::size_t k = nprimes - 1; k-- > 0;) {
      c *= static_cast<unsigned long>(primes[k].p);
      c += static_cast<unsigned long>(t[k]);
    }
    if (c > half) c -= modulus;
  }
  return out;
}

ZSeries eisenstein(int k, std::size_t len) {
  long scale;
  if (k == 4) scale = 240;
  else if (k == 6) scale = -504;
  else throw std::invalid_argument("eisenstein: only weights 4 and 6 are supported");
  ZSeries out(len);
  if (len == 0) return out;
  out[0] = 1;
  // σ_{k−1}(n) by a divisor sieve.
  std::vector<mpz_class> sigma(len);
  for (std::size_t d = 1; d < len; ++d) {
    mpz_class dp;
    mpz_ui_pow_ui(dp.get_mpz_t(), d, static_cast<unsigned long>(k - 1));
    for (std::size_t m = d; m < len; m += d) sigma[m] += dp;
  }
  for (std::size_t n = 1; n < len; ++n) out[n] = sigma[n] * scale;
  return out;
}

ZSeries delta_series(std::size_t len) {
  ZSeries e4 = eisenstein(4, len);
  ZSeries e6 = eisenstein(6, len);
  ZSeries e4sq = series_mul(e4, e4, len);
  ZSeries e4cube = series_mul(e4sq, e4, len);
  ZSeries e6sq = series_mul(e6, e6, len);
  ZSeries out(len);
  for (std::size_t i = 0; i < len; ++i) {
    out[i] = e4cube[i] - e6sq[i];
    mpz_divexact_ui(out[i].get_mpz_t(), out[i].get_mpz_t(), 1728);
  }
  return out;
}

}  // namespace critval::exact

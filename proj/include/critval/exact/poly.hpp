#pragma once

// Dense univariate polynomials over Q and Z, constant term first.

#include <gmpxx.h>

#include <string>
#include <vector>

namespace critval::exact {

using QPoly = std::vector<mpq_class>;
using ZPoly = std::vector<mpz_class>;

void trim(QPoly& p);
void trim(ZPoly& p);
int degree(const QPoly& p);  // -1 for the zero polynomial
int degree(const ZPoly& p);

QPoly to_qpoly(const ZPoly& p);
QPoly poly_add(const QPoly& a, const QPoly& b);
QPoly poly_sub(const QPoly& a, const QPoly& b);
QPoly poly_mul(const QPoly& a, const QPoly& b);
/// a = q·b + r with deg r < deg b.
void poly_divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r);
/// Returns g = gcd(a, b) (monic) and s with s·a ≡ g (mod b).
QPoly poly_gcdex(const QPoly& a, const QPoly& b, QPoly& s);
mpq_class poly_eval(const QPoly& p, const mpq_class& x);

/// Characteristic polynomial det(xI − A) of a square rational matrix, monic.
QPoly charpoly(const std::vector<std::vector<mpq_class>>& a);

/// Parses "c0 c1 ... cd" (integers).
ZPoly parse_zpoly(const std::string& text);
std::string format_zpoly(const ZPoly& p);

}  // namespace critval::exact

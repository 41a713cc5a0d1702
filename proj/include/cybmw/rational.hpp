#pragma once
// Exact rational scalar backed by GMP.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <utility>

namespace cybmw {

using Q = mpq_class;
using Z = mpz_class;

// Raised whenever a division by an exact zero is attempted; carries the
// name of the factor that vanished.
struct ZeroDenominator : std::runtime_error {
  std::string factor;
  explicit ZeroDenominator(std::string f)
      : std::runtime_error("zero denominator: " + f), factor(std::move(f)) {}
};

inline Q make_q(long v) { return Q(v); }

inline Q div(const Q& a, const Q& b, const std::string& name) {
  if (sgn(b) == 0) throw ZeroDenominator(name);
  Q r = a / b;
  r.canonicalize();
  return r;
}

inline Q inv(const Q& b, const std::string& name) { return div(Q(1), b, name); }

// Integer power, negative exponents allowed (zero base with e<0 throws).
inline Q qpow(const Q& x, long e) {
  if (e < 0) return qpow(inv(x, "power base"), -e);
  Q r(1), b(x);
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// Serialized as "num/den", or "num" when den == 1.
inline std::string to_string(const Q& x) {
  Q y(x);
  y.canonicalize();
  if (y.get_den() == 1) return y.get_num().get_str();
  return y.get_num().get_str() + "/" + y.get_den().get_str();
}

inline Q parse_q(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Q(Z(s));
    Z n(s.substr(0, slash)), d(s.substr(slash + 1));
    if (d == 0) throw ZeroDenominator("parsed denominator");
    Q r(n, d);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a rational: " + s);
  }
}

// Exact square root if x is the square of a nonnegative rational.
inline bool exact_sqrt(const Q& x, Q& out) {
  if (sgn(x) < 0) return false;
  Z n = x.get_num(), d = x.get_den();
  Z rn = sqrt(n), rd = sqrt(d);
  if (rn * rn != n || rd * rd != d) return false;
  out = Q(rn, rd);
  out.canonicalize();
  return true;
}

}  // namespace cybmw

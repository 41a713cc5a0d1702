#pragma once
// Parameter specifications, admissible parameter derivation, genericity.

#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "combinat.hpp"
#include "rational.hpp"

namespace cybmw {

enum class Alpha { plus, minus, qinv, negq };

inline const char* to_string(Alpha a) {
  switch (a) {
    case Alpha::plus: return "plus";
    case Alpha::minus: return "minus";
    case Alpha::qinv: return "qinv";
    default: return "negq";
  }
}

inline Alpha parse_alpha(const std::string& s) {
  if (s == "plus" || s == "+1" || s == "1") return Alpha::plus;
  if (s == "minus" || s == "-1") return Alpha::minus;
  if (s == "qinv" || s == "q^-1") return Alpha::qinv;
  if (s == "negq" || s == "-q") return Alpha::negq;
  throw std::invalid_argument("unknown alpha branch: " + s);
}

struct ConsistencyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedFiniteOrder : std::runtime_error {
  UnsupportedFiniteOrder() : std::runtime_error("finite q order has no rational image") {}
};
struct EpsilonUnresolvable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// u_i = sign * q^m in exponent mode.
struct ExpEntry {
  int sign = 1;
  long m = 0;
  bool operator==(const ExpEntry&) const = default;
};

struct ParamSpec {
  bool exponent = false;
  // rational mode
  Q q;
  std::vector<Q> u;
  // exponent mode; q_order == 0 means infinite
  long q_order = 0;
  std::vector<ExpEntry> e;
  Alpha alpha = Alpha::plus;

  int r() const { return exponent ? (int)e.size() : (int)u.size(); }

  static ParamSpec rational(Q q, std::vector<Q> u, Alpha a) {
    ParamSpec s;
    s.q = std::move(q);
    s.u = std::move(u);
    s.alpha = a;
    return s;
  }
  static ParamSpec exponents(std::vector<ExpEntry> e, Alpha a, long order = 0) {
    ParamSpec s;
    s.exponent = true;
    s.e = std::move(e);
    s.alpha = a;
    s.q_order = order;
    return s;
  }
};

inline bool alpha_matches_parity(Alpha a, int r) {
  bool odd_tag = a == Alpha::plus || a == Alpha::minus;
  return (r % 2 == 1) == odd_tag;
}

// Throws std::invalid_argument describing the first problem.
inline void validate(const ParamSpec& s) {
  int r = s.r();
  if (r < 1) throw std::invalid_argument("need at least one u parameter");
  if (!alpha_matches_parity(s.alpha, r))
    throw std::invalid_argument(std::string("alpha branch ") + to_string(s.alpha) +
                                " not allowed for r=" + std::to_string(r));
  if (s.exponent) {
    if (s.q_order == 1 || s.q_order == 2 || s.q_order < 0)
      throw std::invalid_argument("q order must be infinite or > 2");
    for (auto& x : s.e)
      if (x.sign != 1 && x.sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  } else {
    if (s.q == 0 || s.q == 1 || s.q == -1) throw std::invalid_argument("q must not be 0, 1 or -1");
    for (auto& x : s.u)
      if (x == 0) throw std::invalid_argument("u entries must be nonzero");
  }
}

struct AdmissibleParams {
  int r = 0;
  Q q, delta, rho, rho_inv;
  std::vector<Q> u, gamma;
  Alpha alpha = Alpha::plus;

  Q omega(long a) const {
    Q s = 0;
    for (int j = 0; j < r; ++j) s += qpow(u[j], a) * gamma[j];
    return s;
  }
  Q q2pow(long e) const { return qpow(q, 2 * e); }
  Q c_add(const Node& p) const { return u[p.s - 1] * q2pow(p.j - p.i); }
  Q c_rem(const Node& p) const { return qpow(u[p.s - 1], -1) * q2pow(p.i - p.j); }
  Q content(const Step& st) const { return st.added ? c_add(st.node) : c_rem(st.node); }
  Q content(const Tableau& t, int k) const { return content(step_between(t[k - 1], t[k])); }
  Q prod_u() const {
    Q p = 1;
    for (auto& x : u) p *= x;
    return p;
  }
};

// Convention families for the sign ε:
//   diag  : odd r: ϱ^{-1} = ε∏u;  even r: ϱ^{-1} = -ε q^{ε} ∏u
//   sets  : odd r: ϱ^{-1} = ε∏u;  even r: ϱ^{-1} = ε q^{-ε} ∏u
enum class EpsConvention { diag, sets };

// Derives ε from the actual value ϱ^{-1}/∏u.
inline int epsilon(const AdmissibleParams& p, EpsConvention c) {
  Q x = p.rho_inv / p.prod_u();
  if (p.r % 2) {
    if (x == 1) return 1;
    if (x == -1) return -1;
  } else {
    Q qi = inv(p.q, "q");
    if (c == EpsConvention::diag) {
      if (x == qi) return -1;
      if (x == -p.q) return 1;
    } else {
      if (x == qi) return 1;
      if (x == -p.q) return -1;
    }
  }
  throw EpsilonUnresolvable("rho^{-1}/prod(u) = " + to_string(x) + " matches no branch");
}

// The same ε read off the branch tag alone (no field arithmetic).
inline int epsilon(Alpha a, int r, EpsConvention c) {
  if (r % 2) return a == Alpha::minus ? -1 : 1;
  bool qinv = a == Alpha::qinv;
  if (c == EpsConvention::diag) return qinv ? -1 : 1;
  return qinv ? 1 : -1;
}

inline Q alpha_value(Alpha a, const Q& q) {
  switch (a) {
    case Alpha::plus: return 1;
    case Alpha::minus: return -1;
    case Alpha::qinv: return inv(q, "q");
    default: return -q;
  }
}

inline AdmissibleParams derive_params(const ParamSpec& s) {
  if (s.exponent) throw std::invalid_argument("exponent-mode spec must be specialized first");
  validate(s);
  AdmissibleParams p;
  p.r = s.r();
  p.q = s.q;
  p.u = s.u;
  p.alpha = s.alpha;
  p.delta = p.q - inv(p.q, "q");
  p.rho_inv = alpha_value(s.alpha, p.q) * p.prod_u();
  p.rho = inv(p.rho_inv, "rho^{-1}");
  const int r = p.r;
  for (int i = 0; i < r; ++i) {
    const Q& ui = p.u[i];
    Q g = (r % 2) ? Q(1) : Q(-ui);
    Q others = 1;
    for (int j = 0; j < r; ++j)
      if (j != i) others *= p.u[j];
    g += div(p.rho * (ui * ui - 1) * others, p.delta, "delta");
    for (int j = 0; j < r; ++j) {
      if (j == i) continue;
      g *= div(ui * p.u[j] - 1, ui - p.u[j],
               "u_" + std::to_string(i + 1) + " - u_" + std::to_string(j + 1));
    }
    p.gamma.push_back(g);
  }
  Q w0 = p.omega(0);
  Q ref = 1 - div(p.rho - p.rho_inv, p.delta, "delta");
  if (w0 != ref)
    throw ConsistencyFailure("omega_0: sum of gamma = " + to_string(w0) +
                             " but 1 - (rho - rho^{-1})/delta = " + to_string(ref));
  return p;
}

// ---- symbolic monomials ±q^e under a given order of q --------------------

struct Mono {
  int sign = 1;
  long e = 0;
};
inline Mono operator*(Mono a, Mono b) { return {a.sign * b.sign, a.e + b.e}; }
inline Mono mono_inv(Mono a) { return {a.sign, -a.e}; }

// q_order == 0: q transcendental-like (infinite order).
inline bool mono_eq(Mono a, Mono b, long q_order) {
  int s = a.sign * b.sign;
  long e = b.e - a.e;
  if (q_order == 0) return s == 1 && e == 0;
  long m = ((e % q_order) + q_order) % q_order;
  if (s == 1) return m == 0;
  return q_order % 2 == 0 && m == q_order / 2;
}

// Order of q^2 (0 = infinite).
inline long order_q2(long q_order) {
  if (q_order == 0) return 0;
  return q_order / std::gcd(q_order, 2L);
}

struct GenericReport {
  bool decidable = true;
  bool generic = true;
  std::vector<std::string> violations;
};

// Separation condition: |d| >= 2n for u_i u_j^{±1} = q^{2d} (i != j) and
// u_i = ±q^d; also o(q^2) > n.
inline GenericReport check_generic(const ParamSpec& s, int n) {
  GenericReport rep;
  if (!s.exponent) {
    rep.decidable = false;
    rep.generic = false;
    rep.violations.push_back("not decidable symbolically; rely on runtime zero detection");
    return rep;
  }
  long o2 = order_q2(s.q_order);
  if (o2 != 0 && o2 <= n)
    rep.violations.push_back("o(q^2) = " + std::to_string(o2) + " <= n = " + std::to_string(n));
  int r = s.r();
  auto U = [&](int i) { return Mono{s.e[i].sign, s.e[i].m}; };
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      if (i == j) continue;
      for (int pm : {1, -1}) {
        if (pm == -1 && j < i) continue;  // u_i u_j^{-1} covers both orders
        if (pm == 1 && j < i) continue;   // u_i u_j symmetric
        Mono v = pm == 1 ? U(i) * U(j) : U(i) * mono_inv(U(j));
        for (long d = -2L * n + 1; d <= 2L * n - 1; ++d)
          if (mono_eq(v, Mono{1, 2 * d}, s.q_order)) {
            rep.violations.push_back("u_" + std::to_string(i + 1) + " u_" + std::to_string(j + 1) +
                                     (pm == 1 ? "" : "^-1") + " = q^" + std::to_string(2 * d) +
                                     " with |d| = " + std::to_string(std::labs(d)) + " < " +
                                     std::to_string(2 * n));
            break;
          }
      }
    }
  for (int i = 0; i < r; ++i) {
    bool hit = false;
    for (long d = -2L * n + 1; d <= 2L * n - 1 && !hit; ++d)
      for (int sg : {1, -1})
        if (mono_eq(U(i), Mono{sg, d}, s.q_order)) {
          rep.violations.push_back("u_" + std::to_string(i + 1) + " = " + (sg == 1 ? "" : "-") +
                                   "q^" + std::to_string(d) + " with |" + std::to_string(d) +
                                   "| < " + std::to_string(2 * n));
          hit = true;
          break;
        }
  }
  rep.generic = rep.violations.empty();
  return rep;
}

inline ParamSpec specialize(const ParamSpec& s, const Q& qv) {
  if (!s.exponent) return s;
  if (s.q_order != 0) throw UnsupportedFiniteOrder();
  if (qv == 0 || qv == 1 || qv == -1) throw std::invalid_argument("q value must not be 0, 1 or -1");
  ParamSpec out;
  out.q = qv;
  out.alpha = s.alpha;
  for (auto& x : s.e) out.u.push_back(Q(x.sign) * qpow(qv, x.m));
  return out;
}

inline std::string describe(const ParamSpec& s) {
  std::string out;
  if (s.exponent) {
    out = "q_order=" + (s.q_order ? std::to_string(s.q_order) : std::string("inf")) + " u=";
    for (size_t i = 0; i < s.e.size(); ++i) {
      if (i) out += ",";
      out += (s.e[i].sign > 0 ? "+" : "-") + std::string("q^") + std::to_string(s.e[i].m);
    }
  } else {
    out = "q=" + to_string(s.q) + " u=";
    for (size_t i = 0; i < s.u.size(); ++i) {
      if (i) out += ",";
      out += to_string(s.u[i]);
    }
  }
  return out + " alpha=" + to_string(s.alpha);
}

}  // namespace cybmw

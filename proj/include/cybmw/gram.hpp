#pragma once
// Seminormal diagonal coefficients, edge weights, norms and Gram
// determinants of cell modules, plus slice interpolation in one u_i.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "combinat.hpp"
#include "params.hpp"
#include "rational.hpp"

namespace cybmw {

struct InvariantFailure : std::logic_error {
  using std::logic_error::logic_error;
};

inline std::string node_str(const Node& p) {
  return "(" + std::to_string(p.s) + "," + std::to_string(p.i) + "," + std::to_string(p.j) + ")";
}

// [m]_{q^2} = 1 + q^2 + ... + q^{2(m-1)}
inline Q qint2(int m, const Q& q) {
  Q s = 0, t = 1, q2 = q * q;
  for (int i = 0; i < m; ++i) {
    s += t;
    t *= q2;
  }
  return s;
}

// E_tt(k) for t with t_{k-1} = t_{k+1}.
inline Q e_diag(const Tableau& t, int k, const AdmissibleParams& P) {
  int n = (int)t.size() - 1;
  if (k < 1 || k > n - 1 || t[k - 1] != t[k + 1])
    throw std::invalid_argument("e_diag needs t_{k-1} = t_{k+1}");
  Step st = step_between(t[k - 1], t[k]);
  Q c = P.content(st);
  const Multipartition& nu = t[k - 1];
  Q prod = 1;
  auto factor = [&](const Q& ca, const Node& a) {
    prod *= div(c - inv(ca, "c" + node_str(a)), c - ca, "c_t(k) - c" + node_str(a));
  };
  for (auto& a : addable(nu))
    if (!(st.added && a == st.node)) factor(P.c_add(a), a);
  for (auto& a : removable(nu))
    if (!(!st.added && a == st.node)) factor(P.c_rem(a), a);
  Q pref;
  if (P.r % 2) {
    int e = epsilon(P, EpsConvention::diag);
    pref = inv(P.rho * c, "rho c_t(k)") * (div(c - inv(c, "c_t(k)"), P.delta, "delta") + e);
  } else {
    int e = epsilon(P, EpsConvention::diag);
    pref = inv(P.rho * P.delta, "rho delta") * (1 - div(qpow(P.q, -2 * e), c * c, "c_t(k)^2"));
  }
  return pref * prod;
}

enum class EdgeCase { add, remove_corner, remove_general };

inline const char* to_string(EdgeCase c) {
  switch (c) {
    case EdgeCase::add: return "add";
    case EdgeCase::remove_corner: return "remove_corner";
    default: return "remove_general";
  }
}

struct EdgeWeight {
  Q value = 1;
  EdgeCase tag = EdgeCase::add;
  std::vector<std::pair<std::string, Q>> trace;  // value = product of these

  void mul(const std::string& name, const Q& v) {
    trace.emplace_back(name, v);
    value *= v;
  }
  void divide(const std::string& name, const Q& v) {
    trace.emplace_back("1/(" + name + ")", inv(v, name));
    value *= trace.back().second;
  }
};

// p = (s, k, col) removed from μ is the last node of the last nonempty
// component and sits in its last row.
inline bool terminal_corner(const Multipartition& mu, const Node& p) {
  for (int j = p.s; j < (int)mu.size(); ++j)
    if (!mu[j].empty()) return false;
  return (int)mu[p.s - 1].size() == p.i;
}

// Weight of the edge μ -> λ arriving at level n, layer f (of λ).
inline EdgeWeight gamma_edge(const Multipartition& mu, const Multipartition& lam, int n, int f,
                             const AdmissibleParams& P) {
  EdgeWeight w;
  Step st = step_between(mu, lam);
  const Node& p = st.node;
  const int r = P.r, m = p.s, k = p.i;
  auto later = [&](const Node& a) { return std::make_pair(a.s, a.i) > std::make_pair(m, k); };
  if (st.added) {
    w.tag = EdgeCase::add;
    Q cp = P.c_add(p);
    w.mul("sign", ((r - m) % 2) ? Q(-1) : Q(1));
    w.mul("q^{2k}", qpow(P.q, 2 * k));
    for (auto& a : addable(lam))
      if (later(a)) w.mul("c" + node_str(a) + " - c(p)", P.c_add(a) - cp);
    w.divide("u_m (1 - q^2)", P.u[m - 1] * (1 - P.q * P.q));
    for (auto& a : removable(lam))
      if (later(a)) w.divide("1/c" + node_str(a) + " - c(p)", inv(P.c_rem(a), "c" + node_str(a)) - cp);
    return w;
  }
  const int col = p.j;
  LevelIndex below{f - 1, mu};
  Tableau tm = t_lambda(below, r);  // t^μ at level n-1
  if (terminal_corner(mu, p)) {
    w.tag = EdgeCase::remove_corner;
    Tableau t = tm;
    t.push_back(lam);
    w.mul("[col]_{q^2}", qint2(col, P.q));
    w.mul("E_tt(n-1)", e_diag(t, n - 1, P));
    for (int j = m + 1; j <= r; ++j)
      w.mul("u_s q^{2(col-k)} - u_" + std::to_string(j), P.u[m - 1] * P.q2pow(col - k) - P.u[j - 1]);
    return w;
  }
  w.tag = EdgeCase::remove_general;
  auto b = profile(mu);
  int bm1 = m >= 2 ? b[m - 2] : 0;
  int a = 2 * (f - 1) + bm1;
  for (int j = 1; j <= k; ++j) a += part(mu[m - 1], j);
  Tableau v(tm.begin(), tm.begin() + a + 1);
  v.push_back(remove_node(tm[a], p));
  const Q& um = P.u[m - 1];
  Q umi = inv(um, "u_m");
  w.mul("[col]_{q^2}", qint2(col, P.q));
  w.mul("E_vv(a)", e_diag(v, a, P));
  w.divide("u_m q^{-2k} - u_m^{-1} q^{-2(col-k)}", um * qpow(P.q, -2 * k) - umi * P.q2pow(k - col));
  for (int j = m + 1; j <= r; ++j) {
    w.mul("u_m q^{2(col-k)} - u_" + std::to_string(j), um * P.q2pow(col - k) - P.u[j - 1]);
    w.divide("u_" + std::to_string(j) + " - u_m^{-1} q^{-2(col-k)}", P.u[j - 1] - umi * P.q2pow(k - col));
  }
  Q cp = P.c_rem(p);
  for (auto& x : addable(mu))
    if (later(x)) w.mul("c" + node_str(x) + " - c(p)", P.c_add(x) - cp);
  for (auto& x : removable(mu))
    if (later(x)) w.divide("1/c" + node_str(x) + " - c(p)", inv(P.c_rem(x), "c" + node_str(x)) - cp);
  return w;
}

// θ_t = ⟨f_t, f_t⟩ as the product of edge weights along the path.
inline Q norm_f(const Tableau& t, const AdmissibleParams& P) {
  Q v = 1;
  for (int i = 1; i < (int)t.size(); ++i) {
    try {
      v *= gamma_edge(t[i - 1], t[i], i, layer_at(t, i), P).value;
    } catch (const ZeroDenominator& z) {
      throw ZeroDenominator("step " + std::to_string(i) + ": " + z.factor);
    }
  }
  return v;
}

inline Q swap_factor(const Q& c, const Q& c2, const AdmissibleParams& P) {
  Q d = c2 - c;
  return 1 - div(P.delta * P.delta * c * c2, d * d, "c_t(k+1) - c_t(k)");
}

// The tableau t s_k (t with position k replaced), if it exists.
inline std::optional<Tableau> swap_partner(const Tableau& t, int k) {
  if (t[k - 1] == t[k + 1]) return std::nullopt;
  auto try_mid = [&](const Multipartition& mid) -> std::optional<Tableau> {
    if (mid == t[k]) return std::nullopt;
    try {
      step_between(mid, t[k + 1]);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
    Tableau s = t;
    s[k] = mid;
    return s;
  };
  for (auto& a : addable(t[k - 1]))
    if (auto s = try_mid(add_node(t[k - 1], a))) return s;
  for (auto& a : removable(t[k - 1]))
    if (auto s = try_mid(remove_node(t[k - 1], a))) return s;
  return std::nullopt;
}

// Whether the pair (t, t s_k) satisfies one of the two configurations under
// which the swap rule is stated, with t the dominant member.
inline bool swap_eligible(const Tableau& t, int k) {
  auto s = swap_partner(t, k);
  if (!s) return false;
  LevelIndex a{layer_at(t, k), t[k]}, b{layer_at(*s, k), (*s)[k]};
  if (dominance_cmp(a, b) != Cmp::greater) return false;
  Step s1 = step_between(t[k - 1], t[k]), s2 = step_between(t[k], t[k + 1]);
  if (s1.added && s2.added) return true;
  if (!s1.added && s2.added)
    return std::make_pair(s2.node.s, s2.node.i) > std::make_pair(s1.node.s, s1.node.i);
  return false;
}

// θ_{t s_k} from θ_t.
inline Q norm_swap(const Q& theta, const Tableau& t, int k, const AdmissibleParams& P) {
  if (!swap_eligible(t, k)) throw std::invalid_argument("swap rule does not apply to (t, k)");
  return theta * swap_factor(P.content(t, k), P.content(t, k + 1), P);
}

// ---- determinants --------------------------------------------------------

struct GramResult {
  Q det = 0;
  std::vector<std::pair<std::string, Q>> norms;  // keyed by path encoding
  std::optional<std::string> vanished;
};

// Memo for the recursion; tied to one parameter set, safe to share.
class GramMemo {
 public:
  std::optional<Q> get(const std::string& key) {
    std::lock_guard<std::mutex> g(mu_);
    auto it = m_.find(key);
    if (it == m_.end()) return std::nullopt;
    return it->second;
  }
  void put(const std::string& key, const Q& v) {
    std::lock_guard<std::mutex> g(mu_);
    m_.emplace(key, v);
  }
  size_t size() {
    std::lock_guard<std::mutex> g(mu_);
    return m_.size();
  }

 private:
  std::mutex mu_;
  std::map<std::string, Q> m_;
};

inline std::string memo_key(const LevelIndex& x, int n) {
  return std::to_string(n) + "|" + std::to_string(x.f) + "|" + encode(x.shape);
}

// det G_{f,λ} by the recursion over covers, grounded at n = 0.
inline Q det_recursive(const LevelIndex& x, int n, const AdmissibleParams& P, GramMemo& memo) {
  if (n == 0) return 1;
  std::string key = memo_key(x, n);
  if (auto v = memo.get(key)) return *v;
  Q d = 1;
  for (auto& c : covers(x, n)) {
    Q sub = det_recursive(c, n - 1, P, memo);
    Q g = gamma_edge(c.shape, x.shape, n, x.f, P).value;
    unsigned long e = dim_cell(c, P.r, n - 1).get_ui();
    Q gp;
    mpz_pow_ui(gp.get_num_mpz_t(), g.get_num_mpz_t(), e);
    mpz_pow_ui(gp.get_den_mpz_t(), g.get_den_mpz_t(), e);
    gp.canonicalize();
    d *= sub * gp;
  }
  memo.put(key, d);
  return d;
}

// Both routes; throws InvariantFailure if they disagree.
inline GramResult det_gram(const LevelIndex& x, int n, const AdmissibleParams& P, GramMemo* memo = nullptr,
                           bool with_norms = true) {
  GramResult res;
  GramMemo local;
  GramMemo& M = memo ? *memo : local;
  try {
    res.det = det_recursive(x, n, P, M);
    if (with_norms) {
      Q prod = 1;
      for (auto& t : enum_updown(x, P.r, n)) {
        Q th = norm_f(t, P);
        prod *= th;
        res.norms.emplace_back(encode(t), th);
      }
      if (prod != res.det)
        throw InvariantFailure("recursion gives " + to_string(res.det) + " but product of norms gives " +
                               to_string(prod));
    }
  } catch (const ZeroDenominator& z) {
    res.det = 0;
    res.norms.clear();
    res.vanished = z.factor;
  }
  return res;
}

// Closed form for θ_{t^λ}.
inline Q norm_closed_tlambda(const LevelIndex& x, const AdmissibleParams& P) {
  const int r = P.r, f = x.f;
  Q fact = 1;
  for (auto& p : x.shape)
    for (int row : p)
      for (int i = 1; i <= row; ++i) fact *= qint2(i, P.q);
  Q v = fact * inv(qpow(P.rho * P.delta, f), "rho delta");
  const Q& u1 = P.u[0];
  Q u1i = inv(u1, "u_1");
  int e = epsilon(P, EpsConvention::sets);
  if (r % 2)
    v *= qpow((u1i + qpow(P.q, -e)) * (-u1i + qpow(P.q, e)), f);
  else
    v *= qpow((u1 + qpow(P.q, e)) * (u1 - qpow(P.q, e)) * u1i * u1i, f);
  Tableau t = t_lambda(x, r);
  auto a = profile(x.shape);
  for (int j = 2; j <= r; ++j) {
    for (int k = 1; k <= a[j - 2]; ++k) v *= P.content(t, 2 * f + k) - P.u[j - 1];
    v *= qpow((u1 - P.u[j - 1]) * (u1 - inv(P.u[j - 1], "u_j")), f);
  }
  return v;
}

// ---- slice interpolation -------------------------------------------------

struct DegreeBoundExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SampleNotGeneric : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Laurent polynomial in one u_i: value(x) = x^{-shift} * Σ coeffs[k] x^k.
struct SlicePoly {
  int var = 0;  // 0-based index of the sliced u
  long shift = 0;
  std::vector<Q> coeffs;
  std::vector<std::pair<Q, Q>> samples;  // (x, det) ledger

  Q eval(const Q& x) const {
    Q s = 0;
    for (size_t k = coeffs.size(); k-- > 0;) s = s * x + coeffs[k];
    return s * qpow(x, -shift);
  }
  bool root_at(const Q& x) const { return eval(x) == 0; }
  long low_degree() const {
    for (size_t k = 0; k < coeffs.size(); ++k)
      if (coeffs[k] != 0) return (long)k - shift;
    return 0;
  }
  long high_degree() const {
    for (size_t k = coeffs.size(); k-- > 0;)
      if (coeffs[k] != 0) return (long)k - shift;
    return 0;
  }
};

// Newton interpolation through (xs[i], ys[i]), returned in monomial basis.
inline std::vector<Q> interpolate(const std::vector<Q>& xs, const std::vector<Q>& ys) {
  size_t N = xs.size();
  std::vector<Q> dd(ys);
  for (size_t j = 1; j < N; ++j)
    for (size_t i = N - 1; i >= j; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
      if (i == j) break;
    }
  std::vector<Q> poly(N, Q(0));
  for (size_t k = N; k-- > 0;) {
    // poly = poly * (x - xs[k]) + dd[k]
    std::vector<Q> next(N, Q(0));
    for (size_t d = 0; d + 1 < N; ++d) next[d + 1] += poly[d];
    for (size_t d = 0; d < N; ++d) next[d] -= poly[d] * xs[k];
    next[0] += dd[k];
    poly.swap(next);
  }
  return poly;
}

// Fits x^B * g(x) as a polynomial of degree <= 2B on the first 2B+1 samples
// and checks the remaining samples.
inline SlicePoly fit_laurent(int var, long B, const std::vector<std::pair<Q, Q>>& samples) {
  size_t need = 2 * B + 1;
  if (samples.size() < need + 2) throw std::invalid_argument("not enough samples for degree bound");
  std::vector<Q> xs, ys;
  for (size_t i = 0; i < need; ++i) {
    xs.push_back(samples[i].first);
    ys.push_back(samples[i].second * qpow(samples[i].first, B));
  }
  SlicePoly sp;
  sp.var = var;
  sp.shift = B;
  sp.coeffs = interpolate(xs, ys);
  sp.samples = samples;
  for (size_t i = need; i < samples.size(); ++i)
    if (sp.eval(samples[i].first) != samples[i].second)
      throw DegreeBoundExceeded("held-out sample mismatch at u = " + to_string(samples[i].first));
  while (sp.coeffs.size() > 1 && sp.coeffs.back() == 0) sp.coeffs.pop_back();
  return sp;
}

inline std::vector<long> primes_from(long start, size_t count) {
  std::vector<long> out;
  for (long p = std::max(2L, start); out.size() < count; ++p) {
    bool ok = true;
    for (long d = 2; d * d <= p && ok; ++d) ok = p % d != 0;
    if (ok) out.push_back(p);
  }
  return out;
}

inline long default_degree_bound(int n, int r) { return 4L * n * r + 8; }

// Determinant as a function of the sliced u, other entries from spec.
inline std::optional<Q> det_at_slice(const LevelIndex& x, int n, const ParamSpec& spec, int var, const Q& uv) {
  ParamSpec s = spec;
  s.u[var] = uv;
  AdmissibleParams P;
  try {
    P = derive_params(s);
  } catch (const ZeroDenominator&) {
    return std::nullopt;
  }
  GramResult g = det_gram(x, n, P, nullptr, false);
  if (g.vanished) return std::nullopt;
  return g.det;
}

// Interpolates det G_{1,λ} in u_{var} from the given samples (all must be generic).
inline SlicePoly det_slice(const LevelIndex& x, int n, const ParamSpec& spec, int var, const std::vector<Q>& xs,
                           long B = -1) {
  if (x.f != 1) throw std::invalid_argument("slice interpolation is defined for f = 1");
  if (spec.exponent) throw std::invalid_argument("slice needs a rational-mode spec");
  if (B < 0) B = default_degree_bound(n, spec.r());
  std::vector<std::pair<Q, Q>> smp;
  for (auto& xv : xs) {
    auto d = det_at_slice(x, n, spec, var, xv);
    if (!d) throw SampleNotGeneric("sample u = " + to_string(xv) + " hits a vanishing factor");
    smp.emplace_back(xv, *d);
  }
  return fit_laurent(var, B, smp);
}

struct RobustDet {
  Q value;
  std::string method;  // "direct" or "slice u_i (B=...)"
  std::optional<std::string> vanished;
};

// Direct evaluation; if a factor vanishes, interpolate along a u-slice
// through generic prime samples with an adaptive degree bound.
inline RobustDet robust_det(const LevelIndex& x, int n, const ParamSpec& spec, long max_bound = 512) {
  AdmissibleParams P;
  std::optional<std::string> why;
  try {
    P = derive_params(spec);
    GramResult g = det_gram(x, n, P, nullptr, false);
    if (!g.vanished) return {g.det, "direct", std::nullopt};
    why = g.vanished;
  } catch (const ZeroDenominator& z) {
    why = z.factor;
  }
  const int r = spec.r();
  for (int var = 0; var < r; ++var) {
    for (long B = default_degree_bound(n, r); B <= max_bound; B *= 2) {
      std::vector<std::pair<Q, Q>> smp;
      size_t need = 2 * B + 3;
      long p = 3;
      size_t misses = 0;
      while (smp.size() < need && misses <= need) {
        auto ps = primes_from(p, 1);
        p = ps[0] + 1;
        Q xv(ps[0]);
        if (xv == spec.u[var]) continue;
        if (auto d = det_at_slice(x, n, spec, var, xv))
          smp.emplace_back(xv, *d);
        else
          ++misses;
      }
      // the vanishing factor does not involve u_var: try the next slice
      if (smp.size() < need) break;
      try {
        SlicePoly sp = fit_laurent(var, B, smp);
        return {sp.eval(spec.u[var]), "slice u_" + std::to_string(var + 1) + " B=" + std::to_string(B), why};
      } catch (const DegreeBoundExceeded&) {
      }
    }
  }
  throw DegreeBoundExceeded("no slice reproduced held-out samples");
}

}  // namespace cybmw

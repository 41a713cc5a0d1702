#pragma once
// Semisimplicity and quasi-heredity decision procedures, and their
// cross-validation against Gram determinants.

#include <algorithm>
#include <atomic>
#include <future>
#include <string>
#include <vector>

#include "combinat.hpp"
#include "gram.hpp"
#include "params.hpp"

namespace cybmw {

struct Violation {
  std::string clause;
  std::string witness;
};

struct SemisimpleVerdict {
  bool semisimple = true;
  std::vector<Violation> violations;
  void add(std::string c, std::string w) {
    violations.push_back({std::move(c), std::move(w)});
    semisimple = false;
  }
};

// Field elements as seen by the clause engine: exact rationals in rational
// mode, signed powers of q (under the order of q) in exponent mode.
class ClauseField {
 public:
  struct Elem {
    Q v;
    Mono m;
  };
  explicit ClauseField(const ParamSpec& s) : s_(s) { validate(s); }

  int r() const { return s_.r(); }
  bool exponent() const { return s_.exponent; }
  Elem u(int i) const {
    if (s_.exponent) return {Q(0), Mono{s_.e[i].sign, s_.e[i].m}};
    return {s_.u[i], Mono{}};
  }
  Elem qp(long e, int sign = 1) const {
    if (s_.exponent) return {Q(0), Mono{sign, e}};
    return {Q(sign) * qpow(s_.q, e), Mono{}};
  }
  Elem mul(const Elem& a, const Elem& b) const {
    if (s_.exponent) return {Q(0), a.m * b.m};
    return {a.v * b.v, Mono{}};
  }
  Elem inverse(const Elem& a) const {
    if (s_.exponent) return {Q(0), mono_inv(a.m)};
    return {inv(a.v, "element"), Mono{}};
  }
  bool eq(const Elem& a, const Elem& b) const {
    if (s_.exponent) return mono_eq(a.m, b.m, s_.q_order);
    return a.v == b.v;
  }
  // Order of q^2 (0 = infinite); over the rationals q^2 != 1 has infinite order.
  long order_q2() const { return s_.exponent ? cybmw::order_q2(s_.q_order) : 0; }
  std::string show(const Elem& a) const {
    if (s_.exponent) return std::string(a.m.sign < 0 ? "-" : "") + "q^" + std::to_string(a.m.e);
    return to_string(a.v);
  }
  int eps_sets() const { return epsilon(s_.alpha, r(), EpsConvention::sets); }
  const ParamSpec& spec() const { return s_; }

 private:
  ParamSpec s_;
};

inline std::string uname(int i) { return "u_" + std::to_string(i + 1); }

// Finds d with |d| < bound and a == q^{2d}.
inline std::optional<long> find_q2_power(const ClauseField& F, const ClauseField::Elem& a, long bound) {
  for (long d = 0; d < bound; ++d)
    for (long sd : {d, -d})
      if (F.eq(a, F.qp(2 * sd))) return sd;
  return std::nullopt;
}

// Ariki-type conditions: o(q^2) > n and |d| >= n for u_i u_j^{-1} = q^{2d}.
inline void hecke_clauses(const ClauseField& F, int n, SemisimpleVerdict& v, const std::string& id_o,
                          const std::string& id_d) {
  long o2 = F.order_q2();
  if (o2 != 0 && o2 <= n) v.add(id_o, "o(q^2)=" + std::to_string(o2));
  for (int i = 0; i < F.r(); ++i)
    for (int j = i + 1; j < F.r(); ++j)
      if (auto d = find_q2_power(F, F.mul(F.u(i), F.inverse(F.u(j))), n))
        v.add(id_d, uname(i) + "/" + uname(j) + "=q^" + std::to_string(2 * *d) + " |d|=" +
                        std::to_string(std::labs(*d)));
}

inline SemisimpleVerdict hecke_semisimple(const ParamSpec& spec, int n) {
  ClauseField F(spec);
  SemisimpleVerdict v;
  hecke_clauses(F, n, v, "2.17.o", "2.17.d");
  return v;
}

// Q_{r,ϱ}: odd r {-εq, εq^{-1}}; even r {-q^ε, q^ε}.
inline std::vector<ClauseField::Elem> set_Q(const ClauseField& F) {
  int e = F.eps_sets();
  if (F.r() % 2) return {F.qp(1, -e), F.qp(-1, e)};
  return {F.qp(e, -1), F.qp(e, 1)};
}

// S_{r,ϱ}: union over k = 3..n.
inline std::vector<ClauseField::Elem> set_S(const ClauseField& F, int n) {
  int e = F.eps_sets();
  std::vector<ClauseField::Elem> S;
  for (int k = 3; k <= n; ++k) {
    for (int sg : {1, -1}) {
      S.push_back(F.qp(3 - k, sg));
      S.push_back(F.qp(k - 3, sg));
    }
    if (F.r() % 2) {
      S.push_back(F.qp(3 - 2 * k, e));
      S.push_back(F.qp(2 * k - 3, -e));
    } else {
      S.push_back(F.qp((2 * k - 3) * e, 1));
      S.push_back(F.qp((2 * k - 3) * e, -1));
    }
  }
  return S;
}

inline bool member(const ClauseField& F, const ClauseField::Elem& x, const std::vector<ClauseField::Elem>& S,
                   std::string* hit = nullptr) {
  for (auto& y : S)
    if (F.eq(x, y)) {
      if (hit) *hit = F.show(y);
      return true;
    }
  return false;
}

// Clause engine for the semisimplicity criterion (r = 1 handled by the same
// engine as an extension).
inline SemisimpleVerdict bmw_semisimple(const ParamSpec& spec, int n) {
  if (n < 2) throw std::invalid_argument("semisimplicity criterion needs n >= 2");
  ClauseField F(spec);
  SemisimpleVerdict v;
  const int r = F.r();
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if (F.eq(F.u(i), F.inverse(F.u(j)))) v.add("6.8.0.inv", uname(i) + "=" + uname(j) + "^-1");
  auto Qs = set_Q(F);
  for (int i = 0; i < r; ++i) {
    std::string hit;
    if (member(F, F.u(i), Qs, &hit)) v.add("6.8.0.Q", uname(i) + "=" + hit);
  }
  if (n == 2) {
    hecke_clauses(F, 2, v, "6.8.1", "6.8.1");
    return v;
  }
  hecke_clauses(F, n, v, "6.8.2.i", "6.8.2.ii");
  auto S = set_S(F, n);
  for (int i = 0; i < r; ++i) {
    std::string hit;
    if (member(F, F.u(i), S, &hit)) v.add("6.8.2.iii", uname(i) + "=" + hit);
  }
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      auto p = F.mul(F.u(i), F.u(j));
      for (int k = 3; k <= n; ++k)
        for (long ex : {4L - 2 * k, 2L * k - 4})
          if (F.eq(p, F.qp(ex))) {
            v.add("6.8.2.iv", uname(i) + uname(j) + "=q^" + std::to_string(ex));
            goto next_pair;
          }
    next_pair:;
    }
  return v;
}

// ---- the Λ_n shapes and det G_{1,λ} clause lists -------------------------

// λ of size k-2 (k = 2..n) with every box in one component, forming a
// single row or a single column.
inline std::vector<Multipartition> lambda_n(int r, int n) {
  std::vector<Multipartition> out;
  out.push_back(empty_shape(r));
  for (int k = 3; k <= n; ++k)
    for (int m = 0; m < r; ++m) {
      Multipartition row = empty_shape(r), col = empty_shape(r);
      row[m] = Partition{k - 2};
      col[m] = Partition(k - 2, 1);
      out.push_back(row);
      if (col != row) out.push_back(col);
    }
  return out;
}

struct G1Verdict {
  bool nonzero = true;
  std::string rule;  // which clause list was applied
  std::vector<Violation> violations;
  void add(std::string c, std::string w) {
    violations.push_back({std::move(c), std::move(w)});
    nonzero = false;
  }
};

struct UnsupportedShape : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Clause list predicting det G_{1,λ} != 0 at level n = |λ| + 2.
// For a single box both the row and the column lists apply; they
// disagree there, and the row list is used (the determinant scan sides
// with it).
inline G1Verdict g1_predicate(const Multipartition& lam, const ParamSpec& spec, int n) {
  ClauseField F(spec);
  const int r = F.r();
  if ((int)lam.size() != r || size(lam) + 2 != n) throw UnsupportedShape("need |lambda| = n - 2");
  G1Verdict v;
  const int e = F.eps_sets();
  if (size(lam) == 0) {
    v.rule = "6.1";
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j)
        if (F.eq(F.mul(F.u(i), F.u(j)), F.qp(0))) v.add("6.1.a", uname(i) + uname(j) + "=1");
    std::string hit;
    for (int i = 0; i < r; ++i)
      if (member(F, F.u(i), set_Q(F), &hit)) v.add(r % 2 ? "6.1.b" : "6.1.c", uname(i) + "=" + hit);
    return v;
  }
  int m = -1;
  for (int i = 0; i < r; ++i)
    if (!lam[i].empty()) {
      if (m >= 0) throw UnsupportedShape("boxes in more than one component");
      m = i;
    }
  const Partition& p = lam[m];
  bool is_row = p.size() == 1, is_col = std::all_of(p.begin(), p.end(), [](int x) { return x == 1; });
  if (!is_row && !is_col) throw UnsupportedShape("shape is neither a row nor a column");
  auto um = F.u(m);
  std::string hit;
  auto chk_um = [&](const std::string& id, std::vector<ClauseField::Elem> S) {
    if (member(F, um, S, &hit)) v.add(id, uname(m) + "=" + hit);
  };
  auto chk_others = [&](const std::string& id, std::vector<ClauseField::Elem> S) {
    for (int i = 0; i < r; ++i)
      if (i != m && member(F, F.u(i), S, &hit)) v.add(id, uname(i) + "=" + hit);
  };
  auto chk_prod_m = [&](const std::string& id, std::vector<long> exps) {
    for (int i = 0; i < r; ++i) {
      if (i == m) continue;
      for (long ex : exps)
        if (F.eq(F.mul(F.u(i), um), F.qp(ex))) {
          v.add(id, uname(i) + uname(m) + "=q^" + std::to_string(ex));
          break;
        }
    }
  };
  auto chk_pairs = [&](const std::string& id) {
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j)
        if (i != m && j != m && F.eq(F.mul(F.u(i), F.u(j)), F.qp(0))) v.add(id, uname(i) + uname(j) + "=1");
  };
  bool odd = r % 2;
  if (is_row) {
    v.rule = "6.2";
    chk_um("6.2.a", {F.qp(3 - n, 1), F.qp(3 - n, -1)});
    chk_prod_m("6.2.b", {4L - 2 * n, 2});
    chk_pairs("6.2.c");
    if (odd) {
      chk_um("6.2.d", {F.qp(3, -e), F.qp(3 - 2 * n, e), F.qp(1, e)});
      chk_others("6.2.d", {F.qp(1, -e), F.qp(-1, e)});
    } else if (spec.alpha == Alpha::qinv) {
      chk_um("6.2.e", {F.qp(3, -1), F.qp(3, 1)});
      chk_others("6.2.e", {F.qp(1, 1), F.qp(1, -1)});
    } else {
      chk_um("6.2.f", {F.qp(3 - 2 * n, -1), F.qp(3 - 2 * n, 1), F.qp(1, -1), F.qp(1, 1)});
      chk_others("6.2.f", {F.qp(-1, 1), F.qp(-1, -1)});
    }
  } else {
    v.rule = "6.3";
    chk_um("6.3.a", {F.qp(n - 3, 1), F.qp(n - 3, -1)});
    chk_prod_m("6.3.b", {2L * n - 4, -2});
    chk_pairs("6.3.c");
    if (odd) {
      chk_um("6.3.d", {F.qp(-3, e), F.qp(2 * n - 3, -e), F.qp(-1, -e)});
      chk_others("6.3.d", {F.qp(1, -e), F.qp(-1, e)});
    } else if (spec.alpha == Alpha::qinv) {
      chk_um("6.3.e", {F.qp(2 * n - 3, -1), F.qp(2 * n - 3, 1), F.qp(-1, -1), F.qp(-1, 1)});
      chk_others("6.3.e", {F.qp(1, 1), F.qp(1, -1)});
    } else {
      chk_um("6.3.f", {F.qp(-3, -1), F.qp(-3, 1)});
      chk_others("6.3.f", {F.qp(-1, 1), F.qp(-1, -1)});
    }
  }
  return v;
}

// ---- quasi-heredity ------------------------------------------------------

// ω_0..ω_{r-1} all vanish iff every γ_j does (Vandermonde in distinct u),
// and γ_j = 0 iff u_j u_l = 1 for some l != j or u_j lies in Q_{r,ϱ}.
inline bool omegas_all_zero(const ParamSpec& spec) {
  ClauseField F(spec);
  auto Qs = set_Q(F);
  for (int j = 0; j < F.r(); ++j) {
    bool zero = member(F, F.u(j), Qs);
    for (int l = 0; l < F.r() && !zero; ++l)
      if (l != j && F.eq(F.mul(F.u(j), F.u(l)), F.qp(0))) zero = true;
    if (!zero) return false;
  }
  return true;
}

struct QHVerdict {
  bool quasi_hereditary = true;
  bool all_omega_zero = false;
  std::vector<Violation> violations;
};

inline QHVerdict quasi_hereditary(const ParamSpec& spec, int n) {
  QHVerdict out;
  ClauseField F(spec);
  if (!spec.exponent) {
    AdmissibleParams P = derive_params(spec);
    bool z = true;
    for (int i = 0; i < P.r; ++i) z = z && P.omega(i) == 0;
    out.all_omega_zero = z;
  } else {
    out.all_omega_zero = omegas_all_zero(spec);
  }
  SemisimpleVerdict h;
  hecke_clauses(F, n, h, "2.17.o", "2.17.d");
  out.violations = h.violations;
  if (out.all_omega_zero && n % 2 == 0) out.violations.push_back({"2.17.b", "all omega_i = 0 and n even"});
  out.quasi_hereditary = out.violations.empty();
  return out;
}

// ---- cross-validation ----------------------------------------------------

struct CrossReport {
  SemisimpleVerdict A;
  bool B = true, C = true;
  std::vector<std::string> B_witness, C_witness;
  bool agree() const { return A.semisimple == B && B == C; }
};

// A: clause engine. B: Hecke conditions and det G_{1,λ} != 0 over Λ_n,
// each computed at its own level. C: every det G_{f,λ} at level n.
inline CrossReport cross_validate(const ParamSpec& spec, int n, const Q& q_value = Q(2), int workers = 1) {
  CrossReport rep;
  rep.A = bmw_semisimple(spec, n);
  ParamSpec rs = spec.exponent ? specialize(spec, q_value) : spec;
  const int r = spec.r();
  if (!hecke_semisimple(spec, n).semisimple) {
    rep.B = false;
    rep.B_witness.push_back("hecke conditions fail");
  }
  struct Job {
    LevelIndex x;
    int level;
    bool forB;
  };
  std::vector<Job> jobs;
  if (rep.B)
    for (auto& lam : lambda_n(r, n)) jobs.push_back({{1, lam}, size(lam) + 2, true});
  for (auto& x : level_indices(r, n)) jobs.push_back({x, n, false});
  std::vector<RobustDet> res(jobs.size());
  auto run = [&](size_t i) { res[i] = robust_det(jobs[i].x, jobs[i].level, rs); };
  if (workers <= 1) {
    for (size_t i = 0; i < jobs.size(); ++i) run(i);
  } else {
    std::vector<std::future<void>> fs;
    std::atomic<size_t> next{0};
    for (int w = 0; w < workers; ++w)
      fs.push_back(std::async(std::launch::async, [&] {
        for (size_t i; (i = next++) < jobs.size();) run(i);
      }));
    for (auto& f : fs) f.get();
  }
  for (size_t i = 0; i < jobs.size(); ++i) {
    if (res[i].value != 0) continue;
    std::string w = "det G_{" + std::to_string(jobs[i].x.f) + "," + encode(jobs[i].x.shape) + "} at n=" +
                    std::to_string(jobs[i].level) + " = 0 (" + res[i].method + ")";
    if (jobs[i].forB) {
      rep.B = false;
      rep.B_witness.push_back(w);
    } else {
      rep.C = false;
      rep.C_witness.push_back(w);
    }
  }
  return rep;
}

}  // namespace cybmw

#pragma once
// Independent reference computations used by the tests. Nothing here calls
// the library routine it is meant to check.

#include <map>
#include <set>
#include <vector>

#include <cybmw/combinat.hpp>
#include <cybmw/params.hpp>

namespace oracle {

using cybmw::Multipartition;
using cybmw::Partition;
using cybmw::Q;

inline bool is_partition(const Partition& p) {
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) return false;
    if (i && p[i] > p[i - 1]) return false;
  }
  return true;
}

// Every partition of m by filtering all compositions.
inline std::vector<Partition> all_partitions(int m) {
  std::vector<Partition> out;
  if (m == 0) return {{}};
  for (int mask = 0; mask < (1 << (m - 1)); ++mask) {
    Partition p{1};
    for (int b = 0; b < m - 1; ++b)
      if (mask >> b & 1)
        p.push_back(1);
      else
        ++p.back();
    if (is_partition(p)) out.push_back(p);
  }
  return out;
}

inline std::set<Multipartition> all_multipartitions(int r, int m) {
  std::set<Multipartition> out;
  std::vector<int> sizes(r, 0);
  auto rec = [&](auto&& self, int s, int left, Multipartition cur) -> void {
    if (s == r - 1) {
      for (auto& p : all_partitions(left)) {
        auto c = cur;
        c.push_back(p);
        out.insert(c);
      }
      return;
    }
    for (int k = 0; k <= left; ++k)
      for (auto& p : all_partitions(k)) {
        auto c = cur;
        c.push_back(p);
        self(self, s + 1, left - k, c);
      }
  };
  rec(rec, 0, m, {});
  return out;
}

// Neighbours by trying to bump every row in every component.
inline std::vector<Multipartition> neighbours(const Multipartition& m) {
  std::vector<Multipartition> out;
  for (size_t s = 0; s < m.size(); ++s) {
    for (size_t i = 0; i <= m[s].size(); ++i) {
      auto c = m;
      if (i == c[s].size())
        c[s].push_back(1);
      else
        ++c[s][i];
      if (is_partition(c[s])) out.push_back(c);
    }
    for (size_t i = 0; i < m[s].size(); ++i) {
      auto c = m;
      --c[s][i];
      if (i + 1 < c[s].size() && c[s][i + 1] > c[s][i]) continue;
      if (c[s][i] == 0) c[s].pop_back();
      out.push_back(c);
    }
  }
  return out;
}

// Number of length-n walks from the empty shape to every shape.
inline std::map<Multipartition, long> path_counts(int r, int n) {
  std::map<Multipartition, long> cur{{Multipartition(r), 1}};
  for (int k = 0; k < n; ++k) {
    std::map<Multipartition, long> nxt;
    for (auto& [m, c] : cur)
      for (auto& nb : neighbours(m)) nxt[nb] += c;
    cur = nxt;
  }
  return cur;
}

inline long double_fact(int n) {
  long v = 1;
  for (int k = 2 * n - 1; k > 1; k -= 2) v *= k;
  return v;
}

// Determinant by fraction-exact Gaussian elimination.
inline Q det(std::vector<std::vector<Q>> a) {
  size_t n = a.size();
  Q d = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      Q f = a[r][c] / a[c][c];
      for (size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return d;
}

// Hankel matrix [ω_{i+j}]_{0<=i,j<r}: the Gram matrix of the cell module
// spanned by E_1 X_1^a (0 <= a < r) at level 2.
inline Q hankel_det(const cybmw::AdmissibleParams& P) {
  int r = P.r;
  std::vector<std::vector<Q>> m(r, std::vector<Q>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m[i][j] = P.omega(i + j);
  return det(m);
}

// ω_0 from its closed expression, using α's field value directly.
inline Q omega0_closed(const Q& q, const std::vector<Q>& u, cybmw::Alpha a) {
  Q al = a == cybmw::Alpha::plus ? Q(1) : a == cybmw::Alpha::minus ? Q(-1) : a == cybmw::Alpha::qinv ? Q(Q(1) / q) : Q(-q);
  Q prod = 1;
  for (auto& x : u) prod *= x;
  Q rho_inv = al * prod, rho = 1 / rho_inv;
  Q delta = q - 1 / q;
  return 1 - (rho - rho_inv) / delta;
}

}  // namespace oracle

#pragma once
// Partitions, multipartitions, nodes and updown tableaux.

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "rational.hpp"

namespace cybmw {

using Partition = std::vector<int>;            // weakly decreasing, no zeros
using Multipartition = std::vector<Partition>;  // one entry per component
using Tableau = std::vector<Multipartition>;    // t_0 .. t_n

struct Node {
  int s = 1, i = 1, j = 1;  // component, row, column (1-based)
  auto operator<=>(const Node&) const = default;
};

struct LevelIndex {
  int f = 0;
  Multipartition shape;
  bool operator==(const LevelIndex&) const = default;
};

enum class Cmp { greater, less, equal, incomparable };

inline const char* to_string(Cmp c) {
  switch (c) {
    case Cmp::greater: return "greater";
    case Cmp::less: return "less";
    case Cmp::equal: return "equal";
    default: return "incomparable";
  }
}

inline int size(const Partition& p) {
  int s = 0;
  for (int x : p) s += x;
  return s;
}

inline int size(const Multipartition& m) {
  int s = 0;
  for (auto& p : m) s += size(p);
  return s;
}

inline int part(const Partition& p, int i) {  // 1-based row, 0 past the end
  return i >= 1 && i <= (int)p.size() ? p[i - 1] : 0;
}

// Cumulative sizes [a_1..a_r].
inline std::vector<int> profile(const Multipartition& m) {
  std::vector<int> a;
  int c = 0;
  for (auto& p : m) a.push_back(c += size(p));
  return a;
}

inline Multipartition empty_shape(int r) { return Multipartition(r); }

inline bool valid(const Multipartition& m, int r) {
  if ((int)m.size() != r) return false;
  for (auto& p : m)
    for (size_t i = 0; i < p.size(); ++i)
      if (p[i] <= 0 || (i + 1 < p.size() && p[i] < p[i + 1])) return false;
  return true;
}

// ---- enumeration ---------------------------------------------------------

// Partitions of m in reverse-lexicographic order, (m) first.
inline std::vector<Partition> partitions(int m) {
  std::vector<Partition> out;
  Partition cur;
  auto rec = [&](auto&& self, int left, int maxp) -> void {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int p = std::min(left, maxp); p >= 1; --p) {
      cur.push_back(p);
      self(self, left - p, p);
      cur.pop_back();
    }
  };
  rec(rec, m, m);
  return out;
}

// Canonical order: component 1 first, larger sizes first, reverse-lex within.
inline std::vector<Multipartition> multipartitions(int r, int m) {
  std::vector<Multipartition> out;
  Multipartition cur(r);
  auto rec = [&](auto&& self, int s, int left) -> void {
    if (s == r - 1) {
      for (auto& p : partitions(left)) {
        cur[s] = p;
        out.push_back(cur);
      }
      return;
    }
    for (int sz = left; sz >= 0; --sz)
      for (auto& p : partitions(sz)) {
        cur[s] = p;
        self(self, s + 1, left - sz);
      }
  };
  if (r >= 1 && m >= 0) rec(rec, 0, m);
  return out;
}

// >0 if a precedes b in the canonical order.
inline int canon_cmp(const Multipartition& a, const Multipartition& b) {
  for (size_t s = 0; s < a.size() && s < b.size(); ++s) {
    int sa = size(a[s]), sb = size(b[s]);
    if (sa != sb) return sa > sb ? 1 : -1;
    if (a[s] != b[s]) return a[s] > b[s] ? 1 : -1;
  }
  return 0;
}

// a dominates b (same total size assumed): cumulative sums never fall below.
inline bool dominates(const Multipartition& a, const Multipartition& b) {
  int ca = 0, cb = 0;
  for (size_t s = 0; s < a.size(); ++s) {
    size_t len = std::max(a[s].size(), b[s].size());
    int pa = ca, pb = cb;
    for (size_t l = 0; l < len; ++l) {
      pa += part(a[s], (int)l + 1);
      pb += part(b[s], (int)l + 1);
      if (pa < pb) return false;
    }
    ca += size(a[s]);
    cb += size(b[s]);
    if (ca < cb) return false;
  }
  return true;
}

inline Cmp dominance_cmp(const LevelIndex& a, const LevelIndex& b) {
  if (a.f != b.f) return a.f > b.f ? Cmp::greater : Cmp::less;
  bool ab = dominates(a.shape, b.shape), ba = dominates(b.shape, a.shape);
  if (ab && ba) return Cmp::equal;
  if (ab) return Cmp::greater;
  if (ba) return Cmp::less;
  return Cmp::incomparable;
}

// ---- nodes ---------------------------------------------------------------

// Lexicographic order on (s, i).
inline bool node_pos_less(const Node& a, const Node& b) {
  return std::tie(a.s, a.i) < std::tie(b.s, b.i);
}

inline std::vector<Node> addable(const Multipartition& m) {
  std::vector<Node> out;
  for (int s = 1; s <= (int)m.size(); ++s) {
    auto& p = m[s - 1];
    for (int i = 1; i <= (int)p.size() + 1; ++i) {
      int j = part(p, i) + 1;
      if (i == 1 || part(p, i - 1) >= j) out.push_back({s, i, j});
    }
  }
  return out;
}

inline std::vector<Node> removable(const Multipartition& m) {
  std::vector<Node> out;
  for (int s = 1; s <= (int)m.size(); ++s) {
    auto& p = m[s - 1];
    for (int i = 1; i <= (int)p.size(); ++i)
      if (part(p, i + 1) < p[i - 1]) out.push_back({s, i, p[i - 1]});
  }
  return out;
}

struct BoundaryNodes {
  std::vector<Node> addable, removable;
};

// Both lists ordered so the resulting shapes descend in dominance:
// removing a later node dominates, adding an earlier node dominates.
inline BoundaryNodes boundary_nodes(const Multipartition& m) {
  BoundaryNodes b{addable(m), removable(m)};
  std::reverse(b.removable.begin(), b.removable.end());
  return b;
}

inline Multipartition add_node(Multipartition m, const Node& n) {
  auto& p = m[n.s - 1];
  if (n.i - 1 == (int)p.size())
    p.push_back(1);
  else
    ++p[n.i - 1];
  return m;
}

inline Multipartition remove_node(Multipartition m, const Node& n) {
  auto& p = m[n.s - 1];
  if (--p[n.i - 1] == 0) p.pop_back();
  return m;
}

struct Step {
  bool added;
  Node node;
};

// The node changed between consecutive shapes a -> b.
inline Step step_between(const Multipartition& a, const Multipartition& b) {
  if (size(b) == size(a) + 1) {
    for (auto& n : addable(a))
      if (add_node(a, n) == b) return {true, n};
  } else if (size(b) + 1 == size(a)) {
    for (auto& n : removable(a))
      if (remove_node(a, n) == b) return {false, n};
  }
  throw std::invalid_argument("shapes do not differ by one node");
}

// Symbolic content: product of u_s^{u[s]} and q^{qexp}.
struct SymContent {
  std::vector<int> u;
  int qexp = 0;
  bool operator==(const SymContent&) const = default;
  SymContent& operator*=(const SymContent& o) {
    if (u.size() < o.u.size()) u.resize(o.u.size());
    for (size_t i = 0; i < o.u.size(); ++i) u[i] += o.u[i];
    qexp += o.qexp;
    return *this;
  }
};

inline SymContent sym_content(const Node& n, bool added, int r) {
  SymContent c;
  c.u.assign(r, 0);
  c.u[n.s - 1] = added ? 1 : -1;
  c.qexp = (added ? 2 : -2) * (n.j - n.i);
  return c;
}

inline SymContent sym_content(const Tableau& t, int k, int r) {
  auto st = step_between(t[k - 1], t[k]);
  return sym_content(st.node, st.added, r);
}

// ---- dimensions ----------------------------------------------------------

inline Z factorial(int n) {
  Z r;
  mpz_fac_ui(r.get_mpz_t(), (unsigned long)std::max(n, 0));
  return r;
}

inline Z double_factorial_odd(int f) {  // (2f-1)!!
  Z r = 1;
  for (int k = 2 * f - 1; k > 1; k -= 2) r *= k;
  return r;
}

inline Z hook_product(const Partition& p) {
  Z h = 1;
  for (int i = 1; i <= (int)p.size(); ++i)
    for (int j = 1; j <= p[i - 1]; ++j) {
      int leg = 0;
      for (int k = i + 1; k <= (int)p.size() && p[k - 1] >= j; ++k) ++leg;
      h *= (p[i - 1] - j) + leg + 1;
    }
  return h;
}

inline bool valid_index(const LevelIndex& x, int r, int n) {
  return x.f >= 0 && 2 * x.f <= n && valid(x.shape, r) &&
         size(x.shape) + 2 * x.f == n;
}

inline Z dim_cell(const LevelIndex& x, int r, int n) {
  if (!valid_index(x, r, n)) throw std::invalid_argument("malformed level index");
  Z num = Z(1), den = factorial(2 * x.f);
  mpz_class rf;
  mpz_ui_pow_ui(rf.get_mpz_t(), (unsigned long)r, (unsigned long)x.f);
  num = rf * factorial(n) * double_factorial_odd(x.f);
  for (auto& p : x.shape) {
    int sz = size(p);
    den *= factorial(sz);
    num *= factorial(sz);
    den *= hook_product(p);
  }
  if (num % den != 0) throw std::logic_error("dimension not integral");
  return num / den;
}

inline Z rank_algebra(int r, int n) {
  Z p;
  mpz_ui_pow_ui(p.get_mpz_t(), (unsigned long)r, (unsigned long)n);
  return p * double_factorial_odd(n);
}

// All (f, λ) at level n: f ascending, canonical order within a layer.
inline std::vector<LevelIndex> level_indices(int r, int n) {
  std::vector<LevelIndex> out;
  for (int f = 0; 2 * f <= n; ++f)
    for (auto& m : multipartitions(r, n - 2 * f)) out.push_back({f, m});
  return out;
}

// ---- updown tableaux -----------------------------------------------------

inline int layer_at(const Tableau& t, int k) { return (k - size(t[k])) / 2; }

// >0 if a precedes b: compare from position n down, larger layer first,
// then canonical shape order.
inline int tableau_cmp(const Tableau& a, const Tableau& b) {
  for (int k = (int)a.size() - 1; k >= 0; --k) {
    if (a[k] == b[k]) continue;
    int fa = layer_at(a, k), fb = layer_at(b, k);
    if (fa != fb) return fa > fb ? 1 : -1;
    return canon_cmp(a[k], b[k]);
  }
  return 0;
}

inline int diagram_distance(const Multipartition& a, const Multipartition& b) {
  int d = 0;
  for (size_t s = 0; s < a.size(); ++s) {
    size_t len = std::max(a[s].size(), b[s].size());
    for (size_t i = 1; i <= len; ++i) {
      int x = part(a[s], (int)i), y = part(b[s], (int)i);
      d += std::abs(x - y);
    }
  }
  return d;
}

inline std::vector<Tableau> enum_updown(const LevelIndex& x, int r, int n) {
  if (!valid_index(x, r, n)) throw std::invalid_argument("malformed level index");
  std::vector<Tableau> out;
  Tableau path{empty_shape(r)};
  auto rec = [&](auto&& self) -> void {
    int k = (int)path.size() - 1;
    const Multipartition cur = path.back();
    if (diagram_distance(cur, x.shape) > n - k) return;
    if (k == n) {
      out.push_back(path);
      return;
    }
    for (auto& nd : addable(cur)) {
      path.push_back(add_node(cur, nd));
      self(self);
      path.pop_back();
    }
    for (auto& nd : removable(cur)) {
      path.push_back(remove_node(cur, nd));
      self(self);
      path.pop_back();
    }
  };
  rec(rec);
  std::sort(out.begin(), out.end(),
            [](const Tableau& a, const Tableau& b) { return tableau_cmp(a, b) > 0; });
  return out;
}

// The maximal tableau: f add/remove pairs of (1) in component 1, then λ
// row by row, component by component.
inline Tableau t_lambda(const LevelIndex& x, int r) {
  Tableau t{empty_shape(r)};
  Multipartition one = empty_shape(r);
  one[0] = {1};
  for (int i = 0; i < x.f; ++i) {
    t.push_back(one);
    t.push_back(empty_shape(r));
  }
  Multipartition cur = empty_shape(r);
  for (int s = 1; s <= r; ++s)
    for (int i = 1; i <= (int)x.shape[s - 1].size(); ++i)
      for (int j = 1; j <= x.shape[s - 1][i - 1]; ++j) {
        cur = add_node(cur, {s, i, j});
        t.push_back(cur);
      }
  return t;
}

// Indices (l, μ) at level n-1 with (l, μ) -> (f, λ); removals first.
inline std::vector<LevelIndex> covers(const LevelIndex& x, int n) {
  std::vector<LevelIndex> out;
  if (n < 1) return out;
  auto b = boundary_nodes(x.shape);
  for (auto& p : b.removable) out.push_back({x.f, remove_node(x.shape, p)});
  if (x.f > 0)
    for (auto& p : b.addable) out.push_back({x.f - 1, add_node(x.shape, p)});
  return out;
}

// ---- text encoding -------------------------------------------------------

inline std::string encode(const Multipartition& m) {
  std::string s = "[";
  for (size_t c = 0; c < m.size(); ++c) {
    if (c) s += ",";
    s += "[";
    for (size_t i = 0; i < m[c].size(); ++i) {
      if (i) s += ",";
      s += std::to_string(m[c][i]);
    }
    s += "]";
  }
  return s + "]";
}

inline std::string encode(const Tableau& t) {
  std::string s;
  for (size_t k = 0; k < t.size(); ++k) {
    if (k) s += ">";
    s += encode(t[k]);
  }
  return s;
}

// Parses "[[2,1],[1]]". Also accepts "[]" or "[2,1]" as a one-component
// shape and pads with empty components up to r when r > 0.
inline Multipartition parse_multipartition(const std::string& text, int r = 0) {
  std::string s;
  for (char c : text)
    if (!isspace((unsigned char)c)) s += c;
  auto bad = [&] { return std::invalid_argument("bad multipartition: " + text); };
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw bad();
  std::string inner = s.substr(1, s.size() - 2);
  Multipartition m;
  if (inner.empty()) {
    m.push_back({});
  } else if (inner.front() != '[') {
    Partition p;
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) p.push_back(std::stoi(tok));
    m.push_back(p);
  } else {
    size_t i = 0;
    while (i < inner.size()) {
      if (inner[i] != '[') throw bad();
      size_t e = inner.find(']', i);
      if (e == std::string::npos) throw bad();
      Partition p;
      std::stringstream ss(inner.substr(i + 1, e - i - 1));
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) p.push_back(std::stoi(tok));
      m.push_back(p);
      i = e + 1;
      if (i < inner.size()) {
        if (inner[i] != ',') throw bad();
        ++i;
      }
    }
  }
  if (r > 0) {
    if ((int)m.size() > r) throw bad();
    m.resize(r);
  }
  if (!valid(m, (int)m.size())) throw bad();
  return m;
}

}  // namespace cybmw

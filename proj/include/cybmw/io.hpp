#pragma once
// Serialization, the on-disk result cache and the flat config format.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gram.hpp"
#include "params.hpp"

namespace cybmw {

using json = nlohmann::ordered_json;

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
  return buf;
}

inline json to_json(const GramResult& g) {
  json j;
  j["det"] = to_string(g.det);
  j["vanished"] = g.vanished ? json(*g.vanished) : json(nullptr);
  json norms = json::array();
  for (auto& [path, th] : g.norms) norms.push_back({{"path", path}, {"theta", to_string(th)}});
  j["norms"] = norms;
  return j;
}

inline GramResult gram_from_json(const json& j) {
  GramResult g;
  g.det = parse_q(j.at("det").get<std::string>());
  if (!j.at("vanished").is_null()) g.vanished = j.at("vanished").get<std::string>();
  for (auto& e : j.at("norms")) g.norms.emplace_back(e.at("path").get<std::string>(), parse_q(e.at("theta").get<std::string>()));
  return g;
}

inline std::string params_hash(const ParamSpec& s) { return hex64(fnv1a(describe(s))); }

inline std::string cache_key(int r, int n, const LevelIndex& x, const ParamSpec& s) {
  return std::to_string(r) + "|" + std::to_string(n) + "|" + std::to_string(x.f) + "|" + encode(x.shape) + "|" +
         params_hash(s);
}

// Append-only line cache: header "CYBMW-CACHE v1", then key TAB checksum TAB
// payload. Lines whose checksum does not match are ignored; a file with a
// wrong header is discarded and rewritten on the next put.
class DiskCache {
 public:
  static constexpr const char* header = "CYBMW-CACHE v1";

  explicit DiskCache(std::string path) : path_(std::move(path)) { load(); }

  std::optional<std::string> get(const std::string& key) {
    std::lock_guard<std::mutex> g(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& key, const std::string& payload) {
    std::lock_guard<std::mutex> g(mu_);
    if (entries_.count(key)) return;
    entries_[key] = payload;
    bool fresh = bad_header_ || !std::ifstream(path_).good();
    std::ofstream out(path_, fresh ? std::ios::trunc : std::ios::app);
    if (fresh) out << header << "\n";
    bad_header_ = false;
    out << key << "\t" << checksum(key, payload) << "\t" << payload << "\n";
  }

  size_t rejected() const { return rejected_; }
  size_t size() const { return entries_.size(); }

  static std::string checksum(const std::string& key, const std::string& payload) {
    return hex64(fnv1a(key + "\t" + payload));
  }

 private:
  void load() {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    if (!std::getline(in, line) || line != header) {
      rejected_ = 1;
      bad_header_ = true;
      return;
    }
    while (std::getline(in, line)) {
      auto a = line.find('\t');
      auto b = a == std::string::npos ? a : line.find('\t', a + 1);
      if (b == std::string::npos) {
        ++rejected_;
        continue;
      }
      std::string key = line.substr(0, a), sum = line.substr(a + 1, b - a - 1), payload = line.substr(b + 1);
      if (checksum(key, payload) != sum) {
        ++rejected_;
        continue;
      }
      entries_[key] = payload;
    }
  }

  std::string path_;
  std::mutex mu_;
  std::map<std::string, std::string> entries_;
  size_t rejected_ = 0;
  bool bad_header_ = false;
};

// Flat "key = value" lines, '#' starts a comment.
inline std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    size_t a = tok.find_first_not_of(" \t"), b = tok.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(tok.substr(a, b - a + 1));
  }
  return out;
}

// "+2", "-3", "+q^2", "-q^-1" -> sign and exponent.
inline ExpEntry parse_exp_entry(const std::string& t) {
  std::string s = t;
  int sign = 1;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    sign = s[0] == '-' ? -1 : 1;
    s = s.substr(1);
  }
  if (s.rfind("q^", 0) == 0) s = s.substr(2);
  size_t pos = 0;
  long m = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad exponent entry: " + t);
  return {sign, m};
}

inline std::vector<ExpEntry> parse_exp_list(const std::string& s) {
  std::vector<ExpEntry> out;
  for (auto& t : split_list(s)) out.push_back(parse_exp_entry(t));
  return out;
}

inline std::vector<Q> parse_q_list(const std::string& s) {
  std::vector<Q> out;
  for (auto& t : split_list(s)) out.push_back(parse_q(t));
  return out;
}

inline json to_json(const ParamSpec& s) {
  json j;
  if (s.exponent) {
    j["mode"] = "exponent";
    j["q_order"] = s.q_order ? json(s.q_order) : json("inf");
    json u = json::array();
    for (auto& e : s.e) u.push_back((e.sign > 0 ? "+q^" : "-q^") + std::to_string(e.m));
    j["u_exp"] = u;
  } else {
    j["mode"] = "rational";
    j["q"] = to_string(s.q);
    json u = json::array();
    for (auto& x : s.u) u.push_back(to_string(x));
    j["u"] = u;
  }
  j["alpha"] = to_string(s.alpha);
  return j;
}

}  // namespace cybmw

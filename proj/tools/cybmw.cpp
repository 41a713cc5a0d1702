// Command-line front end for the cyclotomic BMW engine.

#include <CLI11.hpp>

#include <atomic>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include <cybmw/criteria.hpp>
#include <cybmw/gram.hpp>
#include <cybmw/io.hpp>
#include <cybmw/seminormal.hpp>

using namespace cybmw;

namespace {

enum Exit { ok = 0, usage = 2, nongeneric = 3, invariant = 4 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raw option values; shared by flags and config files.
struct Opts {
  int r = 0, n = -1, f = -1, workers = 1, amax = -1;
  unsigned long seed = 1;
  bool json = false, norms = false;
  std::string lambda, q, u, alpha, q_order = "inf", u_exp, cache, config, q_value = "2";
};

ParamSpec build_spec(const Opts& o) {
  ParamSpec s;
  if (!o.u_exp.empty()) {
    long order = 0;
    if (o.q_order != "inf") order = std::stol(o.q_order);
    s = ParamSpec::exponents(parse_exp_list(o.u_exp), Alpha::plus, order);
  } else {
    if (o.q.empty() || o.u.empty()) throw UsageError("need --q and --u, or --u-exp");
    s = ParamSpec::rational(parse_q(o.q), parse_q_list(o.u), Alpha::plus);
  }
  int r = s.r();
  if (o.r && o.r != r) throw UsageError("--r does not match the number of u entries");
  s.alpha = o.alpha.empty() ? (r % 2 ? Alpha::plus : Alpha::qinv) : parse_alpha(o.alpha);
  validate(s);
  return s;
}

// Rational image used by the Gram engine.
ParamSpec rational_image(const ParamSpec& s, const Opts& o) {
  return s.exponent ? specialize(s, parse_q(o.q_value)) : s;
}

int need_r(const Opts& o, const ParamSpec* s = nullptr) {
  int r = o.r ? o.r : (s ? s->r() : 0);
  if (r < 1) throw UsageError("--r must be >= 1");
  return r;
}

int need_n(const Opts& o, int lo = 0) {
  if (o.n < lo) throw UsageError("--n must be >= " + std::to_string(lo));
  return o.n;
}

LevelIndex need_index(const Opts& o, int r, int n) {
  if (o.f < 0 || o.lambda.empty()) throw UsageError("need --f and --lambda");
  LevelIndex x{o.f, parse_multipartition(o.lambda, r)};
  if (!valid_index(x, r, n)) throw UsageError("index does not lie at level n");
  return x;
}

json violations_json(const std::vector<Violation>& vs) {
  json a = json::array();
  for (auto& v : vs) a.push_back({{"clause", v.clause}, {"witness", v.witness}});
  return a;
}

// ---- command bodies: each returns a JSON record and a text rendering ----

struct Outcome {
  json rec;
  std::string text;
  int code = ok;
};

Outcome do_dims(const Opts& o) {
  int r = need_r(o), n = need_n(o);
  Outcome out;
  json rows = json::array();
  std::ostringstream t;
  Z total = 0;
  for (auto& x : level_indices(r, n)) {
    Z d = dim_cell(x, r, n);
    total += d * d;
    rows.push_back({{"f", x.f}, {"lambda", encode(x.shape)}, {"dim", d.get_str()}});
    t << "(" << x.f << "," << encode(x.shape) << "): " << d.get_str() << "\n";
  }
  Z rank = rank_algebra(r, n);
  bool good = total == rank;
  t << "total " << total.get_str() << (good ? " = " : " != ") << rank.get_str() << " " << (good ? "ok" : "MISMATCH")
    << "\n";
  out.rec = {{"command", "dims"}, {"r", r}, {"n", n}, {"rows", rows}, {"sum_dim_sq", total.get_str()},
             {"rank", rank.get_str()}, {"ok", good}};
  out.text = t.str();
  if (!good) out.code = invariant;
  return out;
}

Outcome do_enum(const Opts& o) {
  int r = need_r(o), n = need_n(o);
  LevelIndex x = need_index(o, r, n);
  Outcome out;
  json list = json::array();
  for (auto& t : enum_updown(x, r, n)) {
    list.push_back(encode(t));
    out.text += encode(t) + "\n";
  }
  out.rec = {{"command", "enum"}, {"r", r}, {"n", n}, {"f", x.f}, {"lambda", encode(x.shape)}, {"tableaux", list}};
  return out;
}

Outcome do_params(const Opts& o) {
  ParamSpec s = build_spec(o);
  Outcome out;
  out.rec = {{"command", "params"}, {"params", to_json(s)}};
  std::ostringstream t;
  t << describe(s) << "\n";
  if (s.exponent && o.n >= 0) {
    auto g = check_generic(s, o.n);
    out.rec["generic"] = g.generic;
    out.rec["generic_violations"] = g.violations;
    t << "generic at n=" << o.n << ": " << (g.generic ? "yes" : "no") << "\n";
    for (auto& v : g.violations) t << "  " << v << "\n";
  }
  if (!s.exponent || s.q_order == 0) {
    ParamSpec rs = rational_image(s, o);
    AdmissibleParams P = derive_params(rs);
    json g = json::array(), w = json::array();
    for (auto& x : P.gamma) g.push_back(to_string(x));
    int amax = o.amax >= 0 ? o.amax : 2 * P.r;
    for (int a = 0; a <= amax; ++a) w.push_back(to_string(P.omega(a)));
    out.rec["delta"] = to_string(P.delta);
    out.rec["rho"] = to_string(P.rho);
    out.rec["gamma"] = g;
    out.rec["omega"] = w;
    t << "delta = " << to_string(P.delta) << "\nrho = " << to_string(P.rho) << "\n";
    for (int i = 0; i < P.r; ++i) t << "gamma_" << i + 1 << " = " << to_string(P.gamma[i]) << "\n";
    for (int a = 0; a <= amax; ++a) t << "omega_" << a << " = " << to_string(P.omega(a)) << "\n";
  }
  out.text = t.str();
  return out;
}

GramResult gram_cached(const LevelIndex& x, int n, const ParamSpec& rs, DiskCache* cache, bool norms) {
  std::string key = cache_key(rs.r(), n, x, rs) + (norms ? "|norms" : "");
  if (cache)
    if (auto hit = cache->get(key)) return gram_from_json(json::parse(*hit));
  AdmissibleParams P = derive_params(rs);
  GramResult g = det_gram(x, n, P, nullptr, norms);
  if (cache) cache->put(key, to_json(g).dump());
  return g;
}

Outcome do_gram(const Opts& o, DiskCache* cache) {
  ParamSpec s = build_spec(o);
  int r = s.r(), n = need_n(o);
  LevelIndex x = need_index(o, r, n);
  ParamSpec rs = rational_image(s, o);
  GramResult g = gram_cached(x, n, rs, cache, o.norms);
  Outcome out;
  json j = to_json(g);
  if (!o.norms) j.erase("norms");
  out.rec = {{"command", "gram"}, {"r", r}, {"n", n}, {"f", x.f}, {"lambda", encode(x.shape)},
             {"params", to_json(rs)}, {"result", j}};
  if (g.vanished) {
    out.text = "vanishing factor: " + *g.vanished + "\n";
    out.code = nongeneric;
    return out;
  }
  out.text = to_string(g.det) + "\n";
  if (o.norms)
    for (auto& [p, th] : g.norms) out.text += p + "\t" + to_string(th) + "\n";
  return out;
}

Outcome do_semisimple(const Opts& o) {
  ParamSpec s = build_spec(o);
  int n = need_n(o, 1);
  auto v = bmw_semisimple(s, n);
  Outcome out;
  out.rec = {{"command", "semisimple"}, {"n", n}, {"params", to_json(s)},
             {"verdict", v.semisimple ? "semisimple" : "not_semisimple"}, {"violations", violations_json(v.violations)}};
  out.text = std::string(v.semisimple ? "semisimple" : "not_semisimple") + "\n";
  for (auto& x : v.violations) out.text += x.clause + " " + x.witness + "\n";
  return out;
}

Outcome do_quasi(const Opts& o) {
  ParamSpec s = build_spec(o);
  int n = need_n(o, 1);
  auto v = quasi_hereditary(s, n);
  Outcome out;
  out.rec = {{"command", "quasi"},
             {"n", n},
             {"params", to_json(s)},
             {"verdict", v.quasi_hereditary ? "quasi_hereditary" : "not_quasi_hereditary"},
             {"all_omega_zero", v.all_omega_zero},
             {"violations", violations_json(v.violations)}};
  out.text = std::string(v.quasi_hereditary ? "quasi_hereditary" : "not_quasi_hereditary") + "\n";
  for (auto& x : v.violations) out.text += x.clause + " " + x.witness + "\n";
  return out;
}

Outcome do_verify(const Opts& o) {
  ParamSpec s = build_spec(o);
  int r = s.r(), n = need_n(o, 1);
  if (s.exponent) {
    auto g = check_generic(s, n);
    if (!g.generic) throw NonGenericParams("parameters not generic: " + g.violations.front());
  }
  AdmissibleParams P = derive_params(rational_image(s, o));
  int amax = o.amax >= 0 ? o.amax : 2 * r;
  std::vector<LevelIndex> xs;
  if (o.f >= 0 || !o.lambda.empty())
    xs.push_back(need_index(o, r, n));
  else
    xs = level_indices(r, n);
  Outcome out;
  json recs = json::array();
  bool all = true;
  for (auto& x : xs) {
    RelationReport rep = verify_block_identities(x, n, P, amax);
    all = all && rep.all_pass();
    json lines = json::array();
    for (auto& l : rep.lines)
      lines.push_back({{"relation", l.relation}, {"position", l.position}, {"block", l.block},
                       {"pass", l.pass}, {"residual", to_string(l.residual)}});
    recs.push_back({{"f", x.f}, {"lambda", encode(x.shape)}, {"all_pass", rep.all_pass()}, {"lines", lines}});
    out.text += "# f=" + std::to_string(x.f) + " lambda=" + encode(x.shape) + "\n" + rep.serialize();
  }
  out.text += std::string(all ? "all pass" : "FAILURES") + "\n";
  out.rec = {{"command", "verify"}, {"r", r}, {"n", n}, {"amax", amax}, {"params", to_json(s)},
             {"all_pass", all}, {"indices", recs}};
  if (!all) out.code = invariant;
  return out;
}

Outcome do_crossval(const Opts& o, int workers) {
  ParamSpec s = build_spec(o);
  int n = need_n(o, 2);
  auto rep = cross_validate(s, n, parse_q(o.q_value), workers);
  auto word = [](bool b) { return b ? "semisimple" : "not_semisimple"; };
  Outcome out;
  out.rec = {{"command", "crossval"},
             {"n", n},
             {"params", to_json(s)},
             {"A", word(rep.A.semisimple)},
             {"A_violations", violations_json(rep.A.violations)},
             {"B", word(rep.B)},
             {"B_witness", rep.B_witness},
             {"C", word(rep.C)},
             {"C_witness", rep.C_witness},
             {"agree", rep.agree()}};
  std::ostringstream t;
  t << "A " << word(rep.A.semisimple) << "\n";
  for (auto& v : rep.A.violations) t << "  " << v.clause << " " << v.witness << "\n";
  t << "B " << word(rep.B) << "\n";
  for (auto& w : rep.B_witness) t << "  " << w << "\n";
  t << "C " << word(rep.C) << "\n";
  for (auto& w : rep.C_witness) t << "  " << w << "\n";
  t << (rep.agree() ? "agree" : "DISAGREE") << "\n";
  out.text = t.str();
  return out;
}

// ---- sweep ---------------------------------------------------------------

// "a..b" or a single integer.
std::pair<long, long> parse_range(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos) {
    long v = std::stol(s);
    return {v, v};
  }
  long a = std::stol(s.substr(0, dots)), b = std::stol(s.substr(dots + 2));
  if (a > b) throw UsageError("empty range " + s);
  return {a, b};
}

struct SweepPoint {
  Opts o;
};

// Grid points in lexicographic order: n, alpha, then u exponents (u1 slowest),
// then signs. Explicit "points" or seeded "random_points" replace the ranges.
std::vector<SweepPoint> sweep_grid(const std::map<std::string, std::string>& cfg, const Opts& base,
                                   std::string& target) {
  auto get = [&](const std::string& k, const std::string& d = "") {
    auto it = cfg.find(k);
    return it == cfg.end() ? d : it->second;
  };
  for (auto& [k, v] : cfg) {
    static const std::set<std::string> known = {"target", "r", "n", "alpha", "q_order", "signs", "points",
                                                "random_points", "exp_range", "seed", "f", "lambda",
                                                "amax", "q_value", "workers", "output", "cache"};
    if (!known.count(k) && !(k.size() > 1 && k[0] == 'u' && std::isdigit((unsigned char)k[1])))
      throw UsageError("unknown config key: " + k);
  }
  target = get("target");
  static const std::set<std::string> targets = {"dims", "gram", "semisimple", "quasi", "verify", "crossval"};
  if (!targets.count(target)) throw UsageError("config target must be one of dims|gram|semisimple|quasi|verify|crossval");
  std::vector<int> ns;
  for (auto& t : split_list(get("n", "2"))) {
    auto [a, b] = parse_range(t);
    for (long v = a; v <= b; ++v) ns.push_back((int)v);
  }
  Opts proto = base;
  proto.q_order = get("q_order", "inf");
  proto.f = std::stoi(get("f", "-1"));
  proto.lambda = get("lambda");
  proto.amax = std::stoi(get("amax", std::to_string(base.amax)));
  proto.q_value = get("q_value", base.q_value);
  std::vector<SweepPoint> out;
  if (target == "dims") {
    int r = std::stoi(get("r", "1"));
    for (int n : ns) {
      SweepPoint p{proto};
      p.o.r = r;
      p.o.n = n;
      out.push_back(p);
    }
    return out;
  }
  std::vector<std::string> us;  // u-exp strings
  if (!get("points").empty()) {
    us = split_list(get("points"), ';');
  } else if (!get("random_points").empty()) {
    int cnt = std::stoi(get("random_points")), r = std::stoi(get("r", "2"));
    auto [lo, hi] = parse_range(get("exp_range", "-6..6"));
    std::mt19937_64 rng(std::stoul(get("seed", std::to_string(base.seed))));
    std::uniform_int_distribution<long> ed(lo, hi);
    std::uniform_int_distribution<int> sd(0, 1);
    for (int i = 0; i < cnt; ++i) {
      std::string s;
      for (int j = 0; j < r; ++j) {
        long e = ed(rng);
        bool neg = sd(rng);
        s += (j ? "," : "") + std::string(neg ? "-" : "+") + std::to_string(e);
      }
      us.push_back(s);
    }
  } else {
    int r = std::stoi(get("r", "2"));
    std::vector<std::pair<long, long>> ranges;
    for (int j = 1; j <= r; ++j) ranges.push_back(parse_range(get("u" + std::to_string(j), "0")));
    auto signs = split_list(get("signs", "+"));
    std::vector<long> cur(r);
    std::function<void(int)> rec = [&](int j) {
      if (j == r) {
        // every sign pattern drawn from the allowed list
        size_t total = 1;
        for (int i = 0; i < r; ++i) total *= signs.size();
        for (size_t m = 0; m < total; ++m) {
          std::string s;
          size_t code = m;
          std::vector<std::string> sg(r);
          for (int i = r - 1; i >= 0; --i) {
            sg[i] = signs[code % signs.size()];
            code /= signs.size();
          }
          for (int i = 0; i < r; ++i) s += (i ? "," : "") + sg[i] + std::to_string(cur[i]);
          us.push_back(s);
        }
        return;
      }
      for (long v = ranges[j].first; v <= ranges[j].second; ++v) {
        cur[j] = v;
        rec(j + 1);
      }
    };
    rec(0);
  }
  std::vector<std::string> alphas = split_list(get("alpha", ""));
  if (alphas.empty()) alphas.push_back("");
  for (int n : ns)
    for (auto& a : alphas)
      for (auto& u : us) {
        SweepPoint p{proto};
        p.o.n = n;
        p.o.alpha = a;
        p.o.u_exp = u;
        out.push_back(p);
      }
  return out;
}

Outcome run_target(const std::string& target, const Opts& o, DiskCache* cache) {
  if (target == "dims") return do_dims(o);
  if (target == "semisimple") return do_semisimple(o);
  if (target == "quasi") return do_quasi(o);
  if (target == "verify") return do_verify(o);
  if (target == "crossval") return do_crossval(o, 1);
  // gram: a single index if given, otherwise every index at level n
  if (o.f >= 0) return do_gram(o, cache);
  ParamSpec s = build_spec(o);
  ParamSpec rs = rational_image(s, o);
  Outcome out;
  json dets = json::array();
  for (auto& x : level_indices(s.r(), need_n(o))) {
    GramResult g = gram_cached(x, o.n, rs, cache, false);
    dets.push_back({{"f", x.f}, {"lambda", encode(x.shape)}, {"det", to_string(g.det)},
                    {"vanished", g.vanished ? json(*g.vanished) : json(nullptr)}});
  }
  out.rec = {{"command", "gram"}, {"n", o.n}, {"params", to_json(rs)}, {"dets", dets}};
  return out;
}

// Maps an exception to an exit code and message.
int classify(std::exception_ptr e, std::string& msg) {
  try {
    std::rethrow_exception(e);
  } catch (const ZeroDenominator& x) {
    msg = std::string("vanishing factor: ") + x.factor;
    return nongeneric;
  } catch (const NonGenericParams& x) {
    msg = x.what();
    return nongeneric;
  } catch (const EpsilonUnresolvable& x) {
    msg = x.what();
    return nongeneric;
  } catch (const UnsupportedFiniteOrder& x) {
    msg = "finite q order is not supported by the Gram engine";
    return usage;
  } catch (const InvariantFailure& x) {
    msg = x.what();
    return invariant;
  } catch (const ConsistencyFailure& x) {
    msg = x.what();
    return invariant;
  } catch (const std::invalid_argument& x) {
    msg = x.what();
    return usage;
  } catch (const std::out_of_range& x) {
    msg = std::string("bad number: ") + x.what();
    return usage;
  } catch (const std::exception& x) {
    msg = x.what();
    return invariant;
  }
}

int do_sweep(const Opts& base) {
  if (base.config.empty()) throw UsageError("sweep needs --config");
  std::ifstream in(base.config);
  if (!in) throw UsageError("cannot read config " + base.config);
  auto cfg = parse_config(in);
  std::string target;
  auto pts = sweep_grid(cfg, base, target);
  // grid points validate before any work starts
  for (size_t i = 0; i < pts.size(); ++i)
    if (target != "dims") try {
        build_spec(pts[i].o);
      } catch (const std::exception& e) {
        throw UsageError("grid point " + std::to_string(i) + ": " + e.what());
      }
  int workers = base.workers;
  if (cfg.count("workers") && base.workers == 1) workers = std::stoi(cfg["workers"]);
  std::string cache_path = base.cache.empty() && cfg.count("cache") ? cfg["cache"] : base.cache;
  std::unique_ptr<DiskCache> cache;
  if (!cache_path.empty()) cache = std::make_unique<DiskCache>(cache_path);
  std::vector<std::string> lines(pts.size());
  std::vector<int> codes(pts.size(), ok);
  auto work = [&](size_t i) {
    json rec = {{"index", i}, {"target", target}};
    try {
      Outcome o = run_target(target, pts[i].o, cache.get());
      rec["result"] = o.rec;
      codes[i] = o.code;
    } catch (...) {
      std::string msg;
      codes[i] = classify(std::current_exception(), msg);
      rec["error"] = msg;
      rec["u_exp"] = pts[i].o.u_exp;
      rec["n"] = pts[i].o.n;
    }
    lines[i] = rec.dump();
  };
  std::atomic<size_t> next{0};
  std::vector<std::future<void>> fs;
  for (int w = 0; w < std::max(1, workers); ++w)
    fs.push_back(std::async(std::launch::async, [&] {
      for (size_t i; (i = next++) < pts.size();) work(i);
    }));
  for (auto& f : fs) f.get();
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (cfg.count("output")) {
    file.open(cfg["output"]);
    os = &file;
  }
  int rc = ok;
  for (size_t i = 0; i < pts.size(); ++i) {
    *os << lines[i] << "\n";
    if (codes[i] != ok && rc == ok) rc = codes[i];
  }
  return rc;
}

void add_common(CLI::App* c, Opts& o) {
  c->add_option("--r", o.r, "number of u parameters");
  c->add_option("--n", o.n, "level n");
  c->add_option("--f", o.f, "layer f");
  c->add_option("--lambda", o.lambda, "multipartition, e.g. [[2,1],[1]]");
  c->add_option("--q", o.q, "rational q");
  c->add_option("--u", o.u, "rational u list, comma separated");
  c->add_option("--alpha", o.alpha, "plus|minus (odd r), qinv|negq (even r)");
  c->add_option("--q-order", o.q_order, "order of q: inf or an integer > 2");
  c->add_option("--u-exp", o.u_exp, "exponent-mode u list, e.g. +2,-3");
  c->add_option("--q-value", o.q_value, "q used to specialize exponent mode");
  c->add_option("--amax", o.amax, "largest a for the omega_a checks");
  c->add_flag("--norms", o.norms, "print per-tableau norms");
  c->add_option("--config", o.config, "sweep config file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact invariants of cyclotomic BMW algebras"};
  app.require_subcommand(1);
  Opts o;
  app.add_flag("--json", o.json, "JSON-lines output");
  app.add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--cache", o.cache, "persistent cache file");
  app.add_option("--seed", o.seed, "seed for randomized grids");
  std::vector<std::pair<std::string, std::string>> names = {
      {"dims", "cell indices with dimensions and the rank check"},
      {"enum", "up-down tableaux of one cell index"},
      {"params", "derived parameters gamma, rho, omega"},
      {"gram", "exact Gram determinant of one cell module"},
      {"semisimple", "semisimplicity verdict from the clause list"},
      {"quasi", "quasi-heredity verdict"},
      {"verify", "blockwise seminormal identity report"},
      {"crossval", "clause list vs shape product vs full determinant scan"},
      {"sweep", "run a target over a config grid as JSON lines"}};
  std::map<std::string, CLI::App*> subs;
  for (auto& [nm, desc] : names) {
    auto* c = app.add_subcommand(nm, desc);
    add_common(c, o);
    // global flags are also accepted after the subcommand
    c->add_flag("--json", o.json);
    c->add_option("--workers", o.workers)->check(CLI::PositiveNumber);
    c->add_option("--cache", o.cache);
    c->add_option("--seed", o.seed);
    subs[nm] = c;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }
  std::string cmd;
  for (auto& [nm, c] : subs)
    if (c->parsed()) cmd = nm;
  try {
    if (cmd == "sweep") return do_sweep(o);
    std::unique_ptr<DiskCache> cache;
    if (!o.cache.empty()) cache = std::make_unique<DiskCache>(o.cache);
    Outcome out;
    if (cmd == "dims") out = do_dims(o);
    else if (cmd == "enum") out = do_enum(o);
    else if (cmd == "params") out = do_params(o);
    else if (cmd == "gram") out = do_gram(o, cache.get());
    else if (cmd == "semisimple") out = do_semisimple(o);
    else if (cmd == "quasi") out = do_quasi(o);
    else if (cmd == "verify") out = do_verify(o);
    else if (cmd == "crossval") out = do_crossval(o, o.workers);
    if (o.json)
      std::cout << out.rec.dump() << "\n";
    else
      std::cout << out.text;
    return out.code;
  } catch (...) {
    std::string msg;
    int code = classify(std::current_exception(), msg);
    std::cerr << "error: " << msg << "\n";
    return code;
  }
}

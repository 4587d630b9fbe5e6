#include "eltl/axioms.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

namespace eltl {

namespace {

formula mv(int k) { return make_prop("@" + std::to_string(k)); }

std::vector<axiom_schema> build_catalog() {
  std::vector<axiom_schema> cat;
  formula a = mv(1), b = mv(2), c = mv(3);
  auto add = [&](const std::string& id, formula pat, int arity,
                 bool agent_indexed) {
    cat.push_back({id, pat, arity, agent_indexed});
  };
  add("K1", formula(), 1, false);  // all propositional tautologies
  add("K2",
      make_implies(make_and(make_know(0, a), make_know(0, make_implies(a, b))),
                   make_know(0, b)),
      2, true);
  add("K3", make_implies(make_know(0, a), a), 1, true);
  add("K4", make_implies(make_know(0, a), make_know(0, make_know(0, a))), 1,
      true);
  add("K5",
      make_implies(make_not(make_know(0, a)),
                   make_know(0, make_not(make_know(0, a)))),
      1, true);
  add("T1",
      make_implies(make_and(make_next(a), make_next(make_implies(a, b))),
                   make_next(b)),
      2, false);
  // The functionality axiom for X; the biconditional form is the one the
  // derivations need.
  add("T2", make_iff(make_next(make_not(a)), make_not(make_next(a))), 1,
      false);
  add("T3",
      make_iff(make_until(a, b),
               make_or(b, make_and(a, make_next(make_until(a, b))))),
      2, false);
  add("C1", formula(), 1, false);  // E a <=> conjunction over all agents
  add("C2",
      make_implies(make_common(a),
                   make_everyone(make_and(a, make_common(a)))),
      1, false);
  add("KT1", make_implies(make_know(0, make_always(a)),
                          make_always(make_know(0, a))),
      1, true);
  add("KT2", make_implies(make_know(0, make_next(a)),
                          make_next(make_know(0, a))),
      1, true);
  add("KT3",
      make_implies(
          make_and(make_know(0, a),
                   make_next(make_and(make_know(0, b),
                                      make_not(make_know(0, c))))),
          make_possible(
              0, make_until(make_know(0, a),
                            make_until(make_know(0, b), make_not(c))))),
      3, true);
  add("KT4",
      make_implies(
          make_until(make_know(0, a), make_know(0, b)),
          make_know(0, make_until(make_know(0, a), make_know(0, b)))),
      2, true);
  add("KT5", make_implies(make_next(make_know(0, a)),
                          make_know(0, make_next(a))),
      1, true);
  add("NLSU", make_iff(make_know(0, a), make_know(1, a)), 1, true);
  return cat;
}

}  // namespace

const std::vector<axiom_schema>& axiom_catalog() {
  static const std::vector<axiom_schema> cat = build_catalog();
  return cat;
}

const axiom_schema& schema_by_id(const std::string& id) {
  for (const auto& s : axiom_catalog())
    if (s.id == id) return s;
  throw error("unknown axiom schema: " + id);
}

namespace {

formula substitute(formula pat, const std::vector<formula>& subst,
                   agent_id agent) {
  switch (pat.kind()) {
    case op::prop: {
      const std::string& name = pat.prop_name();
      if (name.size() == 2 && name[0] == '@') {
        int k = name[1] - '0';
        if (k < 1 || k > static_cast<int>(subst.size()))
          throw error("missing metavariable binding " + name);
        return subst[k - 1];
      }
      return pat;
    }
    case op::not_:
      return make_not(substitute(pat.lhs(), subst, agent));
    case op::and_:
      return make_and(substitute(pat.lhs(), subst, agent),
                      substitute(pat.rhs(), subst, agent));
    case op::next:
      return make_next(substitute(pat.lhs(), subst, agent));
    case op::until:
      return make_until(substitute(pat.lhs(), subst, agent),
                        substitute(pat.rhs(), subst, agent));
    case op::know:
      return make_know(pat.agent() == 0 ? agent : pat.agent(),
                       substitute(pat.lhs(), subst, agent));
    case op::everyone:
      return make_everyone(substitute(pat.lhs(), subst, agent));
    case op::common:
      return make_common(substitute(pat.lhs(), subst, agent));
  }
  throw error("unreachable");
}

formula c1_instance(formula a, int m) {
  formula conj = make_know(1, a);
  for (agent_id i = 2; i <= m; ++i) conj = make_and(conj, make_know(i, a));
  return make_iff(make_everyone(a), conj);
}

}  // namespace

formula instantiate(const axiom_schema& schema,
                    const std::vector<formula>& subst, agent_id agent,
                    int m) {
  if (static_cast<int>(subst.size()) < schema.arity)
    throw error("missing metavariable binding for " + schema.id);
  if (schema.id == "K1")
    throw error("K1 has no single pattern; check tautologies semantically");
  if (schema.id == "C1") return c1_instance(subst[0], m);
  if (schema.agent_indexed && agent < 1)
    throw error("schema " + schema.id + " needs an agent");
  return substitute(schema.pattern, subst, agent);
}

// ---------------------------------------------------------------------------
// Matching.

bool is_propositional_tautology(formula f) {
  // Skeleton: maximal subformulas that are not ~ or & count as atoms.
  std::vector<formula> atoms;
  std::function<void(formula)> collect = [&](formula g) {
    if (g.kind() == op::not_) {
      collect(g.lhs());
    } else if (g.kind() == op::and_) {
      collect(g.lhs());
      collect(g.rhs());
    } else {
      if (std::find(atoms.begin(), atoms.end(), g) == atoms.end())
        atoms.push_back(g);
    }
  };
  collect(f);
  if (atoms.size() > 24)
    throw error("propositional skeleton too large for tautology check");
  std::function<bool(formula, uint32_t)> ev = [&](formula g,
                                                  uint32_t bits) -> bool {
    if (g.kind() == op::not_) return !ev(g.lhs(), bits);
    if (g.kind() == op::and_)
      return ev(g.lhs(), bits) && ev(g.rhs(), bits);
    size_t i =
        std::find(atoms.begin(), atoms.end(), g) - atoms.begin();
    return (bits >> i) & 1;
  };
  for (uint32_t bits = 0; bits < (1u << atoms.size()); ++bits)
    if (!ev(f, bits)) return false;
  return true;
}

namespace {

bool unify(formula pat, formula f, std::vector<std::optional<formula>>& subst,
           std::optional<agent_id>& agent) {
  if (pat.kind() == op::prop) {
    const std::string& name = pat.prop_name();
    if (name.size() == 2 && name[0] == '@') {
      int k = name[1] - '0';
      if (subst[k - 1]) return *subst[k - 1] == f;
      subst[k - 1] = f;
      return true;
    }
    return f == pat;
  }
  if (pat.kind() != f.kind()) return false;
  if (pat.kind() == op::know) {
    if (pat.agent() == 0) {
      if (agent && *agent != f.agent()) return false;
      agent = f.agent();
    } else if (pat.agent() != f.agent()) {
      return false;
    }
  }
  switch (pat.kind()) {
    case op::and_:
    case op::until:
      return unify(pat.lhs(), f.lhs(), subst, agent) &&
             unify(pat.rhs(), f.rhs(), subst, agent);
    default:
      return unify(pat.lhs(), f.lhs(), subst, agent);
  }
}

}  // namespace

std::optional<schema_match> match_schema(formula f, const axiom_schema& schema,
                                         int m) {
  if (schema.id == "K1") {
    if (is_propositional_tautology(f)) return schema_match{{}, 0};
    return std::nullopt;
  }
  if (schema.id == "C1") {
    // Destructure E a <=> K_1 a & ... & K_m a.
    auto both = [&](formula g) -> std::optional<formula> {
      if (g.kind() != op::and_) return std::nullopt;
      auto fwd = as_implies(g.lhs());
      auto bwd = as_implies(g.rhs());
      if (!fwd || !bwd) return std::nullopt;
      if (fwd->first.kind() != op::everyone) return std::nullopt;
      formula a = fwd->first.lhs();
      if (c1_instance(a, m) == g) return a;
      return std::nullopt;
    };
    if (auto a = both(f)) return schema_match{{*a}, 0};
    return std::nullopt;
  }
  std::vector<std::optional<formula>> subst(schema.arity);
  std::optional<agent_id> agent;
  if (!unify(schema.pattern, f, subst, agent)) return std::nullopt;
  schema_match match;
  for (auto& s : subst) {
    if (!s) return std::nullopt;
    match.subst.push_back(*s);
  }
  match.agent = agent.value_or(0);
  if (schema.agent_indexed && match.agent == 0) return std::nullopt;
  return match;
}

// ---------------------------------------------------------------------------
// Generators.

namespace {

std::string descriptor_token(const stream_descriptor& d) {
  std::string out = "<";
  for (const auto& t : d.head) out += t + ".";
  out += "|";
  for (const auto& t : d.loop) out += t + ".";
  return out + ">";
}

}  // namespace

lasso_system generate_system(const generator_config& config) {
  const class_spec& t = config.target;
  std::mt19937_64 rng(config.seed * 0x9e3779b97f4a7c15ull + 0xc2b2ae3d27d4eb4full);
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % (hi - lo + 1));
  };

  lasso_system sys;
  sys.m = config.m;
  sys.clocked = t.sync;
  int R = pick(1, std::max(1, config.max_runs));
  int W = pick(1, std::max(1, config.max_window));
  sys.prefix_len = pick(0, W - 1);
  sys.period = W - sys.prefix_len;
  for (int p = 0; p < config.num_props; ++p)
    sys.props.push_back(p == 0 ? "p" : p == 1 ? "q" : "r" + std::to_string(p));

  // Observation streams drive the agent cores.
  // obs[r][i][c] in a small alphabet.
  std::vector<std::vector<std::vector<std::string>>> obs(
      R, std::vector<std::vector<std::string>>(sys.m,
                                               std::vector<std::string>(W)));
  for (int r = 0; r < R; ++r)
    for (int i = 0; i < sys.m; ++i)
      for (int c = 0; c < W; ++c)
        obs[r][i][c] = "o" + std::to_string(pick(0, config.obs_alphabet - 1));

  bool histories = t.pr;
  bool futures = t.nl;
  if (t.uis && t.nl)  // every run indistinguishable from time 0 on
    for (int r = 1; r < R; ++r)
      for (int i = 0; i < sys.m; ++i) obs[r][i] = obs[0][i];
  else if (t.uis)
    for (int r = 1; r < R; ++r)
      for (int i = 0; i < sys.m; ++i) obs[r][i][0] = obs[0][i][0];
  if (histories)  // histories must stabilize for the loop to close
    for (int r = 0; r < R; ++r)
      for (int i = 0; i < sys.m; ++i)
        for (int c = sys.prefix_len + 1; c < W; ++c)
          obs[r][i][c] = obs[r][i][sys.prefix_len];

  // Build a scratch system carrying the observations as cores so the
  // descriptor helpers can run on it.
  lasso_system scratch = sys;
  scratch.clocked = false;
  for (int r = 0; r < R; ++r) {
    run_template rt;
    for (int c = 0; c < W; ++c) {
      cell cl;
      cl.env = "e";
      for (int i = 0; i < sys.m; ++i) cl.locals.push_back(obs[r][i][c]);
      cl.val.assign(sys.props.size(), 0);
      rt.cells.push_back(cl);
    }
    scratch.runs.push_back(rt);
  }

  auto history_core = [&](int r, int i, int c) {
    // Unclocked: absorbed observation history.  Clocked: the raw
    // observation word up to min(c, P); with loop-constant observations
    // this pins the full timed history.
    std::string h = "h:";
    if (sys.clocked) {
      for (int k = 0; k <= std::min(c, sys.prefix_len); ++k)
        h += obs[r][i][k] + ".";
    } else {
      std::string last;
      for (int k = 0; k <= c; ++k)
        if (obs[r][i][k] != last) {
          last = obs[r][i][k];
          h += last + ".";
        }
    }
    return h;
  };
  auto future_core = [&](int r, int i, int c) {
    if (sys.clocked) {
      // Raw future observation word as a descriptor.
      std::vector<std::string> head, loop;
      for (int k = c; k < sys.prefix_len; ++k) head.push_back(obs[r][i][k]);
      for (int k = std::max(c, sys.prefix_len);
           k < std::max(c, sys.prefix_len) + sys.period; ++k)
        loop.push_back(obs[r][i][canonical_position(sys, k)]);
      return "f" + descriptor_token(
                       canonical_descriptor(std::move(head), std::move(loop)));
    }
    return "f" +
           descriptor_token(future_local_sequence(scratch, r, i + 1, c));
  };

  for (int r = 0; r < R; ++r) {
    run_template rt;
    for (int c = 0; c < W; ++c) {
      cell cl;
      cl.env = "e" + std::to_string(pick(0, config.env_alphabet - 1));
      for (int i = 0; i < sys.m; ++i) {
        std::string core;
        if (histories && futures)
          core = history_core(r, i, c) + "+" + future_core(r, i, c);
        else if (histories)
          core = history_core(r, i, c);
        else if (futures)
          core = future_core(r, i, c);
        else
          core = obs[r][i][c];
        cl.locals.push_back(core);
      }
      for (size_t p = 0; p < sys.props.size(); ++p)
        cl.val.push_back(static_cast<uint8_t>(rng() % 2));
      rt.cells.push_back(cl);
    }
    sys.runs.push_back(rt);
  }

  if (t.uis) {
    // Shared initial global state, valuation included.
    for (int r = 1; r < R; ++r) {
      sys.runs[r].cells[0].env = sys.runs[0].cells[0].env;
      sys.runs[r].cells[0].val = sys.runs[0].cells[0].val;
      // locals already shared through the observation setup
      sys.runs[r].cells[0].locals = sys.runs[0].cells[0].locals;
    }
  }
  sys.validate();
  return sys;
}

formula random_formula(uint64_t seed, int depth, int m, bool allow_ck) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);
  std::function<formula(int)> go = [&](int d) -> formula {
    if (d <= 0) {
      switch (rng() % 3) {
        case 0:
          return make_prop("p");
        case 1:
          return make_prop("q");
        default:
          return make_true();
      }
    }
    int w = static_cast<int>(rng() % (allow_ck ? 18 : 16));
    switch (w) {
      case 0:
      case 1:
        return make_not(go(d - 1));
      case 2:
      case 3:
        return make_and(go(d - 1), go(d - 1));
      case 4:
        return make_or(go(d - 1), go(d - 1));
      case 5:
        return make_implies(go(d - 1), go(d - 1));
      case 6:
      case 7:
        return make_next(go(d - 1));
      case 8:
      case 9:
        return make_until(go(d - 1), go(d - 1));
      case 10:
        return make_eventually(go(d - 1));
      case 11:
        return make_always(go(d - 1));
      case 12:
      case 13:
      case 14:
        return make_know(1 + static_cast<int>(rng() % m), go(d - 1));
      case 15:
        return make_possible(1 + static_cast<int>(rng() % m), go(d - 1));
      case 16:
        return make_everyone(go(d - 1));
      default:
        return make_common(go(d - 1));
    }
  };
  return go(depth);
}

// ---------------------------------------------------------------------------
// Soundness sweeps.

namespace {

formula random_tautology(std::mt19937_64& rng, int m) {
  formula a = random_formula(rng(), 2, m, false);
  formula b = random_formula(rng(), 2, m, false);
  switch (rng() % 6) {
    case 0:
      return make_or(a, make_not(a));
    case 1:
      return make_implies(a, a);
    case 2:
      return make_not(make_and(a, make_not(a)));
    case 3:
      return make_implies(make_and(make_implies(a, b), a), b);
    case 4:
      return make_implies(make_and(a, b), a);
    default:
      return make_implies(a, make_implies(b, a));
  }
}

}  // namespace

soundness_report soundness_suite(const class_spec& target,
                                 const std::vector<std::string>& schema_ids,
                                 int trials, int instantiations_per_trial,
                                 const generator_config& bounds) {
  soundness_report report;
  for (const std::string& id : schema_ids) {
    const axiom_schema& schema = schema_by_id(id);
    for (int t = 0; t < trials; ++t) {
      generator_config cfg = bounds;
      cfg.target = target;
      cfg.seed = bounds.seed + 7919u * t + 31u;
      lasso_system sys = generate_system(cfg);
      std::mt19937_64 rng(cfg.seed ^ std::hash<std::string>()(id));
      int bad = 0;
      for (int j = 0; j < instantiations_per_trial; ++j) {
        formula inst;
        bool allow_ck = id == "C1" || id == "C2";
        if (id == "K1") {
          inst = random_tautology(rng, sys.m);
        } else {
          std::vector<formula> subst;
          for (int k = 0; k < schema.arity; ++k)
            subst.push_back(random_formula(rng(), 2, sys.m, allow_ck));
          agent_id agent = 1 + static_cast<int>(rng() % sys.m);
          inst = instantiate(schema, subst, agent, sys.m);
        }
        validity_result v = valid_in_system(sys, inst);
        if (!v.valid) {
          ++bad;
          report.violations.push_back(
              {id, t, j, sys, v.counterexample, inst});
        }
      }
      std::ostringstream line;
      line << id << " trial " << t << ": "
           << (bad == 0 ? "ok" : "VIOLATED x" + std::to_string(bad));
      report.lines.push_back(line.str());
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Tiny-system enumeration and sampling.

namespace {

// Minimal bit-parallel evaluator over systems with at most 64 point slots.
struct tiny_shape {
  int R, P, Q, W;
  int slots() const { return R * W; }
  int next_slot(int s) const {
    int c = s % W;
    return s - c + (c + 1 < W ? c + 1 : P);
  }
};

struct tiny_eval {
  tiny_shape sh;
  std::vector<formula> subs;  // structural order: children first
  std::vector<int> sub_index; // by formula id
  std::vector<std::string> props;
  std::vector<int> agents;    // agents mentioned, 1-based
  std::vector<int> perm;      // slot -> next slot
  uint64_t all;

  // per core assignment (set_cores):
  std::vector<std::vector<uint64_t>> class_masks;
  std::vector<uint64_t> components;

  tiny_eval(const tiny_shape& shape, formula f, int agent_bound = 0)
      : sh(shape) {
    subs = subformulas(f);
    int maxid = 0;
    for (formula g : subs) maxid = std::max<int>(maxid, g.id());
    sub_index.assign(maxid + 1, -1);
    for (size_t i = 0; i < subs.size(); ++i) sub_index[subs[i].id()] = i;
    props = props_of(f);
    int m = std::max({1, max_agent(f), agent_bound});
    for (int i = 1; i <= m; ++i) agents.push_back(i);
    perm.resize(sh.slots());
    for (int s = 0; s < sh.slots(); ++s) perm[s] = sh.next_slot(s);
    all = sh.slots() >= 64 ? ~uint64_t(0)
                           : ((uint64_t(1) << sh.slots()) - 1);
  }

  uint64_t pull_back(uint64_t mask) const {
    uint64_t out = 0;
    for (int s = 0; s < sh.slots(); ++s)
      if (mask & (uint64_t(1) << perm[s])) out |= uint64_t(1) << s;
    return out;
  }

  void set_cores(const std::vector<std::vector<int>>& cores) {
    class_masks.assign(agents.size(), {});
    for (size_t ai = 0; ai < agents.size(); ++ai) {
      std::map<int, uint64_t> by_core;
      for (int s = 0; s < sh.slots(); ++s)
        by_core[cores[ai][s]] |= uint64_t(1) << s;
      for (auto& [core, mask] : by_core) class_masks[ai].push_back(mask);
    }
    components.clear();
    uint64_t seen = 0;
    for (int s = 0; s < sh.slots(); ++s) {
      if (seen & (uint64_t(1) << s)) continue;
      uint64_t comp = uint64_t(1) << s;
      bool grew = true;
      while (grew) {
        grew = false;
        for (auto& masks : class_masks)
          for (uint64_t mask : masks)
            if ((comp & mask) && (comp | mask) != comp) {
              comp |= mask;
              grew = true;
            }
      }
      seen |= comp;
      components.push_back(comp);
    }
  }

  // val[prop] = bitmask over slots.  Returns the mask of the last sub (= f).
  uint64_t run(const std::vector<uint64_t>& val, std::vector<uint64_t>& rows) {
    rows.resize(subs.size());
    for (size_t si = 0; si < subs.size(); ++si) {
      formula g = subs[si];
      uint64_t r = 0;
      auto row = [&](formula h) { return rows[sub_index[h.id()]]; };
      switch (g.kind()) {
        case op::prop: {
          size_t pi = std::find(props.begin(), props.end(), g.prop_name()) -
                      props.begin();
          r = pi < props.size() ? val[pi] : 0;
          break;
        }
        case op::not_:
          r = all & ~row(g.lhs());
          break;
        case op::and_:
          r = row(g.lhs()) & row(g.rhs());
          break;
        case op::next:
          r = pull_back(row(g.lhs()));
          break;
        case op::until: {
          uint64_t a = row(g.lhs()), b = row(g.rhs());
          r = 0;
          for (int iter = 0; iter <= sh.W; ++iter) {
            uint64_t nr = b | (a & pull_back(r));
            if (nr == r) break;
            r = nr;
          }
          break;
        }
        case op::know: {
          uint64_t a = row(g.lhs());
          size_t ai = std::find(agents.begin(), agents.end(), g.agent()) -
                      agents.begin();
          for (uint64_t mask : class_masks[ai])
            if ((a & mask) == mask) r |= mask;
          break;
        }
        case op::everyone: {
          uint64_t a = row(g.lhs());
          r = all;
          for (auto& masks : class_masks)
            for (uint64_t mask : masks)
              if ((a & mask) != mask) r &= ~mask;
          break;
        }
        case op::common: {
          uint64_t a = row(g.lhs());
          for (uint64_t comp : components)
            if ((a & comp) == comp) r |= comp;
          break;
        }
      }
      rows[si] = r;
    }
    return rows.back();
  }
};

// Enumerates restricted-growth strings: all partitions of n items.
void enumerate_partitions(int n, const std::function<void(const std::vector<int>&)>& cb) {
  std::vector<int> rgs(n, 0);
  std::function<void(int, int)> go = [&](int i, int maxv) {
    if (i == n) {
      cb(rgs);
      return;
    }
    for (int v = 0; v <= maxv + 1; ++v) {
      rgs[i] = v;
      go(i + 1, std::max(maxv, v));
    }
  };
  if (n == 0)
    cb(rgs);
  else
    go(0, -1);
}

lasso_system materialize(const tiny_shape& sh,
                         const std::vector<std::vector<int>>& cores,
                         const std::vector<uint64_t>& val, int m,
                         const std::vector<std::string>& props) {
  lasso_system sys;
  sys.m = m;
  sys.clocked = false;
  sys.prefix_len = sh.P;
  sys.period = sh.Q;
  sys.props = props;
  for (int r = 0; r < sh.R; ++r) {
    run_template rt;
    for (int c = 0; c < sh.W; ++c) {
      int s = r * sh.W + c;
      cell cl;
      cl.env = "e";
      for (int i = 0; i < m; ++i)
        cl.locals.push_back("c" + std::to_string(cores[i][s]));
      for (size_t p = 0; p < props.size(); ++p)
        cl.val.push_back((val[p] >> s) & 1 ? 1 : 0);
      rt.cells.push_back(cl);
    }
    sys.runs.push_back(rt);
  }
  return sys;
}

// Exhaustively sweeps systems of the given shape; stop criterion is decided
// by the callback (returns true to stop with the current system/slot).
bool sweep_systems(formula f, int max_runs, int max_window, int agents,
                   const std::function<int(tiny_eval&, uint64_t)>& decide,
                   lasso_system* out_sys, point* out_pt) {
  std::vector<std::string> props = props_of(f);
  int m = std::max({1, max_agent(f), agents});
  for (int R = 1; R <= max_runs; ++R)
    for (int W = 1; W <= max_window; ++W)
      for (int P = 0; P < W; ++P) {
        tiny_shape sh{R, P, W - P, W};
        int n = sh.slots();
        size_t nprops = props.size();
        if (n > 30 || nprops * n >= 30) continue;
        tiny_eval te(sh, f, agents);
        std::vector<std::vector<int>> parts;
        enumerate_partitions(n, [&](const std::vector<int>& rgs) {
          parts.push_back(rgs);
        });
        size_t na = te.agents.size();
        std::vector<size_t> idx(na, 0);
        std::vector<uint64_t> val(nprops, 0);
        std::vector<uint64_t> rows;
        const uint64_t vmax = uint64_t(1) << (nprops * n);
        const uint64_t slot_mask =
            (n >= 64) ? ~uint64_t(0) : ((uint64_t(1) << n) - 1);
        while (true) {
          std::vector<std::vector<int>> cores;
          for (size_t a = 0; a < na; ++a) cores.push_back(parts[idx[a]]);
          te.set_cores(cores);
          for (uint64_t v = 0; v < vmax; ++v) {
            for (size_t p = 0; p < nprops; ++p)
              val[p] = (v >> (p * n)) & slot_mask;
            int slot = decide(te, te.run(val, rows));
            if (slot >= 0) {
              if (out_sys) *out_sys = materialize(sh, cores, val, m, props);
              if (out_pt) *out_pt = point{slot / W, slot % W};
              return true;
            }
          }
          size_t a = 0;
          while (a < na && ++idx[a] == parts.size()) idx[a++] = 0;
          if (a == na) break;
        }
      }
  return false;
}

}  // namespace

std::optional<falsification> falsify(formula f, const falsify_bounds& bounds) {
  auto check = [&](const lasso_system& sys) -> std::optional<falsification> {
    validity_result v = valid_in_system(sys, f);
    if (!v.valid) {
      // self-check: never report a point where the instance holds
      if (evaluate(sys, v.counterexample, f))
        throw error("falsify self-check failed");
      return falsification{sys, v.counterexample};
    }
    return std::nullopt;
  };

  if (bounds.include_fixture && max_agent(f) <= 1) {
    std::vector<std::string> want = props_of(f);
    std::vector<std::string> have{"p", "q"};
    if (std::includes(have.begin(), have.end(), want.begin(), want.end())) {
      if (auto hit = check(fixture_nl_prime())) return hit;
    }
  }

  // Exhaustive tier over tiny shapes.
  lasso_system sys;
  point pt;
  int w_cap = std::min(3, bounds.max_window);
  int nprops = static_cast<int>(props_of(f).size());
  if (nprops >= 3) w_cap = std::min(2, w_cap);
  bool found = sweep_systems(
      f, std::min(2, bounds.max_runs), w_cap, 0,
      [&](tiny_eval& te, uint64_t mask) {
        uint64_t all = te.sh.slots() == 64
                           ? ~uint64_t(0)
                           : ((uint64_t(1) << te.sh.slots()) - 1);
        uint64_t bad = all & ~mask;
        if (!bad) return -1;
        for (int s = 0; s < te.sh.slots(); ++s)
          if (bad & (uint64_t(1) << s)) return s;
        return -1;
      },
      &sys, &pt);
  if (found) {
    if (auto hit = check(sys)) return hit;
  }

  // Random tier within the stated bounds.
  std::mt19937_64 rng(bounds.seed * 0x9e3779b97f4a7c15ull + 17);
  for (int s = 0; s < bounds.random_samples; ++s) {
    generator_config cfg;
    cfg.target = class_spec{};
    cfg.max_runs = bounds.max_runs;
    cfg.max_window = bounds.max_window;
    cfg.m = std::max(1, std::min(bounds.m, std::max(1, max_agent(f))));
    cfg.num_props = std::max(1, nprops);
    cfg.obs_alphabet = 2 + static_cast<int>(rng() % 3);
    cfg.env_alphabet = 1;
    cfg.seed = rng();
    lasso_system cand = generate_system(cfg);
    // align prop names with the formula's
    std::vector<std::string> want = props_of(f);
    for (size_t i = 0; i < want.size() && i < cand.props.size(); ++i)
      cand.props[i] = want[i];
    if (auto hit = check(cand)) return hit;
  }
  return std::nullopt;
}

std::optional<falsification> bounded_model_search(formula f, int max_runs,
                                                  int max_window,
                                                  int agents) {
  lasso_system sys;
  point pt;
  bool found = sweep_systems(
      f, max_runs, max_window, agents,
      [&](tiny_eval& te, uint64_t mask) {
        if (!mask) return -1;
        for (int s = 0; s < te.sh.slots(); ++s)
          if (mask & (uint64_t(1) << s)) return s;
        return -1;
      },
      &sys, &pt);
  if (!found) return std::nullopt;
  if (!evaluate(sys, pt, f)) throw error("model search self-check failed");
  return falsification{sys, pt};
}

}  // namespace eltl

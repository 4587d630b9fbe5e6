#include "eltl/properties.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace eltl {

std::string local_state_token(const lasso_system& sys, point pt, agent_id i) {
  const cell& c = sys.at(pt.run, canonical_position(sys, pt.time));
  if (sys.clocked)
    return std::to_string(pt.time) + "@" + c.locals[i - 1];
  return c.locals[i - 1];
}

std::vector<std::string> local_state_sequence(const lasso_system& sys,
                                              int run, agent_id i,
                                              long long n) {
  std::vector<std::string> out;
  for (long long k = 0; k <= n; ++k)
    out = absorptive_concat(std::move(out),
                            local_state_token(sys, point{run, k}, i));
  return out;
}

stream_descriptor canonical_descriptor(std::vector<std::string> head,
                                       std::vector<std::string> loop) {
  if (loop.empty()) throw error("descriptor loop must be nonempty");
  for (size_t d = 1; d <= loop.size(); ++d) {
    if (loop.size() % d != 0) continue;
    bool ok = true;
    for (size_t j = d; j < loop.size() && ok; ++j) ok = loop[j] == loop[j % d];
    if (ok) {
      loop.resize(d);
      break;
    }
  }
  while (!head.empty() && head.back() == loop.back()) {
    head.pop_back();
    std::rotate(loop.begin(), loop.end() - 1, loop.end());
  }
  return {-1, std::move(head), std::move(loop)};
}

stream_descriptor future_local_sequence(const lasso_system& sys, int run,
                                        agent_id i, long long n) {
  if (sys.clocked) {
    // Times never repeat, so the raw stream already has no consecutive
    // repetitions.  The core stream is periodic; the start time is carried
    // separately.
    std::vector<std::string> head, loop;
    long long start = std::max<long long>(n, sys.prefix_len);
    for (long long k = n; k < start; ++k)
      head.push_back(sys.at(run, canonical_position(sys, k)).locals[i - 1]);
    for (long long k = start; k < start + sys.period; ++k)
      loop.push_back(sys.at(run, canonical_position(sys, k)).locals[i - 1]);
    stream_descriptor d = canonical_descriptor(std::move(head), std::move(loop));
    d.sync_time = n;
    return d;
  }
  // Unclocked: absorb the periodic core stream, detecting the absorbed
  // stream's own lasso via (next cell, last token) states.
  std::vector<std::string> emitted;
  std::map<std::pair<int, std::string>, size_t> seen;
  int cell_index = canonical_position(sys, n);
  std::string last;
  size_t loop_start = 0;
  while (true) {
    const std::string& tok = sys.at(run, cell_index).locals[i - 1];
    if (tok != last) {
      emitted.push_back(tok);
      last = tok;
    }
    int next = next_cell(sys, cell_index);
    auto key = std::make_pair(next, last);
    auto it = seen.find(key);
    if (it != seen.end()) {
      loop_start = it->second;
      break;
    }
    seen[key] = emitted.size();
    cell_index = next;
  }
  std::vector<std::string> head(emitted.begin(), emitted.begin() + loop_start);
  std::vector<std::string> loop(emitted.begin() + loop_start, emitted.end());
  if (loop.empty()) loop.push_back(head.back());
  return canonical_descriptor(std::move(head), std::move(loop));
}

// ---------------------------------------------------------------------------
// Concordance.

namespace {

bool exhaustive_concordant(int len_s, int len_t,
                           const std::function<bool(int, int)>& rel,
                           int max_k, std::vector<std::pair<int, int>>& out) {
  std::function<bool(int, int, int)> go = [&](int i, int j, int k) -> bool {
    if (i == len_s && j == len_t) return true;
    if (i == len_s || j == len_t || k == max_k) return false;
    for (int a = 1; i + a <= len_s; ++a)
      for (int b = 1; j + b <= len_t; ++b) {
        bool ok = true;
        for (int x = i; x < i + a && ok; ++x)
          for (int y = j; y < j + b && ok; ++y) ok = rel(x, y);
        if (ok) {
          out.emplace_back(a, b);
          if (go(i + a, j + b, k + 1)) return true;
          out.pop_back();
        }
      }
    return false;
  };
  out.clear();
  return go(0, 0, 0);
}

}  // namespace

concordance_result concordant(int len_s, int len_t,
                              const std::function<bool(int, int)>& rel) {
  concordance_result res;
  if (len_s <= 0 || len_t <= 0)
    throw error("concordance needs nonempty sequences");
  std::vector<std::pair<int, int>> intervals;
  int i = 0, j = 0;
  bool greedy_ok = true;
  while (i < len_s && j < len_t) {
    if (!rel(i, j)) {
      greedy_ok = false;
      break;
    }
    int a = 1, b = 1;
    while (i + a < len_s && rel(i + a, j)) ++a;
    while (j + b < len_t && rel(i, j + b)) ++b;
    intervals.emplace_back(a, b);
    i += a;
    j += b;
  }
  if (greedy_ok && i == len_s && j == len_t) {
    res.concordant = true;
    res.witness = concordance_witness{intervals};
    return res;
  }
  if (len_s <= 12 && len_t <= 12) {
    std::vector<std::pair<int, int>> found;
    if (exhaustive_concordant(len_s, len_t, rel, 12, found)) {
      res.concordant = true;
      res.witness = concordance_witness{found};
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Class checkers.  All of them work on an integer view of one agent's cores
// so the pair sweeps stay cheap.

long long default_horizon(const lasso_system& sys) {
  return 3LL * sys.window();
}

bool operator<(const stream_descriptor& a, const stream_descriptor& b) {
  if (a.sync_time != b.sync_time) return a.sync_time < b.sync_time;
  if (a.head != b.head) return a.head < b.head;
  return a.loop < b.loop;
}

namespace {

struct core_view {
  const lasso_system* sys;
  agent_id agent;
  int R, W, P, Q;
  bool clocked;
  std::vector<std::vector<int>> core;  // [run][cell], interned
  int alphabet = 0;

  core_view(const lasso_system& s, agent_id i)
      : sys(&s),
        agent(i),
        R(static_cast<int>(s.runs.size())),
        W(s.window()),
        P(s.prefix_len),
        Q(s.period),
        clocked(s.clocked) {
    std::map<std::string, int> ids;
    core.assign(R, std::vector<int>(W));
    for (int r = 0; r < R; ++r)
      for (int c = 0; c < W; ++c) {
        auto [it, fresh] =
            ids.emplace(s.at(r, c).locals[i - 1], alphabet);
        if (fresh) ++alphabet;
        core[r][c] = it->second;
      }
  }

  int at(int run, long long n) const {
    return core[run][canonical_position(*sys, n)];
  }
  bool related(point a, point b) const {
    if (clocked && a.time != b.time) return false;
    return at(a.run, a.time) == at(b.run, b.time);
  }
  // First time beyond which run r's core stream from `from` repeats cores
  // already seen since `from`.
  long long stream_bound(long long from) const {
    return std::max<long long>(from, P) + Q;
  }
};

template <typename F>
bool for_related_pairs(const core_view& v, long long horizon, F&& body) {
  for (int r = 0; r < v.R; ++r)
    for (long long n = 0; n <= horizon; ++n)
      for (int r2 = 0; r2 < v.R; ++r2)
        for (long long n2 = 0; n2 <= horizon; ++n2) {
          point a{r, n}, b{r2, n2};
          if (!v.related(a, b)) continue;
          if (!body(a, b)) return false;
        }
  return true;
}

// Absorbed-history identifiers: hist[r][n] keys the local-state sequence of
// agent i at (r,n); equal ids iff equal sequences.
std::vector<std::vector<int>> history_ids(const core_view& v,
                                          long long horizon) {
  std::vector<std::vector<int>> hist(v.R,
                                     std::vector<int>(horizon + 1, -1));
  // Node = (parent id, token); token includes time when clocked.
  std::map<std::tuple<int, long long, int>, int> nodes;
  int next_id = 0;
  for (int r = 0; r < v.R; ++r) {
    int cur = -1;
    int last_core = -1;
    for (long long n = 0; n <= horizon; ++n) {
      int c = v.at(r, n);
      if (v.clocked || c != last_core) {
        auto key = std::make_tuple(cur, v.clocked ? n : -1, c);
        auto [it, fresh] = nodes.emplace(key, next_id);
        if (fresh) ++next_id;
        cur = it->second;
        last_core = c;
      }
      hist[r][n] = cur;
    }
  }
  return hist;
}

// Future-stream identifiers per (run, cell): two cells with the same id have
// the same (absorbed, for unclocked; raw, for clocked) core stream forward.
std::vector<std::vector<int>> future_ids(const core_view& v) {
  std::map<stream_descriptor, int> ids;
  std::vector<std::vector<int>> out(v.R, std::vector<int>(v.W));
  auto cmp_ins = [&](stream_descriptor d) {
    d.sync_time = -1;  // time handled separately by the clocked pair filter
    auto [it, fresh] = ids.emplace(std::move(d), static_cast<int>(ids.size()));
    return it->second;
  };
  for (int r = 0; r < v.R; ++r)
    for (int c = 0; c < v.W; ++c)
      out[r][c] =
          cmp_ins(future_local_sequence(*v.sys, r, v.agent, c));
  return out;
}

}  // namespace

property_report has_perfect_recall(const lasso_system& sys, agent_id i,
                                   pr_mode mode, long long horizon) {
  sys.validate();
  if (horizon < 0) horizon = default_horizon(sys);
  core_view v(sys, i);
  property_report rep;
  rep.agent = i;
  rep.horizon = horizon;
  rep.property = mode == pr_mode::definition ? "pr(definition)"
                 : mode == pr_mode::b        ? "pr(b)"
                 : mode == pr_mode::c        ? "pr(c)"
                                             : "pr(d)";
  auto fail = [&](point a, point b, long long k, const char* clause) {
    rep.holds = false;
    rep.counterexample = property_counterexample{a, b, k, clause};
    return false;
  };

  if (mode == pr_mode::definition) {
    auto hist = history_ids(v, horizon);
    rep.holds = for_related_pairs(v, horizon, [&](point a, point b) {
      if (hist[a.run][a.time] != hist[b.run][b.time])
        return fail(a, b, -1, "equal local-state sequences");
      return true;
    });
    return rep;
  }

  if (mode == pr_mode::d) {
    if (v.clocked) {
      // Related pairs share their time, and a witness k' <= n' for k must
      // itself be at time k, so (d) reduces to pointwise core agreement up
      // to n.  Disagreements repeat with the loop, so scanning one window
      // finds the first one.
      std::vector<std::vector<long long>> first_dis(
          v.R, std::vector<long long>(v.R, 1LL << 60));
      for (int r = 0; r < v.R; ++r)
        for (int r2 = 0; r2 < v.R; ++r2)
          for (long long k = 0; k < v.W; ++k)
            if (v.at(r, k) != v.at(r2, k)) {
              first_dis[r][r2] = k;
              break;
            }
      rep.holds = for_related_pairs(v, horizon, [&](point a, point b) {
        long long fd = first_dis[a.run][b.run];
        if (fd <= a.time) return fail(a, b, fd, "clause (d) witness");
        return true;
      });
      return rep;
    }
    // cond(n,n'): every core of r up to n occurs in r' up to n'.  Core sets
    // stabilize by time W-1, so everything is precomputable.
    const int stab = v.W - 1;
    // seen[r][n] = set of cores of run r at times <= min(n, stab).
    std::vector<std::vector<std::vector<uint8_t>>> seen(
        v.R, std::vector<std::vector<uint8_t>>(
                 stab + 1, std::vector<uint8_t>(v.alphabet, 0)));
    for (int r = 0; r < v.R; ++r)
      for (int n = 0; n <= stab; ++n) {
        if (n > 0) seen[r][n] = seen[r][n - 1];
        seen[r][n][v.at(r, n)] = 1;
      }
    // first_viol[r][r'][n'] = least k with core(r,k) not in seen[r'][n'].
    const long long INF = 1LL << 60;
    std::vector<std::vector<std::vector<long long>>> first_viol(
        v.R, std::vector<std::vector<long long>>(
                 v.R, std::vector<long long>(stab + 1, INF)));
    for (int r = 0; r < v.R; ++r)
      for (int r2 = 0; r2 < v.R; ++r2)
        for (int n2 = 0; n2 <= stab; ++n2) {
          for (int k = 0; k <= stab; ++k)
            if (!seen[r2][n2][v.at(r, k)]) {
              first_viol[r][r2][n2] = k;
              break;
            }
        }
    rep.holds = for_related_pairs(v, horizon, [&](point a, point b) {
      long long fv = first_viol[a.run][b.run][std::min<long long>(b.time,
                                                                  stab)];
      if (fv <= a.time) return fail(a, b, fv, "clause (d) witness");
      return true;
    });
    return rep;
  }

  rep.holds = for_related_pairs(v, horizon, [&](point a, point b) {
    if (mode == pr_mode::b) {
      auto rel = [&](int x, int y) {
        return v.related(point{a.run, x}, point{b.run, y});
      };
      if (!concordant(static_cast<int>(a.time) + 1,
                      static_cast<int>(b.time) + 1, rel)
               .concordant)
        return fail(a, b, -1, "past sequences concordant");
      return true;
    }
    // mode c
    if (a.time == 0) return true;
    point prev{a.run, a.time - 1};
    if (v.related(prev, b)) return true;
    // last_bad = the largest k <= n' with (r,n) unrelated to (r',k); every
    // valid l must be >= last_bad.
    long long last_bad = -1;
    for (long long k2 = b.time; k2 >= 0; --k2)
      if (!v.related(a, point{b.run, k2})) {
        last_bad = k2;
        break;
      }
    for (long long l = std::max<long long>(0, last_bad); l < b.time; ++l)
      if (v.related(prev, point{b.run, l}))
        return true;
    return fail(a, b, -1, "clause (c) witness");
  });
  return rep;
}

property_report has_no_learning(const lasso_system& sys, agent_id i,
                                nl_mode mode, long long horizon) {
  sys.validate();
  if (horizon < 0) horizon = default_horizon(sys);
  core_view v(sys, i);
  property_report rep;
  rep.agent = i;
  rep.horizon = horizon;
  rep.property = mode == nl_mode::definition ? "nl(definition)"
                 : mode == nl_mode::b        ? "nl(b)"
                                             : "nl(c)";
  auto fail = [&](point a, point b, const char* clause) {
    rep.holds = false;
    rep.counterexample = property_counterexample{a, b, -1, clause};
    return false;
  };

  if (mode == nl_mode::definition || mode == nl_mode::b) {
    // definition: canonical descriptors compared.  b: concordance of the
    // infinite future point sequences; since ~i is an equivalence this is
    // token-stream equality, decided by synchronized traversal up to an
    // alignment bound from both loops.
    auto fid = future_ids(v);
    rep.holds = for_related_pairs(v, horizon, [&](point a, point b) {
      int ca = canonical_position(sys, a.time);
      int cb = canonical_position(sys, b.time);
      bool equal;
      if (mode == nl_mode::definition) {
        equal = fid[a.run][ca] == fid[b.run][cb];
      } else {
        stream_descriptor ds = future_local_sequence(sys, a.run, i, a.time);
        stream_descriptor dt = future_local_sequence(sys, b.run, i, b.time);
        size_t align = ds.head.size() + dt.head.size() +
                       2 * ds.loop.size() * dt.loop.size();
        equal = true;
        for (size_t j = 0; j < align && equal; ++j)
          equal = ds.token_at(j) == dt.token_at(j);
      }
      if (!equal) return fail(a, b, "equal future local-state sequences");
      return true;
    });
    return rep;
  }

  // mode c
  rep.holds = for_related_pairs(v, horizon, [&](point a, point b) {
    point next{a.run, a.time + 1};
    if (v.related(next, b)) return true;
    long long lmax = v.stream_bound(b.time) + v.Q;
    for (long long l = b.time + 1; l <= lmax; ++l) {
      if (!v.related(next, point{b.run, l})) continue;
      bool all = true;
      for (long long k = b.time; k < l && all; ++k)
        all = v.related(a, point{b.run, k});
      if (all) return true;
    }
    return fail(a, b, "clause (c) witness");
  });
  return rep;
}

property_report has_no_learning_prime(const lasso_system& sys, agent_id i,
                                      long long horizon) {
  sys.validate();
  if (horizon < 0) horizon = default_horizon(sys);
  core_view v(sys, i);
  property_report rep;
  rep.property = "nl_prime";
  rep.agent = i;
  rep.horizon = horizon;
  rep.holds = for_related_pairs(v, horizon, [&](point a, point b) {
    // Cores of (r, k >= n) all occur by stream_bound; likewise candidate
    // matches in r'.
    long long kmax = v.stream_bound(a.time);
    long long k2max = v.stream_bound(b.time) + v.Q;
    for (long long k = a.time; k <= kmax; ++k) {
      bool found = false;
      for (long long k2 = b.time; k2 <= k2max && !found; ++k2)
        found = v.related(point{a.run, k}, point{b.run, k2});
      if (!found) {
        rep.holds = false;
        rep.counterexample =
            property_counterexample{a, b, k, "future matching (**)"};
        return false;
      }
    }
    return true;
  });
  return rep;
}

property_report is_synchronous(const lasso_system& sys, long long horizon) {
  sys.validate();
  if (horizon < 0) horizon = 2LL * sys.window();
  property_report rep;
  rep.property = "sync";
  rep.horizon = horizon;
  if (sys.clocked) return rep;  // timestamps are part of the local state
  for (agent_id i = 1; i <= sys.m; ++i) {
    core_view v(sys, i);
    bool ok = for_related_pairs(v, horizon, [&](point a, point b) {
      if (a.time != b.time) {
        rep.agent = i;
        rep.holds = false;
        rep.counterexample =
            property_counterexample{a, b, -1, "equal times"};
        return false;
      }
      return true;
    });
    if (!ok) break;
  }
  return rep;
}

property_report has_uis(const lasso_system& sys) {
  sys.validate();
  property_report rep;
  rep.property = "uis";
  rep.horizon = 0;
  const cell& first = sys.at(0, 0);
  for (int r = 1; r < static_cast<int>(sys.runs.size()); ++r) {
    const cell& c = sys.at(r, 0);
    if (c.env != first.env || c.locals != first.locals || c.val != first.val) {
      rep.holds = false;
      rep.counterexample = property_counterexample{
          point{0, 0}, point{r, 0}, -1, "equal initial global states"};
      break;
    }
  }
  return rep;
}

class_spec classify(const lasso_system& sys, long long horizon) {
  class_spec spec;
  spec.pr = true;
  spec.nl = true;
  spec.nl_prime = true;
  for (agent_id i = 1; i <= sys.m; ++i) {
    spec.pr =
        spec.pr &&
        has_perfect_recall(sys, i, pr_mode::definition, horizon).holds;
    spec.nl =
        spec.nl && has_no_learning(sys, i, nl_mode::definition, horizon).holds;
    spec.nl_prime =
        spec.nl_prime && has_no_learning_prime(sys, i, horizon).holds;
  }
  spec.sync = is_synchronous(sys, horizon).holds;
  spec.uis = has_uis(sys).holds;
  return spec;
}

std::string class_spec::to_string() const {
  std::vector<std::string> parts;
  if (pr) parts.push_back("pr");
  if (nl) parts.push_back("nl");
  if (nl_prime) parts.push_back("nl_prime");
  if (sync) parts.push_back("sync");
  if (uis) parts.push_back("uis");
  if (parts.empty()) return "{}";
  std::string out = "{";
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out + "}";
}

std::string render_report(const property_report& rep) {
  std::ostringstream os;
  os << rep.property;
  if (rep.agent > 0) os << " agent " << rep.agent;
  os << ": " << (rep.holds ? "holds" : "fails");
  os << " (horizon " << rep.horizon << ")";
  if (rep.counterexample) {
    const auto& cx = *rep.counterexample;
    os << "; violated: " << cx.clause << " at (r" << cx.a.run + 1 << ","
       << cx.a.time << ") ~ (r" << cx.b.run + 1 << "," << cx.b.time << ")";
    if (cx.k >= 0) os << " with k=" << cx.k;
  }
  return os.str();
}

}  // namespace eltl

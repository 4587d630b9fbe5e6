#include "eltl/ktrees.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace eltl {

namespace {

bool epi_related(const premodel& pm, agent_id i, int a, int b) {
  const auto& cls = pm.epi[i - 1][a];
  return std::find(cls.begin(), cls.end(), b) != cls.end();
}

bool next_related(const premodel& pm, int a, int b) {
  const auto& succ = pm.next[a];
  return std::find(succ.begin(), succ.end(), b) != succ.end();
}

std::vector<agent_id> index_append(const std::vector<agent_id>& idx,
                                   agent_id i) {
  return absorptive_concat(idx, i);
}

}  // namespace

clause_check is_ktree(const premodel& pm, const std::vector<int>& states,
                      int k) {
  int eps = 0;
  for (int s : states) {
    if (static_cast<int>(pm.states[s].index.size()) > k)
      return {false, "state index longer than k"};
    if (pm.states[s].index.empty()) ++eps;
  }
  if (eps != 1) return {false, "unique epsilon-state"};
  std::set<int> in(states.begin(), states.end());

  for (int s : states) {
    const auto& sigma = pm.states[s].index;
    // upward closure
    for (agent_id i = 1; i <= pm.m; ++i) {
      std::vector<agent_id> ext = index_append(sigma, i);
      if (static_cast<int>(ext.size()) > k) continue;
      for (int t = 0; t < static_cast<int>(pm.states.size()); ++t) {
        if (pm.states[t].index != ext) continue;
        if (!epi_related(pm, i, s, t)) continue;
        if (!in.count(t)) return {false, "upward closure"};
      }
    }
    // downward witness
    if (!sigma.empty()) {
      agent_id i = sigma.back();
      std::vector<agent_id> tau(sigma.begin(), sigma.end() - 1);
      bool found = false;
      for (int t : states) {
        if (pm.states[t].index != tau) continue;
        if (epi_related(pm, i, s, t)) {
          found = true;
          break;
        }
      }
      if (!found) return {false, "downward witness"};
    }
  }
  return {};
}

clause_check check_tree_step(const premodel& pm, const tree_step& step,
                             int k) {
  clause_check src = is_ktree(pm, step.source, k);
  if (!src.ok) return {false, "source tree: " + src.clause};
  clause_check tgt = is_ktree(pm, step.target, k);
  if (!tgt.ok) return {false, "target tree: " + tgt.clause};

  std::set<int> in_src(step.source.begin(), step.source.end());
  std::set<int> in_tgt(step.target.begin(), step.target.end());
  bool advanced = false;
  for (int s : step.source) {
    auto it = step.f.find(s);
    if (it == step.f.end() || it->second.empty())
      return {false, "f undefined on a source state"};
    const auto& sq = it->second;
    if (sq.front() != s) return {false, "f(s) must start at s"};
    for (size_t j = 0; j + 1 < sq.size(); ++j) {
      if (!next_related(pm, sq[j], sq[j + 1]))
        return {false, "f(s) is not a ->-sequence"};
      if (pm.states[sq[j]].index != pm.states[s].index)
        return {false, "f(s) leaves the state's index"};
    }
    for (size_t j = 0; j + 1 < sq.size(); ++j)
      if (!in_src.count(sq[j]))
        return {false, "intermediate f(s) state outside the source tree"};
    if (!in_tgt.count(sq.back()))
      return {false, "f(s) does not end in the target tree"};
    if (sq.size() >= 2) advanced = true;
  }
  if (!advanced) return {false, "no sequence of length at least 2"};

  for (int s : step.source)
    for (int s2 : step.source) {
      if (s == s2) continue;
      for (agent_id i = 1; i <= pm.m; ++i) {
        if (!epi_related(pm, i, s, s2)) continue;
        const auto& a = step.f.at(s);
        const auto& b = step.f.at(s2);
        auto rel = [&](int x, int y) {
          return epi_related(pm, i, a[x], b[y]);
        };
        if (!concordant(static_cast<int>(a.size()),
                        static_cast<int>(b.size()), rel)
                 .concordant)
          return {false, "f(s), f(s') not concordant for a ~i pair"};
      }
    }
  return {};
}

formula tree_formula(const premodel& pm, const std::vector<int>& tree,
                     int state) {
  const auto& sigma = pm.states[state].index;
  formula base = state_formula(pm, state);
  if (sigma.empty()) return base;
  agent_id i = sigma.back();
  std::vector<agent_id> tau(sigma.begin(), sigma.end() - 1);
  std::vector<int> partners;
  for (int t : tree)
    if (pm.states[t].index == tau && epi_related(pm, i, state, t))
      partners.push_back(t);
  std::sort(partners.begin(), partners.end());
  formula out = base;
  for (int t : partners)
    out = make_and(out, make_possible(i, tree_formula(pm, tree, t)));
  return out;
}

std::vector<int> fusion(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() || b.empty()) throw error("fusion of empty sequences");
  if (a.back() != b.front())
    throw error("fusion endpoints do not match");
  std::vector<int> out(a.begin(), a.end() - 1);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<int> compression(const std::vector<int>& seq,
                             const std::vector<uint8_t>& advance) {
  if (seq.empty()) throw error("compression of an empty sequence");
  if (advance.size() + 1 != seq.size())
    throw error("labels must cover consecutive pairs");
  std::vector<int> out{seq[0]};
  size_t h = 0;
  while (true) {
    size_t h2 = h;
    bool found = false;
    for (size_t j = h; j + 1 < seq.size(); ++j) {
      if (seq[j] != seq[h]) break;  // stuttering block ends
      if (advance[j]) {
        h2 = j + 1;
        found = true;
        break;
      }
    }
    if (!found) break;
    out.push_back(seq[h2]);
    h = h2;
  }
  return out;
}

lasso_compression compress_lasso(const std::vector<int>& head,
                                 const std::vector<int>& loop,
                                 const std::vector<uint8_t>& head_adv,
                                 const std::vector<uint8_t>& loop_adv) {
  if (loop.empty()) throw error("lasso loop must be nonempty");
  if (head_adv.size() != head.size() || loop_adv.size() != loop.size())
    throw error("labels must cover every position");
  // Unfold enough to see the loop twice, compress, then detect the cycle.
  auto at = [&](size_t j) {
    return j < head.size() ? head[j]
                           : loop[(j - head.size()) % loop.size()];
  };
  auto adv_at = [&](size_t j) {
    return j < head.size() ? head_adv[j]
                           : loop_adv[(j - head.size()) % loop.size()];
  };
  bool loop_advances = false;
  for (uint8_t a : loop_adv) loop_advances = loop_advances || a;
  size_t n = head.size() + (loop_advances ? 3 : 1) * loop.size() + 1;
  std::vector<int> seq;
  std::vector<uint8_t> adv;
  for (size_t j = 0; j < n; ++j) seq.push_back(at(j));
  for (size_t j = 0; j + 1 < n; ++j) adv.push_back(adv_at(j));
  std::vector<int> comp = compression(seq, adv);
  lasso_compression out;
  if (!loop_advances) {
    out.head = comp;
    return out;
  }
  // The compressed stream repeats with the number of advances per lap.
  size_t per_lap = 0;
  for (uint8_t a : loop_adv) per_lap += a ? 1 : 0;
  if (comp.size() < 2 * per_lap) {
    out.head = comp;  // advances ran dry before the pattern stabilized
    return out;
  }
  size_t cut = comp.size() - 2 * per_lap;
  out.head.assign(comp.begin(), comp.begin() + cut + per_lap);
  out.loop.assign(comp.begin() + cut + per_lap, comp.end());
  // canonicalize: drop whole-lap repetitions from the head
  while (out.head.size() >= per_lap &&
         std::equal(out.head.end() - per_lap, out.head.end(),
                    out.loop.end() - per_lap)) {
    std::vector<int> rotated(out.loop.end() - per_lap, out.loop.end());
    rotated.insert(rotated.end(), out.loop.begin(),
                   out.loop.end() - per_lap);
    out.loop = rotated;
    out.head.resize(out.head.size() - per_lap);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run derivations.

namespace {

std::string oi_token(const premodel& pm, int state, agent_id i) {
  auto info = current_information(pm, state, i);
  std::string out = "(";
  for (agent_id a : info.first) out += std::to_string(a) + ".";
  out += "|";
  for (formula f : info.second) out += to_string(f) + ",";
  return out + ")";
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

}  // namespace

lasso_system derive_run(const premodel& pm, const state_lasso& seq,
                        run_kind kind, int horizon) {
  if (horizon < 1) throw error("derivation horizon must be at least 1");
  std::vector<std::string> props = props_of(pm.psi);
  bool clocked = kind == run_kind::nl_sync || kind == run_kind::nl_pr_sync;
  bool grows = kind == run_kind::pr || kind == run_kind::nl_pr ||
               kind == run_kind::nl_pr_sync;

  auto state_at = [&](long long n) { return seq.at(n); };
  auto obs = [&](agent_id i, long long n) {
    return oi_token(pm, state_at(n), i);
  };

  // future observation word from n, as a canonical descriptor token;
  // absorbed for the unclocked kinds, raw for the clocked ones.
  auto future_token = [&](agent_id i, long long n, bool absorbed_mode) {
    long long start =
        std::max<long long>(n, static_cast<long long>(seq.head.size()));
    long long L = static_cast<long long>(seq.loop.size());
    stream_descriptor d;
    if (!absorbed_mode) {
      std::vector<std::string> head, loop;
      for (long long k = n; k < start; ++k) head.push_back(obs(i, k));
      for (long long k = start; k < start + L; ++k)
        loop.push_back(obs(i, k));
      d = canonical_descriptor(std::move(head), std::move(loop));
    } else {
      // absorbed stream with its own lasso, via (phase, last token) states
      std::vector<std::string> emitted;
      std::map<std::pair<long long, std::string>, size_t> seen;
      std::string last;
      long long pos = n;
      size_t loop_start = 0;
      while (true) {
        std::string tok = obs(i, pos);
        if (tok != last) {
          emitted.push_back(tok);
          last = tok;
        }
        long long nxt = pos + 1;
        if (nxt >= start) {
          auto key = std::make_pair((nxt - start) % L, last);
          auto it = seen.find(key);
          if (it != seen.end()) {
            loop_start = it->second;
            break;
          }
          seen[key] = emitted.size();
        }
        pos = nxt;
      }
      std::vector<std::string> head(emitted.begin(),
                                    emitted.begin() + loop_start);
      std::vector<std::string> loop(emitted.begin() + loop_start,
                                    emitted.end());
      if (loop.empty()) loop.push_back(head.back());
      d = canonical_descriptor(std::move(head), std::move(loop));
    }
    return "F<" + join(d.head, ".") + "|" + join(d.loop, ".") + ">";
  };

  int W;
  int P;
  if (grows) {
    P = horizon - 1;
    W = horizon;
  } else {
    P = static_cast<int>(seq.head.size());
    W = P + static_cast<int>(seq.loop.size());
  }

  lasso_system sys;
  sys.m = pm.m;
  sys.clocked = clocked;
  sys.prefix_len = P;
  sys.period = W - P;
  sys.props = props;
  run_template rt;
  for (int c = 0; c < W; ++c) {
    cell cl;
    int st = state_at(c);
    cl.env = "s" + std::to_string(st);
    for (agent_id i = 1; i <= pm.m; ++i) {
      std::string core;
      switch (kind) {
        case run_kind::pr: {
          std::vector<std::string> hist;
          for (long long k = 0; k <= c; ++k)
            hist = absorptive_concat(std::move(hist), obs(i, k));
          core = "H<" + join(hist, ".") + ">";
          break;
        }
        case run_kind::nl:
          core = future_token(i, c, true);
          break;
        case run_kind::nl_pr: {
          std::vector<std::string> hist;
          for (long long k = 0; k <= c; ++k)
            hist = absorptive_concat(std::move(hist), obs(i, k));
          core = "H<" + join(hist, ".") + ">+" + future_token(i, c, true);
          break;
        }
        case run_kind::nl_sync:
          core = future_token(i, c, false);
          break;
        case run_kind::nl_pr_sync: {
          std::vector<std::string> hist;
          for (long long k = 1; k <= c; ++k) hist.push_back(obs(i, k));
          core = "H<" + join(hist, ".") + ">+" + future_token(i, c, false);
          break;
        }
      }
      cl.locals.push_back(core);
    }
    for (const auto& p : props)
      cl.val.push_back(pm.decides_true(st, make_prop(p)) ? 1 : 0);
    rt.cells.push_back(cl);
  }
  sys.runs.push_back(rt);
  sys.validate();
  return sys;
}

// ---------------------------------------------------------------------------
// Bounded tree-sequence search.

std::vector<int> tree_of_root(const premodel& pm, int root, int k) {
  if (!pm.states[root].index.empty()) throw error("root must be an epsilon-state");
  std::set<int> tree{root};
  // upward closure to depth k (indices grow one agent at a time)
  std::vector<int> frontier{root};
  while (!frontier.empty()) {
    std::vector<int> next_frontier;
    for (int s : frontier) {
      const auto& sigma = pm.states[s].index;
      for (agent_id i = 1; i <= pm.m; ++i) {
        std::vector<agent_id> ext = index_append(sigma, i);
        if (static_cast<int>(ext.size()) > k || ext == sigma) continue;
        for (int t = 0; t < static_cast<int>(pm.states.size()); ++t) {
          if (!pm.alive[t] || pm.states[t].index != ext) continue;
          if (!epi_related(pm, i, s, t)) continue;
          if (tree.insert(t).second) next_frontier.push_back(t);
        }
      }
    }
    frontier = std::move(next_frontier);
  }
  return {tree.begin(), tree.end()};
}

tree_search_result search_tree_sequence(const premodel& pm, int budget,
                                        int root) {
  tree_search_result res;
  // designated root: lowest surviving epsilon-state containing psi,
  // unless the caller picked one
  if (root < 0)
    for (int s = 0; s < static_cast<int>(pm.states.size()); ++s)
      if (pm.alive[s] && pm.states[s].index.empty() &&
          pm.decides_true(s, pm.psi)) {
        root = s;
        break;
      }
  if (root < 0) {
    res.undischarged.push_back("no surviving root for the formula");
    return res;
  }

  std::vector<formula> untils;
  for (formula f : pm.level_closure[0].formulas)
    if (f.kind() == op::until) untils.push_back(f);

  std::vector<int> tree = tree_of_root(pm, root, pm.d);
  res.trees.push_back(tree);

  // Serve the root thread's obligations, oldest first; other states follow
  // by lowest-id concordant witnesses.
  std::deque<formula> queue;
  for (formula u : untils)
    if (pm.decides_true(root, u) && !pm.decides_true(root, u.rhs()))
      queue.push_back(u);

  int steps_left = budget;
  int cur_root = root;
  while (!queue.empty() && steps_left > 0) {
    formula u = queue.front();
    if (pm.decides_true(cur_root, u.rhs())) {
      queue.pop_front();
      continue;
    }
    if (!pm.decides_true(cur_root, u)) {
      queue.pop_front();  // obligation lapsed along the path
      continue;
    }
    // lowest-id surviving successor on a fulfilling path
    int next_root = -1;
    {
      std::deque<int> work;
      std::vector<int> from(pm.states.size(), -2);
      work.push_back(cur_root);
      from[cur_root] = -1;
      int goal = -1;
      while (!work.empty() && goal < 0) {
        int s = work.front();
        work.pop_front();
        if (pm.decides_true(s, u.rhs())) {
          goal = s;
          break;
        }
        if (!pm.decides_true(s, u.lhs())) continue;
        for (int t : pm.next[s])
          if (pm.alive[t] && pm.states[t].index.empty() && from[t] == -2) {
            from[t] = s;
            work.push_back(t);
          }
      }
      if (goal < 0) {
        res.undischarged.push_back("state " + std::to_string(cur_root) +
                                   ": " + to_string(u));
        queue.pop_front();
        continue;
      }
      int s = goal;
      while (from[s] != cur_root && from[s] != -1) s = from[s];
      next_root = s == cur_root ? goal : s;
    }

    // build the step from tree to tree_of_root(next_root)
    std::vector<int> target = tree_of_root(pm, next_root, pm.d);
    tree_step step;
    step.source = tree;
    step.target = target;
    step.f[cur_root] = {cur_root, next_root};
    bool stuck = false;
    std::set<int> in_target(target.begin(), target.end());
    for (int s : tree) {
      if (s == cur_root) continue;
      const auto& sigma = pm.states[s].index;
      if (sigma.empty()) continue;  // only one epsilon-state in a tree
      agent_id i = sigma.back();
      int pick = -1;
      for (int t : pm.next[s]) {
        if (!pm.alive[t] || !in_target.count(t)) continue;
        if (pm.states[t].index != sigma) continue;
        if (!epi_related(pm, i, t, next_root)) continue;
        pick = t;
        break;
      }
      if (pick < 0) {
        res.undischarged.push_back(
            "state " + std::to_string(s) +
            ": no concordant witness for the tree step");
        stuck = true;
        break;
      }
      step.f[s] = {s, pick};
    }
    if (stuck) break;
    res.steps.push_back(step);
    res.trees.push_back(target);
    tree = target;
    cur_root = next_root;
    --steps_left;
  }
  res.budget_exhausted = steps_left == 0 && !queue.empty();
  for (formula u : queue)
    if (pm.decides_true(cur_root, u) && !pm.decides_true(cur_root, u.rhs()))
      res.undischarged.push_back("state " + std::to_string(cur_root) + ": " +
                                 to_string(u));
  return res;
}

}  // namespace eltl

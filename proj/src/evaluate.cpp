#include "eltl/evaluate.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace eltl {

namespace {

// Union-find over point slots, used for C-reachability.
struct dsu {
  std::vector<int> parent;
  explicit dsu(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

truth_table::truth_table(const lasso_system& sys, formula f) : sys_(&sys) {
  sys.validate();
  if (max_agent(f) > sys.m)
    throw error("formula mentions an agent beyond the system bound");
  // The reserved anchor proposition may be absent from a system; it then
  // evaluates false everywhere (it only feeds the true/false desugarings).
  for (const auto& p : props_of(f))
    if (p != kTrueAnchorProp) sys.prop_index(p);

  subs_ = subformulas(f);  // sorted by size: children precede parents
  int maxid = 0;
  for (formula g : subs_) maxid = std::max<int>(maxid, g.id());
  sub_index_.assign(maxid + 1, -1);
  for (size_t i = 0; i < subs_.size(); ++i) sub_index_[subs_[i].id()] = i;

  const int W = sys.window();
  const int R = static_cast<int>(sys.runs.size());
  const int slots = R * W;
  rows_.assign(subs_.size(), std::vector<uint8_t>(slots, 0));

  // ~i classes at slot level.  Unclocked: cores equal anywhere.
  // Clocked: cores equal within the same cell column (equal times always
  // share the cell column since P and Q are shared across runs).
  auto class_key = [&](agent_id i, int run, int cell) {
    std::pair<int, std::string> key;
    key.first = sys.clocked ? cell : -1;
    key.second = sys.at(run, cell).locals[i - 1];
    return key;
  };
  std::vector<std::map<std::pair<int, std::string>, std::vector<int>>>
      classes(sys.m + 1);
  for (agent_id i = 1; i <= sys.m; ++i)
    for (int r = 0; r < R; ++r)
      for (int c = 0; c < W; ++c)
        classes[i][class_key(i, r, c)].push_back(r * W + c);

  for (size_t si = 0; si < subs_.size(); ++si) {
    formula g = subs_[si];
    auto& row = rows_[si];
    switch (g.kind()) {
      case op::prop: {
        bool present = false;
        for (const auto& p : sys.props) present = present || p == g.prop_name();
        if (!present && g.prop_name() == kTrueAnchorProp) break;  // all false
        int pi = sys.prop_index(g.prop_name());
        for (int r = 0; r < R; ++r)
          for (int c = 0; c < W; ++c)
            row[r * W + c] = sys.at(r, c).val[pi];
        break;
      }
      case op::not_: {
        const auto& a = rows_[row_of(g.lhs())];
        for (int s = 0; s < slots; ++s) row[s] = !a[s];
        break;
      }
      case op::and_: {
        const auto& a = rows_[row_of(g.lhs())];
        const auto& b = rows_[row_of(g.rhs())];
        for (int s = 0; s < slots; ++s) row[s] = a[s] && b[s];
        break;
      }
      case op::next: {
        const auto& a = rows_[row_of(g.lhs())];
        for (int r = 0; r < R; ++r)
          for (int c = 0; c < W; ++c)
            row[r * W + c] = a[r * W + next_cell(sys, c)];
        break;
      }
      case op::until: {
        // Least fixpoint of X = rhs | (lhs & next X) over the window.
        const auto& a = rows_[row_of(g.lhs())];
        const auto& b = rows_[row_of(g.rhs())];
        bool changed = true;
        while (changed) {
          changed = false;
          for (int r = 0; r < R; ++r)
            for (int c = W - 1; c >= 0; --c) {
              int s = r * W + c;
              uint8_t v =
                  b[s] || (a[s] && row[r * W + next_cell(sys, c)]);
              if (v != row[s]) {
                row[s] = v;
                changed = true;
              }
            }
        }
        break;
      }
      case op::know: {
        const auto& a = rows_[row_of(g.lhs())];
        for (auto& [key, slots_in_class] : classes[g.agent()]) {
          uint8_t all = 1;
          for (int s : slots_in_class) all &= a[s];
          for (int s : slots_in_class) row[s] = all;
        }
        break;
      }
      case op::everyone: {
        const auto& a = rows_[row_of(g.lhs())];
        for (int s = 0; s < slots; ++s) row[s] = 1;
        for (agent_id i = 1; i <= sys.m; ++i)
          for (auto& [key, slots_in_class] : classes[i]) {
            uint8_t all = 1;
            for (int s : slots_in_class) all &= a[s];
            if (!all)
              for (int s : slots_in_class) row[s] = 0;
          }
        break;
      }
      case op::common: {
        // C g holds at a point iff g holds at every point reachable through
        // the union of the ~i relations; reachability is symmetric, so the
        // classes are the connected components.
        const auto& a = rows_[row_of(g.lhs())];
        dsu uf(slots);
        for (agent_id i = 1; i <= sys.m; ++i)
          for (auto& [key, slots_in_class] : classes[i])
            for (size_t j = 1; j < slots_in_class.size(); ++j)
              uf.unite(slots_in_class[0], slots_in_class[j]);
        std::vector<uint8_t> comp_ok(slots, 1);
        for (int s = 0; s < slots; ++s)
          if (!a[s]) comp_ok[uf.find(s)] = 0;
        for (int s = 0; s < slots; ++s) row[s] = comp_ok[uf.find(s)];
        break;
      }
    }
  }
}

int truth_table::row_of(formula g) const {
  if (g.id() >= sub_index_.size() || sub_index_[g.id()] < 0)
    throw error("not a subformula of the evaluated formula: " + to_string(g));
  return sub_index_[g.id()];
}

bool truth_table::at(point pt, formula g) const {
  if (pt.run < 0 || pt.run >= static_cast<int>(sys_->runs.size()))
    throw error("point run out of range");
  return at_cell(pt.run, canonical_position(*sys_, pt.time), g);
}

bool truth_table::at_cell(int run, int cell, formula g) const {
  return rows_[row_of(g)][run * sys_->window() + cell] != 0;
}

bool evaluate(const lasso_system& sys, point pt, formula f) {
  truth_table tt(sys, f);
  return tt.at(pt, f);
}

bool evaluate_common(const lasso_system& sys, point pt, formula f) {
  if (f.kind() != op::common) throw error("evaluate_common expects C g");
  return evaluate(sys, pt, f);
}

std::vector<uint8_t> common_by_iterated_everyone(const truth_table& tt,
                                                 formula common_formula) {
  if (common_formula.kind() != op::common)
    throw error("expected a C formula");
  const lasso_system& sys = tt.system();
  const int W = sys.window();
  const int R = static_cast<int>(sys.runs.size());
  const int slots = R * W;

  auto everyone_of = [&](const std::vector<uint8_t>& in) {
    std::vector<uint8_t> out(slots, 1);
    for (agent_id i = 1; i <= sys.m; ++i) {
      std::map<std::pair<int, std::string>, uint8_t> all;
      for (int r = 0; r < R; ++r)
        for (int c = 0; c < W; ++c) {
          std::pair<int, std::string> key{sys.clocked ? c : -1,
                                          sys.at(r, c).locals[i - 1]};
          auto it = all.find(key);
          if (it == all.end())
            all.emplace(key, in[r * W + c]);
          else
            it->second = it->second && in[r * W + c];
        }
      for (int r = 0; r < R; ++r)
        for (int c = 0; c < W; ++c) {
          std::pair<int, std::string> key{sys.clocked ? c : -1,
                                          sys.at(r, c).locals[i - 1]};
          if (!all[key]) out[r * W + c] = 0;
        }
    }
    return out;
  };

  // E^1 g, E^2 g, ...: the chain is pointwise decreasing (EK includes the
  // point itself), so its limit is the conjunction over all k.
  std::vector<uint8_t> base(slots);
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < W; ++c)
      base[r * W + c] = tt.at_cell(r, c, common_formula.lhs()) ? 1 : 0;
  std::vector<uint8_t> cur = everyone_of(base);
  while (true) {
    std::vector<uint8_t> nxt = everyone_of(cur);
    if (nxt == cur) break;
    cur = std::move(nxt);
  }
  return cur;
}

validity_result valid_in_system(const lasso_system& sys, formula f) {
  truth_table tt(sys, f);
  validity_result res;
  for (int r = 0; r < static_cast<int>(sys.runs.size()); ++r)
    for (int c = 0; c < sys.window(); ++c)
      if (!tt.at_cell(r, c, f)) {
        res.valid = false;
        res.counterexample = point{r, c};
        return res;
      }
  return res;
}

}  // namespace eltl

#include "eltl/closure.hpp"

#include <algorithm>
#include <deque>

namespace eltl {

int closure_set::index_of(formula f) const {
  auto it = index.find(f);
  if (it == index.end()) throw error("formula not in closure: " + to_string(f));
  return it->second;
}

std::vector<formula> closure_set::base_formulas() const {
  std::vector<formula> out;
  for (formula f : formulas)
    if (f.kind() != op::not_) out.push_back(f);
  return out;
}

namespace {

void finalize(closure_set& cl) {
  std::sort(cl.formulas.begin(), cl.formulas.end());
  cl.formulas.erase(std::unique(cl.formulas.begin(), cl.formulas.end()),
                    cl.formulas.end());
  cl.index.clear();
  for (size_t i = 0; i < cl.formulas.size(); ++i)
    cl.index[cl.formulas[i]] = static_cast<int>(i);
}

}  // namespace

closure_set basic_closure(formula psi, int m, size_t cap) {
  if (m < 1) throw error("agent bound m must be at least 1");
  std::vector<formula> members;
  std::map<formula, bool> seen;
  std::deque<formula> work;
  auto add = [&](formula f) {
    if (seen.emplace(f, true).second) {
      members.push_back(f);
      work.push_back(f);
      if (members.size() > cap) throw error("closure size cap exceeded");
    }
  };
  add(psi);
  while (!work.empty()) {
    formula f = work.front();
    work.pop_front();
    switch (f.kind()) {
      case op::prop:
        break;
      case op::and_:
      case op::until:
        add(f.lhs());
        add(f.rhs());
        break;
      default:
        add(f.lhs());
        break;
    }
    if (f.kind() != op::not_) add(make_not(f));
    if (f.kind() == op::common) add(make_everyone(f));
    if (f.kind() == op::everyone)
      for (agent_id i = 1; i <= m; ++i) add(make_know(i, f.lhs()));
  }
  closure_set cl;
  cl.kind = closure_kind::basic;
  cl.formulas = std::move(members);
  finalize(cl);
  return cl;
}

formula canonical_disjunction(const std::vector<formula>& disjuncts) {
  if (disjuncts.empty()) throw error("empty disjunction");
  formula f = disjuncts.back();
  for (size_t i = disjuncts.size() - 1; i-- > 0;)
    f = make_or(disjuncts[i], f);
  return f;
}

namespace {

closure_set ki_closure(const closure_set& base, agent_id i, size_t cap) {
  size_t n = base.size();
  if (n >= 60 || base.size() + 2 * ((size_t(1) << n) - 1) > cap)
    throw error("closure size cap exceeded for cl_{k,i}");
  closure_set cl;
  cl.kind = closure_kind::ki_level;
  cl.agent = i;
  cl.formulas = base.formulas;
  for (uint64_t mask = 1; mask < (uint64_t(1) << n); ++mask) {
    std::vector<formula> set;
    for (size_t j = 0; j < n; ++j)
      if (mask & (uint64_t(1) << j)) set.push_back(base.formulas[j]);
    formula d = make_know(i, canonical_disjunction(set));
    cl.formulas.push_back(d);
    cl.formulas.push_back(make_not(d));
  }
  finalize(cl);
  return cl;
}

}  // namespace

closure_set level_closure(formula psi, int m, int k, agent_id agent,
                          size_t cap) {
  if (k < 0) throw error("closure level must be nonnegative");
  closure_set base = basic_closure(psi, m, cap);
  for (int level = 1; level <= k; ++level) {
    closure_set next;
    next.kind = closure_kind::k_level;
    next.k = level;
    for (agent_id i = 1; i <= m; ++i) {
      closure_set ci = ki_closure(base, i, cap);
      next.formulas.insert(next.formulas.end(), ci.formulas.begin(),
                           ci.formulas.end());
      if (next.formulas.size() > 4 * cap)
        throw error("closure size cap exceeded");
    }
    finalize(next);
    if (next.size() > cap) throw error("closure size cap exceeded");
    base = std::move(next);
  }
  base.k = k;
  if (agent == 0) {
    if (k == 0) base.kind = closure_kind::basic;
    return base;
  }
  closure_set out = ki_closure(base, agent, cap);
  out.k = k;
  return out;
}

}  // namespace eltl

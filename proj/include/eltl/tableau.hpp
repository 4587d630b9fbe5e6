#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eltl/closure.hpp"
#include "eltl/evaluate.hpp"
#include "eltl/formula.hpp"
#include "eltl/system.hpp"

namespace eltl {

/// A maximal locally consistent subset of a closure: `members` holds the
/// true members, sorted structurally.
///
/// Atoms of the level closures cl_{k,i} are represented structurally: the
/// base-atom id plus, per agent, the witness set of base atoms defining the
/// Ki-disjunction content.  Their `members` carry the base fragment only;
/// the disjunction formulas are decided through the witness sets.
struct atom_set {
  std::vector<formula> members;
  int x0 = -1;                       // base atom id (level atoms only)
  std::vector<std::vector<int>> w;   // per agent; empty = no family carried
  bool has(formula f) const;
};

/// All atoms of a basic closure: maximal subsets passing the local rules
/// (no clash, conjunction decomposition, K3, C1 both ways, the C2 and
/// C-reflexivity directions, and the T3 unfolding constraints).
std::vector<atom_set> atoms_of(const closure_set& cl,
                               size_t atom_cap = 1 << 20);

struct sigma_state {
  std::vector<agent_id> index;  // no two consecutive agents equal
  int level = 0;                // index into premodel level tables
  int atom = 0;                 // index into the level's atom list
};

/// The sigma-state graph: states at every index of length <= d, the
/// temporal relation ->, and the per-agent epistemic relations.
struct premodel {
  formula psi;
  int m = 1;
  int d = 0;

  // level 0 is the epsilon level; level l>0 is the (d-|sigma|, i) level for
  // indices ending in agent i = level_agent[l].  Every level shares the
  // basic closure as its queryable fragment; the exponential disjunction
  // families stay implicit in the atoms' witness sets.
  std::vector<closure_set> level_closure;
  std::vector<agent_id> level_agent;
  std::vector<std::vector<atom_set>> level_atoms;
  std::vector<atom_set> base_atoms;  // atoms of cl_0 (levels above 0)

  std::vector<sigma_state> states;
  std::vector<std::vector<int>> next;                // forward -> edges
  std::vector<std::vector<std::vector<int>>> epi;    // [agent-1][state]
  std::vector<uint8_t> alive;

  const closure_set& closure_of(int state) const {
    return level_closure[states[state].level];
  }
  const atom_set& atom_of(int state) const {
    return level_atoms[states[state].level][states[state].atom];
  }
  /// Truth of f at a state; f (or its stripped core) must live in the
  /// state's closure.
  bool decides_true(int state, formula f) const;
  bool index_equal(int a, int b) const {
    return states[a].index == states[b].index;
  }
  int alive_count() const;
};

/// Builds every sigma-state for |sigma| <= d, where d = ad(psi) for C-free
/// psi capped by max_d, and 0 otherwise.  Caps guard the exponential level
/// closures.
premodel build_premodel(formula psi, int max_d = 1,
                        size_t closure_cap = 1 << 14, size_t atom_cap = 4096,
                        int agents = 0);  // 0: derive from the formula

struct elimination_trace {
  std::vector<std::vector<int>> rounds;  // state ids removed per round
};

/// Removes states until every survivor has a surviving successor, a
/// witness for each refuted knowledge formula, a fulfilling path for each
/// until, and a reachable refutation for each refuted C formula.
elimination_trace eliminate(premodel& pm);

/// An infinite ->-sequence as (head, loop) over state ids.
struct state_lasso {
  std::vector<int> head;
  std::vector<int> loop;
  int at(long long n) const {
    return n < static_cast<long long>(head.size())
               ? head[n]
               : loop[(n - head.size()) % loop.size()];
  }
  size_t length() const { return head.size() + loop.size(); }
};

/// Extends a ->-prefix of surviving states to an acceptable lasso: every
/// until obligation at every position of the unfolding is fulfilled.
/// Deterministic; obligations served round-robin, oldest first.
state_lasso acceptable_extension(const premodel& pm,
                                 const std::vector<int>& prefix,
                                 bool recurrence_bias = true);

/// Agent i's current information at a state: the extended index and X/Ki.
std::pair<std::vector<agent_id>, std::vector<formula>> current_information(
    const premodel& pm, int state, agent_id i);

/// The conjunction of a state's atom, canonical order.
formula state_formula(const premodel& pm, int state);

/// Disjunction of atom conjunctions over the ~i class of s at its own level
/// (plus=false) or at the (sigma#i) level (plus=true).
formula phi_formulas(const premodel& pm, int state, agent_id i, bool plus);

enum class sat_class { all, sync, uis, sync_uis };

struct sat_result {
  bool satisfiable = false;
  std::optional<lasso_system> model;
  point designated;
  elimination_trace trace;
  int cover_escalations = 0;
  std::string note;
};

/// Satisfiability for the base classes, d = 0 uniformly.  On SAT the model
/// is a clocked system built from acceptable lassos over surviving states
/// (one run per (state, start offset)), transformed for the uis classes,
/// and re-verified at the designated point with the system evaluator.
sat_result decide_sat(formula psi, sat_class cls = sat_class::all,
                      int agents = 0, size_t closure_cap = 1 << 14,
                      size_t atom_cap = 4096);

std::string premodel_to_json(const premodel& pm);

}  // namespace eltl

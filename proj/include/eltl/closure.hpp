#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "eltl/formula.hpp"

namespace eltl {

enum class closure_kind : uint8_t { basic, k_level, ki_level };

/// A finite formula universe with the negation property: for every member f,
/// either ~f is a member or f is ~g with g a member.
///
/// k-level and (k,i)-level closures additionally carry Ki-disjunction
/// families over subsets of the lower level; those subsets are canonical
/// (sorted, deduplicated), so membership stays syntactic.
struct closure_set {
  closure_kind kind = closure_kind::basic;
  int k = 0;
  agent_id agent = 0;  // ki_level only

  std::vector<formula> formulas;  // sorted, unique
  std::map<formula, int> index;

  bool contains(formula f) const { return index.count(f) != 0; }
  int index_of(formula f) const;
  size_t size() const { return formulas.size(); }

  /// Formulas that are not negations: the branching points for atoms.
  std::vector<formula> base_formulas() const;
};

/// Default cap on closure sizes; cl_{k,i} is exponential in |cl_k|.
constexpr size_t kDefaultClosureCap = size_t(1) << 16;

/// Smallest set containing psi, closed under subformulas, containing ~f for
/// every non-negated member f, E C f for every C f, and K_1 f .. K_m f for
/// every E f.
closure_set basic_closure(formula psi, int m,
                          size_t cap = kDefaultClosureCap);

/// cl_k(psi) when agent == 0, else cl_{k,i}(psi): cl_k plus all
/// Ki-disjunctions (and negations) over nonempty sets of distinct members
/// of cl_k.  Throws when the size would exceed `cap`.
closure_set level_closure(formula psi, int m, int k, agent_id agent = 0,
                          size_t cap = kDefaultClosureCap);

/// The canonical disjunction of a nonempty canonical formula set.
formula canonical_disjunction(const std::vector<formula>& disjuncts);

}  // namespace eltl

#pragma once

#include <optional>
#include <vector>

#include "eltl/formula.hpp"
#include "eltl/system.hpp"

namespace eltl {

/// Bottom-up truth cache: one row per subformula, one column per
/// (run, window cell).  Truth at any point (r,n) is the entry at
/// (r, canonical_position(n)); X and U are solved by fixpoint over the
/// window, C by reachability through the union of the ~i relations.
class truth_table {
 public:
  truth_table(const lasso_system& sys, formula f);

  bool at(point pt, formula g) const;       // any subformula of f
  bool at_cell(int run, int cell, formula g) const;

  const std::vector<formula>& subs() const { return subs_; }
  const lasso_system& system() const { return *sys_; }

 private:
  const lasso_system* sys_;
  std::vector<formula> subs_;                   // evaluation order
  std::vector<int> sub_index_;                  // formula id lookup
  std::vector<std::vector<uint8_t>> rows_;      // [sub][run*W + cell]
  int row_of(formula g) const;
  friend std::vector<uint8_t> common_by_iterated_everyone(const truth_table&,
                                                          formula);
};

/// Truth of f at a point.  f may use the abbreviation layer (it is already
/// a core AST by construction).
bool evaluate(const lasso_system& sys, point pt, formula f);

/// Truth of C g via reachability through the union of the ~i
/// relations.  `f` must be C g.
bool evaluate_common(const lasso_system& sys, point pt, formula f);

/// Independent route for C g: iterate E, E E, ... to stability and take the
/// limit.  Returns one entry per (run, cell).  Used to cross-check the
/// reachability route.
std::vector<uint8_t> common_by_iterated_everyone(const truth_table& tt,
                                                 formula common_formula);

struct validity_result {
  bool valid = true;
  point counterexample;  // minimal (run, cell) when !valid
};

/// True iff f holds at every point of the system.
validity_result valid_in_system(const lasso_system& sys, formula f);

}  // namespace eltl

#pragma once

#include <map>
#include <string>
#include <vector>

#include "eltl/properties.hpp"
#include "eltl/tableau.hpp"

namespace eltl {

struct clause_check {
  bool ok = true;
  std::string clause;  // violated clause id when !ok
};

/// Checks the three defining conditions of a k-tree over premodel states:
/// a unique epsilon-state, upward closure under ~i partners at extended
/// indices, and a downward witness at the parent index.
clause_check is_ktree(const premodel& pm, const std::vector<int>& states,
                      int k);

/// A tree step S1 ->_f S2: per-state ->-sequences through S1 into S2,
/// concordant across ~i, with at least one real advance.
struct tree_step {
  std::vector<int> source;
  std::vector<int> target;
  std::map<int, std::vector<int>> f;
};

clause_check check_tree_step(const premodel& pm, const tree_step& step,
                             int k);

/// tree_{S,s}: the state's atom conjunction, for epsilon-states; otherwise
/// conjoined with Li tree_{S,t} over the parent-level partners t in S.
formula tree_formula(const premodel& pm, const std::vector<int>& tree,
                     int state);

/// Fusion of two sequences sharing an endpoint: a minus its last element,
/// then b.  Throws when last(a) != first(b).
std::vector<int> fusion(const std::vector<int>& a, const std::vector<int>& b);

/// Compression of a ->-labeled sequence: advance[j] marks a genuine -> step
/// from seq[j] to seq[j+1]; stuttering entries are dropped.
std::vector<int> compression(const std::vector<int>& seq,
                             const std::vector<uint8_t>& advance);

struct lasso_compression {
  std::vector<int> head;
  std::vector<int> loop;   // empty when the compression is finite
};

/// Compression of an infinite lasso-shaped labeled sequence.
lasso_compression compress_lasso(const std::vector<int>& head,
                                 const std::vector<int>& loop,
                                 const std::vector<uint8_t>& head_adv,
                                 const std::vector<uint8_t>& loop_adv);

enum class run_kind { pr, nl, nl_pr, nl_sync, nl_pr_sync };

/// Realizes the run constructions over an acceptable state lasso: the
/// environment carries the states; agent locals are current-information
/// histories (pr), future descriptors (nl), pairs, or their clocked
/// variants.  Kinds with growing histories return a truncated system of
/// prefix length horizon-1 whose property checks are only meaningful up to
/// that horizon.
lasso_system derive_run(const premodel& pm, const state_lasso& seq,
                        run_kind kind, int horizon);

struct tree_search_result {
  std::vector<std::vector<int>> trees;
  std::vector<tree_step> steps;
  std::vector<std::string> undischarged;
  bool budget_exhausted = false;
};

/// Bounded best-effort construction of an acceptable tree sequence: the
/// root thread serves its until obligations round-robin (oldest first);
/// sibling states advance by lowest-id concordant witnesses.  Undischarged
/// obligations are reported, never guessed.
tree_search_result search_tree_sequence(const premodel& pm, int budget,
                                        int root = -1);

/// The unique k-tree generated by an epsilon-state, when it exists.
std::vector<int> tree_of_root(const premodel& pm, int root, int k);

}  // namespace eltl

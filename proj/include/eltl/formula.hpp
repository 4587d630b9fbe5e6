#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eltl {

/// Error type for all precondition and capacity failures in the library.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Agents are numbered 1..m.
using agent_id = int;

enum class op : uint8_t {
  prop,      // primitive proposition
  not_,      // negation
  and_,      // conjunction
  next,      // X f
  until,     // f U g
  know,      // Ki f
  everyone,  // E f
  common,    // C f
};

class formula;

namespace detail {
struct node {
  op kind;
  agent_id agent = 0;       // know only
  std::string prop;         // prop only
  const node* lhs = nullptr;
  const node* rhs = nullptr;
  uint32_t size = 1;        // node count, used for structural ordering
  uint32_t id = 0;          // interning id (creation order)
};
const node* intern(node&& n);
}  // namespace detail

/// An immutable, interned core formula.  Formulas with equal structure are
/// the same pointer, so equality and hashing are O(1).  The core language
/// has exactly the eight kinds in `op`; everything else (true, |, ->, F, G,
/// Li, E^k, K-sequences) is an abbreviation that desugars at construction.
class formula {
 public:
  formula() : n_(nullptr) {}

  bool valid() const { return n_ != nullptr; }
  op kind() const { return n_->kind; }
  agent_id agent() const { return n_->agent; }
  const std::string& prop_name() const { return n_->prop; }
  formula lhs() const { return formula(n_->lhs); }
  formula rhs() const { return formula(n_->rhs); }
  uint32_t size() const { return n_->size; }
  uint32_t id() const { return n_->id; }

  bool operator==(const formula& o) const { return n_ == o.n_; }
  bool operator!=(const formula& o) const { return n_ != o.n_; }

  /// Structural total order: by size, then kind, then payload, then
  /// children.  Deterministic across processes (does not use intern ids).
  bool operator<(const formula& o) const { return compare(o) < 0; }
  int compare(const formula& o) const;

  const detail::node* raw() const { return n_; }

  // Internal: wraps an interned node.  Use the make_* constructors.
  explicit formula(const detail::node* n) : n_(n) {}

 private:
  const detail::node* n_;
};

// Core constructors.
formula make_prop(const std::string& name);
formula make_not(formula f);
formula make_and(formula a, formula b);
formula make_next(formula f);
formula make_until(formula a, formula b);
formula make_know(agent_id i, formula f);  // i >= 1, or 0 for schema metavars
formula make_everyone(formula f);
formula make_common(formula f);

/// Reserved proposition anchoring the `true` desugaring.
extern const char* const kTrueAnchorProp;

// Abbreviation layer.  All of these return core ASTs.
formula make_false();                     // p0 & ~p0
formula make_true();                      // ~(p0 & ~p0)
formula make_or(formula a, formula b);    // ~(~a & ~b)
formula make_implies(formula a, formula b);
formula make_iff(formula a, formula b);
formula make_eventually(formula f);       // true U f
formula make_always(formula f);           // ~(true U ~f)
formula make_possible(agent_id i, formula f);  // ~Ki~f
formula make_everyone_k(int k, formula f);     // E^k f
formula make_know_seq(const std::vector<agent_id>& sigma, formula f);

// Sugar recognizers (used by the printer and the proof checker).
bool is_true(formula f);
bool is_false(formula f);
std::optional<std::pair<formula, formula>> as_or(formula f);
std::optional<std::pair<formula, formula>> as_implies(formula f);
std::optional<formula> as_eventually(formula f);
std::optional<formula> as_always(formula f);
std::optional<std::pair<agent_id, formula>> as_possible(formula f);

/// Canonical text form.  Printing then parsing is the identity on core ASTs.
std::string to_string(formula f);

/// Parse the external grammar.  Throws eltl::error with a position message.
formula parse(const std::string& text);

/// All proposition names occurring in f, sorted, without duplicates.
std::vector<std::string> props_of(formula f);

/// Largest agent index mentioned (0 if none).
agent_id max_agent(formula f);

bool mentions_common_or_everyone(formula f);

/// Greatest number of alternations of distinct Ki along any branch.
/// Temporal operators do not count.  Throws for formulas mentioning E or C.
int alternation_depth(formula f);

/// All distinct subformulas of f (including f), sorted structurally.
std::vector<formula> subformulas(formula f);

/// Absorptive concatenation: seq unchanged if its last element equals x,
/// else seq with x appended.
template <typename T>
std::vector<T> absorptive_concat(std::vector<T> seq, const T& x) {
  if (seq.empty() || !(seq.back() == x)) seq.push_back(x);
  return seq;
}

/// Absorb consecutive repetitions in a whole sequence.
template <typename T>
std::vector<T> absorb(const std::vector<T>& seq) {
  std::vector<T> out;
  for (const T& x : seq)
    if (out.empty() || !(out.back() == x)) out.push_back(x);
  return out;
}

struct formula_hash {
  size_t operator()(const formula& f) const {
    return std::hash<const void*>()(f.raw());
  }
};

}  // namespace eltl

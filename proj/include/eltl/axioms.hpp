#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eltl/evaluate.hpp"
#include "eltl/formula.hpp"
#include "eltl/properties.hpp"
#include "eltl/system.hpp"

namespace eltl {

/// An axiom schema: a formula template over metavariables P1..P3 (stored as
/// reserved propositions "@1".."@3") and an agent metavariable (agent 0).
/// K1 (propositional tautologies) and C1 (whose shape depends on the agent
/// count) are handled specially by instantiate/match.
struct axiom_schema {
  std::string id;
  formula pattern;       // invalid for K1 and C1
  int arity = 1;         // number of formula metavariables
  bool agent_indexed = false;
};

const std::vector<axiom_schema>& axiom_catalog();
const axiom_schema& schema_by_id(const std::string& id);

/// Substitutes the metavariables and the agent into the schema pattern.
/// C1 needs the agent count m; other schemas ignore it.
formula instantiate(const axiom_schema& schema,
                    const std::vector<formula>& subst, agent_id agent,
                    int m = 1);

/// Finds a substitution sigma with instantiate(schema, sigma, agent) == f.
/// For K1 the check is semantic: f must be a substitution instance of a
/// propositional tautology over its modal-atomic skeleton.
struct schema_match {
  std::vector<formula> subst;
  agent_id agent = 0;
};
std::optional<schema_match> match_schema(formula f, const axiom_schema& schema,
                                         int m = 1);

/// True when f's modal-atomic skeleton is a propositional tautology.
bool is_propositional_tautology(formula f);

// ---------------------------------------------------------------------------
// Class-constrained random system generation.

struct generator_config {
  class_spec target;          // subset of {pr, nl, sync, uis}
  int max_runs = 3;
  int max_window = 6;
  int m = 2;
  int num_props = 2;
  int env_alphabet = 2;
  int obs_alphabet = 2;       // observation tokens driving local cores
  uint64_t seed = 0;
};

/// Builds a random lasso system that provably lies in the target class:
/// sync -> clocked; uis -> shared initial cell; pr -> cores are absorbed
/// observation histories (observations constant on the loop); nl -> cores
/// are canonical future-observation descriptors; combinations pair these.
/// nl+sync+uis uses time-indexed cores shared across runs.
lasso_system generate_system(const generator_config& config);

/// Random formula for soundness instantiations: depth-bounded, biased
/// toward knowledge/temporal mixing.  Mentions agents <= m and props from
/// {p, q}.
formula random_formula(uint64_t seed, int depth, int m, bool allow_ck);

// ---------------------------------------------------------------------------
// Soundness sweeps and counterexample search.

struct soundness_violation {
  std::string schema;
  int trial = 0;
  int instantiation = 0;
  lasso_system system;
  point where;
  formula instance;
};

struct soundness_report {
  std::vector<std::string> lines;  // one per (schema, trial)
  std::vector<soundness_violation> violations;
  bool ok() const { return violations.empty(); }
};

/// For each trial: generate a system in the class, instantiate every schema
/// with random depth-bounded formulas, and check validity in the system.
soundness_report soundness_suite(const class_spec& target,
                                 const std::vector<std::string>& schema_ids,
                                 int trials, int instantiations_per_trial,
                                 const generator_config& bounds);

struct falsify_bounds {
  int max_runs = 3;
  int max_window = 4;
  int m = 2;
  int random_samples = 4000;
  bool include_fixture = true;
  uint64_t seed = 0;
};

struct falsification {
  lasso_system system;
  point where;
};

/// Searches for a system and point falsifying f: the nl' fixture (when in
/// the pool), then exhaustive enumeration of tiny systems, then seeded
/// random sampling within the bounds.  The result is re-checked before it
/// is returned.  Absent means the search was exhausted, not that f is
/// valid.
std::optional<falsification> falsify(formula f, const falsify_bounds& bounds);

/// Exhaustive bounded model search: enumerates all systems (up to core
/// renaming) with runs <= max_runs, window <= max_window, agents and
/// propositions taken from f, and returns a model of f if one exists.
std::optional<falsification> bounded_model_search(formula f, int max_runs,
                                                  int max_window,
                                                  int agents = 0);

}  // namespace eltl

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eltl/axioms.hpp"
#include "eltl/formula.hpp"

namespace eltl {

enum class justification_kind { axiom, rule, premise };

struct proof_line {
  formula f;
  justification_kind kind = justification_kind::axiom;
  std::string id;                // axiom or rule identifier
  std::vector<formula> subst;    // axiom substitution (may be empty)
  agent_id agent = 0;            // axiom agent, when agent-indexed
  std::vector<int> premises;     // 1-based references, strictly backwards
};

/// A Hilbert-style proof over a named axiom set ("S5U", "S5CU", optionally
/// extended with +KT1..+KT5, +NLSU).  The first `num_premises` lines may be
/// hypotheses; a closed theorem has none.
struct proof {
  std::string axiom_set = "S5U";
  int agents = 1;                // m, fixes the C1 instance shape
  int num_premises = 0;
  std::vector<proof_line> lines;
};

struct check_result {
  bool ok = true;
  int line = 0;  // 1-based first failing line when !ok
  std::string reason;
};

/// Axiom ids licensed by an axiom set name.  Throws on unknown names.
std::vector<std::string> axioms_of_set(const std::string& set_name);

/// Checks every line: axiom instances against the proof's axiom set, rules
/// R1 (modus ponens), R2 (Ki-necessitation), RT1 (X-necessitation), RT2 and
/// RC1 by rigid shape.  Reports the first failing line and the reason.
check_result check_proof(const proof& p);

// -- proof construction helpers (used by the derived-rule library) ----------

struct proof_builder {
  proof pf;

  explicit proof_builder(std::string axiom_set, int agents = 1)
      : pf{std::move(axiom_set), agents, 0, {}} {}

  int premise(formula f);                 // adds a hypothesis line
  int axiom(const std::string& id, const std::vector<formula>& subst,
            agent_id agent = 0);
  int tautology(formula f);               // K1 line; validated eagerly
  int rule(const std::string& id, std::vector<int> from, formula f);

  // Derived steps (each expands to primitive lines).
  int mp(int premise_line, int implication_line);    // R1
  int know_mono(int implication_line, agent_id i);   // |- a=>b to Ki a=>Ki b
  int next_mono(int implication_line);               // |- a=>b to X a=>X b
  int chain(int ab_line, int bc_line);               // |- a=>b, b=>c to a=>c

  formula at(int line) const { return pf.lines[line - 1].f; }
};

// -- derived rule library ----------------------------------------------------

/// From |- alpha => ~gamma and |- alpha => X(alpha | (~beta & ~gamma))
/// conclude |- alpha => ~(beta U gamma).  The two premises are hypothesis
/// lines 1 and 2 of the returned proof.
proof until_negation_template(formula alpha, formula beta, formula gamma,
                              const std::string& axiom_set = "S5U");

/// Closed proof of (G f -> G G f) & (G G f -> G f).
proof box_idempotence_proof(formula f, const std::string& axiom_set = "S5U");

/// From |- a => b (hypothesis line 1) conclude |- Ki a => Ki b.
proof know_distribution_template(formula a, formula b, agent_id i,
                                 const std::string& axiom_set = "S5U");

/// The expanded derivation of the KT1 instance K1 G p => G K1 p within
/// S5U+KT3, with no hypotheses.
proof kt1_from_kt3_proof();

/// The machine-checked template proofs, instantiated on representative
/// formulas: the until-negation pattern, box idempotence, and knowledge
/// distribution.
struct named_proof {
  std::string name;
  proof pf;
};
std::vector<named_proof> derived_rule_library();

/// One catalogued corruption of the KT1 derivation and the line at which
/// the checker must reject it.
struct proof_mutation {
  std::string name;
  proof mutated;
  int expected_line;
};
std::vector<proof_mutation> kt1_mutation_catalog();

// -- proof file format -------------------------------------------------------

std::string proof_to_text(const proof& p);
proof proof_from_text(const std::string& text);
proof load_proof_file(const std::string& path);
void save_proof_file(const proof& p, const std::string& path);

}  // namespace eltl

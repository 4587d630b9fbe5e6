#include "doctest.h"

#include "eltl/axioms.hpp"
#include "eltl/evaluate.hpp"
#include "eltl/proofs.hpp"

using namespace eltl;

TEST_CASE("axiom sets") {
  auto s5u = axioms_of_set("S5U");
  CHECK(std::count(s5u.begin(), s5u.end(), "T3") == 1);
  CHECK(std::count(s5u.begin(), s5u.end(), "C1") == 0);
  auto ext = axioms_of_set("S5U+KT2+KT5+NLSU");
  CHECK(std::count(ext.begin(), ext.end(), "KT5") == 1);
  CHECK(std::count(ext.begin(), ext.end(), "NLSU") == 1);
  auto s5cu = axioms_of_set("S5CU");
  CHECK(std::count(s5cu.begin(), s5cu.end(), "C2") == 1);
  CHECK_THROWS_AS(axioms_of_set("S4U"), error);
  CHECK_THROWS_AS(axioms_of_set("S5U+KT9"), error);
}

TEST_CASE("a two-line proof") {
  proof p;
  p.axiom_set = "S5U";
  p.lines.push_back({parse("p -> p"), justification_kind::axiom, "K1", {}, 0,
                     {}});
  p.lines.push_back({parse("K1 (p -> p)"), justification_kind::rule, "R2",
                     {}, 0, {1}});
  check_result res = check_proof(p);
  CHECK(res.ok);

  // necessitation of something unproved
  p.lines[1].premises = {2};
  res = check_proof(p);
  CHECK_FALSE(res.ok);
  CHECK(res.line == 2);
}

TEST_CASE("rule shapes are rigid") {
  proof p;
  p.axiom_set = "S5CU";
  // RC1: from f => E(g & f) infer f => C g
  formula f = parse("p");
  formula g = parse("q");
  p.lines.push_back({make_implies(f, make_everyone(make_and(g, f))),
                     justification_kind::premise, "", {}, 0, {}});
  p.num_premises = 1;
  p.lines.push_back({make_implies(f, make_common(g)),
                     justification_kind::rule, "RC1", {}, 0, {1}});
  CHECK(check_proof(p).ok);

  // conjunct order in the premise matters
  proof q;
  q.axiom_set = "S5CU";
  q.num_premises = 1;
  q.lines.push_back({make_implies(f, make_everyone(make_and(f, g))),
                     justification_kind::premise, "", {}, 0, {}});
  q.lines.push_back({make_implies(f, make_common(g)),
                     justification_kind::rule, "RC1", {}, 0, {1}});
  check_result res = check_proof(q);
  CHECK_FALSE(res.ok);
  CHECK(res.line == 2);

  // RC1 is not available outside S5CU
  proof r = p;
  r.axiom_set = "S5U";
  res = check_proof(r);
  CHECK_FALSE(res.ok);
  CHECK(res.line == 2);
}

TEST_CASE("the KT1 derivation from KT3 checks") {
  proof kt1 = kt1_from_kt3_proof();
  check_result res = check_proof(kt1);
  CAPTURE(res.line);
  CAPTURE(res.reason);
  CHECK(res.ok);
  CHECK(kt1.num_premises == 0);
  CHECK(kt1.axiom_set == "S5U+KT3");
  CHECK(kt1.lines.back().f ==
        instantiate(schema_by_id("KT1"), {parse("p")}, 1));
  // the derivation genuinely uses KT3
  bool uses_kt3 = false;
  for (const auto& ln : kt1.lines)
    uses_kt3 = uses_kt3 || (ln.kind == justification_kind::axiom &&
                            ln.id == "KT3");
  CHECK(uses_kt3);
}

TEST_CASE("every catalogued mutation is rejected at its line") {
  auto catalog = kt1_mutation_catalog();
  CHECK(catalog.size() >= 20);
  for (const auto& mut : catalog) {
    check_result res = check_proof(mut.mutated);
    CAPTURE(mut.name);
    CHECK_FALSE(res.ok);
    CHECK(res.line == mut.expected_line);
  }
}

TEST_CASE("checker verdicts are deterministic") {
  proof kt1 = kt1_from_kt3_proof();
  check_result a = check_proof(kt1);
  check_result b = check_proof(kt1);
  CHECK(a.ok == b.ok);
  auto catalog = kt1_mutation_catalog();
  for (const auto& mut : catalog) {
    check_result x = check_proof(mut.mutated);
    check_result y = check_proof(mut.mutated);
    CHECK(x.line == y.line);
    CHECK(x.reason == y.reason);
  }
}

TEST_CASE("derived rule library") {
  // until-negation pattern, including the degenerate instantiation
  formula p = parse("p");
  proof l7 = until_negation_template(p, p, p);
  check_result res = check_proof(l7);
  CAPTURE(res.line);
  CAPTURE(res.reason);
  CHECK(res.ok);
  CHECK(l7.num_premises == 2);
  CHECK(l7.lines.back().f == make_implies(p, make_not(make_until(p, p))));

  proof l7b = until_negation_template(parse("p & q"), parse("X p"),
                                      parse("p U q"));
  CHECK(check_proof(l7b).ok);

  // box idempotence, closed
  proof idem = box_idempotence_proof(p);
  CHECK(check_proof(idem).ok);
  CHECK(idem.num_premises == 0);
  CHECK(idem.lines.back().f ==
        make_and(make_implies(make_always(p), make_always(make_always(p))),
                 make_implies(make_always(make_always(p)), make_always(p))));

  // knowledge distribution
  proof kd = know_distribution_template(parse("p"), parse("q"), 2);
  CHECK(check_proof(kd).ok);
  CHECK(kd.lines.back().f ==
        make_implies(make_know(2, parse("p")), make_know(2, parse("q"))));
}

TEST_CASE("proof files round-trip") {
  proof kt1 = kt1_from_kt3_proof();
  std::string text = proof_to_text(kt1);
  proof back = proof_from_text(text);
  CHECK(check_proof(back).ok);
  CHECK(proof_to_text(back) == text);
  CHECK(back.lines.size() == kt1.lines.size());
  for (size_t i = 0; i < back.lines.size(); ++i)
    CHECK(back.lines[i].f == kt1.lines[i].f);
}

TEST_CASE("theorems proved in a class's system hold in that class") {
  // Conclusions proved in S5U+KT3 are valid on perfect-recall systems;
  // closed S5U theorems are valid everywhere.
  proof kt1 = kt1_from_kt3_proof();
  formula kt1_instance = kt1.lines.back().f;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    generator_config cfg;
    cfg.seed = seed;
    cfg.target.pr = true;
    lasso_system sys = generate_system(cfg);
    CHECK(valid_in_system(sys, kt1_instance).valid);
  }
  proof idem = box_idempotence_proof(parse("p"));
  formula idem_f = idem.lines.back().f;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    generator_config cfg;
    cfg.seed = seed * 3;
    lasso_system sys = generate_system(cfg);
    CHECK(valid_in_system(sys, idem_f).valid);
  }
}

TEST_CASE("the derived rule library ships checked proofs") {
  for (const auto& item : derived_rule_library()) {
    CAPTURE(item.name);
    CHECK(check_proof(item.pf).ok);
  }
}

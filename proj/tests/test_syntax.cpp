#include "doctest.h"

#include <set>

#include "eltl/axioms.hpp"
#include "eltl/closure.hpp"
#include "eltl/evaluate.hpp"
#include "eltl/formula.hpp"

using namespace eltl;

TEST_CASE("parser covers the grammar") {
  formula f = parse("K1 (p U q)");
  CHECK(f.kind() == op::know);
  CHECK(f.agent() == 1);
  CHECK(f.lhs().kind() == op::until);

  CHECK(parse("true") ==
        make_not(make_and(make_prop("p0"), make_not(make_prop("p0")))));
  CHECK(parse("false") == make_false());
  CHECK(parse("F p") == make_until(make_true(), make_prop("p")));
  CHECK(parse("G p") == make_always(make_prop("p")));
  CHECK(parse("L2 p") == make_possible(2, make_prop("p")));
  CHECK(parse("p -> q") == make_implies(make_prop("p"), make_prop("q")));
  CHECK(parse("p | q") == make_or(make_prop("p"), make_prop("q")));
  CHECK(parse("E p") == make_everyone(make_prop("p")));
  CHECK(parse("C p") == make_common(make_prop("p")));
  CHECK(parse("X p") == make_next(make_prop("p")));

  // precedence: unary > U > & > | > ->
  CHECK(parse("~p U q & r | s -> t") ==
        make_implies(
            make_or(make_and(make_until(make_not(make_prop("p")),
                                        make_prop("q")),
                             make_prop("r")),
                    make_prop("s")),
            make_prop("t")));
  // U is right-associative
  CHECK(parse("p U q U r") ==
        make_until(make_prop("p"),
                   make_until(make_prop("q"), make_prop("r"))));
}

TEST_CASE("parser rejects bad input with positions") {
  CHECK_THROWS_AS(parse("K0 p"), error);
  CHECK_THROWS_AS(parse("p &"), error);
  CHECK_THROWS_AS(parse("(p"), error);
  CHECK_THROWS_AS(parse("p q"), error);
  try {
    parse("p & & q");
  } catch (const error& e) {
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("printing then parsing is the identity on core ASTs") {
  for (uint64_t seed = 0; seed < 300; ++seed) {
    formula f = random_formula(seed, 4, 3, seed % 3 == 0);
    CAPTURE(to_string(f));
    CHECK(parse(to_string(f)) == f);
  }
}

TEST_CASE("alternation depth") {
  CHECK(alternation_depth(parse("K1 ~K2 K1 p")) == 3);
  CHECK(alternation_depth(parse("K1 G K1 p")) == 1);
  CHECK(alternation_depth(parse("p U q")) == 0);
  CHECK(alternation_depth(parse("K2 p & K1 X K1 q")) == 1);
  CHECK(alternation_depth(parse("K2 K1 p")) == 2);
  CHECK_THROWS_AS(alternation_depth(parse("C p")), error);
  CHECK_THROWS_AS(alternation_depth(parse("E p")), error);
}

TEST_CASE("alternation depth of knowledge prefixes") {
  // ad(K_sigma f) = |sigma| + ad(f) when sigma's last agent differs from
  // f's outermost knowledge agent
  std::vector<formula> bodies = {parse("K1 p"), parse("K2 X q"),
                                 parse("K1 ~K2 p")};
  std::vector<std::vector<agent_id>> sigmas = {
      {2}, {3}, {2, 1}, {3, 2}, {1, 2}, {2, 1, 2}, {3, 1, 3}};
  for (formula body : bodies) {
    // outermost knowledge agent of the body
    formula g = body;
    while (g.kind() != op::know) g = g.lhs();
    agent_id outer = g.agent();
    for (const auto& sigma : sigmas) {
      if (sigma.back() == outer) continue;
      formula f = make_know_seq(sigma, body);
      CHECK(alternation_depth(f) ==
            static_cast<int>(sigma.size()) + alternation_depth(body));
    }
  }
}

TEST_CASE("absorptive concatenation") {
  std::vector<std::string> s{"l"};
  CHECK(absorptive_concat(s, std::string("l")) ==
        std::vector<std::string>{"l"});
  CHECK(absorptive_concat(s, std::string("l2")) ==
        std::vector<std::string>({"l", "l2"}));
  CHECK(absorptive_concat(std::vector<std::string>{}, std::string("x")) ==
        std::vector<std::string>{"x"});
}

TEST_CASE("basic closure") {
  closure_set cl = basic_closure(parse("p"), 1);
  CHECK(cl.size() == 2);
  CHECK(cl.contains(parse("p")));
  CHECK(cl.contains(parse("~p")));

  closure_set cl2 = basic_closure(parse("K1 p"), 1);
  CHECK(cl2.size() == 4);
  CHECK(cl2.contains(parse("K1 p")));
  CHECK(cl2.contains(parse("~K1 p")));

  closure_set cl3 = basic_closure(parse("C p"), 2);
  CHECK(cl3.contains(make_everyone(make_common(parse("p")))));
  CHECK(cl3.contains(make_know(1, make_common(parse("p")))));
  CHECK(cl3.contains(make_know(2, make_common(parse("p")))));
  CHECK(cl3.contains(make_not(make_know(2, make_common(parse("p"))))));
}

TEST_CASE("closure negation property") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    formula f = random_formula(seed, 3, 2, seed % 4 == 0);
    closure_set cl = basic_closure(f, 2);
    for (formula g : cl.formulas) {
      bool ok = cl.contains(make_not(g)) ||
                (g.kind() == op::not_ && cl.contains(g.lhs()));
      CHECK(ok);
    }
  }
}

TEST_CASE("level closures") {
  closure_set c0i = level_closure(parse("p"), 1, 0, 1);
  CHECK(c0i.contains(make_know(
      1, canonical_disjunction({parse("p"), parse("~p")}))));

  // size formula against exhaustive enumeration, |cl_0| <= 4
  for (const char* text : {"p", "X p"}) {
    formula psi = parse(text);
    closure_set base = basic_closure(psi, 1);
    REQUIRE(base.size() <= 4);
    closure_set lifted = level_closure(psi, 1, 0, 1);
    // oracle: enumerate every nonempty subset by brute force
    std::set<formula> expected(base.formulas.begin(), base.formulas.end());
    size_t n = base.size();
    for (uint64_t mask = 1; mask < (uint64_t(1) << n); ++mask) {
      std::vector<formula> set;
      for (size_t j = 0; j < n; ++j)
        if (mask & (uint64_t(1) << j)) set.push_back(base.formulas[j]);
      formula d = make_know(1, canonical_disjunction(set));
      expected.insert(d);
      expected.insert(make_not(d));
    }
    CHECK(lifted.size() == expected.size());
    CHECK(lifted.size() ==
          base.size() + 2 * ((size_t(1) << base.size()) - 1));
  }

  // cl_1 is the union of the cl_{0,i}
  formula psi = parse("K1 p & K2 p");
  closure_set cl1 = level_closure(psi, 2, 1);
  std::set<formula> uni;
  for (agent_id i = 1; i <= 2; ++i) {
    closure_set ci = level_closure(psi, 2, 0, i);
    uni.insert(ci.formulas.begin(), ci.formulas.end());
  }
  CHECK(cl1.size() == uni.size());
  for (formula f : cl1.formulas) CHECK(uni.count(f) == 1);

  // cap guard
  formula wide = parse("p & q & r1 & r2 & K1 (p U q) & X r1 & F r2");
  CHECK_THROWS_AS(level_closure(wide, 1, 0, 1, 1 << 10), error);
}

TEST_CASE("abbreviations agree with their defining clauses") {
  // desugaring makes most of these structural identities
  formula p = parse("p");
  CHECK(make_eventually(p) == make_until(make_true(), p));
  CHECK(make_always(p) == make_not(make_eventually(make_not(p))));
  CHECK(make_possible(1, p) == make_not(make_know(1, make_not(p))));
  CHECK(make_everyone_k(3, p) ==
        make_everyone(make_everyone(make_everyone(p))));
  CHECK(make_know_seq({1, 2}, p) == make_know(1, make_know(2, p)));

  // and pointwise on sampled systems for the truth-functional ones
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    generator_config cfg;
    cfg.seed = seed;
    cfg.max_runs = 2;
    cfg.max_window = 4;
    cfg.m = 2;
    lasso_system sys = generate_system(cfg);
    formula f = random_formula(seed, 2, 2, false);
    formula g = random_formula(seed + 1000, 2, 2, false);
    truth_table to(sys, make_and(make_or(f, g), make_implies(f, g)));
    for (int r = 0; r < (int)sys.runs.size(); ++r)
      for (int c = 0; c < sys.window(); ++c) {
        point pt{r, c};
        bool vf = to.at(pt, f), vg = to.at(pt, g);
        CHECK(to.at(pt, make_or(f, g)) == (vf || vg));
        CHECK(to.at(pt, make_implies(f, g)) == (!vf || vg));
      }
  }
}

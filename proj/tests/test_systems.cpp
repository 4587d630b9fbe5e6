#include "doctest.h"

#include <random>

#include "eltl/axioms.hpp"
#include "eltl/evaluate.hpp"
#include "eltl/properties.hpp"
#include "eltl/system.hpp"
#include "oracles.hpp"

using namespace eltl;

TEST_CASE("canonical positions") {
  lasso_system sys = fixture_nl_prime();  // P=1, Q=2
  CHECK(canonical_position(sys, 0) == 0);
  CHECK(canonical_position(sys, 5) == 1 + ((5 - 1) % 2));
  CHECK(canonical_position(sys, 5) == 1);
  CHECK(canonical_position(sys, 4) == 2);

  lasso_system constant;
  constant.m = 1;
  constant.prefix_len = 0;
  constant.period = 1;
  constant.props = {};
  run_template rt;
  rt.cells.push_back({"e", {"l"}, {}});
  constant.runs.push_back(rt);
  for (long long n : {0, 1, 7, 100})
    CHECK(canonical_position(constant, n) == 0);
}

TEST_CASE("the bundled two-run system") {
  lasso_system fx = fixture_nl_prime();
  CHECK(fx.runs.size() == 2);
  CHECK(fx.m == 1);
  CHECK(fx.at(0, 0).locals[0] == "a");
  CHECK(fx.at(0, 1).locals[0] == "b");
  CHECK(fx.at(0, 2).locals[0] == "c");
  CHECK(fx.at(1, 2).locals[0] == "d");

  CHECK(indistinguishable(fx, {0, 1}, {0, 1}, 1));
  CHECK_FALSE(indistinguishable(fx, {0, 1}, {1, 2}, 1));
  CHECK(indistinguishable(fx, {0, 2}, {1, 1}, 1));
}

TEST_CASE("evaluation on the two-run system") {
  lasso_system fx = fixture_nl_prime();
  formula u = parse("(K1 p) U (K1 q)");
  CHECK(evaluate(fx, {0, 0}, u));
  CHECK_FALSE(evaluate(fx, {0, 0}, make_know(1, u)));
  CHECK_FALSE(evaluate(fx, {1, 0}, parse("q")));
  CHECK(evaluate(fx, {0, 1}, parse("q")));
}

TEST_CASE("validity in a system") {
  lasso_system fx = fixture_nl_prime();
  // K3 instances hold everywhere
  for (uint64_t seed = 0; seed < 20; ++seed) {
    formula inst = instantiate(schema_by_id("K3"),
                               {random_formula(seed, 2, 1, false)}, 1);
    CHECK(valid_in_system(fx, inst).valid);
  }
  // p fails somewhere, with the minimal counterexample
  validity_result v = valid_in_system(fx, parse("p"));
  CHECK_FALSE(v.valid);
  CHECK(v.counterexample.run == 0);
  CHECK(v.counterexample.time == 1);
  // the no-learning axiom shape fails at (r1,0)
  formula kt4 = instantiate(schema_by_id("KT4"), {parse("p"), parse("q")}, 1);
  validity_result v2 = valid_in_system(fx, kt4);
  CHECK_FALSE(v2.valid);
  CHECK(v2.counterexample.run == 0);
  CHECK(v2.counterexample.time == 0);
}

TEST_CASE("indistinguishability is an equivalence on points") {
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    generator_config cfg;
    cfg.seed = seed;
    cfg.target.sync = seed % 2 == 0;
    lasso_system sys = generate_system(cfg);
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 60; ++trial) {
      auto rnd_point = [&]() {
        return point{static_cast<int>(rng() % sys.runs.size()),
                     static_cast<long long>(rng() % (3 * sys.window()))};
      };
      point a = rnd_point(), b = rnd_point(), c = rnd_point();
      agent_id i = 1 + static_cast<int>(rng() % sys.m);
      CHECK(indistinguishable(sys, a, a, i));
      CHECK(indistinguishable(sys, a, b, i) ==
            indistinguishable(sys, b, a, i));
      if (indistinguishable(sys, a, b, i) &&
          indistinguishable(sys, b, c, i))
        CHECK(indistinguishable(sys, a, c, i));
    }
  }
}

TEST_CASE("common knowledge: reachability equals the iterated-E fixpoint") {
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    generator_config cfg;
    cfg.seed = seed;
    cfg.m = 1 + static_cast<int>(seed % 3);
    lasso_system sys = generate_system(cfg);
    formula inner = random_formula(seed * 31 + 7, 2, sys.m, false);
    formula cf = make_common(inner);
    truth_table tt(sys, cf);
    std::vector<uint8_t> iterated = common_by_iterated_everyone(tt, cf);
    for (int r = 0; r < (int)sys.runs.size(); ++r)
      for (int c = 0; c < sys.window(); ++c)
        CHECK(tt.at_cell(r, c, cf) ==
              (iterated[r * sys.window() + c] != 0));
  }
}

TEST_CASE("until unfolds as T3 prescribes") {
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    generator_config cfg;
    cfg.seed = seed;
    lasso_system sys = generate_system(cfg);
    formula a = random_formula(seed * 3 + 1, 2, sys.m, false);
    formula b = random_formula(seed * 7 + 2, 2, sys.m, false);
    formula u = make_until(a, b);
    formula unfolded = make_or(b, make_and(a, make_next(u)));
    truth_table tt(sys, make_and(u, unfolded));
    for (int r = 0; r < (int)sys.runs.size(); ++r)
      for (int c = 0; c < sys.window(); ++c)
        CHECK(tt.at_cell(r, c, u) == tt.at_cell(r, c, unfolded));
  }
}

TEST_CASE("box is the dual of eventually") {
  lasso_system fx = fixture_nl_prime();
  for (uint64_t seed = 0; seed < 20; ++seed) {
    formula f = random_formula(seed, 2, 1, false);
    // structural: G f literally is ~(true U ~f)
    CHECK(make_always(f) == make_not(make_until(make_true(), make_not(f))));
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < fx.window(); ++c)
        CHECK(evaluate(fx, {r, c}, make_always(f)) ==
              !evaluate(fx, {r, c}, make_eventually(make_not(f))));
  }
}

TEST_CASE("truth is canonical: table agrees with unrolled evaluation") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    generator_config cfg;
    cfg.seed = seed;
    cfg.max_runs = 2;
    cfg.max_window = 4;
    cfg.m = 2;
    lasso_system sys = generate_system(cfg);
    long long B = 3 * sys.window();
    formula f = random_formula(seed * 13 + 5, 3, 2, seed % 5 == 0);
    truth_table tt(sys, f);
    eltl_test::unrolled_oracle oracle(sys, B + sys.window());
    for (formula g : tt.subs())
      for (int r = 0; r < (int)sys.runs.size(); ++r)
        for (long long n = 0; n <= B; ++n)
          CHECK(tt.at({r, n}, g) == oracle.eval({r, n}, g));
  }
}

TEST_CASE("uis transformation") {
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    generator_config cfg;
    cfg.seed = seed;
    cfg.target.sync = seed % 3 == 0;
    lasso_system sys = generate_system(cfg);
    lasso_system lifted = uis_transform(sys);
    CHECK(has_uis(lifted).holds);
    CHECK(lifted.clocked == sys.clocked);
    CHECK(lifted.prefix_len == sys.prefix_len + 1);

    formula f = random_formula(seed * 17 + 3, 3, sys.m, false);
    for (int r = 0; r < (int)sys.runs.size(); ++r)
      for (long long n = 0; n <= 2 * sys.window(); ++n)
        CHECK(evaluate(sys, {r, n}, f) == evaluate(lifted, {r, n + 1}, f));

    // transforming a uis system keeps uis
    CHECK(has_uis(uis_transform(lifted)).holds);
  }
}

TEST_CASE("system documents round-trip") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    generator_config cfg;
    cfg.seed = seed;
    cfg.target.sync = seed % 2 == 0;
    cfg.target.pr = seed % 3 == 0;
    lasso_system sys = generate_system(cfg);
    std::string doc = to_json(sys);
    lasso_system back = system_from_json(doc);
    CHECK(to_json(back) == doc);
  }
  CHECK_THROWS_AS(system_from_json("{ not json"), error);
}

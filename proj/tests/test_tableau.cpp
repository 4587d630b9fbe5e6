#include "doctest.h"

#include <set>

#include "eltl/axioms.hpp"
#include "eltl/evaluate.hpp"
#include "eltl/tableau.hpp"

using namespace eltl;

TEST_CASE("atoms of basic closures") {
  std::vector<atom_set> a1 = atoms_of(basic_closure(parse("p"), 1));
  CHECK(a1.size() == 2);

  std::vector<atom_set> a2 = atoms_of(basic_closure(parse("K1 p"), 1));
  REQUIRE(a2.size() == 3);
  std::set<std::vector<std::string>> got;
  for (const auto& a : a2) {
    std::vector<std::string> names;
    for (formula f : a.members) names.push_back(to_string(f));
    got.insert(names);
  }
  CHECK(got.count({"p", "K1 p"}) == 1);
  CHECK(got.count({"p", "~K1 p"}) == 1);
  CHECK(got.count({"~p", "~K1 p"}) == 1);
  CHECK(got.count({"~p", "K1 p"}) == 0);

  CHECK(atoms_of(basic_closure(parse("p U q"), 1)).size() == 5);

  // brute-force subset oracle on a mixed formula
  formula psi = parse("K1 p & X q");
  closure_set cl = basic_closure(psi, 1);
  std::vector<atom_set> atoms = atoms_of(cl);
  // oracle: all subsets of the closure that are maximal and locally sound
  std::vector<formula> bases = cl.base_formulas();
  int count = 0;
  for (uint64_t mask = 0; mask < (uint64_t(1) << bases.size()); ++mask) {
    auto tv = [&](formula f) {
      bool neg = false;
      while (f.kind() == op::not_) {
        f = f.lhs();
        neg = !neg;
      }
      size_t i =
          std::find(bases.begin(), bases.end(), f) - bases.begin();
      bool v = (mask >> i) & 1;
      return neg ? !v : v;
    };
    bool ok = true;
    for (formula f : bases) {
      if (f.kind() == op::and_ && tv(f) != (tv(f.lhs()) && tv(f.rhs())))
        ok = false;
      if (f.kind() == op::know && tv(f) && !tv(f.lhs())) ok = false;
      if (f.kind() == op::until &&
          ((tv(f) && !(tv(f.lhs()) || tv(f.rhs()))) ||
           (!tv(f) && tv(f.rhs()))))
        ok = false;
    }
    if (ok) ++count;
  }
  CHECK((int)atoms.size() == count);
}

TEST_CASE("premodel construction") {
  premodel p1 = build_premodel(parse("p"), 0);
  CHECK(p1.states.size() == 2);
  // no temporal constraints: the relation is total
  CHECK(p1.next[0].size() == 2);
  CHECK(p1.next[1].size() == 2);

  premodel p2 = build_premodel(parse("X p"), 0);
  CHECK(p2.states.size() == 4);
  for (int s = 0; s < 4; ++s) {
    bool has_xp = p2.decides_true(s, parse("X p"));
    for (int t : p2.next[s]) CHECK(p2.decides_true(t, parse("p")) == has_xp);
  }

  premodel p3 = build_premodel(parse("C p"), 0);
  for (int s = 0; s < (int)p3.states.size(); ++s) {
    // every state directly decides Cp, ECp, and K1 Cp
    CHECK_NOTHROW(p3.decides_true(s, parse("C p")));
    CHECK_NOTHROW(p3.decides_true(s, make_everyone(parse("C p"))));
    CHECK_NOTHROW(p3.decides_true(s, make_know(1, parse("C p"))));
  }
}

TEST_CASE("epistemic relations are equivalences on adjacency classes") {
  premodel pm = build_premodel(parse("K1 p & ~K1 q"), 0);
  for (agent_id i = 1; i <= pm.m; ++i) {
    for (int s = 0; s < (int)pm.states.size(); ++s) {
      const auto& cls = pm.epi[i - 1][s];
      CHECK(std::find(cls.begin(), cls.end(), s) != cls.end());
      for (int t : cls) {
        const auto& back = pm.epi[i - 1][t];
        CHECK(std::find(back.begin(), back.end(), s) != back.end());
        for (int u : pm.epi[i - 1][t])
          CHECK(std::find(cls.begin(), cls.end(), u) != cls.end());
      }
    }
  }
}

TEST_CASE("i-adjacent states decide the same knowledge formulas") {
  premodel pm = build_premodel(parse("K1 p & L1 q"), 1);
  for (agent_id i = 1; i <= pm.m; ++i)
    for (int s = 0; s < (int)pm.states.size(); ++s)
      for (int t : pm.epi[i - 1][s]) {
        // both must directly decide exactly the same Ki formulas
        std::set<formula> ks, kt;
        for (formula f : pm.closure_of(s).formulas)
          if (f.kind() == op::know && f.agent() == i) ks.insert(f);
        for (formula f : pm.closure_of(t).formulas)
          if (f.kind() == op::know && f.agent() == i) kt.insert(f);
        CHECK(ks == kt);
      }
}

TEST_CASE("elimination") {
  premodel p1 = build_premodel(parse("p"), 0);
  elimination_trace tr = eliminate(p1);
  CHECK(tr.rounds.empty());
  CHECK(p1.alive_count() == 2);

  // an until that can never be fulfilled dies
  sat_result res = decide_sat(parse("(p U q) & G ~q"));
  CHECK_FALSE(res.satisfiable);

  // elimination terminates within |states| rounds
  premodel p2 = build_premodel(parse("(p U q) & G ~q"), 0);
  elimination_trace tr2 = eliminate(p2);
  CHECK(tr2.rounds.size() <= p2.states.size());
}

TEST_CASE("acceptable extensions") {
  premodel pm = build_premodel(parse("p"), 0);
  eliminate(pm);
  state_lasso l = acceptable_extension(pm, {0});
  CHECK(l.loop.size() >= 1);
  CHECK(l.at(0) == 0);

  // a state with an until obligation reaches its fulfillment
  premodel pm2 = build_premodel(parse("p U q"), 0);
  eliminate(pm2);
  int start = -1;
  for (int s = 0; s < (int)pm2.states.size(); ++s)
    if (pm2.alive[s] && pm2.decides_true(s, parse("p U q")) &&
        !pm2.decides_true(s, parse("q"))) {
      start = s;
      break;
    }
  REQUIRE(start >= 0);
  state_lasso l2 = acceptable_extension(pm2, {start});

  // independent acceptability scan over three laps
  auto scan_acceptable = [&](const premodel& p, const state_lasso& sl) {
    std::vector<formula> untils;
    for (formula f : p.level_closure[0].formulas)
      if (f.kind() == op::until) untils.push_back(f);
    long long len = 3 * (sl.head.size() + sl.loop.size());
    for (long long n = 0; n < len; ++n) {
      // consecutive -> edges
      int cur = sl.at(n), nxt = sl.at(n + 1);
      const auto& succ = p.next[cur];
      if (std::find(succ.begin(), succ.end(), nxt) == succ.end())
        return false;
      for (formula u : untils) {
        if (!p.decides_true(cur, u)) continue;
        bool ok = false;
        for (long long k = n; k < n + 2 * (long long)(sl.head.size() +
                                                      sl.loop.size()) &&
                              !ok;
             ++k) {
          if (p.decides_true(sl.at(k), u.rhs())) {
            ok = true;
            for (long long j = n; j < k; ++j)
              if (!p.decides_true(sl.at(j), u.lhs())) ok = false;
          }
        }
        if (!ok) return false;
      }
    }
    return true;
  };
  CHECK(scan_acceptable(pm2, l2));
  CHECK(scan_acceptable(pm, l));
}

TEST_CASE("satisfiability verdicts with verified models") {
  CHECK_FALSE(decide_sat(parse("p & ~p")).satisfiable);
  CHECK_FALSE(decide_sat(parse("K1 p & ~p")).satisfiable);

  sat_result s = decide_sat(parse("~K1 p & ~K1 ~p"));
  REQUIRE(s.satisfiable);
  REQUIRE(s.model.has_value());
  CHECK(evaluate(*s.model, s.designated, parse("~K1 p & ~K1 ~p")));
  // a tiny brute-force search agrees
  CHECK(bounded_model_search(parse("~K1 p & ~K1 ~p"), 2, 2).has_value());

  sat_result s2 = decide_sat(parse("K1 G p & F ~K1 p"));
  REQUIRE(s2.satisfiable);
  CHECK(evaluate(*s2.model, s2.designated, parse("K1 G p & F ~K1 p")));
}

TEST_CASE("satisfiability across the base classes") {
  formula f = parse("~K1 p & F K1 p");
  for (sat_class cls : {sat_class::all, sat_class::sync, sat_class::uis,
                        sat_class::sync_uis}) {
    sat_result res = decide_sat(f, cls);
    REQUIRE(res.satisfiable);
    CHECK(evaluate(*res.model, res.designated, f));
    if (cls == sat_class::uis || cls == sat_class::sync_uis)
      CHECK(has_uis(*res.model).holds);
    CHECK(res.model->clocked);  // extraction builds clocked systems
  }
}

TEST_CASE("extraction satisfies the truth lemma on the basic closure") {
  for (const char* text :
       {"~K1 p & ~K1 ~p", "p U K1 q", "K1 (p U q) & X ~q"}) {
    formula psi = parse(text);
    sat_result res = decide_sat(psi);
    REQUIRE(res.satisfiable);
    const lasso_system& sys = *res.model;
    premodel pm = build_premodel(psi, 0);
    eliminate(pm);
    closure_set cl = basic_closure(psi, pm.m);
    for (int r = 0; r < (int)sys.runs.size(); ++r)
      for (int c = 0; c < sys.window(); ++c) {
        const std::string& env = sys.at(r, c).env;
        if (env.empty() || env[0] != 's') continue;
        int state = std::stoi(env.substr(1));
        for (formula g : cl.formulas)
          CHECK(evaluate(sys, {r, c}, g) == pm.decides_true(state, g));
      }
  }
}

TEST_CASE("pruned premodel fulfills exactly the until members") {
  premodel pm = build_premodel(parse("(p U q) | (q U p)"), 0);
  eliminate(pm);
  std::vector<formula> untils;
  for (formula f : pm.level_closure[0].formulas)
    if (f.kind() == op::until) untils.push_back(f);
  for (int s = 0; s < (int)pm.states.size(); ++s) {
    if (!pm.alive[s]) continue;
    for (formula u : untils) {
      // u in the atom iff a surviving fulfilling path exists
      bool has_path = false;
      std::vector<int> stack{s};
      std::set<int> seen{s};
      while (!stack.empty() && !has_path) {
        int cur = stack.back();
        stack.pop_back();
        if (pm.decides_true(cur, u.rhs())) {
          has_path = true;
          break;
        }
        if (!pm.decides_true(cur, u.lhs())) continue;
        for (int t : pm.next[cur])
          if (pm.alive[t] && seen.insert(t).second) stack.push_back(t);
      }
      CHECK(pm.decides_true(s, u) == has_path);
    }
  }
}

TEST_CASE("current information") {
  premodel pm = build_premodel(parse("K1 p & q"), 0);
  for (int s = 0; s < (int)pm.states.size(); ++s) {
    auto [idx, content] = current_information(pm, s, 1);
    CHECK(idx == std::vector<agent_id>{1});
    if (pm.decides_true(s, parse("K1 p")))
      CHECK(std::find(content.begin(), content.end(), parse("p")) !=
            content.end());
    else
      CHECK(content.empty());
    // constant across the epistemic class
    for (int t : pm.epi[0][s]) {
      auto [idx2, content2] = current_information(pm, t, 1);
      CHECK(content2 == content);
    }
  }
}

TEST_CASE("phi formulas") {
  premodel pm = build_premodel(parse("K1 p"), 0);
  for (int s = 0; s < (int)pm.states.size(); ++s) {
    // invariance across the class
    for (int t : pm.epi[0][s])
      CHECK(phi_formulas(pm, s, 1, false) == phi_formulas(pm, t, 1, false));
    // singleton class collapses to the state formula
    if (pm.epi[0][s].size() == 1)
      CHECK(phi_formulas(pm, s, 1, false) == state_formula(pm, s));
  }

  // on extracted models, Ki Phi_{s,i} holds at points labeled s
  formula psi = parse("~K1 p & ~K1 ~p");
  sat_result res = decide_sat(psi);
  REQUIRE(res.satisfiable);
  premodel pm2 = build_premodel(psi, 0);
  eliminate(pm2);
  const lasso_system& sys = *res.model;
  for (int r = 0; r < (int)sys.runs.size() && r < 4; ++r)
    for (int c = 0; c < sys.window(); ++c) {
      const std::string& env = sys.at(r, c).env;
      if (env.empty() || env[0] != 's') continue;
      int state = std::stoi(env.substr(1));
      formula phi = phi_formulas(pm2, state, 1, false);
      CHECK(evaluate(sys, {r, c}, make_know(1, phi)));
    }
}

TEST_CASE("unsatisfiable verdicts are corroborated by bounded search") {
  for (const char* text :
       {"p & ~p", "K1 p & ~p", "G p & F ~p", "X p & X ~p",
        "K1 p & K1 (p -> q) & ~K1 q"}) {
    formula f = parse(text);
    CHECK_FALSE(decide_sat(f).satisfiable);
    CHECK_FALSE(bounded_model_search(f, 2, 3).has_value());
  }
}

TEST_CASE("extraction is deterministic") {
  formula f = parse("~K1 p & F K1 p");
  sat_result a = decide_sat(f);
  sat_result b = decide_sat(f);
  REQUIRE(a.satisfiable);
  REQUIRE(b.satisfiable);
  CHECK(to_json(*a.model) == to_json(*b.model));
  CHECK(a.designated.run == b.designated.run);
  CHECK(a.designated.time == b.designated.time);
}

TEST_CASE("premodel documents") {
  premodel pm = build_premodel(parse("K1 p"), 0);
  eliminate(pm);
  std::string doc = premodel_to_json(pm);
  CHECK(doc.find("\"states\"") != std::string::npos);
  CHECK(doc.find("K1 p") != std::string::npos);
}

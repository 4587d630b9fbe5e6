#include "eltl/proofs.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace eltl {

std::vector<std::string> axioms_of_set(const std::string& set_name) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : set_name) {
    if (c == '+') {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.empty() || (parts[0] != "S5U" && parts[0] != "S5CU"))
    throw error("unknown axiom set base: " + set_name);
  std::vector<std::string> ids = {"K1", "K2", "K3", "K4",
                                  "K5", "T1", "T2", "T3"};
  if (parts[0] == "S5CU") {
    ids.push_back("C1");
    ids.push_back("C2");
  }
  for (size_t i = 1; i < parts.size(); ++i) {
    const std::string& e = parts[i];
    bool kt = e == "KT1" || e == "KT2" || e == "KT3" || e == "KT4" ||
              e == "KT5" || e == "NLSU";
    if (!kt) throw error("unknown axiom set extension: " + e);
    ids.push_back(e);
  }
  return ids;
}

namespace {

bool rule_in_set(const std::string& id, const std::string& set_name) {
  if (id == "R1" || id == "R2" || id == "RT1" || id == "RT2") return true;
  if (id == "RC1") return set_name.rfind("S5CU", 0) == 0;
  return false;
}

}  // namespace

check_result check_proof(const proof& p) {
  std::vector<std::string> allowed;
  try {
    allowed = axioms_of_set(p.axiom_set);
  } catch (const error& e) {
    return {false, 0, e.what()};
  }
  auto fail = [](int line, const std::string& reason) {
    return check_result{false, line, reason};
  };
  if (p.lines.empty()) return fail(0, "empty proof");

  for (int li = 1; li <= static_cast<int>(p.lines.size()); ++li) {
    const proof_line& ln = p.lines[li - 1];
    if (!ln.f.valid()) return fail(li, "missing formula");
    switch (ln.kind) {
      case justification_kind::premise: {
        if (li > p.num_premises)
          return fail(li, "premise line outside the declared hypotheses");
        break;
      }
      case justification_kind::axiom: {
        if (std::find(allowed.begin(), allowed.end(), ln.id) == allowed.end())
          return fail(li, "axiom " + ln.id + " is not part of " + p.axiom_set);
        if (ln.id == "K1") {
          bool taut = false;
          try {
            taut = is_propositional_tautology(ln.f);
          } catch (const error& e) {
            return fail(li, e.what());
          }
          if (!taut)
            return fail(li, "not a substitution instance of a tautology");
          break;
        }
        const axiom_schema& schema = schema_by_id(ln.id);
        if (!ln.subst.empty()) {
          formula inst;
          try {
            inst = instantiate(schema, ln.subst, ln.agent, p.agents);
          } catch (const error& e) {
            return fail(li, e.what());
          }
          if (inst != ln.f)
            return fail(li, "formula is not the stated " + ln.id +
                                " instance");
        } else {
          if (!match_schema(ln.f, schema, p.agents))
            return fail(li, "formula does not match schema " + ln.id);
        }
        break;
      }
      case justification_kind::rule: {
        if (!rule_in_set(ln.id, p.axiom_set))
          return fail(li, "rule " + ln.id + " is not part of " + p.axiom_set);
        for (int ref : ln.premises)
          if (ref < 1 || ref >= li)
            return fail(li, "premise reference " + std::to_string(ref) +
                                " does not point strictly backwards");
        auto prem = [&](size_t k) { return p.lines[ln.premises[k] - 1].f; };
        if (ln.id == "R1") {
          if (ln.premises.size() != 2) return fail(li, "R1 needs two premises");
          if (prem(1) != make_implies(prem(0), ln.f))
            return fail(li, "R1 premises do not yield this conclusion");
        } else if (ln.id == "R2") {
          if (ln.premises.size() != 1) return fail(li, "R2 needs one premise");
          if (ln.f.kind() != op::know || ln.f.agent() < 1 ||
              ln.f.agent() > p.agents || ln.f.lhs() != prem(0))
            return fail(li, "R2 conclusion is not Ki of the premise");
        } else if (ln.id == "RT1") {
          if (ln.premises.size() != 1) return fail(li, "RT1 needs one premise");
          if (ln.f != make_next(prem(0)))
            return fail(li, "RT1 conclusion is not X of the premise");
        } else if (ln.id == "RT2") {
          if (ln.premises.size() != 1) return fail(li, "RT2 needs one premise");
          auto impl = as_implies(ln.f);
          if (!impl || impl->second.kind() != op::not_ ||
              impl->second.lhs().kind() != op::until)
            return fail(li, "RT2 conclusion must be f' => ~(f U g)");
          formula fprime = impl->first;
          formula u = impl->second.lhs();
          formula want = make_implies(
              fprime, make_and(make_not(u.rhs()), make_next(fprime)));
          if (prem(0) != want)
            return fail(li, "RT2 premise must be f' => ~g & X f'");
        } else if (ln.id == "RC1") {
          if (ln.premises.size() != 1) return fail(li, "RC1 needs one premise");
          auto impl = as_implies(ln.f);
          if (!impl || impl->second.kind() != op::common)
            return fail(li, "RC1 conclusion must be f => C g");
          formula want = make_implies(
              impl->first,
              make_everyone(make_and(impl->second.lhs(), impl->first)));
          if (prem(0) != want)
            return fail(li, "RC1 premise must be f => E(g & f)");
        } else {
          return fail(li, "unknown rule " + ln.id);
        }
        break;
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Builder.

int proof_builder::premise(formula f) {
  if (static_cast<int>(pf.lines.size()) != pf.num_premises)
    throw error("premises must come first");
  pf.lines.push_back({f, justification_kind::premise, "", {}, 0, {}});
  pf.num_premises++;
  return static_cast<int>(pf.lines.size());
}

int proof_builder::axiom(const std::string& id,
                         const std::vector<formula>& subst, agent_id agent) {
  formula f = instantiate(schema_by_id(id), subst, agent, pf.agents);
  pf.lines.push_back({f, justification_kind::axiom, id, subst, agent, {}});
  return static_cast<int>(pf.lines.size());
}

int proof_builder::tautology(formula f) {
  if (!is_propositional_tautology(f))
    throw error("internal: glue formula is not a tautology: " + to_string(f));
  pf.lines.push_back({f, justification_kind::axiom, "K1", {}, 0, {}});
  return static_cast<int>(pf.lines.size());
}

int proof_builder::rule(const std::string& id, std::vector<int> from,
                        formula f) {
  pf.lines.push_back(
      {f, justification_kind::rule, id, {}, 0, std::move(from)});
  return static_cast<int>(pf.lines.size());
}

int proof_builder::mp(int premise_line, int implication_line) {
  auto impl = as_implies(at(implication_line));
  if (!impl || impl->first != at(premise_line))
    throw error("internal: bad modus ponens");
  return rule("R1", {premise_line, implication_line}, impl->second);
}

int proof_builder::know_mono(int implication_line, agent_id i) {
  auto impl = as_implies(at(implication_line));
  if (!impl) throw error("internal: know_mono needs an implication");
  formula a = impl->first, b = impl->second;
  int l1 = rule("R2", {implication_line}, make_know(i, at(implication_line)));
  int l2 = axiom("K2", {a, b}, i);
  formula goal = make_implies(make_know(i, a), make_know(i, b));
  int l3 = tautology(make_implies(at(l1), make_implies(at(l2), goal)));
  int l4 = mp(l1, l3);
  return mp(l2, l4);
}

int proof_builder::next_mono(int implication_line) {
  auto impl = as_implies(at(implication_line));
  if (!impl) throw error("internal: next_mono needs an implication");
  formula a = impl->first, b = impl->second;
  int l1 = rule("RT1", {implication_line}, make_next(at(implication_line)));
  int l2 = axiom("T1", {a, b});
  formula goal = make_implies(make_next(a), make_next(b));
  int l3 = tautology(make_implies(at(l1), make_implies(at(l2), goal)));
  int l4 = mp(l1, l3);
  return mp(l2, l4);
}

int proof_builder::chain(int ab_line, int bc_line) {
  auto ab = as_implies(at(ab_line));
  auto bc = as_implies(at(bc_line));
  if (!ab || !bc || ab->second != bc->first)
    throw error("internal: bad chain");
  formula goal = make_implies(ab->first, bc->second);
  int l1 = tautology(
      make_implies(at(ab_line), make_implies(at(bc_line), goal)));
  int l2 = mp(ab_line, l1);
  return mp(bc_line, l2);
}

// ---------------------------------------------------------------------------
// Derived rule library.

proof until_negation_template(formula alpha, formula beta, formula gamma,
                              const std::string& axiom_set) {
  proof_builder b(axiom_set);
  formula u = make_until(beta, gamma);
  formula blind = make_and(make_not(beta), make_not(gamma));  // ~b & ~g
  formula step = make_next(make_or(alpha, blind));
  int p1 = b.premise(make_implies(alpha, make_not(gamma)));
  int p2 = b.premise(make_implies(alpha, step));
  int t3 = b.axiom("T3", {beta, gamma});

  formula v = make_and(alpha, u);
  formula xu = make_next(u);
  // V => ~g & (XU & X(alpha | blind))
  formula stage1 = make_implies(v, make_and(make_not(gamma),
                                            make_and(xu, step)));
  int s1 = b.tautology(make_implies(
      b.at(p1), make_implies(b.at(p2), make_implies(b.at(t3), stage1))));
  int s2 = b.mp(p1, s1);
  int s3 = b.mp(p2, s2);
  int s4 = b.mp(t3, s3);

  // U => ~blind, pushed through X.
  int s5 = b.tautology(
      make_implies(b.at(t3), make_implies(u, make_not(blind))));
  int s6 = b.mp(t3, s5);
  int s7 = b.next_mono(s6);

  // (alpha | blind) => (U => (~blind => V)), pushed through X, then T1 twice.
  formula inner = make_implies(u, make_implies(make_not(blind), v));
  int c1 = b.tautology(make_implies(make_or(alpha, blind), inner));
  int c2 = b.next_mono(c1);
  int t1a = b.axiom("T1", {u, make_implies(make_not(blind), v)});
  int t1b = b.axiom("T1", {make_not(blind), v});

  formula goal_premise = make_implies(v, make_and(make_not(gamma),
                                                  make_next(v)));
  int big = b.tautology(make_implies(
      b.at(s4),
      make_implies(
          b.at(s7),
          make_implies(b.at(c2),
                       make_implies(b.at(t1a),
                                    make_implies(b.at(t1b), goal_premise))))));
  int w0 = b.mp(s4, big);
  int w1 = b.mp(s7, w0);
  int w2 = b.mp(c2, w1);
  int w3 = b.mp(t1a, w2);
  int w4 = b.mp(t1b, w3);
  int w5 = b.rule("RT2", {w4}, make_implies(v, make_not(u)));
  int w6 = b.tautology(
      make_implies(b.at(w5), make_implies(alpha, make_not(u))));
  b.mp(w5, w6);
  return b.pf;
}

namespace {

// |- Gf => X Gf, where Gf is ~(true U ~f).  Returns the line index.
int box_step(proof_builder& b, formula f) {
  formula a = make_until(make_true(), make_not(f));  // F ~f
  formula boxf = make_not(a);
  int t3 = b.axiom("T3", {make_true(), make_not(f)});
  int k1 = b.tautology(make_implies(
      b.at(t3), make_implies(boxf, make_not(make_next(a)))));
  int s1 = b.mp(t3, k1);
  int t2 = b.axiom("T2", {a});
  int k2 = b.tautology(make_implies(
      b.at(t2),
      make_implies(b.at(s1), make_implies(boxf, make_next(boxf)))));
  int s2 = b.mp(t2, k2);
  return b.mp(s1, s2);
}

// |- Gf => f.
int box_elim(proof_builder& b, formula f) {
  formula a = make_until(make_true(), make_not(f));
  int t3 = b.axiom("T3", {make_true(), make_not(f)});
  int k1 = b.tautology(
      make_implies(b.at(t3), make_implies(make_not(a), f)));
  return b.mp(t3, k1);
}

// |- Gf => GGf via RT2.
int box_intro_idem(proof_builder& b, formula f) {
  formula boxf = make_always(f);
  int step = box_step(b, f);  // Gf => X Gf
  formula psi = make_not(boxf);
  formula prem = make_implies(boxf, make_and(make_not(psi), make_next(boxf)));
  int g1 = b.tautology(make_implies(b.at(step), prem));
  int g2 = b.mp(step, g1);
  return b.rule("RT2", {g2},
                make_implies(boxf, make_not(make_until(make_true(), psi))));
}

}  // namespace

proof box_idempotence_proof(formula f, const std::string& axiom_set) {
  proof_builder b(axiom_set);
  formula boxf = make_always(f);
  formula boxboxf = make_always(boxf);
  int fwd = box_intro_idem(b, f);          // Gf => GGf
  int bwd = box_elim(b, boxf);             // GGf => Gf
  formula both = make_and(b.at(fwd), b.at(bwd));
  int g = b.tautology(make_implies(
      b.at(fwd), make_implies(b.at(bwd), both)));
  int h = b.mp(fwd, g);
  b.mp(bwd, h);
  (void)boxboxf;  // documented: fwd ends in G G f, bwd starts from it
  return b.pf;
}

proof know_distribution_template(formula a, formula bf, agent_id i,
                                 const std::string& axiom_set) {
  proof_builder b(axiom_set, i);
  int p1 = b.premise(make_implies(a, bf));
  b.know_mono(p1, i);
  return b.pf;
}

// ---------------------------------------------------------------------------
// The KT1-from-KT3 fixture.

namespace {

struct kt1_landmarks {
  int kt3_line = 0;     // the KT3 axiom instance
  int t2_line = 0;      // a T2 instance
  int rt2_final = 0;    // the concluding RT2 line
  int k1_sample = 0;    // a representative K1 glue line
  int r2_sample = 0;    // the first R2 line
  int p2_line = 0;      // K1 Gp => X K1 Gp
};

proof build_kt1(kt1_landmarks* lm) {
  proof_builder b("S5U+KT3", 1);
  const agent_id ag = 1;
  formula p = make_prop("p");
  formula t = make_true();
  formula A = make_until(t, make_not(p));  // F ~p
  formula boxp = make_not(A);              // G p
  formula B2 = make_until(t, make_not(boxp));
  formula boxboxp = make_not(B2);          // G G p

  // I. basics
  int l_t = b.tautology(t);
  int l_kt = b.rule("R2", {l_t}, make_know(ag, t));
  if (lm) lm->r2_sample = l_kt;
  int l_xkt = b.rule("RT1", {l_kt}, make_next(make_know(ag, t)));

  // II. Gp => X Gp
  int f1 = b.axiom("T3", {t, make_not(p)});
  int f2 = b.tautology(make_implies(
      b.at(f1), make_implies(boxp, make_not(make_next(A)))));
  if (lm) lm->k1_sample = f2;
  int f3 = b.mp(f1, f2);
  int f4 = b.axiom("T2", {A});
  if (lm) lm->t2_line = f4;
  int f5 = b.tautology(make_implies(
      b.at(f4), make_implies(b.at(f3),
                             make_implies(boxp, make_next(boxp)))));
  int f6 = b.mp(f4, f5);
  int F = b.mp(f3, f6);

  // III. Gp => GGp
  formula prem3 = make_implies(
      boxp, make_and(make_not(make_not(boxp)), make_next(boxp)));
  int g1 = b.tautology(make_implies(b.at(F), prem3));
  int g2 = b.mp(F, g1);
  int g3 = b.rule("RT2", {g2}, make_implies(boxp, boxboxp));

  // IV. GGp => Gp
  int h1 = b.axiom("T3", {t, make_not(boxp)});
  int h2 = b.tautology(
      make_implies(b.at(h1), make_implies(boxboxp, boxp)));
  int h3 = b.mp(h1, h2);

  // V. KT3 with both knowledge slots filled by true, third by Gp
  int kt3 = b.axiom("KT3", {t, t, boxp}, ag);
  if (lm) lm->kt3_line = kt3;
  formula D = make_not(make_know(ag, boxp));          // ~K1 Gp
  formula kt_and_d = make_and(make_know(ag, t), D);
  formula chi2 = make_until(make_know(ag, t), make_not(boxp));
  formula chi = make_until(make_know(ag, t), chi2);

  // X~K1Gp => X(K1true & ~K1Gp)
  int c1 = b.tautology(
      make_implies(make_know(ag, t), make_implies(D, kt_and_d)));
  int c2 = b.next_mono(c1);
  int c3 = b.mp(l_xkt, c2);
  int c4 = b.axiom("T1", {D, kt_and_d});
  int c5 = b.tautology(make_implies(
      b.at(c3),
      make_implies(b.at(c4), make_implies(make_next(D),
                                          make_next(kt_and_d)))));
  int c6 = b.mp(c3, c5);
  int c7 = b.mp(c4, c6);

  // X~K1Gp => K1true & X(K1true & ~K1Gp), then KT3 fires
  formula kt3_antecedent =
      make_and(make_know(ag, t), make_next(kt_and_d));
  int a1 = b.tautology(make_implies(
      b.at(l_kt),
      make_implies(b.at(c7),
                   make_implies(make_next(D), kt3_antecedent))));
  int a2 = b.mp(l_kt, a1);
  int a3 = b.mp(c7, a2);
  int a6 = b.chain(a3, kt3);  // X~K1Gp => L1 chi

  // IX. GGp => ~chi2 and GGp => ~chi
  int f2b = b.tautology(make_implies(
      b.at(h1), make_implies(boxboxp, make_not(make_next(B2)))));
  int f3b = b.mp(h1, f2b);
  int f4b = b.axiom("T2", {B2});
  int f5b = b.tautology(make_implies(
      b.at(f4b), make_implies(b.at(f3b),
                              make_implies(boxboxp, make_next(boxboxp)))));
  int f6b = b.mp(f4b, f5b);
  int F2 = b.mp(f3b, f6b);  // GGp => X GGp

  formula prem_i = make_implies(
      boxboxp,
      make_and(make_not(make_not(boxp)), make_next(boxboxp)));
  int i1 = b.tautology(
      make_implies(b.at(h3), make_implies(b.at(F2), prem_i)));
  int i2 = b.mp(h3, i1);
  int i3 = b.mp(F2, i2);
  int i4 = b.rule("RT2", {i3},
                  make_implies(boxboxp, make_not(chi2)));

  formula prem_j = make_implies(
      boxboxp, make_and(make_not(chi2), make_next(boxboxp)));
  int j1 = b.tautology(
      make_implies(b.at(i4), make_implies(b.at(F2), prem_j)));
  int j2 = b.mp(i4, j1);
  int j3 = b.mp(F2, j2);
  int j4 = b.rule("RT2", {j3}, make_implies(boxboxp, make_not(chi)));

  // X. X~K1Gp => ~K1 GGp
  int x1 = b.know_mono(j4, ag);  // K1 GGp => K1 ~chi
  int x2 = b.tautology(make_implies(
      b.at(a6),
      make_implies(b.at(x1),
                   make_implies(make_next(D),
                                make_not(make_know(ag, boxboxp))))));
  int x3 = b.mp(a6, x2);
  int x4 = b.mp(x1, x3);

  // XI. K1 Gp => X K1 Gp
  int y1 = b.axiom("T2", {make_know(ag, boxp)});
  int y2 = b.know_mono(g3, ag);  // K1 Gp => K1 GGp
  formula p2goal =
      make_implies(make_know(ag, boxp), make_next(make_know(ag, boxp)));
  int z1 = b.tautology(make_implies(
      b.at(x4),
      make_implies(b.at(y1), make_implies(b.at(y2), p2goal))));
  int z2 = b.mp(x4, z1);
  int z3 = b.mp(y1, z2);
  int P2 = b.mp(y2, z3);
  if (lm) lm->p2_line = P2;

  // XII. K1 Gp => K1 p
  int p1 = b.tautology(
      make_implies(b.at(f1), make_implies(boxp, p)));
  int p2 = b.mp(f1, p1);
  int P1 = b.know_mono(p2, ag);

  // XIII. RT2 closes KT1
  formula prem_q = make_implies(
      make_know(ag, boxp),
      make_and(make_not(make_not(make_know(ag, p))),
               make_next(make_know(ag, boxp))));
  int q1 = b.tautology(
      make_implies(b.at(P1), make_implies(b.at(P2), prem_q)));
  int q2 = b.mp(P1, q1);
  int q3 = b.mp(P2, q2);
  int fin = b.rule(
      "RT2", {q3},
      make_implies(make_know(ag, boxp),
                   make_not(make_until(t, make_not(make_know(ag, p))))));
  if (lm) lm->rt2_final = fin;
  return b.pf;
}

}  // namespace

proof kt1_from_kt3_proof() { return build_kt1(nullptr); }

std::vector<named_proof> derived_rule_library() {
  formula p = make_prop("p");
  formula q = make_prop("q");
  std::vector<named_proof> out;
  out.push_back({"until-negation, alpha=beta=gamma=p",
                 until_negation_template(p, p, p)});
  out.push_back({"until-negation, mixed arguments",
                 until_negation_template(make_and(p, q), make_next(p),
                                         make_until(p, q))});
  out.push_back({"box idempotence", box_idempotence_proof(p)});
  out.push_back(
      {"knowledge distribution", know_distribution_template(p, q, 1)});
  return out;
}

std::vector<proof_mutation> kt1_mutation_catalog() {
  kt1_landmarks lm;
  proof good = build_kt1(&lm);
  std::vector<proof_mutation> out;
  auto add = [&](const std::string& name, int line,
                 const std::function<void(proof&)>& corrupt) {
    proof m = good;
    corrupt(m);
    out.push_back({name, std::move(m), line});
  };
  formula p = make_prop("p");
  formula q = make_prop("q");
  int n = static_cast<int>(good.lines.size());

  // formula tweaks
  add("final formula proves q instead of p", lm.rt2_final, [&](proof& m) {
    auto& ln = m.lines[lm.rt2_final - 1];
    ln.f = make_implies(make_know(1, make_always(q)),
                        make_not(make_until(make_true(),
                                            make_not(make_know(1, q)))));
  });
  add("final conclusion until arguments swapped", lm.rt2_final, [&](proof& m) {
    auto& ln = m.lines[lm.rt2_final - 1];
    formula u = make_until(make_not(make_know(1, p)), make_true());
    ln.f = make_implies(make_know(1, make_always(p)), make_not(u));
  });
  add("KT3 instance third slot replaced", lm.kt3_line, [&](proof& m) {
    auto& ln = m.lines[lm.kt3_line - 1];
    ln.f = instantiate(schema_by_id("KT3"),
                       {make_true(), make_true(), q}, 1, 1);
  });
  add("T2 instance direction broken", lm.t2_line, [&](proof& m) {
    auto& ln = m.lines[lm.t2_line - 1];
    // only one implication of the biconditional
    formula a = ln.subst[0];
    ln.f = make_implies(make_next(make_not(a)), make_not(make_next(a)));
  });
  add("K1 glue replaced by a non-tautology", lm.k1_sample, [&](proof& m) {
    m.lines[lm.k1_sample - 1].f = make_implies(p, q);
  });
  add("tautology line claims KT3 justification", lm.k1_sample, [&](proof& m) {
    m.lines[lm.k1_sample - 1].id = "KT3";
    m.lines[lm.k1_sample - 1].subst = {p, p, p};
    m.lines[lm.k1_sample - 1].agent = 1;
  });

  // rule swaps
  add("R2 swapped for RT1", lm.r2_sample, [&](proof& m) {
    m.lines[lm.r2_sample - 1].id = "RT1";
  });
  add("RT1 swapped for R2", lm.r2_sample + 1, [&](proof& m) {
    m.lines[lm.r2_sample].id = "R2";
  });
  add("final RT2 swapped for R1", lm.rt2_final, [&](proof& m) {
    auto& ln = m.lines[lm.rt2_final - 1];
    ln.id = "R1";
    ln.premises.push_back(1);
  });
  add("RT2 premise reference shuffled", lm.rt2_final, [&](proof& m) {
    m.lines[lm.rt2_final - 1].premises = {1};
  });

  // reference corruption
  add("dangling forward reference", lm.rt2_final, [&](proof& m) {
    m.lines[lm.rt2_final - 1].premises = {n + 5};
  });
  add("self reference", lm.rt2_final, [&](proof& m) {
    m.lines[lm.rt2_final - 1].premises = {lm.rt2_final};
  });
  add("zero reference", lm.rt2_final, [&](proof& m) {
    m.lines[lm.rt2_final - 1].premises = {0};
  });

  // axiom set abuse
  add("axiom outside the declared set", lm.kt3_line, [&](proof& m) {
    auto& ln = m.lines[lm.kt3_line - 1];
    ln.id = "KT4";
    ln.subst = {make_true(), make_true()};
    ln.f = instantiate(schema_by_id("KT4"), ln.subst, 1, 1);
  });
  add("axiom set downgraded to S5U", lm.kt3_line, [&](proof& m) {
    m.axiom_set = "S5U";
  });
  add("hypothesis smuggled into a closed proof", 1, [&](proof& m) {
    m.lines[0].kind = justification_kind::premise;
    m.lines[0].id.clear();
  });

  // substitution corruption
  add("stated substitution mismatches the formula", lm.kt3_line,
      [&](proof& m) {
        m.lines[lm.kt3_line - 1].subst = {make_true(), q, make_always(p)};
      });
  add("agent index corrupted on K2 instance", 0, [&](proof& m) {
    for (auto& ln : m.lines)
      if (ln.kind == justification_kind::axiom && ln.id == "K2") {
        ln.agent = 2;  // proof declares a single agent
        break;
      }
  });
  // locate the K2 line for the expected index
  for (size_t i = 0; i < good.lines.size(); ++i)
    if (good.lines[i].kind == justification_kind::axiom &&
        good.lines[i].id == "K2") {
      out.back().expected_line = static_cast<int>(i) + 1;
      break;
    }

  add("modus ponens premises swapped", 0, [&](proof& m) {
    for (auto& ln : m.lines)
      if (ln.kind == justification_kind::rule && ln.id == "R1") {
        std::swap(ln.premises[0], ln.premises[1]);
        break;
      }
  });
  for (size_t i = 0; i < good.lines.size(); ++i)
    if (good.lines[i].kind == justification_kind::rule &&
        good.lines[i].id == "R1") {
      out.back().expected_line = static_cast<int>(i) + 1;
      break;
    }

  add("RT2 fed the half-assembled premise", lm.rt2_final, [&](proof& m) {
    // point one line earlier: an implication, but not of the ~g & X f' shape
    auto& ln = m.lines[lm.rt2_final - 1];
    ln.premises[0] = ln.premises[0] - 1;
  });
  add("conclusion weakened to the premise", lm.rt2_final, [&](proof& m) {
    m.lines[lm.rt2_final - 1].f =
        m.lines[m.lines[lm.rt2_final - 1].premises[0] - 1].f;
  });
  add("first line altered to an invalid tautology claim", 1, [&](proof& m) {
    m.lines[0].f = p;
  });
  add("truncated proof reuses a later reference", lm.p2_line, [&](proof& m) {
    // make an R1 line reference a line after itself
    auto& ln = m.lines[lm.p2_line - 1];
    if (ln.kind == justification_kind::rule && !ln.premises.empty())
      ln.premises[0] = lm.rt2_final;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Proof file format.

namespace {

std::string justification_text(const proof_line& ln) {
  std::ostringstream os;
  switch (ln.kind) {
    case justification_kind::premise:
      os << "BY PREMISE";
      break;
    case justification_kind::axiom: {
      os << "BY AXIOM " << ln.id;
      bool first = true;
      for (size_t k = 0; k < ln.subst.size(); ++k) {
        os << (first ? " WITH " : ", ");
        first = false;
        os << "P" << (k + 1) << "=\"" << to_string(ln.subst[k]) << "\"";
      }
      if (ln.agent > 0) {
        os << (first ? " WITH " : ", ");
        os << "i=" << ln.agent;
      }
      break;
    }
    case justification_kind::rule: {
      os << "BY " << ln.id;
      for (size_t k = 0; k < ln.premises.size(); ++k)
        os << (k == 0 ? " FROM " : ", ") << ln.premises[k];
      break;
    }
  }
  return os.str();
}

}  // namespace

std::string proof_to_text(const proof& p) {
  std::ostringstream os;
  os << "system: " << p.axiom_set << "\n";
  os << "agents: " << p.agents << "\n";
  if (p.num_premises > 0) os << "premises: " << p.num_premises << "\n";
  for (size_t i = 0; i < p.lines.size(); ++i)
    os << (i + 1) << ". \"" << to_string(p.lines[i].f) << "\" "
       << justification_text(p.lines[i]) << "\n";
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

proof proof_from_text(const std::string& text) {
  proof p;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto starts = [&](const char* w) { return line.rfind(w, 0) == 0; };
    if (starts("system:")) {
      p.axiom_set = trim(line.substr(7));
      continue;
    }
    if (starts("agents:")) {
      p.agents = std::stoi(trim(line.substr(7)));
      continue;
    }
    if (starts("premises:")) {
      p.num_premises = std::stoi(trim(line.substr(9)));
      continue;
    }
    // <n>. "<formula>" BY ...
    size_t dot = line.find('.');
    if (dot == std::string::npos)
      throw error("proof line " + std::to_string(lineno) +
                  ": missing line number");
    size_t q1 = line.find('"', dot);
    size_t q2 = line.find('"', q1 + 1);
    if (q1 == std::string::npos || q2 == std::string::npos)
      throw error("proof line " + std::to_string(lineno) +
                  ": missing quoted formula");
    proof_line ln;
    ln.f = parse(line.substr(q1 + 1, q2 - q1 - 1));
    std::string rest = trim(line.substr(q2 + 1));
    if (rest.rfind("BY ", 0) != 0)
      throw error("proof line " + std::to_string(lineno) + ": missing BY");
    rest = trim(rest.substr(3));
    if (rest == "PREMISE") {
      ln.kind = justification_kind::premise;
    } else if (rest.rfind("AXIOM ", 0) == 0) {
      ln.kind = justification_kind::axiom;
      rest = trim(rest.substr(6));
      size_t sp = rest.find(' ');
      ln.id = sp == std::string::npos ? rest : rest.substr(0, sp);
      size_t with = rest.find("WITH");
      if (with != std::string::npos) {
        std::string args = rest.substr(with + 4);
        // P<k>="..."  and  i=<n>, comma separated
        size_t pos = 0;
        while (pos < args.size()) {
          size_t eq = args.find('=', pos);
          if (eq == std::string::npos) break;
          std::string key = trim(args.substr(pos, eq - pos));
          if (!key.empty() && key[0] == ',') key = trim(key.substr(1));
          if (key == "i") {
            size_t end = args.find(',', eq);
            std::string num = trim(
                args.substr(eq + 1, end == std::string::npos
                                        ? std::string::npos
                                        : end - eq - 1));
            ln.agent = std::stoi(num);
            pos = end == std::string::npos ? args.size() : end + 1;
          } else if (!key.empty() && key[0] == 'P') {
            int k = std::stoi(key.substr(1));
            size_t fq1 = args.find('"', eq);
            size_t fq2 = args.find('"', fq1 + 1);
            if (fq1 == std::string::npos || fq2 == std::string::npos)
              throw error("proof line " + std::to_string(lineno) +
                          ": bad substitution");
            if (static_cast<int>(ln.subst.size()) < k) ln.subst.resize(k);
            ln.subst[k - 1] = parse(args.substr(fq1 + 1, fq2 - fq1 - 1));
            pos = fq2 + 1;
          } else {
            throw error("proof line " + std::to_string(lineno) +
                        ": bad WITH key '" + key + "'");
          }
        }
      }
    } else {
      ln.kind = justification_kind::rule;
      size_t from = rest.find("FROM");
      ln.id = trim(from == std::string::npos ? rest : rest.substr(0, from));
      if (from != std::string::npos) {
        std::string refs = rest.substr(from + 4);
        std::istringstream rs(refs);
        std::string tok;
        while (std::getline(rs, tok, ',')) {
          tok = trim(tok);
          if (!tok.empty()) ln.premises.push_back(std::stoi(tok));
        }
      }
    }
    p.lines.push_back(ln);
  }
  if (p.lines.empty()) throw error("proof file has no lines");
  return p;
}

proof load_proof_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open proof file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return proof_from_text(ss.str());
}

void save_proof_file(const proof& p, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw error("cannot write proof file: " + path);
    out << proof_to_text(p);
  }
  std::rename(tmp.c_str(), path.c_str());
}

}  // namespace eltl

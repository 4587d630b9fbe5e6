// Command-line workbench for linear-time epistemic temporal logic over
// finitely represented interpreted systems.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "eltl/axioms.hpp"
#include "eltl/evaluate.hpp"
#include "eltl/ktrees.hpp"
#include "eltl/proofs.hpp"
#include "eltl/properties.hpp"
#include "eltl/system.hpp"
#include "eltl/tableau.hpp"

namespace {

using namespace eltl;

point parse_point(const std::string& text) {
  // r<run>,<time>, runs 1-based
  size_t comma = text.find(',');
  if (comma == std::string::npos || text.empty() || text[0] != 'r')
    throw error("point must look like r1,0");
  point pt;
  pt.run = std::stoi(text.substr(1, comma - 1)) - 1;
  pt.time = std::stoll(text.substr(comma + 1));
  return pt;
}

class_spec parse_class(const std::string& text) {
  class_spec spec;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok == "pr")
      spec.pr = true;
    else if (tok == "nl")
      spec.nl = true;
    else if (tok == "sync")
      spec.sync = true;
    else if (tok == "uis")
      spec.uis = true;
    else if (tok == "all" || tok.empty())
      ;
    else
      throw error("unknown class component: " + tok);
  }
  return spec;
}

int cmd_eval(const std::string& system_path, const std::string& point_text,
             const std::string& formula_text, bool doc) {
  lasso_system sys = load_system_file(system_path);
  formula f = parse(formula_text);
  point pt = parse_point(point_text);
  bool v = evaluate(sys, pt, f);
  if (doc) {
    nlohmann::ordered_json j;
    j["formula"] = to_string(f);
    j["point"] = {{"run", pt.run + 1}, {"time", pt.time}};
    j["value"] = v;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (v ? "true" : "false") << "\n";
  }
  return 0;
}

int cmd_classify(const std::string& system_path, long long horizon,
                 bool doc) {
  lasso_system sys = load_system_file(system_path);
  class_spec spec = classify(sys, horizon);
  if (doc) {
    nlohmann::ordered_json j;
    j["pr"] = spec.pr;
    j["nl"] = spec.nl;
    j["nl_prime"] = spec.nl_prime;
    j["sync"] = spec.sync;
    j["uis"] = spec.uis;
    nlohmann::ordered_json reports = nlohmann::ordered_json::array();
    auto add_report = [&](const property_report& rep) {
      nlohmann::ordered_json r;
      r["property"] = rep.property;
      if (rep.agent > 0) r["agent"] = rep.agent;
      r["holds"] = rep.holds;
      r["horizon"] = rep.horizon;
      if (rep.counterexample) {
        const auto& cx = *rep.counterexample;
        r["violated"] = cx.clause;
        r["points"] = {{"run", cx.a.run + 1},
                       {"time", cx.a.time},
                       {"run2", cx.b.run + 1},
                       {"time2", cx.b.time}};
        if (cx.k >= 0) r["k"] = cx.k;
      }
      reports.push_back(r);
    };
    for (agent_id i = 1; i <= sys.m; ++i) {
      add_report(has_perfect_recall(sys, i, pr_mode::definition, horizon));
      add_report(has_no_learning(sys, i, nl_mode::definition, horizon));
      add_report(has_no_learning_prime(sys, i, horizon));
    }
    add_report(is_synchronous(sys, horizon));
    add_report(has_uis(sys));
    j["reports"] = reports;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << spec.to_string() << "\n";
    for (agent_id i = 1; i <= sys.m; ++i) {
      std::cout << render_report(has_perfect_recall(sys, i, pr_mode::definition,
                                                    horizon))
                << "\n";
      std::cout << render_report(
                       has_no_learning(sys, i, nl_mode::definition, horizon))
                << "\n";
      std::cout << render_report(has_no_learning_prime(sys, i, horizon))
                << "\n";
    }
    std::cout << render_report(is_synchronous(sys, horizon)) << "\n";
    std::cout << render_report(has_uis(sys)) << "\n";
  }
  return 0;
}

int cmd_axioms(const std::string& class_text, const std::string& schemas_text,
               int trials, int instantiations, uint64_t seed, int runs,
               int window, int m, int props) {
  class_spec target = parse_class(class_text);
  std::vector<std::string> ids;
  std::istringstream in(schemas_text);
  std::string tok;
  while (std::getline(in, tok, ',')) ids.push_back(tok);
  generator_config bounds;
  bounds.max_runs = runs;
  bounds.max_window = window;
  bounds.m = m;
  bounds.num_props = props;
  bounds.seed = seed;
  soundness_report rep =
      soundness_suite(target, ids, trials, instantiations, bounds);
  for (const auto& line : rep.lines) std::cout << line << "\n";
  if (!rep.ok()) {
    for (const auto& v : rep.violations) {
      std::cout << "violation: " << v.schema << " trial " << v.trial
                << " instance " << v.instantiation << " at (r"
                << v.where.run + 1 << "," << v.where.time << ")\n";
      std::cout << "  formula: " << to_string(v.instance) << "\n";
      std::string path = "violation_" + v.schema + "_" +
                         std::to_string(v.trial) + ".json";
      save_system_file(v.system, path);
      std::cout << "  system dumped to " << path << "\n";
    }
    return 1;
  }
  std::cout << "all sweeps clean\n";
  return 0;
}

int cmd_sat(const std::string& formula_text, const std::string& class_text,
            const std::string& model_out, const std::string& premodel_out) {
  formula f = parse(formula_text);
  sat_class cls = sat_class::all;
  if (class_text == "sync")
    cls = sat_class::sync;
  else if (class_text == "uis")
    cls = sat_class::uis;
  else if (class_text == "sync_uis")
    cls = sat_class::sync_uis;
  else if (class_text != "all")
    throw error("unknown sat class: " + class_text);

  if (!premodel_out.empty()) {
    premodel pm = build_premodel(f, 0);
    eliminate(pm);
    std::ofstream out(premodel_out);
    out << premodel_to_json(pm) << "\n";
  }
  sat_result res = decide_sat(f, cls);
  if (!res.satisfiable) {
    std::cout << "UNSAT\n";
    return 0;
  }
  std::cout << "SAT (verified at r" << res.designated.run + 1 << ","
            << res.designated.time << ")\n";
  if (!res.note.empty()) std::cout << "note: " << res.note << "\n";
  if (!model_out.empty()) {
    save_system_file(*res.model, model_out);
    std::cout << "model written to " << model_out << "\n";
  }
  return 0;
}

int cmd_prove(const std::string& path) {
  proof p = load_proof_file(path);
  check_result res = check_proof(p);
  if (res.ok) {
    std::cout << "accepted (" << p.lines.size() << " lines)\n";
    return 0;
  }
  std::cout << "rejected at line " << res.line << ": " << res.reason << "\n";
  return 1;
}

int cmd_fixtures(const std::string& dir) {
  std::string sys_path = dir + "/fixture_nl_prime.json";
  save_system_file(fixture_nl_prime(), sys_path);
  std::cout << "wrote " << sys_path << "\n";
  std::string proof_path = dir + "/kt1_from_kt3.proof";
  save_proof_file(kt1_from_kt3_proof(), proof_path);
  std::cout << "wrote " << proof_path << "\n";
  return 0;
}

int cmd_gen(const std::string& class_text, uint64_t seed, int runs,
            int window, int m, int props, const std::string& out) {
  generator_config cfg;
  cfg.target = parse_class(class_text);
  cfg.seed = seed;
  cfg.max_runs = runs;
  cfg.max_window = window;
  cfg.m = m;
  cfg.num_props = props;
  lasso_system sys = generate_system(cfg);
  if (out.empty())
    std::cout << to_json(sys) << "\n";
  else {
    save_system_file(sys, out);
    std::cout << "wrote " << out << " " << classify(sys).to_string() << "\n";
  }
  return 0;
}

premodel premodel_for(const std::string& formula_text, int max_d) {
  formula f = parse(formula_text);
  premodel pm = build_premodel(f, max_d);
  eliminate(pm);
  return pm;
}

int cmd_trees_validate_tree(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw error("cannot open " + file);
  nlohmann::json j;
  in >> j;
  premodel pm = premodel_for(j.at("psi").get<std::string>(),
                             j.value("k", 1));
  std::vector<int> states = j.at("states").get<std::vector<int>>();
  clause_check res = is_ktree(pm, states, j.value("k", 1));
  if (res.ok) {
    std::cout << "valid k-tree\n";
    return 0;
  }
  std::cout << "not a k-tree: " << res.clause << "\n";
  return 1;
}

int cmd_trees_validate_step(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw error("cannot open " + file);
  nlohmann::json j;
  in >> j;
  premodel pm = premodel_for(j.at("psi").get<std::string>(),
                             j.value("k", 1));
  tree_step step;
  step.source = j.at("source").get<std::vector<int>>();
  step.target = j.at("target").get<std::vector<int>>();
  for (auto& [key, value] : j.at("f").items())
    step.f[std::stoi(key)] = value.get<std::vector<int>>();
  clause_check res = check_tree_step(pm, step, j.value("k", 1));
  if (res.ok) {
    std::cout << "valid tree step\n";
    return 0;
  }
  std::cout << "invalid tree step: " << res.clause << "\n";
  return 1;
}

int cmd_trees_formula(const std::string& file, int state) {
  std::ifstream in(file);
  if (!in) throw error("cannot open " + file);
  nlohmann::json j;
  in >> j;
  premodel pm = premodel_for(j.at("psi").get<std::string>(),
                             j.value("k", 1));
  std::vector<int> states = j.at("states").get<std::vector<int>>();
  std::cout << to_string(tree_formula(pm, states, state)) << "\n";
  return 0;
}

int cmd_trees_derive(const std::string& formula_text,
                     const std::string& kind_text, int horizon,
                     const std::string& out) {
  premodel pm = premodel_for(formula_text, 0);
  int start = -1;
  for (int s = 0; s < static_cast<int>(pm.states.size()); ++s)
    if (pm.alive[s] && pm.decides_true(s, pm.psi)) {
      start = s;
      break;
    }
  if (start < 0) throw error("formula has no surviving state");
  state_lasso seq = acceptable_extension(pm, {start});
  run_kind kind;
  if (kind_text == "pr")
    kind = run_kind::pr;
  else if (kind_text == "nl")
    kind = run_kind::nl;
  else if (kind_text == "nl_pr")
    kind = run_kind::nl_pr;
  else if (kind_text == "nl_sync")
    kind = run_kind::nl_sync;
  else if (kind_text == "nl_pr_sync")
    kind = run_kind::nl_pr_sync;
  else
    throw error("unknown run kind: " + kind_text);
  lasso_system sys = derive_run(pm, seq, kind, horizon);
  if (out.empty())
    std::cout << to_json(sys) << "\n";
  else {
    save_system_file(sys, out);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_trees_search(const std::string& formula_text, int budget, int max_d) {
  premodel pm = premodel_for(formula_text, max_d);
  tree_search_result res = search_tree_sequence(pm, budget);
  std::cout << "trees: " << res.trees.size() << ", steps: " << res.steps.size()
            << "\n";
  for (size_t i = 0; i < res.trees.size(); ++i) {
    std::cout << "  tree " << i << ":";
    for (int s : res.trees[i]) std::cout << " " << s;
    std::cout << "\n";
  }
  if (res.undischarged.empty()) {
    std::cout << "all obligations discharged\n";
    return 0;
  }
  for (const auto& ob : res.undischarged)
    std::cout << "undischarged: " << ob << "\n";
  return res.budget_exhausted ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for knowledge and linear time over lasso systems"};
  app.require_subcommand(1);

  std::string system_path, point_text, formula_text, class_text = "all";
  std::string model_out, premodel_out, proof_path, dir = ".", out, file;
  std::string kind_text = "pr", schemas_text;
  long long horizon = -1;
  int trials = 50, instantiations = 10, runs = 3, window = 6, m = 2,
      props = 2, state = 0, budget = 32, horizon_i = 8, max_d = 1;
  uint64_t seed = 1;
  bool doc = false;
  std::string format = "text";

  auto* ev = app.add_subcommand("eval", "evaluate a formula at a point");
  ev->add_option("--system", system_path)->required();
  ev->add_option("--point", point_text)->required();
  ev->add_option("--formula", formula_text)->required();
  ev->add_option("--format", format)->check(CLI::IsMember({"text", "doc"}));
  ev->add_flag("--doc", doc);

  auto* cl = app.add_subcommand("classify", "semantic class membership");
  cl->add_option("--system", system_path)->required();
  cl->add_option("--horizon", horizon);
  cl->add_option("--format", format)->check(CLI::IsMember({"text", "doc"}));
  cl->add_flag("--doc", doc);

  auto* ax = app.add_subcommand("axioms", "soundness sweeps");
  ax->add_option("--class", class_text);
  ax->add_option("--schemas", schemas_text)->required();
  ax->add_option("--trials", trials);
  ax->add_option("--instantiations", instantiations);
  ax->add_option("--seed", seed)->required();
  ax->add_option("--runs", runs);
  ax->add_option("--window", window);
  ax->add_option("--m", m);
  ax->add_option("--props", props);

  auto* sat = app.add_subcommand("sat", "satisfiability with model output");
  sat->add_option("--formula", formula_text)->required();
  sat->add_option("--class", class_text);
  sat->add_option("--model", model_out);
  sat->add_option("--dump-premodel", premodel_out);

  auto* pr = app.add_subcommand("prove", "check a proof file");
  pr->add_option("--proof,proof", proof_path)->required();

  auto* fx = app.add_subcommand("fixtures", "write the bundled fixtures");
  fx->add_option("--dir", dir);

  auto* gn = app.add_subcommand("gen", "generate a class-constrained system");
  gn->add_option("--class", class_text);
  gn->add_option("--seed", seed)->required();
  gn->add_option("--runs", runs);
  gn->add_option("--window", window);
  gn->add_option("--m", m);
  gn->add_option("--props", props);
  gn->add_option("--out", out);

  auto* tr = app.add_subcommand("trees", "k-tree machinery");
  tr->require_subcommand(1);
  auto* tv = tr->add_subcommand("validate-tree", "check a tree file");
  tv->add_option("--file", file)->required();
  auto* ts = tr->add_subcommand("validate-step", "check a step file");
  ts->add_option("--file", file)->required();
  auto* tf = tr->add_subcommand("formula", "emit a tree formula");
  tf->add_option("--file", file)->required();
  tf->add_option("--state", state)->required();
  auto* td = tr->add_subcommand("derive", "derive a run from a lasso");
  td->add_option("--formula", formula_text)->required();
  td->add_option("--kind", kind_text);
  td->add_option("--horizon", horizon_i);
  td->add_option("--out", out);
  auto* tq = tr->add_subcommand("search", "bounded tree-sequence search");
  tq->add_option("--formula", formula_text)->required();
  tq->add_option("--budget", budget);
  tq->add_option("--max-d", max_d);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  doc = doc || format == "doc";
  try {
    if (ev->parsed()) return cmd_eval(system_path, point_text, formula_text, doc);
    if (cl->parsed()) return cmd_classify(system_path, horizon, doc);
    if (ax->parsed())
      return cmd_axioms(class_text, schemas_text, trials, instantiations,
                        seed, runs, window, m, props);
    if (sat->parsed())
      return cmd_sat(formula_text, class_text, model_out, premodel_out);
    if (pr->parsed()) return cmd_prove(proof_path);
    if (fx->parsed()) return cmd_fixtures(dir);
    if (gn->parsed())
      return cmd_gen(class_text, seed, runs, window, m, props, out);
    if (tr->parsed()) {
      if (tv->parsed()) return cmd_trees_validate_tree(file);
      if (ts->parsed()) return cmd_trees_validate_step(file);
      if (tf->parsed()) return cmd_trees_formula(file, state);
      if (td->parsed())
        return cmd_trees_derive(formula_text, kind_text, horizon_i, out);
      if (tq->parsed()) return cmd_trees_search(formula_text, budget, max_d);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

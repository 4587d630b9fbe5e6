#include "eltl/system.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace eltl {

int lasso_system::prop_index(const std::string& p) const {
  for (size_t i = 0; i < props.size(); ++i)
    if (props[i] == p) return static_cast<int>(i);
  throw error("unknown proposition: " + p);
}

const cell& lasso_system::at(int run, int cell_index) const {
  return runs[run].cells[cell_index];
}

void lasso_system::validate() const {
  if (m < 1) throw error("system needs at least one agent");
  if (prefix_len < 0 || period < 1) throw error("bad lasso shape");
  if (runs.empty()) throw error("system needs at least one run");
  for (const auto& r : runs) {
    if (static_cast<int>(r.cells.size()) != window())
      throw error("every run must have exactly P+Q cells");
    for (const auto& c : r.cells) {
      if (static_cast<int>(c.locals.size()) != m)
        throw error("cell has wrong number of agent cores");
      if (c.val.size() != props.size())
        throw error("cell valuation is not total on props");
    }
  }
}

int canonical_position(const lasso_system& sys, long long n) {
  if (n < 0) throw error("negative time");
  if (n < sys.window()) return static_cast<int>(n);
  return sys.prefix_len +
         static_cast<int>((n - sys.prefix_len) % sys.period);
}

int next_cell(const lasso_system& sys, int cell_index) {
  return cell_index + 1 < sys.window() ? cell_index + 1 : sys.prefix_len;
}

bool indistinguishable(const lasso_system& sys, point a, point b, agent_id i) {
  if (i < 1 || i > sys.m) throw error("agent out of range");
  if (sys.clocked && a.time != b.time) return false;
  const cell& ca = sys.at(a.run, canonical_position(sys, a.time));
  const cell& cb = sys.at(b.run, canonical_position(sys, b.time));
  return ca.locals[i - 1] == cb.locals[i - 1];
}

lasso_system uis_transform(const lasso_system& sys) {
  lasso_system out = sys;
  out.prefix_len += 1;
  cell init;
  init.env = "uis:env";
  init.locals.assign(sys.m, "uis:init");
  init.val.assign(sys.props.size(), 0);
  for (auto& r : out.runs) r.cells.insert(r.cells.begin(), init);
  return out;
}

lasso_system fixture_nl_prime() {
  lasso_system sys;
  sys.m = 1;
  sys.clocked = false;
  sys.prefix_len = 1;
  sys.period = 2;
  sys.props = {"p", "q"};
  auto mk = [&](std::vector<std::string> cores) {
    run_template r;
    for (auto& core : cores) {
      cell c;
      c.env = "se";
      c.locals = {core};
      c.val = {core == "a" ? uint8_t(1) : uint8_t(0),
               core == "b" ? uint8_t(1) : uint8_t(0)};
      r.cells.push_back(c);
    }
    return r;
  };
  sys.runs.push_back(mk({"a", "b", "c"}));
  sys.runs.push_back(mk({"a", "c", "d"}));
  sys.validate();
  return sys;
}

// ---------------------------------------------------------------------------
// JSON round-trip.

std::string to_json(const lasso_system& sys) {
  nlohmann::ordered_json j;
  j["m"] = sys.m;
  j["clocked"] = sys.clocked;
  j["prefix_len"] = sys.prefix_len;
  j["period"] = sys.period;
  j["props"] = sys.props;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& r : sys.runs) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& c : r.cells) {
      nlohmann::ordered_json jc;
      jc["env"] = c.env;
      jc["locals"] = c.locals;
      nlohmann::ordered_json val;
      for (size_t i = 0; i < sys.props.size(); ++i)
        val[sys.props[i]] = c.val[i] != 0;
      jc["val"] = val;
      cells.push_back(jc);
    }
    runs.push_back(nlohmann::ordered_json{{"cells", cells}});
  }
  j["runs"] = runs;
  return j.dump(2);
}

lasso_system system_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw error(std::string("bad system document: ") + e.what());
  }
  lasso_system sys;
  sys.m = j.at("m").get<int>();
  sys.clocked = j.at("clocked").get<bool>();
  sys.prefix_len = j.at("prefix_len").get<int>();
  sys.period = j.at("period").get<int>();
  sys.props = j.at("props").get<std::vector<std::string>>();
  for (const auto& jr : j.at("runs")) {
    run_template r;
    for (const auto& jc : jr.at("cells")) {
      cell c;
      c.env = jc.at("env").get<std::string>();
      c.locals = jc.at("locals").get<std::vector<std::string>>();
      c.val.resize(sys.props.size());
      for (size_t i = 0; i < sys.props.size(); ++i)
        c.val[i] = jc.at("val").at(sys.props[i]).get<bool>() ? 1 : 0;
      r.cells.push_back(c);
    }
    sys.runs.push_back(r);
  }
  sys.validate();
  return sys;
}

lasso_system load_system_file(const std::string& path) {
  if (path == "fixture_nl_prime") return fixture_nl_prime();
  std::ifstream in(path);
  if (!in) throw error("cannot open system file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return system_from_json(ss.str());
}

void save_system_file(const lasso_system& sys, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw error("cannot write system file: " + path);
    out << to_json(sys) << "\n";
  }
  std::rename(tmp.c_str(), path.c_str());
}

}  // namespace eltl

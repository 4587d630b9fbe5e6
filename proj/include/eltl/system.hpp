#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eltl/formula.hpp"

namespace eltl {

/// One global state cell: an environment core, one core per agent, and a
/// truth assignment for every proposition of the system.
struct cell {
  std::string env;
  std::vector<std::string> locals;   // size m
  std::vector<uint8_t> val;          // size |props|
};

struct run_template {
  std::vector<cell> cells;           // exactly prefix_len + period cells
};

/// A point (run, time).
struct point {
  int run = 0;
  long long time = 0;
  bool operator==(const point& o) const {
    return run == o.run && time == o.time;
  }
};

/// Finite representation of an interpreted system: every run is eventually
/// periodic with a shared prefix length P and period Q.  For n >= P+Q the
/// cell of time n is P + ((n - P) mod Q).
///
/// In clocked systems the effective local state of agent i at (r,n) is the
/// pair (n, core); clocked systems are synchronous by construction.
struct lasso_system {
  int m = 1;
  bool clocked = false;
  int prefix_len = 0;   // P >= 0
  int period = 1;       // Q >= 1
  std::vector<std::string> props;
  std::vector<run_template> runs;

  int window() const { return prefix_len + period; }
  int prop_index(const std::string& p) const;
  const cell& at(int run, int cell_index) const;
  void validate() const;  // throws eltl::error on shape violations
};

/// n itself if inside the window, else the canonical loop cell.
int canonical_position(const lasso_system& sys, long long n);

/// Successor cell inside the window.
int next_cell(const lasso_system& sys, int cell_index);

/// Indistinguishability to agent i: equal agent cores at the canonical
/// cells; in clocked systems additionally equal times.
bool indistinguishable(const lasso_system& sys, point a, point b, agent_id i);

/// Prepends a fresh shared initial cell to every run (all
/// propositions false, fresh cores) to every run.  P grows by one.
lasso_system uis_transform(const lasso_system& sys);

/// The two-run single-agent system of the no-learning discussion:
/// r1 = a,b,c,b,c,...  r2 = a,c,d,c,d...  with p <=> core a, q <=> core b.
lasso_system fixture_nl_prime();

// Self-describing JSON document round-trip.
std::string to_json(const lasso_system& sys);
lasso_system system_from_json(const std::string& text);
lasso_system load_system_file(const std::string& path);
void save_system_file(const lasso_system& sys, const std::string& path);

}  // namespace eltl

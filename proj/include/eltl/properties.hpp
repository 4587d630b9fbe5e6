#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eltl/system.hpp"

namespace eltl {

/// Effective local state of agent i at a point, as a token: the agent core,
/// prefixed with the time in clocked systems.
std::string local_state_token(const lasso_system& sys, point pt, agent_id i);

/// Agent i's local-state sequence at (run, n): effective local states over
/// r(0..n) with consecutive repetitions omitted.
std::vector<std::string> local_state_sequence(const lasso_system& sys,
                                              int run, agent_id i,
                                              long long n);

/// Canonical form of an eventually periodic token stream: minimal head and
/// primitive loop.  Two descriptors are equal iff the streams are equal.
/// For clocked systems `sync_time` carries the start time, which is part of
/// the effective local state.
struct stream_descriptor {
  long long sync_time = -1;  // -1 for unclocked streams
  std::vector<std::string> head;
  std::vector<std::string> loop;
  bool operator==(const stream_descriptor& o) const {
    return sync_time == o.sync_time && head == o.head && loop == o.loop;
  }
  std::string token_at(size_t j) const {
    return j < head.size() ? head[j]
                           : loop[(j - head.size()) % loop.size()];
  }
};

stream_descriptor canonical_descriptor(std::vector<std::string> head,
                                       std::vector<std::string> loop);

/// Agent i's future local-state sequence at (run, n) as a descriptor.
stream_descriptor future_local_sequence(const lasso_system& sys, int run,
                                        agent_id i, long long n);

/// Interval partitions witnessing concordance: interval j covers
/// intervals[j].first elements of S and intervals[j].second of T.
struct concordance_witness {
  std::vector<std::pair<int, int>> intervals;
};

struct concordance_result {
  bool concordant = false;
  std::optional<concordance_witness> witness;
};

/// Decides whether two finite sequences are rel-concordant: partitionable
/// into the same number of nonempty consecutive intervals, cross-related
/// pointwise.  Greedy construction first (complete when rel behaves
/// transitively along intervals, as every ~i does); when greedy fails and
/// both sequences have at most 12 elements, an exhaustive partition search
/// runs before declaring false.
concordance_result concordant(int len_s, int len_t,
                              const std::function<bool(int, int)>& rel);

struct property_counterexample {
  point a;
  point b;
  long long k = -1;       // offending auxiliary time, when meaningful
  std::string clause;     // which defining condition failed
};

struct property_report {
  std::string property;
  agent_id agent = 0;
  bool holds = true;
  long long horizon = 0;
  std::optional<property_counterexample> counterexample;
};

enum class pr_mode { definition, b, c, d };
enum class nl_mode { definition, b, c };

/// Default bounded-checking horizon: pairs with both times <= 3 * window.
long long default_horizon(const lasso_system& sys);

property_report has_perfect_recall(const lasso_system& sys, agent_id i,
                                   pr_mode mode = pr_mode::definition,
                                   long long horizon = -1);

property_report has_no_learning(const lasso_system& sys, agent_id i,
                                nl_mode mode = nl_mode::definition,
                                long long horizon = -1);

/// The weaker future-matching condition: for all (r,n) ~i (r',n') and all
/// k >= n there is k' >= n' with (r,k) ~i (r',k').
property_report has_no_learning_prime(const lasso_system& sys, agent_id i,
                                      long long horizon = -1);

property_report is_synchronous(const lasso_system& sys,
                               long long horizon = -1);

property_report has_uis(const lasso_system& sys);

struct class_spec {
  bool pr = false;
  bool nl = false;
  bool nl_prime = false;
  bool sync = false;
  bool uis = false;
  bool operator==(const class_spec& o) const {
    return pr == o.pr && nl == o.nl && nl_prime == o.nl_prime &&
           sync == o.sync && uis == o.uis;
  }
  std::string to_string() const;
};

/// Runs every checker (pr/nl/nl' over all agents) and aggregates.
class_spec classify(const lasso_system& sys, long long horizon = -1);

std::string render_report(const property_report& rep);

}  // namespace eltl

#pragma once

#include "mobman/pddl.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mobman::pddl {

struct GroundAction {
  std::string schema;
  std::vector<std::string> args;
  std::vector<Atom> pre_pos;
  std::vector<Atom> pre_neg;
  std::vector<Atom> add;
  std::vector<Atom> del;
  double cost = 0.0;

  /// "(schema a b)", also the tie-break key.
  std::string name() const;
};

/// Type-consistent bindings of every schema, statically impossible ones
/// pruned, sorted by name().
std::vector<GroundAction> ground(const DomainDef& domain, const ProblemDef& problem);

/// Instantiates one schema; nullopt when the cost function has no value.
std::optional<GroundAction> instantiate(const DomainDef& domain, const ProblemDef& problem,
                                        const ActionSchema& schema, const std::vector<std::string>& args);

enum class PlanMode { Optimal, Greedy };
PlanMode parse_plan_mode(const std::string& s);
const char* to_string(PlanMode m);

struct Plan {
  std::vector<GroundAction> steps;
  double cost = 0.0;
  std::size_t expanded = 0;
};

/// Optimal: uniform-cost search. Greedy: best-first on the number of unmet
/// goal atoms. Throws Unsolvable when the reachable space is exhausted.
Plan plan(const DomainDef& domain, const ProblemDef& problem, PlanMode mode);

struct Validation {
  bool valid = false;
  int failing_step = -1;  // -1 with !valid means the goal does not hold
  std::string reason;
  double cost = 0.0;
};

/// Simulates `steps` (action name + arguments) from init without grounding.
Validation validate(const DomainDef& domain, const ProblemDef& problem, const std::vector<Atom>& steps);

bool satisfies(const std::set<Atom>& state, const std::vector<Atom>& goal);
std::set<Atom> apply_action(const GroundAction& a, const std::set<Atom>& state);
bool applicable(const GroundAction& a, const std::set<Atom>& state);

std::string format_plan(const Plan& p);
std::vector<Atom> parse_plan(const std::string& text);

}  // namespace mobman::pddl

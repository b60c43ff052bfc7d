#pragma once

#include "mobman/planner.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mobman {

enum class ComponentEvent { Start, Stop, Trigger };
enum class ComponentStatus { Success, Failure, Stopped };

const char* to_string(ComponentEvent e);
const char* to_string(ComponentStatus s);
ComponentEvent parse_event(const std::string& s);
ComponentStatus parse_status(const std::string& s);

/// Scripted behaviour of the component behind one action schema. The script
/// is consumed one status per run; its last entry repeats, and an empty
/// script always succeeds.
struct ActionBinding {
  std::string action;
  std::vector<ComponentStatus> script;
  std::vector<std::string> params;             // schema parameter names, e.g. "?o"
  std::vector<pddl::Literal> failure_effects;  // over `params`
  std::size_t cursor = 0;
};

using KnowledgeBase = std::set<pddl::Atom>;

struct ComponentResult {
  ComponentStatus status;
  KnowledgeBase kb;
};

/// One command on the event-in channel. Start and Trigger run to completion.
ComponentResult component_step(ActionBinding& binding, ComponentEvent event, const pddl::GroundAction& action,
                               const KnowledgeBase& kb);

struct TraceRecord {
  int step = 0;
  std::string action;
  ComponentStatus status = ComponentStatus::Success;
  std::size_t kb_size = 0;
  int replans = 0;
  std::vector<pddl::Atom> added;
  std::vector<pddl::Atom> removed;
};

enum class ExecutionOutcome { Success, ReplanBudgetExhausted, Unsolvable };
const char* to_string(ExecutionOutcome o);

struct ExecutionTrace {
  std::vector<TraceRecord> records;
  ExecutionOutcome outcome = ExecutionOutcome::Success;
  int plan_attempts = 0;
  int replans = 0;
  std::string message;
  KnowledgeBase final_kb;
};

struct ExecutionOptions {
  int max_replans = 3;
  pddl::PlanMode mode = pddl::PlanMode::Greedy;
};

/// Binding for `action` with its parameter names taken from the domain.
ActionBinding make_binding(const pddl::DomainDef& domain, const std::string& action,
                           std::vector<ComponentStatus> script = {}, const std::string& failure_effects = "");

using FaultScript = std::map<int, ComponentStatus>;

/// Plans, executes and replans from the knowledge base on failure. A fault
/// script entry overrides the component status at that global step index.
ExecutionTrace execute(const pddl::DomainDef& domain, const pddl::ProblemDef& problem,
                       std::map<std::string, ActionBinding> bindings, const FaultScript& faults,
                       const ExecutionOptions& opts = {});

}  // namespace mobman

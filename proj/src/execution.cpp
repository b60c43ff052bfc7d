#include "mobman/execution.hpp"

#include "mobman/error.hpp"

#include <algorithm>
#include <iterator>

namespace mobman {

using pddl::Atom;

const char* to_string(ComponentEvent e) {
  switch (e) {
    case ComponentEvent::Start: return "e_start";
    case ComponentEvent::Stop: return "e_stop";
    case ComponentEvent::Trigger: return "e_trigger";
  }
  return "?";
}

const char* to_string(ComponentStatus s) {
  switch (s) {
    case ComponentStatus::Success: return "e_success";
    case ComponentStatus::Failure: return "e_failure";
    case ComponentStatus::Stopped: return "e_stopped";
  }
  return "?";
}

const char* to_string(ExecutionOutcome o) {
  switch (o) {
    case ExecutionOutcome::Success: return "Success";
    case ExecutionOutcome::ReplanBudgetExhausted: return "ReplanBudgetExhausted";
    case ExecutionOutcome::Unsolvable: return "Unsolvable";
  }
  return "?";
}

ComponentEvent parse_event(const std::string& s) {
  if (s == "e_start") return ComponentEvent::Start;
  if (s == "e_stop") return ComponentEvent::Stop;
  if (s == "e_trigger") return ComponentEvent::Trigger;
  fail(ErrorCode::InvalidArgument, "unknown component event '" + s + "'");
}

ComponentStatus parse_status(const std::string& s) {
  if (s == "e_success") return ComponentStatus::Success;
  if (s == "e_failure") return ComponentStatus::Failure;
  if (s == "e_stopped") return ComponentStatus::Stopped;
  fail(ErrorCode::InvalidArgument, "unknown component status '" + s + "'");
}

namespace {

Atom bind(const Atom& a, const std::vector<std::string>& params, const pddl::GroundAction& g) {
  Atom out{a.predicate, {}};
  for (const auto& x : a.args) {
    std::string v = x;
    for (std::size_t i = 0; i < params.size() && i < g.args.size(); ++i)
      if (params[i] == x) v = g.args[i];
    out.args.push_back(v);
  }
  return out;
}

KnowledgeBase apply_failure(const ActionBinding& b, const pddl::GroundAction& g, KnowledgeBase kb) {
  for (const auto& l : b.failure_effects) {
    const Atom a = bind(l.atom, b.params, g);
    if (l.negated)
      kb.erase(a);
    else
      kb.insert(a);
  }
  return kb;
}

ComponentResult run(ActionBinding& b, const pddl::GroundAction& g, const KnowledgeBase& kb) {
  ComponentStatus s = ComponentStatus::Success;
  if (!b.script.empty()) {
    s = b.script[std::min(b.cursor, b.script.size() - 1)];
    ++b.cursor;
  }
  if (s == ComponentStatus::Success) return {s, pddl::apply_action(g, kb)};
  if (s == ComponentStatus::Failure) return {s, apply_failure(b, g, kb)};
  return {s, kb};
}

}  // namespace

ComponentResult component_step(ActionBinding& binding, ComponentEvent event, const pddl::GroundAction& action,
                               const KnowledgeBase& kb) {
  if (binding.action != action.schema)
    fail(ErrorCode::UnknownAction, "binding '" + binding.action + "' cannot run action '" + action.schema + "'");
  if (event == ComponentEvent::Stop) return {ComponentStatus::Stopped, kb};
  return run(binding, action, kb);
}

ActionBinding make_binding(const pddl::DomainDef& domain, const std::string& action,
                           std::vector<ComponentStatus> script, const std::string& failure_effects) {
  const pddl::ActionSchema* schema = domain.action(action);
  if (!schema) fail(ErrorCode::UnknownAction, "no action '" + action + "' in domain " + domain.name);
  ActionBinding b;
  b.action = action;
  for (const auto& p : schema->params) b.params.push_back(p.name);
  b.script = std::move(script);
  if (!failure_effects.empty()) b.failure_effects = pddl::parse_literals(failure_effects, domain, *schema);
  return b;
}

ExecutionTrace execute(const pddl::DomainDef& domain, const pddl::ProblemDef& problem,
                       std::map<std::string, ActionBinding> bindings, const FaultScript& faults,
                       const ExecutionOptions& opts) {
  for (const auto& [step, status] : faults) {
    if (step < 0) fail(ErrorCode::InvalidArgument, "fault script step indices must be non-negative");
    if (status == ComponentStatus::Stopped)
      fail(ErrorCode::InvalidArgument, "fault script may only force e_success or e_failure");
  }
  if (opts.max_replans < 0) fail(ErrorCode::InvalidArgument, "max_replans must be non-negative");
  for (const auto& [name, b] : bindings) {
    if (!domain.action(name)) fail(ErrorCode::UnknownAction, "binding for undeclared action '" + name + "'");
    if (b.action != name) fail(ErrorCode::InvalidArgument, "binding key '" + name + "' names action '" + b.action + "'");
  }

  ExecutionTrace trace;
  KnowledgeBase kb = problem.init;
  int step = 0;
  while (true) {
    if (pddl::satisfies(kb, problem.goal)) {
      trace.outcome = ExecutionOutcome::Success;
      break;
    }
    pddl::ProblemDef current = problem;
    current.init = kb;
    ++trace.plan_attempts;
    pddl::Plan p;
    try {
      p = pddl::plan(domain, current, opts.mode);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unsolvable) throw;
      trace.outcome = ExecutionOutcome::Unsolvable;
      trace.message = e.what();
      break;
    }
    bool failed = false;
    for (const auto& g : p.steps) {
      auto it = bindings.find(g.schema);
      if (it == bindings.end()) fail(ErrorCode::UnknownAction, "no component bound to action '" + g.schema + "'");
      ComponentResult r = run(it->second, g, kb);
      if (auto f = faults.find(step); f != faults.end() && f->second != r.status) {
        r.status = f->second;
        r.kb = r.status == ComponentStatus::Success ? pddl::apply_action(g, kb) : apply_failure(it->second, g, kb);
      }
      TraceRecord rec;
      rec.step = step++;
      rec.action = g.name();
      rec.status = r.status;
      std::set_difference(r.kb.begin(), r.kb.end(), kb.begin(), kb.end(), std::back_inserter(rec.added));
      std::set_difference(kb.begin(), kb.end(), r.kb.begin(), r.kb.end(), std::back_inserter(rec.removed));
      kb = std::move(r.kb);
      rec.kb_size = kb.size();
      if (rec.status != ComponentStatus::Success) {
        ++trace.replans;
        failed = true;
      }
      rec.replans = trace.replans;
      trace.records.push_back(std::move(rec));
      if (failed) break;
    }
    if (failed && trace.replans > opts.max_replans) {
      trace.outcome = ExecutionOutcome::ReplanBudgetExhausted;
      trace.message = "replan budget of " + std::to_string(opts.max_replans) + " exhausted";
      break;
    }
  }
  trace.final_kb = kb;
  return trace;
}

}  // namespace mobman

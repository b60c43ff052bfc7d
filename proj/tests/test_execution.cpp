#include "mobman/execution.hpp"
#include "support.hpp"

using namespace mobman;
using pddl::Atom;

namespace {

pddl::DomainDef domain() { return pddl::parse_domain(testing::data_file("pddl/transport_domain.pddl")); }

pddl::ProblemDef problem(const pddl::DomainDef& d, const std::string& name) {
  return pddl::parse_problem(testing::data_file("pddl/" + name + ".pddl"), d);
}

std::map<std::string, ActionBinding> all_succeed(const pddl::DomainDef& d) {
  std::map<std::string, ActionBinding> out;
  for (const auto& a : d.actions) out.emplace(a.name, make_binding(d, a.name));
  return out;
}

const pddl::GroundAction& find_action(const std::vector<pddl::GroundAction>& g, const std::string& name) {
  for (const auto& a : g)
    if (a.name() == name) return a;
  FAIL("missing action " << name);
  return g.front();
}

}  // namespace

TEST_CASE("component_step: success applies effects, failure applies failure effects") {
  const auto d = domain();
  const auto p = problem(d, "p1");
  const auto ground = pddl::ground(d, p);
  const auto& move = find_action(ground, "(move-to-location youbot ws2 ws1)");
  ActionBinding b = make_binding(d, "move-to-location", {ComponentStatus::Success, ComponentStatus::Failure});
  const auto ok = component_step(b, ComponentEvent::Start, move, p.init);
  CHECK(ok.status == ComponentStatus::Success);
  CHECK(ok.kb.count(Atom{"robot-at", {"youbot", "ws1"}}) == 1);
  CHECK(ok.kb.count(Atom{"robot-at", {"youbot", "ws2"}}) == 0);
  const auto bad = component_step(b, ComponentEvent::Trigger, move, p.init);
  CHECK(bad.status == ComponentStatus::Failure);
  CHECK(bad.kb == p.init);
  const auto again = component_step(b, ComponentEvent::Start, move, p.init);
  CHECK(again.status == ComponentStatus::Failure);  // last entry repeats
  const auto stop = component_step(b, ComponentEvent::Stop, move, p.init);
  CHECK(stop.status == ComponentStatus::Stopped);
  CHECK(stop.kb == p.init);

  ActionBinding g = make_binding(d, "grasp-object", {ComponentStatus::Failure}, "(not (perceived ?i))");
  KnowledgeBase kb;
  kb.insert({"perceived", {"m20"}});
  kb.insert({"robot-at", {"youbot", "ws1"}});
  const auto& grasp = find_action(ground, "(grasp-object youbot m20 ws1)");
  const auto r = component_step(g, ComponentEvent::Start, grasp, kb);
  CHECK(r.kb.count(Atom{"perceived", {"m20"}}) == 0);
  CHECK(r.kb.size() == 1);
  CHECK_ERROR(component_step(g, ComponentEvent::Start, move, kb), ErrorCode::UnknownAction);
  CHECK_ERROR(make_binding(d, "teleport"), ErrorCode::UnknownAction);
  CHECK_ERROR(parse_status("e_maybe"), ErrorCode::InvalidArgument);
  CHECK(parse_event("e_trigger") == ComponentEvent::Trigger);
}

TEST_CASE("execute: nominal run follows the plan") {
  const auto d = domain();
  const auto p = problem(d, "p1");
  const ExecutionTrace t = execute(d, p, all_succeed(d), {});
  CHECK(t.outcome == ExecutionOutcome::Success);
  CHECK(t.records.size() == 5);
  CHECK(t.replans == 0);
  CHECK(t.plan_attempts == 1);
  CHECK(pddl::satisfies(t.final_kb, p.goal));
}

TEST_CASE("execute: one failure costs one replan") {
  const auto d = domain();
  const auto p = problem(d, "p1");
  auto b = all_succeed(d);
  b["grasp-object"] = make_binding(d, "grasp-object", {ComponentStatus::Failure, ComponentStatus::Success});
  const ExecutionTrace t = execute(d, p, b, {});
  CHECK(t.outcome == ExecutionOutcome::Success);
  CHECK(t.replans == 1);
  CHECK(t.plan_attempts == 2);
  CHECK(t.records.size() == 6);
  CHECK(t.records[2].status == ComponentStatus::Failure);
}

TEST_CASE("execute: persistent failure exhausts the budget") {
  const auto d = domain();
  const auto p = problem(d, "p1");
  auto b = all_succeed(d);
  b["grasp-object"] = make_binding(d, "grasp-object", {ComponentStatus::Failure});
  const ExecutionTrace t = execute(d, p, b, {});
  CHECK(t.outcome == ExecutionOutcome::ReplanBudgetExhausted);
  CHECK(t.plan_attempts == 4);
  CHECK(t.replans == 4);
  ExecutionOptions none;
  none.max_replans = 0;
  CHECK(execute(d, p, b, {}, none).plan_attempts == 1);
}

TEST_CASE("execute: fault script overrides by global step") {
  const auto d = domain();
  const auto p = problem(d, "p1");
  const FaultScript f{{2, ComponentStatus::Failure}};
  const ExecutionTrace t = execute(d, p, all_succeed(d), f);
  CHECK(t.outcome == ExecutionOutcome::Success);
  REQUIRE(t.records.size() > 2);
  CHECK(t.records[2].status == ComponentStatus::Failure);
  CHECK(t.replans == 1);
  CHECK_ERROR(execute(d, p, all_succeed(d), {{-1, ComponentStatus::Failure}}), ErrorCode::InvalidArgument);
  CHECK_ERROR(execute(d, p, {}, {}), ErrorCode::UnknownAction);
}

TEST_CASE("execute: frame property and replan accounting on random fault scripts") {
  const auto d = domain();
  const auto p = problem(d, "p2");
  const auto ground = pddl::ground(d, p);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    FaultScript f;
    for (int s = 0; s < 30; ++s)
      if (testing::urand(rng, 0, 1) < 0.1) f[s] = ComponentStatus::Failure;
    auto b = all_succeed(d);
    b["grasp-object"] = make_binding(d, "grasp-object", {}, "(not (perceived ?i))");
    ExecutionOptions opts;
    opts.max_replans = 10;
    const ExecutionTrace t = execute(d, p, b, f, opts);
    int failures = 0;
    KnowledgeBase kb = p.init;
    for (const auto& r : t.records) {
      const auto& g = find_action(ground, r.action);
      if (r.status == ComponentStatus::Success) {
        CHECK(pddl::applicable(g, kb));
        kb = pddl::apply_action(g, kb);
      } else {
        ++failures;
        // only the declared failure effect may change anything
        CHECK(r.added.empty());
        for (const auto& a : r.removed) CHECK(a.predicate == "perceived");
        for (const auto& a : r.removed) kb.erase(a);
      }
      CHECK(r.replans == failures);
      CHECK(r.kb_size == kb.size());
    }
    CHECK(t.final_kb == kb);
    CHECK(t.replans == failures);
    CHECK(t.plan_attempts == failures + (t.outcome == ExecutionOutcome::ReplanBudgetExhausted ? 0 : 1));
    if (t.outcome == ExecutionOutcome::Success) CHECK(pddl::satisfies(kb, p.goal));
    // deterministic
    const ExecutionTrace again = execute(d, p, b, f, opts);
    CHECK(again.records.size() == t.records.size());
    CHECK(again.final_kb == t.final_kb);
  }
}

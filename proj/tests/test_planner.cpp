#include "mobman/error.hpp"
#include "mobman/planner.hpp"
#include "support.hpp"

#include <functional>
#include <map>
#include <queue>

using namespace mobman;
using namespace mobman::pddl;

namespace {

DomainDef domain() { return parse_domain(testing::data_file("pddl/transport_domain.pddl")); }

ProblemDef problem(const DomainDef& d, const std::string& name) {
  return parse_problem(testing::data_file("pddl/" + name + ".pddl"), d);
}

// Every type-consistent binding of every schema, no pruning.
std::vector<GroundAction> naive_ground(const DomainDef& d, const ProblemDef& p) {
  const auto universe = p.universe(d);
  std::vector<GroundAction> out;
  for (const auto& s : d.actions) {
    std::vector<std::string> args;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == s.params.size()) {
        if (auto g = instantiate(d, p, s, args)) out.push_back(*g);
        return;
      }
      for (const auto& o : universe) {
        if (!d.is_subtype(o.type, s.params[i].type)) continue;
        args.push_back(o.name);
        rec(i + 1);
        args.pop_back();
      }
    };
    rec(0);
  }
  return out;
}

struct Oracle {
  double cost = -1;  // -1 when unsolvable
  std::set<std::string> used;  // every action applicable in some reachable state
};

// Dijkstra over explicit atom sets.
Oracle dijkstra(const DomainDef& d, const ProblemDef& p) {
  const auto actions = naive_ground(d, p);
  using Item = std::pair<double, std::set<Atom>>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  std::map<std::set<Atom>, double> best;
  open.push({0.0, p.init});
  best[p.init] = 0.0;
  Oracle o;
  while (!open.empty()) {
    auto [g, s] = open.top();
    open.pop();
    if (g > best[s]) continue;
    if (o.cost < 0 && satisfies(s, p.goal)) o.cost = g;
    for (const auto& a : actions) {
      if (!applicable(a, s)) continue;
      o.used.insert(a.name());
      auto next = apply_action(a, s);
      const double ng = g + a.cost;
      auto it = best.find(next);
      if (it == best.end() || ng < it->second) {
        best[next] = ng;
        open.push({ng, std::move(next)});
      }
    }
  }
  return o;
}

std::vector<Atom> as_steps(const Plan& p) {
  std::vector<Atom> out;
  for (const auto& s : p.steps) out.push_back({s.schema, s.args});
  return out;
}

constexpr const char* kTiny = R"((define (domain tiny)
  (:requirements :strips :typing)
  (:types thing)
  (:predicates (on ?x - thing) (off ?x - thing))
  (:action flip
    :parameters (?x - thing)
    :precondition (off ?x)
    :effect (and (on ?x) (not (off ?x)))))
)";

}  // namespace

TEST_CASE("parse: transport domain structure") {
  const DomainDef d = domain();
  CHECK(d.name == "atwork-transport");
  CHECK(d.actions.size() == 4);
  CHECK(d.predicates.size() == 5);
  REQUIRE(d.action("grasp-object"));
  CHECK(d.action("grasp-object")->precondition.size() == 4);
  CHECK(d.action("grasp-object")->precondition[3].negated);
  CHECK(d.action("move-to-location")->cost.kind == CostExpr::Kind::Function);
  const ProblemDef p2 = problem(d, "p2");
  std::size_t items = 0, locations = 0;
  for (const auto& o : p2.objects) {
    items += o.type == "item";
    locations += o.type == "location";
  }
  CHECK(items == 3);
  CHECK(locations == 3);
  CHECK(p2.goal.size() == 3);
  CHECK(p2.numeric.at(Atom{"distance", {"ws2", "ws3"}}) == 3.0);
}

TEST_CASE("parse: errors carry codes and positions") {
  const DomainDef d = domain();
  try {
    parse_domain("(define (domain x)\n  (:requirements :strips :durative-actions))");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedRequirement);
    CHECK(std::string(e.what()).find("durative-actions") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_domain("(define (domain x)\n  (:predicates (p)\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    CHECK(std::string(e.what()).find("line ") != std::string::npos);
  }
  CHECK_ERROR(parse_domain(std::string(kTiny).replace(std::string(kTiny).find("(on ?x)"), 7, "(on ?x ?x)")),
              ErrorCode::ArityMismatch);
  CHECK_ERROR(parse_domain(std::string(kTiny).replace(std::string(kTiny).find("?x - thing)\n    :pre"), 10, "?x - widget")),
              ErrorCode::UnknownType);
  const char* bad_obj = "(define (problem q) (:domain atwork-transport) (:objects r - robot)"
                        " (:init (robot-at r nowhere)) (:goal (robot-at r nowhere)))";
  CHECK_ERROR(parse_problem(bad_obj, d), ErrorCode::UndeclaredObject);
  // failure-effect literals may negate even without :negative-preconditions
  const DomainDef tiny = parse_domain(kTiny);
  const auto lits = parse_literals("(and (not (on ?x)) (off ?x))", tiny, *tiny.action("flip"));
  REQUIRE(lits.size() == 2);
  CHECK(lits[0].negated);
  CHECK_ERROR(parse_literals("(on ?y)", tiny, *tiny.action("flip")), ErrorCode::SyntaxError);
}

TEST_CASE("print: parse/print fixpoint on the bundled files") {
  const DomainDef d = domain();
  const std::string once = print_domain(d);
  const DomainDef d2 = parse_domain(once);
  CHECK(d2 == d);
  CHECK(print_domain(d2) == once);
  for (const char* name : {"p1", "p2", "p3"}) {
    const ProblemDef p = problem(d, name);
    const std::string text = print_problem(p);
    const ProblemDef back = parse_problem(text, d2);
    CHECK(back == p);
    CHECK(print_problem(back) == text);
  }
}

TEST_CASE("ground: sorted, typed, and covers every reachable action") {
  const DomainDef d = domain();
  for (const char* name : {"p1", "p2", "p3"}) {
    const ProblemDef p = problem(d, name);
    const auto g = ground(d, p);
    std::set<std::string> names;
    for (std::size_t i = 0; i < g.size(); ++i) {
      names.insert(g[i].name());
      if (i) CHECK(g[i - 1].name() < g[i].name());
    }
    CHECK(names.size() <= naive_ground(d, p).size());
    for (const auto& used : dijkstra(d, p).used) CHECK(names.count(used) == 1);
  }
}

TEST_CASE("plan: optimal cost matches Dijkstra, greedy is never cheaper") {
  const DomainDef d = domain();
  for (const char* name : {"p1", "p2", "p3"}) {
    const ProblemDef p = problem(d, name);
    const Plan opt = plan(d, p, PlanMode::Optimal);
    const Plan greedy = plan(d, p, PlanMode::Greedy);
    CHECK(opt.cost == doctest::Approx(dijkstra(d, p).cost));
    CHECK(opt.cost <= greedy.cost + 1e-12);
    for (const Plan* pl : {&opt, &greedy}) {
      const Validation v = validate(d, p, as_steps(*pl));
      CHECK(v.valid);
      CHECK(v.cost == doctest::Approx(pl->cost));
    }
  }
}

TEST_CASE("plan: single delivery") {
  const DomainDef d = domain();
  const ProblemDef p = problem(d, "p1");
  const Plan pl = plan(d, p, PlanMode::Optimal);
  CHECK(pl.cost == 5.0);
  REQUIRE(pl.steps.size() == 5);
  CHECK(pl.steps[0].name() == "(move-to-location youbot ws2 ws1)");
  CHECK(pl.steps[1].name() == "(perceive-object youbot m20 ws1)");
  CHECK(pl.steps[2].name() == "(grasp-object youbot m20 ws1)");
  CHECK(pl.steps[3].name() == "(move-to-location youbot ws1 ws2)");
  CHECK(pl.steps[4].name() == "(place-object youbot m20 ws2)");
  CHECK(format_plan(pl) == format_plan(plan(d, p, PlanMode::Optimal)));
  const auto parsed = parse_plan(format_plan(pl));
  CHECK(parsed == as_steps(pl));
}

TEST_CASE("plan: detour is cheaper than the direct edge") {
  const DomainDef d = domain();
  const Plan pl = plan(d, problem(d, "p3"), PlanMode::Optimal);
  for (const auto& s : pl.steps) CHECK(s.name() != "(move-to-location youbot start shelf)");
}

TEST_CASE("validate: swapped steps and unmet goals are rejected") {
  const DomainDef d = domain();
  const ProblemDef p = problem(d, "p1");
  auto steps = as_steps(plan(d, p, PlanMode::Optimal));
  std::swap(steps[1], steps[2]);
  const Validation v = validate(d, p, steps);
  CHECK_FALSE(v.valid);
  CHECK(v.failing_step == 1);
  steps = as_steps(plan(d, p, PlanMode::Optimal));
  steps.pop_back();
  const Validation short_plan = validate(d, p, steps);
  CHECK_FALSE(short_plan.valid);
  CHECK(short_plan.failing_step == -1);
  const Validation unknown = validate(d, p, {Atom{"teleport", {"youbot"}}});
  CHECK_FALSE(unknown.valid);
  CHECK(unknown.failing_step == 0);
}

TEST_CASE("plan: unsolvable and unit costs") {
  const DomainDef tiny = parse_domain(kTiny);
  const ProblemDef stuck =
      parse_problem("(define (problem s) (:domain tiny) (:objects a - thing) (:init (on a)) (:goal (off a)))", tiny);
  CHECK_ERROR(plan(tiny, stuck, PlanMode::Optimal), ErrorCode::Unsolvable);
  CHECK_ERROR(plan(tiny, stuck, PlanMode::Greedy), ErrorCode::Unsolvable);
  const ProblemDef two = parse_problem(
      "(define (problem t) (:domain tiny) (:objects a b - thing) (:init (off a) (off b)) (:goal (and (on a) (on b))))",
      tiny);
  const Plan pl = plan(tiny, two, PlanMode::Optimal);
  CHECK(pl.cost == 2.0);
  CHECK(pl.steps[0].name() == "(flip a)");
  CHECK_ERROR(parse_plan_mode("astar"), ErrorCode::InvalidArgument);
}

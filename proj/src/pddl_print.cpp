#include "mobman/pddl.hpp"

#include <cstdio>
#include <sstream>

namespace mobman::pddl {

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Groups consecutive names of the same type: "a b - t c - u".
std::string typed(const std::vector<TypedName>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += names[i].name;
    if (i + 1 == names.size() || names[i + 1].type != names[i].type) out += " - " + names[i].type;
  }
  return out;
}

std::string conjunction(const std::vector<std::string>& parts) {
  if (parts.empty()) return "(and)";
  std::string out = "(and";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

}  // namespace

std::string to_string(const Atom& atom) {
  std::string out = "(" + atom.predicate;
  for (const auto& a : atom.args) out += " " + a;
  return out + ")";
}

std::string to_string(const Literal& lit) {
  return lit.negated ? "(not " + to_string(lit.atom) + ")" : to_string(lit.atom);
}

std::string print_domain(const DomainDef& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << ' ' << r;
    os << ")\n";
  }
  if (!d.types.empty()) os << "  (:types " << typed(d.types) << ")\n";
  if (!d.constants.empty()) os << "  (:constants " << typed(d.constants) << ")\n";
  os << "  (:predicates";
  for (const auto& p : d.predicates) {
    os << "\n    (" << p.name;
    if (!p.params.empty()) os << ' ' << typed(p.params);
    os << ')';
  }
  os << ")\n";
  bool costs = false;
  for (const auto& a : d.actions) costs = costs || a.cost.kind != CostExpr::Kind::None;
  if (costs || !d.functions.empty()) {
    os << "  (:functions (total-cost) - number";
    for (const auto& f : d.functions) {
      os << "\n    (" << f.name;
      if (!f.params.empty()) os << ' ' << typed(f.params);
      os << ") - number";
    }
    os << ")\n";
  }
  for (const auto& a : d.actions) {
    os << "  (:action " << a.name << "\n    :parameters (" << typed(a.params) << ")\n";
    std::vector<std::string> pre;
    for (const auto& l : a.precondition) pre.push_back(to_string(l));
    os << "    :precondition " << conjunction(pre) << "\n";
    std::vector<std::string> eff;
    for (const auto& x : a.add) eff.push_back(to_string(x));
    for (const auto& x : a.del) eff.push_back("(not " + to_string(x) + ")");
    if (a.cost.kind == CostExpr::Kind::Constant) eff.push_back("(increase (total-cost) " + number(a.cost.value) + ")");
    if (a.cost.kind == CostExpr::Kind::Function) eff.push_back("(increase (total-cost) " + to_string(a.cost.term) + ")");
    os << "    :effect " << conjunction(eff) << ")\n";
  }
  os << ")\n";
  return os.str();
}

std::string print_problem(const ProblemDef& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n  (:domain " << p.domain_name << ")\n";
  if (!p.objects.empty()) os << "  (:objects " << typed(p.objects) << ")\n";
  os << "  (:init";
  for (const auto& a : p.init) os << "\n    " << to_string(a);
  for (const auto& [a, v] : p.numeric) os << "\n    (= " << to_string(a) << ' ' << number(v) << ')';
  if (p.minimize_total_cost) os << "\n    (= (total-cost) 0)";
  os << ")\n";
  std::vector<std::string> goal;
  for (const auto& g : p.goal) goal.push_back(to_string(g));
  os << "  (:goal " << conjunction(goal) << ")\n";
  if (p.minimize_total_cost) os << "  (:metric minimize (total-cost))\n";
  os << ")\n";
  return os.str();
}

}  // namespace mobman::pddl

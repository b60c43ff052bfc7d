#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mobman::pddl {

// PDDL subset: :strips, :typing, :negative-preconditions, :action-costs.

struct TypedName {
  std::string name;
  std::string type = "object";
  auto operator<=>(const TypedName&) const = default;
};

// Predicate or function term; arguments are ?variables or object names.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;
  auto operator<=>(const Atom&) const = default;
};

struct Literal {
  Atom atom;
  bool negated = false;
  auto operator<=>(const Literal&) const = default;
};

struct CostExpr {
  enum class Kind { None, Constant, Function };
  Kind kind = Kind::None;
  double value = 0.0;
  Atom term;  // static numeric function when kind == Function
  bool operator==(const CostExpr&) const = default;
};

struct Schema {
  std::string name;
  std::vector<TypedName> params;
  bool operator==(const Schema&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Literal> precondition;
  std::vector<Atom> add;
  std::vector<Atom> del;
  CostExpr cost;
  bool operator==(const ActionSchema&) const = default;
};

struct DomainDef {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypedName> types;  // name - parent, declaration order
  std::vector<TypedName> constants;
  std::vector<Schema> predicates;
  std::vector<Schema> functions;  // excluding total-cost
  std::vector<ActionSchema> actions;
  bool operator==(const DomainDef&) const = default;

  const Schema* predicate(const std::string& name) const;
  const Schema* function(const std::string& name) const;
  const ActionSchema* action(const std::string& name) const;
  /// True when `type` equals `ancestor` or derives from it.
  bool is_subtype(const std::string& type, const std::string& ancestor) const;
  bool has_type(const std::string& type) const;
};

struct ProblemDef {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::set<Atom> init;
  std::map<Atom, double> numeric;  // static function values
  std::vector<Atom> goal;
  bool minimize_total_cost = false;
  bool operator==(const ProblemDef&) const = default;

  /// Objects plus domain constants, sorted by name.
  std::vector<TypedName> universe(const DomainDef& domain) const;
};

DomainDef parse_domain(const std::string& text);
ProblemDef parse_problem(const std::string& text, const DomainDef& domain);

/// Literals such as "(not (perceived ?o))" or "(and (a) (b))" over the
/// parameters of an action schema.
std::vector<Literal> parse_literals(const std::string& text, const DomainDef& domain, const ActionSchema& action);

std::string print_domain(const DomainDef& domain);
std::string print_problem(const ProblemDef& problem);
std::string to_string(const Atom& atom);
std::string to_string(const Literal& lit);

}  // namespace mobman::pddl

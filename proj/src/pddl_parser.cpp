#include "mobman/error.hpp"
#include "mobman/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>

namespace mobman::pddl {

namespace {

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 1, col = 1;
};

[[noreturn]] void error_at(ErrorCode code, const SExpr& at, const std::string& msg) {
  fail(code, "line " + std::to_string(at.line) + ", column " + std::to_string(at.col) + ": " + msg);
}

class Reader {
public:
  explicit Reader(const std::string& text) : text_(text) {}

  SExpr read_root() {
    skip();
    if (pos_ >= text_.size()) error_here("empty input");
    SExpr e = read();
    skip();
    if (pos_ < text_.size()) error_here("unexpected text after the closing parenthesis");
    return e;
  }

private:
  [[noreturn]] void error_here(const std::string& msg) {
    fail(ErrorCode::SyntaxError, "line " + std::to_string(line_) + ", column " + std::to_string(col_) + ": " + msg);
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.line = line_;
    e.col = col_;
    if (text_[pos_] == '(') {
      e.is_list = true;
      advance();
      while (true) {
        skip();
        if (pos_ >= text_.size()) {
          fail(ErrorCode::SyntaxError, "line " + std::to_string(e.line) + ", column " + std::to_string(e.col) +
                                           ": unbalanced parenthesis");
        }
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (text_[pos_] == ')') error_here("unexpected ')'");
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
      e.atom += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      advance();
    }
    return e;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

bool is_keyword(const SExpr& e, const char* kw) { return !e.is_list && e.atom == kw; }

const std::string& head(const SExpr& list) {
  static const std::string none;
  if (!list.is_list || list.items.empty() || list.items[0].is_list) return none;
  return list.items[0].atom;
}

const SExpr& expect_list(const SExpr& e, const std::string& what) {
  if (!e.is_list) error_at(ErrorCode::SyntaxError, e, "expected " + what);
  return e;
}

const std::string& expect_name(const SExpr& e, const std::string& what) {
  if (e.is_list || e.atom.empty()) error_at(ErrorCode::SyntaxError, e, "expected " + what);
  return e.atom;
}

bool parse_number(const std::string& s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

// "a b - t c" -> {a:t, b:t, c:object}
std::vector<std::pair<TypedName, const SExpr*>> typed_list(const SExpr& list, std::size_t from) {
  std::vector<std::pair<TypedName, const SExpr*>> out;
  std::size_t pending_start = 0;
  for (std::size_t i = from; i < list.items.size(); ++i) {
    const SExpr& e = list.items[i];
    if (e.is_list) error_at(ErrorCode::SyntaxError, e, "unexpected list in typed list");
    if (e.atom == "-") {
      if (i + 1 >= list.items.size()) error_at(ErrorCode::SyntaxError, e, "missing type after '-'");
      const SExpr& t = list.items[i + 1];
      if (t.is_list) error_at(ErrorCode::SyntaxError, t, "'either' types are not supported");
      if (pending_start == out.size()) error_at(ErrorCode::SyntaxError, e, "type without names");
      for (std::size_t k = pending_start; k < out.size(); ++k) out[k].first.type = t.atom;
      pending_start = out.size();
      ++i;
      continue;
    }
    out.push_back({TypedName{e.atom, "object"}, &e});
  }
  return out;
}

const std::vector<std::string> kSupported{":strips", ":typing", ":negative-preconditions", ":action-costs"};

struct ActionScope {
  const DomainDef& domain;
  const std::vector<TypedName>* params;  // null when parsing ground atoms
  const std::vector<TypedName>* objects; // objects of a problem, may be null
};

std::string type_of_term(const ActionScope& scope, const SExpr& arg) {
  const std::string& name = arg.atom;
  if (!name.empty() && name[0] == '?') {
    if (scope.params)
      for (const auto& p : *scope.params)
        if (p.name == name) return p.type;
    error_at(ErrorCode::SyntaxError, arg, "unbound variable " + name);
  }
  for (const auto& c : scope.domain.constants)
    if (c.name == name) return c.type;
  if (scope.objects)
    for (const auto& o : *scope.objects)
      if (o.name == name) return o.type;
  error_at(ErrorCode::UndeclaredObject, arg, "undeclared object '" + name + "'");
}

Atom parse_atom(const ActionScope& scope, const SExpr& e, bool function) {
  if (!e.is_list || e.items.empty() || e.items[0].is_list)
    error_at(ErrorCode::SyntaxError, e, function ? "expected a function term" : "expected an atom");
  Atom a;
  a.predicate = e.items[0].atom;
  const Schema* schema = function ? scope.domain.function(a.predicate) : scope.domain.predicate(a.predicate);
  if (!schema)
    error_at(ErrorCode::SyntaxError, e,
             std::string(function ? "undeclared function '" : "undeclared predicate '") + a.predicate + "'");
  if (e.items.size() - 1 != schema->params.size())
    error_at(ErrorCode::ArityMismatch, e,
             "'" + a.predicate + "' expects " + std::to_string(schema->params.size()) + " arguments, got " +
                 std::to_string(e.items.size() - 1));
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const SExpr& arg = e.items[i];
    if (arg.is_list) error_at(ErrorCode::SyntaxError, arg, "nested term in argument position");
    const std::string t = type_of_term(scope, arg);
    const std::string& want = schema->params[i - 1].type;
    if (!scope.domain.is_subtype(t, want))
      error_at(ErrorCode::UnknownType, arg,
               "argument '" + arg.atom + "' of type " + t + " does not match " + want + " of '" + a.predicate + "'");
    a.args.push_back(arg.atom);
  }
  return a;
}

Literal parse_literal(const ActionScope& scope, const SExpr& e, bool allow_negative) {
  if (head(e) == "not") {
    if (!allow_negative) error_at(ErrorCode::UnsupportedRequirement, e, "negative-preconditions");
    if (e.items.size() != 2) error_at(ErrorCode::SyntaxError, e, "'not' takes exactly one atom");
    return {parse_atom(scope, e.items[1], false), true};
  }
  return {parse_atom(scope, e, false), false};
}

// (and x y ...) | x | ()
std::vector<const SExpr*> conjuncts(const SExpr& e) {
  std::vector<const SExpr*> out;
  if (!e.is_list) error_at(ErrorCode::SyntaxError, e, "expected a formula");
  if (e.items.empty()) return out;
  if (head(e) == "and") {
    for (std::size_t i = 1; i < e.items.size(); ++i) out.push_back(&e.items[i]);
  } else if (head(e) == "or" || head(e) == "imply" || head(e) == "forall" || head(e) == "exists" ||
             head(e) == "when") {
    error_at(ErrorCode::SyntaxError, e, "'" + head(e) + "' is outside the supported PDDL subset");
  } else {
    out.push_back(&e);
  }
  return out;
}

void declare_schemas(DomainDef& d, const SExpr& section, bool functions) {
  auto& target = functions ? d.functions : d.predicates;
  for (std::size_t i = 1; i < section.items.size(); ++i) {
    const SExpr& item = section.items[i];
    if (functions && !item.is_list) {
      // "- number" return type annotations
      if (item.atom == "-" && i + 1 < section.items.size() && is_keyword(section.items[i + 1], "number")) {
        ++i;
        continue;
      }
      error_at(ErrorCode::SyntaxError, item, "only numeric functions are supported");
    }
    expect_list(item, functions ? "function declaration" : "predicate declaration");
    Schema s;
    s.name = expect_name(item.items.empty() ? item : item.items[0], "name");
    if (functions && s.name == "total-cost") {
      if (item.items.size() != 1) error_at(ErrorCode::ArityMismatch, item, "total-cost takes no arguments");
      continue;
    }
    for (const auto& [tn, at] : typed_list(item, 1)) {
      if (!d.has_type(tn.type)) error_at(ErrorCode::UnknownType, *at, "unknown type '" + tn.type + "'");
      s.params.push_back(tn);
    }
    if ((functions ? d.function(s.name) : d.predicate(s.name)) != nullptr)
      error_at(ErrorCode::SyntaxError, item, "duplicate declaration of '" + s.name + "'");
    target.push_back(std::move(s));
  }
}

void parse_action(DomainDef& d, const SExpr& section) {
  ActionSchema a;
  if (section.items.size() < 2) error_at(ErrorCode::SyntaxError, section, "action needs a name");
  a.name = expect_name(section.items[1], "action name");
  if (d.action(a.name)) error_at(ErrorCode::SyntaxError, section, "duplicate action '" + a.name + "'");
  const bool negative_ok = std::find(d.requirements.begin(), d.requirements.end(), ":negative-preconditions") !=
                           d.requirements.end();
  const SExpr* pre = nullptr;
  const SExpr* eff = nullptr;
  for (std::size_t i = 2; i < section.items.size(); i += 2) {
    const SExpr& key = section.items[i];
    if (i + 1 >= section.items.size()) error_at(ErrorCode::SyntaxError, key, "missing value for " + key.atom);
    const SExpr& val = section.items[i + 1];
    if (is_keyword(key, ":parameters")) {
      expect_list(val, "parameter list");
      for (const auto& [tn, at] : typed_list(val, 0)) {
        if (tn.name.empty() || tn.name[0] != '?') error_at(ErrorCode::SyntaxError, *at, "parameters must start with '?'");
        if (!d.has_type(tn.type)) error_at(ErrorCode::UnknownType, *at, "unknown type '" + tn.type + "'");
        a.params.push_back(tn);
      }
    } else if (is_keyword(key, ":precondition")) {
      pre = &val;
    } else if (is_keyword(key, ":effect")) {
      eff = &val;
    } else {
      error_at(ErrorCode::SyntaxError, key, "unexpected action field '" + key.atom + "'");
    }
  }
  const ActionScope scope{d, &a.params, nullptr};
  if (pre)
    for (const SExpr* c : conjuncts(*pre)) a.precondition.push_back(parse_literal(scope, *c, negative_ok));
  if (eff) {
    for (const SExpr* c : conjuncts(*eff)) {
      if (head(*c) == "increase") {
        if (c->items.size() != 3 || head(c->items[1]) != "total-cost" || c->items[1].items.size() != 1)
          error_at(ErrorCode::SyntaxError, *c, "only (increase (total-cost) <expr>) is supported");
        if (a.cost.kind != CostExpr::Kind::None) error_at(ErrorCode::SyntaxError, *c, "duplicate cost effect");
        const SExpr& expr = c->items[2];
        if (expr.is_list) {
          a.cost.kind = CostExpr::Kind::Function;
          a.cost.term = parse_atom(scope, expr, true);
        } else {
          a.cost.kind = CostExpr::Kind::Constant;
          if (!parse_number(expr.atom, a.cost.value) || a.cost.value < 0)
            error_at(ErrorCode::SyntaxError, expr, "action cost must be a non-negative number");
        }
        continue;
      }
      const Literal lit = parse_literal(scope, *c, true);
      (lit.negated ? a.del : a.add).push_back(lit.atom);
    }
  }
  d.actions.push_back(std::move(a));
}

}  // namespace

const Schema* DomainDef::predicate(const std::string& n) const {
  for (const auto& p : predicates)
    if (p.name == n) return &p;
  return nullptr;
}

const Schema* DomainDef::function(const std::string& n) const {
  for (const auto& f : functions)
    if (f.name == n) return &f;
  return nullptr;
}

const ActionSchema* DomainDef::action(const std::string& n) const {
  for (const auto& a : actions)
    if (a.name == n) return &a;
  return nullptr;
}

bool DomainDef::has_type(const std::string& t) const {
  if (t == "object") return true;
  return std::any_of(types.begin(), types.end(), [&](const TypedName& tn) { return tn.name == t; });
}

bool DomainDef::is_subtype(const std::string& type, const std::string& ancestor) const {
  std::string cur = type;
  for (std::size_t guard = 0; guard <= types.size() + 1; ++guard) {
    if (cur == ancestor) return true;
    if (cur == "object") return false;
    auto it = std::find_if(types.begin(), types.end(), [&](const TypedName& tn) { return tn.name == cur; });
    if (it == types.end()) return false;
    cur = it->type;
  }
  return false;  // cyclic hierarchy
}

std::vector<TypedName> ProblemDef::universe(const DomainDef& domain) const {
  std::vector<TypedName> all = objects;
  all.insert(all.end(), domain.constants.begin(), domain.constants.end());
  std::sort(all.begin(), all.end());
  return all;
}

DomainDef parse_domain(const std::string& text) {
  const SExpr root = Reader(text).read_root();
  if (head(root) != "define") error_at(ErrorCode::SyntaxError, root, "expected (define ...)");
  if (root.items.size() < 2 || head(root.items[1]) != "domain" || root.items[1].items.size() != 2)
    error_at(ErrorCode::SyntaxError, root, "expected (domain <name>)");

  DomainDef d;
  d.name = expect_name(root.items[1].items[1], "domain name");
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& sec = expect_list(root.items[i], "domain section");
    const std::string& h = head(sec);
    if (h == ":requirements") {
      for (std::size_t k = 1; k < sec.items.size(); ++k) {
        const std::string& r = expect_name(sec.items[k], "requirement");
        if (std::find(kSupported.begin(), kSupported.end(), r) == kSupported.end())
          error_at(ErrorCode::UnsupportedRequirement, sec.items[k],
                   "unsupported requirement " + (r.empty() || r[0] != ':' ? r : r.substr(1)));
        d.requirements.push_back(r);
      }
    } else if (h == ":types") {
      std::vector<std::string> parents;
      for (const auto& [tn, at] : typed_list(sec, 1)) {
        if (tn.name == "object" || d.has_type(tn.name))
          error_at(ErrorCode::SyntaxError, *at, "duplicate type '" + tn.name + "'");
        d.types.push_back(tn);
        parents.push_back(tn.type);
      }
      for (const auto& p : parents)
        if (!d.has_type(p)) d.types.push_back({p, "object"});
    } else if (h == ":constants") {
      for (const auto& [tn, at] : typed_list(sec, 1)) {
        if (!d.has_type(tn.type)) error_at(ErrorCode::UnknownType, *at, "unknown type '" + tn.type + "'");
        d.constants.push_back(tn);
      }
    } else if (h == ":predicates") {
      declare_schemas(d, sec, false);
    } else if (h == ":functions") {
      declare_schemas(d, sec, true);
    } else if (h == ":action") {
      parse_action(d, sec);
    } else {
      error_at(ErrorCode::SyntaxError, sec, "unsupported domain section '" + h + "'");
    }
  }
  return d;
}

ProblemDef parse_problem(const std::string& text, const DomainDef& domain) {
  const SExpr root = Reader(text).read_root();
  if (head(root) != "define") error_at(ErrorCode::SyntaxError, root, "expected (define ...)");
  if (root.items.size() < 2 || head(root.items[1]) != "problem" || root.items[1].items.size() != 2)
    error_at(ErrorCode::SyntaxError, root, "expected (problem <name>)");

  ProblemDef p;
  p.name = expect_name(root.items[1].items[1], "problem name");
  const ActionScope scope{domain, nullptr, &p.objects};
  bool have_goal = false;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& sec = expect_list(root.items[i], "problem section");
    const std::string& h = head(sec);
    if (h == ":domain") {
      if (sec.items.size() != 2) error_at(ErrorCode::SyntaxError, sec, "expected (:domain <name>)");
      p.domain_name = expect_name(sec.items[1], "domain name");
      if (p.domain_name != domain.name)
        error_at(ErrorCode::SyntaxError, sec, "problem is for domain '" + p.domain_name + "', not '" + domain.name + "'");
    } else if (h == ":requirements") {
      continue;
    } else if (h == ":objects") {
      for (const auto& [tn, at] : typed_list(sec, 1)) {
        if (!domain.has_type(tn.type)) error_at(ErrorCode::UnknownType, *at, "unknown type '" + tn.type + "'");
        const bool dup = std::any_of(p.objects.begin(), p.objects.end(), [&](const TypedName& o) { return o.name == tn.name; }) ||
                         std::any_of(domain.constants.begin(), domain.constants.end(),
                                     [&](const TypedName& o) { return o.name == tn.name; });
        if (dup) error_at(ErrorCode::SyntaxError, *at, "duplicate object '" + tn.name + "'");
        p.objects.push_back(tn);
      }
    } else if (h == ":init") {
      for (std::size_t k = 1; k < sec.items.size(); ++k) {
        const SExpr& item = sec.items[k];
        if (head(item) == "=") {
          if (item.items.size() != 3 || item.items[2].is_list)
            error_at(ErrorCode::SyntaxError, item, "expected (= (<function> ...) <number>)");
          double v = 0;
          if (!parse_number(item.items[2].atom, v) || v < 0)
            error_at(ErrorCode::SyntaxError, item.items[2], "function value must be a non-negative number");
          if (head(item.items[1]) == "total-cost" && item.items[1].items.size() == 1) continue;
          p.numeric[parse_atom(scope, item.items[1], true)] = v;
          continue;
        }
        if (head(item) == "not") error_at(ErrorCode::SyntaxError, item, "negative literals are not allowed in :init");
        p.init.insert(parse_atom(scope, item, false));
      }
    } else if (h == ":goal") {
      if (sec.items.size() != 2) error_at(ErrorCode::SyntaxError, sec, "expected (:goal <formula>)");
      for (const SExpr* c : conjuncts(sec.items[1])) {
        if (head(*c) == "not") error_at(ErrorCode::SyntaxError, *c, "negative goals are not supported");
        p.goal.push_back(parse_atom(scope, *c, false));
      }
      have_goal = true;
    } else if (h == ":metric") {
      if (sec.items.size() != 3 || !is_keyword(sec.items[1], "minimize") || head(sec.items[2]) != "total-cost")
        error_at(ErrorCode::SyntaxError, sec, "only (:metric minimize (total-cost)) is supported");
      p.minimize_total_cost = true;
    } else {
      error_at(ErrorCode::SyntaxError, sec, "unsupported problem section '" + h + "'");
    }
  }
  if (p.domain_name.empty()) error_at(ErrorCode::SyntaxError, root, "missing (:domain ...)");
  if (!have_goal) error_at(ErrorCode::SyntaxError, root, "missing (:goal ...)");
  return p;
}

std::vector<Literal> parse_literals(const std::string& text, const DomainDef& domain, const ActionSchema& action) {
  const SExpr root = Reader(text).read_root();
  const ActionScope scope{domain, &action.params, nullptr};
  std::vector<Literal> out;
  for (const SExpr* c : conjuncts(root)) out.push_back(parse_literal(scope, *c, true));
  return out;
}

}  // namespace mobman::pddl

#include "mobman/planner.hpp"

#include "mobman/error.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace mobman::pddl {

namespace {

Atom substitute(const Atom& a, const std::vector<TypedName>& params, const std::vector<std::string>& args) {
  Atom out{a.predicate, {}};
  for (const auto& x : a.args) {
    auto it = std::find_if(params.begin(), params.end(), [&](const TypedName& p) { return p.name == x; });
    out.args.push_back(it == params.end() ? x : args[static_cast<std::size_t>(it - params.begin())]);
  }
  return out;
}

bool uses_costs(const DomainDef& d) {
  return std::any_of(d.actions.begin(), d.actions.end(),
                     [](const ActionSchema& a) { return a.cost.kind != CostExpr::Kind::None; });
}

using Bits = std::vector<std::uint64_t>;

struct BitsHash {
  std::size_t operator()(const Bits& b) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto w : b) {
      h ^= w;
      h *= 1099511628211ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

struct IndexedAction {
  std::vector<int> pre_pos, pre_neg, add, del;
};

bool test(const Bits& b, int i) { return (b[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u; }
void set(Bits& b, int i, bool v) {
  const std::uint64_t m = std::uint64_t{1} << (i & 63);
  if (v)
    b[static_cast<std::size_t>(i) >> 6] |= m;
  else
    b[static_cast<std::size_t>(i) >> 6] &= ~m;
}

}  // namespace

std::string GroundAction::name() const {
  std::string out = "(" + schema;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

PlanMode parse_plan_mode(const std::string& s) {
  if (s == "optimal") return PlanMode::Optimal;
  if (s == "greedy") return PlanMode::Greedy;
  fail(ErrorCode::InvalidArgument, "unknown planner mode '" + s + "' (expected optimal or greedy)");
}

const char* to_string(PlanMode m) { return m == PlanMode::Optimal ? "optimal" : "greedy"; }

std::optional<GroundAction> instantiate(const DomainDef& domain, const ProblemDef& problem,
                                        const ActionSchema& schema, const std::vector<std::string>& args) {
  GroundAction g;
  g.schema = schema.name;
  g.args = args;
  for (const auto& l : schema.precondition)
    (l.negated ? g.pre_neg : g.pre_pos).push_back(substitute(l.atom, schema.params, args));
  for (const auto& a : schema.add) g.add.push_back(substitute(a, schema.params, args));
  for (const auto& a : schema.del) g.del.push_back(substitute(a, schema.params, args));
  switch (schema.cost.kind) {
    case CostExpr::Kind::None:
      // Without any action costs every step counts as one.
      g.cost = uses_costs(domain) ? 0.0 : 1.0;
      break;
    case CostExpr::Kind::Constant:
      g.cost = schema.cost.value;
      break;
    case CostExpr::Kind::Function: {
      auto it = problem.numeric.find(substitute(schema.cost.term, schema.params, args));
      if (it == problem.numeric.end()) return std::nullopt;
      g.cost = it->second;
      break;
    }
  }
  return g;
}

std::vector<GroundAction> ground(const DomainDef& domain, const ProblemDef& problem) {
  std::set<std::string> added, deleted;
  for (const auto& a : domain.actions) {
    for (const auto& x : a.add) added.insert(x.predicate);
    for (const auto& x : a.del) deleted.insert(x.predicate);
  }
  const auto universe = problem.universe(domain);
  std::vector<GroundAction> out;
  for (const auto& schema : domain.actions) {
    std::vector<std::vector<std::string>> domains;
    for (const auto& p : schema.params) {
      std::vector<std::string> objs;
      for (const auto& o : universe)
        if (domain.is_subtype(o.type, p.type)) objs.push_back(o.name);
      domains.push_back(std::move(objs));
    }
    if (std::any_of(domains.begin(), domains.end(), [](const auto& v) { return v.empty(); })) continue;
    std::vector<std::size_t> idx(domains.size(), 0);
    while (true) {
      std::vector<std::string> args;
      for (std::size_t i = 0; i < idx.size(); ++i) args.push_back(domains[i][idx[i]]);
      if (auto g = instantiate(domain, problem, schema, args)) {
        bool possible = true;
        for (const auto& a : g->pre_pos)
          if (!added.count(a.predicate) && !problem.init.count(a)) possible = false;
        for (const auto& a : g->pre_neg)
          if (!deleted.count(a.predicate) && problem.init.count(a)) possible = false;
        if (possible) out.push_back(std::move(*g));
      }
      bool done = true;
      for (std::size_t k = idx.size(); k-- > 0;) {
        if (++idx[k] < domains[k].size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
  }
  std::sort(out.begin(), out.end(), [](const GroundAction& a, const GroundAction& b) { return a.name() < b.name(); });
  return out;
}

bool satisfies(const std::set<Atom>& state, const std::vector<Atom>& goal) {
  return std::all_of(goal.begin(), goal.end(), [&](const Atom& g) { return state.count(g) > 0; });
}

bool applicable(const GroundAction& a, const std::set<Atom>& state) {
  for (const auto& p : a.pre_pos)
    if (!state.count(p)) return false;
  for (const auto& p : a.pre_neg)
    if (state.count(p)) return false;
  return true;
}

std::set<Atom> apply_action(const GroundAction& a, const std::set<Atom>& state) {
  std::set<Atom> next = state;
  for (const auto& d : a.del) next.erase(d);
  for (const auto& x : a.add) next.insert(x);
  return next;
}

Plan plan(const DomainDef& domain, const ProblemDef& problem, PlanMode mode) {
  const std::vector<GroundAction> actions = ground(domain, problem);

  std::map<Atom, int> index;
  auto id = [&](const Atom& a) {
    auto [it, fresh] = index.emplace(a, static_cast<int>(index.size()));
    (void)fresh;
    return it->second;
  };
  for (const auto& a : problem.init) id(a);
  for (const auto& g : problem.goal) id(g);
  std::vector<IndexedAction> ia;
  ia.reserve(actions.size());
  for (const auto& a : actions) {
    IndexedAction x;
    for (const auto& p : a.pre_pos) x.pre_pos.push_back(id(p));
    for (const auto& p : a.pre_neg) x.pre_neg.push_back(id(p));
    for (const auto& p : a.add) x.add.push_back(id(p));
    for (const auto& p : a.del) x.del.push_back(id(p));
    ia.push_back(std::move(x));
  }
  const std::size_t words = (index.size() + 63) / 64 + 1;
  Bits init(words, 0);
  for (const auto& a : problem.init) set(init, index.at(a), true);
  std::vector<int> goal;
  for (const auto& g : problem.goal) goal.push_back(index.at(g));

  auto unmet = [&](const Bits& s) {
    int n = 0;
    for (int g : goal) n += test(s, g) ? 0 : 1;
    return n;
  };

  struct Node {
    Bits state;
    double g;
    int parent;
    int action;
  };
  std::vector<Node> nodes;
  // (priority, g, seq); smaller first.
  using Key = std::tuple<double, std::uint64_t, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> open;
  std::unordered_map<Bits, double, BitsHash> best;
  std::uint64_t seq = 0;

  auto priority = [&](const Bits& s, double g) { return mode == PlanMode::Optimal ? g : static_cast<double>(unmet(s)); };
  nodes.push_back({init, 0.0, -1, -1});
  best.emplace(init, 0.0);
  open.emplace(priority(init, 0.0), seq++, 0);

  std::size_t expanded = 0;
  while (!open.empty()) {
    const auto [pri, s, ni] = open.top();
    open.pop();
    (void)s;
    const Node node = nodes[static_cast<std::size_t>(ni)];
    if (mode == PlanMode::Optimal) {
      if (node.g > best.at(node.state)) continue;  // stale entry
    }
    (void)pri;
    ++expanded;
    if (unmet(node.state) == 0) {
      Plan result;
      result.cost = node.g;
      result.expanded = expanded;
      for (int k = ni; nodes[static_cast<std::size_t>(k)].parent >= 0; k = nodes[static_cast<std::size_t>(k)].parent)
        result.steps.push_back(actions[static_cast<std::size_t>(nodes[static_cast<std::size_t>(k)].action)]);
      std::reverse(result.steps.begin(), result.steps.end());
      return result;
    }
    for (std::size_t a = 0; a < ia.size(); ++a) {
      const IndexedAction& x = ia[a];
      bool ok = true;
      for (int p : x.pre_pos) ok = ok && test(node.state, p);
      for (int p : x.pre_neg) ok = ok && !test(node.state, p);
      if (!ok) continue;
      Bits next = node.state;
      for (int p : x.del) set(next, p, false);
      for (int p : x.add) set(next, p, true);
      const double g = node.g + actions[a].cost;
      auto it = best.find(next);
      if (it != best.end()) {
        if (mode == PlanMode::Greedy || g >= it->second) continue;
        it->second = g;
      } else {
        best.emplace(next, g);
      }
      nodes.push_back({std::move(next), g, ni, static_cast<int>(a)});
      const int child = static_cast<int>(nodes.size() - 1);
      open.emplace(priority(nodes.back().state, g), seq++, child);
    }
  }
  fail(ErrorCode::Unsolvable, "no plan reaches the goal (" + std::to_string(expanded) + " states explored)");
}

Validation validate(const DomainDef& domain, const ProblemDef& problem, const std::vector<Atom>& steps) {
  Validation v;
  const auto universe = problem.universe(domain);
  std::set<Atom> state = problem.init;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Atom& step = steps[i];
    auto reject = [&](const std::string& why) {
      v.valid = false;
      v.failing_step = static_cast<int>(i);
      v.reason = to_string(step) + ": " + why;
      return v;
    };
    const ActionSchema* schema = domain.action(step.predicate);
    if (!schema) return reject("unknown action");
    if (schema->params.size() != step.args.size()) return reject("wrong number of arguments");
    for (std::size_t k = 0; k < step.args.size(); ++k) {
      auto it = std::find_if(universe.begin(), universe.end(), [&](const TypedName& o) { return o.name == step.args[k]; });
      if (it == universe.end()) return reject("unknown object " + step.args[k]);
      if (!domain.is_subtype(it->type, schema->params[k].type)) return reject("argument " + step.args[k] + " has the wrong type");
    }
    const auto g = instantiate(domain, problem, *schema, step.args);
    if (!g) return reject("cost function undefined");
    for (const auto& p : g->pre_pos)
      if (!state.count(p)) return reject("precondition " + to_string(p) + " does not hold");
    for (const auto& p : g->pre_neg)
      if (state.count(p)) return reject("precondition (not " + to_string(p) + ") does not hold");
    state = apply_action(*g, state);
    v.cost += g->cost;
  }
  for (const auto& goal : problem.goal) {
    if (!state.count(goal)) {
      v.valid = false;
      v.failing_step = -1;
      v.reason = "goal " + to_string(goal) + " does not hold";
      return v;
    }
  }
  v.valid = true;
  return v;
}

std::string format_plan(const Plan& p) {
  std::string out;
  for (const auto& s : p.steps) out += s.name() + "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "; cost = %.17g\n", p.cost);
  return out + buf;
}

std::vector<Atom> parse_plan(const std::string& text) {
  std::vector<Atom> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto semi = line.find(';');
    if (semi != std::string::npos) line.resize(semi);
    std::string norm;
    for (char c : line) norm += (c == '(' || c == ')') ? std::string(" ") + c + " " : std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::istringstream ts(norm);
    std::vector<std::string> tok;
    for (std::string t; ts >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    // Optional "0:" step prefix.
    std::size_t b = 0;
    if (!tok[0].empty() && tok[0].back() == ':') b = 1;
    if (tok.size() < b + 3 || tok[b] != "(" || tok.back() != ")")
      fail(ErrorCode::SyntaxError, "plan line " + std::to_string(lineno) + ": expected (action args...)");
    Atom a;
    a.predicate = tok[b + 1];
    for (std::size_t k = b + 2; k + 1 < tok.size(); ++k) {
      if (tok[k] == "(" || tok[k] == ")")
        fail(ErrorCode::SyntaxError, "plan line " + std::to_string(lineno) + ": nested parentheses");
      a.args.push_back(tok[k]);
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace mobman::pddl

#include "oarc/markov_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace oarc {

namespace {
constexpr double kMassTol = 1e-12;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

MarkovTree::MarkovTree(std::vector<StateId> parent, std::vector<double> p,
                       std::vector<double> cost)
    : parent_(std::move(parent)), p_(std::move(p)), cost_(std::move(cost)) {
  const int n = static_cast<int>(parent_.size());
  if (n == 0) throw std::invalid_argument("tree: no states");
  if (p_.size() != parent_.size() || cost_.size() != parent_.size())
    throw std::invalid_argument("tree: array length mismatch");

  int roots = 0;
  for (StateId i = 0; i < n; ++i) {
    const StateId pa = parent_[static_cast<std::size_t>(i)];
    if (pa == kNoState) {
      root_ = i;
      ++roots;
    } else if (pa < 0 || pa >= n || pa == i) {
      throw std::invalid_argument("tree: bad parent id");
    }
  }
  if (roots != 1) throw std::invalid_argument("tree: must have exactly one root");

  // Levels by iterating until fixpoint; a cycle leaves states unresolved.
  level_.assign(static_cast<std::size_t>(n), -1);
  level_[static_cast<std::size_t>(root_)] = 0;
  std::vector<StateId> frontier{root_};
  std::vector<std::vector<StateId>> kids(static_cast<std::size_t>(n));
  for (StateId i = 0; i < n; ++i)
    if (i != root_) kids[static_cast<std::size_t>(parent_[static_cast<std::size_t>(i)])].push_back(i);
  int resolved = 1;
  while (!frontier.empty()) {
    std::vector<StateId> next;
    for (StateId i : frontier) {
      for (StateId k : kids[static_cast<std::size_t>(i)]) {
        level_[static_cast<std::size_t>(k)] = level_[static_cast<std::size_t>(i)] + 1;
        next.push_back(k);
        ++resolved;
      }
    }
    frontier = std::move(next);
  }
  if (resolved != n) throw std::invalid_argument("tree: cycle in parent links");
  levels_ = 1 + *std::max_element(level_.begin(), level_.end());

  child_offset_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (StateId i = 0; i < n; ++i)
    child_offset_[static_cast<std::size_t>(i) + 1] =
        child_offset_[static_cast<std::size_t>(i)] +
        static_cast<std::int32_t>(kids[static_cast<std::size_t>(i)].size());
  child_flat_.reserve(static_cast<std::size_t>(n) - 1);
  for (StateId i = 0; i < n; ++i)
    for (StateId k : kids[static_cast<std::size_t>(i)]) child_flat_.push_back(k);

  theta_ = 1.0;
  for (StateId i = 0; i < n; ++i) theta_ = std::min(theta_, abandon_prob(i));
}

std::span<const StateId> MarkovTree::children(StateId i) const {
  const auto lo = static_cast<std::size_t>(child_offset_[static_cast<std::size_t>(i)]);
  const auto hi = static_cast<std::size_t>(child_offset_[static_cast<std::size_t>(i) + 1]);
  return {child_flat_.data() + lo, hi - lo};
}

double MarkovTree::abandon_prob(StateId i) const {
  double mass = 0.0;
  for (StateId k : children(i)) mass += p(k);
  return 1.0 - mass;
}

StateSet::StateSet(std::initializer_list<StateId> ids) : ids_(ids) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

StateSet::StateSet(std::vector<StateId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool StateSet::contains(StateId i) const {
  return std::binary_search(ids_.begin(), ids_.end(), i);
}

void StateSet::insert(StateId i) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), i);
  if (it == ids_.end() || *it != i) ids_.insert(it, i);
}

void StateSet::erase(StateId i) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), i);
  if (it != ids_.end() && *it == i) ids_.erase(it);
}

ValidationReport validate(const MarkovTree& tree) {
  ValidationReport report;
  auto add = [&report](StateId s, std::string msg) {
    report.issues.push_back({s, std::move(msg)});
  };
  for (StateId i = 0; i < tree.size(); ++i) {
    if (tree.cost(i) <= 0.0) add(i, "non-positive cost");
    const double pi = tree.p(i);
    if (i == tree.root()) {
      if (pi != 1.0) add(i, "root transition probability must be 1");
    } else if (!(pi > 0.0) || pi > 1.0) {
      add(i, "transition probability outside (0,1]");
    }
    if (i != tree.root() && tree.level(i) != tree.level(tree.parent(i)) + 1)
      add(i, "parent not one level below");  // unreachable with derived levels
    double mass = 0.0;
    for (StateId k : tree.children(i)) mass += tree.p(k);
    if (mass > 1.0 + kMassTol) add(i, "children probability mass > 1");
  }
  return report;
}

ValidationReport validate(const std::vector<StateId>& parent,
                          const std::vector<double>& p,
                          const std::vector<double>& cost) {
  ValidationReport report;
  auto add = [&report](StateId s, std::string msg) {
    report.issues.push_back({s, std::move(msg)});
  };
  const int n = static_cast<int>(parent.size());
  if (n == 0) {
    add(kNoState, "no states");
    return report;
  }
  if (p.size() != parent.size() || cost.size() != parent.size()) {
    add(kNoState, "array length mismatch");
    return report;
  }
  int roots = 0;
  bool structural = true;
  for (StateId i = 0; i < n; ++i) {
    const StateId pa = parent[static_cast<std::size_t>(i)];
    if (pa == kNoState) {
      ++roots;
    } else if (pa < 0 || pa >= n || pa == i) {
      add(i, "bad parent id");
      structural = false;
    }
  }
  if (roots == 0) {
    add(kNoState, "no root");
    structural = false;
  } else if (roots > 1) {
    add(kNoState, "multiple roots");
    structural = false;
  }
  if (structural) {
    // Cycle check: every state must reach a root within n hops.
    for (StateId i = 0; i < n && structural; ++i) {
      StateId a = i;
      int hops = 0;
      while (a != kNoState && hops <= n) {
        a = parent[static_cast<std::size_t>(a)];
        ++hops;
      }
      if (a != kNoState) {
        add(i, "cycle in parent links");
        structural = false;
      }
    }
  }
  if (!structural) return report;
  const MarkovTree tree(parent, p, cost);
  auto semantic = validate(tree);
  report.issues.insert(report.issues.end(), semantic.issues.begin(),
                       semantic.issues.end());
  return report;
}

std::vector<double> pass_prob(const MarkovTree& tree) {
  std::vector<double> pi(static_cast<std::size_t>(tree.size()), 0.0);
  // States sorted by level so parents are resolved first.
  std::vector<StateId> order(static_cast<std::size_t>(tree.size()));
  for (StateId i = 0; i < tree.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](StateId a, StateId b) { return tree.level(a) < tree.level(b); });
  for (StateId i : order) {
    pi[static_cast<std::size_t>(i)] =
        i == tree.root()
            ? 1.0
            : pi[static_cast<std::size_t>(tree.parent(i))] * tree.p(i);
  }
  return pi;
}

std::vector<double> future_cost(const MarkovTree& tree) {
  std::vector<double> cf(static_cast<std::size_t>(tree.size()), 0.0);
  std::vector<StateId> order(static_cast<std::size_t>(tree.size()));
  for (StateId i = 0; i < tree.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](StateId a, StateId b) { return tree.level(a) > tree.level(b); });
  for (StateId i : order) {
    double v = tree.cost(i);
    for (StateId k : tree.children(i)) v += tree.p(k) * cf[static_cast<std::size_t>(k)];
    cf[static_cast<std::size_t>(i)] = v;
  }
  return cf;
}

StateSet ancestors(const MarkovTree& tree, StateId i) {
  std::vector<StateId> ids;
  for (StateId a = i; a != kNoState; a = tree.parent(a)) ids.push_back(a);
  return StateSet(std::move(ids));
}

StateSet subtree(const MarkovTree& tree, StateId i) {
  std::vector<StateId> ids;
  std::vector<StateId> stack{i};
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    ids.push_back(s);
    for (StateId k : tree.children(s)) stack.push_back(k);
  }
  return StateSet(std::move(ids));
}

StateSet subtree(const MarkovTree& tree, const StateSet& x) {
  std::vector<char> seen(static_cast<std::size_t>(tree.size()), 0);
  std::vector<StateId> ids;
  std::vector<StateId> stack(x.begin(), x.end());
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(s)]) continue;
    seen[static_cast<std::size_t>(s)] = 1;
    ids.push_back(s);
    for (StateId k : tree.children(s)) stack.push_back(k);
  }
  return StateSet(std::move(ids));
}

StateSet top_set(const MarkovTree& tree, const StateSet& x) {
  // i is in Top(X) iff i is in X and no proper ancestor of i is in X.
  std::vector<StateId> top;
  for (StateId i : x) {
    bool covered = false;
    for (StateId a = tree.parent(i); a != kNoState; a = tree.parent(a)) {
      if (x.contains(a)) {
        covered = true;
        break;
      }
    }
    if (!covered) top.push_back(i);
  }
  return StateSet(std::move(top));
}

std::string tree_to_text(const MarkovTree& tree) {
  std::string out;
  for (StateId i = 0; i < tree.size(); ++i) {
    out += std::to_string(i);
    out += ' ';
    out += tree.parent(i) == kNoState ? "-" : std::to_string(tree.parent(i));
    out += ' ';
    out += format_double(tree.p(i));
    out += ' ';
    out += format_double(tree.cost(i));
    out += '\n';
  }
  return out;
}

MarkovTree tree_from_text(const std::string& text) {
  struct Row {
    StateId id, parent;
    double p, cost;
  };
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string id_tok, parent_tok;
    double p = 0.0, cost = 0.0;
    if (!(ls >> id_tok >> parent_tok >> p >> cost))
      throw std::invalid_argument("tree text: malformed line: " + line);
    Row row;
    row.id = static_cast<StateId>(std::stol(id_tok));
    row.parent = parent_tok == "-" ? kNoState : static_cast<StateId>(std::stol(parent_tok));
    row.p = p;
    row.cost = cost;
    rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("tree text: no states");
  const auto n = rows.size();
  std::vector<StateId> parent(n, kNoState);
  std::vector<double> p(n, 0.0), cost(n, 0.0);
  std::vector<char> seen(n, 0);
  for (const Row& r : rows) {
    if (r.id < 0 || static_cast<std::size_t>(r.id) >= n || seen[static_cast<std::size_t>(r.id)])
      throw std::invalid_argument("tree text: ids must be dense and unique");
    seen[static_cast<std::size_t>(r.id)] = 1;
    parent[static_cast<std::size_t>(r.id)] = r.parent;
    p[static_cast<std::size_t>(r.id)] = r.p;
    cost[static_cast<std::size_t>(r.id)] = r.cost;
  }
  return MarkovTree(std::move(parent), std::move(p), std::move(cost));
}

std::string tree_to_json(const MarkovTree& tree) {
  nlohmann::json states = nlohmann::json::array();
  for (StateId i = 0; i < tree.size(); ++i) {
    nlohmann::json s;
    s["id"] = i;
    if (tree.parent(i) == kNoState)
      s["parent"] = nullptr;
    else
      s["parent"] = tree.parent(i);
    s["p"] = tree.p(i);
    s["cost"] = tree.cost(i);
    states.push_back(std::move(s));
  }
  return nlohmann::json{{"states", std::move(states)}}.dump(2) + "\n";
}

MarkovTree tree_from_json(const std::string& json) {
  const auto doc = nlohmann::json::parse(json);
  const auto& states = doc.at("states");
  const auto n = states.size();
  if (n == 0) throw std::invalid_argument("tree json: no states");
  std::vector<StateId> parent(n, kNoState);
  std::vector<double> p(n, 0.0), cost(n, 0.0);
  std::vector<char> seen(n, 0);
  for (const auto& s : states) {
    const auto id = s.at("id").get<StateId>();
    if (id < 0 || static_cast<std::size_t>(id) >= n || seen[static_cast<std::size_t>(id)])
      throw std::invalid_argument("tree json: ids must be dense and unique");
    seen[static_cast<std::size_t>(id)] = 1;
    parent[static_cast<std::size_t>(id)] =
        s.at("parent").is_null() ? kNoState : s.at("parent").get<StateId>();
    p[static_cast<std::size_t>(id)] = s.at("p").get<double>();
    cost[static_cast<std::size_t>(id)] = s.at("cost").get<double>();
  }
  return MarkovTree(std::move(parent), std::move(p), std::move(cost));
}

MarkovTree load_tree(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") return tree_from_json(buf.str());
  return tree_from_text(buf.str());
}

void save_tree(const MarkovTree& tree, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tree file: " + path.string());
  out << (path.extension() == ".json" ? tree_to_json(tree) : tree_to_text(tree));
}

}  // namespace oarc

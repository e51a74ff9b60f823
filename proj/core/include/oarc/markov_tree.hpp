#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oarc {

using StateId = std::int32_t;
inline constexpr StateId kNoState = -1;

/// Tree-shaped Markov chain over job states. Each non-root state has a unique
/// parent one level below it and is reached from the parent with probability
/// p(i); residual probability mass at a state is abandonment. Immutable after
/// construction, safe to share across threads.
class MarkovTree {
 public:
  /// Builds from parallel arrays indexed by dense state id. parent[i] is
  /// kNoState for the root. Structural defects (no unique root, bad parent
  /// ids, cycles) throw std::invalid_argument; semantic defects (costs,
  /// probability mass) are left to validate().
  MarkovTree(std::vector<StateId> parent, std::vector<double> p,
             std::vector<double> cost);

  int size() const { return static_cast<int>(parent_.size()); }
  StateId root() const { return root_; }
  StateId parent(StateId i) const { return parent_[static_cast<std::size_t>(i)]; }
  double p(StateId i) const { return p_[static_cast<std::size_t>(i)]; }
  double cost(StateId i) const { return cost_[static_cast<std::size_t>(i)]; }
  int level(StateId i) const { return level_[static_cast<std::size_t>(i)]; }
  /// Number of levels L (deepest level + 1).
  int levels() const { return levels_; }
  std::span<const StateId> children(StateId i) const;
  std::span<const double> costs() const { return cost_; }

  /// Probability of leaving to the empty state from i.
  double abandon_prob(StateId i) const;
  /// Minimum abandonment probability over all states.
  double theta() const { return theta_; }

 private:
  std::vector<StateId> parent_;
  std::vector<double> p_;
  std::vector<double> cost_;
  std::vector<int> level_;
  std::vector<StateId> child_flat_;
  std::vector<std::int32_t> child_offset_;
  StateId root_ = kNoState;
  int levels_ = 0;
  double theta_ = 0.0;
};

/// Sorted, duplicate-free set of state ids.
class StateSet {
 public:
  StateSet() = default;
  StateSet(std::initializer_list<StateId> ids);
  explicit StateSet(std::vector<StateId> ids);

  bool contains(StateId i) const;
  void insert(StateId i);
  void erase(StateId i);
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::span<const StateId> ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  friend bool operator==(const StateSet&, const StateSet&) = default;

 private:
  std::vector<StateId> ids_;
};

struct ValidationIssue {
  StateId state = kNoState;  // kNoState for whole-tree issues
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// Checks the data-model invariants: unique root, parent one level below,
/// positive costs, p in (0,1] with p(root)=1, child mass <= 1 (tolerance
/// 1e-12). Reports violations instead of throwing.
ValidationReport validate(const MarkovTree& tree);

/// Same checks on raw arrays, including the structural ones the MarkovTree
/// constructor would reject (multiple roots, bad parent ids, cycles).
ValidationReport validate(const std::vector<StateId>& parent,
                          const std::vector<double>& p,
                          const std::vector<double>& cost);

/// pi(i): probability a job ever reaches state i. pi(root) = 1.
std::vector<double> pass_prob(const MarkovTree& tree);

/// c^f(a): expected future holding cost of a job currently in state a,
/// i.e. sum over sub(a) of c(i) pi(i)/pi(a). One bottom-up pass.
std::vector<double> future_cost(const MarkovTree& tree);

/// Top(X): the minimal subset of X whose subtrees cover X.
StateSet top_set(const MarkovTree& tree, const StateSet& x);

StateSet subtree(const MarkovTree& tree, StateId i);
StateSet subtree(const MarkovTree& tree, const StateSet& x);
/// anc(i), including i and the root.
StateSet ancestors(const MarkovTree& tree, StateId i);

// --- serialization ------------------------------------------------------
// Text format: one state per line "id parent p cost" with "-" for the root's
// parent. JSON format: {"states":[{"id","parent","p","cost"}]}. Both
// round-trip doubles exactly.

std::string tree_to_text(const MarkovTree& tree);
MarkovTree tree_from_text(const std::string& text);
std::string tree_to_json(const MarkovTree& tree);
MarkovTree tree_from_json(const std::string& json);

/// Dispatches on extension: ".json" uses the JSON form, anything else text.
MarkovTree load_tree(const std::filesystem::path& path);
void save_tree(const MarkovTree& tree, const std::filesystem::path& path);

}  // namespace oarc

#pragma once

#include <cstdint>
#include <vector>

namespace varinf {

/// Primal network simplex for uncapacitated min-cost transshipment.
///
/// Arc costs are integers, node supplies are doubles summing to zero
/// (positive = source). The spanning-tree basis is kept between calls to
/// solve(), so arcs can be added after a solve and the next solve continues
/// from the previous optimum. This is what column generation needs.
class NetworkSimplex {
 public:
  explicit NetworkSimplex(std::vector<double> supply);

  /// Adds arc u -> v; returns its index.
  std::size_t add_arc(int u, int v, std::int64_t cost);

  /// Runs pivots until no arc has negative reduced cost.
  void solve();

  int node_count() const { return n_; }
  std::size_t arc_count() const { return source_.size() - static_cast<std::size_t>(n_); }
  int arc_source(std::size_t arc) const { return source_[arc + static_cast<std::size_t>(n_)]; }
  int arc_target(std::size_t arc) const { return target_[arc + static_cast<std::size_t>(n_)]; }
  double flow(std::size_t arc) const { return flow_[arc + static_cast<std::size_t>(n_)]; }
  /// Dual values y with y_u - y_v <= cost(u, v) on every arc, tight on basic arcs.
  std::int64_t dual(int node) const { return -pi_[static_cast<std::size_t>(node)]; }
  /// Largest flow left on the artificial arcs (0 for a feasible instance).
  double artificial_flow() const;
  std::size_t pivots() const { return pivots_; }

 private:
  enum : int { kUp = 1, kDown = -1 };

  bool find_entering(std::size_t& arc);
  void pivot(std::size_t in_arc);
  void attach_child(int parent, int child);
  void detach_child(int child);
  void refresh_subtree(int top);

  int n_;
  int root_;
  std::int64_t artificial_cost_ = 0;
  std::vector<int> source_, target_;
  std::vector<std::int64_t> cost_;
  std::vector<double> flow_;
  std::vector<char> in_tree_;

  // spanning tree over n_ + 1 nodes, rooted at root_ = n_
  std::vector<int> parent_, pred_, dir_, depth_;
  std::vector<int> first_child_, next_sibling_, prev_sibling_;
  std::vector<std::int64_t> pi_;

  std::size_t next_block_ = 0;
  std::size_t pivots_ = 0;
  std::vector<double> supply_;
};

}  // namespace varinf

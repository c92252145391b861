#include <varinf/network_simplex.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <varinf/errors.hpp>

namespace varinf {

namespace {
constexpr double kInfFlow = std::numeric_limits<double>::infinity();
// larger than any tree path cost of the real arcs for the problem sizes we allow
constexpr std::int64_t kArtificialCost = 1'000'000'000'000'000LL;
}  // namespace

NetworkSimplex::NetworkSimplex(std::vector<double> supply)
    : n_(static_cast<int>(supply.size())), root_(static_cast<int>(supply.size())), supply_(std::move(supply)) {
  const auto nodes = static_cast<std::size_t>(n_ + 1);
  parent_.assign(nodes, -1);
  pred_.assign(nodes, -1);
  dir_.assign(nodes, kUp);
  depth_.assign(nodes, 0);
  first_child_.assign(nodes, -1);
  next_sibling_.assign(nodes, -1);
  prev_sibling_.assign(nodes, -1);
  pi_.assign(nodes, 0);
  artificial_cost_ = kArtificialCost;

  // artificial star around the root: a strongly feasible starting basis
  for (int u = 0; u < n_; ++u) {
    const auto su = static_cast<std::size_t>(u);
    const double b = supply_[su];
    if (b >= 0.0) {
      source_.push_back(u);
      target_.push_back(root_);
      cost_.push_back(0);
      flow_.push_back(b);
      dir_[su] = kUp;
      pi_[su] = 0;
    } else {
      source_.push_back(root_);
      target_.push_back(u);
      cost_.push_back(artificial_cost_);
      flow_.push_back(-b);
      dir_[su] = kDown;
      pi_[su] = artificial_cost_;
    }
    in_tree_.push_back(1);
    pred_[su] = u;
    depth_[su] = 1;
    attach_child(root_, u);
  }
}

std::size_t NetworkSimplex::add_arc(int u, int v, std::int64_t cost) {
  if (u < 0 || v < 0 || u >= n_ || v >= n_ || u == v) throw ArgumentError("network simplex: invalid arc endpoints");
  if (cost < 0) throw ArgumentError("network simplex: arc costs must be nonnegative");
  source_.push_back(u);
  target_.push_back(v);
  cost_.push_back(cost);
  flow_.push_back(0.0);
  in_tree_.push_back(0);
  return source_.size() - 1 - static_cast<std::size_t>(n_);
}

double NetworkSimplex::artificial_flow() const {
  double worst = 0.0;
  for (int u = 0; u < n_; ++u) worst = std::max(worst, flow_[static_cast<std::size_t>(u)]);
  return worst;
}

void NetworkSimplex::attach_child(int parent, int child) {
  const auto p = static_cast<std::size_t>(parent);
  const auto c = static_cast<std::size_t>(child);
  parent_[c] = parent;
  prev_sibling_[c] = -1;
  next_sibling_[c] = first_child_[p];
  if (first_child_[p] >= 0) prev_sibling_[static_cast<std::size_t>(first_child_[p])] = child;
  first_child_[p] = child;
}

void NetworkSimplex::detach_child(int child) {
  const auto c = static_cast<std::size_t>(child);
  const int prev = prev_sibling_[c];
  const int next = next_sibling_[c];
  if (prev >= 0)
    next_sibling_[static_cast<std::size_t>(prev)] = next;
  else
    first_child_[static_cast<std::size_t>(parent_[c])] = next;
  if (next >= 0) prev_sibling_[static_cast<std::size_t>(next)] = prev;
  parent_[c] = -1;
  prev_sibling_[c] = next_sibling_[c] = -1;
}

void NetworkSimplex::refresh_subtree(int top) {
  std::vector<int> stack{top};
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    const auto su = static_cast<std::size_t>(u);
    const auto sp = static_cast<std::size_t>(parent_[su]);
    const std::int64_t c = cost_[static_cast<std::size_t>(pred_[su])];
    pi_[su] = dir_[su] == kDown ? pi_[sp] + c : pi_[sp] - c;
    depth_[su] = depth_[sp] + 1;
    for (int ch = first_child_[su]; ch >= 0; ch = next_sibling_[static_cast<std::size_t>(ch)]) stack.push_back(ch);
  }
}

bool NetworkSimplex::find_entering(std::size_t& arc) {
  const std::size_t total = source_.size();
  const std::size_t block = std::max<std::size_t>(16, static_cast<std::size_t>(std::sqrt(static_cast<double>(total))));
  std::int64_t best = 0;
  std::size_t seen = 0;
  std::size_t e = next_block_ % total;
  for (std::size_t checked = 0; checked < total; ++checked) {
    if (!in_tree_[e]) {
      const std::int64_t rc = cost_[e] + pi_[static_cast<std::size_t>(source_[e])] - pi_[static_cast<std::size_t>(target_[e])];
      if (rc < best) {
        best = rc;
        arc = e;
      }
    }
    e = e + 1 == total ? 0 : e + 1;
    if (++seen == block) {
      if (best < 0) {
        next_block_ = e;
        return true;
      }
      seen = 0;
    }
  }
  if (best < 0) {
    next_block_ = e;
    return true;
  }
  return false;
}

void NetworkSimplex::pivot(std::size_t in_arc) {
  const int first = source_[in_arc];
  const int second = target_[in_arc];

  int a = first, b = second;
  while (depth_[static_cast<std::size_t>(a)] > depth_[static_cast<std::size_t>(b)]) a = parent_[static_cast<std::size_t>(a)];
  while (depth_[static_cast<std::size_t>(b)] > depth_[static_cast<std::size_t>(a)]) b = parent_[static_cast<std::size_t>(b)];
  while (a != b) {
    a = parent_[static_cast<std::size_t>(a)];
    b = parent_[static_cast<std::size_t>(b)];
  }
  const int join = a;

  // Leaving arc: smallest residual on the cycle; ties go to the last blocking arc
  // met when walking the cycle in flow direction, which keeps the tree strongly feasible.
  double delta = kInfFlow;
  int u_out = -1;
  int side = 0;
  for (int u = first; u != join; u = parent_[static_cast<std::size_t>(u)]) {
    const auto su = static_cast<std::size_t>(u);
    const double d = dir_[su] == kDown ? kInfFlow : flow_[static_cast<std::size_t>(pred_[su])];
    if (d < delta) {
      delta = d;
      u_out = u;
      side = 1;
    }
  }
  for (int u = second; u != join; u = parent_[static_cast<std::size_t>(u)]) {
    const auto su = static_cast<std::size_t>(u);
    const double d = dir_[su] == kUp ? kInfFlow : flow_[static_cast<std::size_t>(pred_[su])];
    if (d <= delta) {
      delta = d;
      u_out = u;
      side = 2;
    }
  }
  if (side == 0) throw std::logic_error("network simplex: unbounded cycle (negative-cost cycle of infinite capacity)");

  if (delta > 0.0) {
    flow_[in_arc] += delta;
    for (int u = first; u != join; u = parent_[static_cast<std::size_t>(u)]) {
      const auto su = static_cast<std::size_t>(u);
      flow_[static_cast<std::size_t>(pred_[su])] += dir_[su] == kDown ? delta : -delta;
    }
    for (int u = second; u != join; u = parent_[static_cast<std::size_t>(u)]) {
      const auto su = static_cast<std::size_t>(u);
      flow_[static_cast<std::size_t>(pred_[su])] += dir_[su] == kUp ? delta : -delta;
    }
  }

  const int u_in = side == 1 ? first : second;
  const int v_in = side == 1 ? second : first;

  std::vector<int> path;
  for (int w = u_in;; w = parent_[static_cast<std::size_t>(w)]) {
    path.push_back(w);
    if (w == u_out) break;
  }
  std::vector<int> old_pred(path.size()), old_dir(path.size());
  for (std::size_t j = 0; j < path.size(); ++j) {
    old_pred[j] = pred_[static_cast<std::size_t>(path[j])];
    old_dir[j] = dir_[static_cast<std::size_t>(path[j])];
    detach_child(path[j]);
  }
  in_tree_[static_cast<std::size_t>(old_pred.back())] = 0;
  in_tree_[in_arc] = 1;

  // reverse the path u_in .. u_out and hang it below v_in through the entering arc
  const auto s0 = static_cast<std::size_t>(u_in);
  pred_[s0] = static_cast<int>(in_arc);
  dir_[s0] = source_[in_arc] == u_in ? kUp : kDown;
  attach_child(v_in, u_in);
  for (std::size_t j = 1; j < path.size(); ++j) {
    const auto sj = static_cast<std::size_t>(path[j]);
    pred_[sj] = old_pred[j - 1];
    dir_[sj] = -old_dir[j - 1];
    attach_child(path[j - 1], path[j]);
  }
  refresh_subtree(u_in);
  ++pivots_;
}

void NetworkSimplex::solve() {
  if (source_.empty()) return;
  std::size_t in_arc = 0;
  while (find_entering(in_arc)) pivot(in_arc);
}

}  // namespace varinf

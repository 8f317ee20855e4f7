#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rbon::detail {
namespace {

// Primal network simplex on the bipartite transport graph plus an artificial
// root joined to every node. Node ids: sources [0, ns), sinks [ns, ns + nt),
// root ns + nt. Real arc a = i * nt + j runs source i -> sink ns + j;
// artificial arc m + u joins node u and the root.
//
// The basis is a spanning tree. Potentials follow the convention
// reduced_cost(a) = cost(a) + pi(src) - pi(dst), zero on tree arcs. Ties in
// the ratio test pick the last blocking arc met when walking the cycle from
// the join node in the direction of flow, which keeps the tree strongly
// feasible and rules out cycling.
class NetworkSimplex {
public:
  NetworkSimplex(std::span<const double> supply, std::span<const double> demand,
                 std::span<const double> cost)
      : ns_(static_cast<int>(supply.size())),
        nt_(static_cast<int>(demand.size())),
        nodes_(ns_ + nt_ + 1),
        root_(ns_ + nt_),
        real_arcs_(static_cast<long>(ns_) * nt_),
        src_(real_arcs_ + nodes_ - 1),
        dst_(real_arcs_ + nodes_ - 1),
        cost_(real_arcs_ + nodes_ - 1),
        flow_(real_arcs_ + nodes_ - 1, 0.0),
        in_tree_(real_arcs_ + nodes_ - 1, 0),
        tree_adj_(nodes_),
        parent_(nodes_),
        pred_(nodes_),
        up_(nodes_),
        depth_(nodes_),
        pi_(nodes_),
        order_(nodes_) {
    double max_cost = 0.0;
    for (long a = 0; a < real_arcs_; ++a) {
      src_[a] = static_cast<int>(a / nt_);
      dst_[a] = ns_ + static_cast<int>(a % nt_);
      cost_[a] = cost[a];
      max_cost = std::max(max_cost, std::abs(cost[a]));
    }
    // Larger than any simple path cost through real arcs.
    const double artificial = (max_cost + 1.0) * nodes_;
    for (int u = 0; u < root_; ++u) {
      const long a = real_arcs_ + u;
      const double b = u < ns_ ? supply[u] : -demand[u - ns_];
      if (b > 0) {
        src_[a] = u;
        dst_[a] = root_;
        cost_[a] = 0.0;
        flow_[a] = b;
      } else {
        src_[a] = root_;
        dst_[a] = u;
        cost_[a] = artificial;
        flow_[a] = -b;
      }
      in_tree_[a] = 1;
      tree_adj_[u].push_back(a);
      tree_adj_[root_].push_back(a);
    }
    block_size_ = std::max<long>(10, static_cast<long>(std::sqrt(static_cast<double>(real_arcs_))));
    rebuild_tree();
  }

  TransportSolution run() {
    TransportSolution out;
    const long max_pivots = 64 * (real_arcs_ + nodes_) + 1000;
    long entering;
    while ((entering = find_entering_arc()) >= 0) {
      if (++out.pivots > static_cast<std::size_t>(max_pivots)) {
        throw std::runtime_error("network simplex exceeded its pivot limit");
      }
      pivot(entering);
    }

    double supply_total = 0.0;
    for (int u = 0; u < ns_; ++u) supply_total += flow_[real_arcs_ + u] + outflow(u);
    for (long a = real_arcs_; a < real_arcs_ + root_; ++a) {
      if (flow_[a] > 1e-9 * std::max(1.0, supply_total)) {
        throw std::runtime_error("transport problem is infeasible");
      }
    }

    out.flow.assign(flow_.begin(), flow_.begin() + real_arcs_);
    for (long a = 0; a < real_arcs_; ++a) out.cost += cost_[a] * flow_[a];
    out.source_dual.resize(ns_);
    out.sink_dual.resize(nt_);
    for (int i = 0; i < ns_; ++i) out.source_dual[i] = -pi_[i];
    for (int j = 0; j < nt_; ++j) out.sink_dual[j] = pi_[ns_ + j];
    return out;
  }

private:
  double outflow(int u) const {
    double s = 0.0;
    for (int j = 0; j < nt_; ++j) s += flow_[static_cast<long>(u) * nt_ + j];
    return s;
  }

  double reduced_cost(long a) const { return cost_[a] + pi_[src_[a]] - pi_[dst_[a]]; }

  // Block search pricing over real arcs. Returns -1 at optimality.
  long find_entering_arc() {
    constexpr double kRelTol = 64 * std::numeric_limits<double>::epsilon();
    long best = -1;
    double best_rc = 0.0;
    long scanned_in_block = 0;
    long a = next_arc_;
    for (long k = 0; k < real_arcs_; ++k, ++a) {
      if (a == real_arcs_) a = 0;
      if (!in_tree_[a]) {
        const double rc = reduced_cost(a);
        const double scale =
            std::max({std::abs(cost_[a]), std::abs(pi_[src_[a]]), std::abs(pi_[dst_[a]]), 1.0});
        if (rc < -kRelTol * scale && rc < best_rc) {
          best_rc = rc;
          best = a;
        }
      }
      if (++scanned_in_block == block_size_) {
        if (best >= 0) {
          next_arc_ = a + 1 == real_arcs_ ? 0 : a + 1;
          return best;
        }
        scanned_in_block = 0;
      }
    }
    if (best >= 0) next_arc_ = a == real_arcs_ ? 0 : a;
    return best;
  }

  void pivot(long in_arc) {
    const int first = src_[in_arc];
    const int second = dst_[in_arc];
    int u = first;
    int v = second;
    while (u != v) {
      if (depth_[u] >= depth_[v]) {
        u = parent_[u];
      } else {
        v = parent_[v];
      }
    }
    const int join = u;

    // Flow enters along src -> dst. On the src side the cycle runs downward
    // (join to src), so arcs pointing up lose flow; on the dst side it runs
    // upward, so arcs pointing down lose flow.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    double delta = kInf;
    int leaving_node = -1;
    for (int w = first; w != join; w = parent_[w]) {
      if (up_[w] && flow_[pred_[w]] < delta) {
        delta = flow_[pred_[w]];
        leaving_node = w;
      }
    }
    for (int w = second; w != join; w = parent_[w]) {
      if (!up_[w] && flow_[pred_[w]] <= delta) {
        delta = flow_[pred_[w]];
        leaving_node = w;
      }
    }
    if (leaving_node < 0) throw std::runtime_error("transport problem is unbounded");

    if (delta > 0) {
      flow_[in_arc] += delta;
      for (int w = first; w != join; w = parent_[w]) {
        flow_[pred_[w]] += up_[w] ? -delta : delta;
      }
      for (int w = second; w != join; w = parent_[w]) {
        flow_[pred_[w]] += up_[w] ? delta : -delta;
      }
    }

    const long out_arc = pred_[leaving_node];
    flow_[out_arc] = 0.0;
    in_tree_[out_arc] = 0;
    std::erase(tree_adj_[src_[out_arc]], out_arc);
    std::erase(tree_adj_[dst_[out_arc]], out_arc);
    in_tree_[in_arc] = 1;
    tree_adj_[src_[in_arc]].push_back(in_arc);
    tree_adj_[dst_[in_arc]].push_back(in_arc);
    rebuild_tree();
  }

  // Re-derives parent, depth, orientation and potentials from the tree arcs
  // by breadth-first search from the root.
  void rebuild_tree() {
    parent_[root_] = -1;
    pred_[root_] = -1;
    depth_[root_] = 0;
    pi_[root_] = 0.0;
    std::size_t head = 0;
    std::size_t tail = 0;
    order_[tail++] = root_;
    while (head < tail) {
      const int u = order_[head++];
      for (long a : tree_adj_[u]) {
        if (a == pred_[u]) continue;
        const int v = src_[a] == u ? dst_[a] : src_[a];
        parent_[v] = u;
        pred_[v] = a;
        depth_[v] = depth_[u] + 1;
        up_[v] = src_[a] == v;
        pi_[v] = up_[v] ? pi_[u] - cost_[a] : pi_[u] + cost_[a];
        order_[tail++] = v;
      }
    }
    if (tail != static_cast<std::size_t>(nodes_)) {
      throw std::logic_error("network simplex basis is not a spanning tree");
    }
  }

  int ns_;
  int nt_;
  int nodes_;
  int root_;
  long real_arcs_;
  std::vector<int> src_;
  std::vector<int> dst_;
  std::vector<double> cost_;
  std::vector<double> flow_;
  std::vector<char> in_tree_;
  std::vector<std::vector<long>> tree_adj_;
  std::vector<int> parent_;
  std::vector<long> pred_;
  std::vector<char> up_;
  std::vector<int> depth_;
  std::vector<double> pi_;
  std::vector<int> order_;
  long block_size_ = 10;
  long next_arc_ = 0;
};

}  // namespace

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const double> cost) {
  if (cost.size() != supply.size() * demand.size()) {
    throw std::invalid_argument("solve_transport: cost has the wrong size");
  }
  for (double s : supply) {
    if (!(s > 0.0)) throw std::invalid_argument("solve_transport: supplies must be positive");
  }
  for (double d : demand) {
    if (!(d > 0.0)) throw std::invalid_argument("solve_transport: demands must be positive");
  }
  if (supply.empty() || demand.empty()) {
    throw std::invalid_argument("solve_transport: empty supply or demand");
  }
  return NetworkSimplex(supply, demand, cost).run();
}

}  // namespace rbon::detail

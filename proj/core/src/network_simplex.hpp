#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rbon::detail {

struct TransportSolution {
  double cost = 0.0;
  // flow[i * n_sinks + j] is the mass moved from source i to sink j.
  std::vector<double> flow;
  // Dual potentials with source_dual[i] + sink_dual[j] <= cost(i, j) and
  // equality on every arc carrying flow.
  std::vector<double> source_dual;
  std::vector<double> sink_dual;
  std::size_t pivots = 0;
};

// Exact solver for the balanced transportation problem
//   min sum_ij cost_ij x_ij  s.t.  sum_j x_ij = supply_i, sum_i x_ij = demand_j, x >= 0
// by the primal network simplex method on the complete bipartite graph.
// Supplies and demands must be strictly positive; any imbalance between
// their totals (rounding noise) is absorbed by the root node. `cost` is
// row-major, supply.size() x demand.size().
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const double> cost);

}  // namespace rbon::detail

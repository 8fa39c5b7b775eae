#pragma once

#include <cstdint>
#include <vector>

namespace speedup {

// Successive-shortest-path min-cost flow with Johnson potentials. Integer
// capacities and costs; ties in Dijkstra are broken by node index, so the
// returned flow is a deterministic function of the edge insertion order.
class MinCostFlowGraph {
 public:
  explicit MinCostFlowGraph(int nodes);
  int AddEdge(int from, int to, int64_t capacity, int64_t cost);
  // Pushes up to `limit` units; returns {flow, cost}.
  struct Result {
    int64_t flow = 0;
    __int128 cost = 0;
  };
  Result Solve(int source, int sink, int64_t limit);
  int64_t Flow(int edge_id) const;

 private:
  struct Edge {
    int to;
    int64_t cap;
    int64_t cost;
  };
  int nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<int64_t> original_cap_;
};

// Exact transport between integer masses `supply` (left atoms) and `demand`
// (right atoms) of equal total. Pairs not listed in `cheap_edges` cost the
// diameter `full_cost`; listed pairs must cost strictly less. All routing at
// full cost goes through one hub node, which is exact because no pair costs
// more than the diameter.
struct TransportEdge {
  int left;
  int right;
  int64_t cost;
};

__int128 SolveTransport(const std::vector<int64_t>& supply, const std::vector<int64_t>& demand,
                        const std::vector<TransportEdge>& cheap_edges, int64_t full_cost);

}  // namespace speedup

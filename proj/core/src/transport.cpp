#include "speedup/transport.hpp"

#include <limits>
#include <queue>
#include <stdexcept>

namespace speedup {

MinCostFlowGraph::MinCostFlowGraph(int nodes) : nodes_(nodes), adj_(nodes) {}

int MinCostFlowGraph::AddEdge(int from, int to, int64_t capacity, int64_t cost) {
  int id = static_cast<int>(edges_.size());
  edges_.push_back({to, capacity, cost});
  adj_[from].push_back(id);
  edges_.push_back({from, 0, -cost});
  adj_[to].push_back(id + 1);
  original_cap_.push_back(capacity);
  original_cap_.push_back(0);
  return id;
}

int64_t MinCostFlowGraph::Flow(int edge_id) const {
  return original_cap_[edge_id] - edges_[edge_id].cap;
}

MinCostFlowGraph::Result MinCostFlowGraph::Solve(int source, int sink, int64_t limit) {
  // Primal-dual: Dijkstra fixes potentials, then a blocking flow saturates
  // every shortest augmenting path at once on the zero-reduced-cost subgraph.
  constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;
  for (const Edge& e : edges_)
    if (e.cap > 0 && e.cost < 0) throw std::invalid_argument("negative edge cost");
  std::vector<int64_t> potential(nodes_, 0);
  Result result;
  std::vector<int64_t> dist(nodes_);
  std::vector<int> level(nodes_), cursor(nodes_);
  auto reduced = [&](int u, const Edge& e) { return e.cost + potential[u] - potential[e.to]; };
  while (result.flow < limit) {
    std::fill(dist.begin(), dist.end(), kInf);
    using Item = std::pair<int64_t, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[source] = 0;
    heap.push({0, source});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d != dist[u]) continue;
      for (int id : adj_[u]) {
        const Edge& e = edges_[id];
        if (e.cap <= 0) continue;
        int64_t nd = d + reduced(u, e);
        if (nd < dist[e.to]) {
          dist[e.to] = nd;
          heap.push({nd, e.to});
        }
      }
    }
    if (dist[sink] >= kInf) break;
    for (int v = 0; v < nodes_; ++v) potential[v] += dist[v] < kInf ? dist[v] : dist[sink];
    // Dinic on admissible edges.
    while (result.flow < limit) {
      std::fill(level.begin(), level.end(), -1);
      std::queue<int> bfs;
      level[source] = 0;
      bfs.push(source);
      while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop();
        for (int id : adj_[u]) {
          const Edge& e = edges_[id];
          if (e.cap > 0 && level[e.to] < 0 && reduced(u, e) == 0) {
            level[e.to] = level[u] + 1;
            bfs.push(e.to);
          }
        }
      }
      if (level[sink] < 0) break;
      std::fill(cursor.begin(), cursor.end(), 0);
      auto dfs = [&](auto&& self, int u, int64_t pushable) -> int64_t {
        if (u == sink) return pushable;
        for (int& c = cursor[u]; c < static_cast<int>(adj_[u].size()); ++c) {
          int id = adj_[u][c];
          Edge& e = edges_[id];
          if (e.cap <= 0 || level[e.to] != level[u] + 1 || reduced(u, e) != 0) continue;
          int64_t got = self(self, e.to, std::min(pushable, e.cap));
          if (got > 0) {
            e.cap -= got;
            edges_[id ^ 1].cap += got;
            result.cost += static_cast<__int128>(got) * e.cost;
            return got;
          }
        }
        return 0;
      };
      while (result.flow < limit) {
        int64_t got = dfs(dfs, source, limit - result.flow);
        if (got == 0) break;
        result.flow += got;
      }
    }
  }
  return result;
}

__int128 SolveTransport(const std::vector<int64_t>& supply, const std::vector<int64_t>& demand,
                        const std::vector<TransportEdge>& cheap_edges, int64_t full_cost) {
  const int a = static_cast<int>(supply.size());
  const int b = static_cast<int>(demand.size());
  int64_t total = 0;
  for (int64_t s : supply) total += s;
  // Doubled costs keep the hub split into two integer halves.
  const int source = 0, hub = a + b + 1, sink = a + b + 2;
  MinCostFlowGraph graph(a + b + 3);
  for (int i = 0; i < a; ++i)
    if (supply[i] > 0) graph.AddEdge(source, 1 + i, supply[i], 0);
  for (int j = 0; j < b; ++j)
    if (demand[j] > 0) graph.AddEdge(1 + a + j, sink, demand[j], 0);
  for (const TransportEdge& e : cheap_edges)
    if (supply[e.left] > 0 && demand[e.right] > 0)
      graph.AddEdge(1 + e.left, 1 + a + e.right, total, 2 * e.cost);
  for (int i = 0; i < a; ++i)
    if (supply[i] > 0) graph.AddEdge(1 + i, hub, total, full_cost);
  for (int j = 0; j < b; ++j)
    if (demand[j] > 0) graph.AddEdge(hub, 1 + a + j, total, full_cost);
  MinCostFlowGraph::Result r = graph.Solve(source, sink, total);
  if (r.flow != total) throw std::logic_error("transport did not saturate");
  return r.cost / 2;
}

}  // namespace speedup

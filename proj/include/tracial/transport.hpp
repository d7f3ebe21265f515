#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tracial {

/// Exact minimum-cost transport between two discrete distributions by
/// successive shortest paths with Dijkstra potentials on the dense bipartite
/// residual graph. `cost(i, j)` >= 0; supply and demand are nonnegative with
/// equal totals. Returns the optimal total cost.
template <typename Scalar>
Scalar min_cost_transport(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& cost,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& supply,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& demand) {
  const Eigen::Index n = cost.rows(), m = cost.cols();
  if (supply.size() != n || demand.size() != m) throw std::invalid_argument("transport: size mismatch");
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Scalar scale = std::max<Scalar>(supply.sum(), demand.sum());
  const Scalar eps = scale * Scalar(64) * std::numeric_limits<Scalar>::epsilon();

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> flow =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, m);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> left = supply, right = demand;
  // Nodes: sources 0..n-1, sinks n..n+m-1. Potentials keep reduced costs >= 0.
  std::vector<Scalar> pot(static_cast<std::size_t>(n + m), Scalar(0));
  std::vector<Scalar> dist(static_cast<std::size_t>(n + m));
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n + m));
  std::vector<char> done(static_cast<std::size_t>(n + m));

  for (;;) {
    bool any_supply = false;
    for (Eigen::Index i = 0; i < n; ++i) any_supply |= left(i) > eps;
    if (!any_supply) break;

    std::fill(dist.begin(), dist.end(), inf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i)
      if (left(i) > eps) dist[static_cast<std::size_t>(i)] = 0;

    Eigen::Index target = -1;
    for (;;) {
      Eigen::Index u = -1;
      for (Eigen::Index v = 0; v < n + m; ++v)
        if (!done[v] && dist[v] < inf && (u < 0 || dist[v] < dist[u])) u = v;
      if (u < 0) break;
      done[u] = 1;
      if (u >= n && right(u - n) > eps) {
        target = u;
        break;
      }
      if (u < n) {
        for (Eigen::Index j = 0; j < m; ++j) {
          const Eigen::Index v = n + j;
          if (done[v]) continue;
          const Scalar reduced = std::max<Scalar>(Scalar(0), cost(u, j) + pot[u] - pot[v]);
          if (dist[u] + reduced < dist[v]) {
            dist[v] = dist[u] + reduced;
            parent[v] = u;
          }
        }
      } else {
        const Eigen::Index j = u - n;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (done[i] || flow(i, j) <= eps) continue;
          const Scalar reduced = std::max<Scalar>(Scalar(0), -cost(i, j) + pot[u] - pot[i]);
          if (dist[u] + reduced < dist[i]) {
            dist[i] = dist[u] + reduced;
            parent[i] = u;
          }
        }
      }
    }
    if (target < 0) throw std::runtime_error("transport: no augmenting path (unbalanced masses?)");

    const Scalar bound = dist[target];
    for (Eigen::Index v = 0; v < n + m; ++v) pot[v] += std::min(dist[v], bound);

    // bottleneck along the path
    Scalar push = right(target - n);
    Eigen::Index v = target;
    while (parent[v] >= 0) {
      const Eigen::Index u = parent[v];
      if (u >= n) push = std::min(push, flow(v, u - n));  // backward arc sink u -> source v
      v = u;
    }
    push = std::min(push, left(v));

    right(target - n) -= push;
    left(v) -= push;
    v = target;
    while (parent[v] >= 0) {
      const Eigen::Index u = parent[v];
      if (u < n)
        flow(u, v - n) += push;
      else
        flow(v, u - n) -= push;
      v = u;
    }
  }
  return (flow.array() * cost.array()).sum();
}

}  // namespace tracial

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "gsphqc/errors.hpp"
#include "gsphqc/geodesy.hpp"
#include "gsphqc/rng.hpp"

namespace gsphqc {

/// Undirected weighted graph: symmetric nonnegative adjacency with zero
/// diagonal. a(m,n) is the connection strength between nodes m and n,
/// zero when there is no edge.
struct Graph {
  Eigen::MatrixXd adjacency;

  Eigen::Index node_count() const { return adjacency.rows(); }
};

/// Geographic K-nearest-neighbour graph. Each node is linked to its K
/// nearest neighbours by haversine distance, with Gaussian weights
///   a(m,n) = exp(-d(m,n)^2 / (2 theta^2)).
/// The neighbour relation is symmetrised by union: an edge is kept when
/// either endpoint lists the other among its K nearest. Duplicate
/// coordinates are allowed; d = 0 between distinct nodes yields weight 1.
inline Graph build_knn_graph(const std::vector<GeoPoint>& points,
                             int k_nearest, double theta_km) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (k_nearest < 1) throw InputError("k_nearest must be >= 1");
  if (n < k_nearest + 1) {
    throw InputError("need at least k_nearest + 1 points, got " +
                     std::to_string(n));
  }
  if (!(theta_km > 0.0)) throw InputError("theta_km must be > 0");

  Eigen::MatrixXd dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = haversine_distance(points[i], points[j]);
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }

  Graph g;
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    order.erase(order.begin() + i);
    // Nearest first; ties broken by node index for determinism.
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) {
                if (dist(i, a) != dist(i, b)) return dist(i, a) < dist(i, b);
                return a < b;
              });
    for (int k = 0; k < k_nearest; ++k) {
      const Eigen::Index j = order[static_cast<std::size_t>(k)];
      const double d = dist(i, j);
      const double w = std::exp(-(d * d) / (2.0 * theta_km * theta_km));
      g.adjacency(i, j) = w;
      g.adjacency(j, i) = w;
    }
    order.resize(n);
  }
  return g;
}

/// Uniformly random coordinates inside a latitude/longitude box;
/// deterministic for a given seed.
inline std::vector<GeoPoint> random_geo_points(int count, std::uint64_t seed,
                                               double lat_lo = -25.0,
                                               double lat_hi = -20.0,
                                               double lon_lo = -48.0,
                                               double lon_hi = -43.0) {
  if (count < 1) throw InputError("count must be >= 1");
  if (!(lat_lo < lat_hi) || !(lon_lo < lon_hi)) {
    throw InputError("empty coordinate box");
  }
  RandomStream rng(seed);
  std::vector<GeoPoint> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    GeoPoint p;
    p.latitude_deg = lat_lo + (lat_hi - lat_lo) * rng.uniform();
    p.longitude_deg = lon_lo + (lon_hi - lon_lo) * rng.uniform();
    points.push_back(p);
  }
  return points;
}

}  // namespace gsphqc

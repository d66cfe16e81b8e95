#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "wordrec/error.hpp"
#include "wordrec/features.hpp"
#include "wordrec/rng.hpp"

namespace wordrec {

namespace {

constexpr int kMaxLloydIterations = 300;

double sq_dist(const double* a, const double* b, size_t dim) {
  double acc = 0.0;
  for (size_t i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

Matrix kmeanspp_init(const Matrix& points, int k, Rng& rng) {
  const size_t n = points.rows;
  const size_t dim = points.cols;
  Matrix centroids(static_cast<size_t>(k), dim);

  const size_t first = rng.uniform_index(n);
  std::copy_n(points.row(first), dim, centroids.row(0));

  std::vector<double> d2(n);
  for (size_t i = 0; i < n; ++i) d2[i] = sq_dist(points.row(i), centroids.row(0), dim);

  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    size_t pick;
    if (total > 0.0) {
      // D^2-weighted draw
      const double target = rng.uniform01() * total;
      double cum = 0.0;
      pick = n - 1;
      for (size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum >= target) {
          pick = i;
          break;
        }
      }
    } else {
      // every point already coincides with a chosen center
      pick = rng.uniform_index(n);
    }
    std::copy_n(points.row(pick), dim, centroids.row(c));
    for (size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(points.row(i), centroids.row(c), dim));
    }
  }
  return centroids;
}

// Single-point relocation pass (Hartigan-style): moves a point when the
// exact objective change, with both cluster means shifting, is negative.
// Escapes the Lloyd fixed points that trap plain centroid iteration.
bool relocation_pass(const Matrix& points, int k, std::vector<int>& assignments,
                     Matrix& centroids, std::vector<size_t>& count) {
  const size_t n = points.rows;
  const size_t dim = points.cols;
  bool moved = false;

  for (size_t i = 0; i < n; ++i) {
    const int from = assignments[i];
    const size_t from_n = count[static_cast<size_t>(from)];
    if (from_n < 2) continue;

    const double* p = points.row(i);
    const double leave = static_cast<double>(from_n) / static_cast<double>(from_n - 1) *
                         sq_dist(p, centroids.row(static_cast<size_t>(from)), dim);

    int best_c = -1;
    double best_delta = -1e-12;
    for (int c = 0; c < k; ++c) {
      if (c == from) continue;
      const size_t to_n = count[static_cast<size_t>(c)];
      const double enter = static_cast<double>(to_n) / static_cast<double>(to_n + 1) *
                           sq_dist(p, centroids.row(static_cast<size_t>(c)), dim);
      const double delta = enter - leave;
      if (delta < best_delta) {
        best_delta = delta;
        best_c = c;
      }
    }
    if (best_c < 0) continue;

    // move the point, shifting both means incrementally
    double* from_cen = centroids.row(static_cast<size_t>(from));
    double* to_cen = centroids.row(static_cast<size_t>(best_c));
    const size_t to_n = count[static_cast<size_t>(best_c)];
    for (size_t d = 0; d < dim; ++d) {
      from_cen[d] = (from_cen[d] * static_cast<double>(from_n) - p[d]) /
                    static_cast<double>(from_n - 1);
      to_cen[d] = (to_cen[d] * static_cast<double>(to_n) + p[d]) /
                  static_cast<double>(to_n + 1);
    }
    --count[static_cast<size_t>(from)];
    ++count[static_cast<size_t>(best_c)];
    assignments[i] = best_c;
    moved = true;
  }
  return moved;
}

KMeansResult lloyd(const Matrix& points, int k, Rng& rng) {
  const size_t n = points.rows;
  const size_t dim = points.cols;

  KMeansResult res;
  res.centroids = kmeanspp_init(points, k, rng);
  res.assignments.assign(n, -1);

  std::vector<int> previous(n, -1);
  std::vector<size_t> count(static_cast<size_t>(k));

  auto recompute = [&] {
    std::fill(res.centroids.data.begin(), res.centroids.data.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      double* cen = res.centroids.row(static_cast<size_t>(res.assignments[i]));
      const double* p = points.row(i);
      for (size_t d = 0; d < dim; ++d) cen[d] += p[d];
    }
    for (int c = 0; c < k; ++c) {
      double* cen = res.centroids.row(static_cast<size_t>(c));
      for (size_t d = 0; d < dim; ++d) cen[d] /= static_cast<double>(count[static_cast<size_t>(c)]);
    }
    double inertia = 0.0;
    for (size_t i = 0; i < n; ++i) {
      inertia += sq_dist(points.row(i), res.centroids.row(static_cast<size_t>(res.assignments[i])), dim);
    }
    res.inertia = inertia;
    res.inertia_history.push_back(inertia);
  };

  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    // assignment step; ties go to the lowest cluster index
    for (size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(points.row(i), res.centroids.row(0), dim);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points.row(i), res.centroids.row(static_cast<size_t>(c)), dim);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      res.assignments[i] = best;
    }

    // repair empty clusters with the point farthest from its centroid,
    // taken from a cluster that can spare one
    std::fill(count.begin(), count.end(), 0);
    for (int a : res.assignments) ++count[static_cast<size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (count[static_cast<size_t>(c)] != 0) continue;
      size_t farthest = n;
      double farthest_d = -1.0;
      for (size_t i = 0; i < n; ++i) {
        const int a = res.assignments[i];
        if (count[static_cast<size_t>(a)] < 2) continue;
        const double d = sq_dist(points.row(i), res.centroids.row(static_cast<size_t>(a)), dim);
        if (d > farthest_d) {
          farthest_d = d;
          farthest = i;
        }
      }
      --count[static_cast<size_t>(res.assignments[farthest])];
      res.assignments[farthest] = c;
      ++count[static_cast<size_t>(c)];
    }

    recompute();

    if (res.assignments == previous) {
      // Lloyd converged; try single-point relocations before accepting
      if (!relocation_pass(points, k, res.assignments, res.centroids, count)) break;
      recompute();
    }
    previous = res.assignments;
  }
  return res;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, uint64_t seed, int restarts) {
  if (k < 1) fail(Errc::invalid_config, "kmeans: k must be >= 1");
  if (restarts < 1) fail(Errc::invalid_config, "kmeans: restarts must be >= 1");
  if (points.rows < static_cast<size_t>(k)) {
    fail(Errc::too_few_points, "kmeans: " + std::to_string(points.rows) +
                                   " points for k = " + std::to_string(k));
  }

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(r)));
    KMeansResult run = lloyd(points, k, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

FeatureVector compress_features(const MfccMatrix& m, int k, uint64_t seed) {
  const KMeansResult km = kmeans(m.coeffs, k, seed);
  const size_t dim = m.coeffs.cols;

  // temporal order: centroids sorted by the mean index of their frames
  std::vector<double> mean_index(static_cast<size_t>(k), 0.0);
  std::vector<size_t> count(static_cast<size_t>(k), 0);
  for (size_t i = 0; i < km.assignments.size(); ++i) {
    mean_index[static_cast<size_t>(km.assignments[i])] += static_cast<double>(i);
    ++count[static_cast<size_t>(km.assignments[i])];
  }
  for (int c = 0; c < k; ++c) {
    mean_index[static_cast<size_t>(c)] /= static_cast<double>(count[static_cast<size_t>(c)]);
  }

  std::vector<int> order(static_cast<size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return mean_index[static_cast<size_t>(a)] < mean_index[static_cast<size_t>(b)];
  });

  FeatureVector fv;
  fv.k = k;
  fv.coeff_count = static_cast<int>(dim);
  fv.values.reserve(static_cast<size_t>(k) * dim);
  for (int c : order) {
    const double* row = km.centroids.row(static_cast<size_t>(c));
    fv.values.insert(fv.values.end(), row, row + dim);
  }
  return fv;
}

}  // namespace wordrec

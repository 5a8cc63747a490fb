#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "policylens/sampler/matrix.hpp"

namespace policylens::sampler {

struct KMeansResult {
  std::vector<std::size_t> assignments;
  Matrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kMaxIterations = 300;

/// Lloyd's algorithm. The first centre is drawn from seed, each further centre
/// is the point farthest from its nearest chosen centre. Stops when
/// assignments no longer change or after kMaxIterations. Throws
/// Error(DegenerateInput) when there are fewer distinct points than k.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t concurrency = 1);

struct ElbowResult {
  std::size_t k = 0;
  std::vector<std::pair<std::size_t, double>> curve;  ///< (k, inertia)
  bool flagged = false;  ///< no clear elbow; k is a fallback
  std::string note;
};

/// Relative gap between the normalized inertia curve and its chord below which
/// the curve is treated as having no elbow.
inline constexpr double kMinElbowStrength = 0.5;

/// Inertia for every k in [k_min, k_max]; picks the k with the largest second
/// difference. A (near-)linear curve returns the smallest interior k and a
/// curve without a pronounced bend returns k_min, both flagged.
ElbowResult select_k_elbow(const Matrix& points, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                           std::size_t concurrency = 1);

/// Elbow rule applied to a precomputed curve (ascending k, at least 3 points).
ElbowResult elbow_from_curve(std::vector<std::pair<std::size_t, double>> curve);

struct ClusterStats {
  std::size_t cluster_id = 0;
  std::size_t n = 0;
  double entropy = 0.0;   ///< natural-log entropy of the distance histogram
  double variance = 0.0;  ///< mean squared distance to the centroid
  double weight = 0.0;
  std::size_t allocation = 0;
};

/// n, entropy and variance of one cluster. The histogram has `bins` equal-width
/// bins over [0, max distance]; a cluster with zero spread has entropy 0.
ClusterStats cluster_stats(const std::vector<std::span<const double>>& members, std::span<const double> centroid,
                           std::size_t bins = 5);

/// w_c = H_c * S2_c * n_c / N, normalized to sum 1. Falls back to n_c / N when
/// every raw weight is zero.
std::vector<double> cluster_weights(const std::vector<ClusterStats>& stats, std::size_t population);

/// Largest-remainder apportionment of s seats. Weights are normalized first.
/// Remaining seats go to the largest fractional parts; ties prefer the larger
/// cluster (by `sizes`, when given) and then the lower index.
std::vector<std::size_t> allocate(const std::vector<double>& weights, std::size_t s,
                                  const std::vector<std::size_t>& sizes = {});

struct Member {
  std::string id;
  std::size_t word_count = 0;
};

/// Sorts members by word count (then id) into `bins` rank-quantile bins,
/// spreads `take` seats over bins by largest remainder, and draws uniformly
/// without replacement inside each bin. Result is in input order. Throws
/// Error(InsufficientMembers) when take exceeds the member count.
std::vector<std::string> stratified_sample(const std::vector<Member>& members, std::size_t take,
                                           std::size_t bins, std::uint64_t seed);

struct SamplerConfig {
  std::optional<std::size_t> k;  ///< unset: elbow over [k_min, k_max]
  std::size_t k_min = 2;
  std::size_t k_max = 8;
  std::size_t sample_size = 200;
  std::uint64_t seed = 42;
  std::size_t bins = 5;
  std::size_t concurrency = 1;

  void validate() const;
};

struct SampleResult {
  std::size_t k = 0;
  std::optional<ElbowResult> elbow;
  std::vector<ClusterStats> clusters;
  std::vector<std::size_t> assignments;
  std::vector<std::string> selected;  ///< cluster order, then member order
};

/// Full procedure: choose k, cluster, weight, allocate, sample per cluster.
SampleResult run_sampler(const Matrix& embeddings, const std::vector<Member>& members, const SamplerConfig& config);

}  // namespace policylens::sampler

#include "policylens/sampler/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "policylens/core/error.hpp"
#include "policylens/sampler/rng.hpp"
#include "policylens/util/parallel.hpp"

namespace policylens::sampler {

namespace {

std::size_t distinct_rows(const Matrix& m) {
  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    seen.emplace(r.begin(), r.end());
  }
  return seen.size();
}

std::pair<std::size_t, double> nearest(std::span<const double> p, const Matrix& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(p, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return {best, best_d};
}

Matrix seed_centroids(const Matrix& points, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  Matrix centroids(k, points.cols());
  std::vector<double> dist(points.rows(), std::numeric_limits<double>::infinity());
  std::size_t chosen = rng.below(points.rows());
  for (std::size_t c = 0; c < k; ++c) {
    std::copy(points.row(chosen).begin(), points.row(chosen).end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < points.rows(); ++i) {
      dist[i] = std::min(dist[i], squared_distance(points.row(i), centroids.row(c)));
    }
    chosen = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
  }
  return centroids;
}

// Second differences I(k-1) - 2 I(k) + I(k+1), one per interior point.
std::vector<double> second_differences(const std::vector<std::pair<std::size_t, double>>& curve) {
  std::vector<double> d;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    d.push_back(curve[i - 1].second - 2.0 * curve[i].second + curve[i + 1].second);
  }
  return d;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t concurrency) {
  if (k == 0) throw Error(ErrorCode::DegenerateInput, "k must be at least 1");
  if (distinct_rows(points) < k) {
    throw Error(ErrorCode::DegenerateInput, "fewer distinct points than k=" + std::to_string(k));
  }
  const std::size_t n = points.rows();
  KMeansResult r;
  r.centroids = seed_centroids(points, k, seed);
  r.assignments.assign(n, k);  // k = unassigned
  std::vector<double> dist(n, 0.0);

  for (r.iterations = 1; r.iterations <= kMaxIterations; ++r.iterations) {
    std::vector<std::size_t> next(n);
    util::parallel_for(n, concurrency, [&](std::size_t i) {
      const auto [c, d] = nearest(points.row(i), r.centroids);
      next[i] = c;
      dist[i] = d;
    });
    const bool changed = next != r.assignments;
    r.assignments = std::move(next);
    if (!changed) break;

    Matrix sums(k, points.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto s = sums.row(r.assignments[i]);
      const auto p = points.row(i);
      for (std::size_t j = 0; j < p.size(); ++j) s[j] += p[j];
      ++counts[r.assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      auto dst = r.centroids.row(c);
      if (counts[c] == 0) {
        // Empty cluster: restart it at the point worst served by its centre.
        const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        std::copy(points.row(far).begin(), points.row(far).end(), dst.begin());
        dist[far] = 0.0;
        continue;
      }
      const auto s = sums.row(c);
      for (std::size_t j = 0; j < s.size(); ++j) dst[j] = s[j] / static_cast<double>(counts[c]);
    }
  }
  r.iterations = std::min(r.iterations, kMaxIterations);
  r.inertia = std::accumulate(dist.begin(), dist.end(), 0.0);
  return r;
}

ElbowResult elbow_from_curve(std::vector<std::pair<std::size_t, double>> curve) {
  if (curve.size() < 3) throw Error(ErrorCode::DegenerateInput, "elbow needs at least three k values");
  ElbowResult r;
  r.curve = std::move(curve);
  const auto& c = r.curve;
  const double first = c.front().second;
  const double last = c.back().second;
  const double drop = first - last;
  const auto d = second_differences(c);
  const double scale = std::max({std::abs(first), std::abs(last), 1e-300});

  const double max_abs_d = std::abs(*std::max_element(d.begin(), d.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  }));
  if (drop <= 1e-12 * scale || max_abs_d <= 1e-9 * std::abs(drop)) {
    r.k = c[1].first;
    r.flagged = true;
    r.note = "inertia curve is linear; no elbow";
    return r;
  }

  // Largest gap between the curve (scaled to the unit square) and its chord.
  double strength = 0.0;
  const double span_k = static_cast<double>(c.back().first - c.front().first);
  for (const auto& [k, inertia] : c) {
    const double t = static_cast<double>(k - c.front().first) / span_k;
    const double y = (inertia - last) / drop;
    strength = std::max(strength, (1.0 - t) - y);
  }
  if (strength < kMinElbowStrength) {
    r.k = c.front().first;
    r.flagged = true;
    r.note = "no pronounced elbow (strength " + std::to_string(strength) + ")";
    return r;
  }
  const auto best = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
  r.k = c[best + 1].first;
  r.note = "elbow strength " + std::to_string(strength);
  return r;
}

ElbowResult select_k_elbow(const Matrix& points, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                           std::size_t concurrency) {
  if (k_min < 1 || k_max < k_min + 2) throw ConfigError("sampler.k_range", "need k_min >= 1 and k_max >= k_min + 2");
  std::vector<std::pair<std::size_t, double>> curve;
  for (std::size_t k = k_min; k <= k_max; ++k) curve.emplace_back(k, kmeans(points, k, seed, concurrency).inertia);
  return elbow_from_curve(std::move(curve));
}

ClusterStats cluster_stats(const std::vector<std::span<const double>>& members, std::span<const double> centroid,
                           std::size_t bins) {
  if (members.empty()) throw Error(ErrorCode::DegenerateInput, "empty cluster");
  if (bins == 0) throw ConfigError("sampler.bins", "must be at least 1");
  ClusterStats s;
  s.n = members.size();
  std::vector<double> dist;
  dist.reserve(members.size());
  double sq_sum = 0.0;
  for (const auto& m : members) {
    const double sq = squared_distance(m, centroid);
    sq_sum += sq;
    dist.push_back(std::sqrt(sq));
  }
  s.variance = sq_sum / static_cast<double>(s.n);
  const double max_d = *std::max_element(dist.begin(), dist.end());
  if (max_d <= 0.0) return s;
  std::vector<std::size_t> hist(bins, 0);
  for (double d : dist) {
    const auto b = static_cast<std::size_t>(d / max_d * static_cast<double>(bins));
    ++hist[std::min(b, bins - 1)];
  }
  for (std::size_t h : hist) {
    if (h == 0) continue;
    const double p = static_cast<double>(h) / static_cast<double>(s.n);
    s.entropy -= p * std::log(p);
  }
  return s;
}

std::vector<double> cluster_weights(const std::vector<ClusterStats>& stats, std::size_t population) {
  if (population == 0) throw Error(ErrorCode::DegenerateInput, "population is empty");
  std::vector<double> raw;
  double total = 0.0;
  for (const auto& s : stats) {
    raw.push_back(s.entropy * s.variance * static_cast<double>(s.n) / static_cast<double>(population));
    total += raw.back();
  }
  if (total <= 0.0) {
    double n_total = 0.0;
    for (const auto& s : stats) n_total += static_cast<double>(s.n);
    for (std::size_t i = 0; i < stats.size(); ++i) raw[i] = static_cast<double>(stats[i].n) / n_total;
    return raw;
  }
  for (double& w : raw) w /= total;
  return raw;
}

std::vector<std::size_t> allocate(const std::vector<double>& weights, std::size_t s,
                                  const std::vector<std::size_t>& sizes) {
  if (weights.empty()) throw Error(ErrorCode::DegenerateInput, "no clusters to allocate to");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateInput, "weights must sum to a positive value");
  std::vector<std::size_t> seats(weights.size());
  std::vector<double> frac(weights.size());
  std::size_t given = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = weights[i] / total * static_cast<double>(s);
    seats[i] = static_cast<std::size_t>(std::floor(quota));
    frac[i] = quota - std::floor(quota);
    given += seats[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (frac[a] != frac[b]) return frac[a] > frac[b];
    const std::size_t na = a < sizes.size() ? sizes[a] : 0;
    const std::size_t nb = b < sizes.size() ? sizes[b] : 0;
    if (na != nb) return na > nb;
    return a < b;
  });
  for (std::size_t i = 0; given < s; ++i, ++given) ++seats[order[i % order.size()]];
  return seats;
}

std::vector<std::string> stratified_sample(const std::vector<Member>& members, std::size_t take, std::size_t bins,
                                           std::uint64_t seed) {
  if (take > members.size()) {
    throw Error(ErrorCode::InsufficientMembers, "cannot draw " + std::to_string(take) + " from " +
                                                    std::to_string(members.size()) + " members");
  }
  if (bins == 0) throw ConfigError("sampler.bins", "must be at least 1");
  const std::size_t n = members.size();
  std::vector<std::size_t> by_length(n);
  std::iota(by_length.begin(), by_length.end(), 0);
  std::sort(by_length.begin(), by_length.end(), [&](std::size_t a, std::size_t b) {
    if (members[a].word_count != members[b].word_count) return members[a].word_count < members[b].word_count;
    if (members[a].id != members[b].id) return members[a].id < members[b].id;
    return a < b;
  });
  std::vector<std::vector<std::size_t>> bin_members(bins);
  for (std::size_t rank = 0; rank < n; ++rank) bin_members[rank * bins / n].push_back(by_length[rank]);

  std::vector<double> sizes;
  std::vector<std::size_t> counts;
  for (const auto& b : bin_members) {
    sizes.push_back(static_cast<double>(b.size()));
    counts.push_back(b.size());
  }
  std::vector<std::size_t> per_bin(bins, 0);
  if (take > 0) per_bin = allocate(sizes, take, counts);

  Rng rng(seed);
  std::vector<bool> picked(n, false);
  for (std::size_t b = 0; b < bins; ++b) {
    auto pool = bin_members[b];
    for (std::size_t j = 0; j < per_bin[b]; ++j) {
      const std::size_t r = j + static_cast<std::size_t>(rng.below(pool.size() - j));
      std::swap(pool[j], pool[r]);
      picked[pool[j]] = true;
    }
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (picked[i]) out.push_back(members[i].id);
  }
  return out;
}

void SamplerConfig::validate() const {
  if (k && *k < 1) throw ConfigError("sampler.k", "must be at least 1");
  if (!k && (k_min < 1 || k_max < k_min + 2)) {
    throw ConfigError("sampler.k_range", "need k_min >= 1 and k_max >= k_min + 2");
  }
  if (bins < 1) throw ConfigError("sampler.bins", "must be at least 1");
}

SampleResult run_sampler(const Matrix& embeddings, const std::vector<Member>& members, const SamplerConfig& config) {
  config.validate();
  if (embeddings.rows() != members.size()) {
    throw Error(ErrorCode::DegenerateInput, std::to_string(embeddings.rows()) + " embeddings for " +
                                                std::to_string(members.size()) + " documents");
  }
  if (config.sample_size > members.size()) {
    throw Error(ErrorCode::InsufficientMembers, "sample size exceeds population");
  }
  SampleResult out;
  if (config.k) {
    out.k = *config.k;
  } else {
    out.elbow = select_k_elbow(embeddings, config.k_min, config.k_max, config.seed, config.concurrency);
    out.k = out.elbow->k;
  }
  const auto km = kmeans(embeddings, out.k, config.seed, config.concurrency);
  out.assignments = km.assignments;

  std::vector<std::vector<std::span<const double>>> vectors(out.k);
  std::vector<std::vector<Member>> cluster_members(out.k);
  for (std::size_t i = 0; i < members.size(); ++i) {
    vectors[km.assignments[i]].push_back(embeddings.row(i));
    cluster_members[km.assignments[i]].push_back(members[i]);
  }
  std::vector<std::size_t> sizes;
  for (std::size_t c = 0; c < out.k; ++c) {
    ClusterStats s = cluster_stats(vectors[c], km.centroids.row(c), config.bins);
    s.cluster_id = c;
    out.clusters.push_back(s);
    sizes.push_back(s.n);
  }
  const auto weights = cluster_weights(out.clusters, members.size());
  const auto seats = allocate(weights, config.sample_size, sizes);
  for (std::size_t c = 0; c < out.k; ++c) {
    out.clusters[c].weight = weights[c];
    out.clusters[c].allocation = seats[c];
    // Distinct per-cluster streams derived from the run seed.
    const auto ids = stratified_sample(cluster_members[c], seats[c], config.bins, config.seed + 0x9E3779B97F4A7C15ULL * (c + 1));
    out.selected.insert(out.selected.end(), ids.begin(), ids.end());
  }
  return out;
}

}  // namespace policylens::sampler

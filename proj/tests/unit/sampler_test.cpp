#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "policylens/core/error.hpp"
#include "policylens/sampler/matrix.hpp"
#include "policylens/sampler/sampler.hpp"

using namespace policylens;
using namespace policylens::sampler;

namespace {

Matrix blobs(const std::vector<std::pair<double, double>>& centres, std::size_t per_blob, double sd,
             std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, sd);
  Matrix m(centres.size() * per_blob, 2);
  std::size_t i = 0;
  for (const auto& [x, y] : centres) {
    for (std::size_t j = 0; j < per_blob; ++j, ++i) {
      m.row(i)[0] = x + noise(rng);
      m.row(i)[1] = y + noise(rng);
    }
  }
  return m;
}

std::vector<std::span<const double>> spans(const std::vector<std::vector<double>>& rows) {
  std::vector<std::span<const double>> out;
  for (const auto& r : rows) out.emplace_back(r);
  return out;
}

ClusterStats stats(double h, double s2, std::size_t n) {
  ClusterStats s;
  s.entropy = h;
  s.variance = s2;
  s.n = n;
  return s;
}

std::vector<Member> members(std::size_t n) {
  std::vector<Member> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"doc" + std::to_string(i), 100 + (i * 37) % 1000});
  return out;
}

// Independent histogram entropy: counts per bin by explicit interval tests.
double oracle_entropy(const std::vector<double>& dist, std::size_t bins) {
  const double max_d = *std::max_element(dist.begin(), dist.end());
  if (max_d == 0.0) return 0.0;
  std::vector<double> counts(bins, 0.0);
  for (double d : dist) {
    for (std::size_t b = 0; b < bins; ++b) {
      const double lo = max_d * static_cast<double>(b) / static_cast<double>(bins);
      const double hi = max_d * static_cast<double>(b + 1) / static_cast<double>(bins);
      if ((d >= lo && d < hi) || (b + 1 == bins && d == max_d)) {
        counts[b] += 1.0;
        break;
      }
    }
  }
  double h = 0.0;
  for (double c : counts) {
    if (c > 0) h -= c / static_cast<double>(dist.size()) * std::log(c / static_cast<double>(dist.size()));
  }
  return h;
}

}  // namespace

TEST(KMeans, SeparatedBlobsSplit) {
  const Matrix m = blobs({{0, 0}, {10, 10}}, 30, 0.3, 1);
  const auto r = kmeans(m, 2, 7);
  for (std::size_t i = 1; i < 30; ++i) EXPECT_EQ(r.assignments[i], r.assignments[0]);
  for (std::size_t i = 31; i < 60; ++i) EXPECT_EQ(r.assignments[i], r.assignments[30]);
  EXPECT_NE(r.assignments[0], r.assignments[30]);
}

TEST(KMeans, IdenticalPointsZeroInertia) {
  const Matrix m = Matrix::from_rows({{1, 2}, {1, 2}, {1, 2}});
  const auto r = kmeans(m, 1, 3);
  EXPECT_DOUBLE_EQ(r.inertia, 0.0);
  try {
    kmeans(m, 2, 3);
    FAIL() << "expected DegenerateInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateInput);
  }
}

TEST(KMeans, DeterministicAcrossRunsAndConcurrency) {
  const Matrix m = blobs({{0, 0}, {4, 1}, {1, 5}}, 40, 1.2, 9);
  const auto a = kmeans(m, 3, 123, 1);
  const auto b = kmeans(m, 3, 123, 1);
  const auto c = kmeans(m, 3, 123, 8);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.assignments, c.assignments);
  EXPECT_DOUBLE_EQ(a.inertia, c.inertia);
}

TEST(KMeans, InertiaMatchesAssignment) {
  const Matrix m = blobs({{0, 0}, {3, 3}}, 25, 1.0, 4);
  const auto r = kmeans(m, 2, 5);
  double inertia = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) inertia += squared_distance(m.row(i), r.centroids.row(r.assignments[i]));
  EXPECT_NEAR(r.inertia, inertia, 1e-9);
}

TEST(Elbow, FourBlobsPicksFour) {
  const Matrix m = blobs({{0, 0}, {8, 0}, {0, 8}, {8, 8}}, 50, 0.5, 2);
  const auto e = select_k_elbow(m, 2, 8, 42);
  EXPECT_EQ(e.k, 4u);
  EXPECT_FALSE(e.flagged);
  ASSERT_EQ(e.curve.size(), 7u);
  // Curvature maximum computed directly from the emitted curve.
  std::size_t best = 0;
  double best_d = -1e300;
  for (std::size_t i = 1; i + 1 < e.curve.size(); ++i) {
    const double d = e.curve[i - 1].second - 2 * e.curve[i].second + e.curve[i + 1].second;
    if (d > best_d) {
      best_d = d;
      best = e.curve[i].first;
    }
  }
  EXPECT_EQ(best, 4u);
}

TEST(Elbow, LinearCurveIsFlagged) {
  std::vector<std::pair<std::size_t, double>> curve;
  for (std::size_t k = 2; k <= 8; ++k) curve.emplace_back(k, 100.0 - 10.0 * static_cast<double>(k));
  const auto e = elbow_from_curve(curve);
  EXPECT_TRUE(e.flagged);
  EXPECT_EQ(e.k, 3u);
}

TEST(Elbow, SingleBlobIsFlagged) {
  const Matrix m = blobs({{0, 0}}, 200, 1.0, 3);
  const auto e = select_k_elbow(m, 2, 8, 42);
  EXPECT_TRUE(e.flagged);
  EXPECT_EQ(e.k, 2u);
}

TEST(ClusterStats, IdenticalMembers) {
  const std::vector<std::vector<double>> rows{{1, 1}, {1, 1}, {1, 1}};
  const std::vector<double> centroid{1, 1};
  const auto s = cluster_stats(spans(rows), centroid);
  EXPECT_EQ(s.n, 3u);
  EXPECT_DOUBLE_EQ(s.variance, 0.0);
  EXPECT_DOUBLE_EQ(s.entropy, 0.0);
}

TEST(ClusterStats, UniformAcrossFiveBins) {
  const std::vector<std::vector<double>> rows{{0.5}, {1.5}, {2.5}, {3.5}, {5.0}};
  const std::vector<double> centroid{0.0};
  const auto s = cluster_stats(spans(rows), centroid, 5);
  EXPECT_NEAR(s.entropy, std::log(5.0), 1e-12);
  EXPECT_NEAR(s.entropy, 1.6094, 1e-4);
  EXPECT_NEAR(s.variance, (0.25 + 2.25 + 6.25 + 12.25 + 25.0) / 5.0, 1e-12);
}

TEST(ClusterStats, TwoEqualBins) {
  const std::vector<std::vector<double>> rows{{1.0}, {-1.0}, {5.0}, {-5.0}};
  const std::vector<double> centroid{0.0};
  const auto s = cluster_stats(spans(rows), centroid, 5);
  EXPECT_NEAR(s.entropy, std::log(2.0), 1e-12);
  EXPECT_NEAR(s.entropy, 0.6931, 1e-4);
}

TEST(ClusterStats, AgreesWithOracle) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> rows(1 + rng() % 40, std::vector<double>(3));
    for (auto& r : rows) {
      for (auto& v : r) v = u(rng);
    }
    const std::vector<double> centroid{u(rng), u(rng), u(rng)};
    std::vector<double> dist;
    double sq = 0.0;
    for (const auto& r : rows) {
      const double d2 = std::pow(r[0] - centroid[0], 2) + std::pow(r[1] - centroid[1], 2) + std::pow(r[2] - centroid[2], 2);
      sq += d2;
      dist.push_back(std::sqrt(d2));
    }
    const auto s = cluster_stats(spans(rows), centroid, 5);
    EXPECT_NEAR(s.entropy, oracle_entropy(dist, 5), 1e-9);
    EXPECT_NEAR(s.variance, sq / static_cast<double>(rows.size()), 1e-9);
    EXPECT_GE(s.entropy, 0.0);
    EXPECT_LE(s.entropy, std::log(5.0) + 1e-12);
  }
}

TEST(ClusterWeights, PublishedClusterStatistics) {
  const std::vector<ClusterStats> table{stats(1.1613, 0.0052, 32917), stats(1.5515, 0.0076, 214103),
                                        stats(1.5149, 0.0087, 237763), stats(1.5810, 0.0196, 56971)};
  const auto w = cluster_weights(table, 32917 + 214103 + 237763 + 56971);
  const std::vector<double> expected_w{0.0263, 0.3314, 0.4111, 0.2313};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(w[i], expected_w[i], 0.001) << i;
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-9);
}

TEST(ClusterWeights, TrivialCases) {
  EXPECT_EQ(cluster_weights({stats(1.0, 0.5, 10)}, 10), std::vector<double>{1.0});
  const auto two = cluster_weights({stats(1.2, 0.3, 7), stats(1.2, 0.3, 7)}, 14);
  EXPECT_DOUBLE_EQ(two[0], 0.5);
  EXPECT_DOUBLE_EQ(two[1], 0.5);
  const auto zero = cluster_weights({stats(0.0, 0.0, 30), stats(0.0, 0.0, 10)}, 40);
  EXPECT_DOUBLE_EQ(zero[0], 0.75);
  EXPECT_DOUBLE_EQ(zero[1], 0.25);
}

TEST(ClusterWeights, ScaleInvariantAndMonotoneInSize) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ClusterStats> s;
    std::size_t total = 0;
    for (std::size_t c = 0; c < 1 + rng() % 6; ++c) {
      s.push_back(stats(u(rng), u(rng), 1 + rng() % 1000));
      total += s.back().n;
    }
    const auto w = cluster_weights(s, total);
    auto scaled = s;
    for (auto& c : scaled) c.entropy *= 3.5;
    const auto ws = cluster_weights(scaled, total);
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_NEAR(w[i], ws[i], 1e-12);
      EXPECT_GE(w[i], 0.0);
      EXPECT_LE(w[i], 1.0);
      sum += w[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);

    auto bigger = s;
    bigger[0].n += 1 + rng() % 500;
    const std::size_t bigger_total = total + (bigger[0].n - s[0].n);
    EXPECT_GE(cluster_weights(bigger, bigger_total)[0], w[0] - 1e-12);
  }
}

TEST(Allocate, Examples) {
  EXPECT_EQ(allocate({0.0263, 0.3314, 0.4111, 0.2313}, 200), (std::vector<std::size_t>{5, 67, 82, 46}));
  EXPECT_EQ(allocate({0.5, 0.5}, 10), (std::vector<std::size_t>{5, 5}));
  EXPECT_EQ(allocate({1.0}, 7), std::vector<std::size_t>{7});
}

TEST(Allocate, TiesPreferLargerThenLowerIndex) {
  EXPECT_EQ(allocate({1.0, 1.0, 1.0}, 2, {10, 30, 20}), (std::vector<std::size_t>{0, 1, 1}));
  EXPECT_EQ(allocate({1.0, 1.0, 1.0}, 2), (std::vector<std::size_t>{1, 1, 0}));
}

TEST(Allocate, FloorOrCeilAndExactSum) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> w(1 + rng() % 8);
    for (auto& x : w) x = u(rng) + 1e-6;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    const std::size_t s = rng() % 300;
    const auto a = allocate(w, s);
    EXPECT_EQ(std::accumulate(a.begin(), a.end(), std::size_t{0}), s);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double quota = w[i] / total * static_cast<double>(s);
      EXPECT_GE(static_cast<double>(a[i]), std::floor(quota) - 1e-9);
      EXPECT_LE(static_cast<double>(a[i]), std::floor(quota) + 1.0);
    }
  }
}

TEST(StratifiedSample, ExhaustiveAndInsufficient) {
  const auto m = members(12);
  const auto all = stratified_sample(m, 12, 5, 1);
  ASSERT_EQ(all.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(all[i], m[i].id);
  try {
    stratified_sample(m, 13, 5, 1);
    FAIL() << "expected InsufficientMembers";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientMembers);
  }
}

TEST(StratifiedSample, TwoPerBin) {
  std::vector<Member> m;
  for (std::size_t i = 0; i < 100; ++i) m.push_back({"p" + std::to_string(i), i});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto picked = stratified_sample(m, 10, 5, seed);
    ASSERT_EQ(picked.size(), 10u);
    std::array<int, 5> per_bin{};
    for (const auto& id : picked) ++per_bin[std::stoul(id.substr(1)) / 20];
    for (int c : per_bin) EXPECT_EQ(c, 2);
  }
}

TEST(StratifiedSample, DeterministicDistinct) {
  const auto m = members(300);
  const auto a = stratified_sample(m, 37, 5, 99);
  EXPECT_EQ(a, stratified_sample(m, 37, 5, 99));
  EXPECT_NE(a, stratified_sample(m, 37, 5, 100));
  EXPECT_EQ(std::set<std::string>(a.begin(), a.end()).size(), 37u);
}

TEST(RunSampler, EndToEnd) {
  const Matrix m = blobs({{0, 0}, {8, 0}, {0, 8}, {8, 8}}, 50, 0.8, 6);
  const auto docs = members(m.rows());
  SamplerConfig config;
  config.sample_size = 40;
  const auto r = run_sampler(m, docs, config);
  EXPECT_EQ(r.k, 4u);
  ASSERT_TRUE(r.elbow.has_value());
  EXPECT_EQ(r.selected.size(), 40u);
  EXPECT_EQ(std::set<std::string>(r.selected.begin(), r.selected.end()).size(), 40u);
  double wsum = 0.0;
  std::size_t ssum = 0;
  for (const auto& c : r.clusters) {
    wsum += c.weight;
    ssum += c.allocation;
  }
  EXPECT_NEAR(wsum, 1.0, 1e-9);
  EXPECT_EQ(ssum, 40u);

  config.concurrency = 4;
  EXPECT_EQ(run_sampler(m, docs, config).selected, r.selected);
}

TEST(RunSampler, ConfigErrors) {
  const Matrix m = blobs({{0, 0}}, 10, 1.0, 1);
  SamplerConfig config;
  config.sample_size = 11;
  EXPECT_THROW(run_sampler(m, members(10), config), Error);
  config.sample_size = 5;
  config.k = 0;
  EXPECT_THROW(run_sampler(m, members(10), config), ConfigError);
  config.k = 2;
  EXPECT_THROW(run_sampler(m, members(9), config), Error);
}

TEST(MatrixIo, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "policylens_sampler_test";
  std::filesystem::create_directories(dir);
  const Matrix m = Matrix::from_rows({{0.1, -2.5, 3e-7}, {1.0 / 3.0, 0, 42}});
  write_matrix(dir / "m.txt", m);
  const Matrix back = read_matrix(dir / "m.txt");
  ASSERT_EQ(back.rows(), 2u);
  ASSERT_EQ(back.cols(), 3u);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(back.row(i)[j], m.row(i)[j]);
  }
  std::ofstream(dir / "c.csv") << "1,2\n3,4\n\n";
  EXPECT_EQ(read_matrix(dir / "c.csv").rows(), 2u);
  std::ofstream(dir / "bad.csv") << "1,2\n3\n";
  EXPECT_THROW(read_matrix(dir / "bad.csv"), Error);

  write_id_manifest(dir / "ids.tsv", {{"a", 10}, {"b", 20}});
  const auto ids = read_id_manifest(dir / "ids.tsv");
  ASSERT_EQ(ids.size(), 2u);
  EXPECT_EQ(ids[1].id, "b");
  EXPECT_EQ(ids[1].word_count, 20u);
  std::filesystem::remove_all(dir);
}

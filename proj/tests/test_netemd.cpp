#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "forumnet/error.hpp"
#include "forumnet/netemd.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace forumnet;

namespace {

OrbitMatrix orbits_of(std::size_t n, std::vector<NodePair> edges, int k = 4) {
  return count_orbits(build_graph(n, edges), k);
}

std::vector<OrbitMatrix> random_collection(std::size_t count, std::mt19937_64& rng) {
  std::vector<OrbitMatrix> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(count_orbits(fixtures::random_graph(30 + 5 * i, 0.08 + 0.03 * static_cast<double>(i % 3), rng), 4));
  return out;
}

}  // namespace

TEST(OrbitSetTest, DefaultsAndValidation) {
  EXPECT_EQ(OrbitSet().size(), 15u);
  EXPECT_THROW(OrbitSet(std::vector<int>{}), ValidationError);
  EXPECT_THROW(OrbitSet(std::vector<int>{15}), ValidationError);
  EXPECT_THROW(OrbitSet(std::vector<int>{3, 3}), ValidationError);
}

TEST(NetEmd, TriangleVersusPathOnDegreeOrbit) {
  const auto tri = orbits_of(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto path = orbits_of(3, {{0, 1}, {1, 2}});
  const auto r = netemd(tri, path, OrbitSet(std::vector<int>{0}));
  EXPECT_NEAR(r.total, 1.0 / std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(r.total, fixtures::emd_star_oracle({2, 2, 2}, {1, 2, 1}), 1e-6);
}

TEST(NetEmd, MeanOfPerOrbitEmdStar) {
  std::mt19937_64 rng(2);
  const auto a = count_orbits(fixtures::random_graph(25, 0.2, rng), 3);
  const auto b = count_orbits(fixtures::random_graph(35, 0.15, rng), 3);
  const OrbitSet set(std::vector<int>{0, 1, 2, 3});
  const auto r = netemd(a, b, set);
  double sum = 0.0;
  for (int o : set.ids()) sum += fixtures::emd_star_oracle(a.orbit_values(o), b.orbit_values(o));
  EXPECT_NEAR(r.total, sum / 4.0, 1e-6);
  ASSERT_EQ(r.per_feature.size(), 4u);
}

TEST(NetEmd, ZeroUnderNodeRelabeling) {
  std::mt19937_64 rng(3);
  const auto g = fixtures::random_graph(40, 0.15, rng);
  const auto base = count_orbits(g, 4);
  for (int t = 0; t < 10; ++t) {
    const auto p = fixtures::random_permutation(g.node_count(), rng);
    EXPECT_NEAR(netemd(base, count_orbits(fixtures::permute(g, p), 4), OrbitSet()).total, 0.0, 1e-12);
  }
}

TEST(NetEmd, RejectsEmptyNetworksAndMissingOrbits) {
  const OrbitMatrix empty(0, orbits_up_to(4));
  const auto tri = orbits_of(3, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_THROW(netemd(empty, tri, OrbitSet()), ValidationError);
  const auto small = orbits_of(3, {{0, 1}, {1, 2}}, 3);
  EXPECT_THROW(netemd(small, tri, OrbitSet()), ValidationError);
}

TEST(DistanceMatrixTest, SymmetricWithZeroDiagonalAndWorkerIndependent) {
  std::mt19937_64 rng(4);
  const auto col = random_collection(5, rng);
  const auto d1 = netemd_matrix(col, OrbitSet(), {}, 1);
  const auto d3 = netemd_matrix(col, OrbitSet(), {}, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(d1(i, i), 0.0);
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_EQ(d1(i, j), d1(j, i));
      EXPECT_EQ(d1(i, j), d3(i, j));
    }
  }
  EXPECT_EQ(d1.labels()[4], "4");
  EXPECT_EQ(d1.feature_names().size(), 15u);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) {
      double sum = 0.0;
      for (std::size_t f = 0; f < 15; ++f) sum += d1.feature(f, i, j);
      EXPECT_NEAR(sum / 15.0, d1(i, j), 1e-12);
    }
}

TEST(DistanceMatrixTest, CsvRoundTrip) {
  std::mt19937_64 rng(5);
  const auto col = random_collection(3, rng);
  const auto d = netemd_matrix(col, OrbitSet(), {"a", "b", "c"});
  std::stringstream buf;
  write_distance_csv(buf, d);
  EXPECT_EQ(buf.str().substr(0, 12), "label,a,b,c\n");
  const auto back = read_distance_csv(buf);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(back(i, j), d(i, j), 1e-11);
  std::stringstream asym("label,a,b\na,0,1\nb,2,0\n");
  EXPECT_THROW(read_distance_csv(asym), ValidationError);
}

TEST(Pca, FullVarianceKeepsEveryComponent) {
  std::mt19937_64 rng(6);
  const auto col = random_collection(4, rng);
  const auto r = pca_reconstruct(col, OrbitSet(), 1.0);
  EXPECT_EQ(r.components, 15u);
  const auto logs = log_features(col, OrbitSet());
  for (std::size_t n = 0; n < col.size(); ++n)
    for (std::size_t i = 0; i < logs[n].values.size(); ++i)
      EXPECT_NEAR(r.networks[n].values[i], logs[n].values[i], 1e-8);
  for (std::size_t k = 1; k < r.eigenvalues.size(); ++k) EXPECT_GE(r.eigenvalues[k - 1], r.eigenvalues[k]);
}

TEST(Pca, ComponentCountReachesThreshold) {
  std::mt19937_64 rng(7);
  const auto col = random_collection(4, rng);
  for (double ev : {0.5, 0.8, 0.9, 0.99}) {
    const auto r = pca_reconstruct(col, OrbitSet(), ev);
    double total = 0.0, kept = 0.0;
    for (double e : r.eigenvalues) total += e;
    for (std::size_t k = 0; k < r.components; ++k) kept += r.eigenvalues[k];
    EXPECT_GE(kept / total, ev - 1e-12);
    if (r.components > 1) {
      EXPECT_LT((kept - r.eigenvalues[r.components - 1]) / total, ev);
    }
  }
}

TEST(Pca, FullVarianceMatchesNetEmdOnLogFeatures) {
  std::mt19937_64 rng(8);
  const auto col = random_collection(4, rng);
  const auto pca = pca_netemd_matrix(col, OrbitSet(), 1.0);
  const auto plain = netemd_matrix(log_features(col, OrbitSet()));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(pca(i, j), plain(i, j), 1e-6);
}

TEST(Pca, IdenticalRowsAreDegenerate) {
  const auto tri = orbits_of(3, {{0, 1}, {1, 2}, {0, 2}});
  const std::vector<OrbitMatrix> col = {tri, tri};
  const OrbitSet set(std::vector<int>{0, 3, 14});
  const auto r = pca_reconstruct(col, set, 0.9);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.components, 1u);
  EXPECT_EQ(pca_netemd_matrix(col, set, 0.9)(0, 1), 0.0);
  EXPECT_THROW(pca_reconstruct(col, set, 0.0), ValidationError);
  EXPECT_THROW(pca_reconstruct(col, OrbitSet(), 0.9), ValidationError);
}

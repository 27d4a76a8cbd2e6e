#include "sbmcv/kmeans.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sbmcv;

namespace {

// Same partition up to relabeling.
bool same_partition(const Membership& a, const Membership& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

}  // namespace

TEST(KMeans, SeparatesTwoClouds) {
  Matrix points(8, 2);
  points << 0, 0, 0.1, 0, 0, 0.1, 0.1, 0.1, 10, 10, 10.1, 10, 10, 10.1, 10.1, 10.1;
  Rng rng(1);
  const KMeansResult r = kmeans(points, 2, rng);
  EXPECT_TRUE(same_partition(r.labels, Membership{0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(r.labels.front(), 0);
}

TEST(KMeans, OnePointPerCluster) {
  Matrix points(4, 1);
  points << 1, 2, 3, 4;
  Rng rng(2);
  const KMeansResult r = kmeans(points, 4, rng);
  EXPECT_DOUBLE_EQ(r.within_ss, 0.0);
  EXPECT_EQ(r.labels, (Membership{0, 1, 2, 3}));
}

TEST(KMeans, RecoversPlantedGaussianClusters) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix points(12, 2);
  Membership truth(12);
  for (int i = 0; i < 12; ++i) {
    truth[i] = i / 4;
    points(i, 0) = 10.0 * truth[i] + noise(gen);
    points(i, 1) = -10.0 * truth[i] + noise(gen);
  }
  Rng rng(4);
  EXPECT_TRUE(same_partition(kmeans(points, 3, rng).labels, truth));
}

TEST(KMeans, DuplicatePointsStillFillEveryCluster) {
  Matrix points = Matrix::Zero(6, 2);
  points(5, 0) = 1.0;
  Rng rng(5);
  const KMeansResult r = kmeans(points, 3, rng);
  EXPECT_EQ(label_count(r.labels), 3);
}

TEST(KMeans, DeterministicGivenSeed) {
  Matrix points = Matrix::Random(30, 3);
  Rng a(9), b(9);
  EXPECT_EQ(kmeans(points, 4, a).labels, kmeans(points, 4, b).labels);
}

TEST(KMeans, RejectsTooManyClusters) {
  Rng rng(1);
  EXPECT_THROW(kmeans(Matrix::Zero(2, 1), 3, rng), std::invalid_argument);
}

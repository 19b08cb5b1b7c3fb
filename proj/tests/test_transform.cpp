#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tripletnet/errors.hpp"
#include "tripletnet/transform.hpp"

using namespace tripletnet;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("fit_zscore") {
  SUBCASE("hand-computed mean and population std") {
    ZScoreStats stats = fit_zscore({vec({0, 2}), vec({2, 2})});
    CHECK(stats.mean[0] == doctest::Approx(1.0));
    CHECK(stats.mean[1] == doctest::Approx(2.0));
    CHECK(stats.stddev[0] == doctest::Approx(1.0));
    CHECK(stats.stddev[1] == 0.0);
    CHECK(stats.zero_std_dims() == std::vector<Eigen::Index>{1});
  }

  SUBCASE("single row degenerates to zero std") {
    ZScoreStats stats = fit_zscore({vec({5})});
    CHECK(stats.mean[0] == 5.0);
    CHECK(stats.stddev[0] == 0.0);
  }

  SUBCASE("empty input") {
    CHECK_THROWS_AS(fit_zscore({}), DataError);
  }
}

TEST_CASE("apply_zscore") {
  ZScoreStats stats{vec({1, 2}), vec({1, 0})};

  SUBCASE("hand evaluation; constant dimension passes through centered") {
    Eigen::VectorXd out = apply_zscore(stats, vec({2, 2}));
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == 0.0);
  }

  SUBCASE("the mean maps to zero") {
    CHECK(apply_zscore(stats, stats.mean).norm() == 0.0);
  }

  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(apply_zscore(stats, vec({1})), DataError);
  }
}

TEST_CASE("fit/apply round trip: standardized set has mean 0, std 1") {
  std::mt19937_64 rng{11};
  std::normal_distribution<double> noise(3.0, 2.5);
  std::vector<Eigen::VectorXd> rows;
  for (int i = 0; i < 64; ++i) {
    Eigen::VectorXd v(5);
    for (int j = 0; j < 5; ++j) v[j] = noise(rng) * (j + 1);
    v[4] = 7.0;  // constant dimension
    rows.push_back(v);
  }
  ZScoreStats stats = fit_zscore(rows);

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(5);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(5);
  for (const auto& r : rows) {
    Eigen::VectorXd z = apply_zscore(stats, r);
    sum += z;
    sumsq += z.cwiseAbs2();
  }
  sum /= double(rows.size());
  sumsq /= double(rows.size());
  for (int j = 0; j < 5; ++j) {
    CHECK(std::abs(sum[j]) < 1e-9);
    if (stats.stddev[j] > 0) CHECK(sumsq[j] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("l2_distance") {
  SUBCASE("3-4-5 triangle") {
    CHECK(l2_distance(vec({0, 0}), vec({3, 4})) == doctest::Approx(5.0));
  }

  SUBCASE("identity and dimension mismatch") {
    Eigen::VectorXd u = vec({1, 2, 3});
    CHECK(l2_distance(u, u) == 0.0);
    CHECK_THROWS_AS(l2_distance(u, vec({1})), DataError);
  }

  SUBCASE("symmetry and triangle inequality on random triples") {
    std::mt19937_64 rng{3};
    std::normal_distribution<double> noise;
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd a(4), b(4), c(4);
      for (int j = 0; j < 4; ++j) {
        a[j] = noise(rng);
        b[j] = noise(rng);
        c[j] = noise(rng);
      }
      CHECK(l2_distance(a, b) == l2_distance(b, a));
      CHECK(l2_distance(a, c) <= l2_distance(a, b) + l2_distance(b, c) + 1e-12);
    }
  }
}

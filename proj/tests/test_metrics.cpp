#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "difflat/metrics.hpp"
#include "oracles.hpp"

using namespace difflat;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Numerical;
}

Vector gaussian(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

}  // namespace

TEST_CASE("ground truth correlation") {
  const Vector t = oracle::random_matrix(100, 1, 1);
  CHECK(ground_truth_correlation(t, t) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ground_truth_correlation(-t, t) == doctest::Approx(1.0).epsilon(1e-15));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Vector a = oracle::random_matrix(1000, 1, 10 + seed);
    const Vector b = a + 2.0 * Vector(oracle::random_matrix(1000, 1, 20 + seed));
    CHECK(std::abs(ground_truth_correlation(a, b) - std::abs(oracle::pearson(a, b))) <= 1e-12);
    CHECK(std::abs(ground_truth_correlation((-3.5 * a).array() + 7.0, b) - ground_truth_correlation(a, b)) <= 1e-12);
  }
  CHECK(kind_of([&] { ground_truth_correlation(t, Vector::Constant(100, 2.0)); }) ==
        ErrorKind::UndefinedCorrelation);
  CHECK(kind_of([&] { ground_truth_correlation(t, Vector::Zero(99)); }) == ErrorKind::InvalidInput);
}

TEST_CASE("subspace correlation") {
  const Vector ang = oracle::random_matrix(500, 1, 3, 0.0, 2.0 * std::numbers::pi);
  Matrix targets(500, 2);
  targets.col(0) = ang.array().cos();
  targets.col(1) = ang.array().sin();
  const Vector shifted = (ang.array() + 0.7).cos();
  CHECK(subspace_correlation(shifted, targets) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(subspace_correlation(targets.col(0), targets.leftCols(1)) ==
        doctest::Approx(ground_truth_correlation(targets.col(0), targets.col(0))));
  const Vector noise = oracle::random_matrix(500, 1, 4);
  CHECK(std::abs(subspace_correlation(noise, targets.leftCols(1)) -
                 ground_truth_correlation(noise, targets.col(0))) <= 1e-12);
  CHECK(kind_of([&] { subspace_correlation(noise, Matrix::Ones(500, 2)); }) == ErrorKind::UndefinedCorrelation);
}

TEST_CASE("snr on a smooth signal is large") {
  const Vector lat = oracle::random_matrix(2000, 1, 5, 0.0, 1.0);
  const Vector d = (std::numbers::pi * lat.array()).cos();
  CHECK(snr(d, lat, 10) >= 1e2);
  CHECK(default_snr_window(2000) == 20);
  CHECK(default_snr_window(500) == 10);
}

TEST_CASE("snr of independent noise is order one") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Vector lat = oracle::random_matrix(2000, 1, 40 + seed, 0.0, 1.0);
    CHECK(snr(gaussian(2000, 50 + seed), lat, 20) <= 5.0);
  }
}

TEST_CASE("snr matches the direct formula") {
  const Vector lat = oracle::random_matrix(20, 1, 7);
  const Vector d = oracle::random_matrix(20, 1, 8);
  CHECK(snr(d, lat, 19) == doctest::Approx(oracle::snr(d, lat, 19)).epsilon(1e-12));
  for (Index k : {1, 3, 7}) CHECK(snr(d, lat, k) == doctest::Approx(oracle::snr(d, lat, k)).epsilon(1e-12));
}

TEST_CASE("snr invariance and limits") {
  const Vector lat = oracle::random_matrix(300, 1, 9, 0.1, 2.0);
  const Vector d = oracle::random_matrix(300, 1, 10);
  const Vector warped = lat.array().cube() + 5.0 * lat.array().exp();
  CHECK(std::abs(snr(d, lat, 10) - snr(d, warped, 10)) <= 1e-12 * snr(d, lat, 10));
  CHECK(snr(Vector::Constant(300, 0.4), lat, 10) == kSnrCap);
  CHECK(kind_of([&] { snr(d, lat, 300); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { snr(d, lat, 0); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("sbm accuracy") {
  std::vector<int> labels;
  std::vector<Index> idx;
  Vector d(200), flipped(200);
  for (Index i = 0; i < 200; ++i) {
    labels.push_back(i < 100 ? 0 : 1);
    idx.push_back(i);
    d(i) = labels.back();
    flipped(i) = 1 - labels.back();
  }
  CHECK(sbm_accuracy(d, labels, idx) == 1.0);
  CHECK(sbm_accuracy(flipped, labels, idx) == 1.0);

  std::vector<double> accs;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double a = sbm_accuracy(gaussian(200, 100 + seed), labels, idx);
    CHECK(a >= 0.5);
    CHECK(a <= 1.0);
    accs.push_back(a);
  }
  CHECK(oracle::median(accs) <= 0.6);

  CHECK(kind_of([&] { sbm_accuracy(d, {0}, {0}); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { sbm_accuracy(d, {0, 1}, {0, 400}); }) == ErrorKind::InvalidInput);
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "difflat/datasets.hpp"
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

void check_reproducible(const PairedDataset& x, const PairedDataset& y) {
  CHECK(x.xa.points() == y.xa.points());
  CHECK(x.xb.points() == y.xb.points());
  CHECK(x.latents.theta == y.latents.theta);
  CHECK(x.latents.psi_b == y.latents.psi_b);
}

double mean(const Vector& v) { return v.mean(); }

}  // namespace

TEST_CASE("line vs rectangle") {
  check_reproducible(gen_line_rectangle(4, 2.0, 1.0, 9), gen_line_rectangle(4, 2.0, 1.0, 9));
  const PairedDataset d = gen_line_rectangle(10000, 2.0, 1.0, 1);
  CHECK(d.xa.dim() == 1);
  CHECK(d.xb.dim() == 2);
  CHECK(d.xa.size() == 10000);
  CHECK(d.latents.theta.size() == 10000);
  CHECK(std::abs(mean(d.xb.points().col(0)) - 1.0) <= 0.02);
  CHECK(std::abs(mean(d.xb.points().col(1)) - 0.5) <= 0.02);
  CHECK(d.latents.theta.minCoeff() >= 0.0);
  CHECK(d.latents.theta.maxCoeff() <= 2.0);
  CHECK(d.latents.psi_b.minCoeff() >= 0.0);
  CHECK(d.latents.psi_b.maxCoeff() <= 1.0);
  CHECK(d.xa.points().col(0) == d.latents.theta);
  CHECK(d.xb.points().col(1) == d.latents.psi_b.col(0));
  CHECK(d.meta.at("generator") == "line_rectangle");
  CHECK(kind_of([] { gen_line_rectangle(10, 0.0, 1.0, 1); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { gen_line_rectangle(1, 2.0, 1.0, 1); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("line vs cube") {
  check_reproducible(gen_line_cube(6, 4.0, 2.0, 1.0, 3), gen_line_cube(6, 4.0, 2.0, 1.0, 3));
  const PairedDataset d = gen_line_cube(5000, 4.0, 2.0, 1.0, 4);
  CHECK(d.xa.dim() == 1);
  CHECK(d.xb.dim() == 3);
  CHECK(d.latents.psi_b.cols() == 2);
  for (Index i = 0; i < 3; ++i)
    for (Index j = i + 1; j < 3; ++j)
      CHECK(std::abs(oracle::pearson(d.xb.points().col(i), d.xb.points().col(j))) <= 0.05);
  CHECK(kind_of([] { gen_line_cube(10, 2.0, 4.0, 1.0, 1); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { gen_line_cube(10, 4.0, 2.0, 2.0, 1); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("circle vs torus") {
  const PairedDataset d = gen_circle_torus(2000, 3.0, 1.0, 5);
  CHECK(d.xa.dim() == 2);
  CHECK(d.xb.dim() == 3);
  for (Index i = 0; i < d.xa.size(); ++i) {
    CHECK(std::abs(d.xa.points().row(i).norm() - 3.0) <= 1e-12);
    const double x = d.xb.points()(i, 0), y = d.xb.points()(i, 1), z = d.xb.points()(i, 2);
    const double rho = std::sqrt(x * x + y * y) - 3.0;
    CHECK(std::abs(rho * rho + z * z - 1.0) <= 1e-10);
  }
  const PairedDataset big = gen_circle_torus(5000, 3.0, 1.0, 6);
  CHECK(std::abs(oracle::pearson(big.latents.theta, big.latents.psi_b.col(0))) <= 0.05);
  CHECK(big.latents.theta.minCoeff() >= 0.0);
  CHECK(big.latents.theta.maxCoeff() < 2.0 * std::numbers::pi);
  CHECK(kind_of([] { gen_circle_torus(10, 1.0, 1.0, 1); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("disk rotation") {
  const PairedDataset d = gen_disk_rotation(5000, 1.0, 7);
  CHECK(d.xa.dim() == 2);
  CHECK(d.xb.dim() == 2);
  for (Index i = 0; i < d.xa.size(); ++i)
    CHECK(std::abs(d.xa.points().row(i).norm() - d.xb.points().row(i).norm()) <= 1e-12);
  // Circular correlation of the two angles through their cos/sin components.
  const Vector pa = d.latents.psi_a.col(0), pb = d.latents.psi_b.col(0);
  const Vector ca = pa.array().cos(), sa = pa.array().sin(), cb = pb.array().cos(), sb = pb.array().sin();
  for (const Vector* u : {&ca, &sa})
    for (const Vector* v : {&cb, &sb}) CHECK(std::abs(oracle::pearson(*u, *v)) <= 0.05);
  CHECK(d.latents.theta.maxCoeff() <= 1.0);
  CHECK(kind_of([] { gen_disk_rotation(10, 0.0, 1); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("rectangle pair shares the first coordinate") {
  const PairedDataset d = gen_rectangle_pair(500, 2.0, 0.6, 8);
  CHECK(d.xa.points().col(0) == d.xb.points().col(0));
  CHECK(std::abs(oracle::pearson(d.xa.points().col(1), d.xb.points().col(1))) <= 0.15);
}

TEST_CASE("generators differ across seeds") {
  CHECK((gen_line_rectangle(50, 2, 1, 1).xb.points() - gen_line_rectangle(50, 2, 1, 2).xb.points())
            .cwiseAbs()
            .maxCoeff() > 0.0);
  CHECK((gen_circle_torus(50, 3, 1, 1).xb.points() - gen_circle_torus(50, 3, 1, 2).xb.points())
            .cwiseAbs()
            .maxCoeff() > 0.0);
  CHECK((gen_disk_rotation(50, 1, 1).xb.points() - gen_disk_rotation(50, 1, 2).xb.points()).cwiseAbs().maxCoeff() >
        0.0);
  CHECK((gen_line_cube(50, 4, 2, 1, 1).xb.points() - gen_line_cube(50, 4, 2, 1, 2).xb.points())
            .cwiseAbs()
            .maxCoeff() > 0.0);
}

TEST_CASE("SBM pair") {
  const std::vector<Index> a{200, 200, 200, 200};
  const std::vector<Index> b{100, 100, 200, 200, 200};
  const SbmPair s = gen_sbm_pair(800, a, b, 0.33, 0.05, 3);
  for (const Matrix* adj : {&s.adjacency_a, &s.adjacency_b}) {
    CHECK(*adj == adj->transpose());
    CHECK(adj->diagonal().isZero(0.0));
    CHECK((adj->array() == 0.0 || adj->array() == 1.0).all());
    CHECK(adj->rowwise().sum().minCoeff() > 0.0);
  }
  CHECK(s.split_indices.size() == 200);
  CHECK(s.split_labels.front() == 0);
  CHECK(s.split_labels.back() == 1);

  // Within-block density within 3 standard errors of p (block 2 of A).
  const Index m = 200;
  const double pairs = m * (m - 1) / 2.0;
  const double edges = s.adjacency_a.block(200, 200, m, m).sum() / 2.0;
  const double se = std::sqrt(0.33 * 0.67 / pairs);
  CHECK(std::abs(edges / pairs - 0.33) <= 3.0 * se);
  const double cross = s.adjacency_a.block(0, 200, 200, 200).sum() / (200.0 * 200.0);
  CHECK(std::abs(cross - 0.05) <= 3.0 * std::sqrt(0.05 * 0.95 / 40000.0));

  const SbmPair again = gen_sbm_pair(800, a, b, 0.33, 0.05, 3);
  CHECK(again.adjacency_b == s.adjacency_b);
  CHECK(gen_sbm_pair(800, a, b, 0.33, 0.05, 4).adjacency_b != s.adjacency_b);

  CHECK(kind_of([&] { gen_sbm_pair(700, a, b, 0.33, 0.05, 1); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { gen_sbm_pair(800, a, b, 0.05, 0.33, 1); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { gen_sbm_pair(800, a, {300, 500}, 0.33, 0.05, 1); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("SBM with q = 0 is block diagonal") {
  const Matrix adj = sample_sbm({30, 20, 25}, 0.5, 0.0, 11);
  CHECK(adj.block(0, 30, 30, 45).isZero(0.0));
  CHECK(adj.block(30, 50, 20, 25).isZero(0.0));
}

TEST_CASE("SBM retries are bounded") {
  // p tiny: isolated vertices are all but certain on every attempt.
  CHECK(kind_of([] { gen_sbm_pair(40, {20, 20}, {10, 10, 20}, 1e-6, 0.0, 1, 3); }) == ErrorKind::Numerical);
}

TEST_CASE("noise injection") {
  const PointCloud x(oracle::random_matrix(100, 3, 13));
  CHECK(add_noise(x, 0.0, 5).points() == x.points());
  CHECK(add_noise(x, 0.3, 5).points() == add_noise(x, 0.3, 5).points());
  CHECK(add_noise(x, 0.3, 5).points() != add_noise(x, 0.3, 6).points());

  const PointCloud big(Matrix::Zero(250000, 4));
  const Matrix diff = add_noise(big, 1.0, 17).points();
  const double var = diff.array().square().mean() - diff.mean() * diff.mean();
  CHECK(std::abs(var - 1.0) <= 0.01);
  CHECK(kind_of([&] { add_noise(x, -0.1, 1); }) == ErrorKind::InvalidParameter);
}

#include "difflat/datasets.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace difflat {

namespace {

using Engine = std::mt19937_64;

Vector uniform(Engine& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

void check_n(Index n) { require(n >= 2, ErrorKind::InvalidParameter, "n must be at least 2"); }

}  // namespace

PairedDataset gen_line_rectangle(Index n, double a, double b, std::uint64_t seed) {
  check_n(n);
  require(a > 0.0 && b > 0.0, ErrorKind::InvalidParameter, "rectangle sides must be positive");
  Engine rng(seed);
  const Vector theta = uniform(rng, n, 0.0, a);
  const Vector psi = uniform(rng, n, 0.0, b);

  Matrix xb(n, 2);
  xb << theta, psi;
  PairedDataset d{PointCloud(Matrix(theta)), PointCloud(std::move(xb)), {theta, Matrix(n, 0), Matrix(psi)}, {}};
  d.meta = {{"generator", "line_rectangle"}, {"n", n}, {"a", a}, {"b", b}, {"seed", seed}};
  return d;
}

PairedDataset gen_line_cube(Index n, double a, double b, double c, std::uint64_t seed) {
  check_n(n);
  require(a > b && b > c && c > 0.0, ErrorKind::InvalidParameter, "cube sides must satisfy a > b > c > 0");
  Engine rng(seed);
  const Vector theta = uniform(rng, n, 0.0, a);
  const Vector psi1 = uniform(rng, n, 0.0, b);
  const Vector psi2 = uniform(rng, n, 0.0, c);

  Matrix xb(n, 3);
  xb << theta, psi1, psi2;
  Matrix psi(n, 2);
  psi << psi1, psi2;
  PairedDataset d{PointCloud(Matrix(theta)), PointCloud(std::move(xb)), {theta, Matrix(n, 0), std::move(psi)}, {}};
  d.meta = {{"generator", "line_cube"}, {"n", n}, {"a", a}, {"b", b}, {"c", c}, {"seed", seed}};
  return d;
}

PairedDataset gen_circle_torus(Index n, double big_r, double small_r, std::uint64_t seed) {
  check_n(n);
  require(small_r > 0.0, ErrorKind::InvalidParameter, "tube radius must be positive");
  require(big_r > small_r, ErrorKind::InvalidParameter, "R must exceed r (self-intersecting torus)");
  Engine rng(seed);
  const double two_pi = 2.0 * std::numbers::pi;
  const Vector theta = uniform(rng, n, 0.0, two_pi);
  const Vector psi = uniform(rng, n, 0.0, two_pi);

  Matrix xa(n, 2);
  Matrix xb(n, 3);
  for (Index i = 0; i < n; ++i) {
    const double ring = big_r + small_r * std::cos(psi(i));
    xa(i, 0) = big_r * std::cos(theta(i));
    xa(i, 1) = big_r * std::sin(theta(i));
    xb(i, 0) = ring * std::cos(theta(i));
    xb(i, 1) = ring * std::sin(theta(i));
    xb(i, 2) = small_r * std::sin(psi(i));
  }
  PairedDataset d{PointCloud(std::move(xa)), PointCloud(std::move(xb)), {theta, Matrix(n, 0), Matrix(psi)}, {}};
  d.meta = {{"generator", "circle_torus"}, {"n", n}, {"R", big_r}, {"r", small_r}, {"seed", seed}};
  return d;
}

PairedDataset gen_disk_rotation(Index n, double radius, std::uint64_t seed) {
  check_n(n);
  require(radius > 0.0, ErrorKind::InvalidParameter, "disk radius must be positive");
  Engine rng(seed);
  const double two_pi = 2.0 * std::numbers::pi;
  const Vector r = uniform(rng, n, 0.0, radius);
  const Vector psi_a = uniform(rng, n, 0.0, two_pi);
  const Vector psi_b = uniform(rng, n, 0.0, two_pi);

  Matrix xa(n, 2);
  Matrix xb(n, 2);
  for (Index i = 0; i < n; ++i) {
    xa(i, 0) = r(i) * std::cos(psi_a(i));
    xa(i, 1) = r(i) * std::sin(psi_a(i));
    xb(i, 0) = r(i) * std::cos(psi_b(i));
    xb(i, 1) = r(i) * std::sin(psi_b(i));
  }
  PairedDataset d{PointCloud(std::move(xa)), PointCloud(std::move(xb)), {r, Matrix(psi_a), Matrix(psi_b)}, {}};
  d.meta = {{"generator", "disk_rotation"}, {"n", n}, {"R", radius}, {"seed", seed}};
  return d;
}

PairedDataset gen_rectangle_pair(Index n, double a, double b, std::uint64_t seed) {
  check_n(n);
  require(a > 0.0 && b > 0.0, ErrorKind::InvalidParameter, "rectangle sides must be positive");
  Engine rng(seed);
  const Vector theta = uniform(rng, n, 0.0, a);
  const Vector psi_a = uniform(rng, n, 0.0, b);
  const Vector psi_b = uniform(rng, n, 0.0, b);
  Matrix xa(n, 2);
  Matrix xb(n, 2);
  xa << theta, psi_a;
  xb << theta, psi_b;
  PairedDataset d{PointCloud(std::move(xa)), PointCloud(std::move(xb)), {theta, Matrix(psi_a), Matrix(psi_b)}, {}};
  d.meta = {{"generator", "rectangle_pair"}, {"n", n}, {"a", a}, {"b", b}, {"seed", seed}};
  return d;
}

Matrix sample_sbm(const std::vector<Index>& sizes, double p, double q, std::uint64_t seed) {
  std::vector<int> label;
  for (std::size_t c = 0; c < sizes.size(); ++c) label.insert(label.end(), static_cast<std::size_t>(sizes[c]), static_cast<int>(c));
  const Index n = static_cast<Index>(label.size());
  Engine rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix adj = Matrix::Zero(n, n);
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double prob = label[static_cast<std::size_t>(i)] == label[static_cast<std::size_t>(j)] ? p : q;
      if (u(rng) < prob) {
        adj(i, j) = 1.0;
        adj(j, i) = 1.0;
      }
    }
  }
  return adj;
}

SbmPair gen_sbm_pair(Index n, const std::vector<Index>& sizes_a, const std::vector<Index>& sizes_b, double p,
                     double q, std::uint64_t seed, int max_retries) {
  require(std::accumulate(sizes_a.begin(), sizes_a.end(), Index{0}) == n &&
              std::accumulate(sizes_b.begin(), sizes_b.end(), Index{0}) == n,
          ErrorKind::InvalidParameter, "block sizes must sum to n");
  require(q >= 0.0 && q < p && p < 1.0, ErrorKind::InvalidParameter, "need 0 <= q < p < 1");
  require(!sizes_a.empty() && sizes_b.size() >= 2, ErrorKind::InvalidParameter, "need blocks in both graphs");

  // B's leading blocks must tile A's first block.
  Index covered = 0;
  std::size_t parts = 0;
  while (parts < sizes_b.size() && covered < sizes_a[0]) covered += sizes_b[parts++];
  require(covered == sizes_a[0] && parts >= 2, ErrorKind::InvalidParameter,
          "B's first blocks must split A's first block");

  auto draw = [&](const std::vector<Index>& sizes, std::uint64_t base) {
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
      Matrix adj = sample_sbm(sizes, p, q, base + static_cast<std::uint64_t>(attempt));
      if ((adj.rowwise().sum().array() > 0.0).all()) return adj;
    }
    throw Error(ErrorKind::Numerical, "SBM draw kept producing isolated vertices");
  };

  SbmPair out;
  // Distinct seed streams for the two graphs.
  out.adjacency_a = draw(sizes_a, seed * 2654435761ULL + 1ULL);
  out.adjacency_b = draw(sizes_b, seed * 2654435761ULL + 1000003ULL);
  for (std::size_t c = 0; c < sizes_a.size(); ++c) out.labels_a.insert(out.labels_a.end(), static_cast<std::size_t>(sizes_a[c]), static_cast<int>(c));
  for (std::size_t c = 0; c < sizes_b.size(); ++c) out.labels_b.insert(out.labels_b.end(), static_cast<std::size_t>(sizes_b[c]), static_cast<int>(c));
  for (Index i = 0; i < sizes_a[0]; ++i) {
    out.split_indices.push_back(i);
    out.split_labels.push_back(out.labels_b[static_cast<std::size_t>(i)] == 0 ? 0 : 1);
  }
  out.meta = {{"generator", "sbm"}, {"n", n}, {"sizes_a", sizes_a}, {"sizes_b", sizes_b},
              {"p", p}, {"q", q}, {"seed", seed}};
  return out;
}

PointCloud add_noise(const PointCloud& x, double sigma, std::uint64_t seed) {
  require(sigma >= 0.0, ErrorKind::InvalidParameter, "noise level must be non-negative");
  if (sigma == 0.0) return x;
  Engine rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  Matrix out = x.points();
  for (Index j = 0; j < out.cols(); ++j)
    for (Index i = 0; i < out.rows(); ++i) out(i, j) += g(rng);
  return PointCloud(std::move(out));
}

}  // namespace difflat

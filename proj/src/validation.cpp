#include "difflat/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "difflat/datasets.hpp"
#include "difflat/differential.hpp"
#include "difflat/graph_core.hpp"
#include "difflat/metrics.hpp"
#include "difflat/spectral.hpp"

namespace difflat {

namespace {

using Engine = std::mt19937_64;

Matrix gaussian_matrix(Engine& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

Matrix orthonormalize(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

// Least-squares fit of v onto span(basis): returns residual norm and |coef|.
ModeFit fit_onto(const Vector& v, const Matrix& basis) {
  const Vector coef = basis.colPivHouseholderQr().solve(v);
  return {(v - basis * coef).norm(), coef.norm(), 0.0};
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

nlohmann::json ConvergenceTrace::to_json() const {
  return {{"description", description}, {"n", n_values}, {"errors", errors},
          {"bandwidths", bandwidths}, {"alphas", alphas}};
}

double rate_bandwidth(Index n, int intrinsic_dim) {
  require(n >= 2 && intrinsic_dim >= 1, ErrorKind::InvalidParameter, "rate bandwidth needs n >= 2, d >= 1");
  const double eps = std::pow(std::log(double(n)) / double(n), 1.0 / (intrinsic_dim / 2.0 + 2.0));
  return std::sqrt(2.0 * eps);
}

ModeFit eigenvector_error(TestManifold manifold, Index n, Index k, std::uint64_t seed) {
  require(k >= 0 && k < n, ErrorKind::InvalidParameter, "mode index out of range");
  Engine rng(seed);
  const double root_n = std::sqrt(double(n));
  Matrix points;
  Matrix basis;
  if (manifold == TestManifold::Circle) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    Vector t(n);
    for (Index i = 0; i < n; ++i) t(i) = u(rng);
    points.resize(n, 2);
    points << t.array().cos().matrix(), t.array().sin().matrix();
    if (k == 0) {
      basis = Matrix::Constant(n, 1, 1.0 / root_n);
    } else {
      const double m = double((k + 1) / 2);
      basis.resize(n, 2);
      basis << (m * t.array()).cos().matrix(), (m * t.array()).sin().matrix();
      basis *= std::sqrt(2.0) / root_n;
    }
  } else {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector x(n);
    for (Index i = 0; i < n; ++i) x(i) = u(rng);
    points = x;
    basis.resize(n, 1);
    if (k == 0)
      basis.setConstant(1.0 / root_n);
    else
      basis.col(0) = (double(k) * std::numbers::pi * x.array()).cos().matrix() * (std::sqrt(2.0) / root_n);
  }

  const double sigma = rate_bandwidth(n, 1);
  const GraphOperators g = gaussian_affinity(PointCloud(std::move(points)), sigma);
  const EigenSystem es = eigendecompose(g.L, k + 1, SpectrumEnd::Smallest, "L");
  ModeFit fit = fit_onto(es.eigenvectors.col(k), basis);
  fit.bandwidth = sigma;
  return fit;
}

ConvergenceTrace eigenvector_convergence(TestManifold manifold, const std::vector<Index>& n_grid, Index k,
                                         std::uint64_t seed) {
  require(!n_grid.empty() && std::is_sorted(n_grid.begin(), n_grid.end()), ErrorKind::InvalidParameter,
          "n grid must be non-empty and ascending");
  ConvergenceTrace t;
  t.description = std::string(manifold == TestManifold::Circle ? "circle" : "interval") +
                  " eigenvector convergence, mode " + std::to_string(k);
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const ModeFit f = eigenvector_error(manifold, n_grid[i], k, mix(seed, i));
    t.n_values.push_back(n_grid[i]);
    t.errors.push_back(f.error);
    t.bandwidths.push_back(f.bandwidth);
    t.alphas.push_back(f.alpha);
  }
  return t;
}

namespace {

Matrix leading_laplacian_vectors(const PointCloud& x, Index K, const char* label) {
  const GraphOperators g = gaussian_affinity(x, median_bandwidth(x));
  return eigendecompose(g.L, K, SpectrumEnd::Smallest, label).eigenvectors;
}

}  // namespace

Matrix cross_orthogonality(const PointCloud& xa, const PointCloud& xb, Index K) {
  require(xa.size() == xb.size(), ErrorKind::InvalidInput, "modalities differ in sample count");
  require(K >= 1 && K <= xa.size(), ErrorKind::InvalidParameter, "K out of range");
  const Matrix va = leading_laplacian_vectors(xa, K, "L^A");
  const Matrix vb = leading_laplacian_vectors(xb, K, "L^B");
  return (va.transpose() * vb).cwiseAbs();
}

CrossOrthogonalitySummary cross_orthogonality_experiment(Index n, double a, double b, Index K,
                                                         std::uint64_t seed) {
  require(K >= 1 && K <= n, ErrorKind::InvalidParameter, "K out of range");
  const PairedDataset d = gen_rectangle_pair(n, a, b, seed);
  const Matrix va = leading_laplacian_vectors(d.xa, K, "L^A");
  const Matrix vb = leading_laplacian_vectors(d.xb, K, "L^B");
  CrossOrthogonalitySummary s;
  s.inner = (va.transpose() * vb).cwiseAbs();

  constexpr Index kModes = 8;
  Matrix theta_basis(n, kModes);
  for (Index k = 0; k < kModes; ++k)
    theta_basis.col(k) = (double(k) * std::numbers::pi / a * d.latents.theta.array()).cos().matrix();
  const auto qr = theta_basis.colPivHouseholderQr();

  // Dominant theta frequency of each eigenvector, or -1 when not theta-only.
  auto classify = [&](const Matrix& vecs) {
    std::vector<Index> freq(static_cast<std::size_t>(K), -1);
    for (Index i = 0; i < K; ++i) {
      const Vector v = vecs.col(i);
      const Vector coef = qr.solve(v);
      if ((theta_basis * coef).norm() >= 0.9 * v.norm()) coef.cwiseAbs().maxCoeff(&freq[static_cast<std::size_t>(i)]);
    }
    return freq;
  };
  const std::vector<Index> fa = classify(va);
  const std::vector<Index> fb = classify(vb);

  for (Index i = 0; i < K; ++i) {
    for (Index j = 0; j < K; ++j) {
      const Index f = fa[static_cast<std::size_t>(i)];
      if (f >= 0 && f == fb[static_cast<std::size_t>(j)]) {
        s.shared_min = std::min(s.shared_min, s.inner(i, j));
        ++s.shared_pairs;
      } else {
        s.nonshared_max = std::max(s.nonshared_max, s.inner(i, j));
      }
    }
  }
  return s;
}

namespace {

SingleConfig lowpass_config(double tau) {
  SingleConfig cfg;
  cfg.filter = FilterRule::with(FilterSpec::threshold(tau));
  cfg.lowpass_tau = tau;
  return cfg;
}

}  // namespace

ConvergenceTrace main_theorem_check(double a, double b, double tau, const std::vector<Index>& n_grid,
                                    std::uint64_t seed) {
  require(!n_grid.empty(), ErrorKind::InvalidParameter, "n grid must be non-empty");
  ConvergenceTrace t;
  t.description = "differential vector vs sampled cos(pi psi / b), low-pass tau " + std::to_string(tau);
  SingleConfig cfg = lowpass_config(tau);
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const Index n = n_grid[i];
    // Bandwidths shrink with n at the theorem's rate; a fixed median
    // bandwidth leaves an O(eps) bias floor.
    cfg.sigma_a = rate_bandwidth(n, 1);
    cfg.sigma_b = rate_bandwidth(n, 2);
    const PairedDataset d = gen_line_rectangle(n, a, b, mix(seed, i));
    const SinglePair r = extract_single(d.xa, d.xb, cfg);
    const Vector delta = r.b.vector(0);
    const Vector phi = (std::numbers::pi / b * d.latents.psi_b.col(0).array()).cos().matrix() *
                       (std::sqrt(2.0) / std::sqrt(double(n)));
    const double alpha = phi.dot(delta) / phi.squaredNorm();
    t.n_values.push_back(n);
    t.errors.push_back((delta - alpha * phi).squaredNorm());
    t.bandwidths.push_back(*cfg.sigma_b);
    t.alphas.push_back(std::abs(alpha));
  }
  return t;
}

AblationResult main_theorem_ablation(Index n, double a, double b, double tau, std::uint64_t seed) {
  const SingleConfig cfg = lowpass_config(tau);
  const PairedDataset d = gen_line_rectangle(n, a, b, seed);
  AblationResult out;
  {
    const SinglePair r = extract_single(d.xa, d.xb, cfg);
    const Vector target = (std::numbers::pi / b * d.latents.psi_b.col(0).array()).cos().matrix();
    out.differential_corr = ground_truth_correlation(r.b.vector(0), target);
  }
  const SinglePair r = extract_single(d.xb, d.xb, cfg);
  for (int k = 1; k <= 5; ++k) {
    const Vector target = (double(k) * std::numbers::pi / a * d.latents.theta.array()).cos().matrix();
    out.ablated_theta_corr = std::max(out.ablated_theta_corr, ground_truth_correlation(r.b.vector(0), target));
  }
  return out;
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  if (M.rows() == M.cols() && M.isApprox(M.transpose(), 1e-12)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

double aux2_margin(const Matrix& V, const Matrix& U) {
  require(V.rows() == U.rows() && V.cols() == U.cols(), ErrorKind::InvalidInput, "shape mismatch");
  double eps = 0.0;
  for (Index i = 0; i < V.cols(); ++i) eps = std::max(eps, 1.0 - V.col(i).dot(U.col(i)));
  const double lhs = std::pow(spectral_norm(V - U), 2);
  return 2.0 * double(V.cols()) * eps - lhs;
}

double aux3_margin(const Matrix& A, const Matrix& V) {
  const Index n = A.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  const double eps = std::max((V.transpose() * es.eigenvectors()).cwiseAbs().maxCoeff(), 1.0 / std::sqrt(double(n)));
  const double trace = es.eigenvalues().cwiseMax(0.0).sum();
  const Matrix Q = Matrix::Identity(n, n) - V * V.transpose();
  const double lhs = spectral_norm(A - Q * A * Q);
  return double(V.cols()) * eps * eps * trace - lhs;
}

double aux4_margin(const Matrix& M, const Matrix& V, const Matrix& U) {
  const Index n = M.rows();
  const Matrix Q1 = Matrix::Identity(n, n) - V * V.transpose();
  const Matrix Q2 = Matrix::Identity(n, n) - U * U.transpose();
  const double lhs = spectral_norm(Q1 * M * Q1 - Q2 * M * Q2);
  return 4.0 * spectral_norm(M) * spectral_norm(U - V) - lhs;
}

double lemma1_margin(const Vector& va, const Vector& vb, const Vector& ua, const Vector& ub) {
  const double a = (ua - va).norm();
  const double b = (ub - vb).norm();
  return std::abs(va.dot(vb)) - (1.0 - (a + b + a * b));
}

bool AuxReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.violations == 0; });
}

nlohmann::json AuxReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"lemma", c.lemma}, {"trials", c.trials}, {"violations", c.violations},
                   {"min_margin", c.min_margin}, {"worst_seed", c.worst_seed}, {"passed", c.violations == 0}});
  return {{"slack", slack}, {"passed", passed()}, {"checks", arr}};
}

AuxReport aux_lemma_suite(std::uint64_t seed, Index trials, double slack) {
  require(trials >= 1, ErrorKind::InvalidParameter, "trials must be at least 1");
  AuxReport report;
  report.slack = slack;

  auto run = [&](const char* name, std::uint64_t salt, auto&& trial) {
    LemmaCheck c{name, trials, 0, std::numeric_limits<double>::infinity(), 0};
    for (Index t = 0; t < trials; ++t) {
      const std::uint64_t s = mix(mix(seed, salt), static_cast<std::uint64_t>(t));
      Engine rng(s);
      const double margin = trial(rng);
      if (margin < -slack) ++c.violations;
      if (margin < c.min_margin) {
        c.min_margin = margin;
        c.worst_seed = s;
      }
    }
    report.checks.push_back(c);
  };

  auto dims = [](Engine& rng) {
    const Index n = std::uniform_int_distribution<Index>(10, 100)(rng);
    const Index K = std::uniform_int_distribution<Index>(1, 8)(rng);
    return std::pair{n, K};
  };

  run("aux_2", 2, [&](Engine& rng) {
    const auto [n, K] = dims(rng);
    const Matrix U = orthonormalize(gaussian_matrix(rng, n, K));
    const double scale = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    Matrix V = orthonormalize(U + scale * gaussian_matrix(rng, n, K) / std::sqrt(double(n)));
    for (Index i = 0; i < K; ++i)
      if (V.col(i).dot(U.col(i)) < 0.0) V.col(i) *= -1.0;
    return aux2_margin(V, U);
  });

  run("aux_3", 3, [&](Engine& rng) {
    const auto [n, K] = dims(rng);
    // The complement of A's range must have room for K orthonormal columns.
    const Index r = std::uniform_int_distribution<Index>(1, std::min<Index>(8, n - K))(rng);
    const Matrix basis = orthonormalize(gaussian_matrix(rng, n, n));
    Vector lambda = Vector::Zero(n);
    std::uniform_real_distribution<double> ev(0.1, 1.0);
    for (Index i = 0; i < r; ++i) lambda(i) = ev(rng);
    const Matrix A = basis * lambda.asDiagonal() * basis.transpose();
    // V drawn in the complement of A's range, then nudged towards it.
    const Matrix top = basis.leftCols(r);
    Matrix Z = gaussian_matrix(rng, n, K);
    Z -= top * (top.transpose() * Z);
    Z += 0.1 * top * gaussian_matrix(rng, r, K);
    return aux3_margin(0.5 * (A + A.transpose()), orthonormalize(Z));
  });

  run("aux_4", 4, [&](Engine& rng) {
    const auto [n, K] = dims(rng);
    const Matrix G = gaussian_matrix(rng, n, n);
    const Matrix M = G * G.transpose() / double(n);
    const Matrix V = orthonormalize(gaussian_matrix(rng, n, K));
    const double scale = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const Matrix U = orthonormalize(V + scale * gaussian_matrix(rng, n, K) / std::sqrt(double(n)));
    return aux4_margin(M, V, U);
  });

  run("lemma_1", 1, [&](Engine& rng) {
    const auto [n, K] = dims(rng);
    (void)K;
    const Vector dir = gaussian_matrix(rng, n, 1).col(0).normalized();
    const double scale = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    const Vector va = (dir + scale * gaussian_matrix(rng, n, 1).col(0) / std::sqrt(double(n))).normalized();
    const Vector vb = (dir + scale * gaussian_matrix(rng, n, 1).col(0) / std::sqrt(double(n))).normalized();
    // u^A, u^B: projections onto the common line, hence proportional.
    return lemma1_margin(va, vb, dir * dir.dot(va), dir * dir.dot(vb));
  });

  return report;
}

bool PropertyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed(); });
}

nlohmann::json PropertyReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"worst", c.worst}, {"tolerance", c.tolerance}, {"cases", c.cases},
                   {"passed", c.passed()}});
  return {{"passed", passed()}, {"checks", arr}};
}

PropertyReport numeric_property_suite(std::uint64_t seed, Index cases) {
  require(cases >= 1, ErrorKind::InvalidParameter, "cases must be at least 1");
  PropertyReport report;
  PropertyCheck gft_check{"gft_roundtrip", 0.0, 1e-9, cases};
  PropertyCheck idem{"filter_idempotence", 0.0, 1e-8, cases};
  PropertyCheck psd{"laplacian_psd", 0.0, 1e-8, cases};
  PropertyCheck energy{"dirichlet_identity", 0.0, 1e-9, cases};
  PropertyCheck perm{"permutation_equivariance", 0.0, 1e-8, std::min<Index>(cases, 5)};

  for (Index c = 0; c < cases; ++c) {
    Engine rng(mix(seed, static_cast<std::uint64_t>(c)));
    const Index n = std::uniform_int_distribution<Index>(20, 60)(rng);
    const Index dim = std::uniform_int_distribution<Index>(1, 4)(rng);
    const PointCloud pc(gaussian_matrix(rng, n, dim));
    const GraphOperators g = gaussian_affinity(pc, median_bandwidth(pc));
    const EigenSystem es = eigendecompose(g.L, n, SpectrumEnd::Smallest, "L");

    const Vector s = gaussian_matrix(rng, n, 1).col(0);
    gft_check.worst = std::max(gft_check.worst, (igft(es, gft(es, s)) - s).cwiseAbs().maxCoeff());

    const Matrix H = filter_matrix(es, FilterSpec::threshold(0.5));
    idem.worst = std::max(idem.worst, spectral_norm(H * H - H));

    // Both sides of the PSD claim: nothing below 0, and the bottom is 0.
    psd.worst = std::max(psd.worst, std::abs(es.eigenvalues(0)));

    double pairs = 0.0;
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const double diff = s(i) / std::sqrt(g.degrees(i)) - s(j) / std::sqrt(g.degrees(j));
        pairs += g.W(i, j) * diff * diff;
      }
    pairs *= 0.5;
    const double quad = dirichlet_energy(g, s);
    energy.worst = std::max(energy.worst, std::abs(quad - pairs) / std::max(std::abs(pairs), 1e-300));

    if (c < perm.cases) {
      const Index m = 80;
      const PairedDataset d = gen_line_rectangle(m, 2.0, 1.0, mix(seed, 1000 + static_cast<std::uint64_t>(c)));
      std::vector<Index> order(static_cast<std::size_t>(m));
      for (Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
      std::shuffle(order.begin(), order.end(), rng);
      Matrix pa(m, d.xa.dim());
      Matrix pb(m, d.xb.dim());
      for (Index i = 0; i < m; ++i) {
        pa.row(i) = d.xa.points().row(order[static_cast<std::size_t>(i)]);
        pb.row(i) = d.xb.points().row(order[static_cast<std::size_t>(i)]);
      }
      SingleConfig cfg;
      cfg.num_eigenpairs = m;
      const Vector base = extract_single(d.xa, d.xb, cfg).b.vector(0);
      const Vector moved = extract_single(PointCloud(pa), PointCloud(pb), cfg).b.vector(0);
      Vector expected(m);
      for (Index i = 0; i < m; ++i) expected(i) = base(order[static_cast<std::size_t>(i)]);
      const double dev = std::min((moved - expected).cwiseAbs().maxCoeff(), (moved + expected).cwiseAbs().maxCoeff());
      perm.worst = std::max(perm.worst, dev);
    }
  }
  report.checks = {gft_check, idem, psd, energy, perm};
  return report;
}

}  // namespace difflat

namespace difflat {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

ValidationOutcome run_validation(ValidationLevel level, std::uint64_t seed, Index repeats) {
  require(repeats >= 1, ErrorKind::InvalidParameter, "repeats must be at least 1");
  ValidationOutcome out;
  nlohmann::json checks = nlohmann::json::array();
  bool ok = true;

  const AuxReport aux = aux_lemma_suite(seed, 100);
  checks.push_back({{"check", "aux_lemmas"}, {"passed", aux.passed()}, {"detail", aux.to_json()}});
  ok = ok && aux.passed();

  const PropertyReport props = numeric_property_suite(seed, 50);
  checks.push_back({{"check", "numeric_properties"}, {"passed", props.passed()}, {"detail", props.to_json()}});
  ok = ok && props.passed();

  if (level == ValidationLevel::Full) {
    const std::vector<Index> grid = {500, 1000, 2000};
    auto median_trace = [&](auto&& trace_for) {
      std::vector<std::vector<double>> errs(grid.size());
      std::vector<std::vector<double>> alphas(grid.size());
      nlohmann::json traces = nlohmann::json::array();
      for (Index r = 0; r < repeats; ++r) {
        const ConvergenceTrace t = trace_for(seed + static_cast<std::uint64_t>(r));
        traces.push_back(t.to_json());
        for (std::size_t i = 0; i < grid.size(); ++i) {
          errs[i].push_back(t.errors[i]);
          alphas[i].push_back(t.alphas[i]);
        }
      }
      std::vector<double> me;
      std::vector<double> ma;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        me.push_back(median(errs[i]));
        ma.push_back(median(alphas[i]));
      }
      return std::tuple{me, ma, traces};
    };

    {
      auto [me, ma, traces] = median_trace(
          [&](std::uint64_t s) { return eigenvector_convergence(TestManifold::Circle, grid, 1, s); });
      const bool pass = strictly_decreasing(me) && ma.back() >= 0.9 && ma.back() <= 1.1;
      checks.push_back({{"check", "circle_convergence"}, {"passed", pass}, {"median_errors", me},
                        {"median_alpha", ma}, {"traces", traces}});
      ok = ok && pass;
    }
    {
      auto [me, ma, traces] = median_trace([&](std::uint64_t s) { return main_theorem_check(2.0, 1.0, 0.95, grid, s); });
      bool pass = me.back() <= 0.2;
      for (std::size_t i = 1; i < me.size(); ++i) pass = pass && me[i] <= me[i - 1];
      checks.push_back({{"check", "main_theorem"}, {"passed", pass}, {"median_sq_errors", me}, {"traces", traces}});
      ok = ok && pass;
    }
    {
      std::vector<double> shared_2000;
      std::vector<double> nonshared_2000;
      std::vector<double> nonshared_500;
      for (Index r = 0; r < repeats; ++r) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(r);
        const CrossOrthogonalitySummary small = cross_orthogonality_experiment(500, 2.0, 0.6, 6, s);
        const CrossOrthogonalitySummary big = cross_orthogonality_experiment(2000, 2.0, 0.6, 6, s);
        nonshared_500.push_back(small.nonshared_max);
        nonshared_2000.push_back(big.nonshared_max);
        shared_2000.push_back(big.shared_pairs > 0 ? big.shared_min : 0.0);
      }
      const double sh = median(shared_2000);
      const double ns = median(nonshared_2000);
      const double ns_small = median(nonshared_500);
      const bool pass = sh >= 0.9 && ns <= 0.3 && ns < ns_small;
      checks.push_back({{"check", "cross_orthogonality"}, {"passed", pass}, {"median_shared_min", sh},
                        {"median_nonshared_max", ns}, {"median_nonshared_max_n500", ns_small}});
      ok = ok && pass;
    }
  }

  out.passed = ok;
  out.report = {{"level", level == ValidationLevel::Full ? "full" : "fast"}, {"seed", seed},
                {"passed", ok}, {"checks", checks}};
  return out;
}

}  // namespace difflat

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "difflat/types.hpp"

namespace difflat {

struct ConvergenceTrace {
  std::vector<Index> n_values;
  std::vector<double> errors;
  std::vector<double> bandwidths;
  std::vector<double> alphas;  // fitted |alpha| per n
  std::string description;

  nlohmann::json to_json() const;
};

enum class TestManifold { Circle, Interval };

// sigma = sqrt(2 eps_n) with eps_n = (log n / n)^(1 / (d/2 + 2)).
double rate_bandwidth(Index n, int intrinsic_dim);

struct ModeFit {
  double error = 0.0;  // |v_k - proj v_k| onto the sampled eigenspace
  double alpha = 0.0;  // norm of the least-squares coefficients
  double bandwidth = 0.0;
};

// Circle: unit circle, modes 2m-1 and 2m share the pair sqrt2 cos(m t),
// sqrt2 sin(m t) and are fitted on that 2-D span. Interval: [0,1] with
// sqrt2 cos(pi k x) (1 for k = 0). Samples are scaled by 1/sqrt(n).
ModeFit eigenvector_error(TestManifold manifold, Index n, Index k, std::uint64_t seed);

ConvergenceTrace eigenvector_convergence(TestManifold manifold, const std::vector<Index>& n_grid, Index k,
                                         std::uint64_t seed);

// K x K matrix of |<v^A_i, v^B_j>| over the leading Laplacian eigenvectors
// (median bandwidth graphs).
Matrix cross_orthogonality(const PointCloud& xa, const PointCloud& xb, Index K);

struct CrossOrthogonalitySummary {
  Matrix inner;            // K x K
  double shared_min = 1.0;  // smallest entry over matched theta-only pairs
  double nonshared_max = 0.0;
  Index shared_pairs = 0;
};

// Rectangle pair [0,a] x [0,b] sharing theta. An eigenvector is theta-only
// when its regression onto cos(pi k theta / a), k < 8, explains >= 0.9 of
// its norm; two theta-only vectors with the same dominant k form a shared
// pair and every other entry counts as non-shared.
CrossOrthogonalitySummary cross_orthogonality_experiment(Index n, double a, double b, Index K,
                                                         std::uint64_t seed);

// Line vs rectangle (a, b) with the low-pass variant at tau. Per n the
// squared distance of delta^B to the fitted alpha * sqrt2 cos(pi psi / b) / sqrt(n),
// with rate_bandwidth(n, 1) on A and rate_bandwidth(n, 2) on B.
ConvergenceTrace main_theorem_check(double a, double b, double tau, const std::vector<Index>& n_grid,
                                    std::uint64_t seed);

struct AblationResult {
  double differential_corr = 0.0;  // corr(delta^B, cos(pi psi / b)), line vs rectangle
  double ablated_theta_corr = 0.0;  // max_k corr(delta^B, cos(pi k theta / a)), rectangle vs itself
};
AblationResult main_theorem_ablation(Index n, double a, double b, double tau, std::uint64_t seed);

struct LemmaCheck {
  std::string lemma;
  Index trials = 0;
  Index violations = 0;
  double min_margin = 0.0;  // rhs - lhs, worst trial
  std::uint64_t worst_seed = 0;
};

struct AuxReport {
  std::vector<LemmaCheck> checks;
  double slack = 1e-9;
  bool passed() const;
  nlohmann::json to_json() const;
};

// Randomized checks of the auxiliary inequalities (aux_2, aux_3, aux_4,
// lemma_1); each trial uses its own derived seed.
AuxReport aux_lemma_suite(std::uint64_t seed, Index trials, double slack = 1e-9);

// Single-instance margins (rhs - lhs), exposed for targeted tests.
double aux2_margin(const Matrix& V, const Matrix& U);
double aux3_margin(const Matrix& A, const Matrix& V);
double aux4_margin(const Matrix& M, const Matrix& V, const Matrix& U);
double lemma1_margin(const Vector& va, const Vector& vb, const Vector& ua, const Vector& ub);

double spectral_norm(const Matrix& M);

struct PropertyCheck {
  std::string name;
  double worst = 0.0;      // largest observed deviation
  double tolerance = 0.0;
  Index cases = 0;
  bool passed() const { return worst <= tolerance; }
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool passed() const;
  nlohmann::json to_json() const;
};

// Randomized numeric invariants: GFT round trip, threshold-filter
// idempotence, Laplacian PSD with a zero eigenvalue, Dirichlet-energy
// identity, permutation equivariance of extract_single.
PropertyReport numeric_property_suite(std::uint64_t seed, Index cases = 50);

enum class ValidationLevel { Fast, Full };

struct ValidationOutcome {
  bool passed = false;
  nlohmann::json report;
};

// Fast: aux lemma suite (100 trials) and the numeric property suite.
// Full adds circle convergence, the main-theorem trace and the
// cross-orthogonality experiment, each as a median over `repeats` seeds.
ValidationOutcome run_validation(ValidationLevel level, std::uint64_t seed, Index repeats = 5);

}  // namespace difflat

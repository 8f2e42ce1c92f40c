#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "difflat/types.hpp"

namespace difflat {

// Stand-in for an infinite SNR (a perfectly smooth sorted signal).
inline constexpr double kSnrCap = 1e12;

struct ScoreReport {
  std::string method;
  std::string score_name;  // corr, snr, accuracy (corr@k for later vectors)
  double value = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// |Pearson correlation|, in [0,1].
double ground_truth_correlation(const Vector& delta, const Vector& target);

// Multiple correlation of delta with the span of the target columns (all
// centered); equals ground_truth_correlation for a single column. Used for
// angle targets whose phase is arbitrary (cos and sin together).
double subspace_correlation(const Vector& delta, const Matrix& targets);

// Sliding-window SNR of delta ordered by latent. Windows are [l-k, l] for
// l = k .. n-1; returns kSnrCap when every window is constant.
double snr(const Vector& delta, const Vector& latent, Index k);

// max(10, n / 100)
Index default_snr_window(Index n);

// Median-threshold accuracy of delta restricted to indices against binary
// labels, maximized over the two label assignments.
double sbm_accuracy(const Vector& delta, const std::vector<int>& split_labels,
                    const std::vector<Index>& split_indices);

}  // namespace difflat

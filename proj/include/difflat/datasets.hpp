#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "difflat/types.hpp"

namespace difflat {

// Ground-truth latents per sample. theta is the shared variable; psi_a / psi_b
// hold one column per modality-specific variable (possibly zero columns).
struct Latents {
  Vector theta;
  Matrix psi_a;
  Matrix psi_b;
};

struct PairedDataset {
  PointCloud xa;
  PointCloud xb;
  Latents latents;
  nlohmann::json meta;  // generator, parameters, seed, ranges
};

PairedDataset gen_line_rectangle(Index n, double a, double b, std::uint64_t seed);
PairedDataset gen_line_cube(Index n, double a, double b, double c, std::uint64_t seed);
PairedDataset gen_circle_torus(Index n, double big_r, double small_r, std::uint64_t seed);
PairedDataset gen_disk_rotation(Index n, double radius, std::uint64_t seed);

// Two rectangles [0,a] x [0,b] sharing the first coordinate, independent
// second coordinates. Used by the near-orthogonality experiment.
PairedDataset gen_rectangle_pair(Index n, double a, double b, std::uint64_t seed);

struct SbmPair {
  Matrix adjacency_a;
  Matrix adjacency_b;
  std::vector<int> labels_a;
  std::vector<int> labels_b;
  // The community of A that B splits, and B's binary sub-labels on it.
  std::vector<Index> split_indices;
  std::vector<int> split_labels;
  nlohmann::json meta;
};

// Independent SBM draws for A and B. B must refine A's first block into
// consecutive sub-blocks (the default: A = 4 x 200, B = 100,100,200,200,200).
// A draw with an isolated vertex is resampled with the next sub-seed.
SbmPair gen_sbm_pair(Index n, const std::vector<Index>& sizes_a, const std::vector<Index>& sizes_b, double p,
                     double q, std::uint64_t seed, int max_retries = 16);

// Single SBM adjacency (symmetric 0/1, zero diagonal). Exposed for tests.
Matrix sample_sbm(const std::vector<Index>& sizes, double p, double q, std::uint64_t seed);

PointCloud add_noise(const PointCloud& x, double sigma, std::uint64_t seed);

}  // namespace difflat

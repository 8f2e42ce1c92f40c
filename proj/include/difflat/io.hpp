#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "difflat/datasets.hpp"
#include "difflat/differential.hpp"
#include "difflat/spectral.hpp"

namespace difflat::io {

namespace fs = std::filesystem;

// Plain CSV, one row per observation, no header, %.17g.
void write_csv(const fs::path& path, const Matrix& m);
Matrix read_csv(const fs::path& path);

// "DLMAT001", u64 rows, u64 cols, row-major little-endian doubles.
void write_matrix(const fs::path& path, const Matrix& m);
Matrix read_matrix(const fs::path& path);

// "DLEIG001", u8 end, u64 label length, label bytes, then eigenvalues
// (n x 1) and eigenvectors as two DLMAT001 blocks.
void write_eigensystem(const fs::path& path, const EigenSystem& es);
EigenSystem read_eigensystem(const fs::path& path);

// <stem>.csv holds one column per vector; <stem>.json the config,
// eigenvalues, modality, iteration and method tag.
void write_result(const fs::path& stem, const DifferentialResult& r, const std::string& method);
DifferentialResult read_result(const fs::path& stem);

// XA.csv, XB.csv and dataset.json (latents + meta) inside dir.
void write_dataset(const fs::path& dir, const PairedDataset& d);
PairedDataset read_dataset(const fs::path& dir);

// External paired data: two CSVs plus an optional latents sidecar with keys
// "theta", "psi_a", "psi_b" (arrays; psi entries are arrays of columns).
PairedDataset read_paired(const fs::path& xa_csv, const fs::path& xb_csv, const fs::path& latents_json = {});

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

}  // namespace difflat::io

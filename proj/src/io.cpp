#include "difflat/io.hpp"

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace difflat::io {

namespace {

constexpr char kMatrixMagic[8] = {'D', 'L', 'M', 'A', 'T', '0', '0', '1'};
constexpr char kEigenMagic[8] = {'D', 'L', 'E', 'I', 'G', '0', '0', '1'};

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
  throw Error(ErrorKind::Io, path.string() + ": " + what);
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) fail(path, "cannot create directory: " + ec.message());
  }
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  ensure_parent(path);
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) fail(path, "cannot open for reading");
  return in;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in, const fs::path& path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) fail(path, "truncated header");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void put_matrix(std::ostream& out, const Matrix& m) {
  out.write(kMatrixMagic, 8);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * rm.size()));
}

Matrix get_matrix(std::istream& in, const fs::path& path) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMatrixMagic, 8) != 0) fail(path, "not a DLMAT001 block");
  const std::uint64_t rows = get_u64(in, path);
  const std::uint64_t cols = get_u64(in, path);
  if (rows > (1ULL << 32) || cols > (1ULL << 32)) fail(path, "implausible matrix shape");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(static_cast<Index>(rows),
                                                                            static_cast<Index>(cols));
  if (!in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * rm.size())))
    fail(path, "truncated matrix data");
  return rm;
}

Vector to_vector(const nlohmann::json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json columns_json(const Matrix& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index j = 0; j < m.cols(); ++j) arr.push_back(to_std(m.col(j)));
  return arr;
}

Matrix columns_from_json(const nlohmann::json& j, Index n) {
  Matrix m(n, static_cast<Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vector v = to_vector(j[c]);
    require(v.size() == n, ErrorKind::InvalidInput, "latent column length does not match sample count");
    m.col(static_cast<Index>(c)) = v;
  }
  return m;
}

}  // namespace

void write_csv(const fs::path& path, const Matrix& m) {
  if (!m.allFinite()) fail(path, "matrix has non-finite entries");
  std::ofstream out = open_out(path);
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf;
    }
    out << '\n';
  }
  if (!out) fail(path, "write failed");
}

Matrix read_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Index count = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(cell.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == cell.c_str() || (end && *end != '\0') || errno == ERANGE)
        fail(path, "line " + std::to_string(rows + 1) + ": not a number: '" + cell + "'");
      values.push_back(v);
      ++count;
    }
    if (cols < 0) cols = count;
    if (count != cols) fail(path, "line " + std::to_string(rows + 1) + ": ragged row");
    ++rows;
  }
  if (rows == 0) fail(path, "empty file");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = values[static_cast<std::size_t>(i * cols + j)];
  return m;
}

void write_matrix(const fs::path& path, const Matrix& m) {
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  put_matrix(out, m);
  if (!out) fail(path, "write failed");
}

Matrix read_matrix(const fs::path& path) {
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  return get_matrix(in, path);
}

void write_eigensystem(const fs::path& path, const EigenSystem& es) {
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out.write(kEigenMagic, 8);
  const char end = es.end == SpectrumEnd::Smallest ? 0 : 1;
  out.write(&end, 1);
  put_u64(out, es.source.size());
  out.write(es.source.data(), static_cast<std::streamsize>(es.source.size()));
  put_matrix(out, es.eigenvalues);
  put_matrix(out, es.eigenvectors);
  if (!out) fail(path, "write failed");
}

EigenSystem read_eigensystem(const fs::path& path) {
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kEigenMagic, 8) != 0) fail(path, "not a DLEIG001 file");
  char end = 0;
  if (!in.read(&end, 1)) fail(path, "truncated header");
  const std::uint64_t len = get_u64(in, path);
  if (len > (1ULL << 20)) fail(path, "implausible label length");
  EigenSystem es;
  es.source.resize(len);
  if (!in.read(es.source.data(), static_cast<std::streamsize>(len))) fail(path, "truncated label");
  es.end = end ? SpectrumEnd::Largest : SpectrumEnd::Smallest;
  const Matrix values = get_matrix(in, path);
  es.eigenvectors = get_matrix(in, path);
  if (values.cols() != 1 || values.rows() != es.eigenvectors.cols()) fail(path, "inconsistent shapes");
  es.eigenvalues = values.col(0);
  return es;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) fail(path, "write failed");
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(path, std::string("malformed JSON: ") + e.what());
  }
}

void write_result(const fs::path& stem, const DifferentialResult& r, const std::string& method) {
  fs::path csv = stem;
  csv += ".csv";
  fs::path sidecar = stem;
  sidecar += ".json";
  write_csv(csv, r.vectors);
  write_json(sidecar, {{"method", method},
                       {"modality", std::string(1, to_char(r.modality))},
                       {"iteration", r.iteration},
                       {"eigenvalues", to_std(r.eigenvalues)},
                       {"config", r.config}});
}

DifferentialResult read_result(const fs::path& stem) {
  fs::path csv = stem;
  csv += ".csv";
  fs::path sidecar = stem;
  sidecar += ".json";
  DifferentialResult r;
  r.vectors = read_csv(csv);
  const nlohmann::json j = read_json(sidecar);
  r.eigenvalues = to_vector(j.at("eigenvalues"));
  r.modality = j.at("modality").get<std::string>() == "B" ? Modality::B : Modality::A;
  r.iteration = j.at("iteration").get<int>();
  r.config = j.at("config");
  return r;
}

void write_dataset(const fs::path& dir, const PairedDataset& d) {
  write_csv(dir / "XA.csv", d.xa.points());
  write_csv(dir / "XB.csv", d.xb.points());
  write_json(dir / "dataset.json", {{"meta", d.meta},
                                    {"latents",
                                     {{"theta", to_std(d.latents.theta)},
                                      {"psi_a", columns_json(d.latents.psi_a)},
                                      {"psi_b", columns_json(d.latents.psi_b)}}}});
}

PairedDataset read_paired(const fs::path& xa_csv, const fs::path& xb_csv, const fs::path& latents_json) {
  PointCloud xa(read_csv(xa_csv));
  PointCloud xb(read_csv(xb_csv));
  require(xa.size() == xb.size(), ErrorKind::InvalidInput, "XA and XB have different row counts");
  const Index n = xa.size();
  PairedDataset d{std::move(xa), std::move(xb), {Vector(), Matrix(n, 0), Matrix(n, 0)}, {{"generator", "external"}}};
  if (!latents_json.empty()) {
    nlohmann::json j = read_json(latents_json);
    if (j.contains("latents")) {
      if (j.contains("meta")) d.meta = j["meta"];
      j = j["latents"];
    }
    if (j.contains("theta")) {
      d.latents.theta = to_vector(j["theta"]);
      require(d.latents.theta.size() == n, ErrorKind::InvalidInput, "theta length does not match sample count");
    }
    if (j.contains("psi_a")) d.latents.psi_a = columns_from_json(j["psi_a"], n);
    if (j.contains("psi_b")) d.latents.psi_b = columns_from_json(j["psi_b"], n);
  }
  return d;
}

PairedDataset read_dataset(const fs::path& dir) {
  return read_paired(dir / "XA.csv", dir / "XB.csv", dir / "dataset.json");
}

}  // namespace difflat::io

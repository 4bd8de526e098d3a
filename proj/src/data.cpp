#include "senet/data.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <system_error>

#include "senet/errors.hpp"
#include "senet/rng.hpp"

namespace senet::data {

namespace {

constexpr char kMagic[4] = {'S', 'E', 'M', 'X'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint8_t kDtypeF64 = 1;
constexpr std::uint8_t kDtypeU32 = 2;

bool is_csv(const std::filesystem::path& path) { return path.extension() == ".csv"; }

template <class T>
void write_raw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_raw(std::ifstream& in, std::ptrdiff_t& offset, const char* what) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw FormatError(std::string("unexpected end of file while reading ") + what, offset);
  }
  offset += sizeof(T);
  return value;
}

struct BinaryHeader {
  std::uint64_t rows;
  std::uint64_t cols;
  std::uint8_t dtype;
  std::ptrdiff_t payload_offset;
};

BinaryHeader read_binary_header(std::ifstream& in, const std::filesystem::path& path) {
  std::ptrdiff_t offset = 0;
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(path.string() + ": bad magic, expected SEMX", 0);
  }
  offset = 4;
  const auto version = read_raw<std::uint32_t>(in, offset, "version");
  if (version != kFormatVersion) {
    throw FormatError(path.string() + ": unsupported version " + std::to_string(version),
                      offset - 4);
  }
  BinaryHeader h;
  h.rows = read_raw<std::uint64_t>(in, offset, "row count");
  h.cols = read_raw<std::uint64_t>(in, offset, "column count");
  h.dtype = read_raw<std::uint8_t>(in, offset, "dtype");
  h.payload_offset = offset;
  return h;
}

void write_binary_header(std::ofstream& out, std::uint64_t rows, std::uint64_t cols,
                         std::uint8_t dtype) {
  out.write(kMagic, 4);
  write_raw(out, kFormatVersion);
  write_raw(out, rows);
  write_raw(out, cols);
  write_raw(out, dtype);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::ptrdiff_t offset = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      offset += static_cast<std::ptrdiff_t>(line.size()) + 1;
      continue;
    }
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double value = 0.0;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc{}) {
        throw FormatError(path.string() + ": malformed number",
                          offset + (p - line.data()));
      }
      row.push_back(value);
      p = next;
      if (p < end) {
        if (*p != ',') {
          throw FormatError(path.string() + ": expected ',' between values",
                            offset + (p - line.data()));
        }
        ++p;
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError(path.string() + ": inconsistent column count on row " +
                            std::to_string(rows.size()),
                        offset);
    }
    rows.push_back(std::move(row));
    offset += static_cast<std::ptrdiff_t>(line.size()) + 1;
  }
  if (rows.empty()) throw FormatError(path.string() + ": empty matrix file", 0);
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < M.rows(); ++r) {
    for (Index c = 0; c < M.cols(); ++c) {
      M(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  return M;
}

void write_matrix_csv(const std::filesystem::path& path, const MatrixRef& M) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  char buf[40];
  for (Index r = 0; r < M.rows(); ++r) {
    for (Index c = 0; c < M.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", M(r, c));
      out << buf;
      if (c + 1 < M.cols()) out << ',';
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

Dataset gen_synthetic(const SyntheticSpec& spec) {
  if (spec.subspace_dim > spec.ambient_dim) {
    throw InvalidSpec("gen_synthetic: subspace_dim " + std::to_string(spec.subspace_dim) +
                      " exceeds ambient_dim " + std::to_string(spec.ambient_dim));
  }
  if (spec.num_subspaces < 1 || spec.points_per_subspace < 1) {
    throw InvalidSpec("gen_synthetic: need at least one subspace and one point per subspace");
  }
  const Index D = spec.ambient_dim;
  const Index d = spec.subspace_dim;
  const Index N = spec.num_subspaces * spec.points_per_subspace;

  Rng rng(spec.seed);
  Dataset ds;
  ds.features.resize(D, N);
  ds.labels.resize(static_cast<std::size_t>(N));

  Index col = 0;
  for (Index s = 0; s < spec.num_subspaces; ++s) {
    // Rotation-invariant orthonormal basis: QR of a Gaussian D x d matrix.
    Matrix G(D, d);
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i < D; ++i) G(i, j) = rng.gaussian();
    }
    const Matrix basis = Eigen::HouseholderQR<Matrix>(G).householderQ() * Matrix::Identity(D, d);

    Vector a(d);
    for (Index p = 0; p < spec.points_per_subspace; ++p, ++col) {
      do {
        for (Index i = 0; i < d; ++i) a[i] = rng.gaussian();
      } while (a.norm() == 0.0);
      a /= a.norm();
      ds.features.col(col) = basis * a;
      ds.labels[static_cast<std::size_t>(col)] = static_cast<int>(s);
    }
  }
  return ds;
}

Matrix preprocess(const MatrixRef& X, const std::vector<PreprocessStep>& steps,
                  PreprocessLog* log) {
  Matrix M = X;
  for (const auto& step : steps) {
    if (std::holds_alternative<RemoveMean>(step)) {
      M.colwise() -= M.rowwise().mean().eval();
    } else if (const auto* pca = std::get_if<Pca>(&step)) {
      const Index k = pca->target_dim;
      if (k < 1 || k > std::min(M.rows(), M.cols())) {
        throw InvalidSpec("pca: target_dim " + std::to_string(k) + " out of range for " +
                          std::to_string(M.rows()) + "x" + std::to_string(M.cols()) + " data");
      }
      const Vector mean = M.rowwise().mean();
      Matrix centered = M.colwise() - mean;
      Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU);
      M = svd.matrixU().leftCols(k).transpose() * centered;
    } else {
      for (Index j = 0; j < M.cols(); ++j) {
        const double norm = M.col(j).norm();
        if (norm == 0.0) {
          if (log != nullptr) log->zero_columns.push_back(j);
        } else {
          M.col(j) /= norm;
        }
      }
    }
  }
  if (!M.allFinite()) {
    throw InvalidSpec("preprocess: non-finite values in output");
  }
  return M;
}

Matrix read_matrix(const std::filesystem::path& path) {
  if (is_csv(path)) return read_matrix_csv(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const BinaryHeader h = read_binary_header(in, path);
  if (h.dtype != kDtypeF64) {
    throw FormatError(path.string() + ": dtype " + std::to_string(h.dtype) +
                          " is not an f64 matrix",
                      h.payload_offset - 1);
  }
  Matrix M(static_cast<Index>(h.rows), static_cast<Index>(h.cols));
  in.read(reinterpret_cast<char*>(M.data()),
          static_cast<std::streamsize>(sizeof(double) * h.rows * h.cols));
  if (!in) {
    throw FormatError(path.string() + ": truncated payload",
                      h.payload_offset + in.gcount());
  }
  return M;
}

void write_matrix(const std::filesystem::path& path, const MatrixRef& M) {
  if (is_csv(path)) {
    write_matrix_csv(path, M);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_binary_header(out, static_cast<std::uint64_t>(M.rows()),
                      static_cast<std::uint64_t>(M.cols()), kDtypeF64);
  const Matrix contiguous = M;  // column-major payload
  out.write(reinterpret_cast<const char*>(contiguous.data()),
            static_cast<std::streamsize>(sizeof(double) * contiguous.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Labels read_labels(const std::filesystem::path& path) {
  Labels labels;
  if (is_csv(path)) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::ptrdiff_t offset = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) {
        offset += static_cast<std::ptrdiff_t>(line.size()) + 1;
        continue;
      }
      int value = 0;
      auto [next, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
      if (ec != std::errc{} || next != line.data() + line.size() || value < 0) {
        throw FormatError(path.string() + ": expected one non-negative integer per line",
                          offset);
      }
      labels.push_back(value);
      offset += static_cast<std::ptrdiff_t>(line.size()) + 1;
    }
    return labels;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const BinaryHeader h = read_binary_header(in, path);
  if (h.dtype != kDtypeU32) {
    throw FormatError(path.string() + ": dtype " + std::to_string(h.dtype) +
                          " is not a u32 label file",
                      h.payload_offset - 1);
  }
  const std::uint64_t count = h.rows * h.cols;
  labels.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::ptrdiff_t offset = h.payload_offset + static_cast<std::ptrdiff_t>(i * 4);
    labels[i] = static_cast<int>(read_raw<std::uint32_t>(in, offset, "label"));
  }
  return labels;
}

void write_labels(const std::filesystem::path& path, const Labels& labels) {
  if (is_csv(path)) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (int label : labels) out << label << '\n';
    if (!out) throw IoError("write failed for " + path.string());
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_binary_header(out, labels.size(), 1, kDtypeU32);
  for (int label : labels) {
    write_raw(out, static_cast<std::uint32_t>(label));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::pair<Dataset, Dataset> split(const Dataset& ds, Index n_train, std::uint64_t seed) {
  const Index N = ds.features.cols();
  if (n_train > N) {
    throw InvalidSpec("split: n_train " + std::to_string(n_train) + " exceeds dataset size " +
                      std::to_string(N));
  }
  if (ds.labels.size() != static_cast<std::size_t>(N)) {
    throw DimensionMismatch("split: labels length " + std::to_string(ds.labels.size()) +
                            " does not match " + std::to_string(N) + " columns");
  }
  std::vector<Index> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng.engine());

  auto take = [&](Index begin, Index count) {
    Dataset out;
    out.features.resize(ds.features.rows(), count);
    out.labels.resize(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
      const Index src = perm[static_cast<std::size_t>(begin + i)];
      out.features.col(i) = ds.features.col(src);
      out.labels[static_cast<std::size_t>(i)] = ds.labels[static_cast<std::size_t>(src)];
    }
    return out;
  };
  return {take(0, n_train), take(n_train, N - n_train)};
}

}  // namespace senet::data

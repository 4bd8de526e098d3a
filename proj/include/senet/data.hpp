#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "senet/types.hpp"

namespace senet::data {

// Union-of-subspaces sampling plan: `num_subspaces` subspaces of dimension
// `subspace_dim` inside R^`ambient_dim`, with `points_per_subspace` unit-norm
// points drawn on the sphere of each subspace.
struct SyntheticSpec {
  Index ambient_dim{15};
  Index subspace_dim{6};
  Index num_subspaces{5};
  Index points_per_subspace{200};
  std::uint64_t seed{0};
};

struct Dataset {
  Matrix features;  // D x N, one point per column
  Labels labels;    // length N, 0-based subspace/class ids
};

// Draws an orthonormal basis per subspace (QR of a Gaussian matrix) and
// unit-norm coefficient vectors through it. Deterministic given spec.seed.
Dataset gen_synthetic(const SyntheticSpec& spec);

// Preprocessing steps, applied in the order given.
struct RemoveMean {};
struct Pca {
  Index target_dim;
};
struct UnitNormalize {};
using PreprocessStep = std::variant<RemoveMean, Pca, UnitNormalize>;

// Columns whose l2 norm was exactly zero during unit normalization; they are
// left unchanged rather than aborting the pipeline.
struct PreprocessLog {
  std::vector<Index> zero_columns;
};

// remove_mean subtracts the column mean; pca(k) projects onto the top-k
// principal directions of the column set (coordinates of the centered data);
// unit_normalize rescales each column to unit l2 norm.
Matrix preprocess(const MatrixRef& X, const std::vector<PreprocessStep>& steps,
                  PreprocessLog* log = nullptr);

// Matrix file I/O. Paths ending in ".csv" use the text format (one matrix row
// per line, comma-separated); anything else uses the binary format with magic
// "SEMX". Binary round trips are bit-exact.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const MatrixRef& M);

// Label file I/O: CSV with one non-negative integer per line, or the binary
// container with a u32 payload.
Labels read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const Labels& labels);

// Uniform split without replacement into (train, test), deterministic per
// seed, preserving feature/label alignment.
std::pair<Dataset, Dataset> split(const Dataset& ds, Index n_train, std::uint64_t seed);

}  // namespace senet::data

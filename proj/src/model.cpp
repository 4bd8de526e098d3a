#include "senet/model.hpp"

#include <cstring>
#include <fstream>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "senet/errors.hpp"
#include "senet/rng.hpp"

namespace senet::model {

namespace {

constexpr char kMagic[4] = {'S', 'E', 'N', 'T'};
constexpr std::uint32_t kVersion = 1;

void check_column_dim(const SENetParams& params, Index got, const char* which) {
  if (got != params.input_dim()) {
    throw DimensionMismatch(std::string("coeff: ") + which + " has dimension " +
                            std::to_string(got) + ", expected " +
                            std::to_string(params.input_dim()));
  }
}

}  // namespace

std::vector<Index> SENetParams::hidden_dims() const {
  std::vector<Index> dims;
  for (std::size_t l = 0; l + 1 < query_net.weights.size(); ++l) {
    dims.push_back(query_net.weights[l].rows());
  }
  return dims;
}

SENetParams make_senet(Index input_dim, const std::vector<Index>& hidden_dims, Index embed_dim,
                       std::uint64_t seed) {
  std::vector<Index> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(embed_dim);
  SENetParams params;
  params.query_net = mlp::init(dims, derive_seed(seed, 0x71));
  params.key_net = mlp::init(dims, derive_seed(seed, 0x6B));
  params.threshold = 0.0;
  params.alpha = 1.0 / static_cast<double>(embed_dim);
  return params;
}

void validate(const SENetParams& params) {
  if (params.query_net.input_dim() != params.key_net.input_dim() ||
      params.query_net.output_dim() != params.key_net.output_dim()) {
    throw InvalidSpec("senet: query and key networks must share input and output dimensions");
  }
  if (params.threshold < 0.0) {
    throw InvalidSpec("senet: threshold must be >= 0, got " + std::to_string(params.threshold));
  }
  if (params.alpha != 1.0 / static_cast<double>(params.embed_dim())) {
    throw InvalidSpec("senet: alpha must equal 1/p exactly");
  }
}

CoeffEval coeff(const SENetParams& params, const VectorRef& x_i, const VectorRef& x_j) {
  check_column_dim(params, x_i.size(), "x_i");
  check_column_dim(params, x_j.size(), "x_j");
  CoeffEval eval;
  auto [u, qt] = mlp::forward(params.query_net, x_j);
  auto [v, kt] = mlp::forward(params.key_net, x_i);
  eval.pre_threshold = u.dot(v);
  eval.value = params.alpha * soft_threshold(eval.pre_threshold, params.threshold);
  eval.query_tape = std::move(qt);
  eval.key_tape = std::move(kt);
  return eval;
}

Matrix coeff_matrix(const SENetParams& params, const MatrixRef& X, Index block, int threads) {
  check_column_dim(params, X.rows(), "data");
  if (block < 1) block = 1;
  const Index N = X.cols();
  const Index p = params.embed_dim();

  // Embed all columns once with the same per-column kernel as coeff().
  Matrix U(p, N);
  Matrix V(p, N);
  auto embed_range = [&](Index begin, Index end) {
    for (Index c = begin; c < end; ++c) {
      U.col(c) = mlp::forward(params.query_net, X.col(c)).first;
      V.col(c) = mlp::forward(params.key_net, X.col(c)).first;
    }
  };

  Matrix C(N, N);
  auto fill_range = [&](Index begin, Index end) {
    for (Index j0 = begin; j0 < end; j0 += block) {
      const Index j1 = std::min(j0 + block, end);
      for (Index j = j0; j < j1; ++j) {
        for (Index i = 0; i < N; ++i) {
          C(i, j) = i == j ? 0.0
                           : params.alpha *
                                 soft_threshold(U.col(j).dot(V.col(i)), params.threshold);
        }
      }
    }
  };

  if (threads <= 1 || N < 2 * static_cast<Index>(threads)) {
    embed_range(0, N);
    fill_range(0, N);
  } else {
    const Index n_workers = static_cast<Index>(threads);
    auto run = [&](auto&& fn) {
      std::vector<std::thread> pool;
      for (Index w = 0; w < n_workers; ++w) {
        const Index begin = w * N / n_workers;
        const Index end = (w + 1) * N / n_workers;
        pool.emplace_back(fn, begin, end);
      }
      for (auto& t : pool) t.join();
    };
    run(embed_range);
    run(fill_range);
  }
  return C;
}

namespace {

void write_tensor(std::ofstream& out, const std::string& name, const double* data,
                  const std::vector<std::uint64_t>& dims) {
  const auto name_len = static_cast<std::uint16_t>(name.size());
  out.write(reinterpret_cast<const char*>(&name_len), sizeof(name_len));
  out.write(name.data(), name_len);
  const auto ndim = static_cast<std::uint8_t>(dims.size());
  out.write(reinterpret_cast<const char*>(&ndim), sizeof(ndim));
  std::uint64_t count = 1;
  for (std::uint64_t d : dims) {
    out.write(reinterpret_cast<const char*>(&d), sizeof(d));
    count *= d;
  }
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

struct TensorRecord {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double> data;
};

TensorRecord read_tensor(std::ifstream& in, std::ptrdiff_t& offset) {
  TensorRecord rec;
  std::uint16_t name_len = 0;
  in.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
  rec.name.resize(name_len);
  in.read(rec.name.data(), name_len);
  std::uint8_t ndim = 0;
  in.read(reinterpret_cast<char*>(&ndim), sizeof(ndim));
  if (!in) throw FormatError("checkpoint: truncated tensor record", offset);
  std::uint64_t count = 1;
  for (std::uint8_t d = 0; d < ndim; ++d) {
    std::uint64_t dim = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    rec.dims.push_back(dim);
    count *= dim;
  }
  rec.data.resize(count);
  in.read(reinterpret_cast<char*>(rec.data.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw FormatError("checkpoint: truncated tensor payload for " + rec.name, offset);
  offset = in.tellg();
  return rec;
}

void append_net_tensors(std::ofstream& out, const mlp::MlpParams& net, const std::string& prefix) {
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const Matrix& W = net.weights[l];
    write_tensor(out, prefix + ".w" + std::to_string(l), W.data(),
                 {static_cast<std::uint64_t>(W.rows()), static_cast<std::uint64_t>(W.cols())});
    const Vector& b = net.biases[l];
    write_tensor(out, prefix + ".b" + std::to_string(l), b.data(),
                 {static_cast<std::uint64_t>(b.size())});
  }
}

}  // namespace

void save_checkpoint(const SENetParams& params, const objective::HyperParams& hyper,
                     const std::filesystem::path& path) {
  validate(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  nlohmann::json header;
  header["D"] = params.input_dim();
  header["p"] = params.embed_dim();
  header["hidden_dims"] = params.hidden_dims();
  header["gamma"] = hyper.gamma;
  header["lambda"] = hyper.lambda;
  header["alpha"] = params.alpha;
  header["b"] = params.threshold;
  const std::string header_str = header.dump();

  out.write(kMagic, 4);
  const std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const auto header_len = static_cast<std::uint32_t>(header_str.size());
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_str.data(), header_len);

  append_net_tensors(out, params.query_net, "query");
  append_net_tensors(out, params.key_net, "key");
  if (!out) throw IoError("write failed for " + path.string());
}

std::pair<SENetParams, objective::HyperParams> load_checkpoint(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(path.string() + ": bad magic, expected SENT", 0);
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || version != kVersion) {
    throw FormatError(path.string() + ": unsupported checkpoint version", 4);
  }
  std::uint32_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), header_len);
  if (!in) throw FormatError(path.string() + ": truncated header", 12);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_str);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": malformed header JSON: " + e.what(), 12);
  }

  SENetParams params;
  objective::HyperParams hyper;
  const auto D = header.at("D").get<Index>();
  const auto p = header.at("p").get<Index>();
  const auto hidden = header.at("hidden_dims").get<std::vector<Index>>();
  hyper.gamma = header.at("gamma").get<double>();
  hyper.lambda = header.at("lambda").get<double>();
  params.alpha = header.at("alpha").get<double>();
  params.threshold = header.at("b").get<double>();

  std::vector<Index> dims;
  dims.push_back(D);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(p);

  auto load_net = [&](const std::string& prefix) {
    mlp::MlpParams net;
    std::ptrdiff_t offset = in.tellg();
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      TensorRecord w = read_tensor(in, offset);
      TensorRecord b = read_tensor(in, offset);
      const auto rows = static_cast<std::uint64_t>(dims[l + 1]);
      const auto cols = static_cast<std::uint64_t>(dims[l]);
      if (w.name != prefix + ".w" + std::to_string(l) || w.dims.size() != 2 ||
          w.dims[0] != rows || w.dims[1] != cols) {
        throw FormatError(path.string() + ": unexpected tensor " + w.name, offset);
      }
      if (b.name != prefix + ".b" + std::to_string(l) || b.dims.size() != 1 ||
          b.dims[0] != rows) {
        throw FormatError(path.string() + ": unexpected tensor " + b.name, offset);
      }
      net.weights.emplace_back(
          Eigen::Map<const Matrix>(w.data.data(), static_cast<Index>(rows),
                                   static_cast<Index>(cols)));
      net.biases.emplace_back(
          Eigen::Map<const Vector>(b.data.data(), static_cast<Index>(rows)));
    }
    return net;
  };
  params.query_net = load_net("query");
  params.key_net = load_net("key");
  validate(params);
  return {std::move(params), hyper};
}

}  // namespace senet::model

#include "ssg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ssg {

DatasetMatrix::DatasetMatrix(std::size_t n, std::size_t dim, std::vector<float> data)
    : n_(n), dim_(dim), data_(std::move(data)) {
  if (n_ < 1 || dim_ < 1)
    throw std::invalid_argument("DatasetMatrix: need n >= 1 and dim >= 1");
  if (data_.size() != n_ * dim_)
    throw std::invalid_argument("DatasetMatrix: data size does not match n x dim");
  for (float v : data_) {
    if (!std::isfinite(v))
      throw std::invalid_argument("DatasetMatrix: non-finite component");
  }
}

DatasetMatrix DatasetMatrix::subset(std::span<const std::uint32_t> ids) const {
  std::vector<float> out;
  out.reserve(ids.size() * dim_);
  for (std::uint32_t id : ids) {
    if (id >= n_) throw std::invalid_argument("subset: id out of range");
    out.insert(out.end(), row(id), row(id) + dim_);
  }
  return DatasetMatrix(ids.size(), dim_, std::move(out));
}

DatasetMatrix DatasetMatrix::prefix(std::size_t n) const {
  if (n < 1 || n > n_) throw std::invalid_argument("prefix: bad row count");
  return DatasetMatrix(n, dim_, std::vector<float>(data_.begin(), data_.begin() + n * dim_));
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::uint64_t file_size(std::ifstream& in) {
  in.seekg(0, std::ios::end);
  auto size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  return size;
}

}  // namespace

DatasetMatrix load_fvecs(const std::string& path) {
  std::ifstream in = open_input(path);
  std::uint64_t size = file_size(in);
  if (size == 0) throw std::runtime_error(path + ": empty fvecs file (need n >= 1)");

  std::int32_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), 4);
  if (!in || dim < 1) throw std::runtime_error(path + ": bad fvecs dimension prefix");

  std::uint64_t record = 4 + static_cast<std::uint64_t>(dim) * 4;
  if (size % record != 0)
    throw std::runtime_error(path + ": truncated fvecs record");
  std::size_t n = size / record;

  std::vector<float> data(n * static_cast<std::size_t>(dim));
  in.seekg(0, std::ios::beg);
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t d = 0;
    in.read(reinterpret_cast<char*>(&d), 4);
    if (!in || d != dim)
      throw std::runtime_error(path + ": inconsistent fvecs dimension prefix");
    in.read(reinterpret_cast<char*>(data.data() + i * dim), static_cast<std::streamsize>(dim) * 4);
    if (!in) throw std::runtime_error(path + ": truncated fvecs record");
  }
  for (float v : data) {
    if (!std::isfinite(v)) throw std::runtime_error(path + ": non-finite fvecs component");
  }
  return DatasetMatrix(n, static_cast<std::size_t>(dim), std::move(data));
}

void save_fvecs(const DatasetMatrix& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  auto dim = static_cast<std::int32_t>(data.dim());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.write(reinterpret_cast<const char*>(&dim), 4);
    out.write(reinterpret_cast<const char*>(data.row(i)), static_cast<std::streamsize>(data.dim()) * 4);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

IdList load_ivecs(const std::string& path) {
  std::ifstream in = open_input(path);
  std::uint64_t size = file_size(in);
  IdList lists;
  std::uint64_t consumed = 0;
  while (consumed < size) {
    std::int32_t k = 0;
    in.read(reinterpret_cast<char*>(&k), 4);
    if (!in || k < 0) throw std::runtime_error(path + ": bad ivecs length prefix");
    consumed += 4 + static_cast<std::uint64_t>(k) * 4;
    if (consumed > size) throw std::runtime_error(path + ": truncated ivecs record");
    std::vector<std::uint32_t> ids(static_cast<std::size_t>(k));
    in.read(reinterpret_cast<char*>(ids.data()), static_cast<std::streamsize>(k) * 4);
    if (!in) throw std::runtime_error(path + ": truncated ivecs record");
    lists.push_back(std::move(ids));
  }
  return lists;
}

void save_ivecs(const IdList& lists, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& ids : lists) {
    auto k = static_cast<std::int32_t>(ids.size());
    out.write(reinterpret_cast<const char*>(&k), 4);
    out.write(reinterpret_cast<const char*>(ids.data()), static_cast<std::streamsize>(k) * 4);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

TrainValidationSplit split_train_validation(const DatasetMatrix& data, double ratio,
                                            std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("split_train_validation: ratio must be in (0, 1)");
  std::size_t n = data.size();
  auto train_n = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * ratio));
  if (train_n == 0 || train_n >= n)
    throw std::invalid_argument("split_train_validation: split would leave an empty half");

  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);

  TrainValidationSplit split;
  split.train_ids.assign(ids.begin(), ids.begin() + train_n);
  split.validation_ids.assign(ids.begin() + train_n, ids.end());
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.validation_ids.begin(), split.validation_ids.end());
  split.train = data.subset(split.train_ids);
  split.validation = data.subset(split.validation_ids);
  return split;
}

std::uint64_t fnv1a64(const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t hash = 14695981039346656037ull;
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= p[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t dataset_checksum(const DatasetMatrix& data) {
  return fnv1a64(data.raw().data(), data.raw().size() * sizeof(float));
}

namespace {

struct MixtureModel {
  std::size_t m = 0;
  std::vector<float> basis;    // dim x m, orthonormal columns
  std::vector<float> centers;  // clusters x m
};

void emit_points(const MixtureModel& model, const SyntheticParams& params, float spread,
                 std::size_t count, std::mt19937_64& rng, std::vector<float>& out) {
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::size_t m = model.m;
  std::vector<float> z(m);
  out.resize(count * params.dim);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t c = i % params.clusters;
    for (std::size_t j = 0; j < m; ++j)
      z[j] = model.centers[c * m + j] + spread * gauss(rng);
    float* row = out.data() + i * params.dim;
    for (std::size_t r = 0; r < params.dim; ++r) {
      float acc = 0.0f;
      for (std::size_t j = 0; j < m; ++j) acc += model.basis[r * m + j] * z[j];
      row[r] = acc;
    }
  }
}

MixtureModel make_mixture(const SyntheticParams& params, std::mt19937_64& rng) {
  MixtureModel model;
  model.m = params.intrinsic_dim == 0 ? params.dim : params.intrinsic_dim;
  if (model.m > params.dim)
    throw std::invalid_argument("generate_clustered: intrinsic_dim > dim");
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  std::size_t m = model.m;

  // Orthonormal embedding of the intrinsic space into the ambient space
  // (Gram-Schmidt over random Gaussian columns), so distances and angles of
  // the intrinsic geometry survive the embedding exactly.
  model.basis.resize(params.dim * m);
  for (std::size_t c = 0; c < m; ++c) {
    std::vector<float> col(params.dim);
    for (std::size_t r = 0; r < params.dim; ++r) col[r] = gauss(rng);
    for (std::size_t prev = 0; prev < c; ++prev) {
      float dot = 0.0f;
      for (std::size_t r = 0; r < params.dim; ++r) dot += col[r] * model.basis[r * m + prev];
      for (std::size_t r = 0; r < params.dim; ++r) col[r] -= dot * model.basis[r * m + prev];
    }
    float norm = 0.0f;
    for (float v : col) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < params.dim; ++r) model.basis[r * m + c] = col[r] / norm;
  }

  model.centers.resize(params.clusters * m);
  for (float& v : model.centers) v = unit(rng);
  return model;
}

}  // namespace

DatasetMatrix generate_clustered(const SyntheticParams& params) {
  std::mt19937_64 rng(params.seed);
  MixtureModel model = make_mixture(params, rng);
  std::vector<float> data;
  emit_points(model, params, params.cluster_spread, params.n, rng, data);
  return DatasetMatrix(params.n, params.dim, std::move(data));
}

SyntheticPair generate_clustered_pair(const SyntheticParams& params, std::size_t query_n,
                                      float query_spread_scale) {
  std::mt19937_64 rng(params.seed);
  MixtureModel model = make_mixture(params, rng);
  std::vector<float> base, queries;
  emit_points(model, params, params.cluster_spread, params.n, rng, base);
  emit_points(model, params, params.cluster_spread * query_spread_scale, query_n, rng,
              queries);
  return {DatasetMatrix(params.n, params.dim, std::move(base)),
          DatasetMatrix(query_n, params.dim, std::move(queries))};
}

}  // namespace ssg

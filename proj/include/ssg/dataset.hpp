#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ssg {

// Ragged list of 32-bit ids, one record per query/node. Matches the ivecs
// on-disk layout: records may have different lengths.
using IdList = std::vector<std::vector<std::uint32_t>>;

// Immutable n x d row-major float matrix. Values are validated finite on
// construction; rows are shareable across threads without locking.
class DatasetMatrix {
 public:
  DatasetMatrix() = default;
  DatasetMatrix(std::size_t n, std::size_t dim, std::vector<float> data);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  const float* row(std::size_t i) const { return data_.data() + i * dim_; }
  std::span<const float> row_span(std::size_t i) const { return {row(i), dim_}; }
  const std::vector<float>& raw() const { return data_; }

  // Copies the given rows (in the given order) into a new matrix.
  DatasetMatrix subset(std::span<const std::uint32_t> ids) const;
  // First n rows, used by the scaling experiment.
  DatasetMatrix prefix(std::size_t n) const;

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

// fvecs: repeated [int32-LE dim][dim x float32-LE], fixed dim across records.
// ivecs: repeated [int32-LE k][k x int32-LE], k may vary per record.
DatasetMatrix load_fvecs(const std::string& path);
void save_fvecs(const DatasetMatrix& data, const std::string& path);
IdList load_ivecs(const std::string& path);
void save_ivecs(const IdList& lists, const std::string& path);

struct TrainValidationSplit {
  DatasetMatrix train;
  DatasetMatrix validation;
  std::vector<std::uint32_t> train_ids;       // original row ids, ascending
  std::vector<std::uint32_t> validation_ids;  // original row ids, ascending
};

// Deterministic disjoint split: train gets ceil(n * ratio) rows, validation
// the remainder. Both halves must be non-empty.
TrainValidationSplit split_train_validation(const DatasetMatrix& data, double ratio,
                                            std::uint64_t seed);

// 64-bit FNV-1a over the raw row-major vector bytes; stored in index files to
// tie an index to the dataset it was built from.
std::uint64_t fnv1a64(const void* bytes, std::size_t len);
std::uint64_t dataset_checksum(const DatasetMatrix& data);

struct SyntheticParams {
  std::size_t n = 10000;
  std::size_t dim = 128;
  std::size_t clusters = 16;
  // Points are drawn from a Gaussian mixture in intrinsic_dim dimensions and
  // embedded into dim via a random rotation, mimicking the low intrinsic
  // dimension of real descriptor data. intrinsic_dim == 0 means dim.
  std::size_t intrinsic_dim = 0;
  float cluster_spread = 0.25f;
  std::uint64_t seed = 42;
};

DatasetMatrix generate_clustered(const SyntheticParams& params);

struct SyntheticPair {
  DatasetMatrix base;
  DatasetMatrix queries;
};

// Base set plus a held-out query set drawn from the same mixture (same
// centers, same embedding). query_spread_scale > 1 widens the query draw,
// mimicking held-out real-world queries that sit farther from their nearest
// indexed neighbor than indexed points sit from each other.
SyntheticPair generate_clustered_pair(const SyntheticParams& params, std::size_t query_n,
                                      float query_spread_scale = 1.0f);

}  // namespace ssg

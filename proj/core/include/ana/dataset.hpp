#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "ana/trainer.hpp"

namespace ana {

enum class DatasetGenerator { two_moons, gaussian_blobs, xor_grid, file };

std::string_view to_string(DatasetGenerator generator);
DatasetGenerator parse_dataset_generator(std::string_view name);

struct DatasetSpec {
  DatasetGenerator generator = DatasetGenerator::two_moons;
  std::size_t size = 1000;
  /// Standard deviation of the Gaussian jitter added to every coordinate.
  double noise = 0.1;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
  /// gaussian_blobs only; two_moons and xor_grid always have two classes.
  std::size_t classes = 2;
  std::size_t dims = 2;
  /// xor_grid: cells per side of the checkerboard.
  std::size_t cells = 6;
  /// file: reads <path>.features (N × dims float64, row-major, little-endian)
  /// and <path>.labels (N int32, little-endian).
  std::filesystem::path path{};

  std::size_t class_count() const;
  /// Throws ConfigError listing every violation.
  void validate() const;
};

struct DatasetSplit {
  Dataset train;
  Dataset validation;
};

/// Full dataset before splitting. Generators produce balanced classes.
Dataset generate_samples(const DatasetSpec& spec);

/// Generates (or loads) the samples and splits them with a seeded shuffle.
/// Throws ConfigError when size < 2·classes or the split leaves a side empty.
DatasetSplit generate_dataset(const DatasetSpec& spec);

}  // namespace ana

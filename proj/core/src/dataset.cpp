#include "ana/dataset.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <iterator>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ana/errors.hpp"
#include "ana/rng.hpp"

namespace ana {

namespace {

constexpr std::uint64_t kSampleStream = 0;
constexpr std::uint64_t kSplitStream = 1;

double gaussian(Rng& rng, double stddev) {
  if (stddev == 0.0) return 0.0;
  return sample(NoiseFamily::normal, {0.0, stddev}, rng);
}

Dataset two_moons(const DatasetSpec& spec, Rng& rng) {
  Dataset d;
  d.classes = 2;
  d.features.resize(2, static_cast<Eigen::Index>(spec.size));
  d.labels.resize(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    const int y = static_cast<int>(i % 2);
    const double t = std::numbers::pi * uniform01(rng);
    double x0 = y == 0 ? std::cos(t) : 1.0 - std::cos(t);
    double x1 = y == 0 ? std::sin(t) : 0.5 - std::sin(t);
    x0 += gaussian(rng, spec.noise);
    x1 += gaussian(rng, spec.noise);
    const auto col = static_cast<Eigen::Index>(i);
    d.features(0, col) = x0;
    d.features(1, col) = x1;
    d.labels[i] = y;
  }
  return d;
}

// Centres on a circle of radius 3 in the first two coordinates (on a line for
// dims = 1), so zero-noise blobs are linearly separable.
Dataset gaussian_blobs(const DatasetSpec& spec, Rng& rng) {
  Dataset d;
  d.classes = spec.classes;
  const auto dims = static_cast<Eigen::Index>(spec.dims);
  d.features.setZero(dims, static_cast<Eigen::Index>(spec.size));
  d.labels.resize(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    const auto y = i % spec.classes;
    const auto col = static_cast<Eigen::Index>(i);
    if (dims == 1) {
      d.features(0, col) = 3.0 * static_cast<double>(y);
    } else {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(y) / static_cast<double>(spec.classes);
      d.features(0, col) = 3.0 * std::cos(angle);
      d.features(1, col) = 3.0 * std::sin(angle);
    }
    for (Eigen::Index r = 0; r < dims; ++r) d.features(r, col) += gaussian(rng, spec.noise);
    d.labels[i] = static_cast<int>(y);
  }
  return d;
}

// Checkerboard on [−1, 1]²; a cell's colour is the parity of its indices.
Dataset xor_grid(const DatasetSpec& spec, Rng& rng) {
  Dataset d;
  d.classes = 2;
  d.features.resize(2, static_cast<Eigen::Index>(spec.size));
  d.labels.resize(spec.size);
  const auto cells = spec.cells;
  const double width = 2.0 / static_cast<double>(cells);
  std::vector<std::array<std::size_t, 2>> by_colour[2];
  for (std::size_t a = 0; a < cells; ++a)
    for (std::size_t b = 0; b < cells; ++b) by_colour[(a + b) % 2].push_back({a, b});
  for (std::size_t i = 0; i < spec.size; ++i) {
    const int y = static_cast<int>(i % 2);
    const auto& pool = by_colour[y];
    const auto cell = pool[uniform_index(rng, pool.size())];
    const auto col = static_cast<Eigen::Index>(i);
    for (int k = 0; k < 2; ++k) {
      const double lo = -1.0 + width * static_cast<double>(cell[static_cast<std::size_t>(k)]);
      d.features(k, col) = lo + width * uniform01(rng) + gaussian(rng, spec.noise);
    }
    d.labels[i] = y;
  }
  return d;
}

std::vector<char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("dataset.path: cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T>
T read_le(const char* p) {
  std::array<unsigned char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(p[i]);
  std::uint64_t bits = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) bits = (bits << 8) | bytes[i];
  if constexpr (sizeof(T) == 8) {
    return std::bit_cast<T>(bits);
  } else {
    return std::bit_cast<T>(static_cast<std::uint32_t>(bits));
  }
}

Dataset load_files(const DatasetSpec& spec) {
  auto features_path = spec.path;
  features_path += ".features";
  auto labels_path = spec.path;
  labels_path += ".labels";
  const auto features = read_all(features_path);
  const auto labels = read_all(labels_path);
  if (labels.size() % 4 != 0) throw ConfigError("dataset.path: label file size is not a multiple of 4");
  const std::size_t n = labels.size() / 4;
  if (features.size() != n * spec.dims * 8)
    throw ConfigError("dataset.path: feature file holds " + std::to_string(features.size()) + " bytes, expected " +
                      std::to_string(n * spec.dims * 8) + " for " + std::to_string(n) + " samples of " +
                      std::to_string(spec.dims) + " dims");
  Dataset d;
  d.classes = spec.classes;
  d.features.resize(static_cast<Eigen::Index>(spec.dims), static_cast<Eigen::Index>(n));
  d.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < spec.dims; ++k)
      d.features(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          read_le<double>(features.data() + 8 * (i * spec.dims + k));
    d.labels[i] = read_le<std::int32_t>(labels.data() + 4 * i);
  }
  try {
    d.validate();
  } catch (const ShapeError& e) {
    throw ConfigError(std::string("dataset.path: ") + e.what());
  }
  return d;
}

Dataset take(const Dataset& all, std::span<const std::size_t> index) {
  Dataset d;
  d.classes = all.classes;
  d.features.resize(all.features.rows(), static_cast<Eigen::Index>(index.size()));
  d.labels.resize(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    d.features.col(static_cast<Eigen::Index>(i)) = all.features.col(static_cast<Eigen::Index>(index[i]));
    d.labels[i] = all.labels[index[i]];
  }
  return d;
}

}  // namespace

std::string_view to_string(DatasetGenerator generator) {
  switch (generator) {
    case DatasetGenerator::two_moons: return "two_moons";
    case DatasetGenerator::gaussian_blobs: return "gaussian_blobs";
    case DatasetGenerator::xor_grid: return "xor_grid";
    case DatasetGenerator::file: return "file";
  }
  return "?";
}

DatasetGenerator parse_dataset_generator(std::string_view name) {
  for (auto g : {DatasetGenerator::two_moons, DatasetGenerator::gaussian_blobs, DatasetGenerator::xor_grid,
                 DatasetGenerator::file})
    if (name == to_string(g)) return g;
  throw ConfigError("unknown dataset generator '" + std::string(name) + "'");
}

std::size_t DatasetSpec::class_count() const {
  switch (generator) {
    case DatasetGenerator::two_moons:
    case DatasetGenerator::xor_grid: return 2;
    default: return classes;
  }
}

void DatasetSpec::validate() const {
  std::vector<std::string> errors;
  const auto k = class_count();
  if (k < 2) errors.emplace_back("dataset.classes must be >= 2");
  if (generator != DatasetGenerator::file && size < 2 * k)
    errors.emplace_back("dataset.size must be at least 2 * classes (" + std::to_string(2 * k) + ")");
  if (!(noise >= 0.0) || !std::isfinite(noise)) errors.emplace_back("dataset.noise must be finite and >= 0");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    errors.emplace_back("dataset.validation_fraction must be in (0, 1)");
  if (dims < 1) errors.emplace_back("dataset.dims must be >= 1");
  if (generator == DatasetGenerator::xor_grid && cells < 2) errors.emplace_back("dataset.cells must be >= 2");
  if (generator == DatasetGenerator::file && path.empty()) errors.emplace_back("dataset.path is required for file");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

Dataset generate_samples(const DatasetSpec& spec) {
  spec.validate();
  Rng rng = make_stream(spec.seed, kSampleStream);
  switch (spec.generator) {
    case DatasetGenerator::two_moons: return two_moons(spec, rng);
    case DatasetGenerator::gaussian_blobs: return gaussian_blobs(spec, rng);
    case DatasetGenerator::xor_grid: return xor_grid(spec, rng);
    case DatasetGenerator::file: return load_files(spec);
  }
  throw ConfigError("unknown dataset generator");
}

DatasetSplit generate_dataset(const DatasetSpec& spec) {
  const Dataset all = generate_samples(spec);
  const std::size_t n = all.size();
  if (n < 2 * all.classes)
    throw ConfigError("dataset holds " + std::to_string(n) + " samples, fewer than 2 * classes");
  const auto n_val = static_cast<std::size_t>(std::llround(spec.validation_fraction * static_cast<double>(n)));
  if (n_val == 0 || n_val >= n) throw ConfigError("dataset.validation_fraction leaves an empty split");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_stream(spec.seed, kSplitStream);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_index(rng, i + 1)]);

  const std::span<const std::size_t> all_index(order);
  return {take(all, all_index.subspan(n_val)), take(all, all_index.first(n_val))};
}

}  // namespace ana

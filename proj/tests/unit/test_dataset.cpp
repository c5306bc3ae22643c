#include <doctest.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "ana/dataset.hpp"
#include "ana/errors.hpp"
#include "support/oracles.hpp"

using namespace ana;
namespace fs = std::filesystem;

namespace {

DatasetSpec spec_for(DatasetGenerator g, std::size_t n = 1000, double noise = 0.1) {
  DatasetSpec s;
  s.generator = g;
  s.size = n;
  s.noise = noise;
  s.seed = 17;
  return s;
}

std::size_t count_label(const Dataset& d, int label) {
  return static_cast<std::size_t>(std::count(d.labels.begin(), d.labels.end(), label));
}

double linear_probe(const Dataset& d) {
  std::vector<std::array<double, 2>> pts;
  for (Eigen::Index i = 0; i < d.features.cols(); ++i) pts.push_back({d.features(0, i), d.features(1, i)});
  return oracle::best_linear_accuracy(pts, d.labels);
}

}  // namespace

TEST_CASE("generation is reproducible") {
  const auto a = generate_dataset(spec_for(DatasetGenerator::two_moons));
  const auto b = generate_dataset(spec_for(DatasetGenerator::two_moons));
  REQUIRE(a.train.features.size() == b.train.features.size());
  CHECK(std::memcmp(a.train.features.data(), b.train.features.data(),
                    sizeof(double) * static_cast<std::size_t>(a.train.features.size())) == 0);
  CHECK(a.train.labels == b.train.labels);
  CHECK(a.validation.labels == b.validation.labels);
  CHECK(a.train.size() == 800);
  CHECK(a.validation.size() == 200);
  auto other = spec_for(DatasetGenerator::two_moons);
  other.seed = 18;
  CHECK(generate_dataset(other).train.features != a.train.features);
}

TEST_CASE("generators balance their classes") {
  for (auto g : {DatasetGenerator::two_moons, DatasetGenerator::xor_grid, DatasetGenerator::gaussian_blobs}) {
    auto s = spec_for(g, 600);
    if (g == DatasetGenerator::gaussian_blobs) s.classes = 3;
    const auto d = generate_samples(s);
    CHECK(d.size() == 600);
    CHECK(d.classes == s.class_count());
    for (int c = 0; c < static_cast<int>(d.classes); ++c) CHECK(count_label(d, c) == 600 / d.classes);
  }
}

TEST_CASE("noise-free blobs are linearly separable") {
  const auto d = generate_samples(spec_for(DatasetGenerator::gaussian_blobs, 200, 0.0));
  CHECK(linear_probe(d) == 1.0);
}

TEST_CASE("xor grid defeats a linear probe") {
  // Default 6×6 checkerboard.
  const auto d = generate_samples(spec_for(DatasetGenerator::xor_grid, 1000, 0.0));
  CHECK(linear_probe(d) <= 0.6);
}

TEST_CASE("dataset errors") {
  auto s = spec_for(DatasetGenerator::gaussian_blobs, 5);
  s.classes = 3;
  CHECK_THROWS_AS(generate_dataset(s), ConfigError);
  CHECK_THROWS_AS(parse_dataset_generator("mnist"), ConfigError);
  auto f = spec_for(DatasetGenerator::file, 4);
  f.path = "/nonexistent/data";
  CHECK_THROWS(generate_dataset(f));
}

TEST_CASE("file loader") {
  const auto dir = fs::temp_directory_path() / "ana_dataset_test";
  fs::create_directories(dir);
  const auto base = dir / "toy";
  const std::size_t n = 10;
  {
    std::ofstream fx(base.string() + ".features", std::ios::binary);
    std::ofstream fy(base.string() + ".labels", std::ios::binary);
    for (std::size_t i = 0; i < n; ++i) {
      for (double v : {static_cast<double>(i), -0.5 * static_cast<double>(i)}) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int k = 0; k < 8; ++k, bits >>= 8) fx.put(static_cast<char>(bits & 0xff));
      }
      auto label = static_cast<std::uint32_t>(i % 2);
      for (int k = 0; k < 4; ++k, label >>= 8) fy.put(static_cast<char>(label & 0xff));
    }
  }
  auto s = spec_for(DatasetGenerator::file, n);
  s.path = base;
  const auto d = generate_samples(s);
  REQUIRE(d.size() == n);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(d.features(0, static_cast<Eigen::Index>(i)) == static_cast<double>(i));
    CHECK(d.features(1, static_cast<Eigen::Index>(i)) == -0.5 * static_cast<double>(i));
    CHECK(d.labels[i] == static_cast<int>(i % 2));
  }
  const auto split = generate_dataset(s);
  CHECK(split.train.size() + split.validation.size() == n);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include "ana/csv.hpp"
#include "ana/errors.hpp"

using namespace ana;
namespace fs = std::filesystem;

TEST_CASE("csv writer") {
  const auto dir = fs::temp_directory_path() / "ana_csv_test";
  fs::create_directories(dir);
  const auto path = dir / "t.csv";
  {
    CsvWriter w(path, {"a", "b", "c"});
    w << 0.1 << 3 << "plain";
    w.end_row();
    w << -2.5 << true << "needs,quote";
    w.end_row();
    w << 1.0;
    CHECK_THROWS_AS(w.end_row(), ShapeError);
  }
  std::ifstream is(path);
  const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  CHECK(text.rfind("a,b,c\n0.10000000000000001,3,plain\n-2.5,true,\"needs,quote\"\n", 0) == 0);
}

TEST_CASE("format_real round-trips") {
  for (double v : {0.0, 1.0, -0.1, 1e-300, 123456789.125, std::numeric_limits<double>::max()})
    CHECK(std::stod(format_real(v)) == v);
  CHECK(format_real(0.5) == "0.5");
}

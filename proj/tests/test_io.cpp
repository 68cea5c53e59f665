#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "enaqt/io.hpp"

using namespace enaqt;
namespace fs = std::filesystem;

TEST_CASE("doubles round trip through text") {
  for (double v : {0.1, 1.0 / 3.0, 1.4715280018851376e-3, -2.5e-300, 6.02214076e23}) {
    CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
  }
  CHECK(io::format_double(NAN) == "nan");
  CHECK(io::format_double(-INFINITY) == "-inf");
}

TEST_CASE("csv round trip with header") {
  const fs::path dir = fs::temp_directory_path() / "enaqt_io_test";
  fs::create_directories(dir);
  const io::Table t{{"a", "b"}, {{1.0 / 3.0, 2.0}, {NAN, -1e-17}}};
  const nlohmann::json header{{"seed", 7}};
  io::write_csv(dir / "t.csv", header, t);
  const auto [h, back] = io::read_csv(dir / "t.csv");
  CHECK(h == header);
  CHECK(back.columns == t.columns);
  CHECK(back.rows[0][0] == t.rows[0][0]);
  CHECK(std::isnan(back.rows[1][0]));
  CHECK(back.rows[1][1] == -1e-17);
  CHECK(!fs::exists(dir / "t.csv.tmp"));
  CHECK_THROWS(io::write_csv(dir / "bad.csv", header, io::Table{{"a"}, {{1.0, 2.0}}}));
  fs::remove_all(dir);
}

TEST_CASE("density table pairs real and imaginary parts") {
  ComplexMatrix m(2, 2);
  m << 0.6, std::complex<double>(0.1, 0.2), std::complex<double>(0.1, -0.2), 0.4;
  const auto t = io::density_table(DensityMatrix{m});
  CHECK(t.columns == std::vector<std::string>{"row", "re_1", "im_1", "re_2", "im_2"});
  CHECK(t.rows[0] == std::vector<double>{1, 0.6, 0, 0.1, 0.2});
  CHECK(t.rows[1] == std::vector<double>{2, 0.1, -0.2, 0.4, 0});
}

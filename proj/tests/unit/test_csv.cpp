#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "csv.hpp"
#include "doctest.h"
#include "csv_cell.hpp"
#include "test_util.hpp"

using namespace revclt::report;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("number formatting") {
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_cell(Cell{}) == "");
  CHECK(format_cell(Cell{std::uint64_t{18446744073709551615ULL}}) == "18446744073709551615");
  CHECK(format_cell(Cell{true}) == "true");
}

TEST_CASE("round trip at 17 significant digits") {
  for (double v : {1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 12345.678901234567, 5e-324}) {
    double back = 0.0;
    REQUIRE(parse_double(format_double(v), back));
    CHECK(back == v);
  }
  double x = 0.0;
  CHECK_FALSE(parse_double("1.5x", x));
  CHECK_FALSE(parse_double("", x));
  CHECK(parse_double("nan", x));
  CHECK(std::isnan(x));
  std::uint64_t u = 0;
  CHECK(parse_uint("42", u));
  CHECK(u == 42);
  CHECK_FALSE(parse_uint("-1", u));
  CHECK_FALSE(parse_uint("4.0", u));
}

TEST_CASE("emit and read back") {
  TempDir dir;
  std::vector<Row> rows{{{"a", 1.0 / 3.0}, {"b", std::string("x,\"y\"")}, {"c", Cell{}}},
                        {{"a", -2.5}, {"b", std::string("plain")}, {"c", std::int64_t{-7}}}};
  emit_csv(rows, {"a", "b", "c"}, dir / "t.csv");
  const std::string body = slurp(dir / "t.csv");
  CHECK(body == "a,b,c\n0.33333333333333331,\"x,\"\"y\"\"\",\n-2.5,plain,-7\n");
  auto t = read_csv(dir / "t.csv");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x,\"y\"");
  CHECK(t.rows[0][2].empty());
  CHECK(num(t.rows[0][0]) == 1.0 / 3.0);
  CHECK(t.lines == std::vector<std::size_t>{2, 3});
}

TEST_CASE("empty row set gives a header-only file") {
  TempDir dir;
  emit_csv({}, {"x", "y"}, dir / "e.csv");
  CHECK(slurp(dir / "e.csv") == "x,y\n");
}

TEST_CASE("schema mismatch writes nothing") {
  TempDir dir;
  std::vector<Row> rows{{{"a", 1.0}, {"b", 2.0}}, {{"a", 1.0}}};
  CHECK_THROWS_AS(emit_csv(rows, {"a", "b"}, dir / "s.csv"), SchemaError);
  CHECK_FALSE(std::filesystem::exists(dir / "s.csv"));
  std::vector<Row> extra{{{"a", 1.0}, {"z", 2.0}}};
  CHECK_THROWS_AS(emit_csv(extra, {"a"}, dir / "s.csv"), SchemaError);
  CHECK_FALSE(std::filesystem::exists(dir / "s.csv"));
}

TEST_CASE("I/O errors name the path") {
  std::vector<Row> rows;
  try {
    emit_csv(rows, {"a"}, "/nonexistent_dir_revclt/x.csv");
    FAIL("expected an I/O error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent_dir_revclt/x.csv") != std::string::npos);
  }
  CHECK_THROWS_AS(read_csv("/nonexistent_dir_revclt/y.csv"), IoError);
}

TEST_CASE("malformed input") {
  TempDir dir;
  std::ofstream(dir / "empty.csv").close();
  CHECK_THROWS_AS(read_csv(dir / "empty.csv"), ParseError);
  std::ofstream(dir / "q.csv") << "a,b\n\"open,1\n";
  try {
    read_csv(dir / "q.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::ofstream(dir / "w.csv") << "a,b\n1,2,3\n";
  CHECK_THROWS_AS(read_csv(dir / "w.csv"), ParseError);
  std::ofstream(dir / "c.csv") << "# note\na\n1\n";
  auto t = read_csv(dir / "c.csv");
  CHECK(t.comments == std::vector<std::string>{" note"});
  CHECK(t.lines == std::vector<std::size_t>{3});
}

}

#include <doctest.h>

#include <sstream>

#include "dysonlab/report.hpp"

using namespace dysonlab;

TEST_SUITE("report") {
  TEST_CASE("rows and lookups") {
    ExperimentReport r("t", {"a", "b", "c"});
    r.add_row({Cell{std::int64_t{3}}, Cell{0.5}, Cell{std::string("x")}});
    CHECK(r.column("b") == 1);
    CHECK(r.number(0, "a") == 3.0);
    CHECK(r.number(0, "b") == 0.5);
    CHECK(r.text(0, "c") == "x");
    CHECK_THROWS(r.add_row({Cell{0.0}}));
    CHECK_THROWS(r.column("missing"));
    r.set_meta("k", "v");
    r.set_meta("k", "w");
    REQUIRE(r.metadata.size() == 1);
    CHECK(r.metadata[0].second == "w");
  }

  TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9, 0.0}) CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(0.5) == "0.5");
  }

  TEST_CASE("CSV quoting and line ends") {
    ExperimentReport r("t", {"name", "value"});
    r.add_row({Cell{std::string("plain")}, Cell{1.5}});
    r.add_row({Cell{std::string("a,\"b\"")}, Cell{std::int64_t{-2}}});
    std::ostringstream out;
    write_csv(r, out);
    CHECK(out.str() == "name,value\r\nplain,1.5\r\n\"a,\"\"b\"\"\",-2\r\n");
  }

  TEST_CASE("JSON form") {
    ExperimentReport r("t", {"x"});
    r.set_meta("seed", "4");
    r.add_row({Cell{0.25}});
    const auto j = to_json(r);
    CHECK(j["name"] == "t");
    CHECK(j["metadata"]["seed"] == "4");
    CHECK(j["columns"][0] == "x");
    CHECK(j["rows"][0][0] == 0.25);
  }
}

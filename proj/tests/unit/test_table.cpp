#include "gazeflow/error.hpp"
#include "gazeflow/random.hpp"
#include "gazeflow/table.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

using namespace gazeflow;

TEST_CASE("format_number uses six significant digits")
{
    CHECK(format_number(0.1 + 0.2) == "0.3");
    CHECK(format_number(1234567.0) == "1.23457e+06");
    CHECK(format_number(150.0) == "150");
    CHECK(format_number(2.0 / 3.0) == "0.666667");
    CHECK(format_number(1e-7) == "1e-07");
}

TEST_CASE("format_number rounds ties to even and normalizes negative zero")
{
    // Exactly representable ties.
    CHECK(format_number(0.125) == "0.125");
    CHECK(format_number(1234565.0) == "1.23456e+06");
    CHECK(format_number(1234575.0) == "1.23458e+06");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(-1e-300 * 1e-300) == "0");
}

TEST_CASE("missing values print as NA")
{
    CHECK(format_number(std::optional<double>{}) == "NA");
    CHECK(format_number(std::optional<double>{2.5}) == "2.5");
}

TEST_CASE("format_exact round-trips arbitrary doubles")
{
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const double v = rng.normal(0.0, 1.0) * std::pow(10.0, rng.uniform(-10.0, 10.0));
        const auto back = parse_number(format_exact(v));
        REQUIRE(back);
        CHECK(std::memcmp(&*back, &v, sizeof v) == 0);
    }
}

TEST_CASE("parse_number rejects partial or empty fields")
{
    CHECK(parse_number("1.5") == 1.5);
    CHECK(parse_number("-2e3") == -2000.0);
    CHECK_FALSE(parse_number(""));
    CHECK_FALSE(parse_number("1.5x"));
    CHECK_FALSE(parse_number("abc"));
    CHECK_FALSE(parse_number("1,5"));
}

TEST_CASE("CsvTable parses quoted fields and strips a BOM")
{
    const auto t = CsvTable::parse("\xEF\xBB\xBF" "a,b,c\n1,\"x, y\",\"say \"\"hi\"\"\"\n\n2,,3\n");
    REQUIRE(t.header().size() == 3);
    CHECK(t.header()[0] == "a");
    REQUIRE(t.rows().size() == 2);
    CHECK(t.rows()[0].fields[1] == "x, y");
    CHECK(t.rows()[0].fields[2] == "say \"hi\"");
    CHECK(t.rows()[1].line == 4);
    CHECK_FALSE(t.optional_number(t.rows()[1], 1));
}

TEST_CASE("CsvTable reports schema and row errors")
{
    const auto t = CsvTable::parse("a,b\n1,zz\n");
    CHECK_THROWS_WITH_AS(t.require("c"), doctest::Contains("missing required column"), InputError);
    CHECK_THROWS_WITH_AS(t.number(t.rows()[0], 1), doctest::Contains("line 2"), InputError);
    CHECK_THROWS_AS(CsvTable::parse("a,b\n1,2,3\n"), InputError);
    CHECK_THROWS_AS(CsvTable::parse("a,b\n1,\"2\n"), InputError);
}

TEST_CASE("CsvWriter output parses back")
{
    std::ostringstream os;
    CsvWriter w(os);
    w.header({"name", "value", "flag", "missing"});
    w.field("comma, inside").field(0.5).field(true).field(std::optional<double>{}).end_row();
    w.field(std::string("plain")).exact(0.1).field(false).field(std::size_t{7}).end_row();

    const auto t = CsvTable::parse(os.str());
    REQUIRE(t.rows().size() == 2);
    CHECK(t.rows()[0].fields[0] == "comma, inside");
    CHECK(t.rows()[0].fields[2] == "1");
    CHECK(t.rows()[0].fields[3] == "NA");
    CHECK(t.number(t.rows()[1], 1) == 0.1);
    CHECK(t.integer(t.rows()[1], 3) == 7);
}

#include "wft/csv.hpp"
#include "wft/errors.hpp"
#include "wft/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace wft;

TEST_CASE("read_table parses comma input with comments and CRLF") {
    std::istringstream in(
        "# produced by hand\r\n"
        "# second note\r\n"
        "a,b,c\r\n"
        "1,2,3\r\n"
        "x,y,z\r\n");
    const Table t = read_table(in);
    CHECK(t.columns == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2", "3"});
    CHECK(t.rows[1] == std::vector<std::string>{"x", "y", "z"});
    CHECK(t.comments == std::vector<std::string>{"produced by hand", "second note"});
    CHECK(t.source_lines == std::vector<std::size_t>{4, 5});
    CHECK(t.column_index("b") == 1);
    CHECK(t.column_index("missing") == -1);
}

TEST_CASE("read_table autodetects tab delimiter from the header") {
    std::istringstream in("a\tb\n1\t2\n");
    const Table t = read_table(in);
    CHECK(t.columns.size() == 2);
    CHECK(t.rows[0][1] == "2");
}

TEST_CASE("forced delimiter overrides autodetection") {
    std::istringstream in("a,b\n1,2\n");
    const Table t = read_table(in, '\t');
    CHECK(t.columns.size() == 1);   // whole line is one field
    CHECK(t.columns[0] == "a,b");
}

TEST_CASE("ragged rows are rejected with the offending line number") {
    std::istringstream in("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_table(in), MalformedRow);
    std::istringstream again("a,b\n1,2\n3\n");
    try {
        read_table(again);
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("write_table then read_table round-trips content") {
    Table t;
    t.columns = {"k", "v"};
    t.rows = {{"alpha", "1"}, {"beta", "2"}};
    t.comments = {"a note"};
    std::ostringstream out;
    write_table(out, t);
    std::istringstream in(out.str());
    const Table back = read_table(in);
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    CHECK(back.comments == t.comments);
}

TEST_CASE("format_double round-trips random doubles exactly") {
    SplitMix64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        // Mix magnitudes: uniform, small rates, large counts.
        double v = (rng.next_double() - 0.5) *
                   std::pow(10.0, static_cast<double>(rng.next_below(13)) - 6.0);
        double back = 0.0;
        REQUIRE(parse_double(format_double(v), back));
        CHECK(back == v);
    }
}

TEST_CASE("format_double normalizes negative zero and keeps short forms short") {
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(0.05) == "0.05");
    CHECK(format_double(10.0) == "10");
    CHECK(format_double(1.0 / 27.0) == format_double(1.0 / 27.0));
}

TEST_CASE("format_fixed emits the requested decimal places") {
    CHECK(format_fixed(1.23456, 2) == "1.23");
    CHECK(format_fixed(2.0, 1) == "2.0");
}

TEST_CASE("parse_double and parse_long are strict") {
    double d = 0.0;
    long long n = 0;
    CHECK(parse_double("1.5", d));
    CHECK(d == 1.5);
    CHECK(parse_double(" 2.5 ", d));   // surrounding whitespace tolerated
    CHECK(d == 2.5);
    CHECK_FALSE(parse_double("", d));
    CHECK_FALSE(parse_double("1.2.3", d));
    CHECK_FALSE(parse_double("4x", d));
    CHECK(parse_long("42", n));
    CHECK(n == 42);
    CHECK_FALSE(parse_long("4.2", n));
    CHECK_FALSE(parse_long("", n));
    CHECK_FALSE(parse_long("9e3", n));
}

TEST_CASE("trim and split behave on edge cases") {
    CHECK(trim("  x \t") == "x");
    CHECK(trim("") == "");
    CHECK(split("a,b,,c", ',') == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(split("", ',') == std::vector<std::string>{""});
}

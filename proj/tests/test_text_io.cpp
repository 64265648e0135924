#include <doctest.h>

#include <sstream>

#include "rangemax/text_io.hpp"
#include "test_util.hpp"

using namespace rangemax;

TEST_CASE("points text round trip, any line order") {
    std::istringstream in("5\n3 0 2\n0 2 3\n\n4 3 1\n1 4 0\n2 1 4\n");
    PointSet ps = read_points(in);
    CHECK(ps == testutil::p5());
    std::ostringstream out;
    write_points(out, ps);
    CHECK(out.str() == "5\n0 2 3\n1 4 0\n2 1 4\n3 0 2\n4 3 1\n");
}

TEST_CASE("points text diagnostics") {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            read_points(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("") == 1);
    CHECK(line_of("2 2\n") == 1);
    CHECK(line_of("x\n") == 1);
    CHECK(line_of("2\n0 0 0\n1 1\n") == 3);
    CHECK(line_of("2\n0 0 0\n1 -1 1\n") == 3);
    CHECK(line_of("2\n0 0 0\n0 1 1\n") == 3);   // x repeats
    CHECK(line_of("2\n0 0 0\n1 0 1\n") == 3);   // y repeats
    CHECK(line_of("2\n0 0 1\n1 1 1\n") == 3);   // priority repeats
    CHECK(line_of("2\n0 0 0\n1 2 1\n") == 3);   // out of range
    CHECK(line_of("2\n0 0 0\n") == 3);          // too few
    CHECK(line_of("1\n0 0 0\n0 0 0\n") == 3);   // trailing
    CHECK(line_of("1\n0 0 0\n") == 0);
}

TEST_CASE("points binary round trip and sniffing") {
    PointSet ps = random_point_set(300, 4);
    std::stringstream s;
    write_points_binary(s, ps);
    CHECK(read_points_binary(s) == ps);

    std::string bytes;
    {
        std::ostringstream o;
        write_points_binary(o, ps);
        bytes = o.str();
    }
    std::istringstream cut(bytes.substr(0, bytes.size() - 2));
    CHECK_THROWS_AS(read_points_binary(cut), FormatError);
    std::istringstream extra(bytes + "x");
    CHECK_THROWS_AS(read_points_binary(extra), FormatError);
    std::istringstream text("1\n0 0 0\n");
    CHECK_THROWS_AS(read_points_binary(text), FormatError);
}

TEST_CASE("random point sets are permutations and reproducible") {
    PointSet a = random_point_set(1000, 9);
    CHECK(a == random_point_set(1000, 9));
    CHECK_FALSE(a == random_point_set(1000, 10));
    CHECK(random_point_set(0, 1).size() == 0);
}

TEST_CASE("queries text") {
    std::istringstream in("0 0 2 2\n* * * *\n\n3 * * 1\n2 0 1 4\n");
    auto qs = read_queries(in);
    REQUIRE(qs.size() == 4);
    CHECK(qs[0] == QueryRect::closed(0, 2, 0, 2));
    CHECK(qs[1] == QueryRect::full());
    CHECK(qs[2] == QueryRect{3, kOpenHigh, kOpenLow, 1});
    CHECK(qs[3].empty());

    PointSet p5 = testutil::p5();
    CHECK(format_answer(brute_force_max(p5, qs[0])) == "2 1 4");
    CHECK(format_answer(brute_force_max(p5, qs[1])) == "2 1 4");
    CHECK(format_answer(brute_force_max(p5, qs[3])) == "NONE");

    std::ostringstream out;
    write_queries(out, qs);
    CHECK(out.str() == "0 0 2 2\n* * * *\n3 * * 1\n2 0 1 4\n");

    std::istringstream bad("0 0 2\n");
    CHECK_THROWS_AS(read_queries(bad), ParseError);
    std::istringstream bad2("0 0 2 y\n");
    CHECK_THROWS_AS(read_queries(bad2), ParseError);
}

TEST_CASE("random query mixes") {
    std::mt19937_64 rng(2);
    for (const auto& q : random_queries(50, 2000, rng, false)) {
        CHECK(q.sidedness() == 4);
        CHECK_FALSE(q.empty());
    }
    int shapes[5] = {0, 0, 0, 0, 0};
    for (const auto& q : random_queries(50, 2000, rng, true)) {
        int s = q.sidedness();
        REQUIRE((s == 2 || s == 3));
        ++shapes[s];
    }
    CHECK(shapes[2] > 500);
    CHECK(shapes[3] > 500);
}

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "rangemax/globals.hpp"
#include "test_util.hpp"

using namespace rangemax;

namespace {

std::vector<Point> scan_report(const PointSet& ps, const QueryRect& r) {
    std::vector<Point> out;
    for (std::uint32_t x = 0; x < ps.size(); ++x)
        if (r.contains(x, ps.y_of(x))) out.push_back({x, ps.y_of(x)});
    return out;
}

// index in [i, j] holding the k-th smallest of a[i..j]
std::uint32_t sort_select(const std::vector<std::uint32_t>& a, std::uint32_t i, std::uint32_t j,
                          std::uint32_t k) {
    std::vector<std::uint32_t> idx(j - i + 1);
    std::iota(idx.begin(), idx.end(), i);
    std::sort(idx.begin(), idx.end(), [&](auto p, auto q) { return a[p] < a[q]; });
    return idx[k - 1];
}

} // namespace

TEST_CASE("globals on the five-point instance") {
    Globals g(testutil::p5());
    std::vector<std::uint32_t> X, Y;
    for (std::uint32_t i = 0; i < 5; ++i) {
        X.push_back(g.X(i));
        Y.push_back(g.Y(i));
    }
    CHECK(X == std::vector<std::uint32_t>{2, 4, 1, 0, 3});
    CHECK(Y == std::vector<std::uint32_t>{3, 2, 0, 4, 1});
    QueryRect r = QueryRect::closed(0, 2, 0, 2);
    CHECK(g.range_count(r) == 2);
    CHECK(g.range_count(QueryRect::full()) == 5);
    CHECK(g.range_count(QueryRect::closed(3, 2, 0, 4)) == 0);
    CHECK(g.range_report(r) == std::vector<Point>{{0, 2}, {2, 1}});
    CHECK(g.range_report(QueryRect::closed(0, 4, 3, 2)).empty());
    CHECK(g.range_select(Axis::kX, 0, 4, 1) == 3);
    for (std::uint32_t i = 0; i < 5; ++i) {
        CHECK(g.range_select(Axis::kX, i, i, 1) == i);
        CHECK(g.range_select(Axis::kY, i, i, 1) == i);
    }
    CHECK(g.to_point_set() == testutil::p5());
}

TEST_CASE("globals on the identity") {
    Globals g(PointSet::identity(9));
    for (std::uint32_t i = 0; i < 9; ++i) {
        CHECK(g.X(i) == i);
        CHECK(g.Y(i) == i);
    }
}

TEST_CASE("globals exhaustive against scan") {
    for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 33u, 64u}) {
        PointSet ps = testutil::random_points(n, 1000 + n);
        Globals g(ps);
        std::vector<std::uint32_t> X(n), Y(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            X[i] = g.X(i);
            Y[i] = g.Y(i);
            REQUIRE(g.Y(g.X(i)) == i);
            REQUIRE(g.X(g.Y(i)) == i);
        }
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint32_t j = i; j < n; ++j) {
                std::uint32_t prev_x = 0, prev_y = 0;
                for (std::uint32_t k = 1; k <= j - i + 1; ++k) {
                    std::uint32_t sx = g.range_select(Axis::kX, i, j, k);
                    std::uint32_t sy = g.range_select(Axis::kY, i, j, k);
                    REQUIRE(sx == sort_select(X, i, j, k));
                    REQUIRE(sy == sort_select(Y, i, j, k));
                    if (k > 1) {
                        REQUIRE(X[sx] > X[prev_x]);
                        REQUIRE(Y[sy] > Y[prev_y]);
                    }
                    prev_x = sx;
                    prev_y = sy;
                }
            }
        }
        if (n > 33) continue;
        for (Coord x0 = 0; x0 < Coord(n); ++x0)
            for (Coord x1 = x0; x1 < Coord(n); ++x1)
                for (Coord y0 = 0; y0 < Coord(n); ++y0)
                    for (Coord y1 = y0; y1 < Coord(n); ++y1) {
                        QueryRect r = QueryRect::closed(x0, x1, y0, y1);
                        auto expect = scan_report(ps, r);
                        REQUIRE(g.range_report(r) == expect);
                        REQUIRE(g.range_count(r) == expect.size());
                    }
    }
}

TEST_CASE("globals random rects with open sides") {
    std::mt19937_64 rng(8);
    for (std::size_t n : {64u, 500u, 4096u}) {
        PointSet ps = testutil::random_points(n, n);
        Globals g(ps);
        std::uniform_int_distribution<Coord> d(0, Coord(n) - 1);
        for (int t = 0; t < 2000; ++t) {
            Coord a = d(rng), b = d(rng), c = d(rng), e = d(rng);
            QueryRect r = QueryRect::closed(std::min(a, b), std::max(a, b), std::min(c, e),
                                            std::max(c, e));
            if (rng() % 4 == 0) r.x_lo = kOpenLow;
            if (rng() % 4 == 0) r.x_hi = kOpenHigh;
            if (rng() % 4 == 0) r.y_lo = kOpenLow;
            if (rng() % 4 == 0) r.y_hi = kOpenHigh;
            auto expect = scan_report(ps, r);
            REQUIRE(g.range_report(r) == expect);
            REQUIRE(g.range_count(r) == expect.size());
        }
    }
}

TEST_CASE("globals serialization") {
    PointSet ps = testutil::random_points(300, 3);
    Globals g(ps);
    ByteWriter w;
    g.serialize(w);
    ByteReader r(w.buffer());
    Globals h = Globals::deserialize(r);
    CHECK(r.at_end());
    CHECK(h == g);
    CHECK(h.to_point_set() == ps);
    CHECK(h.range_count(QueryRect::closed(10, 200, 50, 250)) ==
          g.range_count(QueryRect::closed(10, 200, 50, 250)));
}

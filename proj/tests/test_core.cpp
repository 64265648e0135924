#include <doctest.h>

#include <algorithm>
#include <random>

#include "rangemax/core.hpp"
#include "test_util.hpp"

using namespace rangemax;

TEST_CASE("point set rejects non-permutations") {
    CHECK_THROWS_AS(PointSet({0, 0}, {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(PointSet({0, 1}, {0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(PointSet({0, 1}, {0}), std::invalid_argument);
    PointSet ps = testutil::p5();
    for (std::uint32_t x = 0; x < 5; ++x) CHECK(ps.x_of(ps.y_of(x)) == x);
}

TEST_CASE("sidedness and clamping") {
    CHECK(QueryRect::full().sidedness() == 0);
    CHECK(QueryRect{kOpenLow, 3, 2, kOpenHigh}.sidedness() == 2);
    CHECK(QueryRect::closed(0, 1, 2, 3).sidedness() == 4);
    QueryRect c = QueryRect{kOpenLow, 3, 2, kOpenHigh}.clamped(5);
    CHECK(c == QueryRect::closed(0, 3, 2, 4));
}

TEST_CASE("rank_reduce") {
    std::vector<RawPoint> raw{{0.5, 20.0, 7.0}, {1.5, 10.0, 3.0}};
    auto [ps, maps] = rank_reduce(raw);
    CHECK(ps.upsilon() == std::vector<std::uint32_t>{1, 0});
    CHECK(ps.pi() == std::vector<std::uint32_t>{1, 0});

    std::vector<RawPoint> ident;
    for (int i = 0; i < 6; ++i) ident.push_back({double(i), double(i), double(i)});
    CHECK(rank_reduce(ident).first == PointSet::identity(6));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-1e6, 1e6);
    std::vector<RawPoint> pts(100);
    for (auto& p : pts) p = {d(rng), d(rng), d(rng)};
    auto [rp, rm] = rank_reduce(pts);
    // inputs were shuffled by x; find each raw point's rank index
    std::vector<std::uint32_t> xr(100);
    for (std::size_t i = 0; i < 100; ++i)
        xr[i] = std::lower_bound(rm.xs.begin(), rm.xs.end(), pts[i].x) - rm.xs.begin();
    for (std::size_t i = 0; i < 100; ++i) {
        for (std::size_t j = 0; j < 100; ++j) {
            CHECK((pts[i].x < pts[j].x) == (xr[i] < xr[j]));
            CHECK((pts[i].y < pts[j].y) == (rp.y_of(xr[i]) < rp.y_of(xr[j])));
            CHECK((pts[i].priority < pts[j].priority) ==
                  (rp.priority(xr[i]) < rp.priority(xr[j])));
        }
    }
}

TEST_CASE("rank_reduce reports the duplicate pair") {
    std::vector<RawPoint> raw{{0.0, 1.0, 2.0}, {1.0, 2.0, 3.0}, {2.0, 1.0, 4.0}};
    try {
        (void)rank_reduce(raw);
        FAIL("expected rejection");
    } catch (const DuplicateValueError& e) {
        CHECK(std::min(e.first(), e.second()) == 0);
        CHECK(std::max(e.first(), e.second()) == 2);
    }
}

TEST_CASE("map_rect") {
    std::vector<RawPoint> raw;
    PointSet p5 = testutil::p5();
    for (std::uint32_t x = 0; x < 5; ++x)
        raw.push_back({double(x), double(p5.y_of(x)), double(p5.priority(x))});
    auto [ps, maps] = rank_reduce(raw);
    CHECK(ps == p5);
    CHECK(map_rect(maps, RealRect{}).clamped(5) == QueryRect::closed(0, 4, 0, 4));
    QueryRect between = map_rect(maps, RealRect{1.2, 1.8, 1.2, 1.8});
    CHECK(between.empty());
    CHECK(!brute_force_max(ps, between));
    QueryRect r = map_rect(maps, RealRect{0.5, 2.5, -10, 10});
    CHECK(r.x_lo == 1);
    CHECK(r.x_hi == 2);
}

TEST_CASE("brute_force_max on the five-point instance") {
    PointSet ps = testutil::p5();
    auto a = brute_force_max(ps, QueryRect::closed(0, 2, 0, 2));
    REQUIRE(a);
    CHECK(*a == Candidate{2, 1, 4});
    CHECK(*brute_force_max(ps, QueryRect::full()) == Candidate{2, 1, 4});
    CHECK(!brute_force_max(ps, QueryRect::closed(0, 0, 0, 0)));
}

TEST_CASE("brute_force_max is monotone") {
    std::mt19937_64 rng(5);
    PointSet ps = testutil::random_points(40, 5);
    std::uniform_int_distribution<int> d(0, 39);
    for (int t = 0; t < 2000; ++t) {
        int a = d(rng), b = d(rng), c = d(rng), e = d(rng);
        QueryRect r = QueryRect::closed(std::min(a, b), std::max(a, b), std::min(c, e),
                                        std::max(c, e));
        QueryRect big = r;
        big.x_lo = std::max<Coord>(0, r.x_lo - d(rng) % 4);
        big.y_hi = r.y_hi + d(rng) % 4;
        auto s = brute_force_max(ps, r), l = brute_force_max(ps, big);
        if (s) {
            REQUIRE(l);
            CHECK(l->priority >= s->priority);
        }
    }
}

TEST_CASE("reflect") {
    PointSet p5 = testutil::p5();
    CHECK(reflect(p5, Orientation::kIdentity) == p5);
    PointSet fx = reflect(p5, Orientation::kFlipX);
    CHECK(fx.upsilon() == std::vector<std::uint32_t>{3, 0, 1, 4, 2});
    CHECK(fx.pi() == std::vector<std::uint32_t>{1, 2, 4, 0, 3});
    for (int o = 0; o < 4; ++o) {
        auto ori = static_cast<Orientation>(o);
        CHECK(reflect(reflect(p5, ori), ori) == p5);
    }

    std::mt19937_64 rng(99);
    for (int t = 0; t < 1000; ++t) {
        std::size_t n = 1 + rng() % 30;
        PointSet ps = testutil::random_points(n, rng());
        auto ori = static_cast<Orientation>(rng() % 4);
        std::uniform_int_distribution<Coord> d(0, Coord(n) - 1);
        Coord a = d(rng), b = d(rng), c = d(rng), e = d(rng);
        QueryRect r = QueryRect::closed(std::min(a, b), std::max(a, b), std::min(c, e),
                                        std::max(c, e));
        if (rng() % 2) r.x_lo = kOpenLow;
        if (rng() % 2) r.y_hi = kOpenHigh;
        auto direct = brute_force_max(ps, r);
        auto mirrored = brute_force_max(reflect(ps, ori), reflect(r, n, ori));
        REQUIRE(direct.has_value() == mirrored.has_value());
        if (direct) CHECK(reflect(*direct, n, ori) == *mirrored);
    }
}

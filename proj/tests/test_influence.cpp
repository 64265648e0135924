#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "rangemax/influence.hpp"
#include "test_util.hpp"

using namespace rangemax;

namespace {

// Inf(p) straight from the definition: corners on p's row answered by p
void check_semantics(const PointSet& ps, const InfluenceSet& inf) {
    std::uint32_t n = static_cast<std::uint32_t>(ps.size());
    REQUIRE(inf.size() == n);
    std::size_t empty = 0;
    for (std::uint32_t p = 0; p < n; ++p) {
        const auto& s = inf.segments[p];
        REQUIRE(s.owner == p);
        REQUIRE(s.y == ps.y_of(p));
        REQUIRE(s.x_start == p);
        std::uint32_t end = p;
        while (end < n && brute_force_two_sided(ps, {end, ps.y_of(p)})->x == p) ++end;
        for (std::uint32_t x = end; x < n; ++x)
            REQUIRE(brute_force_two_sided(ps, {x, ps.y_of(p)})->x != p);
        if (end == p) {
            REQUIRE(s.empty);
            ++empty;
        } else {
            REQUIRE(!s.empty);
            REQUIRE(s.x_end == (end == n ? kOpenEnd : end));
        }
    }
    REQUIRE(inf.redundant == empty);
    REQUIRE(count_redundant(inf) == empty);
}

PointSet staircase(std::size_t n, bool descending, bool rising_priority) {
    std::vector<std::uint32_t> u(n), p(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        u[i] = descending ? static_cast<std::uint32_t>(n - 1 - i) : i;
        p[i] = rising_priority ? i : static_cast<std::uint32_t>(n - 1 - i);
    }
    return PointSet(u, p);
}

std::size_t redundant_by_queries(const PointSet& ps) {
    std::uint32_t n = static_cast<std::uint32_t>(ps.size());
    std::vector<bool> hit(n, false);
    for (std::uint32_t x = 0; x < n; ++x)
        for (std::uint32_t y = 0; y < n; ++y)
            if (auto a = brute_force_two_sided(ps, {x, y})) hit[a->x] = true;
    return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), false));
}

} // namespace

TEST_CASE("influence of a single point") {
    PointSet ps({0}, {0});
    InfluenceSet inf = build_influence(ps);
    REQUIRE(inf.size() == 1);
    CHECK(!inf.segments[0].empty);
    CHECK(inf.segments[0].x_end == kOpenEnd);
    CHECK(inf.redundant == 0);
    EntropyCode c = encode_priorities(ps);
    CHECK(c.cases[0]);
    CHECK(c.kills.decode() == std::vector<std::uint32_t>{0});
    CHECK(c.bit_length() <= 3);
    CHECK(decode_influence(ps.upsilon(), c) == inf);
}

TEST_CASE("influence on the five-point instance") {
    PointSet ps = testutil::p5();
    InfluenceSet inf = build_influence(ps);
    check_semantics(ps, inf);
    CHECK(inf.redundant == 1);
    CHECK(inf.segments[3].empty);
    std::vector<std::uint32_t> ys;
    for (const auto& s : inf.segments) {
        if (s.empty) continue;
        CHECK(s.x_end == kOpenEnd);
        ys.push_back(s.y);
    }
    CHECK(ys == std::vector<std::uint32_t>{2, 4, 1, 3});

    CHECK(ray_shoot(inf, {3, 0}) == 2u);
    CHECK(!ray_shoot(inf, {0, 3}));
    CHECK(!ray_shoot(inf, {4, 5}));

    EntropyCode c = encode_priorities(ps);
    CHECK(c.cases.count(true) == 4);
    CHECK(c.kills.decode() == std::vector<std::uint32_t>{0, 0, 0, 0});
    CHECK(c.bit_length() <= 15);
    CHECK(decode_influence(ps.upsilon(), c) == inf);
}

TEST_CASE("staircases") {
    for (std::size_t n : {2u, 5u, 17u}) {
        // each point lies above the previous one and beats it
        PointSet kill = staircase(n, false, true);
        InfluenceSet a = build_influence(kill);
        check_semantics(kill, a);
        std::size_t finite = 0;
        for (std::uint32_t i = 0; i < n; ++i) {
            if (a.segments[i].x_end != kOpenEnd) {
                ++finite;
                CHECK(a.segments[i].x_end == i + 1);
            }
        }
        CHECK(finite == n - 1);

        PointSet rising = staircase(n, false, true);
        CHECK(count_redundant(build_influence(rising)) == 0);
        CHECK(redundant_by_queries(rising) == 0);

        PointSet beaten = staircase(n, true, false);
        CHECK(count_redundant(build_influence(beaten)) == n - 1);
        CHECK(redundant_by_queries(beaten) == n - 1);
    }
}

TEST_CASE("influence matches the definition and ray shooting, exhaustive corners") {
    std::mt19937_64 rng(31);
    for (std::size_t n : {1u, 2u, 3u, 8u, 20u, 45u, 64u}) {
        for (int rep = 0; rep < 3; ++rep) {
            PointSet ps = testutil::random_points(n, rng());
            InfluenceSet inf = build_influence(ps);
            check_semantics(ps, inf);
            CHECK(redundant_by_queries(ps) == inf.redundant);
            for (std::uint32_t x = 0; x < n; ++x) {
                for (std::uint32_t y = 0; y <= n; ++y) {
                    auto expect = brute_force_two_sided(ps, {x, y});
                    auto got = ray_shoot(inf, {x, y});
                    REQUIRE(expect.has_value() == got.has_value());
                    if (expect) REQUIRE(expect->x == *got);
                }
            }
        }
    }
}

TEST_CASE("live owners top to bottom have increasing priority") {
    std::mt19937_64 rng(41);
    for (std::size_t n : {16u, 100u, 256u}) {
        PointSet ps = testutil::random_points(n, rng());
        InfluenceSet inf = build_influence(ps);
        for (std::uint32_t x = 0; x < n; ++x) {
            std::map<std::uint32_t, std::uint32_t> live;
            for (const auto& s : inf.segments)
                if (s.covers(x)) live.emplace(s.y, ps.priority(s.owner));
            std::uint32_t prev = 0;
            bool first = true;
            for (auto it = live.rbegin(); it != live.rend(); ++it) {
                if (!first) REQUIRE(it->second > prev);
                prev = it->second;
                first = false;
            }
        }
    }
}

TEST_CASE("entropy code bounds and round trip") {
    std::mt19937_64 rng(51);
    for (int t = 0; t < 1000; ++t) {
        std::size_t n = 1 + rng() % 512;
        PointSet ps = testutil::random_points(n, rng());
        InfluenceSet inf = build_influence(ps);
        EntropyCode c = encode_influence(inf);
        REQUIRE(c.bit_length() <= 3 * n);
        REQUIRE(c.enumerative_bits() <= 3.0 * double(n));
        std::size_t kills = 0;
        for (auto k : c.kills.decode()) kills += k;
        REQUIRE(kills <= n - inf.redundant);
        REQUIRE(decode_influence(ps.upsilon(), c) == inf);
    }
}

TEST_CASE("entropy code serialization and malformed input") {
    PointSet ps = testutil::random_points(200, 9);
    EntropyCode c = encode_priorities(ps);
    ByteWriter w;
    c.serialize(w);
    ByteReader r(w.buffer());
    EntropyCode d = EntropyCode::deserialize(r);
    CHECK(d == c);

    std::vector<std::uint32_t> shorter(ps.upsilon().begin(), ps.upsilon().end() - 1);
    CHECK_THROWS_AS(decode_influence(shorter, c), FormatError);

    // too many kills for the segments below
    EntropyCode bad;
    bad.n = 2;
    bad.cases = BitVector(std::vector<bool>{true, true});
    bad.kills = UnaryStream::encode(std::vector<std::uint32_t>{0, 5});
    CHECK_THROWS_AS(decode_influence(std::vector<std::uint32_t>{0, 1}, bad), FormatError);
    // kill stream runs short
    bad.kills = UnaryStream::encode(std::vector<std::uint32_t>{0});
    CHECK_THROWS_AS(decode_influence(std::vector<std::uint32_t>{0, 1}, bad), FormatError);
}

TEST_CASE("rmq gadget examples") {
    {
        std::vector<std::int64_t> a{5};
        PointSet g = build_rmq_gadget(a, {false});
        CHECK(g.size() == 2);
        auto ans = brute_force_two_sided(g, gadget_range_corner(0, 0));
        REQUIRE(ans);
        CHECK(ans->x == 1);
    }
    std::vector<std::int64_t> a{3, 1, 2};
    {
        PointSet g = build_rmq_gadget(a, {false, false, false});
        for (std::uint32_t i = 0; i < 3; ++i) {
            for (std::uint32_t j = i; j < 3; ++j) {
                auto best = std::max_element(a.begin() + i, a.begin() + j + 1) - a.begin();
                auto ans = brute_force_two_sided(g, gadget_range_corner(i, j));
                REQUIRE(ans);
                CHECK(ans->x == best + 1);
            }
        }
    }
    {
        PointSet g = build_rmq_gadget(a, {false, true, false});
        auto ans = brute_force_two_sided(g, gadget_redundancy_corner(1));
        REQUIRE(ans);
        CHECK(ans->x == gadget_z_x());
        CHECK(brute_force_two_sided(g, gadget_redundancy_corner(0))->x == 1);
    }
}

TEST_CASE("gadget answer tables give the Catalan count") {
    std::vector<std::int64_t> a{0, 1, 2};
    std::set<std::vector<std::uint32_t>> classes, direct;
    do {
        PointSet g = build_rmq_gadget(a, {false, false, false});
        CHECK(count_redundant(build_influence(g)) == 0);
        std::vector<std::uint32_t> table, scan;
        for (std::uint32_t i = 0; i < 3; ++i) {
            for (std::uint32_t j = i; j < 3; ++j) {
                table.push_back(brute_force_two_sided(g, gadget_range_corner(i, j))->x);
                scan.push_back(static_cast<std::uint32_t>(
                    std::max_element(a.begin() + i, a.begin() + j + 1) - a.begin() + 1));
            }
        }
        CHECK(table == scan);
        classes.insert(table);
    } while (std::next_permutation(a.begin(), a.end()));
    CHECK(classes.size() == 5);
}

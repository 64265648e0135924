#include <doctest.h>

#include <algorithm>
#include <random>

#include "rangemax/slab_mapping.hpp"
#include "test_util.hpp"

using namespace rangemax;

namespace {

// node points with their local coordinates, computed by sorting
struct LocalPoint {
    Point top;
    Point local;
};

std::vector<LocalPoint> local_by_sorting(const PointSet& ps, const Box& b) {
    std::vector<Point> pts;
    for (std::uint32_t x = b.x_lo; x <= b.x_hi; ++x)
        if (ps.y_of(x) >= b.y_lo && ps.y_of(x) <= b.y_hi) pts.push_back({x, ps.y_of(x)});
    std::vector<std::uint32_t> ys;
    for (auto p : pts) ys.push_back(p.y);
    std::sort(ys.begin(), ys.end());
    std::vector<LocalPoint> out;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
        auto j = std::lower_bound(ys.begin(), ys.end(), pts[i].y) - ys.begin();
        out.push_back({pts[i], {i, static_cast<std::uint32_t>(j)}});
    }
    return out;
}

std::size_t roundtrip(const PointSet& ps, const Globals& g, const NodeHeader& h, unsigned shift) {
    std::size_t checked = 0;
    auto pts = local_by_sorting(ps, h.box);
    REQUIRE(pts.size() == h.n);
    if (h.n <= 1) return checked;
    std::uint32_t k = std::max<std::uint32_t>(1, h.n >> shift);
    for (auto axis : {SlabAxis::kVertical, SlabAxis::kHorizontal}) {
        for (std::uint32_t s = 0; s < h.n / k; ++s) {
            SlabRef slab{h, axis, s, k};
            NodeHeader child = slab_header(g, slab);
            auto cpts = local_by_sorting(ps, child.box);
            REQUIRE(cpts.size() == k);
            for (const auto& lp : pts) {
                std::uint32_t along = axis == SlabAxis::kVertical ? lp.local.x : lp.local.y;
                if (along / k != s) continue;
                REQUIRE(local_of(g, h, lp.top) == lp.local);
                Point c = slab_rank(g, slab, lp.top, lp.local);
                auto back = slab_select(g, child, QueryRect::closed(c.x, c.x, c.y, c.y), 1);
                REQUIRE(back.size() == 1);
                REQUIRE(back[0] == lp.top);
                ++checked;
            }
            checked += roundtrip(ps, g, child, shift);
        }
    }
    return checked;
}

} // namespace

TEST_CASE("slab rank on the four-point instance") {
    PointSet ps({1, 3, 0, 2}, {0, 1, 2, 3});
    Globals g(ps);
    NodeHeader root = root_header(g);

    SlabRef whole{root, SlabAxis::kVertical, 0, 4};
    CHECK(slab_rank(g, whole, {1, 3}, {1, 3}) == Point{1, 3});

    SlabRef v0{root, SlabAxis::kVertical, 0, 2};
    CHECK(slab_rank(g, v0, {1, 3}, {1, 3}) == Point{1, 1});

    SlabRef h0{root, SlabAxis::kHorizontal, 0, 2};
    CHECK(slab_rank(g, h0, {2, 0}, {2, 0}) == Point{1, 0});

    NodeHeader child = slab_header(g, h0);
    CHECK(slab_select(g, child, QueryRect::closed(0, 1, 0, 0)) == std::vector<Point>{{2, 0}});
    CHECK_THROWS_AS(slab_rank(g, h0, {1, 3}, {1, 3}), std::out_of_range);
}

TEST_CASE("slab select at the top level returns every point") {
    PointSet ps = testutil::random_points(64, 21);
    Globals g(ps);
    auto all = slab_select(g, root_header(g), QueryRect::full());
    REQUIRE(all.size() == 64);
    for (std::uint32_t x = 0; x < 64; ++x) CHECK(all[x] == Point{x, ps.y_of(x)});
}

TEST_CASE("slab select cap") {
    PointSet ps = testutil::random_points(32, 4);
    Globals g(ps);
    CHECK_THROWS_AS(slab_select(g, root_header(g), QueryRect::closed(0, 31, 0, 31), 31),
                    CapExceeded);
    CHECK(slab_select(g, root_header(g), QueryRect::closed(0, 31, 0, 31), 32).size() == 32);
}

TEST_CASE("slab rank and select round trip, every slab of every node") {
    for (std::uint32_t N : {2u, 4u, 16u, 64u, 256u}) {
        for (unsigned shift : {1u, 2u}) {
            PointSet ps = testutil::random_points(N, 7 * N + shift);
            Globals g(ps);
            std::size_t checked = roundtrip(ps, g, root_header(g), shift);
            CHECK(checked > 0);
        }
    }
}

TEST_CASE("slab select against local filter on random sub-nodes") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 300; ++t) {
        std::uint32_t N = 1u << (3 + rng() % 6);
        PointSet ps = testutil::random_points(N, rng());
        Globals g(ps);
        NodeHeader h = root_header(g);
        // descend a random path
        while (h.n > 2 && rng() % 4 != 0) {
            std::uint32_t k = h.n / 2;
            auto axis = rng() % 2 ? SlabAxis::kVertical : SlabAxis::kHorizontal;
            h = slab_header(g, {h, axis, static_cast<std::uint32_t>(rng() % 2), k});
        }
        auto pts = local_by_sorting(ps, h.box);
        std::uniform_int_distribution<Coord> d(0, Coord(h.n) - 1);
        for (int q = 0; q < 20; ++q) {
            Coord a = d(rng), b = d(rng), c = d(rng), e = d(rng);
            QueryRect r = QueryRect::closed(std::min(a, b), std::max(a, b), std::min(c, e),
                                            std::max(c, e));
            std::vector<Point> expect;
            for (const auto& lp : pts)
                if (r.contains(lp.local.x, lp.local.y)) expect.push_back(lp.top);
            REQUIRE(slab_select(g, h, r) == expect);

            QueryRect top = QueryRect::closed(std::min(a, b), std::max(a, b), std::min(c, e),
                                              std::max(c, e));
            top.x_hi = std::min<Coord>(N - 1, top.x_hi * 2);
            top.y_hi = std::min<Coord>(N - 1, top.y_hi * 2);
            QueryRect loc = localize(g, h, top);
            std::vector<Point> inside;
            for (const auto& lp : pts)
                if (top.contains(lp.top.x, lp.top.y)) inside.push_back(lp.top);
            REQUIRE(slab_select(g, h, loc) == inside);
        }
    }
}

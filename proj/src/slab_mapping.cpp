#include "rangemax/slab_mapping.hpp"

#include <string>

namespace rangemax {

namespace {

Coord clamp_lo(Coord v, Coord lo) {
    return v < lo ? lo : v;
}

Coord clamp_hi(Coord v, Coord hi) {
    return v > hi ? hi : v;
}

} // namespace

NodeHeader root_header(const Globals& g) {
    auto top = static_cast<std::uint32_t>(g.size() == 0 ? 0 : g.size() - 1);
    return {{0, top, 0, top}, static_cast<std::uint32_t>(g.size()), 0};
}

std::uint32_t top_x_of_local(const Globals& g, const NodeHeader& h, std::uint32_t t) {
    const Box& b = h.box;
    // points in the node's y-range lying left of the box
    auto z = static_cast<std::uint32_t>(
        b.x_lo == 0 ? 0 : g.range_count({0, Coord{b.x_lo} - 1, b.y_lo, b.y_hi}));
    return g.Y(g.range_select(Axis::kY, b.y_lo, b.y_hi, z + t + 1));
}

std::uint32_t top_y_of_local(const Globals& g, const NodeHeader& h, std::uint32_t t) {
    const Box& b = h.box;
    // region A: below the box, within its x-extent
    auto z = static_cast<std::uint32_t>(
        b.y_lo == 0 ? 0 : g.range_count({b.x_lo, b.x_hi, 0, Coord{b.y_lo} - 1}));
    return g.X(g.range_select(Axis::kX, b.x_lo, b.x_hi, z + t + 1));
}

Point local_of(const Globals& g, const NodeHeader& h, Point top) {
    const Box& b = h.box;
    if (!b.rect().contains(top.x, top.y)) {
        throw std::out_of_range("point (" + std::to_string(top.x) + ", " + std::to_string(top.y) +
                                ") outside node box");
    }
    auto lx = g.range_count({b.x_lo, Coord{top.x} - 1, b.y_lo, b.y_hi});
    auto ly = g.range_count({b.x_lo, b.x_hi, b.y_lo, Coord{top.y} - 1});
    return {static_cast<std::uint32_t>(lx), static_cast<std::uint32_t>(ly)};
}

NodeHeader slab_header(const Globals& g, const SlabRef& slab) {
    const NodeHeader& h = slab.node;
    std::uint32_t first = slab.index * slab.k;
    std::uint32_t last = first + slab.k - 1;
    if (slab.k == 0 || last >= h.n) {
        throw std::out_of_range("slab " + std::to_string(slab.index) + " of width " +
                                std::to_string(slab.k) + " exceeds node of size " +
                                std::to_string(h.n));
    }
    NodeHeader child{h.box, slab.k, h.level + 1};
    if (slab.axis == SlabAxis::kVertical) {
        child.box.x_lo = top_x_of_local(g, h, first);
        child.box.x_hi = top_x_of_local(g, h, last);
    } else {
        child.box.y_lo = top_y_of_local(g, h, first);
        child.box.y_hi = top_y_of_local(g, h, last);
    }
    return child;
}

Point slab_rank(const Globals& g, const SlabRef& slab, Point p_top, Point p_local) {
    std::uint32_t first = slab.index * slab.k;
    std::uint32_t along = slab.axis == SlabAxis::kVertical ? p_local.x : p_local.y;
    if (along < first || along >= first + slab.k) {
        throw std::out_of_range("local point (" + std::to_string(p_local.x) + ", " +
                                std::to_string(p_local.y) + ") not in slab " +
                                std::to_string(slab.index));
    }
    NodeHeader child = slab_header(g, slab);
    const Box& b = child.box;
    if (slab.axis == SlabAxis::kVertical) {
        auto j = g.range_count({b.x_lo, b.x_hi, b.y_lo, Coord{p_top.y} - 1});
        return {along - first, static_cast<std::uint32_t>(j)};
    }
    auto i = g.range_count({b.x_lo, Coord{p_top.x} - 1, b.y_lo, b.y_hi});
    return {static_cast<std::uint32_t>(i), along - first};
}

QueryRect localize(const Globals& g, const NodeHeader& h, const QueryRect& top) {
    const Box& b = h.box;
    QueryRect t{clamp_lo(top.x_lo, b.x_lo), clamp_hi(top.x_hi, b.x_hi), clamp_lo(top.y_lo, b.y_lo),
                clamp_hi(top.y_hi, b.y_hi)};
    if (t.empty()) {
        return {0, -1, 0, -1};
    }
    auto below_x = [&](Coord x) {
        return static_cast<Coord>(g.range_count({b.x_lo, x - 1, b.y_lo, b.y_hi}));
    };
    auto below_y = [&](Coord y) {
        return static_cast<Coord>(g.range_count({b.x_lo, b.x_hi, b.y_lo, y - 1}));
    };
    return {below_x(t.x_lo), below_x(t.x_hi + 1) - 1, below_y(t.y_lo), below_y(t.y_hi + 1) - 1};
}

QueryRect top_rect_of_local(const Globals& g, const NodeHeader& h, const QueryRect& local) {
    if (h.n == 0) {
        return {0, -1, 0, -1};
    }
    QueryRect c = local.clamped(h.n);
    if (c.empty()) {
        return {0, -1, 0, -1};
    }
    auto t = [](Coord v) { return static_cast<std::uint32_t>(v); };
    return {top_x_of_local(g, h, t(c.x_lo)), top_x_of_local(g, h, t(c.x_hi)),
            top_y_of_local(g, h, t(c.y_lo)), top_y_of_local(g, h, t(c.y_hi))};
}

void slab_select(const Globals& g, const NodeHeader& h, const QueryRect& local, std::size_t cap,
                 std::vector<Point>& out) {
    out.clear();
    QueryRect top = top_rect_of_local(g, h, local);
    if (top.empty()) {
        return;
    }
    if (cap != kNoCap) {
        std::size_t c = g.range_count(top);
        if (c > cap) {
            throw CapExceeded("slab_select: " + std::to_string(c) + " points exceed cap " +
                              std::to_string(cap));
        }
    }
    g.range_report(top, out);
}

std::vector<Point> slab_select(const Globals& g, const NodeHeader& h, const QueryRect& local,
                               std::size_t cap) {
    std::vector<Point> out;
    slab_select(g, h, local, cap, out);
    return out;
}

} // namespace rangemax

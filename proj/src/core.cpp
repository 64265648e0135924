#include "rangemax/core.hpp"

#include <algorithm>
#include <numeric>

namespace rangemax {

namespace {

std::vector<std::uint32_t> invert(const std::vector<std::uint32_t>& perm, const char* name) {
    std::vector<std::uint32_t> inv(perm.size(), std::numeric_limits<std::uint32_t>::max());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (perm[i] >= perm.size()) {
            throw std::invalid_argument(std::string(name) + " is not a permutation: value " +
                                        std::to_string(perm[i]) + " out of range at index " +
                                        std::to_string(i));
        }
        if (inv[perm[i]] != std::numeric_limits<std::uint32_t>::max()) {
            throw std::invalid_argument(std::string(name) + " is not a permutation: value " +
                                        std::to_string(perm[i]) + " repeated at indices " +
                                        std::to_string(inv[perm[i]]) + " and " + std::to_string(i));
        }
        inv[perm[i]] = static_cast<std::uint32_t>(i);
    }
    return inv;
}

// ranks of values; throws on the first pair of equal values
std::vector<std::uint32_t> ranks_of(const std::vector<double>& values, const char* name) {
    std::vector<std::uint32_t> order(values.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
    std::vector<std::uint32_t> rank(values.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (r > 0 && values[order[r - 1]] == values[order[r]]) {
            auto a = std::min(order[r - 1], order[r]);
            auto b = std::max(order[r - 1], order[r]);
            throw DuplicateValueError(std::string("duplicate ") + name + " in points " +
                                          std::to_string(a) + " and " + std::to_string(b),
                                      a, b);
        }
        rank[order[r]] = static_cast<std::uint32_t>(r);
    }
    return rank;
}

Coord flip(Coord v, std::size_t n) {
    return static_cast<Coord>(n) - 1 - v;
}

} // namespace

PointSet::PointSet(std::vector<std::uint32_t> upsilon, std::vector<std::uint32_t> pi)
    : upsilon_(std::move(upsilon)), pi_(std::move(pi)) {
    if (upsilon_.size() != pi_.size()) {
        throw std::invalid_argument("upsilon and pi differ in length");
    }
    upsilon_inv_ = invert(upsilon_, "upsilon");
    invert(pi_, "pi");
}

PointSet PointSet::identity(std::size_t n) {
    std::vector<std::uint32_t> id(n);
    std::iota(id.begin(), id.end(), 0u);
    return PointSet(id, id);
}

int QueryRect::sidedness() const {
    return (x_lo != kOpenLow) + (x_hi != kOpenHigh) + (y_lo != kOpenLow) + (y_hi != kOpenHigh);
}

QueryRect QueryRect::clamped(std::size_t n) const {
    Coord top = static_cast<Coord>(n) - 1;
    return {std::max<Coord>(x_lo, 0), std::min(x_hi, top), std::max<Coord>(y_lo, 0),
            std::min(y_hi, top)};
}

std::pair<PointSet, CoordMaps> rank_reduce(std::span<const RawPoint> raw) {
    std::vector<double> xs, ys, ps;
    xs.reserve(raw.size());
    ys.reserve(raw.size());
    ps.reserve(raw.size());
    for (const auto& p : raw) {
        xs.push_back(p.x);
        ys.push_back(p.y);
        ps.push_back(p.priority);
    }
    auto xr = ranks_of(xs, "x-coordinate");
    auto yr = ranks_of(ys, "y-coordinate");
    auto pr = ranks_of(ps, "priority");

    std::vector<std::uint32_t> upsilon(raw.size()), pi(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        upsilon[xr[i]] = yr[i];
        pi[xr[i]] = pr[i];
    }
    CoordMaps maps{std::move(xs), std::move(ys)};
    std::sort(maps.xs.begin(), maps.xs.end());
    std::sort(maps.ys.begin(), maps.ys.end());
    return {PointSet(std::move(upsilon), std::move(pi)), std::move(maps)};
}

QueryRect map_rect(const CoordMaps& maps, const RealRect& rect) {
    auto lo = [](const std::vector<double>& v, double a) {
        return static_cast<Coord>(std::lower_bound(v.begin(), v.end(), a) - v.begin());
    };
    auto hi = [](const std::vector<double>& v, double b) {
        return static_cast<Coord>(std::upper_bound(v.begin(), v.end(), b) - v.begin()) - 1;
    };
    return {lo(maps.xs, rect.x_lo), hi(maps.xs, rect.x_hi), lo(maps.ys, rect.y_lo),
            hi(maps.ys, rect.y_hi)};
}

std::optional<Candidate> brute_force_max(const PointSet& ps, const QueryRect& rect) {
    std::optional<Candidate> best;
    if (rect.empty()) {
        return best;
    }
    QueryRect r = rect.clamped(ps.size());
    for (Coord x = r.x_lo; x <= r.x_hi; ++x) {
        auto ux = static_cast<std::uint32_t>(x);
        Coord y = ps.y_of(ux);
        if (y >= r.y_lo && y <= r.y_hi && (!best || ps.priority(ux) > best->priority)) {
            best = Candidate{ux, static_cast<std::uint32_t>(y), ps.priority(ux)};
        }
    }
    return best;
}

PointSet reflect(const PointSet& ps, Orientation o) {
    std::size_t n = ps.size();
    std::vector<std::uint32_t> upsilon(n), pi(n);
    for (std::size_t x = 0; x < n; ++x) {
        std::size_t src = flips_x(o) ? n - 1 - x : x;
        std::uint32_t y = ps.y_of(static_cast<std::uint32_t>(src));
        upsilon[x] = flips_y(o) ? static_cast<std::uint32_t>(n - 1 - y) : y;
        pi[x] = ps.priority(static_cast<std::uint32_t>(src));
    }
    return PointSet(std::move(upsilon), std::move(pi));
}

QueryRect reflect(const QueryRect& rect, std::size_t n, Orientation o) {
    QueryRect out = rect;
    auto flip_side = [n](Coord lo, Coord hi, Coord& out_lo, Coord& out_hi) {
        out_lo = hi == kOpenHigh ? kOpenLow : flip(hi, n);
        out_hi = lo == kOpenLow ? kOpenHigh : flip(lo, n);
    };
    if (flips_x(o)) {
        flip_side(rect.x_lo, rect.x_hi, out.x_lo, out.x_hi);
    }
    if (flips_y(o)) {
        flip_side(rect.y_lo, rect.y_hi, out.y_lo, out.y_hi);
    }
    return out;
}

Candidate reflect(const Candidate& c, std::size_t n, Orientation o) {
    Candidate out = c;
    if (flips_x(o)) {
        out.x = static_cast<std::uint32_t>(n - 1 - c.x);
    }
    if (flips_y(o)) {
        out.y = static_cast<std::uint32_t>(n - 1 - c.y);
    }
    return out;
}

} // namespace rangemax

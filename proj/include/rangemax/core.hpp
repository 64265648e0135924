#ifndef RANGEMAX_CORE_HPP
#define RANGEMAX_CORE_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rangemax {

// Rank coordinates are small non-negative integers; a signed 64-bit carrier
// leaves room for the open-side sentinels below.
using Coord = std::int64_t;

inline constexpr Coord kOpenLow = std::numeric_limits<std::int32_t>::min();
inline constexpr Coord kOpenHigh = std::numeric_limits<std::int32_t>::max();

struct Point {
    std::uint32_t x = 0;
    std::uint32_t y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

/*
 * A point set in rank space: point i is (i, upsilon[i]) with priority pi[i].
 * Both arrays must be permutations of [0, n).
 */
class PointSet {
public:
    PointSet() = default;
    PointSet(std::vector<std::uint32_t> upsilon, std::vector<std::uint32_t> pi);

    static PointSet identity(std::size_t n);

    std::size_t size() const { return upsilon_.size(); }
    bool empty() const { return upsilon_.empty(); }

    std::uint32_t y_of(std::uint32_t x) const { return upsilon_[x]; }
    std::uint32_t x_of(std::uint32_t y) const { return upsilon_inv_[y]; }
    std::uint32_t priority(std::uint32_t x) const { return pi_[x]; }

    const std::vector<std::uint32_t>& upsilon() const { return upsilon_; }
    const std::vector<std::uint32_t>& pi() const { return pi_; }

    friend bool operator==(const PointSet& a, const PointSet& b) {
        return a.upsilon_ == b.upsilon_ && a.pi_ == b.pi_;
    }

private:
    std::vector<std::uint32_t> upsilon_;
    std::vector<std::uint32_t> pi_;
    std::vector<std::uint32_t> upsilon_inv_;
};

/*
 * Axis-aligned query rectangle with inclusive bounds. A side equal to
 * kOpenLow / kOpenHigh is unbounded.
 */
struct QueryRect {
    Coord x_lo = kOpenLow;
    Coord x_hi = kOpenHigh;
    Coord y_lo = kOpenLow;
    Coord y_hi = kOpenHigh;

    static QueryRect full() { return {}; }
    static QueryRect closed(Coord x_lo, Coord x_hi, Coord y_lo, Coord y_hi) {
        return {x_lo, x_hi, y_lo, y_hi};
    }

    // number of bounded sides, 0..4
    int sidedness() const;
    bool empty() const { return x_lo > x_hi || y_lo > y_hi; }
    bool contains(Coord x, Coord y) const {
        return x_lo <= x && x <= x_hi && y_lo <= y && y <= y_hi;
    }
    // intersection with [0, n) x [0, n); open sides become edges
    QueryRect clamped(std::size_t n) const;

    friend bool operator==(const QueryRect&, const QueryRect&) = default;
};

struct Candidate {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t priority = 0;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

// keeps the higher-priority of two optional candidates
inline void keep_best(std::optional<Candidate>& best, const std::optional<Candidate>& c) {
    if (c && (!best || c->priority > best->priority)) {
        best = c;
    }
}

struct RawPoint {
    double x = 0.0;
    double y = 0.0;
    double priority = 0.0;
};

struct RealRect {
    double x_lo = -std::numeric_limits<double>::infinity();
    double x_hi = std::numeric_limits<double>::infinity();
    double y_lo = -std::numeric_limits<double>::infinity();
    double y_hi = std::numeric_limits<double>::infinity();
};

// Sorted original coordinates, used to map real query rectangles into rank space.
struct CoordMaps {
    std::vector<double> xs;
    std::vector<double> ys;
};

class DuplicateValueError : public std::invalid_argument {
public:
    DuplicateValueError(const std::string& what, std::size_t first, std::size_t second)
        : std::invalid_argument(what), first_(first), second_(second) {}
    std::size_t first() const { return first_; }
    std::size_t second() const { return second_; }

private:
    std::size_t first_;
    std::size_t second_;
};

std::pair<PointSet, CoordMaps> rank_reduce(std::span<const RawPoint> raw);

QueryRect map_rect(const CoordMaps& maps, const RealRect& rect);

std::optional<Candidate> brute_force_max(const PointSet& ps, const QueryRect& rect);

enum class Orientation : std::uint8_t {
    kIdentity = 0,
    kFlipX = 1,
    kFlipY = 2,
    kFlipXY = 3,
};

inline bool flips_x(Orientation o) { return (static_cast<int>(o) & 1) != 0; }
inline bool flips_y(Orientation o) { return (static_cast<int>(o) & 2) != 0; }

PointSet reflect(const PointSet& ps, Orientation o);
QueryRect reflect(const QueryRect& rect, std::size_t n, Orientation o);
Candidate reflect(const Candidate& c, std::size_t n, Orientation o);

} // namespace rangemax

#endif

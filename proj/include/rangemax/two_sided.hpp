#ifndef RANGEMAX_TWO_SIDED_HPP
#define RANGEMAX_TWO_SIDED_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "rangemax/bit_vector.hpp"
#include "rangemax/core.hpp"
#include "rangemax/globals.hpp"
#include "rangemax/influence.hpp"
#include "rangemax/serialize.hpp"
#include "rangemax/slab_mapping.hpp"

namespace rangemax {

/*
 * Access to the points of one problem. Rectangles are given in the
 * problem's oriented local coordinates; the answer is the matching
 * top-level points in increasing top-level x. Callers never ask for more
 * than cap() points at once.
 */
class PointProvider {
public:
    virtual ~PointProvider() = default;
    virtual void report(const QueryRect& local, std::vector<Point>& out) const = 0;
    virtual std::size_t cap() const = 0;
};

// Points listed explicitly; local and top-level coordinates coincide.
class DirectProvider : public PointProvider {
public:
    DirectProvider(const PointSet& ps, std::size_t cap = kNoCap);
    void report(const QueryRect& local, std::vector<Point>& out) const override;
    std::size_t cap() const override { return cap_; }

private:
    std::vector<std::uint32_t> y_by_x_;
    std::size_t cap_;
};

// Reporter over the global structures of the whole point set.
class GlobalsProvider : public PointProvider {
public:
    GlobalsProvider(const Globals& g, std::size_t cap = kNoCap) : g_(g), cap_(cap) {}
    void report(const QueryRect& local, std::vector<Point>& out) const override;
    std::size_t cap() const override { return cap_; }

private:
    const Globals& g_;
    std::size_t cap_;
};

// A recursive problem seen through one orientation, via slab_select.
class NodeProvider : public PointProvider {
public:
    NodeProvider(const Globals& g, const NodeHeader& h, Orientation o, std::size_t cap)
        : g_(g), h_(h), o_(o), cap_(cap) {}
    void report(const QueryRect& local, std::vector<Point>& out) const override;
    std::size_t cap() const override { return cap_; }

private:
    const Globals& g_;
    NodeHeader h_;
    Orientation o_;
    std::size_t cap_;
};

inline constexpr std::uint32_t kNoSegment = std::numeric_limits<std::uint32_t>::max();

struct SkeletonSegment {
    std::uint32_t y = 0;
    std::uint32_t x_start = 0;
    std::uint32_t x_end = kOpenEnd;

    friend bool operator==(const SkeletonSegment&, const SkeletonSegment&) = default;
};

/*
 * Region [xa, xb] x (yb, yt] in oriented local coordinates. A point on the
 * selected segment forming the top edge belongs to this region.
 */
struct Region {
    std::uint32_t xa = 0;
    std::uint32_t xb = 0;
    std::int64_t yb = -1;
    std::uint32_t yt = 0;
    std::uint32_t top = kNoSegment;  // index into the selected segments

    QueryRect box() const { return {xa, xb, yb + 1, yt}; }
    bool contains(Point q) const {
        return xa <= q.x && q.x <= xb && yb < Coord{q.y} && q.y <= yt;
    }
    friend bool operator==(const Region&, const Region&) = default;
};

struct NeighborRef {
    std::uint32_t region = 0;
    std::uint32_t reciprocal = 0;  // position of the owning region in region's right list

    friend bool operator==(const NeighborRef&, const NeighborRef&) = default;
};

/*
 * Selected segments T', the regions they induce, the left-neighbor table
 * and a point-location index rebuilt on load.
 */
class Skeleton {
public:
    std::uint32_t n = 0;
    std::uint32_t lambda = 1;
    std::uint32_t walls = 0;
    std::vector<SkeletonSegment> selected;
    std::vector<Region> regions;
    std::vector<std::uint32_t> left_offsets;  // size regions + 1
    std::vector<NeighborRef> left_neighbors;

    std::size_t t_prime() const { return selected.size() + walls; }
    std::uint32_t locate(Point q) const;
    void build_locator();

    std::size_t left_count(std::uint32_t r) const { return left_offsets[r + 1] - left_offsets[r]; }

    void serialize(ByteWriter& out) const;
    static Skeleton deserialize(ByteReader& in);

    friend bool operator==(const Skeleton& a, const Skeleton& b) {
        return a.n == b.n && a.lambda == b.lambda && a.walls == b.walls &&
               a.selected == b.selected && a.regions == b.regions &&
               a.left_offsets == b.left_offsets && a.left_neighbors == b.left_neighbors;
    }

private:
    // segment tree over columns; each node lists selected ids by increasing y
    std::size_t leaves_ = 1;
    std::vector<std::vector<std::uint32_t>> tree_;
    // regions grouped by top segment (last group: no top), each by xa
    std::vector<std::vector<std::uint32_t>> by_top_;
};

struct TwoSidedBudget {
    std::size_t n = 0;
    std::size_t lambda = 0;
    std::size_t regions = 0;
    std::size_t t_prime = 0;
    std::size_t max_points = 0;
    std::size_t max_parts = 0;
    std::size_t item_bits[5] = {0, 0, 0, 0, 0};
    std::size_t item2_ones = 0;
    std::size_t item2_zeros = 0;
    std::size_t record_width = 0;
    std::size_t records = 0;

    static constexpr std::size_t kC = 4;

    bool points_ok() const { return max_points <= kC * lambda; }
    bool parts_ok() const { return max_parts <= kC * lambda; }
    bool t_prime_ok() const { return t_prime * lambda <= kC * n; }
    bool items135_ok() const { return item_bits[0] + item_bits[2] + item_bits[4] <= 8 * n; }
    bool item2_ok() const { return item2_ones * lambda <= 4 * n && item2_zeros <= 4 * n; }
    bool item4_ok() const { return item_bits[3] * lambda <= 8 * n * record_width; }
    bool ok() const {
        return points_ok() && parts_ok() && t_prime_ok() && items135_ok() && item2_ok() &&
               item4_ok();
    }
    std::size_t payload_bits() const {
        return item_bits[0] + item_bits[1] + item_bits[2] + item_bits[3] + item_bits[4];
    }
};

struct TwoSidedStats {
    std::size_t provider_calls = 0;
    std::size_t max_batch = 0;
    std::size_t probes = 0;
    std::size_t max_probes = 0;
    std::size_t hops = 0;
    std::size_t max_hops = 0;
    std::size_t waypoint_jumps = 0;
};

// Build-time ground truth for tests; never serialized.
struct TwoSidedDebug {
    std::vector<std::vector<std::uint32_t>> left_owners;  // per region, top-down
    std::vector<std::vector<std::uint32_t>> points;       // per region, x order
    std::vector<std::vector<std::uint32_t>> right_owners; // per region, top-down
};

// Owner of a segment: either top-level coordinates or local ones.
struct ResolvedOwner {
    bool has_top = false;
    Point top;
    Point local;
};

/*
 * Succinct 2-sided structure over one oriented problem: answers the query
 * {x <= qx, y >= qy} in the problem's oriented local coordinates without
 * storing priorities. Top-level keys for comparisons are x or -x and y or
 * -y depending on the orientation.
 */
class TwoSidedIndex {
public:
    TwoSidedIndex() = default;

    static TwoSidedIndex build(const PointSet& oriented, std::uint32_t lambda, Orientation o,
                               TwoSidedDebug* debug = nullptr);

    static std::uint32_t default_lambda(std::size_t n);

    std::size_t size() const { return sk_.n; }
    std::uint32_t lambda() const { return sk_.lambda; }
    Orientation orientation() const { return orientation_; }
    const Skeleton& skeleton() const { return sk_; }
    const TwoSidedBudget& budget() const { return budget_; }
    std::size_t required_cap() const { return TwoSidedBudget::kC * sk_.lambda; }

    std::uint32_t locate_region(Point q) const { return sk_.locate(q); }

    // q is the local corner; kx, ky are its top-level keys
    std::optional<Point> query(const PointProvider& prov, Point q, Coord kx, Coord ky,
                               TwoSidedStats* stats = nullptr) const;
    // for providers whose local and top-level coordinates coincide
    std::optional<Point> query(const PointProvider& prov, Point q,
                               TwoSidedStats* stats = nullptr) const;

    // owner of the i-th (top-down) Left segment of region r
    ResolvedOwner resolve_left_segment(const PointProvider& prov, std::uint32_t r, std::size_t i,
                                       TwoSidedStats* stats = nullptr) const;

    struct LocalSegment {
        bool from_left = false;
        std::uint32_t index = 0;  // Left index, or position in the provider's x-ordered list
        bool alive_at_end = false;
        std::optional<std::uint32_t> killer;  // x-ordered index of the killing point
        bool empty = false;
    };
    // step (b): segments of P(R) and Left(R) top-down, with their fate inside R
    std::vector<LocalSegment> reconstruct_local(std::uint32_t r,
                                                const std::vector<Point>& pr) const;

    std::size_t left_size(std::uint32_t r) const;
    std::size_t point_count(std::uint32_t r) const;
    std::size_t right_size(std::uint32_t r) const;

    // bits of the offset tables and waypoint records
    std::size_t offset_bits() const;
    // rank/select directories of the payload bit vectors (in memory only)
    std::size_t directory_bits() const;

    void serialize(ByteWriter& out) const;
    static TwoSidedIndex deserialize(ByteReader& in);

    friend bool operator==(const TwoSidedIndex& a, const TwoSidedIndex& b);

private:
    Coord key_x(Point p) const { return flips_x(orientation_) ? -Coord{p.x} : Coord{p.x}; }
    Coord key_y(Point p) const { return flips_y(orientation_) ? -Coord{p.y} : Coord{p.y}; }

    void fetch(const PointProvider& prov, const QueryRect& rect, std::vector<Point>& out,
               TwoSidedStats* stats) const;
    void order_by_y(const std::vector<Point>& pr, std::vector<std::uint32_t>& by_y) const;
    Point to_top(const PointProvider& prov, Point local, TwoSidedStats* stats) const;
    void compute_budget();

    Orientation orientation_ = Orientation::kIdentity;
    Skeleton sk_;
    // payload (1): aligned with payload (3); 1 = the segment terminates in R
    BitVector item1_;
    // payload (2): left unary then right unary
    BitVector item2_;
    // payload (3): top-down merge of P(R) (1) and Left(R) (0)
    BitVector item3_;
    // payload (4): one bit per Right entry, set if a waypoint record exists
    BitVector item4_;
    PackedInts records_;  // (region, u, v) triples
    // payload (5): per point in x order, case bit then unary kill count
    BitVector item5_;
    PackedInts off2_, off3_, off4_, off5_;  // item (1) shares off3_
    TwoSidedBudget budget_;
};

} // namespace rangemax

#endif

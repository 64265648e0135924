#ifndef RANGEMAX_SLAB_MAPPING_HPP
#define RANGEMAX_SLAB_MAPPING_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "rangemax/core.hpp"
#include "rangemax/globals.hpp"

namespace rangemax {

// Inclusive top-level bounding box.
struct Box {
    std::uint32_t x_lo = 0;
    std::uint32_t x_hi = 0;
    std::uint32_t y_lo = 0;
    std::uint32_t y_hi = 0;

    QueryRect rect() const { return {x_lo, x_hi, y_lo, y_hi}; }
    friend bool operator==(const Box&, const Box&) = default;
};

/*
 * Header of a recursive problem: its points are exactly the top-level
 * points inside `box`, and there are n of them.
 */
struct NodeHeader {
    Box box;
    std::uint32_t n = 0;
    std::uint32_t level = 0;

    friend bool operator==(const NodeHeader&, const NodeHeader&) = default;
};

NodeHeader root_header(const Globals& g);

enum class SlabAxis : std::uint8_t { kVertical = 0, kHorizontal = 1 };

struct SlabRef {
    NodeHeader node;
    SlabAxis axis = SlabAxis::kVertical;
    std::uint32_t index = 0;
    std::uint32_t k = 0;
};

// top-level x (resp. y) of the point with local x (resp. y) rank t in the node
std::uint32_t top_x_of_local(const Globals& g, const NodeHeader& h, std::uint32_t t);
std::uint32_t top_y_of_local(const Globals& g, const NodeHeader& h, std::uint32_t t);

// local coordinates of a top-level point of the node
Point local_of(const Globals& g, const NodeHeader& h, Point top);

// header of the child problem formed by one slab
NodeHeader slab_header(const Globals& g, const SlabRef& slab);

Point slab_rank(const Globals& g, const SlabRef& slab, Point p_top, Point p_local);

// local rectangle (possibly empty) covering the node points inside a top-level rect
QueryRect localize(const Globals& g, const NodeHeader& h, const QueryRect& top);

// top-level rectangle holding exactly the node points whose local image lies in r
QueryRect top_rect_of_local(const Globals& g, const NodeHeader& h, const QueryRect& local);

inline constexpr std::size_t kNoCap = std::numeric_limits<std::size_t>::max();

class CapExceeded : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// top-level points of the node whose local image lies in `local`, in increasing x
void slab_select(const Globals& g, const NodeHeader& h, const QueryRect& local, std::size_t cap,
                 std::vector<Point>& out);
std::vector<Point> slab_select(const Globals& g, const NodeHeader& h, const QueryRect& local,
                               std::size_t cap = kNoCap);

} // namespace rangemax

#endif

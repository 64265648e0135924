#ifndef RANGEMAX_INFLUENCE_HPP
#define RANGEMAX_INFLUENCE_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rangemax/bit_vector.hpp"
#include "rangemax/core.hpp"

namespace rangemax {

// All functions here assume the 2-sided query region {x <= qx, y >= qy}.

inline constexpr std::uint32_t kOpenEnd = std::numeric_limits<std::uint32_t>::max();

/*
 * Inf(p): the corners q with y(q) = y(p), x(p) <= x(q) < x_end whose
 * answer is p. Empty segments have x_end == x_start.
 */
struct InfluenceSegment {
    std::uint32_t owner = 0;
    std::uint32_t y = 0;
    std::uint32_t x_start = 0;
    std::uint32_t x_end = kOpenEnd;
    bool empty = false;

    bool covers(std::uint32_t x) const { return !empty && x_start <= x && x < x_end; }
    friend bool operator==(const InfluenceSegment&, const InfluenceSegment&) = default;
};

struct InfluenceSet {
    std::vector<InfluenceSegment> segments;  // indexed by owner (= x_start)
    std::size_t redundant = 0;
    // kill count of each point, in x order
    std::vector<std::uint32_t> kills;

    std::size_t size() const { return segments.size(); }
    friend bool operator==(const InfluenceSet& a, const InfluenceSet& b) {
        return a.segments == b.segments && a.redundant == b.redundant;
    }
};

InfluenceSet build_influence(const PointSet& ps);

// owner of the lowest segment with y >= qy covering qx
std::optional<std::uint32_t> ray_shoot(const InfluenceSet& inf, Point q);

std::size_t count_redundant(const InfluenceSet& inf);

struct EntropyCode {
    std::size_t n = 0;
    std::size_t redundant = 0;
    BitVector cases;     // 1 = non-empty influence
    UnaryStream kills;   // one code per non-empty point

    std::size_t bit_length() const { return cases.size() + kills.bit_size(); }
    // 2(n-r) + ceil(log2 C(n, r)), the enumerative-coding figure
    double enumerative_bits() const;

    void serialize(ByteWriter& out) const;
    static EntropyCode deserialize(ByteReader& in);
    friend bool operator==(const EntropyCode&, const EntropyCode&) = default;
};

EntropyCode encode_priorities(const PointSet& ps);
EntropyCode encode_influence(const InfluenceSet& inf);

// y-coordinates indexed by x; priorities are not needed
InfluenceSet decode_influence(std::span<const std::uint32_t> y_by_x, const EntropyCode& code);

/*
 * Points for the 1D range-maximum-with-redundant-entries reduction:
 * entry l sits at (l + 1, l), the dominating point z at (0, n).
 */
PointSet build_rmq_gadget(std::span<const std::int64_t> a, const std::vector<bool>& redundant);

// corners for the gadget: range [i, j] and the redundancy test of entry i
inline Point gadget_range_corner(std::uint32_t i, std::uint32_t j) { return {j + 1, i}; }
inline Point gadget_redundancy_corner(std::uint32_t i) { return {i + 1, i}; }
inline std::uint32_t gadget_z_x() { return 0; }

// brute-force answer to the 2-sided query at q
std::optional<Candidate> brute_force_two_sided(const PointSet& ps, Point q);

} // namespace rangemax

#endif

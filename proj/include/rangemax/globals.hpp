#ifndef RANGEMAX_GLOBALS_HPP
#define RANGEMAX_GLOBALS_HPP

#include <cstdint>
#include <vector>

#include "rangemax/bit_vector.hpp"
#include "rangemax/core.hpp"
#include "rangemax/serialize.hpp"

namespace rangemax {

/*
 * Wavelet matrix over a sequence of values in [0, sigma). Level l holds
 * bit (bits-1-l) of every value, stably partitioned zeros-first by the
 * previous levels.
 */
class WaveletMatrix {
public:
    WaveletMatrix() = default;
    WaveletMatrix(const std::vector<std::uint32_t>& values, std::uint32_t sigma);

    std::size_t size() const { return size_; }
    unsigned levels() const { return static_cast<unsigned>(levels_.size()); }

    // number of positions i in [lo, hi) with value < bound
    std::size_t count_less(std::size_t lo, std::size_t hi, std::uint64_t bound) const;
    // number of positions i in [lo, hi) with value in [vlo, vhi)
    std::size_t count_range(std::size_t lo, std::size_t hi, std::uint64_t vlo,
                            std::uint64_t vhi) const;
    // k-th smallest (k >= 1) value among positions [lo, hi)
    std::uint32_t quantile(std::size_t lo, std::size_t hi, std::size_t k) const;
    // all values in [vlo, vhi) among positions [lo, hi), ascending
    void values_in(std::size_t lo, std::size_t hi, std::uint64_t vlo, std::uint64_t vhi,
                   std::vector<std::uint32_t>& out) const;

    std::size_t bit_size() const;
    std::size_t directory_bits() const;

    void serialize(ByteWriter& out) const;
    static WaveletMatrix deserialize(ByteReader& in);

    friend bool operator==(const WaveletMatrix& a, const WaveletMatrix& b) {
        return a.size_ == b.size_ && a.levels_ == b.levels_ && a.zeros_ == b.zeros_;
    }

private:
    void collect(unsigned level, std::size_t lo, std::size_t hi, std::uint64_t prefix,
                 std::uint64_t vlo, std::uint64_t vhi, std::vector<std::uint32_t>& out) const;

    std::size_t size_ = 0;
    std::vector<BitVector> levels_;
    std::vector<std::uint64_t> zeros_;
};

enum class Axis : std::uint8_t { kX = 0, kY = 1 };

/*
 * Point set stored once for counting, reporting and selection:
 * X[i] = y of the point with x = i, Y[j] = x of the point with y = j.
 */
class Globals {
public:
    Globals() = default;
    explicit Globals(const PointSet& ps);

    std::size_t size() const { return n_; }

    std::uint32_t X(std::uint32_t i) const { return static_cast<std::uint32_t>(x_to_y_[i]); }
    std::uint32_t Y(std::uint32_t j) const { return static_cast<std::uint32_t>(y_to_x_[j]); }
    std::uint32_t priority(std::uint32_t x) const { return static_cast<std::uint32_t>(pri_[x]); }
    Candidate candidate(std::uint32_t x) const { return {x, X(x), priority(x)}; }

    std::size_t range_count(const QueryRect& r) const;
    std::vector<Point> range_report(const QueryRect& r) const;
    void range_report(const QueryRect& r, std::vector<Point>& out) const;

    // index in [i, j] holding the k-th smallest of A[i..j], A = X or Y; k >= 1
    std::uint32_t range_select(Axis axis, std::uint32_t i, std::uint32_t j, std::uint32_t k) const;

    PointSet to_point_set() const;

    const WaveletMatrix& wavelet() const { return wm_; }
    std::size_t array_bits() const {
        return x_to_y_.bit_size() + y_to_x_.bit_size() + pri_.bit_size();
    }

    void serialize(ByteWriter& out) const;
    static Globals deserialize(ByteReader& in);

    friend bool operator==(const Globals& a, const Globals& b) {
        return a.n_ == b.n_ && a.x_to_y_ == b.x_to_y_ && a.y_to_x_ == b.y_to_x_ &&
               a.pri_ == b.pri_ && a.wm_ == b.wm_;
    }

private:
    std::size_t n_ = 0;
    PackedInts x_to_y_;
    PackedInts y_to_x_;
    PackedInts pri_;
    WaveletMatrix wm_;
};

} // namespace rangemax

#endif

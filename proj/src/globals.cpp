#include "rangemax/globals.hpp"

#include <algorithm>
#include <bit>

namespace rangemax {

WaveletMatrix::WaveletMatrix(const std::vector<std::uint32_t>& values, std::uint32_t sigma)
    : size_(values.size()) {
    unsigned bits = sigma <= 1 ? 1u : static_cast<unsigned>(std::bit_width(sigma - 1));
    std::vector<std::uint32_t> cur = values, next(values.size());
    for (unsigned l = 0; l < bits; ++l) {
        unsigned shift = bits - 1 - l;
        BitBuilder b;
        std::size_t z = 0;
        for (auto v : cur) {
            bool bit = (v >> shift) & 1u;
            b.push_back(bit);
            z += !bit;
        }
        levels_.emplace_back(std::move(b));
        zeros_.push_back(z);
        std::size_t zi = 0, oi = z;
        for (auto v : cur) {
            if ((v >> shift) & 1u) {
                next[oi++] = v;
            } else {
                next[zi++] = v;
            }
        }
        cur.swap(next);
    }
}

std::size_t WaveletMatrix::count_less(std::size_t lo, std::size_t hi, std::uint64_t bound) const {
    if (lo >= hi) {
        return 0;
    }
    unsigned bits = levels();
    if (bound >= (std::uint64_t{1} << bits)) {
        return hi - lo;
    }
    std::size_t res = 0;
    for (unsigned l = 0; l < bits; ++l) {
        const BitVector& bv = levels_[l];
        bool bit = (bound >> (bits - 1 - l)) & 1u;
        std::size_t lo1 = bv.rank1(lo), hi1 = bv.rank1(hi);
        if (bit) {
            res += (hi - lo) - (hi1 - lo1);
            lo = zeros_[l] + lo1;
            hi = zeros_[l] + hi1;
        } else {
            lo -= lo1;
            hi -= hi1;
        }
    }
    return res;
}

std::size_t WaveletMatrix::count_range(std::size_t lo, std::size_t hi, std::uint64_t vlo,
                                       std::uint64_t vhi) const {
    if (vlo >= vhi) {
        return 0;
    }
    return count_less(lo, hi, vhi) - count_less(lo, hi, vlo);
}

std::uint32_t WaveletMatrix::quantile(std::size_t lo, std::size_t hi, std::size_t k) const {
    if (k == 0 || lo + k > hi) {
        throw std::out_of_range("quantile ordinal " + std::to_string(k) + " outside range of " +
                                std::to_string(hi > lo ? hi - lo : 0));
    }
    std::uint32_t v = 0;
    unsigned bits = levels();
    for (unsigned l = 0; l < bits; ++l) {
        const BitVector& bv = levels_[l];
        std::size_t lo1 = bv.rank1(lo), hi1 = bv.rank1(hi);
        std::size_t z = (hi - lo) - (hi1 - lo1);
        if (k <= z) {
            lo -= lo1;
            hi -= hi1;
        } else {
            k -= z;
            v |= std::uint32_t{1} << (bits - 1 - l);
            lo = zeros_[l] + lo1;
            hi = zeros_[l] + hi1;
        }
    }
    return v;
}

void WaveletMatrix::collect(unsigned level, std::size_t lo, std::size_t hi, std::uint64_t prefix,
                            std::uint64_t vlo, std::uint64_t vhi,
                            std::vector<std::uint32_t>& out) const {
    if (lo >= hi) {
        return;
    }
    unsigned bits = levels();
    unsigned shift = bits - level;
    // prefix covers [prefix << shift, (prefix + 1) << shift)
    std::uint64_t first = prefix << shift, last = (prefix + 1) << shift;
    if (last <= vlo || first >= vhi) {
        return;
    }
    if (level == bits) {
        out.insert(out.end(), hi - lo, static_cast<std::uint32_t>(prefix));
        return;
    }
    const BitVector& bv = levels_[level];
    std::size_t lo1 = bv.rank1(lo), hi1 = bv.rank1(hi);
    collect(level + 1, lo - lo1, hi - hi1, prefix << 1, vlo, vhi, out);
    collect(level + 1, zeros_[level] + lo1, zeros_[level] + hi1, (prefix << 1) | 1u, vlo, vhi, out);
}

void WaveletMatrix::values_in(std::size_t lo, std::size_t hi, std::uint64_t vlo,
                              std::uint64_t vhi, std::vector<std::uint32_t>& out) const {
    if (vlo < vhi) {
        collect(0, lo, hi, 0, vlo, vhi, out);
    }
}

std::size_t WaveletMatrix::bit_size() const {
    std::size_t s = 0;
    for (const auto& l : levels_) {
        s += l.size();
    }
    return s;
}

std::size_t WaveletMatrix::directory_bits() const {
    std::size_t s = 0;
    for (const auto& l : levels_) {
        s += l.directory_bits();
    }
    return s;
}

void WaveletMatrix::serialize(ByteWriter& out) const {
    out.u64(size_);
    out.u32(static_cast<std::uint32_t>(levels_.size()));
    for (std::size_t l = 0; l < levels_.size(); ++l) {
        out.u64(zeros_[l]);
        levels_[l].serialize(out);
    }
}

WaveletMatrix WaveletMatrix::deserialize(ByteReader& in) {
    WaveletMatrix wm;
    wm.size_ = in.u64();
    std::uint32_t levels = in.u32();
    if (levels > 32) {
        throw FormatError("wavelet matrix level count " + std::to_string(levels) + " too large");
    }
    for (std::uint32_t l = 0; l < levels; ++l) {
        wm.zeros_.push_back(in.u64());
        wm.levels_.push_back(BitVector::deserialize(in));
        if (wm.levels_.back().size() != wm.size_ || wm.zeros_.back() != wm.levels_.back().count(false)) {
            throw FormatError("wavelet matrix level " + std::to_string(l) + " is inconsistent");
        }
    }
    return wm;
}

Globals::Globals(const PointSet& ps) : n_(ps.size()) {
    std::vector<std::uint32_t> inv(n_);
    for (std::uint32_t x = 0; x < n_; ++x) {
        inv[ps.y_of(x)] = x;
    }
    x_to_y_ = PackedInts(std::span<const std::uint32_t>(ps.upsilon()));
    y_to_x_ = PackedInts(std::span<const std::uint32_t>(inv));
    pri_ = PackedInts(std::span<const std::uint32_t>(ps.pi()));
    wm_ = WaveletMatrix(ps.upsilon(), static_cast<std::uint32_t>(n_));
}

std::size_t Globals::range_count(const QueryRect& r) const {
    if (r.empty() || n_ == 0) {
        return 0;
    }
    QueryRect c = r.clamped(n_);
    if (c.empty()) {
        return 0;
    }
    return wm_.count_range(static_cast<std::size_t>(c.x_lo), static_cast<std::size_t>(c.x_hi) + 1,
                           static_cast<std::uint64_t>(c.y_lo),
                           static_cast<std::uint64_t>(c.y_hi) + 1);
}

void Globals::range_report(const QueryRect& r, std::vector<Point>& out) const {
    out.clear();
    if (r.empty() || n_ == 0) {
        return;
    }
    QueryRect c = r.clamped(n_);
    if (c.empty()) {
        return;
    }
    std::vector<std::uint32_t> ys;
    wm_.values_in(static_cast<std::size_t>(c.x_lo), static_cast<std::size_t>(c.x_hi) + 1,
                  static_cast<std::uint64_t>(c.y_lo), static_cast<std::uint64_t>(c.y_hi) + 1, ys);
    out.reserve(ys.size());
    for (auto y : ys) {
        out.push_back({Y(y), y});
    }
    std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
}

std::vector<Point> Globals::range_report(const QueryRect& r) const {
    std::vector<Point> out;
    range_report(r, out);
    return out;
}

std::uint32_t Globals::range_select(Axis axis, std::uint32_t i, std::uint32_t j,
                                    std::uint32_t k) const {
    if (i > j || j >= n_) {
        throw std::out_of_range("range_select indices [" + std::to_string(i) + ", " +
                                std::to_string(j) + "] invalid for n = " + std::to_string(n_));
    }
    if (k == 0 || k > j - i + 1) {
        throw std::out_of_range("range_select ordinal " + std::to_string(k) + " outside [1, " +
                                std::to_string(j - i + 1) + "]");
    }
    if (axis == Axis::kX) {
        return Y(wm_.quantile(i, std::size_t{j} + 1, k));
    }
    // smallest x-value m with k points of y in [i, j] at x <= m
    std::uint32_t lo = 0, hi = static_cast<std::uint32_t>(n_ - 1);
    while (lo < hi) {
        std::uint32_t mid = lo + (hi - lo) / 2;
        if (wm_.count_range(0, std::size_t{mid} + 1, i, std::uint64_t{j} + 1) >= k) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return X(lo);
}

PointSet Globals::to_point_set() const {
    std::vector<std::uint32_t> ups(n_), pi(n_);
    for (std::uint32_t x = 0; x < n_; ++x) {
        ups[x] = X(x);
        pi[x] = priority(x);
    }
    return PointSet(std::move(ups), std::move(pi));
}

void Globals::serialize(ByteWriter& out) const {
    out.u64(n_);
    x_to_y_.serialize(out);
    y_to_x_.serialize(out);
    pri_.serialize(out);
    wm_.serialize(out);
}

Globals Globals::deserialize(ByteReader& in) {
    Globals g;
    g.n_ = in.u64();
    g.x_to_y_ = PackedInts::deserialize(in);
    g.y_to_x_ = PackedInts::deserialize(in);
    g.pri_ = PackedInts::deserialize(in);
    g.wm_ = WaveletMatrix::deserialize(in);
    if (g.x_to_y_.size() != g.n_ || g.y_to_x_.size() != g.n_ || g.pri_.size() != g.n_ ||
        g.wm_.size() != g.n_) {
        throw FormatError("globals arrays disagree with point count " + std::to_string(g.n_));
    }
    try {
        (void)g.to_point_set();
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("globals: ") + e.what());
    }
    return g;
}

} // namespace rangemax

#include "rangemax/bit_vector.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace rangemax {

namespace {

std::size_t words_for(std::size_t bits) {
    return (bits + 63) / 64;
}

// position of the j-th (1-based) set bit of w
unsigned select_in_word(std::uint64_t w, std::size_t j) {
    for (std::size_t i = 1; i < j; ++i) {
        w &= w - 1;
    }
    return static_cast<unsigned>(std::countr_zero(w));
}

// position of the j-th set (or clear, if `zeros`) bit at or after word `from`
std::size_t scan_select(const std::vector<std::uint64_t>& words, std::size_t from, std::size_t j,
                        bool zeros) {
    for (std::size_t w = from;; ++w) {
        std::uint64_t v = zeros ? ~words[w] : words[w];
        auto c = static_cast<std::size_t>(std::popcount(v));
        if (c >= j) {
            return w * 64 + select_in_word(v, j);
        }
        j -= c;
    }
}

} // namespace

void BitBuilder::push_back(bool bit) {
    if ((size_ & 63) == 0) {
        words_.push_back(0);
    }
    if (bit) {
        words_.back() |= std::uint64_t{1} << (size_ & 63);
    }
    ++size_;
}

void BitBuilder::append(std::uint64_t value, unsigned width) {
    for (unsigned i = 0; i < width; ++i) {
        push_back((value >> i) & 1u);
    }
}

void BitBuilder::append_unary(std::uint32_t k) {
    for (std::uint32_t i = 0; i < k; ++i) {
        push_back(false);
    }
    push_back(true);
}

void BitBuilder::append(const BitVector& other) {
    for (std::size_t i = 0; i < other.size(); ++i) {
        push_back(other[i]);
    }
}

BitVector::BitVector(BitBuilder&& builder)
    : words_(std::move(builder.words_)), size_(builder.size_) {
    build_directory();
}

BitVector::BitVector(const std::vector<bool>& bits) {
    BitBuilder b;
    for (bool bit : bits) {
        b.push_back(bit);
    }
    *this = BitVector(std::move(b));
}

void BitVector::build_directory() {
    words_.resize(words_for(size_));
    std::size_t supers = (words_.size() + kWordsPerSuper - 1) / kWordsPerSuper;
    super_.assign(supers + 1, 0);
    std::uint64_t acc = 0;
    for (std::size_t sb = 0; sb < supers; ++sb) {
        super_[sb] = acc;
        std::size_t end = std::min(words_.size(), (sb + 1) * kWordsPerSuper);
        for (std::size_t w = sb * kWordsPerSuper; w < end; ++w) {
            acc += static_cast<std::uint64_t>(std::popcount(words_[w]));
        }
    }
    super_[supers] = acc;
    ones_ = acc;

    select1_hints_.clear();
    select0_hints_.clear();
    if (supers <= 1) {
        // a single superblock is scanned directly
        super_.clear();
        return;
    }
    for (std::size_t sb = 0; sb < supers; ++sb) {
        std::size_t ones_end = super_[sb + 1];
        while (select1_hints_.size() * kSelectSample < ones_end) {
            select1_hints_.push_back(static_cast<std::uint32_t>(sb));
        }
        std::size_t zeros_end = std::min((sb + 1) * kSuperBits, size_) - super_[sb + 1];
        while (select0_hints_.size() * kSelectSample < zeros_end) {
            select0_hints_.push_back(static_cast<std::uint32_t>(sb));
        }
    }
}

std::uint64_t BitVector::read(std::size_t pos, unsigned width) const {
    if (width == 0) {
        return 0;
    }
    std::size_t w = pos >> 6;
    unsigned off = pos & 63;
    std::uint64_t v = words_[w] >> off;
    if (off + width > 64) {
        v |= words_[w + 1] << (64 - off);
    }
    return width == 64 ? v : v & ((std::uint64_t{1} << width) - 1);
}

std::size_t BitVector::rank1(std::size_t i) const {
    if (i > size_) {
        throw std::out_of_range("rank position " + std::to_string(i) + " beyond length " +
                                std::to_string(size_));
    }
    std::size_t sb = super_.empty() ? 0 : i / kSuperBits;
    std::size_t r = super_.empty() ? 0 : super_[sb];
    std::size_t last = i >> 6;
    for (std::size_t w = sb * kWordsPerSuper; w < last; ++w) {
        r += static_cast<std::size_t>(std::popcount(words_[w]));
    }
    if ((i & 63) != 0) {
        r += static_cast<std::size_t>(
            std::popcount(words_[last] & ((std::uint64_t{1} << (i & 63)) - 1)));
    }
    return r;
}

std::size_t BitVector::rank(bool side, std::size_t i) const {
    return side ? rank1(i) : rank0(i);
}

std::size_t BitVector::select1(std::size_t j) const {
    if (j == 0 || j > ones_) {
        throw std::out_of_range("select1 ordinal " + std::to_string(j) + " outside [1, " +
                                std::to_string(ones_) + "]");
    }
    if (super_.empty()) {
        return scan_select(words_, 0, j, false);
    }
    std::size_t h = (j - 1) / kSelectSample;
    std::size_t lo = select1_hints_[h];
    std::size_t hi = h + 1 < select1_hints_.size() ? select1_hints_[h + 1] + 1 : super_.size() - 1;
    // last superblock with super_[sb] < j
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (super_[mid] < j) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return scan_select(words_, lo * kWordsPerSuper, j - super_[lo], false);
}

std::size_t BitVector::select0(std::size_t j) const {
    std::size_t zeros = size_ - ones_;
    if (j == 0 || j > zeros) {
        throw std::out_of_range("select0 ordinal " + std::to_string(j) + " outside [1, " +
                                std::to_string(zeros) + "]");
    }
    if (super_.empty()) {
        return scan_select(words_, 0, j, true);
    }
    std::size_t h = (j - 1) / kSelectSample;
    std::size_t lo = select0_hints_[h];
    std::size_t hi = h + 1 < select0_hints_.size() ? select0_hints_[h + 1] + 1 : super_.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (zeros_before_super(mid) < j) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return scan_select(words_, lo * kWordsPerSuper, j - zeros_before_super(lo), true);
}

std::size_t BitVector::select(bool side, std::size_t j) const {
    return side ? select1(j) : select0(j);
}

std::size_t BitVector::directory_bits() const {
    return 64 * super_.size() + 32 * (select1_hints_.size() + select0_hints_.size());
}

void BitVector::serialize(ByteWriter& out) const {
    out.u64(size_);
    for (auto w : words_) {
        out.u64(w);
    }
}

BitVector BitVector::deserialize(ByteReader& in) {
    BitVector bv;
    bv.size_ = in.u64();
    if (bv.size_ / 8 > in.remaining()) {
        throw FormatError("bit vector length " + std::to_string(bv.size_) + " exceeds input");
    }
    bv.words_.resize(words_for(bv.size_));
    for (auto& w : bv.words_) {
        w = in.u64();
    }
    if ((bv.size_ & 63) != 0 && (bv.words_.back() >> (bv.size_ & 63)) != 0) {
        throw FormatError("bit vector has stray bits past its length");
    }
    bv.build_directory();
    return bv;
}

unsigned PackedInts::width_for(std::uint64_t max_value) {
    return max_value == 0 ? 1u : static_cast<unsigned>(std::bit_width(max_value));
}

PackedInts::PackedInts(std::span<const std::uint64_t> values, unsigned width)
    : size_(values.size()), width_(width) {
    if (width == 0 || width > 64) {
        throw std::invalid_argument("packed width must be in [1, 64]");
    }
    words_.assign(words_for(size_ * width_), 0);
    for (std::size_t i = 0; i < size_; ++i) {
        std::uint64_t v = values[i];
        if (width_ < 64 && (v >> width_) != 0) {
            throw std::invalid_argument("value " + std::to_string(v) + " does not fit in " +
                                        std::to_string(width_) + " bits");
        }
        std::size_t pos = i * width_;
        std::size_t w = pos >> 6;
        unsigned off = pos & 63;
        words_[w] |= v << off;
        if (off + width_ > 64) {
            words_[w + 1] |= v >> (64 - off);
        }
    }
}

PackedInts::PackedInts(std::span<const std::uint64_t> values)
    : PackedInts(values,
                 width_for(values.empty() ? 0 : *std::max_element(values.begin(), values.end()))) {}

PackedInts::PackedInts(std::span<const std::uint32_t> values)
    : PackedInts(std::vector<std::uint64_t>(values.begin(), values.end())) {}

std::uint64_t PackedInts::operator[](std::size_t i) const {
    std::size_t pos = i * width_;
    std::size_t w = pos >> 6;
    unsigned off = pos & 63;
    std::uint64_t v = words_[w] >> off;
    if (off + width_ > 64) {
        v |= words_[w + 1] << (64 - off);
    }
    return width_ == 64 ? v : v & ((std::uint64_t{1} << width_) - 1);
}

void PackedInts::serialize(ByteWriter& out) const {
    out.u64(size_);
    out.u8(static_cast<std::uint8_t>(width_));
    for (auto w : words_) {
        out.u64(w);
    }
}

PackedInts PackedInts::deserialize(ByteReader& in) {
    PackedInts p;
    p.size_ = in.u64();
    p.width_ = in.u8();
    if (p.width_ == 0 || p.width_ > 64) {
        throw FormatError("packed int width " + std::to_string(p.width_) + " out of range");
    }
    if (p.size_ / 8 > in.remaining()) {
        throw FormatError("packed int count " + std::to_string(p.size_) + " exceeds input");
    }
    p.words_.resize(words_for(p.size_ * p.width_));
    for (auto& w : p.words_) {
        w = in.u64();
    }
    return p;
}

UnaryStream UnaryStream::encode(std::span<const std::uint32_t> values) {
    BitBuilder b;
    for (auto k : values) {
        b.append_unary(k);
    }
    return UnaryStream(BitVector(std::move(b)));
}

std::vector<std::uint32_t> UnaryStream::decode() const {
    if (!bits_.empty() && !bits_[bits_.size() - 1]) {
        throw FormatError("unary stream ends inside a code");
    }
    std::vector<std::uint32_t> out;
    out.reserve(count());
    std::uint32_t k = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) {
            out.push_back(k);
            k = 0;
        } else {
            ++k;
        }
    }
    return out;
}

std::uint32_t UnaryStream::at(std::size_t i) const {
    std::size_t end = bits_.select1(i + 1);
    std::size_t begin = i == 0 ? 0 : bits_.select1(i) + 1;
    return static_cast<std::uint32_t>(end - begin);
}

UnaryStream UnaryStream::deserialize(ByteReader& in) {
    return UnaryStream(BitVector::deserialize(in));
}

bool BitCursor::next_bit() {
    if (pos_ >= end_) {
        throw FormatError("bit cursor overrun at position " + std::to_string(pos_));
    }
    return bits_[pos_++];
}

std::uint32_t BitCursor::next_unary() {
    std::uint32_t k = 0;
    while (!next_bit()) {
        ++k;
    }
    return k;
}

} // namespace rangemax

#ifndef RANGEMAX_BIT_VECTOR_HPP
#define RANGEMAX_BIT_VECTOR_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "rangemax/serialize.hpp"

namespace rangemax {

// Append-only bit buffer; bit i lives in word i/64 at position i%64.
class BitBuilder {
public:
    void push_back(bool bit);
    // low `width` bits of value, least significant first
    void append(std::uint64_t value, unsigned width);
    // 0^k 1
    void append_unary(std::uint32_t k);
    void append(const class BitVector& other);

    std::size_t size() const { return size_; }

private:
    friend class BitVector;
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

/*
 * Static bit vector with rank/select support.
 *
 * Directory: one absolute 1-count per 512-bit superblock, plus one
 * superblock hint per 512 ones (and per 512 zeros) for select. Vectors of
 * a single superblock keep no directory. The directory is rebuilt on load
 * and never serialized.
 */
class BitVector {
public:
    BitVector() { build_directory(); }
    explicit BitVector(BitBuilder&& builder);
    explicit BitVector(const std::vector<bool>& bits);

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool operator[](std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    std::uint64_t read(std::size_t pos, unsigned width) const;

    // number of `side` bits in [0, i); 0 <= i <= size()
    std::size_t rank(bool side, std::size_t i) const;
    std::size_t rank1(std::size_t i) const;
    std::size_t rank0(std::size_t i) const { return i - rank1(i); }

    // position of the j-th `side` bit, j >= 1
    std::size_t select(bool side, std::size_t j) const;
    std::size_t select1(std::size_t j) const;
    std::size_t select0(std::size_t j) const;

    std::size_t count(bool side) const { return side ? ones_ : size_ - ones_; }

    std::size_t directory_bits() const;
    const std::vector<std::uint64_t>& words() const { return words_; }

    void serialize(ByteWriter& out) const;
    static BitVector deserialize(ByteReader& in);

    friend bool operator==(const BitVector& a, const BitVector& b) {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }

private:
    static constexpr std::size_t kSuperBits = 512;
    static constexpr std::size_t kWordsPerSuper = kSuperBits / 64;
    static constexpr std::size_t kSelectSample = 512;

    void build_directory();
    std::size_t zeros_before_super(std::size_t sb) const {
        return sb * kSuperBits - super_[sb];
    }

    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
    std::size_t ones_ = 0;
    std::vector<std::uint64_t> super_;
    std::vector<std::uint32_t> select1_hints_;
    std::vector<std::uint32_t> select0_hints_;
};

// Fixed-width unsigned integers packed into 64-bit words.
class PackedInts {
public:
    PackedInts() = default;
    PackedInts(std::span<const std::uint64_t> values, unsigned width);
    explicit PackedInts(std::span<const std::uint64_t> values);
    explicit PackedInts(std::span<const std::uint32_t> values);

    static unsigned width_for(std::uint64_t max_value);

    std::size_t size() const { return size_; }
    unsigned width() const { return width_; }
    std::uint64_t operator[](std::size_t i) const;
    std::size_t bit_size() const { return size_ * width_; }

    void serialize(ByteWriter& out) const;
    static PackedInts deserialize(ByteReader& in);

    friend bool operator==(const PackedInts&, const PackedInts&) = default;

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
    unsigned width_ = 0;
};

// Non-negative integers k coded as 0^k 1.
class UnaryStream {
public:
    UnaryStream() = default;
    static UnaryStream encode(std::span<const std::uint32_t> values);

    std::vector<std::uint32_t> decode() const;
    std::uint32_t at(std::size_t i) const;

    std::size_t count() const { return bits_.count(true); }
    std::size_t bit_size() const { return bits_.size(); }
    const BitVector& bits() const { return bits_; }

    void serialize(ByteWriter& out) const { bits_.serialize(out); }
    static UnaryStream deserialize(ByteReader& in);

    friend bool operator==(const UnaryStream&, const UnaryStream&) = default;

private:
    explicit UnaryStream(BitVector bits) : bits_(std::move(bits)) {}
    BitVector bits_;
};

// Sequential reader over a bit vector; throws FormatError on overrun.
class BitCursor {
public:
    BitCursor(const BitVector& bits, std::size_t pos, std::size_t end)
        : bits_(bits), pos_(pos), end_(end) {}

    bool next_bit();
    std::uint32_t next_unary();
    std::size_t position() const { return pos_; }

private:
    const BitVector& bits_;
    std::size_t pos_;
    std::size_t end_;
};

} // namespace rangemax

#endif

#include <doctest.h>

#include <random>

#include "rangemax/bit_vector.hpp"
#include "rangemax/serialize.hpp"

using namespace rangemax;

namespace {

BitVector from_string(const char* s) {
    std::vector<bool> bits;
    for (; *s; ++s) bits.push_back(*s == '1');
    return BitVector(bits);
}

void check_against_scan(const std::vector<bool>& bits) {
    BitVector bv(bits);
    std::size_t ones = 0;
    for (std::size_t i = 0; i <= bits.size(); ++i) {
        REQUIRE(bv.rank1(i) == ones);
        REQUIRE(bv.rank0(i) + bv.rank1(i) == i);
        if (i == bits.size()) break;
        if (bits[i]) {
            ++ones;
            REQUIRE(bv.select1(ones) == i);
        } else {
            REQUIRE(bv.select0(i + 1 - ones) == i);
        }
    }
    CHECK(bv.count(true) == ones);
}

} // namespace

TEST_CASE("bit vector small cases") {
    BitVector empty(std::vector<bool>{});
    CHECK(empty.size() == 0);
    CHECK(empty.rank1(0) == 0);

    BitVector b = from_string("101101");
    CHECK(b.rank1(6) == 4);
    CHECK(b.rank(true, 3) == 2);
    CHECK(b.select(true, 3) == 3);
    CHECK(from_string("0001").select1(1) == 3);
    for (std::size_t i = 0; i <= 6; ++i) CHECK(b.rank(false, i) + b.rank(true, i) == i);
}

TEST_CASE("bit vector against scan") {
    std::mt19937_64 rng(1);
    for (std::size_t len : {1u, 63u, 64u, 65u, 511u, 512u, 513u, 4097u, 70000u}) {
        for (double density : {0.02, 0.5, 0.98}) {
            std::bernoulli_distribution d(density);
            std::vector<bool> bits(len);
            for (std::size_t i = 0; i < len; ++i) bits[i] = d(rng);
            check_against_scan(bits);
        }
    }
}

TEST_CASE("million random bits") {
    std::mt19937_64 rng(2);
    std::vector<bool> bits(1000000);
    std::size_t pop = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = rng() & 1;
        pop += bits[i];
    }
    BitVector bv(bits);
    CHECK(bv.rank1(bv.size()) == pop);
    CHECK(bv.directory_bits() <= bv.size() / 2);
    std::size_t seen = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) {
            ++seen;
            if (seen % 997 == 0) REQUIRE(bv.select1(seen) == i);
        }
    }
}

TEST_CASE("builder append and read") {
    BitBuilder b;
    b.append(0b1011, 4);
    b.append(0xdeadbeefcafef00dull, 64);
    b.append_unary(3);
    b.push_back(true);
    BitVector bv(std::move(b));
    CHECK(bv.size() == 4 + 64 + 4 + 1);
    CHECK(bv.read(0, 4) == 0b1011);
    CHECK(bv.read(4, 64) == 0xdeadbeefcafef00dull);
    CHECK(bv.read(68, 4) == 0b1000);
    CHECK(bv[72]);
}

TEST_CASE("unary stream") {
    CHECK(UnaryStream::encode({}).bit_size() == 0);
    std::vector<std::uint32_t> v{0, 2, 1};
    UnaryStream u = UnaryStream::encode(v);
    REQUIRE(u.bit_size() == 6);
    // 1 001 01, written in stream order
    const char* expect = "100101";
    for (std::size_t i = 0; i < 6; ++i) CHECK(u.bits()[i] == (expect[i] == '1'));
    CHECK(u.decode() == v);
    CHECK(u.at(1) == 2);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 1000; ++t) {
        std::vector<std::uint32_t> ks(rng() % 50);
        std::size_t total = 0;
        for (auto& k : ks) total += (k = rng() % 20);
        UnaryStream s = UnaryStream::encode(ks);
        REQUIRE(s.decode() == ks);
        REQUIRE(s.bit_size() == total + ks.size());
        REQUIRE(s.count() == ks.size());
        for (std::size_t i = 0; i < ks.size(); ++i) REQUIRE(s.at(i) == ks[i]);
    }
}

TEST_CASE("bit cursor overrun") {
    UnaryStream s = UnaryStream::encode(std::vector<std::uint32_t>{2});
    BitCursor c(s.bits(), 0, 2);
    CHECK_THROWS_AS(c.next_unary(), FormatError);
}

TEST_CASE("packed ints") {
    std::vector<std::uint64_t> v{0, 5, 31, 7, 16};
    PackedInts p(v);
    CHECK(p.width() == 5);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(p[i] == v[i]);
    CHECK(PackedInts::width_for(0) == 1);
    CHECK(PackedInts::width_for(1) == 1);
    CHECK(PackedInts::width_for(255) == 8);
    CHECK(PackedInts::width_for(256) == 9);
}

TEST_CASE("serialization round trips") {
    std::mt19937_64 rng(4);
    std::vector<bool> bits(3000);
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = rng() % 3 == 0;
    BitVector bv(bits);
    std::vector<std::uint64_t> vals(777);
    for (auto& x : vals) x = rng() % 100000;
    PackedInts p(vals);

    ByteWriter w;
    bv.serialize(w);
    p.serialize(w);
    ByteWriter w2;
    bv.serialize(w2);
    p.serialize(w2);
    CHECK(w.buffer() == w2.buffer());

    ByteReader r(w.buffer());
    BitVector bv2 = BitVector::deserialize(r);
    PackedInts p2 = PackedInts::deserialize(r);
    CHECK(bv2 == bv);
    CHECK(p2 == p);
    CHECK(bv2.rank1(2000) == bv.rank1(2000));

    std::vector<std::uint8_t> cut(w.buffer().begin(), w.buffer().begin() + 20);
    ByteReader rc(cut);
    CHECK_THROWS_AS(BitVector::deserialize(rc), FormatError);
}

#ifndef RANGEMAX_SERIALIZE_HPP
#define RANGEMAX_SERIALIZE_HPP

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rangemax {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

/*
 * Little-endian byte sink. Every byte written is attributed to the current
 * component name so callers can account for space by component.
 */
class ByteWriter {
public:
    void u8(std::uint8_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void bytes(std::span<const std::uint8_t> data);

    void set_component(std::string name) { component_ = std::move(name); }
    const std::string& component() const { return component_; }

    const std::vector<std::uint8_t>& buffer() const { return buf_; }
    std::vector<std::uint8_t> release() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }

    const std::map<std::string, std::uint64_t>& tallies() const { return tallies_; }

private:
    void charge(std::size_t n) { tallies_[component_] += n; }

    std::vector<std::uint8_t> buf_;
    std::string component_ = "unattributed";
    std::map<std::string, std::uint64_t> tallies_;
};

// Restores the previous component name on scope exit.
class ComponentScope {
public:
    ComponentScope(ByteWriter& out, std::string name) : out_(out), saved_(out.component()) {
        out_.set_component(std::move(name));
    }
    ~ComponentScope() { out_.set_component(saved_); }
    ComponentScope(const ComponentScope&) = delete;
    ComponentScope& operator=(const ComponentScope&) = delete;

private:
    ByteWriter& out_;
    std::string saved_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::span<const std::uint8_t> bytes(std::size_t n);

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool at_end() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

} // namespace rangemax

#endif

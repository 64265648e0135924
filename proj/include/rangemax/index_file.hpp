#ifndef RANGEMAX_INDEX_FILE_HPP
#define RANGEMAX_INDEX_FILE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rangemax/tree.hpp"

namespace rangemax {

/*
 * Index file layout (little-endian):
 *   "RMXI" | u32 version | u8 endian (1 = little) | 3 reserved bytes | u32 section count
 *   section table: per section 16-byte zero-padded name, u64 offset, u64 length, u64 FNV-1a
 *   section bytes, in table order
 */
inline constexpr std::array<std::uint8_t, 4> kIndexMagic{'R', 'M', 'X', 'I'};
inline constexpr std::uint32_t kIndexVersion = 1;
inline constexpr std::size_t kSectionNameBytes = 16;

struct SectionInfo {
    std::string name;
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    std::uint64_t checksum = 0;
};

struct IndexImage {
    std::vector<std::uint8_t> bytes;
    std::vector<SectionInfo> sections;
    // bytes per component name, summed over all sections
    std::map<std::string, std::uint64_t> components;
    // bytes per component, per section
    std::map<std::string, std::map<std::string, std::uint64_t>> section_components;

    std::uint64_t framing_bytes() const;
};

IndexImage write_index(const RangeMaxTree& tree);
// validates magic, version, table bounds and checksums
RangeMaxTree read_index(std::span<const std::uint8_t> bytes);
std::vector<SectionInfo> read_section_table(std::span<const std::uint8_t> bytes);

void save_index(const RangeMaxTree& tree, const std::filesystem::path& path);
RangeMaxTree load_index(const std::filesystem::path& path);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

struct BoundCheck {
    std::string name;
    double value = 0;
    double limit = 0;
    bool ok = true;
};

struct SpaceReport {
    std::size_t n = 0;
    std::uint32_t padded_n = 0;
    std::uint64_t file_bytes = 0;
    std::uint64_t framing_bytes = 0;
    std::vector<SectionInfo> sections;
    std::map<std::string, std::uint64_t> component_bits;
    // in-memory structures rebuilt on load; not part of the file
    std::map<std::string, std::uint64_t> memory_bits;
    std::vector<BoundCheck> checks;
    bool reconciles = false;

    bool all_ok() const;
    std::string csv() const;
    std::string json_lines() const;
};

SpaceReport space_report(const RangeMaxTree& tree);

} // namespace rangemax

#endif

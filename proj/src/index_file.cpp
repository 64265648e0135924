#include "rangemax/index_file.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rangemax {

namespace {

constexpr std::size_t kHeaderBytes = 16;
constexpr std::size_t kEntryBytes = kSectionNameBytes + 24;
constexpr const char* kSectionNames[] = {"config", "globals", "tree",
                                         "matrices", "twosided", "leaves"};

} // namespace

std::uint64_t IndexImage::framing_bytes() const {
    std::uint64_t s = bytes.size();
    for (const auto& sec : sections) s -= sec.length;
    return s;
}

IndexImage write_index(const RangeMaxTree& tree) {
    struct Part {
        const char* name;
        void (RangeMaxTree::*fn)(ByteWriter&) const;
    };
    const Part parts[] = {
        {"config", &RangeMaxTree::serialize_config},
        {"globals", &RangeMaxTree::serialize_globals},
        {"tree", &RangeMaxTree::serialize_tree},
        {"matrices", &RangeMaxTree::serialize_matrices},
        {"twosided", &RangeMaxTree::serialize_two_sided},
        {"leaves", &RangeMaxTree::serialize_leaves},
    };
    IndexImage img;
    std::vector<std::vector<std::uint8_t>> bodies;
    for (const auto& p : parts) {
        ByteWriter w;
        (tree.*p.fn)(w);
        for (const auto& [comp, bytes] : w.tallies()) {
            img.components[comp] += bytes;
            img.section_components[p.name][comp] += bytes;
        }
        img.sections.push_back({p.name, 0, w.size(), fnv1a64(w.buffer())});
        bodies.push_back(w.release());
    }

    ByteWriter out;
    out.set_component("framing");
    out.bytes(kIndexMagic);
    out.u32(kIndexVersion);
    out.u8(1);
    for (int i = 0; i < 3; ++i) out.u8(0);
    out.u32(static_cast<std::uint32_t>(img.sections.size()));
    std::uint64_t offset = kHeaderBytes + kEntryBytes * img.sections.size();
    for (auto& sec : img.sections) {
        sec.offset = offset;
        offset += sec.length;
        std::array<std::uint8_t, kSectionNameBytes> name{};
        std::memcpy(name.data(), sec.name.data(), std::min(sec.name.size(), name.size()));
        out.bytes(name);
        out.u64(sec.offset);
        out.u64(sec.length);
        out.u64(sec.checksum);
    }
    img.bytes = out.release();
    for (const auto& b : bodies) img.bytes.insert(img.bytes.end(), b.begin(), b.end());
    return img;
}

std::vector<SectionInfo> read_section_table(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes) {
        throw FormatError("index file too short for header (" + std::to_string(bytes.size()) +
                          " bytes)");
    }
    if (!std::equal(kIndexMagic.begin(), kIndexMagic.end(), bytes.begin())) {
        throw FormatError("bad magic: not an index file");
    }
    ByteReader in(bytes);
    in.bytes(4);
    std::uint32_t version = in.u32();
    if (version != kIndexVersion) {
        throw FormatError("unsupported index version " + std::to_string(version));
    }
    if (in.u8() != 1) {
        throw FormatError("unsupported endianness flag");
    }
    in.bytes(3);
    std::uint32_t count = in.u32();
    if (count > (bytes.size() - kHeaderBytes) / kEntryBytes) {
        throw FormatError("section count " + std::to_string(count) + " exceeds file size");
    }
    std::vector<SectionInfo> table;
    for (std::uint32_t i = 0; i < count; ++i) {
        auto raw = in.bytes(kSectionNameBytes);
        SectionInfo s;
        s.name.assign(raw.begin(), std::find(raw.begin(), raw.end(), std::uint8_t{0}));
        s.offset = in.u64();
        s.length = in.u64();
        s.checksum = in.u64();
        if (s.offset > bytes.size() || s.length > bytes.size() - s.offset) {
            throw FormatError("section " + s.name + " extends past end of file");
        }
        table.push_back(std::move(s));
    }
    return table;
}

RangeMaxTree read_index(std::span<const std::uint8_t> bytes) {
    auto table = read_section_table(bytes);
    std::map<std::string, std::span<const std::uint8_t>> found;
    for (const auto& s : table) {
        auto body = bytes.subspan(s.offset, s.length);
        if (fnv1a64(body) != s.checksum) {
            throw FormatError("checksum mismatch in section " + s.name);
        }
        if (!found.emplace(s.name, body).second) {
            throw FormatError("duplicate section " + s.name);
        }
    }
    for (const char* name : kSectionNames) {
        if (!found.count(name)) {
            throw FormatError(std::string("missing section ") + name);
        }
    }
    RangeMaxTree::Sections sec{found["config"], found["globals"], found["tree"],
                               found["matrices"], found["twosided"], found["leaves"]};
    return RangeMaxTree::deserialize(sec);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), {});
}

void save_index(const RangeMaxTree& tree, const std::filesystem::path& path) {
    IndexImage img = write_index(tree);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f.write(reinterpret_cast<const char*>(img.bytes.data()),
            static_cast<std::streamsize>(img.bytes.size()));
    if (!f) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

RangeMaxTree load_index(const std::filesystem::path& path) {
    auto bytes = read_file(path);
    return read_index(bytes);
}

// ------------------------------------------------------------- space report

bool SpaceReport::all_ok() const {
    return reconciles &&
           std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.ok; });
}

SpaceReport space_report(const RangeMaxTree& tree) {
    IndexImage img = write_index(tree);
    SpaceReport rep;
    rep.n = tree.size();
    rep.padded_n = tree.padded_size();
    rep.file_bytes = img.bytes.size();
    rep.framing_bytes = img.framing_bytes();
    // section sizes as recorded in the written table
    rep.sections = read_section_table(img.bytes);
    for (const auto& [comp, bytes] : img.components) rep.component_bits[comp] = 8 * bytes;

    bool ok = kHeaderBytes + kEntryBytes * rep.sections.size() == rep.framing_bytes;
    std::uint64_t total = rep.framing_bytes;
    for (const auto& s : rep.sections) {
        std::uint64_t sum = 0;
        for (const auto& [comp, bytes] : img.section_components[s.name]) sum += bytes;
        ok = ok && sum == s.length;
        total += sum;
    }
    rep.reconciles = ok && total == rep.file_bytes;

    const Globals& g = tree.globals();
    rep.memory_bits["globals.wavelet_directory"] = g.wavelet().directory_bits();
    std::uint64_t dirs = 0, tables = 0;
    double worst_code = 0;
    std::size_t violations = 0;
    for (const auto& nd : tree.nodes()) {
        if (nd.leaf) continue;
        for (int o = 0; o < 4; ++o) {
            auto node = static_cast<std::uint32_t>(&nd - tree.nodes().data());
            const TwoSidedIndex& idx = tree.two_sided(node, static_cast<Orientation>(o));
            dirs += idx.directory_bits();
            const TwoSidedBudget& b = idx.budget();
            if (b.n > 0) {
                worst_code = std::max(worst_code, double(b.item_bits[4]) / double(b.n));
            }
            violations += b.ok() ? 0 : 1;
        }
    }
    for (const auto& m : tree.matrices()) tables += m.table_bits();
    rep.memory_bits["twosided.directories"] = dirs;
    rep.memory_bits["matrices.sparse_tables"] = tables;

    rep.checks.push_back({"entropy_code_bits_per_point", worst_code, 3.0, worst_code <= 3.0});
    rep.checks.push_back({"two_sided_budget_violations", double(violations), 0.0,
                          violations == 0});
    double wm_bits = double(g.wavelet().bit_size());
    double dir_ratio = wm_bits > 0 ? double(g.wavelet().directory_bits()) / wm_bits : 0.0;
    rep.checks.push_back({"globals_directory_per_bit", dir_ratio, 0.5, dir_ratio <= 0.5});
    return rep;
}

std::string SpaceReport::csv() const {
    std::ostringstream os;
    os << "kind,name,value,limit,ok\n";
    os << "meta,n," << n << ",,\n";
    os << "meta,padded_n," << padded_n << ",,\n";
    os << "meta,file_bits," << 8 * file_bytes << ",,\n";
    os << "meta,framing_bits," << 8 * framing_bytes << ",,\n";
    for (const auto& s : sections) os << "section," << s.name << "," << 8 * s.length << ",,\n";
    for (const auto& [c, b] : component_bits) os << "component," << c << "," << b << ",,\n";
    for (const auto& [c, b] : memory_bits) os << "memory," << c << "," << b << ",,\n";
    for (const auto& c : checks) {
        os << "check," << c.name << "," << c.value << "," << c.limit << ","
           << (c.ok ? "true" : "false") << "\n";
    }
    os << "check,reconciles," << (reconciles ? 1 : 0) << ",1," << (reconciles ? "true" : "false")
       << "\n";
    return os.str();
}

std::string SpaceReport::json_lines() const {
    using nlohmann::json;
    std::ostringstream os;
    os << json{{"kind", "meta"},
               {"n", n},
               {"padded_n", padded_n},
               {"file_bits", 8 * file_bytes},
               {"framing_bits", 8 * framing_bytes}}
              .dump()
       << "\n";
    for (const auto& s : sections) {
        os << json{{"kind", "section"}, {"name", s.name}, {"bits", 8 * s.length}}.dump() << "\n";
    }
    for (const auto& [c, b] : component_bits) {
        os << json{{"kind", "component"}, {"name", c}, {"bits", b}}.dump() << "\n";
    }
    for (const auto& [c, b] : memory_bits) {
        os << json{{"kind", "memory"}, {"name", c}, {"bits", b}}.dump() << "\n";
    }
    for (const auto& c : checks) {
        os << json{{"kind", "check"}, {"name", c.name}, {"value", c.value}, {"limit", c.limit},
                   {"ok", c.ok}}
                  .dump()
           << "\n";
    }
    os << json{{"kind", "check"}, {"name", "reconciles"}, {"ok", reconciles}}.dump() << "\n";
    return os.str();
}

} // namespace rangemax

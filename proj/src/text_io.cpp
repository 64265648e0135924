#include "rangemax/text_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace rangemax {

namespace {

// uniform draw in [0, bound) by rejection, identical on every platform
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

std::vector<std::uint32_t> shuffled(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(p[i - 1], p[draw(rng, i)]);
    }
    return p;
}

std::vector<std::string> fields(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::uint64_t parse_uint(const std::string& tok, std::size_t line, const char* what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(line, std::string(what) + " '" + tok + "' is not a non-negative integer");
    }
    return v;
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw FormatError("binary points file truncated");
    }
    return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
           std::uint32_t{b[3]} << 24;
}

PointSet from_triples(const std::vector<std::array<std::uint64_t, 3>>& rows,
                      const std::vector<std::size_t>& lines) {
    std::size_t n = rows.size();
    std::vector<std::uint32_t> upsilon(n), pi(n);
    std::vector<std::size_t> seen_x(n, 0), seen_y(n, 0), seen_p(n, 0);
    const char* names[3] = {"x", "y", "priority"};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t>* seen[3] = {&seen_x, &seen_y, &seen_p};
        for (int c = 0; c < 3; ++c) {
            std::uint64_t v = rows[i][c];
            if (v >= n) {
                throw ParseError(lines[i], std::string(names[c]) + " " + std::to_string(v) +
                                               " is outside [0, " + std::to_string(n) + ")");
            }
            auto& s = (*seen[c])[v];
            if (s != 0) {
                throw ParseError(lines[i], std::string(names[c]) + " " + std::to_string(v) +
                                               " repeats line " + std::to_string(s) +
                                               "; column is not a permutation");
            }
            s = lines[i];
        }
        upsilon[rows[i][0]] = static_cast<std::uint32_t>(rows[i][1]);
        pi[rows[i][0]] = static_cast<std::uint32_t>(rows[i][2]);
    }
    return PointSet(std::move(upsilon), std::move(pi));
}

Coord parse_side(const std::string& tok, Coord open, std::size_t line) {
    if (tok == "*") return open;
    std::uint64_t v = parse_uint(tok, line, "coordinate");
    if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max() - 1)) {
        throw ParseError(line, "coordinate " + tok + " is too large");
    }
    return static_cast<Coord>(v);
}

} // namespace

PointSet read_points(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!next_content_line(in, line, lineno)) {
        throw ParseError(lineno + 1, "missing header line with the point count");
    }
    auto head = fields(line);
    if (head.size() != 1) {
        throw ParseError(lineno, "header must hold exactly one field, the point count");
    }
    std::uint64_t n = parse_uint(head[0], lineno, "point count");
    if (n > std::numeric_limits<std::int32_t>::max()) {
        throw ParseError(lineno, "point count too large");
    }
    std::vector<std::array<std::uint64_t, 3>> rows;
    std::vector<std::size_t> lines;
    rows.reserve(n);
    while (rows.size() < n && next_content_line(in, line, lineno)) {
        auto f = fields(line);
        if (f.size() != 3) {
            throw ParseError(lineno, "expected 3 fields 'x y priority', found " +
                                         std::to_string(f.size()));
        }
        rows.push_back({parse_uint(f[0], lineno, "x"), parse_uint(f[1], lineno, "y"),
                        parse_uint(f[2], lineno, "priority")});
        lines.push_back(lineno);
    }
    if (rows.size() < n) {
        throw ParseError(lineno + 1, "expected " + std::to_string(n) + " points, found " +
                                         std::to_string(rows.size()));
    }
    if (next_content_line(in, line, lineno)) {
        throw ParseError(lineno, "unexpected content after " + std::to_string(n) + " points");
    }
    return from_triples(rows, lines);
}

void write_points(std::ostream& out, const PointSet& ps) {
    out << ps.size() << "\n";
    for (std::uint32_t x = 0; x < ps.size(); ++x) {
        out << x << " " << ps.y_of(x) << " " << ps.priority(x) << "\n";
    }
}

PointSet read_points_binary(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kPointsMagic)) {
        throw FormatError("not a binary points file");
    }
    std::uint32_t n = get_u32(in);
    std::vector<std::array<std::uint64_t, 3>> rows(n);
    std::vector<std::size_t> lines(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (auto& v : rows[i]) v = get_u32(in);
        lines[i] = i + 1;  // record number
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("trailing bytes in binary points file");
    }
    return from_triples(rows, lines);
}

void write_points_binary(std::ostream& out, const PointSet& ps) {
    out.write(kPointsMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(ps.size()));
    for (std::uint32_t x = 0; x < ps.size(); ++x) {
        put_u32(out, x);
        put_u32(out, ps.y_of(x));
        put_u32(out, ps.priority(x));
    }
}

PointSet read_points_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path);
    }
    char magic[4] = {0, 0, 0, 0};
    f.read(magic, 4);
    f.clear();
    f.seekg(0);
    if (std::equal(magic, magic + 4, kPointsMagic)) {
        return read_points_binary(f);
    }
    return read_points(f);
}

std::vector<QueryRect> read_queries(std::istream& in) {
    std::vector<QueryRect> out;
    std::string line;
    std::size_t lineno = 0;
    while (next_content_line(in, line, lineno)) {
        auto f = fields(line);
        if (f.size() != 4) {
            throw ParseError(lineno, "expected 4 fields 'x1 y1 x2 y2', found " +
                                         std::to_string(f.size()));
        }
        out.push_back({parse_side(f[0], kOpenLow, lineno), parse_side(f[2], kOpenHigh, lineno),
                       parse_side(f[1], kOpenLow, lineno), parse_side(f[3], kOpenHigh, lineno)});
    }
    return out;
}

void write_queries(std::ostream& out, const std::vector<QueryRect>& qs) {
    auto side = [](Coord v) {
        return v == kOpenLow || v == kOpenHigh ? std::string("*") : std::to_string(v);
    };
    for (const auto& q : qs) {
        out << side(q.x_lo) << " " << side(q.y_lo) << " " << side(q.x_hi) << " " << side(q.y_hi)
            << "\n";
    }
}

std::string format_answer(const std::optional<Candidate>& c) {
    if (!c) return "NONE";
    return std::to_string(c->x) + " " + std::to_string(c->y) + " " + std::to_string(c->priority);
}

PointSet random_point_set(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto u = shuffled(n, rng);
    auto p = shuffled(n, rng);
    return PointSet(std::move(u), std::move(p));
}

std::vector<QueryRect> random_queries(std::size_t n, std::size_t count, std::mt19937_64& rng,
                                      bool open_sides) {
    std::vector<QueryRect> out;
    out.reserve(count);
    if (n == 0) {
        out.assign(count, QueryRect::full());
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        Coord a = static_cast<Coord>(draw(rng, n)), b = static_cast<Coord>(draw(rng, n));
        Coord c = static_cast<Coord>(draw(rng, n)), d = static_cast<Coord>(draw(rng, n));
        QueryRect r = QueryRect::closed(std::min(a, b), std::max(a, b), std::min(c, d),
                                        std::max(c, d));
        if (open_sides) {
            // one open side (3-sided) or one open x side and one open y side (2-sided)
            std::uint64_t shape = draw(rng, 8);
            if (shape < 4) {
                Coord* sides[4] = {&r.x_lo, &r.x_hi, &r.y_lo, &r.y_hi};
                *sides[shape] = (shape % 2 == 0) ? kOpenLow : kOpenHigh;
            } else {
                (shape & 1 ? r.x_hi : r.x_lo) = shape & 1 ? kOpenHigh : kOpenLow;
                (shape & 2 ? r.y_hi : r.y_lo) = shape & 2 ? kOpenHigh : kOpenLow;
            }
        }
        out.push_back(r);
    }
    return out;
}

} // namespace rangemax

#ifndef RANGEMAX_TEXT_IO_HPP
#define RANGEMAX_TEXT_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rangemax/core.hpp"
#include "rangemax/serialize.hpp"

namespace rangemax {

// Malformed text input; carries the 1-based line number.
class ParseError : public FormatError {
public:
    ParseError(std::size_t line, const std::string& what)
        : FormatError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Points file: "N" then N lines "x y priority"; lines may come in any order.
PointSet read_points(std::istream& in);
void write_points(std::ostream& out, const PointSet& ps);

// Binary points file: "RMXP", u32 n, then n triples of u32 (x, y, priority).
inline constexpr char kPointsMagic[4] = {'R', 'M', 'X', 'P'};
PointSet read_points_binary(std::istream& in);
void write_points_binary(std::ostream& out, const PointSet& ps);
// sniffs the magic and dispatches
PointSet read_points_file(const std::string& path);

// Queries file: lines "x1 y1 x2 y2" (inclusive), "*" marks an open side.
std::vector<QueryRect> read_queries(std::istream& in);
void write_queries(std::ostream& out, const std::vector<QueryRect>& qs);

// "x y priority" or "NONE"
std::string format_answer(const std::optional<Candidate>& c);

PointSet random_point_set(std::size_t n, std::uint64_t seed);
// Random query mix; `open_sides` allows 2- and 3-sided rectangles.
std::vector<QueryRect> random_queries(std::size_t n, std::size_t count, std::mt19937_64& rng,
                                      bool open_sides);

} // namespace rangemax

#endif

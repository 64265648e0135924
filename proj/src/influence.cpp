#include "rangemax/influence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace rangemax {

namespace {

// Replays the sweep. `decide(x, above_owner, run)` reports whether point x
// is non-empty and how many of the segments directly below it die.
template <class Decide>
InfluenceSet sweep(std::span<const std::uint32_t> y_by_x, Decide&& decide) {
    std::size_t n = y_by_x.size();
    InfluenceSet inf;
    inf.segments.resize(n);
    inf.kills.assign(n, 0);
    std::map<std::uint32_t, std::uint32_t> live;  // y -> owner
    for (std::uint32_t x = 0; x < n; ++x) {
        std::uint32_t y = y_by_x[x];
        auto& seg = inf.segments[x];
        seg.owner = x;
        seg.y = y;
        seg.x_start = x;
        auto above = live.upper_bound(y);
        auto [alive, k] = decide(x, above == live.end() ? std::optional<std::uint32_t>{}
                                                         : std::optional<std::uint32_t>{above->second},
                                 live, above);
        if (!alive) {
            seg.empty = true;
            seg.x_end = x;
            ++inf.redundant;
            continue;
        }
        auto it = above;
        for (std::uint32_t i = 0; i < k; ++i) {
            if (it == live.begin()) {
                throw FormatError("kill count at x = " + std::to_string(x) +
                                  " exceeds live segments below");
            }
            --it;
            inf.segments[it->second].x_end = x;
            it = live.erase(it);
        }
        inf.kills[x] = k;
        live.emplace(y, x);
    }
    return inf;
}

} // namespace

InfluenceSet build_influence(const PointSet& ps) {
    return sweep(ps.upsilon(), [&](std::uint32_t x, std::optional<std::uint32_t> above_owner,
                                   const std::map<std::uint32_t, std::uint32_t>& live,
                                   std::map<std::uint32_t, std::uint32_t>::const_iterator above) {
        std::uint32_t p = ps.priority(x);
        if (above_owner && ps.priority(*above_owner) > p) {
            return std::pair<bool, std::uint32_t>{false, 0};
        }
        std::uint32_t k = 0;
        for (auto it = above; it != live.begin();) {
            --it;
            if (ps.priority(it->second) > p) {
                break;
            }
            ++k;
        }
        return std::pair<bool, std::uint32_t>{true, k};
    });
}

std::optional<std::uint32_t> ray_shoot(const InfluenceSet& inf, Point q) {
    std::optional<std::uint32_t> best;
    std::uint32_t best_y = 0;
    for (const auto& s : inf.segments) {
        if (s.covers(q.x) && s.y >= q.y && (!best || s.y < best_y)) {
            best = s.owner;
            best_y = s.y;
        }
    }
    return best;
}

std::size_t count_redundant(const InfluenceSet& inf) {
    return static_cast<std::size_t>(std::count_if(inf.segments.begin(), inf.segments.end(),
                                                  [](const auto& s) { return s.empty; }));
}

double EntropyCode::enumerative_bits() const {
    double log2_binom = (std::lgamma(static_cast<double>(n) + 1) -
                         std::lgamma(static_cast<double>(redundant) + 1) -
                         std::lgamma(static_cast<double>(n - redundant) + 1)) /
                        std::log(2.0);
    return 2.0 * static_cast<double>(n - redundant) + std::ceil(log2_binom - 1e-9);
}

void EntropyCode::serialize(ByteWriter& out) const {
    out.u64(n);
    out.u64(redundant);
    cases.serialize(out);
    kills.serialize(out);
}

EntropyCode EntropyCode::deserialize(ByteReader& in) {
    EntropyCode c;
    c.n = in.u64();
    c.redundant = in.u64();
    c.cases = BitVector::deserialize(in);
    c.kills = UnaryStream::deserialize(in);
    if (c.cases.size() != c.n || c.cases.count(false) != c.redundant ||
        c.kills.count() != c.n - c.redundant) {
        throw FormatError("entropy code counts are inconsistent");
    }
    return c;
}

EntropyCode encode_influence(const InfluenceSet& inf) {
    EntropyCode c;
    c.n = inf.size();
    c.redundant = inf.redundant;
    BitBuilder cases;
    std::vector<std::uint32_t> ks;
    for (std::size_t x = 0; x < inf.size(); ++x) {
        bool alive = !inf.segments[x].empty;
        cases.push_back(alive);
        if (alive) {
            ks.push_back(inf.kills[x]);
        }
    }
    c.cases = BitVector(std::move(cases));
    c.kills = UnaryStream::encode(ks);
    return c;
}

EntropyCode encode_priorities(const PointSet& ps) {
    return encode_influence(build_influence(ps));
}

InfluenceSet decode_influence(std::span<const std::uint32_t> y_by_x, const EntropyCode& code) {
    if (code.cases.size() != y_by_x.size()) {
        throw FormatError("case-bit count " + std::to_string(code.cases.size()) +
                          " does not match point count " + std::to_string(y_by_x.size()));
    }
    BitCursor ks(code.kills.bits(), 0, code.kills.bit_size());
    auto inf = sweep(y_by_x, [&](std::uint32_t x, std::optional<std::uint32_t>, const auto&,
                                 auto) {
        if (!code.cases[x]) {
            return std::pair<bool, std::uint32_t>{false, 0};
        }
        return std::pair<bool, std::uint32_t>{true, ks.next_unary()};
    });
    if (ks.position() != code.kills.bit_size()) {
        throw FormatError("trailing bits in kill stream");
    }
    return inf;
}

PointSet build_rmq_gadget(std::span<const std::int64_t> a, const std::vector<bool>& redundant) {
    if (a.size() != redundant.size()) {
        throw std::invalid_argument("array and redundancy mask differ in length");
    }
    std::size_t n = a.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    // redundant entries first, then the rest by value; index breaks ties
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t i, std::uint32_t j) {
        if (redundant[i] != redundant[j]) {
            return static_cast<bool>(redundant[i]);
        }
        return !redundant[i] && a[i] < a[j];
    });
    std::vector<std::uint32_t> pri_of(n);
    std::size_t r = static_cast<std::size_t>(std::count(redundant.begin(), redundant.end(), true));
    for (std::size_t rank = 0; rank < n; ++rank) {
        std::uint32_t i = order[rank];
        pri_of[i] = static_cast<std::uint32_t>(rank < r ? rank : rank + 1);
    }
    std::vector<std::uint32_t> upsilon(n + 1), pi(n + 1);
    upsilon[0] = static_cast<std::uint32_t>(n);
    pi[0] = static_cast<std::uint32_t>(r);
    for (std::size_t l = 0; l < n; ++l) {
        upsilon[l + 1] = static_cast<std::uint32_t>(l);
        pi[l + 1] = pri_of[l];
    }
    return PointSet(std::move(upsilon), std::move(pi));
}

std::optional<Candidate> brute_force_two_sided(const PointSet& ps, Point q) {
    return brute_force_max(ps, {kOpenLow, q.x, q.y, kOpenHigh});
}

} // namespace rangemax

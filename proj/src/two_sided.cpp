#include "rangemax/two_sided.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace rangemax {

DirectProvider::DirectProvider(const PointSet& ps, std::size_t cap)
    : y_by_x_(ps.upsilon()), cap_(cap) {}

void DirectProvider::report(const QueryRect& local, std::vector<Point>& out) const {
    out.clear();
    QueryRect c = local.clamped(y_by_x_.size());
    for (Coord x = c.x_lo; x <= c.x_hi; ++x) {
        std::uint32_t y = y_by_x_[static_cast<std::size_t>(x)];
        if (y >= c.y_lo && y <= c.y_hi) {
            out.push_back({static_cast<std::uint32_t>(x), y});
        }
    }
}

void GlobalsProvider::report(const QueryRect& local, std::vector<Point>& out) const {
    g_.range_report(local, out);
}

void NodeProvider::report(const QueryRect& local, std::vector<Point>& out) const {
    slab_select(g_, h_, reflect(local, h_.n, o_), cap_, out);
}

// ---------------------------------------------------------------- skeleton

void Skeleton::build_locator() {
    leaves_ = std::bit_ceil(std::max<std::size_t>(n, 1));
    tree_.assign(2 * leaves_, {});
    for (std::uint32_t id = 0; id < selected.size(); ++id) {
        const auto& s = selected[id];
        std::size_t lo = s.x_start + leaves_;
        std::size_t hi = std::min<std::size_t>(s.x_end, n) + leaves_;  // exclusive
        while (lo < hi) {
            if (lo & 1) {
                tree_[lo++].push_back(id);
            }
            if (hi & 1) {
                tree_[--hi].push_back(id);
            }
            lo >>= 1;
            hi >>= 1;
        }
    }
    for (auto& list : tree_) {
        std::sort(list.begin(), list.end(), [&](std::uint32_t a, std::uint32_t b) {
            return selected[a].y < selected[b].y;
        });
    }
    by_top_.assign(selected.size() + 1, {});
    for (std::uint32_t r = 0; r < regions.size(); ++r) {
        std::uint32_t t = regions[r].top;
        by_top_[t == kNoSegment ? selected.size() : t].push_back(r);
    }
}

std::uint32_t Skeleton::locate(Point q) const {
    if (q.x >= n || q.y >= n) {
        throw std::out_of_range("locate: corner (" + std::to_string(q.x) + ", " +
                                std::to_string(q.y) + ") outside problem of size " +
                                std::to_string(n));
    }
    // lowest selected segment alive at q.x with y >= q.y
    std::uint32_t top = kNoSegment;
    for (std::size_t v = q.x + leaves_; v >= 1; v >>= 1) {
        const auto& list = tree_[v];
        auto it = std::lower_bound(list.begin(), list.end(), q.y, [&](std::uint32_t id, std::uint32_t y) {
            return selected[id].y < y;
        });
        if (it != list.end() && (top == kNoSegment || selected[*it].y < selected[top].y)) {
            top = *it;
        }
    }
    const auto& group = by_top_[top == kNoSegment ? selected.size() : top];
    auto it = std::upper_bound(group.begin(), group.end(), q.x,
                               [&](std::uint32_t x, std::uint32_t r) { return x < regions[r].xa; });
    if (it == group.begin() || !regions[*(it - 1)].contains(q)) {
        throw std::logic_error("locate: no region contains (" + std::to_string(q.x) + ", " +
                               std::to_string(q.y) + ")");
    }
    return *(it - 1);
}

namespace {

void put_column(ByteWriter& out, const std::vector<std::uint64_t>& v) {
    PackedInts(std::span<const std::uint64_t>(v)).serialize(out);
}

std::vector<std::uint64_t> get_column(ByteReader& in, std::size_t expect) {
    PackedInts p = PackedInts::deserialize(in);
    if (p.size() != expect) {
        throw FormatError("column of length " + std::to_string(p.size()) + ", expected " +
                          std::to_string(expect));
    }
    std::vector<std::uint64_t> v(p.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = p[i];
    }
    return v;
}

std::vector<std::uint64_t> read_offsets(const PackedInts& p) {
    std::vector<std::uint64_t> v(p.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = p[i];
    }
    return v;
}

std::uint64_t shift_open(std::uint32_t v) {
    return v == kOpenEnd ? 0 : std::uint64_t{v} + 1;
}

std::uint32_t unshift_open(std::uint64_t v) {
    return v == 0 ? kOpenEnd : static_cast<std::uint32_t>(v - 1);
}

} // namespace

void Skeleton::serialize(ByteWriter& out) const {
    out.u32(n);
    out.u32(lambda);
    out.u32(walls);
    out.u64(selected.size());
    out.u64(regions.size());
    std::vector<std::uint64_t> a, b, c, d, e;
    for (const auto& s : selected) {
        a.push_back(s.y);
        b.push_back(s.x_start);
        c.push_back(shift_open(s.x_end));
    }
    put_column(out, a);
    put_column(out, b);
    put_column(out, c);
    a.clear();
    b.clear();
    c.clear();
    for (const auto& r : regions) {
        a.push_back(r.xa);
        b.push_back(r.xb);
        c.push_back(static_cast<std::uint64_t>(r.yb + 1));
        d.push_back(r.yt);
        e.push_back(shift_open(r.top));
    }
    put_column(out, a);
    put_column(out, b);
    put_column(out, c);
    put_column(out, d);
    put_column(out, e);
    put_column(out, std::vector<std::uint64_t>(left_offsets.begin(), left_offsets.end()));
    a.clear();
    b.clear();
    for (const auto& nb : left_neighbors) {
        a.push_back(nb.region);
        b.push_back(nb.reciprocal);
    }
    put_column(out, a);
    put_column(out, b);
}

Skeleton Skeleton::deserialize(ByteReader& in) {
    Skeleton sk;
    sk.n = in.u32();
    sk.lambda = in.u32();
    sk.walls = in.u32();
    std::uint64_t ns = in.u64(), nr = in.u64();
    if (ns > sk.n || nr > 4ull * sk.n + 4 || sk.lambda == 0) {
        throw FormatError("skeleton header is inconsistent");
    }
    auto ys = get_column(in, ns), xs = get_column(in, ns), xe = get_column(in, ns);
    for (std::size_t i = 0; i < ns; ++i) {
        sk.selected.push_back({static_cast<std::uint32_t>(ys[i]), static_cast<std::uint32_t>(xs[i]),
                               unshift_open(xe[i])});
    }
    auto xa = get_column(in, nr), xb = get_column(in, nr), yb = get_column(in, nr),
         yt = get_column(in, nr), top = get_column(in, nr);
    for (std::size_t i = 0; i < nr; ++i) {
        Region r{static_cast<std::uint32_t>(xa[i]), static_cast<std::uint32_t>(xb[i]),
                 static_cast<std::int64_t>(yb[i]) - 1, static_cast<std::uint32_t>(yt[i]),
                 unshift_open(static_cast<std::uint32_t>(top[i]))};
        if (r.xa > r.xb || r.xb >= sk.n || r.yt >= sk.n || r.yb >= Coord{r.yt} ||
            (r.top != kNoSegment && r.top >= ns)) {
            throw FormatError("region " + std::to_string(i) + " is malformed");
        }
        sk.regions.push_back(r);
    }
    auto lo = get_column(in, nr + 1);
    sk.left_offsets.assign(lo.begin(), lo.end());
    if (!std::is_sorted(lo.begin(), lo.end()) || lo.front() != 0) {
        throw FormatError("left-neighbor offsets are not monotone");
    }
    auto nb = get_column(in, lo.back()), rc = get_column(in, lo.back());
    for (std::size_t i = 0; i < nb.size(); ++i) {
        if (nb[i] >= nr) {
            throw FormatError("neighbor reference out of range");
        }
        sk.left_neighbors.push_back(
            {static_cast<std::uint32_t>(nb[i]), static_cast<std::uint32_t>(rc[i])});
    }
    sk.build_locator();
    return sk;
}

// ------------------------------------------------------------------- build

std::uint32_t TwoSidedIndex::default_lambda(std::size_t n) {
    if (n <= 2) {
        return 1;
    }
    double l = std::log2(static_cast<double>(n));
    return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(std::sqrt(l) - 1e-9)));
}

namespace {

struct RegionWork {
    std::vector<std::uint32_t> left;   // owners, top-down
    std::vector<std::uint32_t> pts;    // x order
    std::vector<std::uint32_t> right;  // owners, top-down
    std::vector<std::uint32_t> right_m;
};

// Spacing of selected segments inside a gap: lambda plus a quarter, so
// every selected segment stands for more than lambda live ones.
std::size_t selection_step(std::uint32_t lambda) {
    return std::size_t{lambda} + (std::size_t{lambda} + 2) / 4;
}

// Chooses the selected segments: whenever the gap around an event holds
// 2*step or more unselected live segments, it is split every step members,
// leaving step - 1 below and between and [step, 2 step) on top.
std::vector<char> choose_selected(const InfluenceSet& inf,
                                  const std::vector<std::vector<std::uint32_t>>& dies_at,
                                  std::uint32_t lambda) {
    std::size_t n = inf.size();
    std::vector<char> sel(n, 0);
    std::map<std::uint32_t, std::uint32_t> live;
    std::vector<std::uint32_t> members;
    const std::size_t step = selection_step(lambda);
    for (std::uint32_t x = 0; x < n; ++x) {
        const auto& s = inf.segments[x];
        if (s.empty) {
            continue;
        }
        for (auto d : dies_at[x]) {
            live.erase(inf.segments[d].y);
        }
        auto self = live.emplace(s.y, x).first;
        members.clear();
        for (auto it = self; it != live.begin();) {
            --it;
            if (sel[it->second]) {
                break;
            }
            members.push_back(it->second);
        }
        std::reverse(members.begin(), members.end());
        for (auto it = self; it != live.end() && !sel[it->second]; ++it) {
            members.push_back(it->second);
        }
        if (members.size() >= 2 * step) {
            for (std::size_t m = step; m + step <= members.size(); m += step) {
                sel[members[m - 1]] = 1;
            }
        }
    }
    return sel;
}

} // namespace

TwoSidedIndex TwoSidedIndex::build(const PointSet& ps, std::uint32_t lambda, Orientation o,
                                   TwoSidedDebug* debug) {
    if (lambda == 0) {
        throw std::invalid_argument("lambda must be at least 1");
    }
    const auto n = static_cast<std::uint32_t>(ps.size());
    InfluenceSet inf = build_influence(ps);
    std::vector<std::vector<std::uint32_t>> dies_at(n);
    for (const auto& s : inf.segments) {
        if (!s.empty && s.x_end != kOpenEnd) {
            dies_at[s.x_end].push_back(s.owner);
        }
    }
    std::vector<char> sel = choose_selected(inf, dies_at, lambda);

    TwoSidedIndex idx;
    idx.orientation_ = o;
    Skeleton& sk = idx.sk_;
    sk.n = n;
    sk.lambda = lambda;
    std::vector<std::uint32_t> sel_index(n, kNoSegment);
    for (std::uint32_t x = 0; x < n; ++x) {
        if (sel[x]) {
            sel_index[x] = static_cast<std::uint32_t>(sk.selected.size());
            sk.selected.push_back({inf.segments[x].y, x, inf.segments[x].x_end});
        }
    }

    std::vector<RegionWork> work;
    std::map<std::uint32_t, std::uint32_t> open;  // top y (n if none) -> region
    std::map<std::uint32_t, std::uint32_t> live, sel_alive;
    std::vector<std::uint32_t> cross(n, 0), region_of(n, 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> adjacent;

    auto collect = [&](std::int64_t yb, std::uint32_t yt, std::uint32_t skip,
                       std::vector<std::uint32_t>& out) {
        out.clear();
        for (auto it = live.upper_bound(yt); it != live.begin();) {
            --it;
            if (static_cast<std::int64_t>(it->first) <= yb) {
                break;
            }
            if (it->second != skip) {
                out.push_back(it->second);
            }
        }
    };
    auto open_region = [&](std::uint32_t x, std::int64_t yb, std::uint32_t yt, std::uint32_t top,
                           std::vector<std::uint32_t>& opened) {
        auto rid = static_cast<std::uint32_t>(sk.regions.size());
        sk.regions.push_back({x, x, yb, yt, top});
        work.emplace_back();
        collect(yb, yt, x, work[rid].left);
        for (auto l : work[rid].left) {
            ++cross[l];
        }
        open[top == kNoSegment ? n : sk.selected[top].y] = rid;
        opened.push_back(rid);
    };
    auto close_region = [&](std::uint32_t rid, std::uint32_t x,
                            std::vector<std::uint32_t>& closed) {
        Region& r = sk.regions[rid];
        r.xb = x - 1;
        collect(r.yb, r.yt, x, work[rid].right);
        for (auto l : work[rid].right) {
            work[rid].right_m.push_back(cross[l]);
        }
        open.erase(r.top == kNoSegment ? n : sk.selected[r.top].y);
        closed.push_back(rid);
    };
    auto key_above = [&](std::uint32_t y, bool inclusive) {
        auto it = inclusive ? sel_alive.lower_bound(y) : sel_alive.upper_bound(y);
        return it == sel_alive.end() ? n : it->first;
    };

    std::vector<std::uint32_t> closed, opened, dying;
    for (std::uint32_t x = 0; x < n; ++x) {
        const auto& s = inf.segments[x];
        for (auto d : dies_at[x]) {
            live.erase(inf.segments[d].y);
        }
        if (!s.empty) {
            live.emplace(s.y, x);
        }
        dying.clear();
        for (auto d : dies_at[x]) {
            if (sel[d]) {
                dying.push_back(d);
            }
        }
        closed.clear();
        opened.clear();
        bool is_sel = sel[x] != 0;
        if (x == 0) {
            if (is_sel) {
                sel_alive.emplace(s.y, x);
                open_region(0, -1, s.y, sel_index[x], opened);
                if (s.y + 1 < n) {
                    open_region(0, s.y, n - 1, kNoSegment, opened);
                }
            } else {
                open_region(0, -1, n - 1, kNoSegment, opened);
            }
        } else if (is_sel || !dying.empty()) {
            std::uint32_t key0 = key_above(s.y, false);
            std::uint32_t r0 = open.at(key0);
            std::uint32_t yt = sk.regions[r0].yt, top0 = sk.regions[r0].top;
            std::int64_t yb = sk.regions[r0].yb;
            close_region(r0, x, closed);
            for (auto d : dying) {
                std::uint32_t rid = open.at(inf.segments[d].y);
                yb = std::min(yb, sk.regions[rid].yb);
                close_region(rid, x, closed);
                sel_alive.erase(inf.segments[d].y);
            }
            if (is_sel) {
                sel_alive.emplace(s.y, x);
                open_region(x, yb, s.y, sel_index[x], opened);
                if (!(top0 == kNoSegment && s.y == n - 1)) {
                    open_region(x, s.y, yt, top0, opened);
                }
            } else {
                open_region(x, yb, yt, top0, opened);
            }
        } else {
            std::uint32_t rid = open.at(key_above(s.y, false));
            if (work[rid].pts.size() + 1 > 2 * std::size_t{lambda}) {
                Region r = sk.regions[rid];
                close_region(rid, x, closed);
                ++sk.walls;
                open_region(x, r.yb, r.yt, r.top, opened);
            }
        }
        std::uint32_t home = open.at(key_above(s.y, true));
        work[home].pts.push_back(x);
        region_of[x] = home;
        for (auto c : closed) {
            for (auto r : opened) {
                const Region& a = sk.regions[c];
                const Region& b = sk.regions[r];
                if (std::max(a.yb, b.yb) < std::int64_t{std::min(a.yt, b.yt)}) {
                    adjacent.emplace_back(c, r);
                }
            }
        }
    }
    for (auto& [key, rid] : open) {
        sk.regions[rid].xb = n - 1;
    }

    const std::size_t nr = sk.regions.size();
    auto by_y_desc = [&](std::uint32_t a, std::uint32_t b) {
        return sk.regions[a].yt > sk.regions[b].yt;
    };
    std::vector<std::vector<std::uint32_t>> lefts(nr), rights(nr);
    for (auto [c, r] : adjacent) {
        rights[c].push_back(r);
        lefts[r].push_back(c);
    }
    for (std::size_t r = 0; r < nr; ++r) {
        std::sort(lefts[r].begin(), lefts[r].end(), by_y_desc);
        std::sort(rights[r].begin(), rights[r].end(), by_y_desc);
    }
    sk.left_offsets.assign(1, 0);
    for (std::uint32_t r = 0; r < nr; ++r) {
        for (auto c : lefts[r]) {
            auto pos = std::find(rights[c].begin(), rights[c].end(), r) - rights[c].begin();
            sk.left_neighbors.push_back({c, static_cast<std::uint32_t>(pos)});
        }
        sk.left_offsets.push_back(static_cast<std::uint32_t>(sk.left_neighbors.size()));
    }
    sk.build_locator();

    // payloads
    BitBuilder b1, b2, b3, b4, b5;
    std::vector<std::uint64_t> o2{0}, o3{0}, o4{0}, o5{0}, recs;
    std::vector<std::uint32_t> in_right(n, 0);
    auto range_count = [&](const std::vector<std::uint32_t>& owners, const Region& nb) {
        std::uint32_t c = 0;
        for (auto w : owners) {
            std::int64_t y = inf.segments[w].y;
            c += nb.yb < y && y <= std::int64_t{nb.yt};
        }
        return c;
    };
    for (std::uint32_t r = 0; r < nr; ++r) {
        const RegionWork& w = work[r];
        for (auto l : w.right) {
            in_right[l] = r + 1;
        }
        std::vector<std::uint32_t> p_desc = w.pts;
        std::sort(p_desc.begin(), p_desc.end(),
                  [&](std::uint32_t a, std::uint32_t b) { return ps.y_of(a) > ps.y_of(b); });
        std::size_t i = 0, j = 0;
        while (i < p_desc.size() || j < w.left.size()) {
            bool take_p = j == w.left.size() ||
                          (i < p_desc.size() && ps.y_of(p_desc[i]) > inf.segments[w.left[j]].y);
            std::uint32_t owner = take_p ? p_desc[i++] : w.left[j++];
            b3.push_back(take_p);
            b1.push_back(inf.segments[owner].empty || in_right[owner] != r + 1);
        }
        o3.push_back(b3.size());

        std::uint32_t total = 0;
        for (auto c : lefts[r]) {
            std::uint32_t cnt = range_count(w.left, sk.regions[c]);
            total += cnt;
            b2.append_unary(cnt);
        }
        if (total != w.left.size()) {
            throw std::logic_error("left segments not covered by left neighbors");
        }
        total = 0;
        for (auto c : rights[r]) {
            std::uint32_t cnt = range_count(w.right, sk.regions[c]);
            if (cnt != range_count(work[c].left, sk.regions[r])) {
                throw std::logic_error("neighbor segment counts disagree");
            }
            total += cnt;
            b2.append_unary(cnt);
        }
        if (total != w.right.size()) {
            throw std::logic_error("right segments not covered by right neighbors");
        }
        o2.push_back(b2.size());

        for (std::size_t e = 0; e < w.right.size(); ++e) {
            std::uint32_t m = w.right_m[e];
            bool way = m > 0 && m % lambda == 0;
            b4.push_back(way);
            if (way) {
                std::uint32_t owner = w.right[e];
                recs.push_back(region_of[owner]);
                recs.push_back(owner);
                recs.push_back(inf.segments[owner].y);
            }
        }
        o4.push_back(b4.size());

        for (auto x : w.pts) {
            bool alive = !inf.segments[x].empty;
            b5.push_back(alive);
            if (alive) {
                b5.append_unary(x == sk.regions[r].xa ? 0 : inf.kills[x]);
            }
        }
        o5.push_back(b5.size());

        if (debug) {
            debug->left_owners.push_back(w.left);
            debug->points.push_back(w.pts);
            debug->right_owners.push_back(w.right);
        }
    }
    idx.item1_ = BitVector(std::move(b1));
    idx.item2_ = BitVector(std::move(b2));
    idx.item3_ = BitVector(std::move(b3));
    idx.item4_ = BitVector(std::move(b4));
    idx.item5_ = BitVector(std::move(b5));
    unsigned width = PackedInts::width_for(std::max<std::uint64_t>({n, nr, 1}) - 1);
    idx.records_ = PackedInts(recs, width);
    idx.off2_ = PackedInts(std::span<const std::uint64_t>(o2));
    idx.off3_ = PackedInts(std::span<const std::uint64_t>(o3));
    idx.off4_ = PackedInts(std::span<const std::uint64_t>(o4));
    idx.off5_ = PackedInts(std::span<const std::uint64_t>(o5));
    idx.compute_budget();
    return idx;
}

std::size_t TwoSidedIndex::point_count(std::uint32_t r) const {
    return item3_.rank1(off3_[r + 1]) - item3_.rank1(off3_[r]);
}

std::size_t TwoSidedIndex::left_size(std::uint32_t r) const {
    return (off3_[r + 1] - off3_[r]) - point_count(r);
}

std::size_t TwoSidedIndex::right_size(std::uint32_t r) const {
    return off4_[r + 1] - off4_[r];
}

void TwoSidedIndex::compute_budget() {
    TwoSidedBudget& b = budget_;
    b = TwoSidedBudget{};
    b.n = sk_.n;
    b.lambda = sk_.lambda;
    b.regions = sk_.regions.size();
    b.t_prime = sk_.t_prime();
    for (std::uint32_t r = 0; r < sk_.regions.size(); ++r) {
        std::size_t pts = point_count(r);
        std::size_t nonempty = (item5_.rank1(off5_[r + 1]) - item5_.rank1(off5_[r])) / 2;
        b.max_points = std::max(b.max_points, pts);
        b.max_parts = std::max(b.max_parts, left_size(r) + nonempty);
    }
    b.record_width = 3 * std::size_t{records_.width()};
    b.records = records_.size() / 3;
    b.item_bits[0] = item1_.size();
    b.item_bits[1] = item2_.size();
    b.item_bits[2] = item3_.size();
    b.item_bits[3] = item4_.size() + records_.bit_size();
    b.item_bits[4] = item5_.size();
    b.item2_ones = item2_.count(true);
    b.item2_zeros = item2_.count(false);
}

std::size_t TwoSidedIndex::offset_bits() const {
    return off2_.bit_size() + off3_.bit_size() + off4_.bit_size() + off5_.bit_size();
}

std::size_t TwoSidedIndex::directory_bits() const {
    return item1_.directory_bits() + item2_.directory_bits() + item3_.directory_bits() +
           item4_.directory_bits() + item5_.directory_bits();
}

// ------------------------------------------------------------------- query

void TwoSidedIndex::fetch(const PointProvider& prov, const QueryRect& rect,
                          std::vector<Point>& out, TwoSidedStats* stats) const {
    prov.report(rect, out);
    if (out.size() > prov.cap()) {
        throw CapExceeded("provider returned " + std::to_string(out.size()) +
                          " points, cap is " + std::to_string(prov.cap()));
    }
    if (stats) {
        ++stats->provider_calls;
        stats->max_batch = std::max(stats->max_batch, out.size());
    }
}

void TwoSidedIndex::order_by_y(const std::vector<Point>& pr,
                               std::vector<std::uint32_t>& by_y) const {
    by_y.resize(pr.size());
    std::iota(by_y.begin(), by_y.end(), 0u);
    std::sort(by_y.begin(), by_y.end(),
              [&](std::uint32_t a, std::uint32_t b) { return key_y(pr[a]) > key_y(pr[b]); });
}

Point TwoSidedIndex::to_top(const PointProvider& prov, Point local, TwoSidedStats* stats) const {
    std::vector<Point> one;
    fetch(prov, {local.x, local.x, local.y, local.y}, one, stats);
    if (one.size() != 1) {
        throw FormatError("waypoint (" + std::to_string(local.x) + ", " +
                          std::to_string(local.y) + ") does not name a point");
    }
    return one[0];
}

namespace {

struct Entry {
    bool left = false;
    std::uint32_t idx = 0;
    bool inserted = false;
    std::int32_t killer = -1;
};

} // namespace

std::vector<TwoSidedIndex::LocalSegment> TwoSidedIndex::reconstruct_local(
    std::uint32_t r, const std::vector<Point>& pr) const {
    std::size_t s3 = off3_[r], e3 = off3_[r + 1];
    std::size_t np = point_count(r);
    if (pr.size() != np) {
        throw FormatError("region " + std::to_string(r) + " expects " + std::to_string(np) +
                          " points, provider gave " + std::to_string(pr.size()));
    }
    std::vector<std::uint32_t> by_y;
    order_by_y(pr, by_y);
    std::vector<Entry> entries;
    entries.reserve(e3 - s3);
    std::vector<std::uint32_t> pos_of(np);
    std::uint32_t pi = 0, li = 0;
    for (std::size_t pos = s3; pos < e3; ++pos) {
        if (item3_[pos]) {
            pos_of[by_y[pi]] = static_cast<std::uint32_t>(entries.size());
            entries.push_back({false, by_y[pi++]});
        } else {
            entries.push_back({true, li++});
        }
    }
    // sweep in oriented x order
    BitCursor cur(item5_, off5_[r], off5_[r + 1]);
    for (std::size_t t = 0; t < np; ++t) {
        std::uint32_t i = flips_x(orientation_) ? static_cast<std::uint32_t>(np - 1 - t)
                                                : static_cast<std::uint32_t>(t);
        if (!cur.next_bit()) {
            continue;
        }
        std::uint32_t k = cur.next_unary();
        std::size_t pos = pos_of[i];
        entries[pos].inserted = true;
        for (std::size_t e = pos + 1; e < entries.size() && k > 0; ++e) {
            Entry& en = entries[e];
            if ((en.left || en.inserted) && en.killer < 0) {
                en.killer = static_cast<std::int32_t>(i);
                --k;
            }
        }
        if (k > 0) {
            throw FormatError("kill count overruns region " + std::to_string(r));
        }
    }
    if (cur.position() != off5_[r + 1]) {
        throw FormatError("trailing payload bits in region " + std::to_string(r));
    }
    std::vector<LocalSegment> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        LocalSegment s;
        s.from_left = e.left;
        s.index = e.idx;
        s.empty = !e.left && !e.inserted;
        if (e.killer >= 0) {
            s.killer = static_cast<std::uint32_t>(e.killer);
        }
        s.alive_at_end = !s.empty && e.killer < 0;
        out.push_back(s);
    }
    return out;
}

ResolvedOwner TwoSidedIndex::resolve_left_segment(const PointProvider& prov, std::uint32_t r,
                                                  std::size_t i, TwoSidedStats* stats) const {
    std::uint32_t cur = r;
    std::size_t idx = i;
    std::size_t hops = 0;
    for (;;) {
        if (idx >= left_size(cur)) {
            throw std::out_of_range("left segment " + std::to_string(idx) + " of region " +
                                    std::to_string(cur) + " does not exist");
        }
        // neighbor and offset within its run, from the left unary string
        std::size_t pos = off2_[cur], zeros = 0, nb = 0, within = 0;
        for (;; ++pos) {
            if (item2_[pos]) {
                ++nb;
                within = 0;
            } else {
                if (zeros == idx) {
                    break;
                }
                ++zeros;
                ++within;
            }
        }
        if (nb >= sk_.left_count(cur)) {
            throw FormatError("left unary string of region " + std::to_string(cur) +
                              " is corrupt");
        }
        const NeighborRef& ref = sk_.left_neighbors[sk_.left_offsets[cur] + nb];
        std::uint32_t nbr = ref.region;
        std::size_t rpos = off2_[nbr] + left_size(nbr) + sk_.left_count(nbr);
        std::size_t ones = 0, jr = 0;
        for (; ones < ref.reciprocal; ++rpos) {
            if (item2_[rpos]) {
                ++ones;
            } else {
                ++jr;
            }
        }
        jr += within;
        ++hops;
        if (stats) {
            ++stats->hops;
            stats->max_hops = std::max(stats->max_hops, hops);
        }
        std::size_t b4 = off4_[nbr] + jr;
        if (jr >= right_size(nbr)) {
            throw FormatError("right entry out of range in region " + std::to_string(nbr));
        }
        if (item4_[b4]) {
            std::size_t rec = item4_.rank1(b4);
            if (stats) {
                ++stats->waypoint_jumps;
            }
            ResolvedOwner o;
            o.local = {static_cast<std::uint32_t>(records_[3 * rec + 1]),
                       static_cast<std::uint32_t>(records_[3 * rec + 2])};
            return o;
        }
        // the jr-th survivor of nbr, top-down
        std::size_t survivors = 0, li = 0, pi = 0;
        bool found = false, from_p = false;
        for (std::size_t p = off3_[nbr]; p < off3_[nbr + 1]; ++p) {
            bool is_p = item3_[p];
            if (!item1_[p]) {
                if (survivors == jr) {
                    found = true;
                    from_p = is_p;
                    break;
                }
                ++survivors;
            }
            if (is_p) {
                ++pi;
            } else {
                ++li;
            }
        }
        if (!found) {
            throw FormatError("right entry " + std::to_string(jr) + " has no survivor in region " +
                              std::to_string(nbr));
        }
        if (!from_p) {
            cur = nbr;
            idx = li;
            continue;
        }
        std::vector<Point> pr;
        fetch(prov, sk_.regions[nbr].box(), pr, stats);
        if (pr.size() != point_count(nbr)) {
            throw FormatError("region " + std::to_string(nbr) + " point count mismatch");
        }
        std::vector<std::uint32_t> by_y;
        order_by_y(pr, by_y);
        ResolvedOwner o;
        o.has_top = true;
        o.top = pr[by_y[pi]];
        return o;
    }
}

std::optional<Point> TwoSidedIndex::query(const PointProvider& prov, Point q, Coord kx, Coord ky,
                                          TwoSidedStats* stats) const {
    if (prov.cap() < required_cap()) {
        throw std::invalid_argument("provider cap " + std::to_string(prov.cap()) +
                                    " is below the required " + std::to_string(required_cap()));
    }
    std::uint32_t r = sk_.locate(q);
    std::vector<Point> pr;
    fetch(prov, sk_.regions[r].box(), pr, stats);
    auto segs = reconstruct_local(r, pr);

    auto alive_at_q = [&](const LocalSegment& s) {
        if (!s.from_left && (s.empty || key_x(pr[s.index]) > kx)) {
            return false;
        }
        return !s.killer || key_x(pr[*s.killer]) > kx;
    };
    std::ptrdiff_t c = -1;
    std::size_t low = segs.size();
    for (std::size_t e = 0; e < segs.size(); ++e) {
        const auto& s = segs[e];
        if (s.from_left) {
            continue;
        }
        if (key_y(pr[s.index]) < ky) {
            low = e;
            break;
        }
        if (alive_at_q(s)) {
            c = static_cast<std::ptrdiff_t>(e);
        }
    }
    std::vector<std::uint32_t> cand;
    for (std::size_t e = static_cast<std::size_t>(c + 1); e < low; ++e) {
        if (segs[e].from_left && alive_at_q(segs[e])) {
            cand.push_back(segs[e].index);
        }
    }
    // last candidate (lowest) whose owner lies at or above q
    std::size_t lo = 0, hi = cand.size(), probes = 0;
    std::optional<ResolvedOwner> best;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        ResolvedOwner o = resolve_left_segment(prov, r, cand[mid], stats);
        ++probes;
        bool above = o.has_top ? key_y(o.top) >= ky : o.local.y >= q.y;
        if (above) {
            best = o;
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if (stats) {
        stats->probes += probes;
        stats->max_probes = std::max(stats->max_probes, probes);
    }
    if (best) {
        return best->has_top ? best->top : to_top(prov, best->local, stats);
    }
    if (c >= 0) {
        return pr[segs[static_cast<std::size_t>(c)].index];
    }
    return std::nullopt;
}

std::optional<Point> TwoSidedIndex::query(const PointProvider& prov, Point q,
                                          TwoSidedStats* stats) const {
    return query(prov, q, Coord{q.x}, Coord{q.y}, stats);
}

// ---------------------------------------------------------- serialization

void TwoSidedIndex::serialize(ByteWriter& out) const {
    {
        ComponentScope scope(out, "twosided.skeleton");
        out.u8(static_cast<std::uint8_t>(orientation_));
        sk_.serialize(out);
    }
    {
        ComponentScope scope(out, "twosided.item1");
        item1_.serialize(out);
    }
    {
        ComponentScope scope(out, "twosided.item2");
        item2_.serialize(out);
    }
    {
        ComponentScope scope(out, "twosided.item3");
        item3_.serialize(out);
    }
    {
        ComponentScope scope(out, "twosided.item4");
        item4_.serialize(out);
        records_.serialize(out);
    }
    {
        ComponentScope scope(out, "twosided.item5");
        item5_.serialize(out);
    }
    {
        ComponentScope scope(out, "twosided.offsets");
        off2_.serialize(out);
        off3_.serialize(out);
        off4_.serialize(out);
        off5_.serialize(out);
    }
}

TwoSidedIndex TwoSidedIndex::deserialize(ByteReader& in) {
    TwoSidedIndex idx;
    std::uint8_t o = in.u8();
    if (o > 3) {
        throw FormatError("orientation code " + std::to_string(o) + " invalid");
    }
    idx.orientation_ = static_cast<Orientation>(o);
    idx.sk_ = Skeleton::deserialize(in);
    idx.item1_ = BitVector::deserialize(in);
    idx.item2_ = BitVector::deserialize(in);
    idx.item3_ = BitVector::deserialize(in);
    idx.item4_ = BitVector::deserialize(in);
    idx.records_ = PackedInts::deserialize(in);
    idx.item5_ = BitVector::deserialize(in);
    idx.off2_ = PackedInts::deserialize(in);
    idx.off3_ = PackedInts::deserialize(in);
    idx.off4_ = PackedInts::deserialize(in);
    idx.off5_ = PackedInts::deserialize(in);
    std::size_t nr = idx.sk_.regions.size();
    auto check = [&](const PackedInts& off, std::size_t total, const char* name) {
        auto v = read_offsets(off);
        if (v.size() != nr + 1 || v.front() != 0 || v.back() != total ||
            !std::is_sorted(v.begin(), v.end())) {
            throw FormatError(std::string("payload offsets for ") + name + " are inconsistent");
        }
    };
    check(idx.off2_, idx.item2_.size(), "item 2");
    check(idx.off3_, idx.item3_.size(), "item 3");
    check(idx.off4_, idx.item4_.size(), "item 4");
    check(idx.off5_, idx.item5_.size(), "item 5");
    if (idx.item1_.size() != idx.item3_.size() ||
        idx.records_.size() != 3 * idx.item4_.count(true)) {
        throw FormatError("payload sizes are inconsistent");
    }
    idx.compute_budget();
    return idx;
}

bool operator==(const TwoSidedIndex& a, const TwoSidedIndex& b) {
    return a.orientation_ == b.orientation_ && a.sk_ == b.sk_ && a.item1_ == b.item1_ &&
           a.item2_ == b.item2_ && a.item3_ == b.item3_ && a.item4_ == b.item4_ &&
           a.records_ == b.records_ && a.item5_ == b.item5_ && a.off2_ == b.off2_ &&
           a.off3_ == b.off3_ && a.off4_ == b.off4_ && a.off5_ == b.off5_;
}

} // namespace rangemax

#include "rangemax/tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

namespace rangemax {

// ------------------------------------------------------------------- plan

TreePlan TreePlan::make(std::uint32_t padded_n, const BuildConfig& cfg) {
    TreePlan p;
    p.N = padded_n;
    p.L = static_cast<std::uint32_t>(std::bit_width(padded_n) - 1);
    p.cfg = cfg;
    double t = 1.0;
    if (p.L >= 2) {
        t = p.L / std::log2(static_cast<double>(p.L));
    }
    while (std::ldexp(1.0, static_cast<int>(p.leaf_level)) < t - 1e-9) {
        ++p.leaf_level;
    }
    return p;
}

std::uint32_t TreePlan::k_for(std::uint32_t n) const {
    std::uint64_t v = std::uint64_t{n} * std::max<std::uint32_t>(L, 1);
    return std::uint32_t{1} << ((std::bit_width(v) - 1) / 2);
}

bool TreePlan::is_leaf(std::uint32_t n, std::uint32_t level) const {
    if (n <= 4 || k_for(n) >= n) {
        return true;
    }
    if (cfg.base_threshold != 0) {
        return n <= cfg.base_threshold;
    }
    return level >= leaf_level;
}

std::uint32_t TreePlan::lambda_for(std::uint32_t n) const {
    return cfg.lambda_override != 0 ? cfg.lambda_override : TwoSidedIndex::default_lambda(n);
}

// ----------------------------------------------------------------- matrix

SquareMatrix::SquareMatrix(std::uint32_t m, std::vector<std::uint32_t> cells, const Globals& g)
    : m_(m), cells_(std::move(cells)) {
    if (cells_.size() != std::size_t{m} * m) {
        throw std::invalid_argument("matrix cell count does not match its side");
    }
    levels_ = m == 0 ? 0 : static_cast<unsigned>(std::bit_width(m));
    std::size_t plane = std::size_t{m} * m;
    table_.assign(plane * levels_ * levels_, kEmpty);
    std::copy(cells_.begin(), cells_.end(), table_.begin());
    for (unsigned la = 0; la < levels_; ++la) {
        for (unsigned lb = 0; lb < levels_; ++lb) {
            if (la == 0 && lb == 0) {
                continue;
            }
            std::uint32_t* dst = table_.data() + (la * levels_ + lb) * plane;
            for (std::uint32_t a = 0; a + (1u << la) <= m; ++a) {
                for (std::uint32_t b = 0; b + (1u << lb) <= m; ++b) {
                    std::uint32_t v = lb > 0 ? better(g, at(la, lb - 1, a, b),
                                                      at(la, lb - 1, a, b + (1u << (lb - 1))))
                                             : better(g, at(la - 1, lb, a, b),
                                                      at(la - 1, lb, a + (1u << (la - 1)), b));
                    dst[a * m + b] = v;
                }
            }
        }
    }
}

std::uint32_t SquareMatrix::better(const Globals& g, std::uint32_t a, std::uint32_t b) {
    if (a == kEmpty) {
        return b;
    }
    if (b == kEmpty) {
        return a;
    }
    return g.priority(a) > g.priority(b) ? a : b;
}

std::uint32_t SquareMatrix::at(unsigned la, unsigned lb, std::uint32_t a, std::uint32_t b) const {
    return table_[(la * levels_ + lb) * std::size_t{m_} * m_ + a * m_ + b];
}

std::uint32_t SquareMatrix::query(const Globals& g, std::uint32_t a0, std::uint32_t a1,
                                  std::uint32_t b0, std::uint32_t b1) const {
    if (a0 > a1 || b0 > b1 || a1 >= m_ || b1 >= m_) {
        throw std::out_of_range("matrix range [" + std::to_string(a0) + ", " + std::to_string(a1) +
                                "] x [" + std::to_string(b0) + ", " + std::to_string(b1) +
                                "] outside " + std::to_string(m_) + " x " + std::to_string(m_));
    }
    auto la = static_cast<unsigned>(std::bit_width(a1 - a0 + 1) - 1);
    auto lb = static_cast<unsigned>(std::bit_width(b1 - b0 + 1) - 1);
    std::uint32_t a2 = a1 + 1 - (1u << la), b2 = b1 + 1 - (1u << lb);
    std::uint32_t v = better(g, at(la, lb, a0, b0), at(la, lb, a2, b0));
    v = better(g, v, at(la, lb, a0, b2));
    return better(g, v, at(la, lb, a2, b2));
}

// ------------------------------------------------------------------ build

RangeMaxTree RangeMaxTree::build(const PointSet& ps, const BuildConfig& cfg) {
    RangeMaxTree t;
    t.n_ = ps.size();
    auto n0 = static_cast<std::uint32_t>(ps.size());
    std::uint32_t N = std::bit_ceil(std::max<std::uint32_t>(n0, 1));
    std::uint32_t pad = N - n0;
    std::vector<std::uint32_t> ups(N), pri(N);
    for (std::uint32_t i = 0; i < N; ++i) {
        ups[i] = i < n0 ? ps.y_of(i) : i;
        pri[i] = i < n0 ? ps.priority(i) + pad : i - n0;
    }
    PointSet padded(std::move(ups), std::move(pri));
    t.g_ = Globals(padded);
    t.plan_ = TreePlan::make(N, cfg);

    struct Work {
        std::uint32_t node;
        std::vector<std::uint32_t> xs;
    };
    std::deque<Work> queue;
    TreeNode root;
    root.header = root_header(t.g_);
    t.nodes_.push_back(root);
    std::vector<std::uint32_t> all(N);
    std::iota(all.begin(), all.end(), 0u);
    queue.push_back({0, std::move(all)});

    while (!queue.empty()) {
        Work w = std::move(queue.front());
        queue.pop_front();
        TreeNode nd = t.nodes_[w.node];
        const NodeHeader h = nd.header;
        const auto n = static_cast<std::uint32_t>(w.xs.size());
        t.depth_ = std::max<std::size_t>(t.depth_, h.level);
        if (t.plan_.is_leaf(n, h.level)) {
            nd.leaf = true;
            nd.leaf_offset = static_cast<std::uint32_t>(t.leaf_x_.size());
            t.leaf_x_.insert(t.leaf_x_.end(), w.xs.begin(), w.xs.end());
            t.nodes_[w.node] = nd;
            continue;
        }
        nd.leaf = false;
        nd.k = t.plan_.k_for(n);
        const std::uint32_t k = nd.k, m = n / k;
        std::vector<std::uint32_t> by_y(n), local_y(n);
        std::iota(by_y.begin(), by_y.end(), 0u);
        std::sort(by_y.begin(), by_y.end(), [&](std::uint32_t a, std::uint32_t b) {
            return padded.y_of(w.xs[a]) < padded.y_of(w.xs[b]);
        });
        for (std::uint32_t r = 0; r < n; ++r) {
            local_y[by_y[r]] = r;
        }

        nd.first_child = static_cast<std::uint32_t>(t.nodes_.size());
        for (std::uint32_t a = 0; a < m; ++a) {
            TreeNode c;
            c.header = {h.box, k, h.level + 1};
            c.header.box.x_lo = w.xs[a * k];
            c.header.box.x_hi = w.xs[(a + 1) * k - 1];
            t.nodes_.push_back(c);
            queue.push_back({static_cast<std::uint32_t>(t.nodes_.size() - 1),
                             std::vector<std::uint32_t>(w.xs.begin() + a * k,
                                                        w.xs.begin() + (a + 1) * k)});
        }
        for (std::uint32_t b = 0; b < m; ++b) {
            TreeNode c;
            c.header = {h.box, k, h.level + 1};
            c.header.box.y_lo = padded.y_of(w.xs[by_y[b * k]]);
            c.header.box.y_hi = padded.y_of(w.xs[by_y[(b + 1) * k - 1]]);
            std::vector<std::uint32_t> xs;
            xs.reserve(k);
            for (std::uint32_t r = b * k; r < (b + 1) * k; ++r) {
                xs.push_back(w.xs[by_y[r]]);
            }
            std::sort(xs.begin(), xs.end());
            t.nodes_.push_back(c);
            queue.push_back({static_cast<std::uint32_t>(t.nodes_.size() - 1), std::move(xs)});
        }

        std::vector<std::uint32_t> cells(std::size_t{m} * m, SquareMatrix::kEmpty);
        for (std::uint32_t lx = 0; lx < n; ++lx) {
            std::uint32_t& c = cells[(lx / k) * m + local_y[lx] / k];
            std::uint32_t x = w.xs[lx];
            if (c == SquareMatrix::kEmpty || padded.priority(x) > padded.priority(c)) {
                c = x;
            }
        }
        nd.matrix = static_cast<std::uint32_t>(t.matrices_.size());
        t.matrices_.emplace_back(m, std::move(cells), t.g_);

        std::vector<std::uint32_t> by_pri(n), local_pri(n);
        std::iota(by_pri.begin(), by_pri.end(), 0u);
        std::sort(by_pri.begin(), by_pri.end(), [&](std::uint32_t a, std::uint32_t b) {
            return padded.priority(w.xs[a]) < padded.priority(w.xs[b]);
        });
        for (std::uint32_t r = 0; r < n; ++r) {
            local_pri[by_pri[r]] = r;
        }
        PointSet local(local_y, local_pri);
        std::uint32_t lambda = t.plan_.lambda_for(n);
        if (t.two_sided_of_.size() < t.nodes_.size()) {
            t.two_sided_of_.resize(t.nodes_.size(), {kNoSegment, kNoSegment, kNoSegment, kNoSegment});
        }
        for (int o = 0; o < 4; ++o) {
            auto orient = static_cast<Orientation>(o);
            t.two_sided_of_[w.node][o] = static_cast<std::uint32_t>(t.two_sided_.size());
            t.two_sided_.push_back(TwoSidedIndex::build(reflect(local, orient), lambda, orient));
        }
        t.nodes_[w.node] = nd;
    }
    t.two_sided_of_.resize(t.nodes_.size(), {kNoSegment, kNoSegment, kNoSegment, kNoSegment});
    return t;
}

const TwoSidedIndex& RangeMaxTree::two_sided(std::uint32_t node, Orientation o) const {
    std::uint32_t id = two_sided_of_.at(node)[static_cast<int>(o)];
    if (id == kNoSegment) {
        throw std::out_of_range("node " + std::to_string(node) + " has no two-sided index");
    }
    return two_sided_[id];
}

TreeSummary RangeMaxTree::summary() const {
    TreeSummary s;
    s.nodes = nodes_.size();
    s.depth = depth_;
    s.two_sided = two_sided_.size();
    for (const auto& nd : nodes_) {
        s.leaves += nd.leaf;
    }
    for (const auto& idx : two_sided_) {
        s.budget_violations += !idx.budget().ok();
    }
    return s;
}

std::vector<TwoSidedBudget> RangeMaxTree::budgets() const {
    std::vector<TwoSidedBudget> out;
    out.reserve(two_sided_.size());
    for (const auto& idx : two_sided_) {
        out.push_back(idx.budget());
    }
    return out;
}

// ------------------------------------------------------------------ query

std::optional<Candidate> RangeMaxTree::candidate_of(std::uint32_t top_x) const {
    auto pad = static_cast<std::uint32_t>(plan_.N - n_);
    return Candidate{top_x, g_.X(top_x), g_.priority(top_x) - pad};
}

namespace {

QueryRect clip(const QueryRect& r, const Box& b) {
    return {std::max<Coord>(r.x_lo, b.x_lo), std::min<Coord>(r.x_hi, b.x_hi),
            std::max<Coord>(r.y_lo, b.y_lo), std::min<Coord>(r.y_hi, b.y_hi)};
}

} // namespace

std::vector<Piece> RangeMaxTree::decompose(std::uint32_t node, const QueryRect& rect) const {
    std::vector<Piece> out;
    const TreeNode& nd = nodes_.at(node);
    const NodeHeader& h = nd.header;
    QueryRect R = clip(rect, h.box);
    if (R.empty()) {
        return out;
    }
    if (nd.leaf) {
        Piece p;
        p.kind = Piece::Kind::kLeafScan;
        p.node = node;
        p.rect = R;
        const Box& b = h.box;
        bool bl = R.x_lo > b.x_lo, br = R.x_hi < b.x_hi, bb = R.y_lo > b.y_lo, bt = R.y_hi < b.y_hi;
        p.terminal = !(bl && br) && !(bb && bt);
        out.push_back(p);
        return out;
    }
    QueryRect lr = localize(g_, h, R);
    if (lr.empty()) {
        return out;
    }
    const Coord last = Coord{h.n} - 1;
    bool bl = lr.x_lo > 0, br = lr.x_hi < last, bb = lr.y_lo > 0, bt = lr.y_hi < last;
    if (!(bl && br) && !(bb && bt)) {
        Piece p;
        p.kind = Piece::Kind::kTwoSided;
        p.terminal = true;
        p.node = node;
        p.rect = R;
        p.orientation = static_cast<Orientation>((bl ? 1 : 0) | (bt ? 2 : 0));
        p.corner = {static_cast<std::uint32_t>(bl ? last - lr.x_lo : lr.x_hi),
                    static_cast<std::uint32_t>(bt ? last - lr.y_hi : lr.y_lo)};
        p.kx = bl ? -R.x_lo : R.x_hi;
        p.ky = bt ? -R.y_hi : R.y_lo;
        out.push_back(p);
        return out;
    }
    const Coord k = nd.k;
    const std::uint32_t m = nd.slabs();
    auto va = static_cast<std::uint32_t>(lr.x_lo / k), vb = static_cast<std::uint32_t>(lr.x_hi / k);
    auto ha = static_cast<std::uint32_t>(lr.y_lo / k), hb = static_cast<std::uint32_t>(lr.y_hi / k);
    auto vchild = [&](std::uint32_t a) { return nd.first_child + a; };
    auto hchild = [&](std::uint32_t b) { return nd.first_child + m + b; };
    auto recurse = [&](std::uint32_t child, const QueryRect& r) {
        QueryRect c = clip(r, nodes_[child].header.box);
        if (!c.empty()) {
            Piece p;
            p.kind = Piece::Kind::kRecurse;
            p.node = child;
            p.rect = c;
            out.push_back(p);
        }
    };
    if (va == vb) {
        recurse(vchild(va), R);
        return out;
    }
    if (ha == hb) {
        recurse(hchild(ha), R);
        return out;
    }
    std::uint32_t vm_lo = lr.x_lo % k == 0 ? va : va + 1;
    std::uint32_t vm_hi = lr.x_hi % k == k - 1 ? vb : vb - 1;
    if (vm_lo != va) {
        recurse(vchild(va), R);
    }
    if (vm_hi != vb) {
        recurse(vchild(vb), R);
    }
    if (vm_lo > vm_hi) {
        return out;
    }
    Coord xm_lo = nodes_[vchild(vm_lo)].header.box.x_lo;
    Coord xm_hi = nodes_[vchild(vm_hi)].header.box.x_hi;
    QueryRect middle{xm_lo, xm_hi, R.y_lo, R.y_hi};
    std::uint32_t hm_lo = lr.y_lo % k == 0 ? ha : ha + 1;
    std::uint32_t hm_hi = lr.y_hi % k == k - 1 ? hb : hb - 1;
    if (hm_lo != ha) {
        recurse(hchild(ha), middle);
    }
    if (hm_hi != hb) {
        recurse(hchild(hb), middle);
    }
    if (hm_lo <= hm_hi) {
        Piece p;
        p.kind = Piece::Kind::kMatrix;
        p.node = node;
        p.rect = {xm_lo, xm_hi, nodes_[hchild(hm_lo)].header.box.y_lo,
                  nodes_[hchild(hm_hi)].header.box.y_hi};
        p.a0 = vm_lo;
        p.a1 = vm_hi;
        p.b0 = hm_lo;
        p.b1 = hm_hi;
        out.push_back(p);
    }
    return out;
}

std::optional<Candidate> RangeMaxTree::matrix_rmq(std::uint32_t node, std::uint32_t a0,
                                                  std::uint32_t a1, std::uint32_t b0,
                                                  std::uint32_t b1) const {
    const TreeNode& nd = nodes_.at(node);
    if (nd.leaf) {
        throw std::invalid_argument("leaf node has no matrix");
    }
    std::uint32_t x = matrices_[nd.matrix].query(g_, a0, a1, b0, b1);
    if (x == SquareMatrix::kEmpty) {
        return std::nullopt;
    }
    return candidate_of(x);
}

std::vector<std::uint32_t> RangeMaxTree::leaf_points(std::uint32_t node) const {
    const TreeNode& nd = nodes_.at(node);
    if (!nd.leaf) {
        throw std::invalid_argument("node " + std::to_string(node) + " is not a leaf");
    }
    auto first = leaf_x_.begin() + nd.leaf_offset;
    return {first, first + nd.header.n};
}

std::optional<Candidate> RangeMaxTree::base_query(std::uint32_t node, const QueryRect& rect) const {
    const TreeNode& nd = nodes_.at(node);
    if (!nd.leaf) {
        throw std::invalid_argument("node " + std::to_string(node) + " is not a leaf");
    }
    auto first = leaf_x_.begin() + nd.leaf_offset;
    auto last = first + nd.header.n;
    auto lo = std::lower_bound(first, last, rect.x_lo,
                               [](std::uint32_t x, Coord v) { return Coord{x} < v; });
    std::uint32_t best = SquareMatrix::kEmpty;
    for (auto it = lo; it != last && Coord{*it} <= rect.x_hi; ++it) {
        Coord y = g_.X(*it);
        if (y >= rect.y_lo && y <= rect.y_hi &&
            (best == SquareMatrix::kEmpty || g_.priority(*it) > g_.priority(best))) {
            best = *it;
        }
    }
    if (best == SquareMatrix::kEmpty) {
        return std::nullopt;
    }
    return candidate_of(best);
}

std::optional<Candidate> RangeMaxTree::answer(const Piece& p, QueryStats* stats) const {
    switch (p.kind) {
    case Piece::Kind::kLeafScan:
        if (stats) {
            ++stats->leaf_scans;
        }
        return base_query(p.node, p.rect);
    case Piece::Kind::kMatrix:
        if (stats) {
            ++stats->matrix;
        }
        return matrix_rmq(p.node, p.a0, p.a1, p.b0, p.b1);
    case Piece::Kind::kTwoSided: {
        if (stats) {
            ++stats->two_sided;
        }
        const TwoSidedIndex& idx = two_sided(p.node, p.orientation);
        NodeProvider prov(g_, nodes_[p.node].header, p.orientation, idx.required_cap());
        auto res = idx.query(prov, p.corner, p.kx, p.ky, stats ? &stats->provider : nullptr);
        if (!res) {
            return std::nullopt;
        }
        return candidate_of(res->x);
    }
    case Piece::Kind::kRecurse:
        break;
    }
    throw std::logic_error("recursion piece has no direct answer");
}

std::optional<Candidate> RangeMaxTree::query(const QueryRect& rect, QueryStats* stats) const {
    if (n_ == 0) {
        return std::nullopt;
    }
    QueryRect R = rect.clamped(n_);
    if (R.empty()) {
        return std::nullopt;
    }
    std::optional<Candidate> best;
    std::vector<std::pair<std::uint32_t, QueryRect>> stack{{0, R}};
    while (!stack.empty()) {
        auto [node, r] = stack.back();
        stack.pop_back();
        std::vector<Piece> pieces = decompose(node, r);
        bool terminal = pieces.size() == 1 && pieces[0].terminal;
        if (stats && !terminal && !pieces.empty()) {
            ++stats->visits;
        }
        for (const Piece& p : pieces) {
            if (p.kind == Piece::Kind::kRecurse) {
                stack.emplace_back(p.node, p.rect);
                continue;
            }
            if (stats) {
                ++stats->candidates;
            }
            keep_best(best, answer(p, stats));
        }
    }
    return best;
}

// ---------------------------------------------------------- serialization

namespace {

void put_column(ByteWriter& out, const std::vector<std::uint64_t>& v) {
    PackedInts(std::span<const std::uint64_t>(v)).serialize(out);
}

std::vector<std::uint64_t> get_column(ByteReader& in, std::size_t expect) {
    PackedInts p = PackedInts::deserialize(in);
    if (p.size() != expect) {
        throw FormatError("node column of length " + std::to_string(p.size()) + ", expected " +
                          std::to_string(expect));
    }
    std::vector<std::uint64_t> v(p.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = p[i];
    }
    return v;
}

void expect_end(const ByteReader& in, const char* section) {
    if (!in.at_end()) {
        throw FormatError(std::string("trailing bytes in section ") + section);
    }
}

} // namespace

void RangeMaxTree::serialize_config(ByteWriter& out) const {
    ComponentScope scope(out, "config");
    out.u64(n_);
    out.u32(plan_.N);
    out.u32(plan_.L);
    out.u32(plan_.leaf_level);
    out.u32(plan_.cfg.base_threshold);
    out.u32(plan_.cfg.lambda_override);
    out.u32(static_cast<std::uint32_t>(depth_));
}

void RangeMaxTree::serialize_globals(ByteWriter& out) const {
    ComponentScope scope(out, "globals");
    g_.serialize(out);
}

void RangeMaxTree::serialize_tree(ByteWriter& out) const {
    ComponentScope scope(out, "tree.nodes");
    out.u64(nodes_.size());
    std::vector<std::uint64_t> cols[10];
    for (const auto& nd : nodes_) {
        const Box& b = nd.header.box;
        cols[0].push_back(b.x_lo);
        cols[1].push_back(b.x_hi);
        cols[2].push_back(b.y_lo);
        cols[3].push_back(b.y_hi);
        cols[4].push_back(nd.header.n);
        cols[5].push_back(nd.header.level);
        cols[6].push_back(nd.leaf ? 0 : nd.k);
        cols[7].push_back(nd.leaf ? 0 : nd.first_child);
        cols[8].push_back(nd.leaf ? 0 : nd.matrix);
        cols[9].push_back(nd.leaf ? nd.leaf_offset : 0);
    }
    for (const auto& c : cols) {
        put_column(out, c);
    }
}

void RangeMaxTree::serialize_matrices(ByteWriter& out) const {
    ComponentScope scope(out, "matrices");
    out.u64(matrices_.size());
    for (const auto& mx : matrices_) {
        out.u32(mx.size());
        std::vector<std::uint64_t> v;
        v.reserve(mx.cells().size());
        for (auto c : mx.cells()) {
            v.push_back(c == SquareMatrix::kEmpty ? 0 : std::uint64_t{c} + 1);
        }
        put_column(out, v);
    }
}

void RangeMaxTree::serialize_two_sided(ByteWriter& out) const {
    {
        ComponentScope scope(out, "twosided.count");
        out.u64(two_sided_.size());
    }
    for (const auto& idx : two_sided_) {
        idx.serialize(out);
    }
}

void RangeMaxTree::serialize_leaves(ByteWriter& out) const {
    ComponentScope scope(out, "leaves");
    PackedInts(std::span<const std::uint32_t>(leaf_x_)).serialize(out);
}

RangeMaxTree RangeMaxTree::deserialize(const Sections& s) {
    RangeMaxTree t;
    {
        ByteReader in(s.config);
        t.n_ = in.u64();
        std::uint32_t N = in.u32();
        std::uint32_t L = in.u32();
        std::uint32_t leaf_level = in.u32();
        BuildConfig cfg;
        cfg.base_threshold = in.u32();
        cfg.lambda_override = in.u32();
        t.depth_ = in.u32();
        expect_end(in, "config");
        if (N == 0 || !std::has_single_bit(N) || t.n_ > N) {
            throw FormatError("config: padded size " + std::to_string(N) + " is invalid");
        }
        t.plan_ = TreePlan::make(N, cfg);
        if (t.plan_.L != L || t.plan_.leaf_level != leaf_level) {
            throw FormatError("config: recursion plan does not match padded size");
        }
    }
    {
        ByteReader in(s.globals);
        t.g_ = Globals::deserialize(in);
        expect_end(in, "globals");
        if (t.g_.size() != t.plan_.N) {
            throw FormatError("globals size differs from padded size");
        }
    }
    std::vector<bool> is_leaf;
    {
        ByteReader in(s.tree);
        std::uint64_t count = in.u64();
        if (count == 0 || count > 16ull * t.plan_.N + 16) {
            throw FormatError("tree: node count " + std::to_string(count) + " is invalid");
        }
        std::vector<std::uint64_t> cols[10];
        for (auto& c : cols) {
            c = get_column(in, count);
        }
        expect_end(in, "tree");
        for (std::size_t i = 0; i < count; ++i) {
            TreeNode nd;
            nd.header.box = {static_cast<std::uint32_t>(cols[0][i]),
                             static_cast<std::uint32_t>(cols[1][i]),
                             static_cast<std::uint32_t>(cols[2][i]),
                             static_cast<std::uint32_t>(cols[3][i])};
            nd.header.n = static_cast<std::uint32_t>(cols[4][i]);
            nd.header.level = static_cast<std::uint32_t>(cols[5][i]);
            nd.k = static_cast<std::uint32_t>(cols[6][i]);
            nd.leaf = nd.k == 0;
            nd.first_child = static_cast<std::uint32_t>(cols[7][i]);
            nd.matrix = static_cast<std::uint32_t>(cols[8][i]);
            nd.leaf_offset = static_cast<std::uint32_t>(cols[9][i]);
            if (!nd.leaf && (nd.header.n % nd.k != 0 ||
                             nd.first_child + 2ull * (nd.header.n / nd.k) > count)) {
                throw FormatError("tree: node " + std::to_string(i) + " has bad children");
            }
            t.nodes_.push_back(nd);
        }
    }
    {
        ByteReader in(s.matrices);
        std::uint64_t count = in.u64();
        if (count > t.nodes_.size()) {
            throw FormatError("matrices: count exceeds node count");
        }
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uint32_t m = in.u32();
            auto v = get_column(in, std::size_t{m} * m);
            std::vector<std::uint32_t> cells;
            cells.reserve(v.size());
            for (auto c : v) {
                if (c > t.plan_.N) {
                    throw FormatError("matrices: cell value out of range");
                }
                cells.push_back(c == 0 ? SquareMatrix::kEmpty : static_cast<std::uint32_t>(c - 1));
            }
            t.matrices_.emplace_back(m, std::move(cells), t.g_);
        }
        expect_end(in, "matrices");
    }
    {
        ByteReader in(s.twosided);
        std::uint64_t count = in.u64();
        if (count > 4 * t.nodes_.size()) {
            throw FormatError("twosided: count exceeds node count");
        }
        for (std::uint64_t i = 0; i < count; ++i) {
            t.two_sided_.push_back(TwoSidedIndex::deserialize(in));
        }
        expect_end(in, "twosided");
    }
    {
        ByteReader in(s.leaves);
        PackedInts p = PackedInts::deserialize(in);
        expect_end(in, "leaves");
        t.leaf_x_.resize(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            t.leaf_x_[i] = static_cast<std::uint32_t>(p[i]);
        }
    }
    t.two_sided_of_.assign(t.nodes_.size(), {kNoSegment, kNoSegment, kNoSegment, kNoSegment});
    std::uint32_t next = 0;
    for (std::uint32_t i = 0; i < t.nodes_.size(); ++i) {
        const TreeNode& nd = t.nodes_[i];
        if (nd.leaf) {
            if (std::size_t{nd.leaf_offset} + nd.header.n > t.leaf_x_.size()) {
                throw FormatError("leaves: node " + std::to_string(i) + " overruns the point list");
            }
            continue;
        }
        if (nd.matrix >= t.matrices_.size() || t.matrices_[nd.matrix].size() != nd.slabs()) {
            throw FormatError("tree: node " + std::to_string(i) + " has a bad matrix reference");
        }
        for (int o = 0; o < 4; ++o) {
            if (next >= t.two_sided_.size() || t.two_sided_[next].size() != nd.header.n ||
                t.two_sided_[next].orientation() != static_cast<Orientation>(o)) {
                throw FormatError("twosided: index for node " + std::to_string(i) +
                                  " is missing or mismatched");
            }
            t.two_sided_of_[i][o] = next++;
        }
    }
    if (next != t.two_sided_.size()) {
        throw FormatError("twosided: unreferenced indexes");
    }
    return t;
}

bool operator==(const RangeMaxTree& a, const RangeMaxTree& b) {
    return a.n_ == b.n_ && a.plan_.N == b.plan_.N && a.plan_.cfg == b.plan_.cfg &&
           a.depth_ == b.depth_ && a.g_ == b.g_ && a.nodes_ == b.nodes_ &&
           a.matrices_ == b.matrices_ && a.two_sided_ == b.two_sided_ && a.leaf_x_ == b.leaf_x_;
}

} // namespace rangemax

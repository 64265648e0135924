#ifndef RANGEMAX_TREE_HPP
#define RANGEMAX_TREE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rangemax/core.hpp"
#include "rangemax/globals.hpp"
#include "rangemax/serialize.hpp"
#include "rangemax/slab_mapping.hpp"
#include "rangemax/two_sided.hpp"

namespace rangemax {

struct BuildConfig {
    // nodes with n <= base_threshold become leaves; 0 = level rule
    std::uint32_t base_threshold = 0;
    // fixed lambda for every two-sided index; 0 = ceil(sqrt(log2 n))
    std::uint32_t lambda_override = 0;

    friend bool operator==(const BuildConfig&, const BuildConfig&) = default;
};

// Arithmetic of the recursion, for a padded top-level size N (power of two).
struct TreePlan {
    std::uint32_t N = 1;
    std::uint32_t L = 0;           // log2 N
    std::uint32_t leaf_level = 0;  // first r with 2^r >= L / log2 L
    BuildConfig cfg;

    static TreePlan make(std::uint32_t padded_n, const BuildConfig& cfg);
    // 2^floor(log2 sqrt(n L))
    std::uint32_t k_for(std::uint32_t n) const;
    bool is_leaf(std::uint32_t n, std::uint32_t level) const;
    std::uint32_t lambda_for(std::uint32_t n) const;
};

struct TreeNode {
    NodeHeader header;
    std::uint32_t k = 0;            // slab width, 0 for leaves
    std::uint32_t first_child = 0;  // m vertical children then m horizontal
    std::uint32_t matrix = 0;       // index into the matrix table
    std::uint32_t leaf_offset = 0;  // into the leaf point list
    bool leaf = true;

    std::uint32_t slabs() const { return leaf ? 0 : header.n / k; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/*
 * Square-max matrix of one node with a 2D sparse table. Cells hold the
 * top-level x of the maximum point, or kEmpty.
 */
class SquareMatrix {
public:
    static constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();

    SquareMatrix() = default;
    SquareMatrix(std::uint32_t m, std::vector<std::uint32_t> cells, const Globals& g);

    std::uint32_t size() const { return m_; }
    std::uint32_t cell(std::uint32_t a, std::uint32_t b) const { return cells_[a * m_ + b]; }
    const std::vector<std::uint32_t>& cells() const { return cells_; }
    // vertical slabs [a0, a1] x horizontal slabs [b0, b1]
    std::uint32_t query(const Globals& g, std::uint32_t a0, std::uint32_t a1, std::uint32_t b0,
                        std::uint32_t b1) const;
    std::size_t table_bits() const { return table_.size() * 32; }

    friend bool operator==(const SquareMatrix& a, const SquareMatrix& b) {
        return a.m_ == b.m_ && a.cells_ == b.cells_;
    }

private:
    static std::uint32_t better(const Globals& g, std::uint32_t a, std::uint32_t b);
    std::uint32_t at(unsigned la, unsigned lb, std::uint32_t a, std::uint32_t b) const;

    std::uint32_t m_ = 0;
    unsigned levels_ = 0;
    std::vector<std::uint32_t> cells_;
    std::vector<std::uint32_t> table_;  // [la][lb][a][b], m x m per level pair
};

struct QueryStats {
    std::size_t visits = 0;
    std::size_t candidates = 0;
    std::size_t two_sided = 0;
    std::size_t matrix = 0;
    std::size_t leaf_scans = 0;
    TwoSidedStats provider;
};

struct Piece {
    enum class Kind : std::uint8_t { kRecurse, kTwoSided, kMatrix, kLeafScan };
    Kind kind = Kind::kLeafScan;
    bool terminal = false;   // answered with no recursion from a two-sided shape
    std::uint32_t node = 0;  // target node (the child for kRecurse)
    QueryRect rect;          // top-level sub-rectangle answered by this piece
    Orientation orientation = Orientation::kIdentity;
    Point corner;            // oriented local corner of a two-sided piece
    Coord kx = 0;
    Coord ky = 0;
    std::uint32_t a0 = 0, a1 = 0, b0 = 0, b1 = 0;  // matrix cell range
};

struct TreeSummary {
    std::size_t nodes = 0;
    std::size_t leaves = 0;
    std::size_t depth = 0;
    std::size_t two_sided = 0;
    std::size_t budget_violations = 0;
};

/*
 * The recursive structure. Input points are padded to a power of two with
 * points above and to the right of everything, carrying the lowest
 * priorities; they never fall inside a clamped query.
 */
class RangeMaxTree {
public:
    RangeMaxTree() = default;
    static RangeMaxTree build(const PointSet& ps, const BuildConfig& cfg = {});

    std::size_t size() const { return n_; }
    std::uint32_t padded_size() const { return plan_.N; }
    const TreePlan& plan() const { return plan_; }
    const Globals& globals() const { return g_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const std::vector<SquareMatrix>& matrices() const { return matrices_; }
    const TwoSidedIndex& two_sided(std::uint32_t node, Orientation o) const;
    std::size_t depth() const { return depth_; }
    TreeSummary summary() const;
    // budget of every two-sided index, in node order then orientation
    std::vector<TwoSidedBudget> budgets() const;

    std::optional<Candidate> query(const QueryRect& rect, QueryStats* stats = nullptr) const;

    // pieces produced at one node for a top-level rect already inside its box
    std::vector<Piece> decompose(std::uint32_t node, const QueryRect& rect) const;
    std::optional<Candidate> matrix_rmq(std::uint32_t node, std::uint32_t a0, std::uint32_t a1,
                                        std::uint32_t b0, std::uint32_t b1) const;
    std::optional<Candidate> base_query(std::uint32_t node, const QueryRect& rect) const;
    // top-level x of the node's points in increasing x (leaves only)
    std::vector<std::uint32_t> leaf_points(std::uint32_t node) const;

    // sections: config, globals, tree, matrices, twosided, leaves
    void serialize_config(ByteWriter& out) const;
    void serialize_globals(ByteWriter& out) const;
    void serialize_tree(ByteWriter& out) const;
    void serialize_matrices(ByteWriter& out) const;
    void serialize_two_sided(ByteWriter& out) const;
    void serialize_leaves(ByteWriter& out) const;

    struct Sections {
        std::span<const std::uint8_t> config, globals, tree, matrices, twosided, leaves;
    };
    static RangeMaxTree deserialize(const Sections& s);

    friend bool operator==(const RangeMaxTree& a, const RangeMaxTree& b);

private:
    std::optional<Candidate> candidate_of(std::uint32_t top_x) const;
    std::optional<Candidate> answer(const Piece& p, QueryStats* stats) const;

    std::size_t n_ = 0;  // real points
    TreePlan plan_;
    std::size_t depth_ = 0;
    Globals g_;
    std::vector<TreeNode> nodes_;
    std::vector<SquareMatrix> matrices_;
    std::vector<std::array<std::uint32_t, 4>> two_sided_of_;  // per node
    std::vector<TwoSidedIndex> two_sided_;
    std::vector<std::uint32_t> leaf_x_;
};

} // namespace rangemax

#endif

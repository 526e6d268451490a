#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

namespace picard {

using Eigen::Index;

/// Tensor-product grid over a compact box. Nodes are the Cartesian product of
/// the axis coordinate lists, indexed lexicographically (last axis fastest).
class Grid {
public:
    explicit Grid(std::vector<Eigen::VectorXd> axes);

    int dimension() const { return static_cast<int>(axes_.size()); }
    Index num_nodes() const { return num_nodes_; }
    const Eigen::VectorXd& axis(int k) const { return axes_[static_cast<size_t>(k)]; }
    Index axis_size(int k) const { return axes_[static_cast<size_t>(k)].size(); }

    /// Coordinates of node i in R^n.
    Eigen::VectorXd node_coords(Index i) const;

    /// Lexicographic index -> per-axis multi-index.
    void multi_index(Index i, std::span<Index> out) const;
    std::vector<Index> multi_index(Index i) const;

    /// Per-axis multi-index -> lexicographic index.
    Index lex_index(std::span<const Index> multi) const;

    Eigen::VectorXd lower_corner() const;
    Eigen::VectorXd upper_corner() const;

    /// Volume of the bounding box (product of axis spans).
    double volume() const;

private:
    std::vector<Eigen::VectorXd> axes_;
    std::vector<Index> strides_;
    Index num_nodes_ = 0;
};

/// Validates axes and constructs the grid. Rejects empty or non-strictly
/// increasing axes, reporting the offending axis index.
Grid build_tensor_grid(std::vector<Eigen::VectorXd> axes);

/// Per-node quadrature weights; the discrete stand-in for the measure mu.
struct Measure {
    Eigen::VectorXd weights;

    double total() const { return weights.sum(); }
};

/// 1-D trapezoid weights for the first prefix_len points of an axis.
/// A single-point prefix gets weight zero (degenerate axis).
Eigen::VectorXd trapezoid_axis_weights(const Eigen::VectorXd& coords, Index prefix_len);

/// Product trapezoid rule: node weight is the product of per-axis 1-D
/// trapezoid weights. The total equals the box volume.
Measure trapezoid_measure(const Grid& grid);

/// Per-node index sets H(i) realizing a binary relation on grid nodes.
/// Full and Volterra relations are stored structurally (no materialized
/// sets), general relations as sorted compressed rows.
class Relation {
public:
    enum class Kind { general, full, volterra };

    /// General relation from explicit per-node sets (sorted internally).
    explicit Relation(std::vector<std::vector<Index>> sets);

    Kind kind() const { return kind_; }
    Index num_nodes() const { return num_nodes_; }

    Index set_size(Index i) const;
    bool contains(Index i, Index j) const;

    /// The sorted set H(i).
    std::vector<Index> set(Index i) const;

    /// Calls f(j) for every j in H(i), in ascending order of j.
    template <class F>
    void for_each(Index i, F&& f) const;

    /// Axis sizes of the underlying grid (Volterra kind only).
    const std::vector<Index>& axis_sizes() const { return axis_sizes_; }

    friend Relation relation_full(const Grid& grid);
    friend Relation relation_volterra(const Grid& grid);

private:
    Relation() = default;

    Kind kind_ = Kind::general;
    Index num_nodes_ = 0;

    // general kind
    std::vector<Index> offsets_;
    std::vector<Index> indices_;

    // volterra kind
    std::vector<Index> axis_sizes_;
    std::vector<Index> strides_;
};

/// H(i) = all nodes, for every i. The Fredholm relation H = X^2.
Relation relation_full(const Grid& grid);

/// H(i) = { j : coords(j) <= coords(i) coordinatewise }. Requires all grid
/// coordinates nonnegative.
Relation relation_volterra(const Grid& grid);

/// Axiom check result. A false flag carries the first counterexample.
struct RelationReport {
    bool reflexive = true;
    bool transitive = true;
    bool cover = true;

    Index reflexive_witness = -1;               // i with i not in H(i)
    Index transitive_witness_i = -1;            // j in H(i) but H(j) !<= H(i)
    Index transitive_witness_j = -1;
    Index transitive_witness_k = -1;            // k in H(j) \ H(i)
    Index cover_witness = -1;                   // node in no H(i)

    bool all() const { return reflexive && transitive && cover; }
};

/// Checks reflexivity, transitivity, and the cover condition U H(i) = X.
/// Out-of-range indices are a structural error (throws), not an axiom failure.
RelationReport validate_relation(const Relation& relation);

/// Sampled map X -> R^m: one row of values per grid node.
struct GridFunction {
    Eigen::MatrixXd values;  // N x m

    Index num_nodes() const { return values.rows(); }
    Index codomain_dim() const { return values.cols(); }

    bool finite() const { return values.allFinite(); }
    bool positive() const { return (values.array() > 0.0).all(); }

    static GridFunction constant(Index num_nodes, Index m, double value);

    /// Samples fn(coords) -> VectorXd of length m at every node.
    template <class F>
    static GridFunction sample(const Grid& grid, Index m, F&& fn);

    /// Samples a scalar fn(coords) -> double at every node.
    template <class F>
    static GridFunction sample_scalar(const Grid& grid, F&& fn);
};

/// Quadrature weights for integrating over H(i). Volterra relations use
/// trapezoid weights recomputed on the sub-grid induced by the node's
/// multi-index prefix; other relations use global weights masked to H(i).
class QuadratureRows {
public:
    QuadratureRows(const Grid& grid, const Measure& measure, const Relation& relation);

    /// Calls f(j, w) for every j in H(i) with its quadrature weight w,
    /// ascending in j.
    template <class F>
    void for_each(Index i, F&& f) const {
        if (!volterra_) {
            relation_->for_each(i, [&](Index j) { f(j, measure_->weights[j]); });
            return;
        }
        const int n = grid_->dimension();
        std::vector<Index> mi(static_cast<size_t>(n)), mj(static_cast<size_t>(n));
        grid_->multi_index(i, mi);
        relation_->for_each(i, [&](Index j) {
            grid_->multi_index(j, mj);
            double w = 1.0;
            for (int k = 0; k < n; ++k)
                w *= prefix_[static_cast<size_t>(k)](mi[static_cast<size_t>(k)],
                                                     mj[static_cast<size_t>(k)]);
            f(j, w);
        });
    }

private:
    const Grid* grid_;
    const Measure* measure_;
    const Relation* relation_;
    bool volterra_;
    std::vector<Eigen::MatrixXd> prefix_;  // per-axis prefix trapezoid weight tables
};

/// Coordinates of every node, indexed by node.
std::vector<Eigen::VectorXd> all_node_coords(const Grid& grid);

enum class InterpMode { nearest, multilinear };

/// Evaluates a grid function at an arbitrary point of the bounding box.
/// Throws std::domain_error when the point lies outside the box.
Eigen::VectorXd interpolate(const Grid& grid, const GridFunction& x,
                            const Eigen::VectorXd& point, InterpMode mode);

// --- template definitions ---

template <class F>
void Relation::for_each(Index i, F&& f) const {
    switch (kind_) {
        case Kind::full:
            for (Index j = 0; j < num_nodes_; ++j) f(j);
            return;
        case Kind::general: {
            for (Index p = offsets_[static_cast<size_t>(i)];
                 p < offsets_[static_cast<size_t>(i) + 1]; ++p)
                f(indices_[static_cast<size_t>(p)]);
            return;
        }
        case Kind::volterra: {
            const int n = static_cast<int>(axis_sizes_.size());
            std::vector<Index> top(static_cast<size_t>(n));
            Index rem = i;
            for (int k = 0; k < n; ++k) {
                top[static_cast<size_t>(k)] = rem / strides_[static_cast<size_t>(k)];
                rem %= strides_[static_cast<size_t>(k)];
            }
            // odometer over the sub-box [0, top], ascending lexicographic
            std::vector<Index> cur(static_cast<size_t>(n), 0);
            Index j = 0;
            for (;;) {
                f(j);
                int k = n - 1;
                while (k >= 0 && cur[static_cast<size_t>(k)] == top[static_cast<size_t>(k)]) {
                    j -= cur[static_cast<size_t>(k)] * strides_[static_cast<size_t>(k)];
                    cur[static_cast<size_t>(k)] = 0;
                    --k;
                }
                if (k < 0) return;
                ++cur[static_cast<size_t>(k)];
                j += strides_[static_cast<size_t>(k)];
            }
        }
    }
}

template <class F>
GridFunction GridFunction::sample(const Grid& grid, Index m, F&& fn) {
    GridFunction g;
    g.values.resize(grid.num_nodes(), m);
    for (Index i = 0; i < grid.num_nodes(); ++i) {
        Eigen::VectorXd v = fn(grid.node_coords(i));
        if (v.size() != m) throw std::invalid_argument("sample: wrong codomain dimension");
        g.values.row(i) = v.transpose();
    }
    return g;
}

template <class F>
GridFunction GridFunction::sample_scalar(const Grid& grid, F&& fn) {
    GridFunction g;
    g.values.resize(grid.num_nodes(), 1);
    for (Index i = 0; i < grid.num_nodes(); ++i)
        g.values(i, 0) = fn(grid.node_coords(i));
    return g;
}

}  // namespace picard

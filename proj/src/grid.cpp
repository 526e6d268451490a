#include "picard/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace picard {

Grid::Grid(std::vector<Eigen::VectorXd> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw std::invalid_argument("grid: needs at least one axis");
    for (size_t k = 0; k < axes_.size(); ++k) {
        const auto& a = axes_[k];
        if (a.size() == 0)
            throw std::invalid_argument("grid: axis " + std::to_string(k) + " is empty");
        if (!a.allFinite())
            throw std::invalid_argument("grid: axis " + std::to_string(k) +
                                        " has non-finite coordinates");
        for (Index p = 1; p < a.size(); ++p)
            if (!(a[p - 1] < a[p]))
                throw std::invalid_argument("grid: axis " + std::to_string(k) +
                                            " is not strictly increasing");
    }
    strides_.assign(axes_.size(), 1);
    num_nodes_ = 1;
    for (size_t k = axes_.size(); k-- > 0;) {
        strides_[k] = num_nodes_;
        num_nodes_ *= axes_[k].size();
    }
}

Eigen::VectorXd Grid::node_coords(Index i) const {
    Eigen::VectorXd c(dimension());
    Index rem = i;
    for (size_t k = 0; k < axes_.size(); ++k) {
        const Index q = rem / strides_[k];
        rem %= strides_[k];
        c[static_cast<Index>(k)] = axes_[k][q];
    }
    return c;
}

void Grid::multi_index(Index i, std::span<Index> out) const {
    Index rem = i;
    for (size_t k = 0; k < axes_.size(); ++k) {
        out[k] = rem / strides_[k];
        rem %= strides_[k];
    }
}

std::vector<Index> Grid::multi_index(Index i) const {
    std::vector<Index> m(axes_.size());
    multi_index(i, m);
    return m;
}

Index Grid::lex_index(std::span<const Index> multi) const {
    Index i = 0;
    for (size_t k = 0; k < axes_.size(); ++k) i += multi[k] * strides_[k];
    return i;
}

Eigen::VectorXd Grid::lower_corner() const {
    Eigen::VectorXd c(dimension());
    for (size_t k = 0; k < axes_.size(); ++k) c[static_cast<Index>(k)] = axes_[k][0];
    return c;
}

Eigen::VectorXd Grid::upper_corner() const {
    Eigen::VectorXd c(dimension());
    for (size_t k = 0; k < axes_.size(); ++k)
        c[static_cast<Index>(k)] = axes_[k][axes_[k].size() - 1];
    return c;
}

double Grid::volume() const {
    double v = 1.0;
    for (const auto& a : axes_) v *= a[a.size() - 1] - a[0];
    return v;
}

Grid build_tensor_grid(std::vector<Eigen::VectorXd> axes) { return Grid(std::move(axes)); }

Eigen::VectorXd trapezoid_axis_weights(const Eigen::VectorXd& coords, Index prefix_len) {
    if (prefix_len < 1 || prefix_len > coords.size())
        throw std::invalid_argument("trapezoid_axis_weights: bad prefix length");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(prefix_len);
    if (prefix_len == 1) return w;  // degenerate axis, zero measure
    w[0] = 0.5 * (coords[1] - coords[0]);
    for (Index p = 1; p + 1 < prefix_len; ++p) w[p] = 0.5 * (coords[p + 1] - coords[p - 1]);
    w[prefix_len - 1] = 0.5 * (coords[prefix_len - 1] - coords[prefix_len - 2]);
    return w;
}

Measure trapezoid_measure(const Grid& grid) {
    const int n = grid.dimension();
    std::vector<Eigen::VectorXd> axis_w(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        axis_w[static_cast<size_t>(k)] = trapezoid_axis_weights(grid.axis(k), grid.axis_size(k));

    Measure m;
    m.weights.resize(grid.num_nodes());
    std::vector<Index> multi(static_cast<size_t>(n));
    for (Index i = 0; i < grid.num_nodes(); ++i) {
        grid.multi_index(i, multi);
        double w = 1.0;
        for (int k = 0; k < n; ++k) w *= axis_w[static_cast<size_t>(k)][multi[static_cast<size_t>(k)]];
        m.weights[i] = w;
    }
    return m;
}

Relation::Relation(std::vector<std::vector<Index>> sets) {
    kind_ = Kind::general;
    num_nodes_ = static_cast<Index>(sets.size());
    offsets_.assign(sets.size() + 1, 0);
    size_t total = 0;
    for (const auto& s : sets) total += s.size();
    indices_.reserve(total);
    for (size_t i = 0; i < sets.size(); ++i) {
        auto s = sets[i];
        std::sort(s.begin(), s.end());
        for (Index j : s) {
            if (j < 0 || j >= num_nodes_)
                throw std::out_of_range("relation: index " + std::to_string(j) +
                                        " out of range in H(" + std::to_string(i) + ")");
            indices_.push_back(j);
        }
        offsets_[i + 1] = static_cast<Index>(indices_.size());
    }
}

Index Relation::set_size(Index i) const {
    switch (kind_) {
        case Kind::full:
            return num_nodes_;
        case Kind::general:
            return offsets_[static_cast<size_t>(i) + 1] - offsets_[static_cast<size_t>(i)];
        case Kind::volterra: {
            Index size = 1, rem = i;
            for (size_t k = 0; k < axis_sizes_.size(); ++k) {
                size *= rem / strides_[k] + 1;
                rem %= strides_[k];
            }
            return size;
        }
    }
    return 0;
}

bool Relation::contains(Index i, Index j) const {
    switch (kind_) {
        case Kind::full:
            return j >= 0 && j < num_nodes_;
        case Kind::general: {
            const auto begin = indices_.begin() + offsets_[static_cast<size_t>(i)];
            const auto end = indices_.begin() + offsets_[static_cast<size_t>(i) + 1];
            return std::binary_search(begin, end, j);
        }
        case Kind::volterra: {
            Index ri = i, rj = j;
            for (size_t k = 0; k < axis_sizes_.size(); ++k) {
                if (rj / strides_[k] > ri / strides_[k]) return false;
                ri %= strides_[k];
                rj %= strides_[k];
            }
            return true;
        }
    }
    return false;
}

std::vector<Index> Relation::set(Index i) const {
    std::vector<Index> s;
    s.reserve(static_cast<size_t>(set_size(i)));
    for_each(i, [&](Index j) { s.push_back(j); });
    return s;
}

Relation relation_full(const Grid& grid) {
    Relation r;
    r.kind_ = Relation::Kind::full;
    r.num_nodes_ = grid.num_nodes();
    return r;
}

Relation relation_volterra(const Grid& grid) {
    for (int k = 0; k < grid.dimension(); ++k)
        if (grid.axis(k)[0] < 0.0)
            throw std::invalid_argument("relation_volterra: axis " + std::to_string(k) +
                                        " has negative coordinates");
    Relation r;
    r.kind_ = Relation::Kind::volterra;
    r.num_nodes_ = grid.num_nodes();
    r.axis_sizes_.resize(static_cast<size_t>(grid.dimension()));
    r.strides_.assign(static_cast<size_t>(grid.dimension()), 1);
    Index acc = 1;
    for (size_t k = r.axis_sizes_.size(); k-- > 0;) {
        r.axis_sizes_[k] = grid.axis_size(static_cast<int>(k));
        r.strides_[k] = acc;
        acc *= r.axis_sizes_[k];
    }
    return r;
}

RelationReport validate_relation(const Relation& relation) {
    const Index n = relation.num_nodes();
    RelationReport rep;

    std::vector<char> covered(static_cast<size_t>(n), 0);
    for (Index i = 0; i < n && (rep.reflexive || rep.transitive); ++i) {
        if (rep.reflexive && !relation.contains(i, i)) {
            rep.reflexive = false;
            rep.reflexive_witness = i;
        }
        if (rep.transitive) {
            relation.for_each(i, [&](Index j) {
                covered[static_cast<size_t>(j)] = 1;
                if (!rep.transitive) return;
                relation.for_each(j, [&](Index k) {
                    if (!rep.transitive) return;
                    if (!relation.contains(i, k)) {
                        rep.transitive = false;
                        rep.transitive_witness_i = i;
                        rep.transitive_witness_j = j;
                        rep.transitive_witness_k = k;
                    }
                });
            });
        }
    }
    // finish cover marking if the loop above exited early
    for (Index i = 0; i < n; ++i)
        relation.for_each(i, [&](Index j) { covered[static_cast<size_t>(j)] = 1; });
    for (Index j = 0; j < n; ++j)
        if (!covered[static_cast<size_t>(j)]) {
            rep.cover = false;
            rep.cover_witness = j;
            break;
        }
    return rep;
}

QuadratureRows::QuadratureRows(const Grid& grid, const Measure& measure,
                               const Relation& relation)
    : grid_(&grid),
      measure_(&measure),
      relation_(&relation),
      volterra_(relation.kind() == Relation::Kind::volterra) {
    if (measure.weights.size() != grid.num_nodes() || relation.num_nodes() != grid.num_nodes())
        throw std::invalid_argument("quadrature rows: grid/measure/relation size mismatch");
    if (volterra_) {
        prefix_.resize(static_cast<size_t>(grid.dimension()));
        for (int k = 0; k < grid.dimension(); ++k) {
            const Index M = grid.axis_size(k);
            Eigen::MatrixXd W = Eigen::MatrixXd::Zero(M, M);
            for (Index a = 0; a < M; ++a)
                W.row(a).head(a + 1) = trapezoid_axis_weights(grid.axis(k), a + 1).transpose();
            prefix_[static_cast<size_t>(k)] = std::move(W);
        }
    }
}

std::vector<Eigen::VectorXd> all_node_coords(const Grid& grid) {
    std::vector<Eigen::VectorXd> coords(static_cast<size_t>(grid.num_nodes()));
    for (Index i = 0; i < grid.num_nodes(); ++i)
        coords[static_cast<size_t>(i)] = grid.node_coords(i);
    return coords;
}

GridFunction GridFunction::constant(Index num_nodes, Index m, double value) {
    GridFunction g;
    g.values = Eigen::MatrixXd::Constant(num_nodes, m, value);
    return g;
}

Eigen::VectorXd interpolate(const Grid& grid, const GridFunction& x,
                            const Eigen::VectorXd& point, InterpMode mode) {
    const int n = grid.dimension();
    if (point.size() != n) throw std::invalid_argument("interpolate: wrong point dimension");

    std::vector<Index> lo(static_cast<size_t>(n));
    std::vector<double> frac(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        const auto& a = grid.axis(k);
        const double p = point[k];
        const double span = a[a.size() - 1] - a[0];
        const double slack = 1e-12 * std::max(1.0, std::abs(span));
        if (p < a[0] - slack || p > a[a.size() - 1] + slack)
            throw std::domain_error("interpolate: point outside grid bounding box on axis " +
                                    std::to_string(k));
        // bracketing interval [a[q], a[q+1]]
        Index q = std::upper_bound(a.data(), a.data() + a.size(), p) - a.data() - 1;
        q = std::clamp<Index>(q, 0, a.size() - 2 >= 0 ? a.size() - 2 : 0);
        lo[static_cast<size_t>(k)] = q;
        if (a.size() == 1) {
            frac[static_cast<size_t>(k)] = 0.0;
        } else {
            const double h = a[q + 1] - a[q];
            frac[static_cast<size_t>(k)] = std::clamp((p - a[q]) / h, 0.0, 1.0);
        }
    }

    if (mode == InterpMode::nearest) {
        std::vector<Index> multi(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            const size_t sk = static_cast<size_t>(k);
            multi[sk] = lo[sk] + (frac[sk] > 0.5 && grid.axis_size(k) > 1 ? 1 : 0);
        }
        return x.values.row(grid.lex_index(multi)).transpose();
    }

    // multilinear over the 2^n cell corners
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.codomain_dim());
    std::vector<Index> multi(static_cast<size_t>(n));
    for (unsigned corner = 0; corner < (1u << n); ++corner) {
        double w = 1.0;
        for (int k = 0; k < n; ++k) {
            const size_t sk = static_cast<size_t>(k);
            const bool hi = (corner >> k) & 1u;
            if (grid.axis_size(k) == 1) {
                if (hi) { w = 0.0; break; }
                multi[sk] = 0;
                continue;
            }
            w *= hi ? frac[sk] : 1.0 - frac[sk];
            multi[sk] = lo[sk] + (hi ? 1 : 0);
        }
        if (w != 0.0) out += w * x.values.row(grid.lex_index(multi)).transpose();
    }
    return out;
}

}  // namespace picard

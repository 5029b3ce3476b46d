#include "subspace/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "subspace/kernels.hpp"

namespace subspace {

namespace {

Eigen::MatrixXd unit_columns(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out = x;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const double norm = out.col(j).norm();
        if (norm > 0.0) out.col(j) /= norm;
    }
    return out;
}

/// Symmetric k-NN connectivity: edge when either endpoint ranks the other
/// among its k nearest (Euclidean; ties broken by index).
Eigen::MatrixXd knn_adjacency(const Eigen::MatrixXd& sqdist, int k) {
    const Eigen::Index n = sqdist.rows();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            if (sqdist(i, a) != sqdist(i, b)) return sqdist(i, a) < sqdist(i, b);
            return a < b;
        });
        int taken = 0;
        for (Eigen::Index idx : order) {
            if (idx == i) continue;
            if (taken == k) break;
            s(i, idx) = 1.0;
            s(idx, i) = 1.0;
            ++taken;
        }
    }
    return s;
}

/// Dense weights over all distinct pairs of the given columns.
Eigen::MatrixXd full_weights(const Eigen::MatrixXd& points, const WeightScheme& scheme) {
    const Eigen::Index n = points.cols();
    switch (scheme.kind) {
    case WeightKind::DotProduct: {
        Eigen::MatrixXd s = kernels::pairwise_dot(unit_columns(points)).cwiseMax(0.0);
        s.diagonal().setZero();
        return s;
    }
    case WeightKind::HeatKernel: {
        Eigen::MatrixXd s = (-kernels::pairwise_sqdist(points) / scheme.heat_t).array().exp();
        s.diagonal().setZero();
        return s;
    }
    case WeightKind::Binary: {
        Eigen::MatrixXd s = Eigen::MatrixXd::Ones(n, n);
        s.diagonal().setZero();
        return s;
    }
    }
    return Eigen::MatrixXd::Zero(n, n);
}

} // namespace

WeightScheme resolve_scheme(const Eigen::MatrixXd& points, const WeightScheme& scheme) {
    WeightScheme out = scheme;
    if (scheme.kind == WeightKind::HeatKernel && scheme.heat_t <= 0.0) {
        const Eigen::Index n = points.cols();
        double total = 0.0;
        if (n > 1) {
            const Eigen::MatrixXd d2 = kernels::pairwise_sqdist(points);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = i + 1; j < n; ++j) total += d2(i, j);
            total /= static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
        }
        out.heat_t = total > 0.0 ? total : 1.0;
    }
    if (scheme.kind == WeightKind::Binary && scheme.knn < 1)
        throw DomainError("binary weighting needs k >= 1");
    return out;
}

double pair_weight(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const WeightScheme& scheme) {
    if (a.size() != b.size())
        throw ShapeError("pair_weight: length mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    switch (scheme.kind) {
    case WeightKind::DotProduct:
        return std::max(a.dot(b), 0.0);
    case WeightKind::HeatKernel:
        if (scheme.heat_t <= 0.0) throw DomainError("heat-kernel width must be positive");
        return std::exp(-(a - b).squaredNorm() / scheme.heat_t);
    case WeightKind::Binary:
        return 1.0;
    }
    return 0.0;
}

WithinClassGraph within_class_graph(const LabeledDataset& data, const WeightScheme& scheme) {
    const Eigen::Index n = data.size();
    const WeightScheme resolved = resolve_scheme(data.features, scheme);
    const Eigen::MatrixXd points =
        resolved.kind == WeightKind::DotProduct ? unit_columns(data.features) : data.features;

    WithinClassGraph out;
    out.global.S = Eigen::MatrixXd::Zero(n, n);
    out.global.scheme = resolved;
    for (int c = 1; c <= data.class_count; ++c) {
        ClassBlock block;
        block.indices = data.indices_of_class(c);
        const Eigen::Index l = static_cast<Eigen::Index>(block.indices.size());
        Eigen::MatrixXd sub(points.rows(), l);
        for (Eigen::Index j = 0; j < l; ++j)
            sub.col(j) = points.col(block.indices[static_cast<std::size_t>(j)]);

        Eigen::MatrixXd s;
        if (resolved.kind == WeightKind::Binary)
            s = knn_adjacency(kernels::pairwise_sqdist(sub), resolved.knn);
        else
            s = full_weights(sub, resolved);

        for (Eigen::Index a = 0; a < l; ++a)
            for (Eigen::Index b = 0; b < l; ++b)
                out.global.S(block.indices[static_cast<std::size_t>(a)],
                             block.indices[static_cast<std::size_t>(b)]) = s(a, b);
        block.graph = WeightGraph{std::move(s), resolved};
        out.blocks.push_back(std::move(block));
    }
    return out;
}

WeightGraph mean_graph(const MeanSpace& means, const WeightScheme& scheme) {
    if (means.means.cols() < 1) throw ProtocolError("mean_graph: no classes");
    const WeightScheme resolved = resolve_scheme(means.means, scheme);
    return WeightGraph{full_weights(means.means, resolved), resolved};
}

WeightGraph all_pairs_graph(const Eigen::MatrixXd& points, const WeightScheme& scheme) {
    const WeightScheme resolved = resolve_scheme(points, scheme);
    if (resolved.kind == WeightKind::Binary)
        return WeightGraph{knn_adjacency(kernels::pairwise_sqdist(points), resolved.knn), resolved};
    return WeightGraph{full_weights(points, resolved), resolved};
}

LaplacianPair laplacian(const WeightGraph& g) {
    LaplacianPair pair;
    pair.degrees = g.S.rowwise().sum();
    pair.L = -g.S;
    pair.L.diagonal() += pair.degrees;
    return pair;
}

Eigen::MatrixXd kronecker_lift(const Eigen::MatrixXd& l, int m) {
    if (l.rows() != l.cols()) throw ShapeError("kronecker_lift: matrix must be square");
    if (m < 1) throw DomainError("kronecker_lift: identity size must be >= 1");
    const Eigen::Index n = l.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * m, n * m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (int k = 0; k < m; ++k) out(i * m + k, j * m + k) = l(i, j);
    return out;
}

} // namespace subspace

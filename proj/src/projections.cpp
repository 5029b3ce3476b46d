#include "subspace/projections.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "subspace/dataset.hpp"

namespace subspace {

namespace {

constexpr double kNullTol = 1e-9;

void check_symmetric(const Eigen::MatrixXd& a, const char* what) {
    if (a.rows() != a.cols()) throw ShapeError(std::string(what) + ": matrix must be square");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw ShapeError(std::string(what) + ": matrix is not symmetric");
}

void apply_sign_convention(Eigen::MatrixXd& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        Eigen::Index at = 0;
        vectors.col(j).cwiseAbs().maxCoeff(&at);
        if (vectors(at, j) < 0.0) vectors.col(j) = -vectors.col(j);
    }
}

/// Descending scatter eigenvalues and matching orthonormal feature-space
/// directions of the centered data, via whichever Gram side is smaller.
void centered_spectrum(const Eigen::MatrixXd& centered, Eigen::VectorXd& evals,
                       Eigen::MatrixXd& basis) {
    const Eigen::Index m = centered.rows(), n = centered.cols();
    if (m <= n) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered * centered.transpose());
        if (eig.info() != Eigen::Success) throw DegenerateError("eigensolver failed");
        evals = eig.eigenvalues().reverse();
        basis = eig.eigenvectors().rowwise().reverse();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered.transpose() * centered);
        if (eig.info() != Eigen::Success) throw DegenerateError("eigensolver failed");
        evals = eig.eigenvalues().reverse();
        const Eigen::MatrixXd v = eig.eigenvectors().rowwise().reverse();
        basis.resize(m, evals.size());
        for (Eigen::Index i = 0; i < evals.size(); ++i) {
            const double sigma = std::max(evals(i), 0.0);
            basis.col(i) = sigma > 0.0 ? (centered * v.col(i) / std::sqrt(sigma)).eval()
                                       : Eigen::VectorXd::Zero(m).eval();
        }
    }
}

/// Numerator operator shared by LPP (supervised) and DLPP: X L X^T from the
/// within-class graph, plus the pieces needed for the constraint side.
struct LppParts {
    Eigen::MatrixXd xlxt;
    Eigen::MatrixXd xdxt;
    WeightScheme resolved;
};

LppParts lpp_parts(const LabeledDataset& data, const WeightScheme& scheme, bool supervised) {
    const WeightGraph graph = supervised ? within_class_graph(data, scheme).global
                                         : all_pairs_graph(data.features, scheme);
    const LaplacianPair lap = laplacian(graph);
    LppParts parts;
    parts.xlxt = symmetrize(data.features * (lap.L * data.features.transpose()));
    parts.xdxt =
        symmetrize(data.features * (lap.degrees.asDiagonal() * data.features.transpose()));
    parts.resolved = graph.scheme;
    return parts;
}

} // namespace

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

namespace {

EigPairs smallest_above_null(const Eigen::MatrixXd& a, int d, double null_tol, bool clamp) {
    if (d < 1) throw DomainError("eig_smallest_sym: d must be >= 1");
    check_symmetric(a, "eig_smallest_sym");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(a));
    if (eig.info() != Eigen::Success) throw DegenerateError("eig_smallest_sym: solver failed");
    const Eigen::VectorXd& values = eig.eigenvalues(); // ascending
    const double scale = std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
    const double cut = null_tol * scale;

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values(i) > cut) keep.push_back(i);
    if (keep.empty() || (!clamp && static_cast<int>(keep.size()) < d))
        throw RankError("eig_smallest_sym: requested " + std::to_string(d) +
                        " eigenpairs but only " + std::to_string(keep.size()) +
                        " lie above the null threshold");
    const int take = clamp ? std::min<int>(d, static_cast<int>(keep.size())) : d;

    EigPairs out;
    out.values.resize(take);
    out.vectors.resize(a.rows(), take);
    for (int i = 0; i < take; ++i) {
        out.values(i) = values(keep[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = eig.eigenvectors().col(keep[static_cast<std::size_t>(i)]);
    }
    apply_sign_convention(out.vectors);
    return out;
}

} // namespace

EigPairs eig_smallest_sym(const Eigen::MatrixXd& a, int d, double null_tol) {
    return smallest_above_null(a, d, null_tol, false);
}

EigPairs eig_smallest_sym_upto(const Eigen::MatrixXd& a, int d, double null_tol) {
    return smallest_above_null(a, d, null_tol, true);
}

EigPairs eig_generalized(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, int d, EigSide side) {
    if (d < 1) throw DomainError("eig_generalized: d must be >= 1");
    check_symmetric(p, "eig_generalized(P)");
    check_symmetric(q, "eig_generalized(Q)");
    if (p.rows() != q.rows()) throw ShapeError("eig_generalized: P and Q sizes differ");
    if (d > p.rows())
        throw RankError("eig_generalized: requested more pairs than the dimension");
    if (q.cwiseAbs().maxCoeff() == 0.0)
        throw DegenerateError("eig_generalized: constraint matrix is identically zero");

    Eigen::MatrixXd q_used = symmetrize(q);
    Eigen::LLT<Eigen::MatrixXd> llt(q_used);
    if (llt.info() != Eigen::Success) {
        const double ridge = 1e-10 * q_used.trace() / static_cast<double>(q_used.rows());
        q_used.diagonal().array() += ridge;
        llt.compute(q_used);
        if (llt.info() != Eigen::Success)
            throw DegenerateError("eig_generalized: constraint matrix is not positive definite");
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        symmetrize(p), q_used, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (eig.info() != Eigen::Success) throw DegenerateError("eig_generalized: solver failed");

    const Eigen::Index total = eig.eigenvalues().size();
    EigPairs out;
    out.values.resize(d);
    out.vectors.resize(p.rows(), d);
    for (int i = 0; i < d; ++i) {
        const Eigen::Index src = side == EigSide::Smallest ? i : total - 1 - i;
        out.values(i) = eig.eigenvalues()(src);
        out.vectors.col(i) = eig.eigenvectors().col(src);
    }
    apply_sign_convention(out.vectors);
    return out;
}

ProjectionModel fit_pca(const LabeledDataset& data, int d) {
    if (d < 1) throw DomainError("fit_pca: d must be >= 1");
    const Eigen::Index n = data.size();
    if (n < 2) throw DomainError("fit_pca: need at least 2 samples");
    const Eigen::MatrixXd centered = data.features.colwise() - data.features.rowwise().mean().eval();

    Eigen::VectorXd evals;
    Eigen::MatrixXd basis;
    centered_spectrum(centered, evals, basis);
    const double largest = std::max(evals(0), 0.0);
    Eigen::Index rank = 0;
    while (rank < evals.size() && evals(rank) > 1e-10 * largest) ++rank;
    if (d > rank)
        throw RankError("fit_pca: requested " + std::to_string(d) + " components but rank is " +
                        std::to_string(rank));

    ProjectionModel model;
    model.method = Method::Pca;
    model.W = basis.leftCols(d);
    apply_sign_convention(model.W);
    model.eigenvalues = evals.head(d) / static_cast<double>(n - 1); // descending variances
    return model;
}

namespace {

void lda_scatters(const Eigen::MatrixXd& features, const std::vector<int>& labels, int p,
                  Eigen::MatrixXd& sw, Eigen::MatrixXd& sb) {
    const Eigen::Index m = features.rows();
    MeanSpace means;
    {
        LabeledDataset view;
        view.features = features;
        view.labels = labels;
        view.class_count = p;
        means = class_means(view);
    }
    const Eigen::VectorXd global_mean = features.rowwise().mean();
    sw = Eigen::MatrixXd::Zero(m, m);
    sb = Eigen::MatrixXd::Zero(m, m);
    std::vector<int> counts(static_cast<std::size_t>(p), 0);
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        const int c = labels[static_cast<std::size_t>(j)] - 1;
        const Eigen::VectorXd dev = features.col(j) - means.means.col(c);
        sw += dev * dev.transpose();
        ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < p; ++c) {
        const Eigen::VectorXd diff = means.means.col(c) - global_mean;
        sb += static_cast<double>(counts[static_cast<std::size_t>(c)]) * diff * diff.transpose();
    }
}

} // namespace

ProjectionModel fit_lda(const LabeledDataset& data, int d) {
    if (d < 1) throw DomainError("fit_lda: d must be >= 1");
    const int p = data.class_count;
    if (p < 2) throw ProtocolError("fit_lda: needs at least two classes");
    if (d > p - 1)
        throw RankError("fit_lda: at most p-1 = " + std::to_string(p - 1) + " components");

    Eigen::MatrixXd sw, sb;
    lda_scatters(data.features, data.labels, p, sw, sb);
    if (sw.cwiseAbs().maxCoeff() == 0.0)
        throw DegenerateError("fit_lda: within-class scatter is identically zero");

    // Small-sample-size guard: when S_w is singular, solve inside the leading
    // principal subspace of dimension <= n - p, where S_w is generically
    // full rank. LDA directions are translation invariant, so the guard only
    // changes the space W is computed in, not how embed applies it.
    Eigen::MatrixXd guard;
    Eigen::LLT<Eigen::MatrixXd> probe(symmetrize(sw));
    if (probe.info() != Eigen::Success) {
        const Eigen::Index n = data.size();
        const Eigen::MatrixXd centered =
            data.features.colwise() - data.features.rowwise().mean().eval();
        Eigen::VectorXd evals;
        Eigen::MatrixXd basis;
        centered_spectrum(centered, evals, basis);
        Eigen::Index rank = 0;
        while (rank < evals.size() && evals(rank) > 1e-10 * std::max(evals(0), 0.0)) ++rank;
        const Eigen::Index q = std::min<Eigen::Index>(rank, n - p);
        if (q < d)
            throw DegenerateError("fit_lda: within-class scatter singular and only " +
                                  std::to_string(q) + " guarded dimensions available");
        guard = basis.leftCols(q);
        lda_scatters(guard.transpose() * data.features, data.labels, p, sw, sb);
    }

    EigPairs pairs = eig_generalized(symmetrize(sb), symmetrize(sw), d, EigSide::Largest);
    const double scale = pairs.values.cwiseAbs().maxCoeff();
    for (int i = 0; i < d; ++i)
        if (pairs.values(i) <= kNullTol * scale)
            throw RankError("fit_lda: only " + std::to_string(i) +
                            " discriminative directions available");

    ProjectionModel model;
    model.method = Method::Lda;
    model.W = guard.size() > 0 ? (guard * pairs.vectors).eval() : std::move(pairs.vectors);
    model.eigenvalues = std::move(pairs.values); // descending discriminability
    return model;
}

ProjectionModel fit_lpp(const LabeledDataset& data, int d, const WeightScheme& scheme,
                        bool supervised) {
    if (d < 1) throw DomainError("fit_lpp: d must be >= 1");
    const LppParts parts = lpp_parts(data, scheme, supervised);
    EigPairs pairs = eig_generalized(parts.xlxt, parts.xdxt, d, EigSide::Smallest);

    ProjectionModel model;
    model.method = Method::Lpp;
    model.W = std::move(pairs.vectors);
    model.eigenvalues = std::move(pairs.values);
    model.scheme = parts.resolved;
    return model;
}

ProjectionModel fit_dlpp(const LabeledDataset& data, int d, const WeightScheme& scheme) {
    if (d < 1) throw DomainError("fit_dlpp: d must be >= 1");
    if (data.class_count < 2)
        throw ProtocolError("fit_dlpp: mean-graph objective needs at least two classes");

    const LppParts parts = lpp_parts(data, scheme, true);
    const MeanSpace means = class_means(data);
    const LaplacianPair mean_lap = laplacian(mean_graph(means, scheme));
    const Eigen::MatrixXd ukut =
        symmetrize(means.means * (mean_lap.L * means.means.transpose()));

    EigPairs pairs = eig_generalized(parts.xlxt, ukut, d, EigSide::Smallest);

    ProjectionModel model;
    model.method = Method::Dlpp;
    model.W = std::move(pairs.vectors);
    model.eigenvalues = std::move(pairs.values);
    model.scheme = parts.resolved;
    return model;
}

GlppOperator assemble_glpp_operator(const LabeledDataset& data, const WeightScheme& scheme,
                                    double beta) {
    if (beta <= 0.0) throw DomainError("assemble_glpp_operator: beta must be positive");
    const Eigen::Index m = data.dim();

    const MeanSpace means = class_means(data);
    const LaplacianPair mean_lap = laplacian(mean_graph(means, scheme));
    const Eigen::MatrixXd means_t = means.means.transpose();
    const Eigen::MatrixXd k_means_t = mean_lap.L * means_t;

    GlppOperator op;
    op.beta = beta;
    op.global_part = means.means * k_means_t;

    op.local_part = Eigen::MatrixXd::Zero(m, m);
    const WithinClassGraph wg = within_class_graph(data, scheme);
    for (const ClassBlock& block : wg.blocks) {
        const Eigen::Index l = static_cast<Eigen::Index>(block.indices.size());
        if (l < 2) continue; // single-sample class contributes nothing
        Eigen::MatrixXd xc(m, l);
        for (Eigen::Index j = 0; j < l; ++j)
            xc.col(j) = data.features.col(block.indices[static_cast<std::size_t>(j)]);
        const LaplacianPair lap = laplacian(block.graph);
        const Eigen::MatrixXd xc_t = xc.transpose();
        const Eigen::MatrixXd l_xc_t = lap.L * xc_t;
        op.local_part += xc * l_xc_t;
    }

    op.A = symmetrize(2.0 * (op.global_part + beta * op.local_part));
    return op;
}

namespace {

ProjectionModel fit_glpp_impl(const LabeledDataset& data, int d, const WeightScheme& scheme,
                              double beta, bool clamp) {
    if (d < 1) throw DomainError("fit_glpp: d must be >= 1");
    const GlppOperator op = assemble_glpp_operator(data, scheme, beta);

    // An all-identical dataset makes A zero up to roundoff; its noise
    // spectrum must not pass the relative null filter. The floor scales with
    // the largest possible entry of A: all weights <= 1, |entries| <= fmax^2.
    const double fmax = data.features.cwiseAbs().maxCoeff();
    const double n = static_cast<double>(data.size());
    const double floor = 1e-14 * 2.0 * (1.0 + beta) * n * n * fmax * fmax;
    if (op.A.cwiseAbs().maxCoeff() <= floor)
        throw RankError("fit_glpp: operator is numerically zero (identical samples?)");

    EigPairs pairs = clamp ? eig_smallest_sym_upto(op.A, d, kNullTol)
                           : eig_smallest_sym(op.A, d, kNullTol);

    ProjectionModel model;
    model.method = Method::Glpp;
    model.W = std::move(pairs.vectors);
    model.eigenvalues = std::move(pairs.values);
    model.beta = beta;
    model.scheme = scheme;
    return model;
}

} // namespace

ProjectionModel fit_glpp(const LabeledDataset& data, int d, const WeightScheme& scheme,
                         double beta) {
    return fit_glpp_impl(data, d, scheme, beta, false);
}

ProjectionModel fit_glpp_upto(const LabeledDataset& data, int d, const WeightScheme& scheme,
                              double beta) {
    return fit_glpp_impl(data, std::min<int>(d, static_cast<int>(data.dim())), scheme, beta, true);
}

Eigen::MatrixXd embed(const ProjectionModel& model, const Eigen::MatrixXd& x) {
    if (x.rows() != model.input_dim())
        throw ShapeError("embed: input has " + std::to_string(x.rows()) +
                         " rows, model expects " + std::to_string(model.input_dim()));
    if (model.pre_chain) return model.W.transpose() * pca_project(*model.pre_chain, x);
    return model.W.transpose() * x;
}

} // namespace subspace

#include "subspace/twod.hpp"

#include <cmath>

#include "subspace/dataset.hpp"
#include "subspace/projections.hpp"

namespace subspace {

ImageStack stack_by_class(const ImageDataset& data) {
    if (data.images.empty()) throw ProtocolError("stack_by_class: empty image dataset");
    const Eigen::Index h = data.rows(), w = data.cols();
    for (const auto& img : data.images)
        if (img.rows() != h || img.cols() != w) throw ShapeError("stack_by_class: mixed image shapes");

    ImageStack stack;
    stack.image_rows = h;
    stack.class_indices.resize(static_cast<std::size_t>(data.class_count));
    for (int i = 0; i < data.size(); ++i)
        stack.class_indices[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)] - 1)]
            .push_back(i);

    stack.mean_stack.resize(h * data.class_count, w);
    for (int c = 0; c < data.class_count; ++c) {
        const auto& idx = stack.class_indices[static_cast<std::size_t>(c)];
        if (idx.empty())
            throw ProtocolError("stack_by_class: class " + std::to_string(c + 1) + " has no images");
        Eigen::MatrixXd g(h * static_cast<Eigen::Index>(idx.size()), w);
        Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(h, w);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const Eigen::MatrixXd& img = data.images[static_cast<std::size_t>(idx[j])];
            g.middleRows(static_cast<Eigen::Index>(j) * h, h) = img;
            mean += img;
        }
        mean /= static_cast<double>(idx.size());
        stack.mean_stack.middleRows(static_cast<Eigen::Index>(c) * h, h) = mean;
        stack.class_stacks.push_back(std::move(g));
    }
    return stack;
}

Eigen::MatrixXd assemble_2d_glpp_operator(const ImageDataset& data, const WeightScheme& scheme,
                                          double beta, bool globality) {
    if (beta <= 0.0) throw DomainError("assemble_2d_glpp_operator: beta must be positive");
    const ImageStack stack = stack_by_class(data);
    const int h = static_cast<int>(stack.image_rows);
    const Eigen::Index w = data.cols();

    // Adjacency weights are computed on the flattened images; the operator
    // itself works on the raw image stacks.
    const LabeledDataset flat = vectorize(data);
    const WithinClassGraph wg = within_class_graph(flat, scheme);

    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(w, w);
    for (std::size_t c = 0; c < wg.blocks.size(); ++c) {
        if (wg.blocks[c].indices.size() < 2) continue;
        const LaplacianPair lap = laplacian(wg.blocks[c].graph);
        const Eigen::MatrixXd lifted = kronecker_lift(lap.L, h);
        const Eigen::MatrixXd& g = stack.class_stacks[c];
        const Eigen::MatrixXd g_t = g.transpose();
        const Eigen::MatrixXd tg = lifted * g;
        local += g_t * tg;
    }

    Eigen::MatrixXd assembled;
    if (globality) {
        const MeanSpace means = class_means(flat);
        const LaplacianPair mean_lap = laplacian(mean_graph(means, scheme));
        const Eigen::MatrixXd lifted = kronecker_lift(mean_lap.L, h);
        const Eigen::MatrixXd m_t = stack.mean_stack.transpose();
        const Eigen::MatrixXd tm = lifted * stack.mean_stack;
        assembled = 2.0 * ((m_t * tm) + beta * local);
    } else {
        assembled = 2.0 * (beta * local);
    }
    return symmetrize(assembled);
}

namespace {

Projection2DModel fit_2d_impl(const ImageDataset& data, int d, const WeightScheme& scheme,
                              double beta, bool globality, bool strict) {
    if (d < 1) throw DomainError("fit_2d_glpp: d must be >= 1");
    const Eigen::Index w = data.cols();
    if (d > w)
        throw RankError("fit_2d_glpp: d exceeds the image width " + std::to_string(w));
    const Eigen::MatrixXd a2 = assemble_2d_glpp_operator(data, scheme, beta, globality);

    // Numerically-zero operators (all images identical) have no usable
    // spectrum even though roundoff keeps a few entries nonzero. The floor
    // scales with the largest possible entry of A2 (weights <= 1).
    double fmax = 0.0;
    for (const auto& img : data.images) fmax = std::max(fmax, img.cwiseAbs().maxCoeff());
    const double n = static_cast<double>(data.size());
    const double floor = 1e-14 * 2.0 * (1.0 + beta) * n * n * fmax * fmax * static_cast<double>(data.rows());
    if (a2.cwiseAbs().maxCoeff() <= floor)
        throw RankError("fit_2d_glpp: operator is numerically zero (identical images?)");

    EigPairs pairs =
        strict ? eig_smallest_sym(a2, d, 1e-9) : eig_smallest_sym_upto(a2, d, 1e-9);

    Projection2DModel model;
    model.W = std::move(pairs.vectors);
    model.eigenvalues = std::move(pairs.values);
    model.beta = beta;
    model.scheme = scheme;
    model.image_rows = data.rows();
    model.image_cols = w;
    model.globality = globality;
    return model;
}

} // namespace

Projection2DModel fit_2d_glpp(const ImageDataset& data, int d, const WeightScheme& scheme,
                              double beta, bool globality) {
    return fit_2d_impl(data, d, scheme, beta, globality, true);
}

Projection2DModel fit_2d_glpp_upto(const ImageDataset& data, int d, const WeightScheme& scheme,
                                   double beta, bool globality) {
    return fit_2d_impl(data, std::min<int>(d, static_cast<int>(data.cols())), scheme, beta,
                       globality, false);
}

Eigen::MatrixXd embed_2d(const Projection2DModel& model, const Eigen::MatrixXd& image) {
    if (image.cols() != model.W.rows())
        throw ShapeError("embed_2d: image width " + std::to_string(image.cols()) +
                         " does not match the model width " + std::to_string(model.W.rows()));
    return image * model.W;
}

} // namespace subspace

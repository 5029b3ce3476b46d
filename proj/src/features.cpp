#include "subspace/features.hpp"

#include <cmath>

#include "subspace/kernels.hpp"

namespace subspace {

namespace {

int circular_transitions(int code) {
    int transitions = 0;
    for (int b = 0; b < 8; ++b) {
        const int cur = (code >> b) & 1;
        const int nxt = (code >> ((b + 1) % 8)) & 1;
        if (cur != nxt) ++transitions;
    }
    return transitions;
}

std::array<std::uint8_t, 256> build_uniform_bins() {
    std::array<std::uint8_t, 256> bins{};
    std::uint8_t next = 0; // uniform codes get 0..57 in ascending code order
    for (int code = 0; code < 256; ++code)
        bins[static_cast<std::size_t>(code)] =
            circular_transitions(code) <= 2 ? next++ : 58;
    return bins;
}

} // namespace

const std::array<std::uint8_t, 256>& lbp_uniform_bins() {
    static const std::array<std::uint8_t, 256> bins = build_uniform_bins();
    return bins;
}

Eigen::MatrixXi lbp_code_map(const Eigen::MatrixXd& image) {
    return kernels::lbp_code_map(image, lbp_uniform_bins());
}

int lbp_stride(const LbpParams& params) {
    if (params.block < 1) throw DomainError("lbp: block size must be positive");
    if (params.overlap < 0.0 || params.overlap >= 1.0)
        throw DomainError("lbp: overlap must be in [0,1)");
    const double stride = params.block * (1.0 - params.overlap);
    const double rounded = std::round(stride);
    if (std::abs(stride - rounded) > 1e-9 || rounded < 1.0)
        throw DomainError("lbp: block*(1-overlap) must be a positive integer, got " +
                          std::to_string(stride));
    return static_cast<int>(rounded);
}

int lbp_feature_dim(int rows, int cols, const LbpParams& params) {
    const int stride = lbp_stride(params);
    if (params.block > rows || params.block > cols)
        throw ShapeError("lbp: block larger than the image");
    const int by = (rows - params.block) / stride + 1;
    const int bx = (cols - params.block) / stride + 1;
    return LbpParams::bins * by * bx;
}

Eigen::VectorXd lbp_block_histograms(const Eigen::MatrixXd& image, const LbpParams& params) {
    const int stride = lbp_stride(params);
    const int rows = static_cast<int>(image.rows());
    const int cols = static_cast<int>(image.cols());
    if (params.block > rows || params.block > cols)
        throw ShapeError("lbp: block larger than the image");

    const Eigen::MatrixXi codes = lbp_code_map(image);
    const int by = (rows - params.block) / stride + 1;
    const int bx = (cols - params.block) / stride + 1;

    Eigen::VectorXd feature = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(LbpParams::bins) * by * bx);
    Eigen::Index offset = 0;
    for (int yb = 0; yb < by; ++yb) {
        for (int xb = 0; xb < bx; ++xb, offset += LbpParams::bins) {
            const int y0 = yb * stride, x0 = xb * stride;
            // Code-map pixel (r,c) sits at image pixel (r+1, c+1).
            const int r0 = std::max(y0 - 1, 0);
            const int r1 = std::min(y0 + params.block - 1, rows - 2);
            const int c0 = std::max(x0 - 1, 0);
            const int c1 = std::min(x0 + params.block - 1, cols - 2);
            double count = 0.0;
            for (int r = r0; r < r1; ++r)
                for (int c = c0; c < c1; ++c) {
                    feature(offset + codes(r, c)) += 1.0;
                    count += 1.0;
                }
            if (count > 0.0) feature.segment(offset, LbpParams::bins) /= count;
        }
    }
    return feature;
}

LabeledDataset lbp_features(const ImageDataset& images, const LbpParams& params) {
    if (images.images.empty()) throw ProtocolError("lbp_features: empty image dataset");
    const int dim = lbp_feature_dim(static_cast<int>(images.rows()),
                                    static_cast<int>(images.cols()), params);
    LabeledDataset data;
    data.features.resize(dim, images.size());
    for (int j = 0; j < images.size(); ++j)
        data.features.col(j) = lbp_block_histograms(images.images[static_cast<std::size_t>(j)], params);
    data.labels = images.labels;
    data.class_count = images.class_count;
    return data;
}

} // namespace subspace

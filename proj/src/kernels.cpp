#include "subspace/kernels.hpp"

#include "subspace/error.hpp"

namespace subspace::kernels {

namespace {

inline std::uint8_t code_at(const Eigen::MatrixXd& img, Eigen::Index r, Eigen::Index c) {
    // Neighbours clockwise from top-left, bit k = k-th neighbour, set when
    // neighbour >= centre (ties set the bit).
    const double centre = img(r, c);
    std::uint8_t code = 0;
    if (img(r - 1, c - 1) >= centre) code |= 1u << 0;
    if (img(r - 1, c) >= centre) code |= 1u << 1;
    if (img(r - 1, c + 1) >= centre) code |= 1u << 2;
    if (img(r, c + 1) >= centre) code |= 1u << 3;
    if (img(r + 1, c + 1) >= centre) code |= 1u << 4;
    if (img(r + 1, c) >= centre) code |= 1u << 5;
    if (img(r + 1, c - 1) >= centre) code |= 1u << 6;
    if (img(r, c - 1) >= centre) code |= 1u << 7;
    return code;
}

} // namespace

Eigen::MatrixXd pairwise_dot(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.cols();
    Eigen::MatrixXd out(n, n);
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = x.col(i).dot(x.col(j));
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.cols();
    Eigen::MatrixXd out(n, n);
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (x.col(i) - x.col(j)).squaredNorm();
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

Eigen::MatrixXd cross_sqdist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows())
        throw ShapeError("cross_sqdist: row counts differ (" + std::to_string(a.rows()) +
                         " vs " + std::to_string(b.rows()) + ")");
    Eigen::MatrixXd out(a.cols(), b.cols());
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
        for (Eigen::Index i = 0; i < a.cols(); ++i)
            out(i, j) = (a.col(i) - b.col(j)).squaredNorm();
    return out;
}

Eigen::MatrixXi lbp_code_map(const Eigen::MatrixXd& image,
                             const std::array<std::uint8_t, 256>& bin_of_code) {
    if (image.rows() < 3 || image.cols() < 3)
        throw ShapeError("lbp_code_map: image must be at least 3x3");
    Eigen::MatrixXi out(image.rows() - 2, image.cols() - 2);
#pragma omp parallel for schedule(static)
    for (Eigen::Index r = 1; r < image.rows() - 1; ++r)
        for (Eigen::Index c = 1; c < image.cols() - 1; ++c)
            out(r - 1, c - 1) = bin_of_code[code_at(image, r, c)];
    return out;
}

namespace serial {

Eigen::MatrixXd pairwise_dot(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.cols();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = x.col(i).dot(x.col(j));
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.cols();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (x.col(i) - x.col(j)).squaredNorm();
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

Eigen::MatrixXd cross_sqdist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows())
        throw ShapeError("cross_sqdist: row counts differ (" + std::to_string(a.rows()) +
                         " vs " + std::to_string(b.rows()) + ")");
    Eigen::MatrixXd out(a.cols(), b.cols());
    for (Eigen::Index j = 0; j < b.cols(); ++j)
        for (Eigen::Index i = 0; i < a.cols(); ++i)
            out(i, j) = (a.col(i) - b.col(j)).squaredNorm();
    return out;
}

Eigen::MatrixXi lbp_code_map(const Eigen::MatrixXd& image,
                             const std::array<std::uint8_t, 256>& bin_of_code) {
    if (image.rows() < 3 || image.cols() < 3)
        throw ShapeError("lbp_code_map: image must be at least 3x3");
    Eigen::MatrixXi out(image.rows() - 2, image.cols() - 2);
    for (Eigen::Index r = 1; r < image.rows() - 1; ++r)
        for (Eigen::Index c = 1; c < image.cols() - 1; ++c)
            out(r - 1, c - 1) = bin_of_code[code_at(image, r, c)];
    return out;
}

} // namespace serial

} // namespace subspace::kernels

#pragma once

// Shared toy-data generators and brute-force oracles for the test suites.
// The oracles deliberately use plain double loops over the defining sums so
// they stay independent of the library's assembly paths.

#include <Eigen/Core>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "subspace/dataset.hpp"
#include "subspace/types.hpp"

namespace testsupport {

using subspace::detail::Rng;

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                     double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
    return m;
}

inline Eigen::VectorXd random_vector(Rng& rng, Eigen::Index size, double scale = 1.0) {
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = scale * rng.normal();
    return v;
}

inline Eigen::MatrixXd random_spd(Rng& rng, Eigen::Index n, double ridge = 1e-3) {
    const Eigen::MatrixXd m = random_matrix(rng, n, n);
    return m * m.transpose() + ridge * static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
}

/// Random dataset with every class populated; labels cycle 1..p.
inline subspace::LabeledDataset random_dataset(Rng& rng, Eigen::Index dim, int classes,
                                               int per_class) {
    subspace::LabeledDataset data;
    data.class_count = classes;
    data.features = random_matrix(rng, dim, static_cast<Eigen::Index>(classes) * per_class);
    for (int c = 1; c <= classes; ++c)
        for (int s = 0; s < per_class; ++s) data.labels.push_back(c);
    return data;
}

/// Pixel-like dataset with entries in [0,1]; dot-product weights stay
/// strictly positive, as they do on image data.
inline subspace::LabeledDataset random_dataset_unit(Rng& rng, Eigen::Index dim, int classes,
                                                    int per_class) {
    subspace::LabeledDataset data = random_dataset(rng, dim, classes, per_class);
    for (Eigen::Index j = 0; j < data.features.cols(); ++j)
        for (Eigen::Index i = 0; i < dim; ++i) data.features(i, j) = rng.unit();
    return data;
}

inline subspace::ImageDataset random_images(Rng& rng, Eigen::Index h, Eigen::Index w, int classes,
                                            int per_class) {
    subspace::ImageDataset data;
    data.class_count = classes;
    for (int c = 1; c <= classes; ++c)
        for (int s = 0; s < per_class; ++s) {
            Eigen::MatrixXd img(h, w);
            for (Eigen::Index j = 0; j < w; ++j)
                for (Eigen::Index i = 0; i < h; ++i) img(i, j) = rng.unit();
            data.images.push_back(std::move(img));
            data.labels.push_back(c);
        }
    return data;
}

/// Reference pairwise weight, independent of the graph module internals.
inline double oracle_weight(Eigen::VectorXd a, Eigen::VectorXd b,
                            const subspace::WeightScheme& scheme) {
    switch (scheme.kind) {
    case subspace::WeightKind::DotProduct: {
        if (a.norm() > 0.0) a /= a.norm();
        if (b.norm() > 0.0) b /= b.norm();
        return std::max(a.dot(b), 0.0);
    }
    case subspace::WeightKind::HeatKernel:
        return std::exp(-(a - b).squaredNorm() / scheme.heat_t);
    case subspace::WeightKind::Binary:
        return 1.0;
    }
    return 0.0;
}

/// sum_ij (w.x_i - w.x_j)^2 S_ij by explicit double loop.
inline double objective_double_sum(const Eigen::MatrixXd& x, const Eigen::MatrixXd& s,
                                   const Eigen::VectorXd& w) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double diff = w.dot(x.col(i)) - w.dot(x.col(j));
            total += diff * diff * s(i, j);
        }
    return total;
}

/// sum_ij |g_i w - g_j w|^2 S_ij for matrix-valued samples.
inline double objective_double_sum_2d(const std::vector<Eigen::MatrixXd>& images,
                                      const Eigen::MatrixXd& s, const Eigen::VectorXd& w) {
    double total = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = 0; j < images.size(); ++j)
            total += (images[i] * w - images[j] * w).squaredNorm() *
                     s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return total;
}

inline void write_pgm_p5(const std::filesystem::path& path, const Eigen::MatrixXi& pixels) {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n" << pixels.cols() << " " << pixels.rows() << "\n255\n";
    for (Eigen::Index r = 0; r < pixels.rows(); ++r)
        for (Eigen::Index c = 0; c < pixels.cols(); ++c)
            out.put(static_cast<char>(pixels(r, c)));
}

inline void write_pgm_p2(const std::filesystem::path& path, const Eigen::MatrixXi& pixels) {
    std::ofstream out(path);
    out << "P2\n# comment\n" << pixels.cols() << " " << pixels.rows() << "\n255\n";
    for (Eigen::Index r = 0; r < pixels.rows(); ++r) {
        for (Eigen::Index c = 0; c < pixels.cols(); ++c) out << pixels(r, c) << " ";
        out << "\n";
    }
}

inline std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("subspace_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace testsupport

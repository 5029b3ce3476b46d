#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>

namespace subspace::kernels {

// Data-parallel inner loops shared by the graph, eval and features modules.
// Every kernel has a serial twin in kernels::serial computing the same
// arithmetic per entry, so the two variants agree bitwise; the unit tests
// assert that and tools/bench_kernels compares their throughput.

/// Gram matrix of the columns of x: out(i,j) = x.col(i) . x.col(j).
Eigen::MatrixXd pairwise_dot(const Eigen::MatrixXd& x);

/// Squared Euclidean distances between columns: out(i,j) = |x_i - x_j|^2.
Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& x);

/// Squared Euclidean distances between columns of a and columns of b.
Eigen::MatrixXd cross_sqdist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// 8-neighbour binary-pattern bin map for the interior pixels of an image.
/// bin_of_code maps each raw 8-bit code to its histogram bin.
Eigen::MatrixXi lbp_code_map(const Eigen::MatrixXd& image,
                             const std::array<std::uint8_t, 256>& bin_of_code);

namespace serial {

Eigen::MatrixXd pairwise_dot(const Eigen::MatrixXd& x);
Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& x);
Eigen::MatrixXd cross_sqdist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
Eigen::MatrixXi lbp_code_map(const Eigen::MatrixXd& image,
                             const std::array<std::uint8_t, 256>& bin_of_code);

} // namespace serial

} // namespace subspace::kernels

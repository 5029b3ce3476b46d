#pragma once

#include <vector>

#include "subspace/types.hpp"

namespace subspace {

/// Per-class adjacency block H_c together with the sample indices it covers.
struct ClassBlock {
    std::vector<int> indices;
    WeightGraph graph;
};

struct WithinClassGraph {
    WeightGraph global; // block-diagonal under within-class ordering
    std::vector<ClassBlock> blocks;
};

/// Fills in defaulted scheme parameters against concrete points: the
/// heat-kernel width defaults to the mean squared pairwise distance.
WeightScheme resolve_scheme(const Eigen::MatrixXd& points, const WeightScheme& scheme);

/// Weight between two samples. Dot-product weights are clamped at zero;
/// binary connectivity is decided at graph level, so the pairwise value is 1.
double pair_weight(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const WeightScheme& scheme);

/// Supervised adjacency: S_ij = pair_weight(x_i, x_j) when labels match
/// (i != j), 0 otherwise. Dot-product weights use unit-normalized columns.
/// The binary scheme connects within-class k-nearest neighbours (either-side).
WithinClassGraph within_class_graph(const LabeledDataset& data, const WeightScheme& scheme);

/// Fully connected graph over the class means.
WeightGraph mean_graph(const MeanSpace& means, const WeightScheme& scheme);

/// Unsupervised sample graph: fully connected for dot-product/heat-kernel,
/// symmetric k-NN for the binary scheme.
WeightGraph all_pairs_graph(const Eigen::MatrixXd& points, const WeightScheme& scheme);

/// Degree matrix and L = D - S.
LaplacianPair laplacian(const WeightGraph& g);

/// L (x) I_m: block (i,j) is L_ij * I_m.
Eigen::MatrixXd kronecker_lift(const Eigen::MatrixXd& l, int m);

} // namespace subspace

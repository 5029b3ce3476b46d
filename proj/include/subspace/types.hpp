#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subspace/error.hpp"

namespace subspace {

/// Vector dataset, one sample per column; labels are dense in 1..class_count.
struct LabeledDataset {
    Eigen::MatrixXd features; // m x n
    std::vector<int> labels;  // length n, values in 1..class_count
    int class_count = 0;

    Eigen::Index dim() const { return features.rows(); }
    Eigen::Index size() const { return features.cols(); }

    std::vector<int> indices_of_class(int c) const {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(labels.size()); ++i)
            if (labels[i] == c) idx.push_back(i);
        return idx;
    }
};

/// Per-class mean columns, class c at column c-1.
struct MeanSpace {
    Eigen::MatrixXd means; // m x p
};

enum class SplitScheme { LeaveOneOut, KFold, TwoFold, SingleSample, FirstNTrain };

struct Fold {
    std::vector<int> train;
    std::vector<int> test;
};

struct SplitPlan {
    SplitScheme scheme = SplitScheme::LeaveOneOut;
    int param = 0; // k for KFold, n for FirstNTrain
    std::uint64_t seed = 0;
    std::vector<Fold> folds;
    int dropped_classes = 0; // classes excluded for having too few samples
};

struct PcaModel {
    Eigen::VectorXd mean;        // length m
    Eigen::MatrixXd basis;       // m x r, orthonormal columns
    Eigen::VectorXd eigenvalues; // length r, positive, nonincreasing
    double ratio = 1.0;
};

enum class WeightKind { DotProduct, HeatKernel, Binary };

struct WeightScheme {
    WeightKind kind = WeightKind::DotProduct;
    double heat_t = 0.0; // HeatKernel width; 0 means derive from the data at graph build
    int knn = 5;         // Binary neighbour count

    static WeightScheme dot_product() { return {WeightKind::DotProduct, 0.0, 5}; }
    static WeightScheme heat_kernel(double t) { return {WeightKind::HeatKernel, t, 5}; }
    static WeightScheme binary(int k) { return {WeightKind::Binary, 0.0, k}; }
};

/// Symmetric nonnegative adjacency weights with zero diagonal. The stored
/// scheme carries resolved parameters (e.g. the heat-kernel width actually used).
struct WeightGraph {
    Eigen::MatrixXd S;
    WeightScheme scheme;
};

struct LaplacianPair {
    Eigen::VectorXd degrees; // D_ii = sum_j S_ij
    Eigen::MatrixXd L;       // D - S
};

enum class Method { Pca, Lda, Lpp, Dlpp, Glpp };

std::string method_name(Method m);

/// Learned 1D projection. Columns of W are ordered most-relevant first, so
/// truncating to the leading k columns scans the dimension grid.
struct ProjectionModel {
    Eigen::MatrixXd W;           // m x d
    Eigen::VectorXd eigenvalues; // length d; ascending for the minimisation
                                 // methods, descending for pca/lda
    Method method = Method::Pca;
    std::optional<PcaModel> pre_chain;
    std::optional<double> beta;
    std::optional<WeightScheme> scheme;

    Eigen::Index input_dim() const {
        return pre_chain ? pre_chain->mean.size() : W.rows();
    }
};

struct GlppOperator {
    Eigen::MatrixXd A;           // 2 * (global_part + beta * local_part), symmetrised
    Eigen::MatrixXd global_part; // U K U^T
    Eigen::MatrixXd local_part;  // sum_c X_c L_c X_c^T
    double beta = 0.0;
};

/// Matrix-valued samples, all of equal shape, intensities in [0,1].
struct ImageDataset {
    std::vector<Eigen::MatrixXd> images;
    std::vector<int> labels; // dense 1..class_count
    int class_count = 0;

    Eigen::Index rows() const { return images.empty() ? 0 : images.front().rows(); }
    Eigen::Index cols() const { return images.empty() ? 0 : images.front().cols(); }
    int size() const { return static_cast<int>(images.size()); }
};

/// Vertical per-class stacks G_c and the stacked class-mean matrix M.
struct ImageStack {
    std::vector<Eigen::MatrixXd> class_stacks;    // G_c : (h * l_c) x w
    std::vector<std::vector<int>> class_indices;  // sample indices stacked into G_c
    Eigen::MatrixXd mean_stack;                   // M : (h * p) x w
    Eigen::Index image_rows = 0;                  // h
};

struct Projection2DModel {
    Eigen::MatrixXd W;           // w x d, unit-norm columns
    Eigen::VectorXd eigenvalues; // ascending
    double beta = 0.0;
    WeightScheme scheme;
    Eigen::Index image_rows = 0;
    Eigen::Index image_cols = 0;
    bool globality = true; // false = the 2D-LPP special case
};

struct EvalReport {
    std::vector<double> per_fold_accuracy; // at best_dim
    double ara = 0.0;
    double std_dev = 0.0;
    double top_rate = 0.0;
    int best_dim = 0;
    std::vector<std::pair<double, double>> curves; // (dimension, mean accuracy)
    double fit_time_s = 0.0;
    double classify_time_s = 0.0;
};

} // namespace subspace

#pragma once

#include "subspace/graph.hpp"
#include "subspace/types.hpp"

namespace subspace {

struct EigPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors; // one eigenvector per column, matching values
};

enum class EigSide { Smallest, Largest };

/// 0.5 * (a + a^T).
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a);

/// Smallest d eigenpairs of a symmetric matrix, skipping the (near-)null
/// space: only eigenvalues above null_tol * max(|lambda|) qualify. Vectors
/// are orthonormal with the largest-magnitude entry made positive.
EigPairs eig_smallest_sym(const Eigen::MatrixXd& a, int d, double null_tol);

/// Same selection, but returns min(d, available) pairs instead of throwing;
/// throws only when nothing lies above the null threshold.
EigPairs eig_smallest_sym_upto(const Eigen::MatrixXd& a, int d, double null_tol);

/// Solves P w = lambda Q w by Cholesky reduction of Q, adding the ridge
/// 1e-10 * trace(Q)/m * I only when Q is not positive definite. Returns d
/// pairs from the requested end, most relevant first (ascending for
/// Smallest, descending for Largest), scaled so w^T Q w = 1.
EigPairs eig_generalized(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, int d, EigSide side);

ProjectionModel fit_pca(const LabeledDataset& data, int d);

ProjectionModel fit_lda(const LabeledDataset& data, int d);

ProjectionModel fit_lpp(const LabeledDataset& data, int d, const WeightScheme& scheme,
                        bool supervised);

ProjectionModel fit_dlpp(const LabeledDataset& data, int d, const WeightScheme& scheme);

/// A = 2 * (U K U^T + beta * sum_c X_c L_c X_c^T), symmetrised.
GlppOperator assemble_glpp_operator(const LabeledDataset& data, const WeightScheme& scheme,
                                    double beta);

ProjectionModel fit_glpp(const LabeledDataset& data, int d, const WeightScheme& scheme,
                         double beta);

/// Clamping variant for dimension scans: returns min(d, available) columns.
ProjectionModel fit_glpp_upto(const LabeledDataset& data, int d, const WeightScheme& scheme,
                              double beta);

/// Applies the optional PCA pre-chain, then Y = W^T X.
Eigen::MatrixXd embed(const ProjectionModel& model, const Eigen::MatrixXd& x);

} // namespace subspace

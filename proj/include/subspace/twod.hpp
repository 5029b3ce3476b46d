#pragma once

#include "subspace/graph.hpp"
#include "subspace/types.hpp"

namespace subspace {

/// Stacks class-c images vertically into G_c and the per-class mean images
/// into M, preserving within-class sample order.
ImageStack stack_by_class(const ImageDataset& data);

/// A2 = 2 * (M^T (K (x) I_h) M + beta * sum_c G_c^T (L_c (x) I_h) G_c),
/// symmetrised; always w x w. With globality=false only the beta-weighted
/// local term remains (the 2D-LPP special case).
Eigen::MatrixXd assemble_2d_glpp_operator(const ImageDataset& data, const WeightScheme& scheme,
                                          double beta, bool globality = true);

Projection2DModel fit_2d_glpp(const ImageDataset& data, int d, const WeightScheme& scheme,
                              double beta, bool globality = true);

/// Clamping variant for dimension scans: returns min(d, available) columns.
Projection2DModel fit_2d_glpp_upto(const ImageDataset& data, int d, const WeightScheme& scheme,
                                   double beta, bool globality = true);

/// y = image * W, an h x d matrix.
Eigen::MatrixXd embed_2d(const Projection2DModel& model, const Eigen::MatrixXd& image);

} // namespace subspace

#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "subspace/types.hpp"

namespace subspace {

enum class EvalMethod { Pca, Lda, Lpp, Dlpp, Glpp, Glpp2d };

EvalMethod eval_method_from_name(const std::string& name);
std::string eval_method_name(EvalMethod m);

struct MethodConfig {
    EvalMethod method = EvalMethod::Glpp;
    WeightScheme scheme;
    double beta = 10000.0;
    bool supervised = true; // lpp only
    double pca_ratio = 1.0; // pre-step for 1D methods
    bool globality = true;  // glpp2d: false = 2D-LPP
};

/// Labels of the nearest training column per test column (Euclidean, ties
/// to the smallest training index).
std::vector<int> nn_classify(const Eigen::MatrixXd& train, const std::vector<int>& train_labels,
                             const Eigen::MatrixXd& test);

/// Linear regression classifier over matrix features: regresses the
/// vectorised test feature onto each class span (pseudoinverse, singular
/// values below 1e-10 relative truncated) and picks the class with the
/// smallest reconstruction residual; ties to the smallest class index.
/// Returns a 1-based class index into class_features.
int lrc_classify_2d(const std::vector<std::vector<Eigen::MatrixXd>>& class_features,
                    const Eigen::MatrixXd& test);

/// Per-fold per-dimension detail behind an EvalReport.
struct ProtocolDetail {
    EvalReport report;
    std::vector<int> dims;                          // grid points actually evaluated
    std::vector<std::vector<double>> fold_accuracy; // [fold][dim index]
};

ProtocolDetail run_protocol_detailed(const LabeledDataset& data, const MethodConfig& cfg,
                                     const SplitPlan& splits, const std::vector<int>& dims);
ProtocolDetail run_protocol_detailed(const ImageDataset& data, const MethodConfig& cfg,
                                     const SplitPlan& splits, const std::vector<int>& dims);

EvalReport run_protocol(const LabeledDataset& data, const MethodConfig& cfg,
                        const SplitPlan& splits, const std::vector<int>& dims);
EvalReport run_protocol(const ImageDataset& data, const MethodConfig& cfg,
                        const SplitPlan& splits, const std::vector<int>& dims);

/// One full protocol run per beta, in the given order.
std::vector<std::pair<double, EvalReport>> sweep_beta(const LabeledDataset& data,
                                                      const MethodConfig& cfg,
                                                      const SplitPlan& splits,
                                                      const std::vector<double>& betas,
                                                      const std::vector<int>& dims);

/// Fits the configured 1D method on the chosen training indices, PCA
/// pre-step included; this is exactly what each protocol fold runs.
ProjectionModel fit_fold_1d(const LabeledDataset& data, const MethodConfig& cfg,
                            const std::vector<int>& train_indices, int max_dim);

/// 2D coordinates of the class means (or all samples) under the model.
std::vector<std::tuple<double, double, int>> export_scatter(const ProjectionModel& model,
                                                            const LabeledDataset& data,
                                                            bool use_means = true);

/// Default beta grid for sweeps.
std::vector<double> default_beta_grid();

} // namespace subspace

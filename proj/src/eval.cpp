#include "subspace/eval.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>

#include "subspace/dataset.hpp"
#include "subspace/kernels.hpp"
#include "subspace/projections.hpp"
#include "subspace/twod.hpp"

namespace subspace {

EvalMethod eval_method_from_name(const std::string& name) {
    if (name == "pca") return EvalMethod::Pca;
    if (name == "lda") return EvalMethod::Lda;
    if (name == "lpp") return EvalMethod::Lpp;
    if (name == "dlpp") return EvalMethod::Dlpp;
    if (name == "glpp") return EvalMethod::Glpp;
    if (name == "glpp2d") return EvalMethod::Glpp2d;
    throw ConfigError("unknown method '" + name + "'");
}

std::string eval_method_name(EvalMethod m) {
    switch (m) {
    case EvalMethod::Pca: return "pca";
    case EvalMethod::Lda: return "lda";
    case EvalMethod::Lpp: return "lpp";
    case EvalMethod::Dlpp: return "dlpp";
    case EvalMethod::Glpp: return "glpp";
    case EvalMethod::Glpp2d: return "glpp2d";
    }
    return "unknown";
}

std::vector<int> nn_classify(const Eigen::MatrixXd& train, const std::vector<int>& train_labels,
                             const Eigen::MatrixXd& test) {
    if (train.cols() == 0) throw ProtocolError("nn_classify: empty training set");
    if (train.cols() != static_cast<Eigen::Index>(train_labels.size()))
        throw ShapeError("nn_classify: training labels do not match columns");
    const Eigen::MatrixXd d2 = kernels::cross_sqdist(train, test);
    std::vector<int> predicted(static_cast<std::size_t>(test.cols()));
    for (Eigen::Index q = 0; q < test.cols(); ++q) {
        Eigen::Index best = 0;
        for (Eigen::Index t = 1; t < train.cols(); ++t)
            if (d2(t, q) < d2(best, q)) best = t; // strict keeps the smallest index on ties
        predicted[static_cast<std::size_t>(q)] = train_labels[static_cast<std::size_t>(best)];
    }
    return predicted;
}

int lrc_classify_2d(const std::vector<std::vector<Eigen::MatrixXd>>& class_features,
                    const Eigen::MatrixXd& test) {
    if (class_features.empty()) throw ProtocolError("lrc_classify_2d: no classes");
    const Eigen::Map<const Eigen::VectorXd> y(test.data(), test.size());

    int best_class = 0;
    double best_residual = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < class_features.size(); ++c) {
        const auto& feats = class_features[c];
        if (feats.empty())
            throw ProtocolError("lrc_classify_2d: class " + std::to_string(c + 1) +
                                " has no training features");
        Eigen::MatrixXd h(test.size(), static_cast<Eigen::Index>(feats.size()));
        for (std::size_t j = 0; j < feats.size(); ++j) {
            if (feats[j].rows() != test.rows() || feats[j].cols() != test.cols())
                throw ShapeError("lrc_classify_2d: feature shape mismatch");
            h.col(static_cast<Eigen::Index>(j)) =
                Eigen::Map<const Eigen::VectorXd>(feats[j].data(), feats[j].size());
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU);
        const double cut = 1e-10 * svd.singularValues()(0);
        Eigen::Index rank = 0;
        while (rank < svd.singularValues().size() && svd.singularValues()(rank) > cut) ++rank;
        double residual;
        if (rank == 0) {
            residual = y.norm();
        } else {
            const auto u = svd.matrixU().leftCols(rank);
            residual = (y - u * (u.transpose() * y)).norm();
        }
        if (residual < best_residual) { // strict keeps the smallest class on ties
            best_residual = residual;
            best_class = static_cast<int>(c) + 1;
        }
    }
    return best_class;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Retained-class relabelling shared by the train and test sides of a fold.
std::map<int, int> relabel_map(const LabeledDataset& data, const Fold& fold) {
    std::map<int, int> map;
    for (int i : fold.train) map.emplace(data.labels[static_cast<std::size_t>(i)], 0);
    for (int i : fold.test) map.emplace(data.labels[static_cast<std::size_t>(i)], 0);
    int next = 1;
    for (auto& [old_label, dense] : map) dense = next++;
    return map;
}

LabeledDataset subset_1d(const LabeledDataset& data, const std::vector<int>& indices,
                         const std::map<int, int>& map) {
    LabeledDataset out;
    out.features.resize(data.dim(), static_cast<Eigen::Index>(indices.size()));
    out.labels.reserve(indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
        out.features.col(static_cast<Eigen::Index>(j)) = data.features.col(indices[j]);
        out.labels.push_back(map.at(data.labels[static_cast<std::size_t>(indices[j])]));
    }
    out.class_count = static_cast<int>(map.size());
    return out;
}

ImageDataset subset_2d(const ImageDataset& data, const std::vector<int>& indices,
                       const std::map<int, int>& map) {
    ImageDataset out;
    out.images.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (int i : indices) {
        out.images.push_back(data.images[static_cast<std::size_t>(i)]);
        out.labels.push_back(map.at(data.labels[static_cast<std::size_t>(i)]));
    }
    out.class_count = static_cast<int>(map.size());
    return out;
}

ProjectionModel fit_1d_method(const LabeledDataset& train, const MethodConfig& cfg, int max_dim) {
    auto [pca, reduced] = pca_preprocess(train, cfg.pca_ratio);
    const int rank = static_cast<int>(reduced.dim());

    ProjectionModel model;
    switch (cfg.method) {
    case EvalMethod::Pca:
        model = fit_pca(reduced, std::min(max_dim, rank));
        break;
    case EvalMethod::Lda:
        model = fit_lda(reduced, std::min(max_dim, reduced.class_count - 1));
        break;
    case EvalMethod::Lpp:
        model = fit_lpp(reduced, std::min(max_dim, rank), cfg.scheme, cfg.supervised);
        break;
    case EvalMethod::Dlpp:
        model = fit_dlpp(reduced, std::min(max_dim, rank), cfg.scheme);
        break;
    case EvalMethod::Glpp:
        model = fit_glpp_upto(reduced, std::min(max_dim, rank), cfg.scheme, cfg.beta);
        break;
    case EvalMethod::Glpp2d:
        throw ConfigError("glpp2d needs image data");
    }
    model.pre_chain = std::move(pca);
    return model;
}

struct FoldOutcome {
    std::vector<double> accuracy; // per requested grid dim; -1 when not feasible
    double fit_seconds = 0.0;
    double classify_seconds = 0.0;
};

FoldOutcome eval_fold_1d(const LabeledDataset& data, const MethodConfig& cfg, const Fold& fold,
                         const std::vector<int>& dims) {
    const auto map = relabel_map(data, fold);
    const LabeledDataset train = subset_1d(data, fold.train, map);
    const LabeledDataset test = subset_1d(data, fold.test, map);
    const int max_dim = *std::max_element(dims.begin(), dims.end());

    FoldOutcome out;
    const auto fit_start = Clock::now();
    const ProjectionModel model = fit_1d_method(train, cfg, max_dim);
    out.fit_seconds = seconds_since(fit_start);

    const auto classify_start = Clock::now();
    const Eigen::MatrixXd ytr = embed(model, train.features);
    const Eigen::MatrixXd yte = embed(model, test.features);
    out.accuracy.assign(dims.size(), -1.0);
    for (std::size_t di = 0; di < dims.size(); ++di) {
        const int k = dims[di];
        if (k < 1 || k > model.W.cols()) continue;
        const auto predicted = nn_classify(ytr.topRows(k), train.labels, yte.topRows(k));
        int correct = 0;
        for (std::size_t q = 0; q < predicted.size(); ++q)
            if (predicted[q] == test.labels[q]) ++correct;
        out.accuracy[di] = test.labels.empty()
                               ? 0.0
                               : static_cast<double>(correct) / static_cast<double>(test.labels.size());
    }
    out.classify_seconds = seconds_since(classify_start);
    return out;
}

FoldOutcome eval_fold_2d(const ImageDataset& data, const MethodConfig& cfg, const Fold& fold,
                         const std::vector<int>& dims) {
    std::map<int, int> map;
    {
        LabeledDataset labels_only;
        labels_only.labels = data.labels;
        labels_only.class_count = data.class_count;
        labels_only.features.resize(0, static_cast<Eigen::Index>(data.labels.size()));
        map = relabel_map(labels_only, fold);
    }
    const ImageDataset train = subset_2d(data, fold.train, map);
    const ImageDataset test = subset_2d(data, fold.test, map);
    const int max_dim = *std::max_element(dims.begin(), dims.end());

    FoldOutcome out;
    const auto fit_start = Clock::now();
    const Projection2DModel model =
        fit_2d_glpp_upto(train, max_dim, cfg.scheme, cfg.beta, cfg.globality);
    out.fit_seconds = seconds_since(fit_start);

    const auto classify_start = Clock::now();
    std::vector<Eigen::MatrixXd> train_embedded(static_cast<std::size_t>(train.size()));
    for (int i = 0; i < train.size(); ++i)
        train_embedded[static_cast<std::size_t>(i)] =
            embed_2d(model, train.images[static_cast<std::size_t>(i)]);

    out.accuracy.assign(dims.size(), -1.0);
    for (std::size_t di = 0; di < dims.size(); ++di) {
        const int k = dims[di];
        if (k < 1 || k > model.W.cols()) continue;
        std::vector<std::vector<Eigen::MatrixXd>> by_class(
            static_cast<std::size_t>(train.class_count));
        for (int i = 0; i < train.size(); ++i)
            by_class[static_cast<std::size_t>(train.labels[static_cast<std::size_t>(i)] - 1)]
                .push_back(train_embedded[static_cast<std::size_t>(i)].leftCols(k));
        int correct = 0;
        for (int q = 0; q < test.size(); ++q) {
            const Eigen::MatrixXd feature =
                embed_2d(model, test.images[static_cast<std::size_t>(q)]).leftCols(k);
            if (lrc_classify_2d(by_class, feature) == test.labels[static_cast<std::size_t>(q)])
                ++correct;
        }
        out.accuracy[di] =
            test.size() == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
    }
    out.classify_seconds = seconds_since(classify_start);
    return out;
}

template <typename Dataset, typename FoldFn>
ProtocolDetail run_protocol_impl(const Dataset& data, const MethodConfig& cfg,
                                 const SplitPlan& splits, const std::vector<int>& dims,
                                 FoldFn&& eval_fold) {
    if (dims.empty()) throw ProtocolError("run_protocol: empty dimension grid");
    if (splits.folds.empty()) throw ProtocolError("run_protocol: no folds");
    for (int k : dims)
        if (k < 1) throw ProtocolError("run_protocol: dimensions must be >= 1");

    const int folds = static_cast<int>(splits.folds.size());
    std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(folds));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(folds));
#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < folds; ++f) {
        try {
            outcomes[static_cast<std::size_t>(f)] =
                eval_fold(data, cfg, splits.folds[static_cast<std::size_t>(f)], dims);
        } catch (...) {
            failures[static_cast<std::size_t>(f)] = std::current_exception();
        }
    }
    for (int f = 0; f < folds; ++f) {
        if (!failures[static_cast<std::size_t>(f)]) continue;
        try {
            std::rethrow_exception(failures[static_cast<std::size_t>(f)]);
        } catch (const std::exception& e) {
            throw ProtocolError("fold " + std::to_string(f) + ": " + e.what());
        }
    }

    // Keep the grid points feasible in every fold so the reported best
    // dimension is shared.
    ProtocolDetail detail;
    std::vector<std::size_t> kept;
    for (std::size_t di = 0; di < dims.size(); ++di) {
        bool everywhere = true;
        for (const auto& o : outcomes)
            if (o.accuracy[di] < 0.0) everywhere = false;
        if (everywhere) {
            kept.push_back(di);
            detail.dims.push_back(dims[di]);
        }
    }
    if (kept.empty())
        throw ProtocolError("run_protocol: no grid dimension is feasible in every fold");

    detail.fold_accuracy.assign(static_cast<std::size_t>(folds), {});
    for (int f = 0; f < folds; ++f)
        for (std::size_t di : kept)
            detail.fold_accuracy[static_cast<std::size_t>(f)].push_back(
                outcomes[static_cast<std::size_t>(f)].accuracy[di]);

    EvalReport& report = detail.report;
    std::size_t best = 0;
    double best_mean = -1.0;
    for (std::size_t di = 0; di < detail.dims.size(); ++di) {
        double mean = 0.0;
        for (int f = 0; f < folds; ++f) mean += detail.fold_accuracy[static_cast<std::size_t>(f)][di];
        mean /= static_cast<double>(folds);
        report.curves.emplace_back(static_cast<double>(detail.dims[di]), mean);
        if (mean > best_mean) { // strict keeps the smallest dimension on ties
            best_mean = mean;
            best = di;
        }
    }
    report.best_dim = detail.dims[best];
    report.top_rate = best_mean;
    for (int f = 0; f < folds; ++f)
        report.per_fold_accuracy.push_back(detail.fold_accuracy[static_cast<std::size_t>(f)][best]);
    report.ara = 0.0;
    for (double a : report.per_fold_accuracy) report.ara += a;
    report.ara /= static_cast<double>(folds);
    double var = 0.0;
    for (double a : report.per_fold_accuracy) var += (a - report.ara) * (a - report.ara);
    report.std_dev = folds > 1 ? std::sqrt(var / static_cast<double>(folds - 1)) : 0.0;
    for (const auto& o : outcomes) {
        report.fit_time_s += o.fit_seconds;
        report.classify_time_s += o.classify_seconds;
    }
    return detail;
}

} // namespace

ProjectionModel fit_fold_1d(const LabeledDataset& data, const MethodConfig& cfg,
                            const std::vector<int>& train_indices, int max_dim) {
    Fold fold;
    fold.train = train_indices;
    const auto map = relabel_map(data, fold);
    return fit_1d_method(subset_1d(data, train_indices, map), cfg, max_dim);
}

ProtocolDetail run_protocol_detailed(const LabeledDataset& data, const MethodConfig& cfg,
                                     const SplitPlan& splits, const std::vector<int>& dims) {
    if (cfg.method == EvalMethod::Glpp2d)
        throw ConfigError("glpp2d needs image data");
    return run_protocol_impl(data, cfg, splits, dims, eval_fold_1d);
}

ProtocolDetail run_protocol_detailed(const ImageDataset& data, const MethodConfig& cfg,
                                     const SplitPlan& splits, const std::vector<int>& dims) {
    if (cfg.method != EvalMethod::Glpp2d)
        throw ConfigError("image protocol runs only glpp2d; vectorize or extract features first");
    return run_protocol_impl(data, cfg, splits, dims, eval_fold_2d);
}

EvalReport run_protocol(const LabeledDataset& data, const MethodConfig& cfg,
                        const SplitPlan& splits, const std::vector<int>& dims) {
    return run_protocol_detailed(data, cfg, splits, dims).report;
}

EvalReport run_protocol(const ImageDataset& data, const MethodConfig& cfg, const SplitPlan& splits,
                        const std::vector<int>& dims) {
    return run_protocol_detailed(data, cfg, splits, dims).report;
}

std::vector<std::pair<double, EvalReport>> sweep_beta(const LabeledDataset& data,
                                                      const MethodConfig& cfg,
                                                      const SplitPlan& splits,
                                                      const std::vector<double>& betas,
                                                      const std::vector<int>& dims) {
    if (cfg.method != EvalMethod::Glpp)
        throw ConfigError("beta sweep applies to glpp only");
    std::vector<std::pair<double, EvalReport>> out;
    for (double beta : betas) {
        if (beta <= 0.0) throw DomainError("sweep_beta: betas must be positive");
        MethodConfig point = cfg;
        point.beta = beta;
        out.emplace_back(beta, run_protocol(data, point, splits, dims));
    }
    return out;
}

std::vector<std::tuple<double, double, int>> export_scatter(const ProjectionModel& model,
                                                            const LabeledDataset& data,
                                                            bool use_means) {
    if (model.W.cols() < 2) throw ShapeError("export_scatter: model needs at least 2 columns");
    std::vector<std::tuple<double, double, int>> rows;
    if (use_means) {
        const Eigen::MatrixXd y = embed(model, class_means(data).means);
        for (Eigen::Index c = 0; c < y.cols(); ++c)
            rows.emplace_back(y(0, c), y(1, c), static_cast<int>(c) + 1);
    } else {
        const Eigen::MatrixXd y = embed(model, data.features);
        for (Eigen::Index j = 0; j < y.cols(); ++j)
            rows.emplace_back(y(0, j), y(1, j), data.labels[static_cast<std::size_t>(j)]);
    }
    return rows;
}

std::vector<double> default_beta_grid() {
    return {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0, 100000.0};
}

} // namespace subspace

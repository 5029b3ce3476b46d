#include "subspace/serialize.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace subspace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string vector_json(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v(i));
    }
    return out + "]";
}

std::string matrix_json_rowmajor(const Eigen::MatrixXd& m) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) out += ",";
        out += "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ",";
            out += format_double(m(i, j));
        }
        out += "]";
    }
    return out + "]";
}

std::string indices_json(const std::vector<int>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out + "]";
}

std::string pca_json(const PcaModel& pca) {
    std::string out = "{";
    out += "\"mean\":" + vector_json(pca.mean);
    out += ",\"basis\":" + matrix_json_rowmajor(pca.basis);
    out += ",\"eigenvalues\":" + vector_json(pca.eigenvalues);
    out += ",\"ratio\":" + format_double(pca.ratio);
    return out + "}";
}

std::string scheme_kind_name(WeightKind kind) {
    switch (kind) {
    case WeightKind::DotProduct: return "dot-product";
    case WeightKind::HeatKernel: return "heat-kernel";
    case WeightKind::Binary: return "binary";
    }
    return "unknown";
}

} // namespace

std::string scheme_json(const WeightScheme& scheme) {
    std::string out = "{\"kind\":\"" + scheme_kind_name(scheme.kind) + "\"";
    if (scheme.kind == WeightKind::HeatKernel) out += ",\"t\":" + format_double(scheme.heat_t);
    if (scheme.kind == WeightKind::Binary) out += ",\"k\":" + std::to_string(scheme.knn);
    return out + "}";
}

std::string split_scheme_string(const SplitPlan& plan) {
    switch (plan.scheme) {
    case SplitScheme::LeaveOneOut: return "leave-one-out";
    case SplitScheme::KFold: return "k-fold(" + std::to_string(plan.param) + ")";
    case SplitScheme::TwoFold: return "two-fold";
    case SplitScheme::SingleSample: return "single-sample";
    case SplitScheme::FirstNTrain: return "first-n-train(" + std::to_string(plan.param) + ")";
    }
    return "unknown";
}

std::string to_json(const SplitPlan& plan) {
    std::string out = "{";
    out += "\"scheme\":\"" + split_scheme_string(plan) + "\"";
    out += ",\"seed\":" + std::to_string(plan.seed);
    out += ",\"folds\":[";
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        if (f) out += ",";
        out += "{\"train\":" + indices_json(plan.folds[f].train) +
               ",\"test\":" + indices_json(plan.folds[f].test) + "}";
    }
    out += "]}";
    return out;
}

std::string to_json(const ProjectionModel& model) {
    std::string out = "{";
    out += "\"method\":\"" + method_name(model.method) + "\"";
    if (model.beta) out += ",\"beta\":" + format_double(*model.beta);
    if (model.scheme) out += ",\"scheme\":" + scheme_json(*model.scheme);
    out += ",\"eigenvalues\":" + vector_json(model.eigenvalues);
    out += ",\"W\":" + matrix_json_rowmajor(model.W);
    if (model.pre_chain) out += ",\"pre_chain\":" + pca_json(*model.pre_chain);
    return out + "}";
}

std::string to_json(const Projection2DModel& model) {
    std::string out = "{";
    out += "\"method\":\"glpp2d\"";
    out += ",\"two_d\":true";
    out += ",\"h\":" + std::to_string(model.image_rows);
    out += ",\"w\":" + std::to_string(model.image_cols);
    out += ",\"beta\":" + format_double(model.beta);
    out += ",\"scheme\":" + scheme_json(model.scheme);
    out += ",\"globality\":" + std::string(model.globality ? "true" : "false");
    out += ",\"eigenvalues\":" + vector_json(model.eigenvalues);
    out += ",\"W\":" + matrix_json_rowmajor(model.W);
    return out + "}";
}

std::string report_json(const EvalReport& report, const MethodConfig& cfg) {
    std::string out = "{";
    out += "\"method\":\"" + eval_method_name(cfg.method) + "\"";
    out += ",\"scheme\":" + scheme_json(cfg.scheme);
    if (cfg.method == EvalMethod::Glpp || cfg.method == EvalMethod::Glpp2d)
        out += ",\"beta\":" + format_double(cfg.beta);
    out += ",\"folds\":[";
    for (std::size_t f = 0; f < report.per_fold_accuracy.size(); ++f) {
        if (f) out += ",";
        out += format_double(report.per_fold_accuracy[f]);
    }
    out += "]";
    out += ",\"ara\":" + format_double(report.ara);
    out += ",\"std\":" + format_double(report.std_dev);
    out += ",\"top_rate\":" + format_double(report.top_rate);
    out += ",\"best_dim\":" + std::to_string(report.best_dim);
    out += ",\"curves\":[";
    for (std::size_t i = 0; i < report.curves.size(); ++i) {
        if (i) out += ",";
        out += "[" + format_double(report.curves[i].first) + "," +
               format_double(report.curves[i].second) + "]";
    }
    out += "]}";
    return out;
}

std::string curves_csv(const EvalReport& report) {
    std::string out = "dim,accuracy\n";
    for (const auto& [x, acc] : report.curves)
        out += format_double(x) + "," + format_double(acc) + "\n";
    return out;
}

std::string sweep_csv(const std::vector<std::tuple<double, double, double, double>>& rows) {
    std::string out = "value,ara,std,top_rate\n";
    for (const auto& [value, ara, std_dev, top] : rows)
        out += format_double(value) + "," + format_double(ara) + "," + format_double(std_dev) +
               "," + format_double(top) + "\n";
    return out;
}

std::string scatter_csv(const std::vector<std::tuple<double, double, int>>& rows) {
    std::string out = "x,y,label\n";
    for (const auto& [x, y, label] : rows)
        out += format_double(x) + "," + format_double(y) + "," + std::to_string(label) + "\n";
    return out;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ",";
            out += format_double(m(i, j));
        }
        out += "\n";
    }
    return out;
}

namespace {

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
    return m;
}

WeightScheme scheme_from_json(const nlohmann::json& j) {
    WeightScheme scheme;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dot-product") {
        scheme.kind = WeightKind::DotProduct;
    } else if (kind == "heat-kernel") {
        scheme.kind = WeightKind::HeatKernel;
        scheme.heat_t = j.at("t").get<double>();
    } else if (kind == "binary") {
        scheme.kind = WeightKind::Binary;
        scheme.knn = j.at("k").get<int>();
    } else {
        throw ParseError("unknown weighting scheme '" + kind + "'");
    }
    return scheme;
}

} // namespace

ProjectionModel model_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ProjectionModel model;
    const std::string method = j.at("method").get<std::string>();
    if (method == "pca") model.method = Method::Pca;
    else if (method == "lda") model.method = Method::Lda;
    else if (method == "lpp") model.method = Method::Lpp;
    else if (method == "dlpp") model.method = Method::Dlpp;
    else if (method == "glpp") model.method = Method::Glpp;
    else throw ParseError("unknown method '" + method + "'");
    model.eigenvalues = vector_from_json(j.at("eigenvalues"));
    model.W = matrix_from_json(j.at("W"));
    if (j.contains("beta")) model.beta = j.at("beta").get<double>();
    if (j.contains("scheme")) model.scheme = scheme_from_json(j.at("scheme"));
    if (j.contains("pre_chain")) {
        PcaModel pca;
        pca.mean = vector_from_json(j.at("pre_chain").at("mean"));
        pca.basis = matrix_from_json(j.at("pre_chain").at("basis"));
        pca.eigenvalues = vector_from_json(j.at("pre_chain").at("eigenvalues"));
        pca.ratio = j.at("pre_chain").at("ratio").get<double>();
        model.pre_chain = std::move(pca);
    }
    return model;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(tmp.string() + ": cannot write");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError(tmp.string() + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(path.string() + ": rename failed: " + ec.message());
}

} // namespace subspace

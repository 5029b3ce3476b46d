// subspace-lab: config-driven benchmark runs for the projection methods.
//
//   subspace-lab run --config exp.cfg [--dump-graph g.csv] [--scatter s.csv]
//   subspace-lab sweep --config exp.cfg --axis dim|beta [--grid a,b,c]
//   subspace-lab features --config exp.cfg --out features.csv
//
// Exit codes: 0 success, 1 config/parse errors, 2 fit/protocol errors,
// 3 I/O errors.

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "subspace/dataset.hpp"
#include "subspace/eval.hpp"
#include "subspace/features.hpp"
#include "subspace/graph.hpp"
#include "subspace/projections.hpp"
#include "subspace/serialize.hpp"
#include "subspace/twod.hpp"

namespace fs = std::filesystem;
using namespace subspace;

namespace {

struct RunConfig {
    // dataset
    std::string dataset_kind = "csv"; // csv | image-tree | blobs
    std::string dataset_path;
    std::optional<std::pair<int, int>> resize;
    int blob_classes = 8;
    int blob_per_class = 20;
    int blob_dim = 16;
    double blob_separation = 50.0;
    double blob_spread = 1.0;
    std::uint64_t blob_seed = 1;
    // features
    std::string features_kind = "raw"; // raw | lbp
    LbpParams lbp;
    // method
    MethodConfig method;
    // protocol
    SplitScheme split_scheme = SplitScheme::LeaveOneOut;
    int split_param = 0;
    std::uint64_t seed = 0;
    std::vector<int> dims;
    // output
    std::string output_dir = "out";
};

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::vector<int> parse_dims(const std::string& key, const std::string& value) {
    std::vector<int> dims;
    if (const auto colon = value.find(':'); colon != std::string::npos) {
        const int lo = parse_int(key, trim(value.substr(0, colon)));
        const int hi = parse_int(key, trim(value.substr(colon + 1)));
        if (lo < 1 || hi < lo) throw ConfigError(key + ": bad range '" + value + "'");
        for (int k = lo; k <= hi; ++k) dims.push_back(k);
        return dims;
    }
    for (const auto& part : split_list(value, ','))
        if (!trim(part).empty()) dims.push_back(parse_int(key, trim(part)));
    if (dims.empty()) throw ConfigError(key + ": empty dimension list");
    return dims;
}

WeightKind parse_scheme_kind(const std::string& value) {
    if (value == "dot-product") return WeightKind::DotProduct;
    if (value == "heat-kernel") return WeightKind::HeatKernel;
    if (value == "binary") return WeightKind::Binary;
    throw ConfigError("method.scheme: unknown weighting '" + value + "'");
}

RunConfig parse_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config");

    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (kv.count(key))
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
        kv[key] = value;
    }

    RunConfig cfg;
    cfg.method.scheme = WeightScheme::dot_product();
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("dataset.kind")) cfg.dataset_kind = *v;
    if (auto v = take("dataset.path")) cfg.dataset_path = *v;
    if (auto v = take("dataset.resize")) {
        const auto parts = split_list(*v, 'x');
        if (parts.size() != 2) throw ConfigError("dataset.resize: expected HxW, got '" + *v + "'");
        cfg.resize = {parse_int("dataset.resize", trim(parts[0])),
                      parse_int("dataset.resize", trim(parts[1]))};
    }
    if (auto v = take("dataset.classes")) cfg.blob_classes = parse_int("dataset.classes", *v);
    if (auto v = take("dataset.samples_per_class"))
        cfg.blob_per_class = parse_int("dataset.samples_per_class", *v);
    if (auto v = take("dataset.dim")) cfg.blob_dim = parse_int("dataset.dim", *v);
    if (auto v = take("dataset.separation"))
        cfg.blob_separation = parse_real("dataset.separation", *v);
    if (auto v = take("dataset.spread")) cfg.blob_spread = parse_real("dataset.spread", *v);
    if (auto v = take("dataset.seed"))
        cfg.blob_seed = static_cast<std::uint64_t>(std::stoull(*v));

    if (auto v = take("features.kind")) cfg.features_kind = *v;
    if (auto v = take("features.block")) cfg.lbp.block = parse_int("features.block", *v);
    if (auto v = take("features.overlap")) cfg.lbp.overlap = parse_real("features.overlap", *v);

    if (auto v = take("method.name")) cfg.method.method = eval_method_from_name(*v);
    if (auto v = take("method.scheme")) cfg.method.scheme.kind = parse_scheme_kind(*v);
    if (auto v = take("method.t")) cfg.method.scheme.heat_t = parse_real("method.t", *v);
    if (auto v = take("method.k")) cfg.method.scheme.knn = parse_int("method.k", *v);
    if (auto v = take("method.beta")) cfg.method.beta = parse_real("method.beta", *v);
    if (auto v = take("method.supervised"))
        cfg.method.supervised = parse_bool("method.supervised", *v);
    if (auto v = take("method.pca_ratio")) cfg.method.pca_ratio = parse_real("method.pca_ratio", *v);
    if (auto v = take("method.globality")) cfg.method.globality = parse_bool("method.globality", *v);

    if (auto v = take("protocol.scheme")) {
        if (*v == "leave-one-out") cfg.split_scheme = SplitScheme::LeaveOneOut;
        else if (*v == "k-fold") cfg.split_scheme = SplitScheme::KFold;
        else if (*v == "two-fold") cfg.split_scheme = SplitScheme::TwoFold;
        else if (*v == "single-sample") cfg.split_scheme = SplitScheme::SingleSample;
        else if (*v == "first-n-train") cfg.split_scheme = SplitScheme::FirstNTrain;
        else throw ConfigError("protocol.scheme: unknown scheme '" + *v + "'");
    }
    if (auto v = take("protocol.k")) cfg.split_param = parse_int("protocol.k", *v);
    if (auto v = take("protocol.n")) cfg.split_param = parse_int("protocol.n", *v);
    if (auto v = take("protocol.seed"))
        cfg.seed = static_cast<std::uint64_t>(std::stoull(*v));
    if (auto v = take("protocol.dims")) cfg.dims = parse_dims("protocol.dims", *v);

    if (auto v = take("output")) cfg.output_dir = *v;

    if (!kv.empty()) throw ConfigError("unknown config key '" + kv.begin()->first + "'");
    return cfg;
}

void validate(const RunConfig& cfg) {
    if (cfg.dataset_kind != "csv" && cfg.dataset_kind != "image-tree" && cfg.dataset_kind != "blobs")
        throw ConfigError("dataset.kind must be csv, image-tree or blobs");
    if (cfg.dataset_kind != "blobs") {
        if (cfg.dataset_path.empty()) throw ConfigError("dataset.path is required");
        if (!fs::exists(cfg.dataset_path))
            throw ConfigError("dataset.path does not exist: " + cfg.dataset_path);
    }
    if (cfg.features_kind != "raw" && cfg.features_kind != "lbp")
        throw ConfigError("features.kind must be raw or lbp");
    if (cfg.features_kind == "lbp" && cfg.dataset_kind != "image-tree")
        throw ConfigError("features.kind = lbp needs an image-tree dataset");
    if (cfg.method.method == EvalMethod::Glpp2d) {
        if (cfg.dataset_kind != "image-tree")
            throw ConfigError("glpp2d needs an image-tree dataset");
        if (cfg.features_kind != "raw") throw ConfigError("glpp2d works on raw image matrices");
    }
    if (cfg.dims.empty()) throw ConfigError("protocol.dims is required");
    if ((cfg.method.method == EvalMethod::Glpp || cfg.method.method == EvalMethod::Glpp2d) &&
        cfg.method.beta <= 1000.0)
        std::cerr << "warning: beta = " << cfg.method.beta
                  << " is below the recommended > 1000 range\n";
}

std::string config_echo_json(const RunConfig& cfg) {
    std::string out = "{";
    out += "\"dataset\":{\"kind\":\"" + cfg.dataset_kind + "\"";
    if (cfg.dataset_kind == "blobs") {
        out += ",\"classes\":" + std::to_string(cfg.blob_classes);
        out += ",\"samples_per_class\":" + std::to_string(cfg.blob_per_class);
        out += ",\"dim\":" + std::to_string(cfg.blob_dim);
        out += ",\"separation\":" + format_double(cfg.blob_separation);
        out += ",\"spread\":" + format_double(cfg.blob_spread);
        out += ",\"seed\":" + std::to_string(cfg.blob_seed);
    } else {
        out += ",\"path\":\"" + cfg.dataset_path + "\"";
        if (cfg.resize)
            out += ",\"resize\":[" + std::to_string(cfg.resize->first) + "," +
                   std::to_string(cfg.resize->second) + "]";
    }
    out += "},\"features\":{\"kind\":\"" + cfg.features_kind + "\"";
    if (cfg.features_kind == "lbp") {
        out += ",\"block\":" + std::to_string(cfg.lbp.block);
        out += ",\"overlap\":" + format_double(cfg.lbp.overlap);
    }
    out += "},\"method\":{\"name\":\"" + eval_method_name(cfg.method.method) + "\"";
    out += ",\"scheme\":" + scheme_json(cfg.method.scheme);
    out += ",\"beta\":" + format_double(cfg.method.beta);
    out += ",\"supervised\":" + std::string(cfg.method.supervised ? "true" : "false");
    out += ",\"pca_ratio\":" + format_double(cfg.method.pca_ratio);
    out += ",\"globality\":" + std::string(cfg.method.globality ? "true" : "false");
    out += "},\"protocol\":{\"scheme\":\"";
    SplitPlan tag;
    tag.scheme = cfg.split_scheme;
    tag.param = cfg.split_param;
    out += split_scheme_string(tag) + "\"";
    out += ",\"seed\":" + std::to_string(cfg.seed);
    out += ",\"dims\":[";
    for (std::size_t i = 0; i < cfg.dims.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(cfg.dims[i]);
    }
    out += "]},\"output\":\"" + cfg.output_dir + "\"}";
    return out;
}

struct LoadedData {
    std::optional<LabeledDataset> vectors;
    std::optional<ImageDataset> images;
};

LoadedData load_data(const RunConfig& cfg) {
    LoadedData data;
    if (cfg.dataset_kind == "csv") {
        data.vectors = load_csv_dataset(cfg.dataset_path);
    } else if (cfg.dataset_kind == "blobs") {
        data.vectors = make_blobs(cfg.blob_classes, cfg.blob_per_class, cfg.blob_dim,
                                  cfg.blob_separation, cfg.blob_spread, cfg.blob_seed);
    } else {
        ImageDataset images = load_image_tree(cfg.dataset_path, cfg.resize);
        if (cfg.method.method == EvalMethod::Glpp2d) {
            data.images = std::move(images);
        } else if (cfg.features_kind == "lbp") {
            data.vectors = lbp_features(images, cfg.lbp);
        } else {
            data.vectors = vectorize(images);
        }
    }
    return data;
}

const std::vector<int>& data_labels(const LoadedData& data) {
    return data.vectors ? data.vectors->labels : data.images->labels;
}

/// Final model on the full dataset, serialised as the run's model.json.
std::string full_model_json(const RunConfig& cfg, const LoadedData& data) {
    const int max_dim = *std::max_element(cfg.dims.begin(), cfg.dims.end());
    if (cfg.method.method == EvalMethod::Glpp2d) {
        const Projection2DModel model = fit_2d_glpp_upto(
            *data.images, max_dim, cfg.method.scheme, cfg.method.beta, cfg.method.globality);
        return to_json(model);
    }
    std::vector<int> all(static_cast<std::size_t>(data.vectors->size()));
    for (int i = 0; i < data.vectors->size(); ++i) all[static_cast<std::size_t>(i)] = i;
    const ProjectionModel model = fit_fold_1d(*data.vectors, cfg.method, all, max_dim);
    return to_json(model);
}

int cmd_run(const fs::path& config_path, const std::string& dump_graph,
            const std::string& scatter_path) {
    const RunConfig cfg = parse_config(config_path);
    validate(cfg);
    const LoadedData data = load_data(cfg);

    const SplitPlan splits =
        make_splits(data_labels(data), cfg.split_scheme, cfg.split_param, cfg.seed);

    EvalReport report;
    if (cfg.method.method == EvalMethod::Glpp2d)
        report = run_protocol(*data.images, cfg.method, splits, cfg.dims);
    else
        report = run_protocol(*data.vectors, cfg.method, splits, cfg.dims);

    fs::create_directories(cfg.output_dir);
    const fs::path out(cfg.output_dir);
    write_file_atomic(out / "config.echo.json", config_echo_json(cfg));
    write_file_atomic(out / "report.json", report_json(report, cfg.method));
    write_file_atomic(out / "curves.csv", curves_csv(report));
    write_file_atomic(out / "model.json", full_model_json(cfg, data));
    write_file_atomic(out / "splits.json", to_json(splits));

    if (!dump_graph.empty()) {
        const LabeledDataset d = data.vectors ? *data.vectors : vectorize(*data.images);
        const auto wg = within_class_graph(d, cfg.method.scheme);
        write_file_atomic(dump_graph, matrix_csv(wg.global.S));
    }
    if (!scatter_path.empty()) {
        if (cfg.method.method == EvalMethod::Glpp2d)
            throw ConfigError("--scatter applies to 1D methods");
        std::vector<int> all(static_cast<std::size_t>(data.vectors->size()));
        for (int i = 0; i < data.vectors->size(); ++i) all[static_cast<std::size_t>(i)] = i;
        const int d = std::max(2, *std::max_element(cfg.dims.begin(), cfg.dims.end()));
        const ProjectionModel model = fit_fold_1d(*data.vectors, cfg.method, all, d);
        write_file_atomic(scatter_path, scatter_csv(export_scatter(model, *data.vectors, true)));
    }

    std::printf("ara %.4f +/- %.4f  top %.4f @ dim %d\n", report.ara, report.std_dev,
                report.top_rate, report.best_dim);
    std::printf("fit %.2fs classify %.2fs over %zu folds\n", report.fit_time_s,
                report.classify_time_s, report.per_fold_accuracy.size());
    return 0;
}

int cmd_sweep(const fs::path& config_path, const std::string& axis, const std::string& grid_text) {
    const RunConfig cfg = parse_config(config_path);
    validate(cfg);
    if (axis != "dim" && axis != "beta") throw ConfigError("--axis must be dim or beta");
    if (axis == "beta" && cfg.method.method != EvalMethod::Glpp &&
        cfg.method.method != EvalMethod::Glpp2d)
        throw ConfigError("beta sweeps need a glpp or glpp2d method");

    const LoadedData data = load_data(cfg);
    const SplitPlan splits =
        make_splits(data_labels(data), cfg.split_scheme, cfg.split_param, cfg.seed);

    std::vector<std::tuple<double, double, double, double>> rows;
    if (axis == "dim") {
        std::vector<int> grid = cfg.dims;
        if (!grid_text.empty()) grid = parse_dims("--grid", grid_text);
        ProtocolDetail detail;
        if (cfg.method.method == EvalMethod::Glpp2d)
            detail = run_protocol_detailed(*data.images, cfg.method, splits, grid);
        else
            detail = run_protocol_detailed(*data.vectors, cfg.method, splits, grid);
        for (std::size_t di = 0; di < detail.dims.size(); ++di) {
            double mean = 0.0;
            for (const auto& fold : detail.fold_accuracy) mean += fold[di];
            mean /= static_cast<double>(detail.fold_accuracy.size());
            double var = 0.0;
            for (const auto& fold : detail.fold_accuracy)
                var += (fold[di] - mean) * (fold[di] - mean);
            const double std_dev =
                detail.fold_accuracy.size() > 1
                    ? std::sqrt(var / static_cast<double>(detail.fold_accuracy.size() - 1))
                    : 0.0;
            rows.emplace_back(detail.dims[di], mean, std_dev, mean);
        }
    } else {
        std::vector<double> grid = default_beta_grid();
        if (!grid_text.empty()) {
            grid.clear();
            for (const auto& part : split_list(grid_text, ','))
                if (!trim(part).empty()) grid.push_back(parse_real("--grid", trim(part)));
            if (grid.empty()) throw ConfigError("--grid: empty beta list");
        }
        if (cfg.method.method == EvalMethod::Glpp2d) {
            for (double beta : grid) {
                MethodConfig point = cfg.method;
                point.beta = beta;
                const EvalReport r = run_protocol(*data.images, point, splits, cfg.dims);
                rows.emplace_back(beta, r.ara, r.std_dev, r.top_rate);
            }
        } else {
            const auto reports = sweep_beta(*data.vectors, cfg.method, splits, grid, cfg.dims);
            for (const auto& [beta, r] : reports)
                rows.emplace_back(beta, r.ara, r.std_dev, r.top_rate);
        }
    }

    fs::create_directories(cfg.output_dir);
    const fs::path out(cfg.output_dir);
    write_file_atomic(out / "config.echo.json", config_echo_json(cfg));
    write_file_atomic(out / "sweep.csv", sweep_csv(rows));
    std::printf("%zu sweep points -> %s\n", rows.size(), (out / "sweep.csv").c_str());
    return 0;
}

int cmd_features(const fs::path& config_path, const std::string& out_path) {
    const RunConfig cfg = parse_config(config_path);
    if (cfg.dataset_kind != "image-tree")
        throw ConfigError("features dumping needs an image-tree dataset");
    if (!fs::exists(cfg.dataset_path))
        throw ConfigError("dataset.path does not exist: " + cfg.dataset_path);

    const ImageDataset images = load_image_tree(cfg.dataset_path, cfg.resize);
    const LabeledDataset features =
        cfg.features_kind == "lbp" ? lbp_features(images, cfg.lbp) : vectorize(images);
    save_csv_dataset(out_path, features);
    std::printf("%d samples x %lld features -> %s\n", static_cast<int>(features.size()),
                static_cast<long long>(features.dim()), out_path.c_str());
    return 0;
}

void apply_thread_cap() {
    if (const char* env = std::getenv("SUBSPACE_LAB_THREADS")) {
        int threads = 0;
        try {
            threads = std::stoi(env);
        } catch (const std::exception&) {
            throw ConfigError("SUBSPACE_LAB_THREADS must be a positive integer");
        }
        if (threads < 1) throw ConfigError("SUBSPACE_LAB_THREADS must be a positive integer");
        omp_set_num_threads(threads);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-based linear subspace learning benchmarks"};
    app.require_subcommand(1);

    std::string config_path, dump_graph, scatter_path, grid_text, out_path, axis;

    auto* run = app.add_subcommand("run", "run one evaluation protocol");
    run->add_option("--config", config_path, "run configuration file")->required();
    run->add_option("--dump-graph", dump_graph, "write the adjacency matrix as dense CSV");
    run->add_option("--scatter", scatter_path, "write a 2D class-mean embedding CSV");

    auto* sweep = app.add_subcommand("sweep", "scan dimensions or beta");
    sweep->add_option("--config", config_path, "run configuration file")->required();
    sweep->add_option("--axis", axis, "dim or beta")->required();
    sweep->add_option("--grid", grid_text, "comma-separated grid override");

    auto* features = app.add_subcommand("features", "dump feature vectors as CSV");
    features->add_option("--config", config_path, "run configuration file")->required();
    features->add_option("--out", out_path, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        apply_thread_cap();
        if (run->parsed()) return cmd_run(config_path, dump_graph, scatter_path);
        if (sweep->parsed()) return cmd_sweep(config_path, axis, grid_text);
        if (features->parsed()) return cmd_features(config_path, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

#include "subspace/dataset.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

namespace subspace {

namespace fs = std::filesystem;

namespace detail {

std::uint64_t Rng::next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::bounded(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = next();
    } while (v >= limit);
    return v % n;
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    const double u1 = 1.0 - unit(); // (0, 1]
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void shuffle(std::vector<int>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i)
        std::swap(values[i - 1], values[rng.bounded(i)]);
}

} // namespace detail

namespace {

double parse_double(std::string_view field, int row) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("row " + std::to_string(row) + ": non-numeric field '" +
                         std::string(field) + "'");
    return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::vector<int> densify_labels(const std::vector<double>& raw, int& class_count) {
    std::vector<int> labels(raw.size());
    std::map<long long, int> seen;
    int next = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const long long key = static_cast<long long>(std::llround(raw[i]));
        auto [it, inserted] = seen.try_emplace(key, next + 1);
        if (inserted) ++next;
        labels[i] = it->second;
    }
    class_count = next;
    return labels;
}

struct PgmImage {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> pixels; // row-major
};

int pgm_next_int(std::istream& in, const std::string& name) {
    // Skips whitespace and '#' comment lines.
    while (true) {
        const int c = in.peek();
        if (c == EOF) throw ParseError(name + ": truncated PGM header");
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int value = 0;
    if (!(in >> value)) throw ParseError(name + ": malformed PGM header");
    return value;
}

PgmImage load_pgm(const fs::path& path) {
    const std::string name = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(name + ": cannot open");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
        throw ParseError(name + ": not a P2/P5 PGM file");
    const bool binary = magic[1] == '5';

    PgmImage img;
    img.cols = pgm_next_int(in, name);
    img.rows = pgm_next_int(in, name);
    const int maxval = pgm_next_int(in, name);
    if (img.cols <= 0 || img.rows <= 0)
        throw ParseError(name + ": invalid PGM dimensions");
    if (maxval != 255) throw ParseError(name + ": unsupported maxval " + std::to_string(maxval));

    const std::size_t count = static_cast<std::size_t>(img.rows) * img.cols;
    img.pixels.resize(count);
    if (binary) {
        in.get(); // single whitespace after maxval
        in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count)
            throw ParseError(name + ": truncated P5 pixel data");
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            int v = 0;
            if (!(in >> v)) throw ParseError(name + ": truncated P2 pixel data");
            if (v < 0 || v > 255) throw ParseError(name + ": P2 sample out of range");
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

} // namespace

LabeledDataset load_csv_dataset(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string() + ": cannot open");

    std::vector<double> raw_labels;
    std::vector<std::vector<double>> rows;
    std::string line;
    int row_number = 0;
    Eigen::Index dim = -1;
    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() < 2)
            throw ParseError("row " + std::to_string(row_number) + ": needs a label and at least one feature");
        if (dim < 0) dim = static_cast<Eigen::Index>(fields.size()) - 1;
        if (static_cast<Eigen::Index>(fields.size()) - 1 != dim)
            throw ParseError("row " + std::to_string(row_number) + ": expected " +
                             std::to_string(dim) + " features, got " +
                             std::to_string(fields.size() - 1));
        raw_labels.push_back(parse_double(fields[0], row_number));
        std::vector<double> values(dim);
        for (Eigen::Index j = 0; j < dim; ++j)
            values[j] = parse_double(fields[j + 1], row_number);
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ParseError(path.string() + ": empty input");

    LabeledDataset data;
    data.features.resize(dim, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (Eigen::Index i = 0; i < dim; ++i)
            data.features(i, static_cast<Eigen::Index>(j)) = rows[j][i];
    data.labels = densify_labels(raw_labels, data.class_count);
    if (!data.features.allFinite()) throw ParseError(path.string() + ": non-finite feature value");
    return data;
}

void save_csv_dataset(const fs::path& path, const LabeledDataset& data) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string() + ": cannot write");
    out.precision(17);
    for (Eigen::Index j = 0; j < data.size(); ++j) {
        out << data.labels[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < data.dim(); ++i) out << ',' << data.features(i, j);
        out << '\n';
    }
}

Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& image, int rows, int cols) {
    if (rows < 1 || cols < 1) throw DomainError("resize_bilinear: target shape must be positive");
    const Eigen::Index sr = image.rows(), sc = image.cols();
    Eigen::MatrixXd out(rows, cols);
    // Corner-aligned sampling: destination corners land exactly on source corners.
    const double ry = rows > 1 ? static_cast<double>(sr - 1) / (rows - 1) : 0.0;
    const double rx = cols > 1 ? static_cast<double>(sc - 1) / (cols - 1) : 0.0;
    for (int y = 0; y < rows; ++y) {
        const double sy = y * ry;
        const Eigen::Index y0 = static_cast<Eigen::Index>(sy);
        const Eigen::Index y1 = std::min<Eigen::Index>(y0 + 1, sr - 1);
        const double fy = sy - static_cast<double>(y0);
        for (int x = 0; x < cols; ++x) {
            const double sx = x * rx;
            const Eigen::Index x0 = static_cast<Eigen::Index>(sx);
            const Eigen::Index x1 = std::min<Eigen::Index>(x0 + 1, sc - 1);
            const double fx = sx - static_cast<double>(x0);
            out(y, x) = (1.0 - fy) * ((1.0 - fx) * image(y0, x0) + fx * image(y0, x1)) +
                        fy * ((1.0 - fx) * image(y1, x0) + fx * image(y1, x1));
        }
    }
    return out;
}

ImageDataset load_image_tree(const fs::path& root, std::optional<std::pair<int, int>> resize) {
    if (!fs::is_directory(root)) throw IoError(root.string() + ": not a directory");

    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) class_dirs.push_back(entry.path());
    std::sort(class_dirs.begin(), class_dirs.end());
    if (class_dirs.empty()) throw ProtocolError(root.string() + ": no class subdirectories");

    ImageDataset data;
    int label = 0;
    for (const auto& dir : class_dirs) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file()) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) continue;
        ++label;
        for (const auto& file : files) {
            const PgmImage raw = load_pgm(file);
            Eigen::MatrixXd img(raw.rows, raw.cols);
            for (int r = 0; r < raw.rows; ++r)
                for (int c = 0; c < raw.cols; ++c)
                    img(r, c) = raw.pixels[static_cast<std::size_t>(r) * raw.cols + c] / 255.0;
            if (resize) img = resize_bilinear(img, resize->first, resize->second);
            if (!data.images.empty() &&
                (img.rows() != data.rows() || img.cols() != data.cols()))
                throw ShapeError(file.string() + ": size " + std::to_string(img.rows()) + "x" +
                                 std::to_string(img.cols()) + " differs from " +
                                 std::to_string(data.rows()) + "x" + std::to_string(data.cols()) +
                                 " (pass a resize target for mixed-size trees)");
            data.images.push_back(std::move(img));
            data.labels.push_back(label);
        }
    }
    data.class_count = label;
    if (data.images.empty()) throw ProtocolError(root.string() + ": no images found");
    return data;
}

LabeledDataset vectorize(const ImageDataset& images) {
    if (images.images.empty()) throw ProtocolError("vectorize: empty image dataset");
    const Eigen::Index h = images.rows(), w = images.cols();
    for (const auto& img : images.images)
        if (img.rows() != h || img.cols() != w)
            throw ShapeError("vectorize: mixed image shapes");
    LabeledDataset data;
    data.features.resize(h * w, images.size());
    for (int j = 0; j < images.size(); ++j)
        data.features.col(j) =
            Eigen::Map<const Eigen::VectorXd>(images.images[static_cast<std::size_t>(j)].data(), h * w);
    data.labels = images.labels;
    data.class_count = images.class_count;
    return data;
}

namespace {

std::vector<std::vector<int>> indices_by_class(const std::vector<int>& labels, int p) {
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(p));
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
        by_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)] - 1)].push_back(i);
    return by_class;
}

void sort_fold(Fold& fold) {
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.test.begin(), fold.test.end());
}

} // namespace

SplitPlan make_splits(const std::vector<int>& labels, SplitScheme scheme, int param,
                      std::uint64_t seed) {
    if (labels.empty()) throw ProtocolError("make_splits: no samples");
    int p = 0;
    for (int l : labels) {
        if (l < 1) throw ProtocolError("make_splits: labels must be >= 1");
        p = std::max(p, l);
    }
    const auto by_class = indices_by_class(labels, p);
    for (const auto& cls : by_class)
        if (cls.empty()) throw ProtocolError("make_splits: labels must be dense 1..p");

    SplitPlan plan;
    plan.scheme = scheme;
    plan.param = param;
    plan.seed = seed;
    const int n = static_cast<int>(labels.size());

    auto require_two_per_class = [&](const char* what) {
        std::string offenders;
        for (int c = 0; c < p; ++c)
            if (by_class[static_cast<std::size_t>(c)].size() < 2)
                offenders += (offenders.empty() ? "" : ", ") + std::to_string(c + 1);
        if (!offenders.empty())
            throw ProtocolError(std::string(what) + ": classes with a single sample: " + offenders);
    };

    switch (scheme) {
    case SplitScheme::LeaveOneOut: {
        require_two_per_class("leave-one-out");
        for (int i = 0; i < n; ++i) {
            Fold fold;
            fold.test.push_back(i);
            for (int j = 0; j < n; ++j)
                if (j != i) fold.train.push_back(j);
            plan.folds.push_back(std::move(fold));
        }
        break;
    }
    case SplitScheme::TwoFold:
    case SplitScheme::KFold: {
        const int k = scheme == SplitScheme::TwoFold ? 2 : param;
        plan.param = k;
        if (k < 2) throw ProtocolError("k-fold: k must be >= 2");
        require_two_per_class("k-fold");
        int max_class = 0;
        for (const auto& cls : by_class) max_class = std::max<int>(max_class, static_cast<int>(cls.size()));
        if (k > max_class)
            throw ProtocolError("k-fold: k exceeds the largest class size");
        // Per-class round-robin assignment after a seeded within-class shuffle.
        std::vector<int> fold_of(static_cast<std::size_t>(n), 0);
        detail::Rng rng(seed);
        for (int c = 0; c < p; ++c) {
            std::vector<int> order = by_class[static_cast<std::size_t>(c)];
            detail::shuffle(order, rng);
            for (std::size_t j = 0; j < order.size(); ++j)
                fold_of[static_cast<std::size_t>(order[j])] = static_cast<int>(j) % k;
        }
        plan.folds.resize(static_cast<std::size_t>(k));
        for (int i = 0; i < n; ++i)
            for (int f = 0; f < k; ++f)
                (fold_of[static_cast<std::size_t>(i)] == f ? plan.folds[static_cast<std::size_t>(f)].test
                                                           : plan.folds[static_cast<std::size_t>(f)].train)
                    .push_back(i);
        break;
    }
    case SplitScheme::SingleSample: {
        int retained = 0;
        int min_size = n;
        for (const auto& cls : by_class) {
            if (cls.size() >= 2) {
                ++retained;
                min_size = std::min<int>(min_size, static_cast<int>(cls.size()));
            } else {
                ++plan.dropped_classes;
            }
        }
        if (retained == 0) throw ProtocolError("single-sample: every class has fewer than 2 samples");
        for (int t = 0; t < min_size; ++t) {
            Fold fold;
            for (int c = 0; c < p; ++c) {
                const auto& cls = by_class[static_cast<std::size_t>(c)];
                if (cls.size() < 2) continue;
                for (std::size_t j = 0; j < cls.size(); ++j)
                    (static_cast<int>(j) == t ? fold.train : fold.test).push_back(cls[j]);
            }
            sort_fold(fold);
            plan.folds.push_back(std::move(fold));
        }
        break;
    }
    case SplitScheme::FirstNTrain: {
        const int train_n = param;
        if (train_n < 1) throw ProtocolError("first-n-train: n must be >= 1");
        Fold fold;
        int retained = 0;
        for (int c = 0; c < p; ++c) {
            const auto& cls = by_class[static_cast<std::size_t>(c)];
            if (static_cast<int>(cls.size()) < train_n + 1) {
                ++plan.dropped_classes;
                continue;
            }
            ++retained;
            for (std::size_t j = 0; j < cls.size(); ++j)
                (static_cast<int>(j) < train_n ? fold.train : fold.test).push_back(cls[j]);
        }
        if (retained == 0)
            throw ProtocolError("first-n-train: no class has more than n samples");
        sort_fold(fold);
        plan.folds.push_back(std::move(fold));
        break;
    }
    }
    return plan;
}

MeanSpace class_means(const LabeledDataset& data) {
    if (data.class_count < 1) throw ProtocolError("class_means: empty dataset");
    MeanSpace space;
    space.means = Eigen::MatrixXd::Zero(data.dim(), data.class_count);
    std::vector<int> counts(static_cast<std::size_t>(data.class_count), 0);
    for (Eigen::Index j = 0; j < data.size(); ++j) {
        const int c = data.labels[static_cast<std::size_t>(j)] - 1;
        space.means.col(c) += data.features.col(j);
        ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < data.class_count; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0)
            throw ProtocolError("class_means: class " + std::to_string(c + 1) + " has no samples");
        space.means.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
    return space;
}

Eigen::MatrixXd pca_project(const PcaModel& model, const Eigen::MatrixXd& x) {
    if (x.rows() != model.mean.size())
        throw ShapeError("pca_project: input has " + std::to_string(x.rows()) +
                         " rows, model expects " + std::to_string(model.mean.size()));
    return model.basis.transpose() * (x.colwise() - model.mean);
}

std::pair<PcaModel, LabeledDataset> pca_preprocess(const LabeledDataset& data, double ratio) {
    if (ratio <= 0.0 || ratio > 1.0) throw DomainError("pca_preprocess: ratio must be in (0,1]");
    const Eigen::Index n = data.size(), m = data.dim();
    if (n < 2) throw DomainError("pca_preprocess: need at least 2 samples");

    PcaModel model;
    model.ratio = ratio;
    model.mean = data.features.rowwise().mean();
    Eigen::MatrixXd centered = data.features.colwise() - model.mean;

    const double data_scale = data.features.cwiseAbs().maxCoeff();
    if (centered.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + data_scale))
        throw DegenerateError("pca_preprocess: all samples identical");

    // Eigendecompose the smaller of X X^T (m x m) and X^T X (n x n); they
    // share their nonzero spectrum.
    Eigen::VectorXd evals;  // descending scatter eigenvalues
    Eigen::MatrixXd basis;  // matching orthonormal columns in sample space
    if (m <= n) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered * centered.transpose());
        if (eig.info() != Eigen::Success) throw DegenerateError("pca_preprocess: eigensolver failed");
        evals = eig.eigenvalues().reverse();
        basis = eig.eigenvectors().rowwise().reverse();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered.transpose() * centered);
        if (eig.info() != Eigen::Success) throw DegenerateError("pca_preprocess: eigensolver failed");
        evals = eig.eigenvalues().reverse();
        Eigen::MatrixXd v = eig.eigenvectors().rowwise().reverse();
        basis.resize(m, evals.size());
        for (Eigen::Index i = 0; i < evals.size(); ++i) {
            const double sigma = std::max(evals(i), 0.0);
            if (sigma > 0.0)
                basis.col(i) = centered * v.col(i) / std::sqrt(sigma);
            else
                basis.col(i).setZero();
        }
    }

    const double largest = std::max(evals(0), 0.0);
    if (largest <= 0.0) throw DegenerateError("pca_preprocess: no positive eigenvalue");
    const double null_cut = 1e-10 * largest;

    double total = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) total += std::max(evals(i), 0.0);

    Eigen::Index r = 0;
    double cumulative = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (evals(i) <= null_cut) break;
        cumulative += evals(i);
        r = i + 1;
        if (cumulative >= ratio * total * (1.0 - 1e-12)) break;
    }
    if (r == 0) throw DegenerateError("pca_preprocess: no eigenvalue above the null threshold");

    model.basis = basis.leftCols(r);
    // Store sample-covariance eigenvalues so projected variances match.
    model.eigenvalues = evals.head(r) / static_cast<double>(n - 1);

    LabeledDataset reduced;
    reduced.features = model.basis.transpose() * centered;
    reduced.labels = data.labels;
    reduced.class_count = data.class_count;
    return {std::move(model), std::move(reduced)};
}

LabeledDataset make_blobs(int classes, int per_class, int dim, double separation, double spread,
                          std::uint64_t seed) {
    if (classes < 1 || per_class < 1 || dim < 1)
        throw DomainError("make_blobs: classes, per_class and dim must be positive");
    if (separation <= 0.0 || spread <= 0.0)
        throw DomainError("make_blobs: separation and spread must be positive");
    detail::Rng rng(seed);

    Eigen::MatrixXd centers(dim, classes);
    for (int c = 0; c < classes; ++c)
        for (int i = 0; i < dim; ++i) centers(i, c) = rng.normal();
    if (classes > 1) {
        double min_dist = std::numeric_limits<double>::infinity();
        for (int a = 0; a < classes; ++a)
            for (int b = a + 1; b < classes; ++b)
                min_dist = std::min(min_dist, (centers.col(a) - centers.col(b)).norm());
        if (min_dist <= 1e-9) throw DegenerateError("make_blobs: coincident class centres");
        centers *= separation * spread / min_dist;
    }

    LabeledDataset data;
    data.class_count = classes;
    data.features.resize(dim, static_cast<Eigen::Index>(classes) * per_class);
    data.labels.reserve(static_cast<std::size_t>(classes) * per_class);
    Eigen::Index col = 0;
    for (int c = 0; c < classes; ++c)
        for (int s = 0; s < per_class; ++s, ++col) {
            for (int i = 0; i < dim; ++i) data.features(i, col) = centers(i, c) + spread * rng.normal();
            data.labels.push_back(c + 1);
        }
    return data;
}

std::string method_name(Method m) {
    switch (m) {
    case Method::Pca: return "pca";
    case Method::Lda: return "lda";
    case Method::Lpp: return "lpp";
    case Method::Dlpp: return "dlpp";
    case Method::Glpp: return "glpp";
    }
    return "unknown";
}

} // namespace subspace

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>

#include "subspace/types.hpp"

namespace subspace {

/// Reads `label,f1,...,fm` rows (LF or CRLF) into a column-per-sample dataset.
/// Labels are re-indexed densely to 1..p in first-occurrence order.
LabeledDataset load_csv_dataset(const std::filesystem::path& path);

/// Writes a dataset back out in the same CSV layout (one sample per row).
void save_csv_dataset(const std::filesystem::path& path, const LabeledDataset& data);

/// Loads `root/<class>/<image>.pgm` trees (P2 or P5, maxval 255) into [0,1]
/// image matrices. Class labels follow lexicographic subdirectory order and
/// files are taken in lexicographic order within each class.
ImageDataset load_image_tree(const std::filesystem::path& root,
                             std::optional<std::pair<int, int>> resize = std::nullopt);

/// Corner-aligned bilinear resample to rows x cols.
Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& image, int rows, int cols);

/// Flattens each image column-major into one feature column; m = h*w.
LabeledDataset vectorize(const ImageDataset& images);

/// Builds a deterministic cross-validation plan. `param` is k for KFold and
/// n for FirstNTrain; it is ignored by the other schemes.
SplitPlan make_splits(const std::vector<int>& labels, SplitScheme scheme, int param,
                      std::uint64_t seed);

/// Arithmetic mean column per class, class order 1..p.
MeanSpace class_means(const LabeledDataset& data);

/// Centers the data and keeps the leading principal directions covering
/// `ratio` of the spectrum; eigenvalues below 1e-10 of the largest are
/// dropped regardless. Returns the model and the reduced dataset.
std::pair<PcaModel, LabeledDataset> pca_preprocess(const LabeledDataset& data, double ratio);

/// Projects columns of x into the PCA subspace (center, then basis^T x).
Eigen::MatrixXd pca_project(const PcaModel& model, const Eigen::MatrixXd& x);

/// Gaussian class blobs with pairwise centre separation `separation * spread`.
/// Entirely deterministic for a given seed; used by the CLI and the test
/// suites so no external data is required.
LabeledDataset make_blobs(int classes, int per_class, int dim, double separation,
                          double spread, std::uint64_t seed);

namespace detail {

/// splitmix64 stream; self-contained so draws are identical across standard
/// libraries (std distributions are implementation-defined).
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    std::uint64_t bounded(std::uint64_t n); // unbiased draw in [0, n)
    double unit();                          // [0, 1)
    double normal();                        // Box-Muller
};

void shuffle(std::vector<int>& values, Rng& rng);

} // namespace detail

} // namespace subspace

#pragma once

#include <array>
#include <cstdint>

#include "subspace/types.hpp"

namespace subspace {

/// Uniform 59-code LBP block histograms.
struct LbpParams {
    int block = 16;       // block side in pixels
    double overlap = 0.5; // fraction of block shared with the next one
    static constexpr int bins = 59;
};

/// Maps each raw 8-bit code to its histogram bin: the 58 uniform codes
/// (at most two circular 0/1 transitions) get bins 0..57 in ascending code
/// order, everything else shares bin 58.
const std::array<std::uint8_t, 256>& lbp_uniform_bins();

/// Bin index per interior pixel; (h-2) x (w-2) values in 0..58.
Eigen::MatrixXi lbp_code_map(const Eigen::MatrixXd& image);

/// Block stride implied by the parameters; must come out a positive integer.
int lbp_stride(const LbpParams& params);

/// Concatenated L1-normalised 59-bin histograms over blocks in row-major
/// block order; trailing partial blocks are dropped.
Eigen::VectorXd lbp_block_histograms(const Eigen::MatrixXd& image, const LbpParams& params);

/// Feature length for an h x w image under the given parameters.
int lbp_feature_dim(int rows, int cols, const LbpParams& params);

/// Applies lbp_block_histograms to every image, keeping labels.
LabeledDataset lbp_features(const ImageDataset& images, const LbpParams& params);

} // namespace subspace

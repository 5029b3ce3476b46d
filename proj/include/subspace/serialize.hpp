#pragma once

#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include "subspace/eval.hpp"
#include "subspace/types.hpp"

namespace subspace {

/// Floating point is rendered with 17 significant digits so every value
/// round-trips exactly and repeated runs emit byte-identical files.
std::string format_double(double v);

std::string scheme_json(const WeightScheme& scheme);
std::string split_scheme_string(const SplitPlan& plan);

std::string to_json(const SplitPlan& plan);
std::string to_json(const ProjectionModel& model);
std::string to_json(const Projection2DModel& model);

/// Report layout: {method, scheme, beta?, folds, ara, std, top_rate,
/// best_dim, curves}.
std::string report_json(const EvalReport& report, const MethodConfig& cfg);

std::string curves_csv(const EvalReport& report);
std::string sweep_csv(const std::vector<std::tuple<double, double, double, double>>& rows);
std::string scatter_csv(const std::vector<std::tuple<double, double, int>>& rows);
std::string matrix_csv(const Eigen::MatrixXd& m);

/// Rebuilds a 1D model from its JSON form (exact, thanks to the 17-digit
/// serialisation).
ProjectionModel model_from_json(const std::string& text);

/// Write-temp-then-rename so partially written outputs never appear.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace subspace

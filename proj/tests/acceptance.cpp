// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any fail. Criterion 9 needs user-supplied ORL-style data
// (SUBSPACE_LAB_ORL_DIR) and is skipped when absent.

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "subspace/dataset.hpp"
#include "subspace/eval.hpp"
#include "subspace/features.hpp"
#include "subspace/graph.hpp"
#include "subspace/projections.hpp"
#include "subspace/serialize.hpp"
#include "subspace/twod.hpp"
#include "support.hpp"

using namespace subspace;
using testsupport::Rng;
namespace fs = std::filesystem;

namespace {

int checks_failed = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++checks_failed;
        std::printf("       check failed: %s\n", what.c_str());
    }
}

bool run_criterion(int number, const std::string& name, double limit_s,
                   const std::function<void()>& body) {
    checks_failed = 0;
    const auto start = std::chrono::steady_clock::now();
    bool threw = false;
    std::string thrown;
    try {
        body();
    } catch (const std::exception& e) {
        threw = true;
        thrown = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = !threw && checks_failed == 0;
    if (elapsed > limit_s) {
        std::printf("       runtime %.1fs exceeds the %.0fs budget\n", elapsed, limit_s);
        ok = false;
    }
    if (threw) std::printf("       threw: %s\n", thrown.c_str());
    std::printf("[%s] %d. %s (%.2fs)\n", ok ? "PASS" : "FAIL", number, name.c_str(), elapsed);
    return ok;
}

std::vector<int> range_dims(int lo, int hi) {
    std::vector<int> dims;
    for (int k = lo; k <= hi; ++k) dims.push_back(k);
    return dims;
}

MethodConfig glpp_config(double beta) {
    MethodConfig cfg;
    cfg.method = EvalMethod::Glpp;
    cfg.scheme = WeightScheme::dot_product();
    cfg.beta = beta;
    return cfg;
}

// ---- criterion bodies -----------------------------------------------------

void laplacian_suite() {
    Rng rng(1001);
    const WeightScheme schemes[] = {WeightScheme::dot_product(), WeightScheme::heat_kernel(0.0),
                                    WeightScheme::binary(3)};
    for (int trial = 0; trial < 200; ++trial) {
        const int classes = 2 + static_cast<int>(rng.bounded(4));
        const int per_class = 2 + static_cast<int>(rng.bounded(5));
        const LabeledDataset d = testsupport::random_dataset(
            rng, 2 + static_cast<Eigen::Index>(rng.bounded(8)), classes, per_class);
        const WeightScheme& scheme = schemes[trial % 3];

        const auto wg = within_class_graph(d, scheme);
        const WeightGraph mean_g = mean_graph(class_means(d), scheme);
        for (const WeightGraph* g : {&wg.global, &mean_g}) {
            const LaplacianPair lap = laplacian(*g);
            const double scale = 1.0 + g->S.cwiseAbs().maxCoeff();
            expect(lap.L.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10 * scale,
                   "laplacian row sums");
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap.L);
            const double max_eig = std::max(eig.eigenvalues().maxCoeff(), 0.0);
            expect(eig.eigenvalues().minCoeff() >= -1e-8 * std::max(max_eig, 1e-30),
                   "laplacian PSD");
        }
    }
}

void objective_oracle_suite() {
    Rng rng(1002);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 3 + static_cast<int>(rng.bounded(10));        // <= 12
        const int classes = 2 + static_cast<int>(rng.bounded(3));   // 2..4
        const int per_class = 2 + static_cast<int>(rng.bounded(4)); // n <= 20
        const double beta = std::pow(10.0, static_cast<double>(rng.bounded(7)) - 2.0);
        const WeightScheme scheme =
            trial % 2 ? WeightScheme::dot_product() : WeightScheme::heat_kernel(0.0);

        const LabeledDataset d = testsupport::random_dataset(rng, m, classes, per_class);
        const Eigen::VectorXd w = testsupport::random_vector(rng, m);

        // LPP: double sum vs 2 w'XLX'w on the supervised graph
        const auto wg = within_class_graph(d, scheme);
        const Eigen::MatrixXd xlxt =
            d.features * (laplacian(wg.global).L * d.features.transpose());
        const double lpp_quad = 2.0 * w.dot(xlxt * w);
        const double lpp_brute = testsupport::objective_double_sum(d.features, wg.global.S, w);
        expect(std::abs(lpp_quad - lpp_brute) <= 1e-8 * std::max(1.0, std::abs(lpp_brute)),
               "lpp quadratic form");

        // GLPP: w'Aw vs global + beta * local double sums
        const GlppOperator op = assemble_glpp_operator(d, scheme, beta);
        const MeanSpace means = class_means(d);
        const WeightGraph mg = mean_graph(means, scheme);
        const double glpp_brute =
            testsupport::objective_double_sum(means.means, mg.S, w) +
            beta * testsupport::objective_double_sum(d.features, wg.global.S, w);
        const double glpp_quad = w.dot(op.A * w);
        expect(std::abs(glpp_quad - glpp_brute) <= 1e-8 * std::max(1.0, std::abs(glpp_brute)),
               "glpp quadratic form");

        // 2D: w'A2w vs the Kronecker-lifted pairwise sums (h*w <= 12)
        const Eigen::Index h = 2 + static_cast<Eigen::Index>(rng.bounded(2));
        const Eigen::Index wd = 3 + static_cast<Eigen::Index>(rng.bounded(2));
        const ImageDataset imgs = testsupport::random_images(rng, h, wd, classes, per_class);
        const Eigen::MatrixXd a2 = assemble_2d_glpp_operator(imgs, scheme, beta, true);
        const Eigen::VectorXd w2 = testsupport::random_vector(rng, wd);

        const LabeledDataset flat = vectorize(imgs);
        const auto wg2 = within_class_graph(flat, scheme);
        const MeanSpace means2 = class_means(flat);
        const WeightGraph mg2 = mean_graph(means2, scheme);
        std::vector<Eigen::MatrixXd> mean_images;
        for (int c = 0; c < imgs.class_count; ++c)
            mean_images.push_back(
                Eigen::Map<const Eigen::MatrixXd>(means2.means.col(c).data(), h, wd));
        const double brute2 =
            testsupport::objective_double_sum_2d(mean_images, mg2.S, w2) +
            beta * testsupport::objective_double_sum_2d(imgs.images, wg2.global.S, w2);
        const double quad2 = w2.dot(a2 * w2);
        expect(std::abs(quad2 - brute2) <= 1e-8 * std::max(1.0, std::abs(brute2)),
               "2d quadratic form");
    }
}

void eigen_residual_suite() {
    Rng rng(1003);
    for (int trial = 0; trial < 5; ++trial) {
        // p > m keeps the DLPP constraint matrix full rank; unit-interval
        // features keep dot-product weights strictly positive (pixel regime)
        const LabeledDataset d = testsupport::random_dataset_unit(rng, 5, 7, 4);
        const WeightScheme scheme =
            trial % 2 ? WeightScheme::dot_product() : WeightScheme::heat_kernel(0.0);
        const int dim = 3;

        { // pca: covariance eigen-equation
            const ProjectionModel model = fit_pca(d, dim);
            const Eigen::MatrixXd centered =
                d.features.colwise() - d.features.rowwise().mean().eval();
            const Eigen::MatrixXd cov = centered * centered.transpose() / (d.size() - 1.0);
            for (int i = 0; i < dim; ++i)
                expect((cov * model.W.col(i) - model.eigenvalues(i) * model.W.col(i)).norm() <
                           1e-8 * cov.norm(),
                       "pca residual");
        }
        { // lda: S_b w = lambda S_w w
            const ProjectionModel model = fit_lda(d, 2);
            const MeanSpace means = class_means(d);
            const Eigen::VectorXd gmean = d.features.rowwise().mean();
            const Eigen::Index m = d.dim();
            Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(m, m), sb = Eigen::MatrixXd::Zero(m, m);
            std::vector<int> counts(static_cast<std::size_t>(d.class_count), 0);
            for (Eigen::Index j = 0; j < d.size(); ++j) {
                const int c = d.labels[static_cast<std::size_t>(j)] - 1;
                const Eigen::VectorXd dev = d.features.col(j) - means.means.col(c);
                sw += dev * dev.transpose();
                ++counts[static_cast<std::size_t>(c)];
            }
            for (int c = 0; c < d.class_count; ++c) {
                const Eigen::VectorXd diff = means.means.col(c) - gmean;
                sb += static_cast<double>(counts[static_cast<std::size_t>(c)]) * diff *
                      diff.transpose();
            }
            for (int i = 0; i < 2; ++i)
                expect((sb * model.W.col(i) - model.eigenvalues(i) * sw * model.W.col(i)).norm() <
                           1e-8 * (sb.norm() + sw.norm()) * (1.0 + model.eigenvalues(i)),
                       "lda residual");
        }
        { // lpp: generalized equation + constraint
            const ProjectionModel model = fit_lpp(d, dim, scheme, true);
            const auto wg = within_class_graph(d, scheme);
            const LaplacianPair lap = laplacian(wg.global);
            const Eigen::MatrixXd xlxt =
                d.features * (lap.L * d.features.transpose());
            const Eigen::MatrixXd xdxt =
                d.features * (lap.degrees.asDiagonal() * d.features.transpose());
            for (int i = 0; i < dim; ++i) {
                const Eigen::VectorXd w = model.W.col(i);
                expect((xlxt * w - model.eigenvalues(i) * xdxt * w).norm() <
                           1e-8 * (xlxt.norm() + xdxt.norm()),
                       "lpp residual");
                expect(std::abs(w.dot(xdxt * w) - 1.0) <= 1e-8, "lpp constraint");
            }
        }
        { // dlpp: XLX'w = lambda UKU'w
            const ProjectionModel model = fit_dlpp(d, 2, scheme);
            const auto wg = within_class_graph(d, scheme);
            const Eigen::MatrixXd xlxt =
                d.features * (laplacian(wg.global).L * d.features.transpose());
            const MeanSpace means = class_means(d);
            const Eigen::MatrixXd ukut =
                means.means * (laplacian(mean_graph(means, scheme)).L * means.means.transpose());
            for (int i = 0; i < 2; ++i) {
                const Eigen::VectorXd w = model.W.col(i);
                expect((xlxt * w - model.eigenvalues(i) * ukut * w).norm() <
                           1e-8 * (xlxt.norm() + ukut.norm()) * (1.0 + model.eigenvalues(i)),
                       "dlpp residual");
            }
        }
        { // glpp: lambda w = A w
            const ProjectionModel model = fit_glpp(d, dim, scheme, 10000.0);
            const GlppOperator op = assemble_glpp_operator(d, scheme, 10000.0);
            for (int i = 0; i < dim; ++i)
                expect((op.A * model.W.col(i) - model.eigenvalues(i) * model.W.col(i)).norm() <
                           1e-8 * op.A.norm(),
                       "glpp residual");
        }
        { // 2d-glpp: lambda w = A2 w
            const ImageDataset imgs = testsupport::random_images(rng, 4, 6, 3, 4);
            const Projection2DModel model = fit_2d_glpp(imgs, 3, scheme, 10000.0);
            const Eigen::MatrixXd a2 = assemble_2d_glpp_operator(imgs, scheme, 10000.0, true);
            for (int i = 0; i < 3; ++i)
                expect((a2 * model.W.col(i) - model.eigenvalues(i) * model.W.col(i)).norm() <
                           1e-8 * a2.norm(),
                       "2d residual");
        }
    }
}

void degeneracy_identities() {
    Rng rng(1004);
    { // one sample per class: A == 2 X K_all X' exactly
        const LabeledDataset d = testsupport::random_dataset(rng, 5, 7, 1);
        for (const WeightScheme scheme :
             {WeightScheme::dot_product(), WeightScheme::heat_kernel(0.0)}) {
            const GlppOperator op = assemble_glpp_operator(d, scheme, 10000.0);
            const LaplacianPair lap = laplacian(all_pairs_graph(d.features, scheme));
            const Eigen::MatrixXd xt = d.features.transpose();
            const Eigen::MatrixXd kxt = lap.L * xt;
            const Eigen::MatrixXd expected = symmetrize(2.0 * (d.features * kxt));
            expect(op.A == expected, "one-sample-per-class identity (exact)");
            expect(op.local_part.cwiseAbs().maxCoeff() == 0.0, "local part vanishes");
        }
    }
    { // 2D on 1 x w images equals the 1D operator exactly
        const ImageDataset imgs = testsupport::random_images(rng, 1, 6, 3, 3);
        const LabeledDataset flat = vectorize(imgs);
        for (const WeightScheme scheme :
             {WeightScheme::dot_product(), WeightScheme::heat_kernel(0.0)}) {
            const Eigen::MatrixXd a2 = assemble_2d_glpp_operator(imgs, scheme, 321.0, true);
            const GlppOperator op = assemble_glpp_operator(flat, scheme, 321.0);
            expect(a2 == op.A, "1-row image identity (exact)");
        }
    }
    { // single-class DLPP raises a protocol error
        const LabeledDataset d = testsupport::random_dataset(rng, 4, 1, 6);
        bool threw = false;
        try {
            fit_dlpp(d, 1, WeightScheme::dot_product());
        } catch (const ProtocolError&) {
            threw = true;
        }
        expect(threw, "single-class dlpp protocol error");
    }
}

void synthetic_end_to_end() {
    const LabeledDataset blobs = make_blobs(8, 20, 16, 50.0, 1.0, 20240901);
    const SplitPlan splits = make_splits(blobs.labels, SplitScheme::LeaveOneOut, 0, 1);
    const auto dims = range_dims(1, 8);

    const EvalReport good = run_protocol(blobs, glpp_config(10000.0), splits, dims);
    expect(good.ara == 1.0, "ara is exactly 1.0 at beta 10000");

    const EvalReport poor = run_protocol(blobs, glpp_config(0.01), splits, dims);
    expect(poor.ara <= good.ara, "beta 0.01 does not beat beta 10000");
}

void beta_insensitivity() {
    const LabeledDataset blobs = make_blobs(8, 20, 16, 50.0, 1.0, 20240901);
    const SplitPlan splits = make_splits(blobs.labels, SplitScheme::LeaveOneOut, 0, 1);
    const auto reports =
        sweep_beta(blobs, glpp_config(10000.0), splits, {1e3, 1e4, 1e5}, range_dims(1, 8));
    for (std::size_t i = 0; i < reports.size(); ++i)
        for (std::size_t j = i + 1; j < reports.size(); ++j)
            expect(std::abs(reports[i].second.top_rate - reports[j].second.top_rate) <= 0.02,
                   "top rates differ by more than 2 points");
}

void lbp_suite() {
    { // exactly 58 uniform codes
        const auto& bins = lbp_uniform_bins();
        int uniform = 0;
        for (int code = 0; code < 256; ++code) {
            int flips = 0;
            for (int b = 0; b < 8; ++b)
                if (((code >> b) & 1) != ((code >> ((b + 1) % 8)) & 1)) ++flips;
            if (flips <= 2) ++uniform;
            expect((bins[static_cast<std::size_t>(code)] == 58) == (flips > 2), "bin assignment");
        }
        expect(uniform == 58, "58 uniform codes");
    }
    expect(lbp_feature_dim(64, 64, LbpParams{}) == 2891, "64/16/0.5 feature dimension");
    { // exact constant-shift invariance
        Rng rng(1007);
        Eigen::MatrixXd img(40, 40);
        for (Eigen::Index j = 0; j < 40; ++j)
            for (Eigen::Index i = 0; i < 40; ++i) img(i, j) = rng.unit();
        expect(lbp_code_map(img) == lbp_code_map(img.array() + 0.125), "shift invariance");
    }
}

fs::path g_cli_path;

void determinism(const fs::path& work) {
    expect(!g_cli_path.empty() && fs::exists(g_cli_path), "cli binary available");
    const std::string cfg =
        "dataset.kind = blobs\ndataset.classes = 6\ndataset.samples_per_class = 10\n"
        "dataset.dim = 12\ndataset.separation = 50\ndataset.spread = 1\ndataset.seed = 5\n"
        "method.name = glpp\nmethod.scheme = dot-product\nmethod.beta = 10000\n"
        "protocol.scheme = k-fold\nprotocol.k = 5\nprotocol.seed = 11\nprotocol.dims = 1:6\n"
        "output = " + (work / "out").string() + "\n";
    std::ofstream(work / "det.cfg") << cfg;

    const std::string cmd = g_cli_path.string() + " run --config " + (work / "det.cfg").string() +
                            " > " + (work / "log.txt").string() + " 2>&1";
    expect(std::system(cmd.c_str()) == 0, "first run succeeds");
    const std::string first = testsupport::slurp(work / "out" / "report.json");
    expect(std::system(cmd.c_str()) == 0, "second run succeeds");
    const std::string second = testsupport::slurp(work / "out" / "report.json");
    expect(!first.empty() && first == second, "report.json is byte-identical across runs");
}

bool orl_reproduction() {
    const char* env = std::getenv("SUBSPACE_LAB_ORL_DIR");
    if (env == nullptr || !fs::is_directory(env)) {
        std::printf("[SKIP] 9. dataset reproduction (set SUBSPACE_LAB_ORL_DIR to an ORL-style "
                    "image tree to enable)\n");
        return true;
    }
    return run_criterion(9, "ORL leave-one-out GLPP reaches ARA >= 0.97", 600.0, [&] {
        const ImageDataset images = load_image_tree(env, std::make_pair(32, 32));
        const LabeledDataset d = vectorize(images);
        const SplitPlan splits = make_splits(d.labels, SplitScheme::LeaveOneOut, 0, 1);
        const int max_dim = std::min<int>(60, static_cast<int>(d.size()) - 2);
        const EvalReport report =
            run_protocol(d, glpp_config(10000.0), splits, range_dims(1, max_dim));
        std::printf("       ORL ara %.4f +/- %.4f at dim %d\n", report.ara, report.std_dev,
                    report.best_dim);
        expect(report.ara >= 0.97, "ARA at least 0.97");
    });
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") g_cli_path = argv[i + 1];

    const fs::path work = testsupport::temp_dir("acceptance");
    int failed = 0;
    failed += !run_criterion(1, "laplacian suite (200 random graphs, 3 schemes)", 5.0,
                             laplacian_suite);
    failed += !run_criterion(2, "objective oracles (100 random instances)", 10.0,
                             objective_oracle_suite);
    failed += !run_criterion(3, "eigen residuals (5 methods + 2D)", 10.0, eigen_residual_suite);
    failed += !run_criterion(4, "degeneracy identities", 2.0, degeneracy_identities);
    failed += !run_criterion(5, "synthetic end-to-end (blobs, leave-one-out)", 30.0,
                             synthetic_end_to_end);
    failed += !run_criterion(6, "beta insensitivity above 1000", 60.0, beta_insensitivity);
    failed += !run_criterion(7, "lbp suite", 2.0, lbp_suite);
    failed += !run_criterion(8, "cli determinism", 10.0, [&] { determinism(work); });
    failed += !orl_reproduction();

    std::printf("%s\n", failed ? "ACCEPTANCE: FAILURES PRESENT" : "ACCEPTANCE: ALL CRITERIA PASS");
    return failed ? 1 : 0;
}

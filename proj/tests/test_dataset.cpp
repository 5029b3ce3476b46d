#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>

#include "subspace/dataset.hpp"
#include "subspace/serialize.hpp"
#include "support.hpp"

using namespace subspace;
using testsupport::Rng;

namespace {

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

} // namespace

TEST_CASE("csv loading: shapes, dense relabeling, line endings") {
    const auto dir = testsupport::temp_dir("csv");

    SUBCASE("two-row file") {
        const auto p = write_text(dir, "t.csv", "1,0,0\n2,1,1\n");
        const LabeledDataset d = load_csv_dataset(p);
        CHECK(d.dim() == 2);
        CHECK(d.size() == 2);
        CHECK(d.class_count == 2);
        CHECK(d.features(0, 1) == 1.0);
    }
    SUBCASE("labels re-indexed in first-occurrence order") {
        const auto p = write_text(dir, "l.csv", "5,1\n9,2\n5,3\n");
        const LabeledDataset d = load_csv_dataset(p);
        CHECK(d.labels == std::vector<int>{1, 2, 1});
        CHECK(d.class_count == 2);
    }
    SUBCASE("CRLF accepted") {
        const auto p = write_text(dir, "crlf.csv", "1,2.5\r\n2,3.5\r\n");
        const LabeledDataset d = load_csv_dataset(p);
        CHECK(d.features(0, 0) == 2.5);
    }
    SUBCASE("ragged row reports the row number") {
        const auto p = write_text(dir, "r.csv", "1,0,0\n2,1\n");
        CHECK_THROWS_WITH_AS(load_csv_dataset(p), doctest::Contains("row 2"), ParseError);
    }
    SUBCASE("non-numeric field") {
        const auto p = write_text(dir, "n.csv", "1,0,zap\n");
        CHECK_THROWS_AS(load_csv_dataset(p), ParseError);
    }
    SUBCASE("empty file") {
        const auto p = write_text(dir, "e.csv", "");
        CHECK_THROWS_AS(load_csv_dataset(p), ParseError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_csv_dataset(dir / "nope.csv"), IoError); }

    SUBCASE("orl-shaped export: 400 rows, 40 subjects") {
        std::string content;
        for (int subject = 1; subject <= 40; ++subject)
            for (int shot = 0; shot < 10; ++shot)
                content += std::to_string(subject) + "," + std::to_string(shot) + ",0.5\n";
        const auto p = write_text(dir, "orl.csv", content);
        const LabeledDataset d = load_csv_dataset(p);
        CHECK(d.size() == 400);
        CHECK(d.class_count == 40);
    }
}

TEST_CASE("pgm trees: labels, scaling, resize, error paths") {
    const auto dir = testsupport::temp_dir("pgm");
    std::filesystem::create_directories(dir / "alice");
    std::filesystem::create_directories(dir / "bob");

    Eigen::MatrixXi constant = Eigen::MatrixXi::Constant(4, 5, 128);
    for (int i = 0; i < 3; ++i) {
        testsupport::write_pgm_p5(dir / "alice" / ("a" + std::to_string(i) + ".pgm"), constant);
        testsupport::write_pgm_p2(dir / "bob" / ("b" + std::to_string(i) + ".pgm"), constant);
    }

    SUBCASE("walk order and scaling") {
        const ImageDataset d = load_image_tree(dir);
        CHECK(d.size() == 6);
        CHECK(d.labels == std::vector<int>{1, 1, 1, 2, 2, 2});
        CHECK(d.images[0](0, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
        CHECK(d.images[5](3, 4) == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
    }
    SUBCASE("resize keeps corners exactly") {
        Rng rng(7);
        Eigen::MatrixXi big(112, 92);
        for (Eigen::Index r = 0; r < big.rows(); ++r)
            for (Eigen::Index c = 0; c < big.cols(); ++c)
                big(r, c) = static_cast<int>(rng.bounded(256));
        std::filesystem::create_directories(dir / "carol");
        testsupport::write_pgm_p5(dir / "carol" / "c0.pgm", big);

        // mixed sizes without resize must fail
        CHECK_THROWS_AS(load_image_tree(dir), ShapeError);

        const ImageDataset resized = load_image_tree(dir, std::make_pair(32, 32));
        const Eigen::MatrixXd& small = resized.images.back();
        const Eigen::MatrixXd orig = resize_bilinear(
            [&] {
                Eigen::MatrixXd m(112, 92);
                for (Eigen::Index r = 0; r < m.rows(); ++r)
                    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = big(r, c) / 255.0;
                return m;
            }(),
            32, 32);
        CHECK(small.rows() == 32);
        CHECK(small(0, 0) == doctest::Approx(big(0, 0) / 255.0).epsilon(1e-15));
        CHECK(small(31, 31) == doctest::Approx(big(111, 91) / 255.0).epsilon(1e-15));
        CHECK(small(0, 31) == doctest::Approx(big(0, 91) / 255.0).epsilon(1e-15));
        CHECK(small(31, 0) == doctest::Approx(big(111, 0) / 255.0).epsilon(1e-15));
        CHECK((small - orig).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("corrupt header names the file") {
        std::filesystem::create_directories(dir / "dora");
        write_text(dir / "dora", "bad.pgm", "P7 nonsense");
        CHECK_THROWS_WITH_AS(load_image_tree(dir), doctest::Contains("bad.pgm"), ParseError);
    }
}

TEST_CASE("vectorize flattens column-major and round-trips") {
    ImageDataset imgs;
    imgs.class_count = 1;
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 3.0, 2.0, 4.0; // [[a,b],[c,d]] with a=1,b=3,c=2,d=4
    imgs.images.push_back(m);
    imgs.labels.push_back(1);

    const LabeledDataset d = vectorize(imgs);
    CHECK(d.dim() == 4);
    // column-major: (a, c, b, d)
    CHECK(d.features(0, 0) == 1.0);
    CHECK(d.features(1, 0) == 2.0);
    CHECK(d.features(2, 0) == 3.0);
    CHECK(d.features(3, 0) == 4.0);

    const Eigen::Map<const Eigen::MatrixXd> back(d.features.col(0).data(), 2, 2);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

    Rng rng(3);
    const ImageDataset many = testsupport::random_images(rng, 32, 32, 2, 3);
    CHECK(vectorize(many).dim() == 1024);
}

TEST_CASE("split plans") {
    SUBCASE("leave-one-out: one test index per fold") {
        const std::vector<int> labels{1, 1, 2, 2, 1};
        const SplitPlan plan = make_splits(labels, SplitScheme::LeaveOneOut, 0, 9);
        REQUIRE(plan.folds.size() == 5);
        std::set<int> seen;
        for (const auto& fold : plan.folds) {
            CHECK(fold.test.size() == 1);
            CHECK(fold.train.size() == 4);
            seen.insert(fold.test[0]);
        }
        CHECK(seen.size() == 5);
    }
    SUBCASE("two-fold: 5 train + 5 test per class per fold") {
        std::vector<int> labels;
        for (int c = 1; c <= 4; ++c)
            for (int s = 0; s < 10; ++s) labels.push_back(c);
        const SplitPlan plan = make_splits(labels, SplitScheme::TwoFold, 0, 42);
        REQUIRE(plan.folds.size() == 2);
        for (const auto& fold : plan.folds) {
            for (int c = 1; c <= 4; ++c) {
                int train_c = 0, test_c = 0;
                for (int i : fold.train) train_c += labels[static_cast<std::size_t>(i)] == c;
                for (int i : fold.test) test_c += labels[static_cast<std::size_t>(i)] == c;
                CHECK(train_c == 5);
                CHECK(test_c == 5);
            }
        }
    }
    SUBCASE("k-fold coverage: every index tested exactly once") {
        std::vector<int> labels;
        for (int c = 1; c <= 3; ++c)
            for (int s = 0; s < 7; ++s) labels.push_back(c);
        const SplitPlan plan = make_splits(labels, SplitScheme::KFold, 5, 1);
        std::vector<int> count(labels.size(), 0);
        for (const auto& fold : plan.folds)
            for (int i : fold.test) ++count[static_cast<std::size_t>(i)];
        for (int c : count) CHECK(c == 1);
        for (const auto& fold : plan.folds)
            for (int c = 1; c <= 3; ++c) {
                bool found = false;
                for (int i : fold.train) found |= labels[static_cast<std::size_t>(i)] == c;
                CHECK(found);
            }
    }
    SUBCASE("single-sample: 6 samples/class gives 6 folds of 1 train + 5 test per class") {
        std::vector<int> labels;
        for (int c = 1; c <= 3; ++c)
            for (int s = 0; s < 6; ++s) labels.push_back(c);
        const SplitPlan plan = make_splits(labels, SplitScheme::SingleSample, 0, 0);
        REQUIRE(plan.folds.size() == 6);
        for (const auto& fold : plan.folds) {
            CHECK(fold.train.size() == 3);
            CHECK(fold.test.size() == 15);
        }
    }
    SUBCASE("first-n-train drops short classes with a warning count") {
        const std::vector<int> labels{1, 1, 1, 2, 2, 3, 3, 3, 3};
        const SplitPlan plan = make_splits(labels, SplitScheme::FirstNTrain, 2, 0);
        REQUIRE(plan.folds.size() == 1);
        CHECK(plan.dropped_classes == 1); // class 2 has only n samples
        CHECK(plan.folds[0].train == std::vector<int>{0, 1, 5, 6});
        CHECK(plan.folds[0].test == std::vector<int>{2, 7, 8});
    }
    SUBCASE("k-fold rejects singleton classes, listing them") {
        const std::vector<int> labels{1, 1, 2, 3, 3};
        CHECK_THROWS_WITH_AS(make_splits(labels, SplitScheme::KFold, 2, 0),
                             doctest::Contains("2"), ProtocolError);
    }
    SUBCASE("determinism: identical inputs give byte-identical plans") {
        std::vector<int> labels;
        for (int c = 1; c <= 5; ++c)
            for (int s = 0; s < 9; ++s) labels.push_back(c);
        const auto a = make_splits(labels, SplitScheme::KFold, 3, 77);
        const auto b = make_splits(labels, SplitScheme::KFold, 3, 77);
        CHECK(to_json(a) == to_json(b));
        const auto c = make_splits(labels, SplitScheme::KFold, 3, 78);
        CHECK(to_json(a) != to_json(c));
    }
}

TEST_CASE("class means") {
    SUBCASE("tiny cases") {
        LabeledDataset d;
        d.class_count = 2;
        d.features.resize(2, 3);
        d.features.col(0) << 0, 0;
        d.features.col(1) << 2, 2;
        d.features.col(2) << 5, -1;
        d.labels = {1, 1, 2};
        const MeanSpace m = class_means(d);
        CHECK(m.means.col(0)(0) == 1.0);
        CHECK(m.means.col(0)(1) == 1.0);
        CHECK(m.means.col(1)(0) == 5.0); // single sample class equals the sample
    }
    SUBCASE("random toy matches per-class averaging") {
        Rng rng(5);
        const LabeledDataset d = testsupport::random_dataset(rng, 4, 3, 6);
        const MeanSpace m = class_means(d);
        for (int c = 1; c <= 3; ++c) {
            Eigen::VectorXd expect = Eigen::VectorXd::Zero(4);
            int count = 0;
            for (Eigen::Index j = 0; j < d.size(); ++j)
                if (d.labels[static_cast<std::size_t>(j)] == c) {
                    expect += d.features.col(j);
                    ++count;
                }
            expect /= count;
            CHECK((m.means.col(c - 1) - expect).cwiseAbs().maxCoeff() < 1e-12 * expect.norm());
        }
    }
}

TEST_CASE("pca preprocessing") {
    SUBCASE("collinear data keeps one component") {
        LabeledDataset d;
        d.class_count = 1;
        d.features.resize(5, 3);
        const Eigen::VectorXd dir = (Eigen::VectorXd(5) << 1, 2, 3, 4, 5).finished();
        d.features.col(0) = 0.0 * dir;
        d.features.col(1) = 1.0 * dir;
        d.features.col(2) = 2.0 * dir;
        d.labels = {1, 1, 1};
        const auto [model, reduced] = pca_preprocess(d, 1.0);
        CHECK(model.basis.cols() == 1);
        CHECK(reduced.dim() == 1);
    }
    SUBCASE("generic data keeps n-1 components at ratio 1") {
        Rng rng(6);
        const LabeledDataset d = testsupport::random_dataset(rng, 20, 2, 4);
        const auto [model, reduced] = pca_preprocess(d, 1.0);
        CHECK(reduced.dim() == d.size() - 1);
        CHECK((model.basis.transpose() * model.basis - Eigen::MatrixXd::Identity(7, 7))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
        for (Eigen::Index i = 1; i < model.eigenvalues.size(); ++i)
            CHECK(model.eigenvalues(i) <= model.eigenvalues(i - 1));
        CHECK(model.eigenvalues.minCoeff() > 0.0);
        // centering: the projected training mean is zero
        const Eigen::VectorXd mean_proj = pca_project(model, d.features).rowwise().mean();
        CHECK(mean_proj.cwiseAbs().maxCoeff() < 1e-10 * d.features.cwiseAbs().maxCoeff());
    }
    SUBCASE("identical samples are rejected") {
        LabeledDataset d;
        d.class_count = 1;
        d.features = Eigen::MatrixXd::Constant(3, 4, 0.1);
        d.labels = {1, 1, 1, 1};
        CHECK_THROWS_AS(pca_preprocess(d, 1.0), DegenerateError);
    }
    SUBCASE("projection commutes with class averaging") {
        Rng rng(8);
        const LabeledDataset d = testsupport::random_dataset(rng, 12, 3, 5);
        const auto [model, reduced] = pca_preprocess(d, 1.0);
        const MeanSpace before = class_means(d);
        const Eigen::MatrixXd projected_means = pca_project(model, before.means);
        const MeanSpace after = class_means(reduced);
        CHECK((projected_means - after.means).cwiseAbs().maxCoeff() <
              1e-10 * (1.0 + projected_means.cwiseAbs().maxCoeff()));
    }
    SUBCASE("partial ratio keeps fewer dimensions") {
        Rng rng(9);
        const LabeledDataset d = testsupport::random_dataset(rng, 10, 2, 10);
        const auto [full_model, full] = pca_preprocess(d, 1.0);
        const auto [half_model, half] = pca_preprocess(d, 0.5);
        CHECK(half.dim() <= full.dim());
        CHECK(half.dim() >= 1);
    }
}

TEST_CASE("blob generator is deterministic and separated") {
    const LabeledDataset a = make_blobs(8, 20, 16, 50.0, 1.0, 123);
    const LabeledDataset b = make_blobs(8, 20, 16, 50.0, 1.0, 123);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK(a.size() == 160);
    CHECK(a.class_count == 8);

    const MeanSpace means = class_means(a);
    double min_dist = 1e300;
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
            min_dist = std::min(min_dist, (means.means.col(i) - means.means.col(j)).norm());
    CHECK(min_dist > 25.0); // centres are 50x the unit spread apart
}

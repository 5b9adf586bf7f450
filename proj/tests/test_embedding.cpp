#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "provbench/canonical.hpp"
#include "provbench/embedding.hpp"
#include "test_util.hpp"

using namespace provbench;
using testutil::data_dir;
using testutil::TempDir;

namespace {

doctest::Approx near(double v) { return doctest::Approx(v).epsilon(1e-12); }

FeatureMatrix fixture_matrix() {
    return load_feature_matrix(data_dir() / "embedding" / "descriptors.csv");
}

HarmonicTransform fixture_transform() {
    return load_transform(data_dir() / "embedding" / "transform.csv");
}

std::filesystem::path write_text(const TempDir& tmp, const char* name, const std::string& body) {
    const auto path = tmp.path / name;
    std::ofstream out(path);
    out << body;
    return path;
}

BitFingerprint bits(const char* id, std::uint64_t word, std::size_t width) {
    BitFingerprint fp;
    fp.id = id;
    fp.width = width;
    fp.words = {word};
    return fp;
}

} // namespace

TEST_CASE("embedding pipeline matches plain-loop arithmetic on a 3x2 matrix") {
    FeatureMatrix X;
    X.row_ids = {"a", "b", "c"};
    X.class_labels = {"x", "x", "y"};
    X.columns = {"u", "v"};
    X.values.resize(3, 2);
    X.values << 1.0, 10.0, 2.0, 20.0, 3.0, 60.0;

    HarmonicTransform T;
    T.input_columns = {"u", "v"};
    T.channels = {"h1", "h2"};
    T.matrix.resize(2, 2);
    T.matrix << 1.0, 0.5, 0.0, 0.5;

    const Embedding e = build_embedding(X, T);

    // same numbers, computed without any matrix machinery
    const double raw[3][2] = {{1.0, 10.0}, {2.0, 20.0}, {3.0, 60.0}};
    const double map[2][2] = {{1.0, 0.5}, {0.0, 0.5}};
    double mean[2] = {0, 0}, var[2] = {0, 0};
    for (int c = 0; c < 2; ++c) {
        for (int r = 0; r < 3; ++r) mean[c] += raw[r][c] / 3.0;
        for (int r = 0; r < 3; ++r)
            var[c] += (raw[r][c] - mean[c]) * (raw[r][c] - mean[c]) / 3.0;
    }
    for (int r = 0; r < 3; ++r) {
        double z[2], h[2] = {0, 0};
        for (int c = 0; c < 2; ++c) z[c] = (raw[r][c] - mean[c]) / std::sqrt(var[c]);
        for (int j = 0; j < 2; ++j)
            for (int c = 0; c < 2; ++c) h[j] += z[c] * map[c][j];
        const double norm = std::sqrt(h[0] * h[0] + h[1] * h[1]);
        CHECK_EQ(near(h[0] / norm), e.vectors(r, 0));
        CHECK_EQ(near(h[1] / norm), e.vectors(r, 1));
    }
}

TEST_CASE("the bundled descriptor fixture embeds onto the unit sphere") {
    const FeatureMatrix X = fixture_matrix();
    CHECK_EQ(16, X.row_ids.size());
    CHECK(std::is_sorted(X.row_ids.begin(), X.row_ids.end()));
    CHECK_EQ(6, X.columns.size());
    CHECK_EQ("molecular_weight", X.columns.front());

    const HarmonicTransform T = fixture_transform();
    CHECK_EQ(X.columns, T.input_columns);
    CHECK_EQ(std::vector<std::string>{"chromatic_complexity", "tonal_polarity", "modal_color",
                                      "cadence_weight"},
             T.channels);

    const Embedding e = build_embedding(X, T);
    CHECK_EQ(16, e.vectors.rows());
    CHECK_EQ(4, e.vectors.cols());
    for (Eigen::Index r = 0; r < e.vectors.rows(); ++r)
        CHECK_EQ(near(1.0), e.vectors.row(r).norm());
}

TEST_CASE("build rejects malformed inputs") {
    FeatureMatrix X = fixture_matrix();
    HarmonicTransform T = fixture_transform();

    SUBCASE("constant descriptor column") {
        X.values.col(2).setConstant(1.5);
        CHECK_ERROR_KIND(ZeroVarianceColumn, build_embedding(X, T));
    }
    SUBCASE("transform rows out of order") {
        std::swap(T.input_columns[0], T.input_columns[1]);
        CHECK_ERROR_KIND(DimensionMismatch, build_embedding(X, T));
    }
    SUBCASE("transform shaped for a different descriptor count") {
        T.matrix.conservativeResize(5, Eigen::NoChange);
        T.input_columns.pop_back();
        CHECK_ERROR_KIND(DimensionMismatch, build_embedding(X, T));
    }
    SUBCASE("one row is not a matrix") {
        X.values.conservativeResize(1, Eigen::NoChange);
        X.row_ids.resize(1);
        X.class_labels.resize(1);
        CHECK_ERROR_KIND(SchemaError, build_embedding(X, T));
    }
}

TEST_CASE("cosine and tanimoto stay in their lanes") {
    Eigen::VectorXd a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    CHECK_EQ(0.0, similarity(a, b, SimilarityKind::cosine));
    CHECK_EQ(1.0, similarity(a, a, SimilarityKind::cosine));
    CHECK_ERROR_KIND(KindMismatch, similarity(a, b, SimilarityKind::tanimoto));
    Eigen::VectorXd c(3);
    c << 1.0, 0.0, 0.0;
    CHECK_ERROR_KIND(DimensionMismatch, similarity(a, c, SimilarityKind::cosine));

    const BitFingerprint f1 = bits("f1", 0b1100, 4);
    const BitFingerprint f2 = bits("f2", 0b1010, 4);
    CHECK_EQ(near(1.0 / 3.0), similarity(f1, f2, SimilarityKind::tanimoto));
    CHECK_EQ(1.0, similarity(f1, f1, SimilarityKind::tanimoto));
    CHECK_EQ(1.0, similarity(bits("e1", 0, 4), bits("e2", 0, 4), SimilarityKind::tanimoto));
    CHECK_ERROR_KIND(KindMismatch, similarity(f1, f2, SimilarityKind::cosine));
    CHECK_ERROR_KIND(DimensionMismatch, similarity(f1, bits("w", 0b1, 8), SimilarityKind::tanimoto));
}

TEST_CASE("retrieval ranks neighbors by cosine, ties broken by ascending id") {
    Embedding e;
    e.row_ids = {"a", "b", "c"};
    e.vectors.resize(3, 2);
    e.vectors << 1.0, 0.0, // a
        0.0, 1.0,          // b
        0.0, 1.0;          // c
    const std::vector<std::string> labels = {"x", "x", "y"};
    // a sees b and c tied at similarity 0 and keeps b (earlier id): hit.
    // b's nearest is c (miss), c's nearest is b (miss).
    CHECK_EQ(near(1.0 / 3.0), retrieval_at_k(e, labels, 1));
    // at k = 2 both x items see 1 of 2, the y item sees none
    CHECK_EQ(near(1.0 / 3.0), retrieval_at_k(e, labels, 2));

    CHECK_ERROR_KIND(KTooLarge, retrieval_at_k(e, labels, 0));
    CHECK_ERROR_KIND(KTooLarge, retrieval_at_k(e, labels, 3));
    CHECK_ERROR_KIND(DimensionMismatch, retrieval_at_k(e, {"x", "y"}, 1));
}

TEST_CASE("retrieval at k = n-1 equals the label-shuffle expectation") {
    const Embedding e = build_embedding(fixture_matrix(), fixture_transform());
    const std::vector<std::string> labels = fixture_matrix().class_labels;

    // class sizes 4,3,3,2,2,2 over 16 rows: 30 same-class ordered pairs of 240
    CHECK_EQ(0.125, expected_shuffled_rate(labels));
    CHECK_EQ(near(0.125), retrieval_at_k(e, labels, 15));

    // the identity holds for any labeling, not just the fixture's
    std::vector<std::string> lopsided(labels);
    for (std::size_t i = 0; i < 5; ++i) lopsided[i] = "blob";
    CHECK_EQ(near(expected_shuffled_rate(lopsided)), retrieval_at_k(e, lopsided, 15));

    CHECK_EQ(near(1.0 / 3.0), expected_shuffled_rate({"a", "a", "b", "b"}));
    CHECK_EQ(retrieval_at_k(e, labels, 1), same_class_nn_rate(e, labels));
    CHECK_EQ(0.9375, same_class_nn_rate(e, labels)); // 15 of 16 nearest neighbors agree
}

TEST_CASE("feature and embedding documents round-trip through json") {
    const FeatureMatrix X = fixture_matrix();
    const FeatureMatrix X2 = feature_matrix_from_json(feature_matrix_to_json(X));
    CHECK_EQ(canonicalize(feature_matrix_to_json(X)), canonicalize(feature_matrix_to_json(X2)));
    CHECK_EQ(X.row_ids, X2.row_ids);
    CHECK_EQ(X.values, X2.values);

    const Embedding e = build_embedding(X, fixture_transform());
    const Embedding e2 = embedding_from_json(embedding_to_json(e));
    CHECK_EQ(canonicalize(embedding_to_json(e)), canonicalize(embedding_to_json(e2)));

    CHECK_ERROR_KIND(SchemaError, feature_matrix_from_json(parse_json_strict(R"({"rows":[]})")));
}

TEST_CASE("ingestion rejects malformed files") {
    TempDir tmp;
    SUBCASE("duplicate row id") {
        const auto path = write_text(tmp, "dup.csv",
                                     "id,class,u,v\nm1,x,1,2\nm1,y,3,4\nm2,x,5,6\n");
        CHECK_ERROR_KIND(DuplicateId, load_feature_matrix(path));
    }
    SUBCASE("duplicate descriptor column") {
        const auto path = write_text(tmp, "dupcol.csv", "id,class,u,u\nm1,x,1,2\nm2,y,3,4\n");
        CHECK_ERROR_KIND(SchemaError, load_feature_matrix(path));
    }
    SUBCASE("header must start id,class") {
        const auto path = write_text(tmp, "bad.csv", "name,class,u,v\nm1,x,1,2\nm2,y,3,4\n");
        CHECK_ERROR_KIND(SchemaError, load_feature_matrix(path));
    }
    SUBCASE("non-numeric descriptor cell") {
        const auto path = write_text(tmp, "nan.csv", "id,class,u,v\nm1,x,1,lots\nm2,y,3,4\n");
        CHECK_ERROR_KIND(SchemaError, load_feature_matrix(path));
    }
    SUBCASE("fingerprints must share a width") {
        const auto path = write_text(tmp, "fp.txt", "f1 a0f3\nf2 a0\n");
        CHECK_ERROR_KIND(DimensionMismatch, load_fingerprints(path));
    }
    SUBCASE("fingerprints reject stray characters") {
        const auto path = write_text(tmp, "fp2.txt", "f1 a0g3\n");
        CHECK_ERROR_KIND(SchemaError, load_fingerprints(path));
    }
}

TEST_CASE("the bundled fingerprints parse to 64-bit prints") {
    const auto prints = load_fingerprints(data_dir() / "embedding" / "fingerprints.txt");
    REQUIRE_EQ(16, prints.size());
    for (const auto& fp : prints) {
        CHECK_EQ(64, fp.width);
        CHECK_EQ(1.0, similarity(fp, fp, SimilarityKind::tanimoto));
    }
    CHECK_LT(similarity(prints[0], prints[1], SimilarityKind::tanimoto), 1.0);
}

TEST_CASE("null controls separate structure from labels") {
    const FeatureMatrix X = fixture_matrix();
    const HarmonicTransform T = fixture_transform();
    const RandomSource rng(99, "null-check");
    const NullReport report = null_controls(X, X.class_labels, T, 1, 200, 20, rng);

    CHECK_EQ(0.9375, report.observed);
    CHECK_EQ(1, report.k);
    CHECK_EQ(200, report.label_perms);
    CHECK_EQ(20, report.random_maps);
    // shuffling labels destroys class structure down to the analytic rate
    CHECK_EQ(doctest::Approx(0.125).epsilon(0.5), report.shuffled_label_mean);
    CHECK_EQ(1.0 / 201.0, report.shuffled_label_p);
    // random maps keep the geometry, so same-class retrieval stays well above
    CHECK_GT(report.random_map_mean, 3.0 * report.shuffled_label_mean);

    const NullReport replay = null_controls(X, X.class_labels, T, 1, 200, 20, rng);
    CHECK_EQ(report.shuffled_label_mean, replay.shuffled_label_mean);
    CHECK_EQ(report.random_map_mean, replay.random_map_mean);

    const Json doc = null_report_to_json(report);
    CHECK_EQ(0.9375, doc.at("observed").get<double>());
    CHECK_EQ(200, doc.at("label_perms").get<int>());
}

#pragma once

// Harmonic embeddings over ingested descriptor matrices: z-score, fixed
// linear transform, L2 normalization, then retrieval and null-control
// metrics. Rows are sorted by id on load so results never depend on input
// order.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "provbench/random.hpp"
#include "provbench/store.hpp"

namespace provbench {

struct FeatureMatrix {
    std::vector<std::string> row_ids;      // sorted ascending
    std::vector<std::string> class_labels; // aligned with row_ids
    std::vector<std::string> columns;
    Eigen::MatrixXd values; // n x m
};

struct HarmonicTransform {
    std::vector<std::string> input_columns; // m descriptor names
    std::vector<std::string> channels;      // h harmonic channel names
    Eigen::MatrixXd matrix;                 // m x h
};

struct Embedding {
    std::vector<std::string> row_ids;
    Eigen::MatrixXd vectors; // n x h, unit-norm rows
};

struct BitFingerprint {
    std::string id;
    std::size_t width = 0;
    std::vector<std::uint64_t> words;
};

enum class SimilarityKind { cosine, tanimoto };

FeatureMatrix load_feature_matrix(const std::filesystem::path& csv);
HarmonicTransform load_transform(const std::filesystem::path& csv);
std::vector<BitFingerprint> load_fingerprints(const std::filesystem::path& file);

Json feature_matrix_to_json(const FeatureMatrix& X);
FeatureMatrix feature_matrix_from_json(const Json& doc);
Json embedding_to_json(const Embedding& embedding);
Embedding embedding_from_json(const Json& doc);

// z-score columns (population std), multiply by T, L2-normalize rows.
Embedding build_embedding(const FeatureMatrix& X, const HarmonicTransform& T);

double similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b, SimilarityKind kind);
double similarity(const BitFingerprint& a, const BitFingerprint& b, SimilarityKind kind);

// Mean over items of the same-class fraction among the k nearest neighbors
// by cosine; self excluded, ties broken by ascending id.
double retrieval_at_k(const Embedding& embedding, const std::vector<std::string>& labels, int k);

double same_class_nn_rate(const Embedding& embedding, const std::vector<std::string>& labels);

// Expected same-class neighbor rate under label shuffling: a label-only
// quantity, sum over classes of n_c(n_c-1)/(n(n-1)).
double expected_shuffled_rate(const std::vector<std::string>& labels);

struct NullReport {
    double observed = 0.0;
    int k = 1;
    double shuffled_label_mean = 0.0;
    double shuffled_label_p = 1.0;
    int label_perms = 0;
    double random_map_mean = 0.0;
    int random_maps = 0;
};

NullReport null_controls(const FeatureMatrix& X, const std::vector<std::string>& labels,
                         const HarmonicTransform& T, int k, int n_label_perms, int n_random_maps,
                         const RandomSource& rng);

Json null_report_to_json(const NullReport& report);

} // namespace provbench
